"""The cascade: start homotopy, descent through the levels, classification, filtering.

Both coordinate systems share this driver. A formulation supplies the
homotopy for the start stage and for each descent ``i -> j``, plus the
conversion from its native coordinates to points ``w = (u, v)`` of C^{2k}.
"""

from __future__ import annotations

import enum
import logging
import time
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..calinalg import AffinePlane
from ..membership import MembershipQuery, filter_candidates, member
from ..tracker import PathStatus, TrackSettings, newton_refine, track_all
from ..witness import SliceSystem, WitnessSet
from .extrinsic import ExtrinsicCascadeHomotopy, ExtrinsicStartHomotopy
from .intrinsic import CascadeHomotopy, StartHomotopy
from .planes import cascade_plane, level_plane, start_plane, transform
from .problem import DiagonalProblem, RandomData, initialize, stacked_system

__all__ = [
    "StageRecord",
    "WitnessSuperset",
    "Split",
    "classify",
    "collapse",
    "level_slice",
    "run_cascade",
    "run_cascade_extrinsic",
    "Containment",
    "containment_precheck",
    "endpoint_match_distance",
]

log = logging.getLogger(__name__)

CLASSIFY_TOL = 1e-6
AMBIGUOUS_UPPER = 1e-4
DIAGONAL_TOL = 1e-6


@dataclass
class StageRecord:
    name: str
    level_from: int | None
    level_to: int
    num_paths: int
    statuses: dict[str, int]
    wall_time: float
    endpoints: list[np.ndarray] = field(repr=False)
    candidates: int = 0
    nonsolutions: int = 0


@dataclass
class WitnessSuperset:
    """Per-dimension candidate witness points of A ∩ B, plus run diagnostics.

    ``candidates[j]`` holds points of C^k surviving the filter at level j;
    ``junk[j]`` the ones found on a higher-dimensional piece.
    """

    mode: str
    num_variables: int
    candidates: dict[int, list[np.ndarray]] = field(default_factory=dict)
    junk: dict[int, list[np.ndarray]] = field(default_factory=dict)
    suspect: dict[int, list[int]] = field(default_factory=dict)
    nonsolution_counts: dict[int, int] = field(default_factory=dict)
    off_diagonal: dict[int, int] = field(default_factory=dict)
    slices: dict[int, SliceSystem] = field(default_factory=dict, repr=False)
    stages: list[StageRecord] = field(default_factory=list)
    outcomes: list[str] = field(default_factory=list)
    slack_disagreements: int = 0
    restarts: int = 0
    failed: bool = False
    total_time: float = 0.0

    def counts(self) -> dict[int, int]:
        return {j: len(pts) for j, pts in sorted(self.candidates.items())}

    def witness_sets(self, problem: DiagonalProblem) -> dict[int, WitnessSet]:
        system = stacked_system(problem)
        return {
            j: WitnessSet(system, j, self.slices[j], tuple(pts))
            for j, pts in self.candidates.items()
            if pts
        }


@dataclass
class Split:
    candidates: list[int]
    nonsolutions: list[int]
    points: list[np.ndarray]
    disagreements: int = 0


def level_slice(rd: RandomData, j: int) -> SliceSystem:
    """The level-j slice ``P_j (C (x, x) + d) = 0`` pulled back to C^k."""
    k = rd.k
    return SliceSystem((rd.C[:, :k] + rd.C[:, k:])[:j], rd.d[:j])


def _refine_on_slice(rd: RandomData, w: np.ndarray, j: int) -> np.ndarray:
    # Gauss-Newton on the overdetermined [sF(w); A w; P_j(C w + d)] = 0.
    A = rd.A
    lin = np.vstack([A, rd.C[:j]])

    def F(x):
        val, J = rd.sF.evaluate_and_jacobian(x)
        r = np.concatenate([val, A @ x, rd.C[:j] @ x + rd.d[:j]])
        Jf = np.vstack([J, lin])
        return Jf.conj().T @ r, Jf.conj().T @ Jf

    return newton_refine(F, w, tol=1e-14, max_iters=5)[0]


def classify(rd: RandomData, points_w, j: int, tol: float = CLASSIFY_TOL, slacks=None) -> Split:
    """Split level-j endpoints into witness candidates and nonsolutions.

    A point is a candidate when its slack ``P_j (C w + d)`` vanishes; by
    default the slack is computed from ``w``, the extrinsic cascade passes
    its z coordinates instead. Points in the band ``[tol, 1e-4]`` are first
    pulled onto the slice-augmented system and re-tested.
    """
    points = [np.asarray(w, dtype=complex) for w in points_w]
    cands, nons = [], []
    disagreements = 0
    for idx, w in enumerate(points):
        z = rd.slack(w)[:j] if slacks is None else np.asarray(slacks[idx])[:j]
        scale = 1 + np.linalg.norm(w)
        size = np.max(np.abs(z), initial=0.0)
        if tol * scale < size <= AMBIGUOUS_UPPER * scale:
            w = _refine_on_slice(rd, w, j)
            z = rd.slack(w)[:j]
            size = np.max(np.abs(z), initial=0.0)
            points[idx] = w
        prefix = size <= tol * scale
        last = j == 0 or abs(z[j - 1]) <= tol * scale
        if prefix != last:
            disagreements += 1
        (cands if prefix else nons).append(idx)
    return Split(cands, nons, points, disagreements)


def collapse(w: np.ndarray, k: int, tol: float = DIAGONAL_TOL) -> np.ndarray | None:
    """Midpoint of (u, v) for a point on the diagonal, else None."""
    u, v = w[:k], w[k:]
    if np.linalg.norm(u - v) > tol * (1 + np.linalg.norm(u)):
        return None
    return (u + v) / 2


# --------------------------------------------------------------------------
# formulations


class _Intrinsic:
    name = "intrinsic"
    has_slacks = False

    def __init__(self, problem: DiagonalProblem, rd: RandomData):
        self.problem, self.rd = problem, rd
        self.num_variables = problem.m
        self.S = start_plane(problem.wA.slice, problem.wB.slice)
        self._plane: AffinePlane | None = None

    def start(self, level: int):
        target = level_plane(self.rd, level)
        H = StartHomotopy(self.rd.sF, self.S, target, self.rd.gamma_start)
        starts = [
            self.S.project(np.concatenate([al, be]))
            for al in self.problem.wA.points
            for be in self.problem.wB.points
        ]
        self._plane = target
        return H, starts

    def descend(self, i: int, j: int, points):
        plane = cascade_plane(self.rd, i, j)
        starts = transform(points, self._plane, plane.plane_at(1.0))
        self._plane = plane.plane_at(0.0)
        return CascadeHomotopy(self.rd.sF, plane), starts

    def to_w(self, y):
        return self._plane.embed(y)


class _Extrinsic:
    name = "extrinsic"
    has_slacks = True

    def __init__(self, problem: DiagonalProblem, rd: RandomData):
        self.problem, self.rd = problem, rd
        self.num_variables = 3 * problem.k

    def start(self, level: int):
        k = self.problem.k
        H = ExtrinsicStartHomotopy(
            self.rd, self.problem.wA.slice, self.problem.wB.slice, level, self.rd.gamma_start
        )
        starts = [
            np.concatenate([al, be, np.zeros(k, dtype=complex)])
            for al in self.problem.wA.points
            for be in self.problem.wB.points
        ]
        return H, starts

    def descend(self, i: int, j: int, points):
        return ExtrinsicCascadeHomotopy(self.rd, i, j, self.rd.gamma_cascade), list(points)

    def to_w(self, x):
        return x[: 2 * self.problem.k]

    def slacks(self, x):
        return x[2 * self.problem.k :]


# --------------------------------------------------------------------------
# driver

_FAILURES = (PathStatus.STEP_COLLAPSE, PathStatus.MAX_STEPS)


def _cascade(problem, rd, form, settings, threads, direct_start, tol) -> WitnessSuperset:
    k = problem.k
    sup = WitnessSuperset(form.name, form.num_variables)
    top = problem.hmax - 1 if direct_start and problem.hmax - 1 >= problem.h0 else problem.hmax
    t_run = time.perf_counter()
    lineage: list[int] = []
    pending: list[np.ndarray] = []
    level_from = None
    level = top
    while True:
        t0 = time.perf_counter()
        if level_from is None:
            H, starts = form.start(level)
            lineage = list(range(len(starts)))
            sup.outcomes = ["Pending"] * len(starts)
        else:
            H, starts = form.descend(level_from, level, pending)
        results = track_all(H, starts, settings, threads)
        ok = [r for r in results if r.converged]
        ws = [form.to_w(r.endpoint) for r in ok]
        slacks = [form.slacks(r.endpoint) for r in ok] if form.has_slacks else None
        for r in results:
            if not r.converged:
                sup.outcomes[lineage[r.start_index]] = r.status.value
            if r.status in _FAILURES:
                sup.failed = True
        split = classify(rd, ws, level, tol, slacks)
        sup.slack_disagreements += split.disagreements
        sup.slices[level] = level_slice(rd, level)
        collapsed = []
        for idx in split.candidates:
            x = collapse(split.points[idx], k)
            path = lineage[ok[idx].start_index]
            if x is None:
                sup.off_diagonal[level] = sup.off_diagonal.get(level, 0) + 1
                sup.outcomes[path] = "OffDiagonal"
            else:
                collapsed.append((path, x))
        higher = sup.witness_sets(problem)
        filt = filter_candidates([x for _, x in collapsed], higher, tol, seed=problem.seed + 7919 * level)
        kept_ids = {id(x) for x in filt.kept}
        for path, x in collapsed:
            sup.outcomes[path] = f"Witness{level}" if id(x) in kept_ids else f"Junk{level}"
        sup.candidates[level] = list(filt.kept)
        sup.junk[level] = list(filt.junk)
        if filt.suspect:
            sup.suspect[level] = list(filt.suspect)
        sup.nonsolution_counts[level] = len(split.nonsolutions)
        sup.stages.append(
            StageRecord(
                "start" if level_from is None else "cascade",
                level_from,
                level,
                len(starts),
                dict(Counter(r.status.value for r in results)),
                time.perf_counter() - t0,
                ws,
                len(collapsed),
                len(split.nonsolutions),
            )
        )
        pending = [ok[idx].endpoint for idx in split.nonsolutions]
        next_lineage = [lineage[ok[idx].start_index] for idx in split.nonsolutions]
        if level <= problem.h0 or not pending:
            for path in next_lineage:
                sup.outcomes[path] = "Nonsolution"
            break
        lineage = next_lineage
        level_from, level = level, level - 1
    sup.total_time = time.perf_counter() - t_run
    return sup


def _run(problem, form_cls, settings, threads, direct_start, tol, restart) -> WitnessSuperset:
    rng = np.random.default_rng(problem.seed)
    rd = initialize(problem, rng)
    sup = _cascade(problem, rd, form_cls(problem, rd), settings, threads, direct_start, tol)
    if sup.failed and restart:
        log.info("%s cascade had path failures; restarting with fresh gamma", form_cls.name)
        rd = rd.with_fresh_gammas(rng)
        sup = _cascade(problem, rd, form_cls(problem, rd), settings, threads, direct_start, tol)
        sup.restarts = 1
    return sup


def run_cascade(
    problem: DiagonalProblem,
    settings: TrackSettings | None = None,
    threads: int = 1,
    direct_start: bool = False,
    tol: float = CLASSIFY_TOL,
    restart: bool = True,
) -> WitnessSuperset:
    """Witness superset of A ∩ B computed in intrinsic coordinates.

    The start homotopy lands on level ``hmax`` and the cascade then steps
    down one level at a time to ``h0``. With ``direct_start`` the start
    homotopy lands on ``hmax - 1`` instead, saving one stage.
    """
    return _run(problem, _Intrinsic, settings, threads, direct_start, tol, restart)


def run_cascade_extrinsic(
    problem: DiagonalProblem,
    settings: TrackSettings | None = None,
    threads: int = 1,
    direct_start: bool = False,
    tol: float = CLASSIFY_TOL,
    restart: bool = True,
) -> WitnessSuperset:
    """Same contract as :func:`run_cascade`, tracking (w, z) in C^{3k}."""
    return _run(problem, _Extrinsic, settings, threads, direct_start, tol, restart)


class Containment(str, enum.Enum):
    B_IN_A = "BcontainedInA"
    PROCEED = "Proceed"


def containment_precheck(problem: DiagonalProblem, tol: float = 1e-6) -> Containment:
    """Test a generic point of B for membership in A."""
    probe = problem.wB.points[0]
    query = MembershipQuery(problem.wA, probe, tol)
    if member(query, np.random.default_rng([problem.seed, 101])):
        return Containment.B_IN_A
    return Containment.PROCEED


def _set_distance(p, q) -> float:
    if len(p) != len(q):
        return np.inf
    if not p:
        return 0.0
    cost = np.array([[np.linalg.norm(x - y) for y in q] for x in p])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def endpoint_match_distance(first: WitnessSuperset, second: WitnessSuperset) -> float:
    """Largest distance between matched endpoints of two runs.

    Compares the converged endpoints of every stage (in C^{2k}) and the
    final candidates of every level (in C^k) as multisets; differing counts
    give ``inf``.
    """
    if len(first.stages) != len(second.stages):
        return np.inf
    dist = 0.0
    for s1, s2 in zip(first.stages, second.stages):
        dist = max(dist, _set_distance(s1.endpoints, s2.endpoints))
    for j in set(first.candidates) | set(second.candidates):
        dist = max(dist, _set_distance(first.candidates.get(j, []), second.candidates.get(j, [])))
    return dist
