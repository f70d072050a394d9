"""Homotopy membership test and the junk filter built on it.

To decide whether ``p`` lies on the component represented by a witness
set, the witness slice is moved to a random slice through ``p``; the
witness points then travel along the component and ``p`` is a member
exactly when one of them lands on it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .calinalg import random_complex, random_unit
from .polysys import PolySystem, combine_rows
from .tracker import PathStatus, TrackSettings, newton_refine, track_all
from .witness import SliceSystem, WitnessError, WitnessSet, random_slice

__all__ = [
    "MembershipQuery",
    "InconclusiveMembership",
    "membership_distance",
    "member",
    "filter_candidates",
    "FilterResult",
]

REJECT_RESIDUAL = 1e-4


class InconclusiveMembership(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class MembershipQuery:
    target_set: WitnessSet
    point: np.ndarray
    tol: float = 1e-6

    def __post_init__(self):
        p = np.asarray(self.point, dtype=complex).reshape(-1)
        if not np.all(np.isfinite(p)):
            raise ValueError("query point must be finite")
        if not 0 < self.tol < 1e-2:
            raise ValueError("tolerance must lie in (0, 1e-2)")
        if p.shape[0] != self.target_set.ambient_dim:
            raise ValueError("query point has the wrong length")
        object.__setattr__(self, "point", p)


class _SliceHomotopy:
    """``[f(x); gamma t L_old(x) + (1 - t) L_new(x)]``."""

    def __init__(self, f: PolySystem, old: SliceSystem, new: SliceSystem, gamma: complex):
        self.f, self.old, self.new, self.gamma = f, old, new, gamma

    def _lin(self, t):
        g = self.gamma * t
        return g * self.old.coeff + (1 - t) * self.new.coeff, g * self.old.offset + (1 - t) * self.new.offset

    def evaluate(self, x, t):
        R, r = self._lin(t)
        return np.concatenate([self.f.evaluate(x), R @ x + r])

    def eval_jac(self, x, t):
        R, r = self._lin(t)
        val, J = self.f.evaluate_and_jacobian(x)
        return np.concatenate([val, R @ x + r]), np.vstack([J, R])

    def jac_y(self, x, t):
        return self.eval_jac(x, t)[1]

    def dt(self, x, t):
        lin = self.gamma * self.old(x) - self.new(x)
        return np.concatenate([np.zeros(self.f.num_polys, dtype=complex), lin])

    def jac_dt(self, x, t):
        return self.jac_y(x, t), self.dt(x, t)


def _square_system(ws: WitnessSet, rng: np.random.Generator) -> PolySystem:
    # A dim-d component of C^k needs exactly k - d equations for a square homotopy.
    need = ws.ambient_dim - ws.dim
    sys = ws.system
    if sys.num_polys < need:
        raise WitnessError(f"system has {sys.num_polys} equations, need at least {need}")
    if sys.num_polys == need:
        return sys
    return combine_rows(sys, random_complex(rng, (need, sys.num_polys)))


def membership_distance(
    query: MembershipQuery,
    seed: int | np.random.Generator = 0,
    settings: TrackSettings | None = None,
) -> float:
    """Distance from the query point to the nearest moved witness point.

    Returns ``inf`` when the point fails the residual shortcut.
    """
    ws, p = query.target_set, query.point
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if np.max(np.abs(ws.system.evaluate(p)), initial=0.0) > REJECT_RESIDUAL * (1 + np.linalg.norm(p)):
        return np.inf
    if ws.dim == 0:
        return min((float(np.linalg.norm(x - p)) for x in ws.points), default=np.inf)
    f = _square_system(ws, rng)
    for _ in range(2):
        through = random_slice(rng, ws.dim, ws.ambient_dim)
        new = SliceSystem(through.coeff, -through.coeff @ p)
        H = _SliceHomotopy(f, ws.slice, new, random_unit(rng))
        results = track_all(H, list(ws.points), settings)
        if all(r.status is PathStatus.CONVERGED for r in results):
            ends = [newton_refine(lambda x: H.eval_jac(x, 0.0), r.endpoint, 1e-13, 5)[0] for r in results]
            return min(float(np.linalg.norm(x - p)) for x in ends)
    raise InconclusiveMembership("slice homotopy paths failed twice")


def member(
    query: MembershipQuery,
    seed: int | np.random.Generator = 0,
    settings: TrackSettings | None = None,
) -> bool:
    return membership_distance(query, seed, settings) <= query.tol


@dataclass
class FilterResult:
    kept: list = field(default_factory=list)
    junk: list = field(default_factory=list)
    suspect: list = field(default_factory=list)  # indices into kept


def filter_candidates(
    candidates,
    higher: dict[int, WitnessSet] | list[WitnessSet],
    tol: float = 1e-6,
    seed: int = 0,
    settings: TrackSettings | None = None,
) -> FilterResult:
    """Drop candidates that lie on a higher-dimensional witness set.

    Each query gets its own generator derived from ``seed`` and its index.
    A candidate whose test is inconclusive is kept and reported as suspect.
    """
    sets = list(higher.values()) if isinstance(higher, dict) else list(higher)
    sets = [ws for ws in sets if ws.degree > 0]
    out = FilterResult()
    for idx, x in enumerate(candidates):
        x = np.asarray(x, dtype=complex)
        on_higher = False
        inconclusive = False
        for sidx, ws in enumerate(sets):
            rng = np.random.default_rng([seed, idx, sidx])
            try:
                if member(MembershipQuery(ws, x, tol), rng, settings):
                    on_higher = True
                    break
            except InconclusiveMembership:
                inconclusive = True
        if on_higher:
            out.junk.append(x)
        else:
            if inconclusive:
                out.suspect.append(len(out.kept))
            out.kept.append(x)
    return out
