"""Predictor-corrector path tracking for square homotopies H(y, t) = 0.

Paths run from t = 1 down to t = 0 on the real interval. Any complex
reparameterisation (the gamma trick) belongs to the homotopy itself.
"""

from __future__ import annotations

import enum
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Protocol, Sequence

import numpy as np

__all__ = [
    "Homotopy",
    "TrackSettings",
    "PathStatus",
    "PathResult",
    "track_path",
    "track_all",
    "newton_refine",
]

log = logging.getLogger(__name__)


class Homotopy(Protocol):
    """A square homotopy. Implementations must be immutable once built."""

    def evaluate(self, y: np.ndarray, t: float) -> np.ndarray: ...

    def jac_y(self, y: np.ndarray, t: float) -> np.ndarray: ...

    def dt(self, y: np.ndarray, t: float) -> np.ndarray: ...

    def eval_jac(self, y: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray]: ...

    def jac_dt(self, y: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray]: ...


@dataclass(frozen=True)
class TrackSettings:
    newton_tol: float = 1e-9
    refine_tol: float = 1e-11
    min_step: float = 1e-8
    max_step: float = 0.1
    initial_step: float = 0.05
    max_newton_iters: int = 3
    divergence_norm: float = 1e8
    max_steps: int = 10000
    refine_iters: int = 20

    def __post_init__(self):
        if not 0 < self.min_step <= self.initial_step <= self.max_step < 1:
            raise ValueError("need 0 < min_step <= initial_step <= max_step < 1")


class PathStatus(str, enum.Enum):
    CONVERGED = "Converged"
    DIVERGED = "Diverged"
    STEP_COLLAPSE = "StepSizeCollapse"
    MAX_STEPS = "MaxSteps"


@dataclass
class PathResult:
    status: PathStatus
    endpoint: np.ndarray
    residual: float
    steps_taken: int
    start_index: int = 0
    t_final: float = 0.0
    rejected_steps: int = 0

    @property
    def converged(self) -> bool:
        return self.status is PathStatus.CONVERGED


def _solve(J: np.ndarray, rhs: np.ndarray) -> np.ndarray | None:
    try:
        out = np.linalg.solve(J, rhs)
    except np.linalg.LinAlgError:
        return None
    return out if np.all(np.isfinite(out)) else None


def newton_refine(
    F: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]],
    y,
    tol: float = 1e-11,
    max_iters: int = 20,
) -> tuple[np.ndarray, float, bool]:
    """Newton's method on a square system ``F(y) -> (value, jacobian)``.

    Stops once the residual is below ``tol * (1 + |y|)`` or the update
    stagnates at rounding level. Returns ``(y, residual, converged)``;
    a singular Jacobian returns the current iterate with ``converged``
    false.
    """
    y = np.array(y, dtype=complex)
    val, J = F(y)
    res = float(np.linalg.norm(val))
    for _ in range(max_iters):
        if res <= tol * (1 + np.linalg.norm(y)):
            return y, res, True
        delta = _solve(J, -val)
        if delta is None:
            return y, res, False
        y_new = y + delta
        val_new, J_new = F(y_new)
        res_new = float(np.linalg.norm(val_new))
        if not np.isfinite(res_new):
            return y, res, False
        y, val, J, res = y_new, val_new, J_new, res_new
        if np.linalg.norm(delta) <= 1e-15 * (1 + np.linalg.norm(y)):
            break
    return y, res, res <= tol * (1 + np.linalg.norm(y))


def _correct(H: Homotopy, y: np.ndarray, t: float, s: TrackSettings) -> np.ndarray | None:
    prev = np.inf
    for _ in range(s.max_newton_iters):
        val, J = H.eval_jac(y, t)
        delta = _solve(J, -val)
        if delta is None:
            return None
        size = np.linalg.norm(delta)
        # A corrector that is not contracting has left the basin of this path.
        if size > 0.5 * prev and size > s.newton_tol * (1 + np.linalg.norm(y)):
            return None
        y = y + delta
        if size <= s.newton_tol * (1 + np.linalg.norm(y)):
            return y
        prev = size
    return None


def track_path(
    H: Homotopy, y_start, settings: TrackSettings | None = None, start_index: int = 0
) -> PathResult:
    """Follow one solution path of ``H`` from t = 1 to t = 0.

    Euler predictor along the tangent ``dy/dt = -J^{-1} dH/dt``, up to
    ``max_newton_iters`` Newton corrections per step. The step halves on
    corrector failure and grows by 1.5 after five consecutive successes.
    The endpoint is polished with full Newton at t = 0.
    """
    s = settings or TrackSettings()
    y = np.array(y_start, dtype=complex)
    t = 1.0
    val = H.evaluate(y, t)
    if np.linalg.norm(val) > s.newton_tol * (1 + np.linalg.norm(y)):
        y, res, ok = newton_refine(lambda v: H.eval_jac(v, 1.0), y, s.newton_tol, 5)
        if not ok:
            log.debug("start point %d fails the t=1 residual check (%.2e)", start_index, res)
    h = s.initial_step
    streak = 0
    steps = rejected = 0
    while t > 0:
        if steps + rejected >= s.max_steps:
            return PathResult(PathStatus.MAX_STEPS, y, np.inf, steps, start_index, t, rejected)
        h = min(h, t)
        t_new = 0.0 if t - h < 1e-14 else t - h
        J, Ht = H.jac_dt(y, t)
        tangent = _solve(J, -Ht)
        y_new = None
        if tangent is not None:
            y_new = _correct(H, y + tangent * (t_new - t), t_new, s)
        if y_new is None:
            rejected += 1
            streak = 0
            h *= 0.5
            if h < s.min_step:
                status = PathStatus.STEP_COLLAPSE
                if np.linalg.norm(y) > np.sqrt(s.divergence_norm):
                    # Too close to a path at infinity to reach the norm threshold.
                    status = PathStatus.DIVERGED
                return PathResult(status, y, np.inf, steps, start_index, t, rejected)
            continue
        y, t = y_new, t_new
        steps += 1
        if np.linalg.norm(y) > s.divergence_norm:
            return PathResult(PathStatus.DIVERGED, y, np.inf, steps, start_index, t, rejected)
        streak += 1
        if streak >= 5:
            h = min(1.5 * h, s.max_step)
            streak = 0
    y, res, ok = newton_refine(lambda v: H.eval_jac(v, 0.0), y, s.refine_tol, s.refine_iters)
    status = PathStatus.CONVERGED if ok else PathStatus.STEP_COLLAPSE
    return PathResult(status, y, res, steps, start_index, 0.0, rejected)


def track_all(
    H: Homotopy,
    starts: Sequence,
    settings: TrackSettings | None = None,
    threads: int = 1,
) -> list[PathResult]:
    """Track every start point; results keep the order of ``starts``."""
    if threads <= 1 or len(starts) <= 1:
        return [track_path(H, y, settings, idx) for idx, y in enumerate(starts)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(track_path, H, y, settings, idx) for idx, y in enumerate(starts)]
        return [f.result() for f in futures]
