"""Problem description and the generic constants shared by both cascades."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..calinalg import DegenerateRandomData, particular_solution_epsilon, random_complex, random_unit
from ..polysys import PolySystem, combine
from ..witness import WitnessSet

__all__ = ["DiagonalProblem", "RandomData", "initialize", "Y_h", "P_h", "stacked_system"]


@dataclass(frozen=True, eq=False)
class DiagonalProblem:
    """Intersect component A (dimension a) with B (dimension b <= a) in C^k.

    ``hmax`` bounds the intersection dimension from above (exclusive) and
    ``h0`` from below; the defaults ``b`` and ``max(a + b - k, 0)`` are the
    safe choices when nothing else is known.
    """

    wA: WitnessSet
    wB: WitnessSet
    hmax: int | None = None
    h0: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.wA.ambient_dim != self.wB.ambient_dim:
            raise ValueError("witness sets live in different ambient spaces")
        if self.a < self.b:
            raise ValueError("need dim(A) >= dim(B); use DiagonalProblem.ordered")
        lo = max(self.a + self.b - self.k, 0)
        if self.hmax is None:
            object.__setattr__(self, "hmax", self.b)
        if self.h0 is None:
            object.__setattr__(self, "h0", lo)
        if not self.b >= self.hmax > -1:
            raise ValueError(f"hmax={self.hmax} must satisfy b={self.b} >= hmax >= 0")
        if self.h0 < lo:
            raise ValueError(f"h0={self.h0} is below the lower bound {lo}")
        if self.h0 > self.hmax:
            raise ValueError(f"h0={self.h0} exceeds hmax={self.hmax}")

    @classmethod
    def ordered(cls, w1: WitnessSet, w2: WitnessSet, **kw) -> "DiagonalProblem":
        """Build a problem, swapping the inputs so that dim(A) >= dim(B)."""
        if w1.dim < w2.dim:
            w1, w2 = w2, w1
        return cls(w1, w2, **kw)

    @property
    def k(self) -> int:
        return self.wA.ambient_dim

    @property
    def a(self) -> int:
        return self.wA.dim

    @property
    def b(self) -> int:
        return self.wB.dim

    @property
    def m(self) -> int:
        return 2 * self.k - self.a - self.b

    @property
    def f_A(self) -> PolySystem:
        return self.wA.system

    @property
    def f_B(self) -> PolySystem:
        return self.wB.system


@dataclass(frozen=True, eq=False)
class RandomData:
    M: np.ndarray
    N: np.ndarray
    Abb: np.ndarray
    B: np.ndarray
    C: np.ndarray
    d: np.ndarray
    epsilon: np.ndarray
    gamma_start: complex
    gamma_cascade: complex
    sF: PolySystem = field(repr=False)

    @property
    def k(self) -> int:
        return self.C.shape[0]

    @property
    def A(self) -> np.ndarray:
        return np.hstack([self.Abb, -self.Abb])

    def with_fresh_gammas(self, rng: np.random.Generator) -> "RandomData":
        return replace(self, gamma_start=random_unit(rng), gamma_cascade=random_unit(rng))

    def slack(self, w) -> np.ndarray:
        """``C w + d``; its first h entries are the level-h slack values."""
        return self.C @ w + self.d


def P_h(k: int, h: int) -> np.ndarray:
    return np.diag([1.0] * h + [0.0] * (k - h))


def Y_h(rd: RandomData, h: int) -> np.ndarray:
    """Matrix of the homogeneous level-h system ``(A + B P_h C) w = 0``."""
    if not 0 <= h <= rd.k:
        raise ValueError(f"level {h} outside [0, {rd.k}]")
    return rd.A + rd.B[:, :h] @ rd.C[:h]


def _check_levels(rd: RandomData, levels) -> None:
    n = rd.Abb.shape[0]
    for h in levels:
        s = np.linalg.svd(Y_h(rd, h), compute_uv=False)
        if len(s) < n or s[-1] <= 1e-8 * s[0]:
            raise DegenerateRandomData(f"Y_{h} is rank deficient")


def initialize(problem: DiagonalProblem, rng: np.random.Generator, attempts: int = 5) -> RandomData:
    """Draw all generic constants of a run and the shared offset epsilon."""
    k, a, b = problem.k, problem.a, problem.b
    for _ in range(attempts):
        M = random_complex(rng, (k - a, problem.f_A.num_polys))
        N = random_complex(rng, (k - b, problem.f_B.num_polys))
        Abb = random_complex(rng, (a + b, k))
        B = random_complex(rng, (a + b, k))
        C = random_complex(rng, (k, 2 * k))
        d = random_complex(rng, k)
        g1, g2 = random_unit(rng), random_unit(rng)
        try:
            eps, zero = particular_solution_epsilon(C, d)
            if zero:
                continue
            rd = RandomData(M, N, Abb, B, C, d, eps, g1, g2, combine(problem.f_A, problem.f_B, M, N))
            _check_levels(rd, range(problem.h0, problem.hmax + 1))
        except DegenerateRandomData:
            continue
        if np.linalg.norm(rd.A @ eps) > 1e-10 * (1 + np.linalg.norm(eps)):
            continue
        return rd
    raise DegenerateRandomData(f"no generic draw in {attempts} attempts")


def stacked_system(problem: DiagonalProblem) -> PolySystem:
    """``[f_A; f_B]`` on C^k, the equations every point of A ∩ B satisfies."""
    return PolySystem(problem.f_A.variable_names, problem.f_A.polynomials + problem.f_B.polynomials)
