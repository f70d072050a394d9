"""Affine planes in C^{2k} traversed by the intrinsic homotopies."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..calinalg import AffinePlane, DegenerateRandomData, basis_EFG, null_space_basis
from ..witness import SliceSystem
from .problem import RandomData, Y_h

__all__ = [
    "start_plane",
    "level_plane",
    "CascadePlane",
    "cascade_plane",
    "transform",
    "tau_of_t",
    "sigma_of_t",
]


def tau_of_t(t: float, gamma: complex) -> complex:
    """``t / (t + gamma (1 - t))``: 1 at t = 1, 0 at t = 0."""
    return t / (t + gamma * (1 - t))


def dtau_dt(t: float, gamma: complex) -> complex:
    return gamma / (t + gamma * (1 - t)) ** 2


def sigma_of_t(t: float, gamma: complex) -> complex:
    """Weight of the start plane in the start homotopy (1 at t = 1, 0 at t = 0)."""
    return gamma * t / (gamma * t + (1 - t))


def dsigma_dt(t: float, gamma: complex) -> complex:
    return gamma / (gamma * t + (1 - t)) ** 2


def start_plane(L_A: SliceSystem, L_B: SliceSystem) -> AffinePlane:
    """The plane ``{(u, v) : L_A(u) = 0, L_B(v) = 0}`` with an orthonormal basis."""
    k = L_A.coeff.shape[1]
    if L_B.coeff.shape[1] != k:
        raise ValueError("slices live in different spaces")
    coeff = np.zeros((L_A.rows + L_B.rows, 2 * k), dtype=complex)
    coeff[: L_A.rows, :k] = L_A.coeff
    coeff[L_A.rows :, k:] = L_B.coeff
    offset = np.concatenate([L_A.offset, L_B.offset])
    basis = null_space_basis(coeff)
    if basis.shape[1] != 2 * k - coeff.shape[0]:
        raise DegenerateRandomData("witness slices are rank deficient")
    w1, *_ = np.linalg.lstsq(coeff, -offset, rcond=None)
    return AffinePlane(w1, basis)


def level_plane(rd: RandomData, h: int) -> AffinePlane:
    """``epsilon + Null Y_h``, the solution set of the level-h linear equations."""
    return AffinePlane(rd.epsilon, null_space_basis(Y_h(rd, h)))


@dataclass(frozen=True, eq=False)
class CascadePlane:
    """``epsilon + [E | t F + gamma (1 - t) G] y`` deforming Null Y_i into Null Y_j."""

    i: int
    j: int
    E: np.ndarray
    F: np.ndarray
    G: np.ndarray
    epsilon: np.ndarray
    gamma: complex

    @property
    def dim(self) -> int:
        return self.E.shape[1] + self.F.shape[1]

    def basis_at(self, t: float) -> np.ndarray:
        return np.hstack([self.E, t * self.F + self.gamma * (1 - t) * self.G])

    def plane_at(self, t: float) -> AffinePlane:
        return AffinePlane(self.epsilon, self.basis_at(t))

    def embed(self, y, t: float) -> np.ndarray:
        return self.epsilon + self.basis_at(t) @ y


def cascade_plane(rd: RandomData, i: int, j: int) -> CascadePlane:
    E, F, G = basis_EFG(Y_h(rd, i), Y_h(rd, j), rd.C, j, i)
    return CascadePlane(i, j, E, F, G, rd.epsilon, rd.gamma_cascade)


def transform(points_y, old: AffinePlane, new: AffinePlane, tol: float = 1e-8) -> list[np.ndarray]:
    """Re-express intrinsic coordinates on ``old`` in the basis of ``new``."""
    return [new.project(old.embed(y), tol) for y in points_y]
