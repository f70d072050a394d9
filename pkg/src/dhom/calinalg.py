"""Dense complex linear algebra used by the cascade.

Null spaces come from the SVD. The cascade-specific constructions (the
constant offset shared by every cascade plane and the E/F/G bases that
make the moving plane linear in the path parameter) live here too,
together with an Aberth-Ehrlich univariate root finder.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DegenerateRandomData",
    "OffPlaneError",
    "AffinePlane",
    "null_space_basis",
    "orthonormal_complement",
    "particular_solution_epsilon",
    "basis_EFG",
    "project_onto_plane",
    "embed",
    "univariate_roots",
    "random_complex",
    "random_unit",
]

RANK_TOL = 1e-10


class DegenerateRandomData(ArithmeticError):
    """A random draw hit a rank-deficient configuration; redraw and retry."""


class OffPlaneError(ValueError):
    def __init__(self, distance: float, tol: float):
        super().__init__(f"point is {distance:.3e} away from the plane (tolerance {tol:.1e})")
        self.distance = distance


def random_complex(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard complex Gaussian entries."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_unit(rng: np.random.Generator) -> complex:
    """Unit-modulus complex number exp(2*pi*i*theta)."""
    return complex(np.exp(2j * np.pi * rng.uniform()))


def null_space_basis(M, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis (as columns) of the right null space of ``M``.

    The numerical rank counts singular values above ``rank_tol`` times the
    largest one; a zero matrix yields the identity.
    """
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    n = M.shape[1]
    if M.size == 0 or not np.any(M):
        return np.eye(n, dtype=complex)
    _, s, vh = np.linalg.svd(M, full_matrices=True)
    rank = int(np.sum(s > rank_tol * s[0]))
    return vh[rank:].conj().T


def orthonormal_complement(sub, space, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal columns completing ``sub`` to a basis of span(``space``).

    Both arguments hold orthonormal columns and span(sub) must lie inside
    span(space).
    """
    resid = space - sub @ (sub.conj().T @ space) if sub.shape[1] else space
    u, s, _ = np.linalg.svd(resid, full_matrices=False)
    want = space.shape[1] - sub.shape[1]
    if want > 0 and (len(s) < want or s[want - 1] <= rank_tol * max(s[0], 1.0)):
        raise DegenerateRandomData("subspace complement is rank deficient")
    return u[:, :want]


def particular_solution_epsilon(C, d) -> tuple[np.ndarray, bool]:
    """Solve ``[I -I; C] eps = [0; -d]``.

    Returns ``(eps, degenerate)`` where ``degenerate`` flags the zero
    solution produced by ``d = 0``. Raises :class:`DegenerateRandomData`
    when the stacked matrix is numerically singular.
    """
    C = np.asarray(C, dtype=complex)
    d = np.asarray(d, dtype=complex).reshape(-1)
    k = C.shape[0]
    if C.shape != (k, 2 * k) or d.shape != (k,):
        raise ValueError(f"C must be k x 2k and d length k; got {C.shape}, {d.shape}")
    eye = np.eye(k)
    stacked = np.vstack([np.hstack([eye, -eye]), C])
    if np.linalg.cond(stacked) > 1e12:
        raise DegenerateRandomData("[I -I; C] is numerically singular")
    eps = np.linalg.solve(stacked, np.concatenate([np.zeros(k), -d]))
    return eps, not np.any(d)


def basis_EFG(Y_i, Y_j, C, j: int, i: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Bases with [E F] spanning Null Y_i, [E G] spanning Null Y_j.

    F and G are normalised so that rows ``j..i-1`` (0-based) of ``C F`` and
    of ``C G`` equal the identity. E is the common part of both null spaces.
    """
    Y_i = np.asarray(Y_i, dtype=complex)
    Y_j = np.asarray(Y_j, dtype=complex)
    C = np.asarray(C, dtype=complex)
    if not 0 <= j < i <= C.shape[0]:
        raise ValueError(f"need 0 <= j < i <= k, got j={j}, i={i}")
    rows = Y_i.shape[0]
    for Y in (Y_i, Y_j):
        s = np.linalg.svd(Y, compute_uv=False)
        if s[-1] <= RANK_TOL * s[0] or len(s) < rows:
            raise DegenerateRandomData("Y_h is not of full row rank")
    width = i - j
    E = null_space_basis(np.vstack([Y_i, Y_j]))
    null_i = null_space_basis(Y_i)
    null_j = null_space_basis(Y_j)
    if E.shape[1] != null_i.shape[1] - width:
        raise DegenerateRandomData(
            f"common null space has dimension {E.shape[1]}, expected {null_i.shape[1] - width}"
        )
    blocks = []
    for null in (null_i, null_j):
        hat = orthonormal_complement(E, null)
        Q = (C @ hat)[j:i]
        if np.linalg.cond(Q) > 1e10:
            raise DegenerateRandomData("normalising block Q is singular")
        blocks.append(np.linalg.solve(Q.T, hat.T).T)  # hat @ inv(Q)
    return E, blocks[0], blocks[1]


@dataclass(frozen=True)
class AffinePlane:
    """The affine subspace ``offset + basis @ y``."""

    offset: np.ndarray
    basis: np.ndarray

    def __post_init__(self):
        off = np.asarray(self.offset, dtype=complex).reshape(-1)
        bas = np.asarray(self.basis, dtype=complex)
        if bas.ndim != 2 or bas.shape[0] != off.shape[0]:
            raise ValueError("basis rows must match the offset length")
        if bas.shape[1]:
            sv = np.linalg.svd(bas, compute_uv=False)
            if bas.shape[1] > bas.shape[0] or sv[-1] <= RANK_TOL * sv[0]:
                raise ValueError("plane basis columns are not linearly independent")
        object.__setattr__(self, "offset", off)
        object.__setattr__(self, "basis", bas)

    @property
    def ambient_dim(self) -> int:
        return self.offset.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def embed(self, y) -> np.ndarray:
        return embed(self, y)

    def project(self, point, tol: float = 1e-8) -> np.ndarray:
        return project_onto_plane(self, point, tol)


def embed(plane: AffinePlane, y) -> np.ndarray:
    y = np.asarray(y, dtype=complex).reshape(-1)
    if y.shape[0] != plane.dim:
        raise ValueError(f"y has length {y.shape[0]}, plane has dimension {plane.dim}")
    return plane.offset + plane.basis @ y


def project_onto_plane(plane: AffinePlane, point, tol: float = 1e-8) -> np.ndarray:
    """Intrinsic coordinates of a point lying on ``plane``.

    Raises :class:`OffPlaneError` if the least-squares residual exceeds
    ``tol * (1 + |point|)``.
    """
    p = np.asarray(point, dtype=complex).reshape(-1)
    if p.shape[0] != plane.ambient_dim:
        raise ValueError("point length does not match the plane's ambient dimension")
    y, *_ = np.linalg.lstsq(plane.basis, p - plane.offset, rcond=None)
    dist = float(np.linalg.norm(plane.embed(y) - p))
    if dist > tol * (1 + np.linalg.norm(p)):
        raise OffPlaneError(dist, tol)
    return y


def univariate_roots(coeffs, max_iter: int = 200, tol: float = 1e-12) -> np.ndarray:
    """All roots of ``sum(coeffs[q] * z**(d-q))`` (highest degree first).

    Aberth-Ehrlich simultaneous iteration started on a slightly rotated
    circle of Cauchy-bound radius; each root is polished with Newton steps.
    """
    c = np.asarray(coeffs, dtype=complex).reshape(-1)
    scale = np.max(np.abs(c)) if c.size else 0.0
    if scale == 0:
        raise ValueError("zero polynomial has no well-defined roots")
    lead = 0
    while abs(c[lead]) <= 1e-12 * scale:
        lead += 1
    if lead:
        warnings.warn(
            f"leading coefficient underflow: degree reduced by {lead}", RuntimeWarning, stacklevel=2
        )
        c = c[lead:]
    d = len(c) - 1
    if d == 0:
        return np.zeros(0, dtype=complex)
    c = c / c[0]
    if d == 1:
        return np.array([-c[1]])
    radius = 1.0 + np.max(np.abs(c[1:]))
    angles = 2 * np.pi * np.arange(d) / d + 0.4
    z = radius * np.exp(1j * angles)
    dc = c[:-1] * np.arange(d, 0, -1)
    for _ in range(max_iter):
        p = np.polyval(c, z)
        dp = np.polyval(dc, z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        recip = 1.0 / diff
        np.fill_diagonal(recip, 0.0)
        ratio = np.divide(p, dp, out=np.zeros_like(p), where=dp != 0)
        denom = 1.0 - ratio * recip.sum(axis=1)
        step = np.divide(ratio, denom, out=np.zeros_like(ratio), where=denom != 0)
        z = z - step
        if np.all(np.abs(step) <= tol * np.maximum(1.0, np.abs(z))):
            break
    for _ in range(3):
        p = np.polyval(c, z)
        dp = np.polyval(dc, z)
        trial = z - np.divide(p, dp, out=np.zeros_like(p), where=dp != 0)
        better = np.abs(np.polyval(c, trial)) < np.abs(p)
        z = np.where(better, trial, z)
    return z
