"""Witness sets: generation for hypersurfaces and linear components, file I/O."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .calinalg import null_space_basis, univariate_roots
from .polysys import PolySystem, format_system, linear_part, parse_system
from .tracker import newton_refine

__all__ = [
    "SliceSystem",
    "WitnessSet",
    "WitnessError",
    "random_slice",
    "witness_hypersurface",
    "witness_linear",
    "read_witness",
    "write_witness",
    "witness_to_dict",
    "witness_from_dict",
]

BUILD_TOL = 1e-8
LOAD_TOL = 1e-6


class WitnessError(ValueError):
    pass


@dataclass(frozen=True)
class SliceSystem:
    """Linear equations ``coeff @ x + offset = 0``."""

    coeff: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        coeff = np.asarray(self.coeff, dtype=complex)
        if coeff.ndim != 2:
            coeff = coeff.reshape(len(self.offset), -1)
        object.__setattr__(self, "coeff", coeff)
        object.__setattr__(self, "offset", np.asarray(self.offset, dtype=complex).reshape(-1))

    @property
    def rows(self) -> int:
        return self.coeff.shape[0]

    def __call__(self, x) -> np.ndarray:
        return self.coeff @ np.asarray(x, dtype=complex) + self.offset


def random_slice(rng: np.random.Generator, rows: int, k: int) -> SliceSystem:
    """Generic slice with orthonormal coefficient rows."""
    if rows == 0:
        return SliceSystem(np.zeros((0, k), dtype=complex), np.zeros(0, dtype=complex))
    raw = rng.uniform(-1, 1, (rows, k)) + 1j * rng.uniform(-1, 1, (rows, k))
    q, _ = np.linalg.qr(raw.conj().T)
    offset = rng.uniform(-1, 1, rows) + 1j * rng.uniform(-1, 1, rows)
    return SliceSystem(q.conj().T, offset)


@dataclass(frozen=True, eq=False)
class WitnessSet:
    """Degree-many points where a generic ``dim``-codimensional slice meets a component."""

    system: PolySystem
    dim: int
    slice: SliceSystem
    points: tuple
    degree: int | None = None

    def __post_init__(self):
        pts = tuple(np.asarray(p, dtype=complex).reshape(-1) for p in self.points)
        object.__setattr__(self, "points", pts)
        if self.degree is None:
            object.__setattr__(self, "degree", len(pts))
        k = self.system.num_vars
        if not 0 <= self.dim <= k:
            raise WitnessError(f"dimension {self.dim} outside [0, {k}]")
        if self.slice.rows != self.dim:
            raise WitnessError(f"slice has {self.slice.rows} equations, dimension is {self.dim}")
        if self.slice.coeff.shape[1] != k:
            raise WitnessError("slice width does not match the ambient dimension")
        if self.degree != len(pts):
            raise WitnessError(f"degree {self.degree} but {len(pts)} points")
        if any(p.shape[0] != k for p in pts):
            raise WitnessError("point length does not match the ambient dimension")

    @property
    def ambient_dim(self) -> int:
        return self.system.num_vars

    def residuals(self) -> list[float]:
        return [
            float(max(np.max(np.abs(self.system.evaluate(p)), initial=0.0),
                      np.max(np.abs(self.slice(p)), initial=0.0)))
            for p in self.points
        ]

    def validate(self, tol: float = BUILD_TOL) -> None:
        for idx, r in enumerate(self.residuals()):
            if not r <= tol:
                raise WitnessError(f"point {idx} has residual {r:.3e} > {tol:.1e}")


def _refine_point(system: PolySystem, lin: SliceSystem, x: np.ndarray) -> np.ndarray:
    # Square only when system + slice has k equations; otherwise Gauss-Newton.
    def F(v):
        val, J = system.evaluate_and_jacobian(v)
        return np.concatenate([val, lin(v)]), np.vstack([J, lin.coeff])

    def step(v):
        val, J = F(v)
        if J.shape[0] == J.shape[1]:
            return val, J
        return J.conj().T @ val, J.conj().T @ J

    x, _, _ = newton_refine(step, x, tol=1e-15, max_iters=6)
    return x


def witness_hypersurface(
    f: PolySystem,
    seed: int | np.random.Generator = 0,
    restrict_to: PolySystem | None = None,
    attempts: int = 5,
) -> WitnessSet:
    """Witness set of the hypersurface ``f = 0``.

    With ``restrict_to`` (affine-linear equations) the component is the
    hypersurface section of that linear space, e.g. a circle as
    ``x^2 + y^2 - 1`` within ``z = 0``. The slice and restriction cut out
    a generic line along which ``f`` becomes univariate; its roots are the
    witness points.
    """
    if f.num_polys != 1:
        raise WitnessError("a hypersurface is defined by exactly one polynomial")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    k = f.num_vars
    deg = f.polynomials[0].degree
    if deg < 1:
        raise WitnessError("polynomial is constant")
    if restrict_to is not None:
        R, r = linear_part(restrict_to)
        system = PolySystem(f.variable_names, f.polynomials + restrict_to.polynomials)
    else:
        R, r = np.zeros((0, k), dtype=complex), np.zeros(0, dtype=complex)
        system = f
    dim = k - 1 - R.shape[0]
    if dim < 0:
        raise WitnessError("restriction leaves no room for a hypersurface section")
    nodes = np.exp(2j * np.pi * np.arange(deg + 1) / (deg + 1))
    vander = np.vander(nodes, deg + 1)
    for _ in range(attempts):
        sl = random_slice(rng, dim, k)
        lin_coeff = np.vstack([sl.coeff, R])
        lin_off = np.concatenate([sl.offset, r])
        direction = null_space_basis(lin_coeff)
        if direction.shape[1] != 1:
            raise WitnessError("restricting equations are rank deficient")
        base, *_ = np.linalg.lstsq(lin_coeff, -lin_off, rcond=None)
        v = direction[:, 0]
        samples = np.array([f.evaluate(base + s * v)[0] for s in nodes])
        coeffs = np.linalg.solve(vander, samples)
        if abs(coeffs[0]) <= 1e-8 * np.max(np.abs(coeffs)):
            continue
        roots = univariate_roots(coeffs)
        full = SliceSystem(lin_coeff, lin_off)
        pts = [_refine_point(f, full, base + s * v) for s in roots]
        ws = WitnessSet(system, dim, sl, tuple(pts))
        try:
            ws.validate(BUILD_TOL)
        except WitnessError:
            continue
        return ws
    raise WitnessError(f"no generic line found in {attempts} attempts")


def witness_linear(
    component_eqs: PolySystem, full_system: PolySystem, seed: int | np.random.Generator = 0
) -> WitnessSet:
    """Witness set (degree 1) of the linear space cut out by ``component_eqs``.

    The point solves the component equations plus a generic slice of
    complementary size.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    R, r = linear_part(component_eqs)
    c, k = R.shape
    if full_system.num_vars != k:
        raise WitnessError("component and system live in different spaces")
    if c == 0 or c > k or np.linalg.matrix_rank(R) != c:
        raise WitnessError(f"component equations must have full rank 1..{k}")
    dim = k - c
    sl = random_slice(rng, dim, k)
    A = np.vstack([R, sl.coeff])
    if np.linalg.cond(A) > 1e12:
        raise WitnessError("linear system for the witness point is singular")
    x = np.linalg.solve(A, -np.concatenate([r, sl.offset]))
    res = np.max(np.abs(full_system.evaluate(x)), initial=0.0)
    if res > 1e-10:
        raise WitnessError(f"linear component does not solve the system (residual {res:.2e})")
    return WitnessSet(full_system, dim, sl, (x,))


# --------------------------------------------------------------------------
# persistence

FORMAT = "dhom-witness/1"


def _c(z) -> list[float]:
    return [float(f"{z.real:.17g}"), float(f"{z.imag:.17g}")]


def _vec(v) -> list:
    return [_c(z) for z in v]


def _unvec(rows) -> np.ndarray:
    return np.array([complex(re, im) for re, im in rows], dtype=complex)


def witness_to_dict(ws: WitnessSet) -> dict:
    return {
        "format": FORMAT,
        "ambient_dim": ws.ambient_dim,
        "dim": ws.dim,
        "degree": ws.degree,
        "system": format_system(ws.system),
        "slice": {"coeff": [_vec(row) for row in ws.slice.coeff], "offset": _vec(ws.slice.offset)},
        "points": [_vec(p) for p in ws.points],
    }


def witness_from_dict(data: dict, tol: float = LOAD_TOL) -> WitnessSet:
    required = ("ambient_dim", "dim", "degree", "system", "slice", "points")
    missing = [key for key in required if key not in data]
    if missing:
        raise WitnessError(f"witness file lacks fields: {', '.join(missing)}")
    try:
        system = parse_system(data["system"])
        k = int(data["ambient_dim"])
        coeff = np.array([_unvec(row) for row in data["slice"]["coeff"]], dtype=complex)
        sl = SliceSystem(coeff.reshape(-1, k), _unvec(data["slice"]["offset"]))
        pts = tuple(_unvec(p) for p in data["points"])
    except (KeyError, TypeError, ValueError) as exc:
        raise WitnessError(f"malformed witness file: {exc}") from exc
    if system.num_vars != k:
        raise WitnessError(f"ambient_dim {k} but the system has {system.num_vars} variables")
    ws = WitnessSet(system, int(data["dim"]), sl, pts, int(data["degree"]))
    ws.validate(tol)
    return ws


def write_witness(ws: WitnessSet, path) -> None:
    Path(path).write_text(json.dumps(witness_to_dict(ws), indent=1) + "\n", encoding="utf-8")


def read_witness(path, tol: float = LOAD_TOL) -> WitnessSet:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise WitnessError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise WitnessError(f"{path}: expected a JSON object")
    return witness_from_dict(data, tol)
