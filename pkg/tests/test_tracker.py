import numpy as np
import pytest

from conftest import polydisk, random_system
from dhom.tracker import (
    PathStatus,
    TrackSettings,
    newton_refine,
    track_all,
    track_path,
)


class Poly:
    """``H(y, t) = f(y) (1 - t) + gamma t g(y)`` for square systems f, g."""

    def __init__(self, f, g, gamma=1.0):
        self.f, self.g, self.gamma = f, g, gamma

    def evaluate(self, y, t):
        return (1 - t) * self.f.evaluate(y) + self.gamma * t * self.g.evaluate(y)

    def eval_jac(self, y, t):
        fv, fJ = self.f.evaluate_and_jacobian(y)
        gv, gJ = self.g.evaluate_and_jacobian(y)
        return (1 - t) * fv + self.gamma * t * gv, (1 - t) * fJ + self.gamma * t * gJ

    def jac_y(self, y, t):
        return self.eval_jac(y, t)[1]

    def dt(self, y, t):
        return self.gamma * self.g.evaluate(y) - self.f.evaluate(y)

    def jac_dt(self, y, t):
        return self.jac_y(y, t), self.dt(y, t)


class Scalar:
    def __init__(self, h, hy, ht):
        self.h, self.hy, self.ht = h, hy, ht

    def evaluate(self, y, t):
        return np.array([self.h(y[0], t)])

    def jac_y(self, y, t):
        return np.array([[self.hy(y[0], t)]])

    def dt(self, y, t):
        return np.array([self.ht(y[0], t)])

    def eval_jac(self, y, t):
        return self.evaluate(y, t), self.jac_y(y, t)

    def jac_dt(self, y, t):
        return self.jac_y(y, t), self.dt(y, t)


def total_degree_pair(rng, n, deg):
    """Target f: random dense system; start g: x_i^d - 1 with known roots."""
    from dhom.polysys import parse_system

    names = [f"x{i}" for i in range(n)]
    g = parse_system("\n".join(f"x{i}^{deg} - 1;" for i in range(n)), names)
    f = random_system(rng, n, n, max_deg=deg, n_terms=8)
    roots = np.exp(2j * np.pi * np.arange(deg) / deg)
    starts = np.array(np.meshgrid(*[roots] * n)).reshape(n, -1).T
    return f, g, starts


def test_settings_validation():
    with pytest.raises(ValueError):
        TrackSettings(min_step=0.2, initial_step=0.1)
    with pytest.raises(ValueError):
        TrackSettings(max_step=1.0)


def test_linear_path():
    H = Scalar(lambda y, t: y - (1 - t), lambda y, t: 1, lambda y, t: 1)
    r = track_path(H, [0.0])
    assert r.status is PathStatus.CONVERGED
    assert abs(r.endpoint[0] - 1) <= 1e-12


def test_square_roots_keep_sign():
    H = Scalar(lambda y, t: y * y - (4 * t + (1 - t)), lambda y, t: 2 * y, lambda y, t: -3)
    for s in (2.0, -2.0):
        r = track_path(H, [s])
        assert r.converged and abs(r.endpoint[0] - np.sign(s)) <= 1e-12


def test_divergence():
    # t y = 1 - t has y = (1 - t) / t -> infinity as t -> 0
    H = Scalar(lambda y, t: t * y - (1 - t), lambda y, t: t, lambda y, t: y + 1)
    r = track_path(H, [0.0])
    assert r.status is PathStatus.DIVERGED


def test_total_degree_homotopy(rng):
    f, g, starts = total_degree_pair(rng, 2, 2)
    H = Poly(f, g, gamma=np.exp(0.7j))
    res = track_all(H, starts)
    for r in res:
        assert r.converged
        assert np.linalg.norm(f.evaluate(r.endpoint)) <= 1e-11 * (1 + np.linalg.norm(r.endpoint))
    ends = np.array([r.endpoint for r in res])
    assert len({tuple(np.round(e, 6)) for e in ends}) == 4


def test_converged_residual_invariant(rng):
    s = TrackSettings()
    f, g, starts = total_degree_pair(rng, 2, 3)
    for r in track_all(Poly(f, g, np.exp(1.3j)), starts, s):
        if r.converged:
            assert r.residual <= s.refine_tol * (1 + np.linalg.norm(r.endpoint))


def test_step_halving_stability(rng):
    f, g, starts = total_degree_pair(rng, 2, 2)
    H = Poly(f, g, gamma=np.exp(2.1j))
    a = track_all(H, starts, TrackSettings())
    b = track_all(H, starts, TrackSettings(max_step=0.05, initial_step=0.025))
    for ra, rb in zip(a, b):
        assert ra.converged and rb.converged
        assert np.linalg.norm(ra.endpoint - rb.endpoint) <= 1e-8


def test_threads_and_order(rng):
    f, g, starts = total_degree_pair(rng, 2, 2)
    H = Poly(f, g, gamma=np.exp(0.4j))
    serial = track_all(H, starts)
    threaded = track_all(H, starts, threads=4)
    perm = [2, 0, 3, 1]
    permuted = track_all(H, starts[perm])
    for idx, (s, t) in enumerate(zip(serial, threaded)):
        assert s.start_index == t.start_index == idx
        assert np.array_equal(s.endpoint, t.endpoint)
    for pos, src in enumerate(perm):
        assert np.array_equal(permuted[pos].endpoint, serial[src].endpoint)


def test_empty():
    assert track_all(None, []) == []


def test_dt_matches_finite_differences(rng):
    f, g, _ = total_degree_pair(rng, 3, 2)
    H = Poly(f, g, gamma=np.exp(0.9j))
    for _ in range(10):
        y, t, h = polydisk(rng, 3), rng.uniform(0.1, 0.9), 1e-6
        fd = (H.evaluate(y, t + h) - H.evaluate(y, t - h)) / (2 * h)
        assert np.allclose(H.dt(y, t), fd, rtol=1e-6, atol=1e-8)


class TestNewton:
    def test_square_root(self):
        y, res, ok = newton_refine(lambda v: (v * v - 1, np.diag(2 * v)), np.array([1.1]), 1e-12)
        assert ok and abs(y[0] - 1) <= 1e-12

    def test_exact_root_unchanged(self):
        calls = []

        def F(v):
            calls.append(1)
            return v * v - 4, np.diag(2 * v)

        y, res, ok = newton_refine(F, np.array([2.0 + 0j]))
        assert ok and y[0] == 2 and len(calls) == 1

    def test_linear_one_step(self, rng):
        A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        b = rng.normal(size=4) + 0j
        it = []

        def F(v):
            it.append(1)
            return A @ v - b, A

        y, res, ok = newton_refine(F, np.zeros(4, complex), 1e-13)
        assert ok and np.allclose(y, np.linalg.solve(A, b), atol=1e-13)
        assert len(it) == 2  # initial evaluation plus one step

    def test_singular_flag(self):
        y, res, ok = newton_refine(lambda v: (v * v + 1, np.zeros((1, 1))), np.array([0.0 + 0j]))
        assert not ok
