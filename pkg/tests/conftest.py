import numpy as np
import pytest

from dhom.polysys import Polynomial, PolySystem

# Acceptance outcomes collected by tests/test_acceptance.py, printed at the end.
ACCEPTANCE: dict[str, str] = {}


def random_system(rng, n_vars, n_polys, max_deg=3, n_terms=6, scale=1.0):
    polys = []
    for _ in range(n_polys):
        terms = {}
        for _ in range(n_terms):
            e = [0] * n_vars
            for _ in range(rng.integers(0, max_deg + 1)):
                e[rng.integers(n_vars)] += 1
            c = scale * (rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1))
            terms[tuple(e)] = terms.get(tuple(e), 0) + c
        polys.append(Polynomial.from_terms(terms, n_vars))
    return PolySystem(tuple(f"x{i}" for i in range(n_vars)), tuple(polys))


def polydisk(rng, n):
    r = np.sqrt(rng.uniform(0, 1, n))
    return r * np.exp(2j * np.pi * rng.uniform(0, 1, n))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda s: int(s.split()[0])):
        terminalreporter.write_line(f"{ACCEPTANCE[name]}  {name}")
