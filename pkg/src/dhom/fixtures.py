"""Built-in intersection problems.

``1``
    cylinder x^2 + y^2 = 1 meets the sphere (x + 1/2)^2 + y^2 + z^2 = 1
    in a quartic curve (k = 3, a = b = 2).
``2``
    the planes {x = y = 0} and {z = w = 0}, both components of
    [xz, xw, yz, yw] = 0, meet only at the origin of C^4.
``synthetic3``
    two random dense hypersurfaces of degree 2 and 3 in C^5; a larger case
    for timing the two formulations.
``disjoint``
    the parallel lines x = 0 and x = 1 in C^2.
``containment``
    the circle {x^2 + y^2 = 1, z = 0} inside the cylinder.
"""

from __future__ import annotations

import numpy as np

from .calinalg import random_complex
from .polysys import Polynomial, PolySystem, parse_system
from .witness import WitnessSet, witness_hypersurface, witness_linear

__all__ = ["EXAMPLES", "example_witness_sets", "random_dense_polynomial"]

CYLINDER = "vars: x y z;\nx^2 + y^2 - 1;\n"
SPHERE = "vars: x y z;\n(x + 0.5)^2 + y^2 + z^2 - 1;\n"
CROSS = "vars: x y z w;\nx*z; x*w; y*z; y*w;\n"

EXAMPLES = ("1", "2", "synthetic3", "disjoint", "containment")


def random_dense_polynomial(rng: np.random.Generator, k: int, degree: int) -> Polynomial:
    """All monomials of total degree <= ``degree`` with complex Gaussian coefficients."""
    terms = {}

    def rec(prefix, left):
        if len(prefix) == k:
            terms[tuple(prefix)] = complex(random_complex(rng, ()))
            return
        for e in range(left + 1):
            rec(prefix + [e], left - e)

    rec([], degree)
    return Polynomial.from_terms(terms, k)


def example_witness_sets(name: str, seed: int = 0) -> tuple[WitnessSet, WitnessSet]:
    """Witness sets (A, B) of a built-in example, reproducible from ``seed``."""
    rng = np.random.default_rng([seed, 17])
    if name == "1":
        return (
            witness_hypersurface(parse_system(CYLINDER), rng),
            witness_hypersurface(parse_system(SPHERE), rng),
        )
    if name == "2":
        f = parse_system(CROSS)
        return (
            witness_linear(parse_system("x; y;", f.variable_names), f, rng),
            witness_linear(parse_system("z; w;", f.variable_names), f, rng),
        )
    if name == "synthetic3":
        k = 5
        names = tuple(f"x{i}" for i in range(k))
        fa = PolySystem(names, (random_dense_polynomial(rng, k, 2),))
        fb = PolySystem(names, (random_dense_polynomial(rng, k, 3),))
        return witness_hypersurface(fa, rng), witness_hypersurface(fb, rng)
    if name == "disjoint":
        fa = parse_system("vars: x y;\nx;\n")
        fb = parse_system("vars: x y;\nx - 1;\n")
        return witness_hypersurface(fa, rng), witness_hypersurface(fb, rng)
    if name == "containment":
        cyl = parse_system(CYLINDER)
        circle = witness_hypersurface(cyl, rng, restrict_to=parse_system("z;", cyl.variable_names))
        return witness_hypersurface(cyl, rng), circle
    raise ValueError(f"unknown example {name!r}; choose from {', '.join(EXAMPLES)}")
