"""Homotopies in intrinsic coordinates y in C^m, m = 2k - a - b.

The tracked point is ``w = offset(t) + basis(t) @ y`` and the only
equations are the randomized product system evaluated at ``w``; the
linear slicing is built into the parameterisation.
"""

from __future__ import annotations

import numpy as np

from ..calinalg import AffinePlane
from ..polysys import PolySystem
from .planes import CascadePlane, dsigma_dt, sigma_of_t

__all__ = ["StartHomotopy", "CascadeHomotopy"]


class StartHomotopy:
    """Moves the product slice plane onto a level plane.

    ``w(t, y) = s [w1 + W1 y] + (1 - s) [w2 + W2 y]`` with
    ``s = gamma t / (gamma t + 1 - t)``.
    """

    def __init__(self, sF: PolySystem, start: AffinePlane, target: AffinePlane, gamma: complex):
        if start.dim != target.dim or start.dim != sF.num_polys:
            raise ValueError("start plane, target plane and system must all have dimension m")
        self.sF = sF
        self.start = start
        self.target = target
        self.gamma = gamma
        self._doff = start.offset - target.offset
        self._dbas = start.basis - target.basis

    def point(self, y, t):
        s = sigma_of_t(t, self.gamma)
        return self.target.offset + s * self._doff + (self.target.basis + s * self._dbas) @ y

    def evaluate(self, y, t):
        return self.sF.evaluate(self.point(y, t))

    def jac_y(self, y, t):
        return self.eval_jac(y, t)[1]

    def eval_jac(self, y, t):
        s = sigma_of_t(t, self.gamma)
        val, J = self.sF.evaluate_and_jacobian(self.point(y, t))
        return val, J @ (self.target.basis + s * self._dbas)

    def dt(self, y, t):
        return self.jac_dt(y, t)[1]

    def jac_dt(self, y, t):
        s = sigma_of_t(t, self.gamma)
        J = self.sF.jacobian(self.point(y, t))
        return (
            J @ (self.target.basis + s * self._dbas),
            dsigma_dt(t, self.gamma) * (J @ (self._doff + self._dbas @ y)),
        )


class CascadeHomotopy:
    """``sF(epsilon + [E | t F + gamma (1 - t) G] y)``; t enters linearly."""

    def __init__(self, sF: PolySystem, plane: CascadePlane):
        if plane.dim != sF.num_polys:
            raise ValueError("cascade plane dimension differs from the number of equations")
        self.sF = sF
        self.plane = plane
        self._ne = plane.E.shape[1]
        self._dF = plane.F - plane.gamma * plane.G

    def point(self, y, t):
        return self.plane.embed(y, t)

    def evaluate(self, y, t):
        return self.sF.evaluate(self.point(y, t))

    def jac_y(self, y, t):
        return self.eval_jac(y, t)[1]

    def eval_jac(self, y, t):
        basis = self.plane.basis_at(t)
        val, J = self.sF.evaluate_and_jacobian(self.plane.epsilon + basis @ y)
        return val, J @ basis

    def dt(self, y, t):
        return self.jac_dt(y, t)[1]

    def jac_dt(self, y, t):
        basis = self.plane.basis_at(t)
        J = self.sF.jacobian(self.plane.epsilon + basis @ y)
        return J @ basis, J @ (self._dF @ y[self._ne:])
