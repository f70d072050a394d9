"""Homotopies in extrinsic coordinates x = (w, z) in C^{3k}.

The baseline against which the intrinsic cascade is checked: the slicing
equations and the slack variables z are carried explicitly, so every
Newton step solves a 3k x 3k system.
"""

from __future__ import annotations

import numpy as np

from ..polysys import PolySystem
from ..witness import SliceSystem
from .planes import dtau_dt, tau_of_t
from .problem import RandomData

__all__ = ["ExtrinsicStartHomotopy", "ExtrinsicCascadeHomotopy", "level_linear_part"]


def level_linear_part(rd: RandomData, h: int) -> tuple[np.ndarray, np.ndarray]:
    """Matrix and constant of ``[A w + B P_h z; z - P_h (C w + d)]`` on (w, z)."""
    k = rd.k
    n = rd.Abb.shape[0]
    R = np.zeros((n + k, 3 * k), dtype=complex)
    R[:n, : 2 * k] = rd.A
    R[:n, 2 * k : 2 * k + h] = rd.B[:, :h]
    R[n : n + h, : 2 * k] = -rd.C[:h]
    R[n:, 2 * k :] = np.eye(k)
    r = np.zeros(n + k, dtype=complex)
    r[n : n + h] = -rd.d[:h]
    return R, r


class _Linear:
    # Shared evaluation: sF on the w block, then an affine block on (w, z).

    sF: PolySystem
    k: int

    def _lin(self, t) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def _lin_dt(self, x, t) -> np.ndarray:
        raise NotImplementedError

    def evaluate(self, x, t):
        R, r = self._lin(t)
        return np.concatenate([self.sF.evaluate(x[: 2 * self.k]), R @ x + r])

    def jac_y(self, x, t):
        return self.eval_jac(x, t)[1]

    def eval_jac(self, x, t):
        R, r = self._lin(t)
        val, J = self.sF.evaluate_and_jacobian(x[: 2 * self.k])
        top = np.hstack([J, np.zeros((J.shape[0], self.k), dtype=complex)])
        return np.concatenate([val, R @ x + r]), np.vstack([top, R])

    def dt(self, x, t):
        return np.concatenate([np.zeros(self.sF.num_polys, dtype=complex), self._lin_dt(x, t)])

    def jac_dt(self, x, t):
        return self.jac_y(x, t), self.dt(x, t)


class ExtrinsicStartHomotopy(_Linear):
    """``[sF(w); (1 - t) [level-h equations] + t gamma [L_A(u); L_B(v); z]]``."""

    def __init__(self, rd: RandomData, L_A: SliceSystem, L_B: SliceSystem, level: int, gamma: complex):
        self.sF = rd.sF
        self.k = k = rd.k
        self.gamma = gamma
        self.R, self.r = level_linear_part(rd, level)
        S = np.zeros_like(self.R)
        S[: L_A.rows, :k] = L_A.coeff
        S[L_A.rows : L_A.rows + L_B.rows, k : 2 * k] = L_B.coeff
        S[L_A.rows + L_B.rows :, 2 * k :] = np.eye(k)
        s = np.zeros_like(self.r)
        s[: L_A.rows] = L_A.offset
        s[L_A.rows : L_A.rows + L_B.rows] = L_B.offset
        self.S, self.s = S, s

    def _lin(self, t):
        return (1 - t) * self.R + t * self.gamma * self.S, (1 - t) * self.r + t * self.gamma * self.s

    def _lin_dt(self, x, t):
        return -(self.R @ x + self.r) + self.gamma * (self.S @ x + self.s)


class ExtrinsicCascadeHomotopy(_Linear):
    """``[sF(w); A w + B P_i z; z - (P_j + tau P_ji)(C w + d)]`` with
    ``tau = t / (t + gamma (1 - t))``."""

    def __init__(self, rd: RandomData, i: int, j: int, gamma: complex):
        self.sF = rd.sF
        self.k = rd.k
        self.i, self.j = i, j
        self.gamma = gamma
        self.rd = rd
        self.base, self.base_r = level_linear_part(rd, j)
        n = rd.Abb.shape[0]
        k = rd.k
        # Part multiplied by tau: rows j..i-1 of the slack block, plus B's columns j..i-1.
        self.moving = np.zeros_like(self.base)
        self.moving[n + j : n + i, : 2 * k] = -rd.C[j:i]
        self.moving_r = np.zeros_like(self.base_r)
        self.moving_r[n + j : n + i] = -rd.d[j:i]
        self.fixed = np.zeros_like(self.base)
        self.fixed[:n, 2 * k + j : 2 * k + i] = rd.B[:, j:i]

    def _lin(self, t):
        tau = tau_of_t(t, self.gamma)
        return self.base + self.fixed + tau * self.moving, self.base_r + tau * self.moving_r

    def _lin_dt(self, x, t):
        return dtau_dt(t, self.gamma) * (self.moving @ x + self.moving_r)
