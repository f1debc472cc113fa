"""Discretizations of ``L^2(0, inf)``: a Nystrom grid and a Laguerre basis."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import roots_laguerre

from .errors import ShiftOffGridError


def gauss_legendre_unit(order: int):
    """Gauss-Legendre nodes and weights on ``[0, 1]``."""
    x, w = np.polynomial.legendre.leggauss(order)
    return (x + 1) / 2, w / 2


@dataclass(frozen=True)
class Grid:
    """Composite Gauss-Legendre panels on ``[0, T]``.

    Functions are represented by their values at the nodes.  Shifts are exact
    only by whole panels, so ``T / panels`` is the admissible shift step.
    """

    T: float = 40.0
    N: int = 2560
    order: int = 8

    backend = "grid"

    def __post_init__(self):
        if self.T <= 0 or self.N < 16:
            raise ValueError("need T > 0 and N >= 16")
        if self.N % self.order:
            raise ValueError(f"N must be a multiple of the panel order {self.order}")

    @property
    def size(self) -> int:
        return self.N

    @property
    def panels(self) -> int:
        return self.N // self.order

    @property
    def h(self) -> float:
        return self.T / self.panels

    @cached_property
    def reference(self):
        return gauss_legendre_unit(self.order)

    @cached_property
    def nodes(self) -> np.ndarray:
        u, _ = self.reference
        return ((np.arange(self.panels)[:, None] + u[None, :]) * self.h).ravel()

    @cached_property
    def weights(self) -> np.ndarray:
        _, w = self.reference
        return np.tile(w * self.h, self.panels)

    def shift_steps(self, nu: float) -> int:
        """Number of whole panels in ``nu``; raises if ``nu`` is off the grid."""
        s = nu / self.h
        k = int(round(s))
        if abs(s - k) > 1e-9 * max(1.0, abs(s)):
            raise ShiftOffGridError(f"shift {nu} is not a multiple of the panel width {self.h}")
        return k

    def discretize(self, f) -> np.ndarray:
        return np.asarray(f(self.nodes), dtype=complex)

    def inner(self, u, v) -> complex:
        return complex(np.sum(self.weights * np.conj(v) * u))

    def norm(self, v) -> float:
        v = np.asarray(v)
        if v.ndim == 1:
            return float(np.sqrt(np.sum(self.weights * np.abs(v) ** 2)))
        return np.sqrt(np.sum(self.weights[:, None] * np.abs(v) ** 2, axis=0))

    def to_json(self) -> dict:
        return {"backend": "grid", "T": self.T, "N": self.N, "order": self.order}


def laguerre_functions(t, count: int) -> np.ndarray:
    """``psi_j(t) = sqrt(2) exp(-t) L_j(2t)`` for ``j < count``; shape ``(len(t), count)``.

    Three-term recurrence run on the scaled functions, so no overflow for
    large ``t``.
    """
    t = np.asarray(t, dtype=float).ravel()
    out = np.zeros((t.size, count))
    if count == 0:
        return out
    x = 2 * t
    out[:, 0] = np.sqrt(2) * np.exp(-t)
    if count > 1:
        out[:, 1] = out[:, 0] * (1 - x)
    for j in range(1, count - 1):
        out[:, j + 1] = ((2 * j + 1 - x) * out[:, j] - j * out[:, j - 1]) / (j + 1)
    out[t < 0] = 0.0
    return out


def scaled_gauss_laguerre(n: int):
    """Nodes ``t_q`` and weights ``W_q`` with ``int_0^inf f dt ~ sum W_q f(t_q)``.

    This is the n-point Gauss-Laguerre rule for ``exp(-x)`` in ``x = 2t``,
    with the exponential folded into the weights; it is exact for
    ``f = exp(-2t) * poly(t)`` of degree ``< 2n``.
    """
    x, _ = roots_laguerre(n)
    # w_q = x_q / ((n+1)^2 L_{n+1}(x_q)^2); fold exp(x_q) in via psi_{n+1}
    psi = laguerre_functions(x / 2, n + 2)[:, n + 1] / np.sqrt(2)
    w_scaled = x / ((n + 1) ** 2 * psi ** 2)
    return x / 2, w_scaled / 2


@dataclass(frozen=True)
class LaguerreBasis:
    """First ``N`` Laguerre functions; vectors are expansion coefficients."""

    N: int = 200

    backend = "laguerre"

    @property
    def size(self) -> int:
        return self.N

    def evaluate(self, t) -> np.ndarray:
        return laguerre_functions(t, self.N)

    @cached_property
    def quadrature(self):
        return scaled_gauss_laguerre(self.N + 8)

    def gram(self) -> np.ndarray:
        t, w = self.quadrature
        psi = self.evaluate(t)
        return psi.T @ (w[:, None] * psi)

    def shift_matrix(self, nu: float) -> np.ndarray:
        """Galerkin matrix ``<U_nu psi_j, psi_k>``."""
        if nu == 0:
            return np.eye(self.N, dtype=complex)
        s = abs(nu)
        t, w = self.quadrature
        # int_0^inf psi_j(t) psi_k(t + s) dt; the integrand is exp(-2t) * poly
        a = self.evaluate(t)
        b = self.evaluate(t + s)
        m = (b.T @ (w[:, None] * a)).astype(complex)  # [k, j]
        return m if nu > 0 else m.T.copy()

    def coefficients(self, f, T: float = 40.0, panels: int = 1600, order: int = 16) -> np.ndarray:
        """Expansion coefficients ``<f, psi_j>`` of a function decaying on ``[0, T]``."""
        u, w = gauss_legendre_unit(order)
        h = T / panels
        t = ((np.arange(panels)[:, None] + u[None, :]) * h).ravel()
        wt = np.tile(w * h, panels)
        vals = np.asarray(f(t), dtype=complex)
        return self.evaluate(t).T @ (wt * vals)

    def synthesize(self, coef, t) -> np.ndarray:
        return self.evaluate(t) @ np.asarray(coef)

    def discretize(self, f) -> np.ndarray:
        return self.coefficients(f)

    def inner(self, u, v) -> complex:
        return complex(np.vdot(v, u))

    def norm(self, v) -> float:
        return np.linalg.norm(v, axis=0) if np.ndim(v) > 1 else float(np.linalg.norm(v))

    def to_json(self) -> dict:
        return {"backend": "laguerre", "N": self.N}
