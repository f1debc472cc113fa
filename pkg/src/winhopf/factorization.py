"""Wiener-Hopf factorization ``g = g_minus * exp(i nu t) * zeta**n * g_plus``.

``g_plus`` carries every zero and pole of the rational part that lies in the
lower half-plane (so it extends analytically to the upper one), ``g_minus``
the ones in the upper half-plane.  Degrees are balanced with ``(t + i)`` in
``g_plus`` and ``(t - i)`` in ``g_minus``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotMatchingError
from .symbols import (
    ROOT_MARGIN,
    Symbol,
    ap_index,
    inv,
    is_matching,
    mul,
    reflect,
    sigma,
    symbol_from_json,
    symbol_to_json,
    winding_index,
)


@dataclass(frozen=True)
class Factorization:
    g_minus: Symbol
    nu: float
    n: int
    g_plus: Symbol
    sigma: int | None = None

    def middle(self) -> Symbol:
        return mul(Symbol.exponential(self.nu), Symbol.zeta(self.n))

    def product(self) -> Symbol:
        return mul(mul(self.g_minus, self.middle()), self.g_plus)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        z = (t - 1j) / (t + 1j)
        return self.g_minus(t) * np.exp(1j * self.nu * t) * z ** self.n * self.g_plus(t)

    def to_json(self) -> dict:
        return {"g_minus": symbol_to_json(self.g_minus), "g_plus": symbol_to_json(self.g_plus),
                "nu": self.nu, "n": self.n, "sigma": self.sigma}

    @classmethod
    def from_json(cls, data: dict) -> "Factorization":
        return cls(symbol_from_json(data["g_minus"]), float(data["nu"]), int(data["n"]),
                   symbol_from_json(data["g_plus"]), data.get("sigma"))


def wiener_hopf_factor(g: Symbol) -> Factorization:
    nu = ap_index(g)
    n = winding_index(g)
    zu = g.zeros[g.zeros.imag > 0]
    zl = g.zeros[g.zeros.imag < 0]
    pu = g.poles[g.poles.imag > 0]
    pl = g.poles[g.poles.imag < 0]
    up = [1j] * abs(n)
    down = [-1j] * abs(n)
    if n >= 0:
        g_minus = Symbol.from_zpk(zu, np.concatenate([pu, up]))
        g_plus = Symbol.from_zpk(np.concatenate([zl, down]), pl, g.gain)
    else:
        g_minus = Symbol.from_zpk(np.concatenate([zu, up]), pu)
        g_plus = Symbol.from_zpk(zl, np.concatenate([pl, down]), g.gain)
    return Factorization(g_minus, nu, n, g_plus)


def matching_factor(g: Symbol, tol: float = 1e-10) -> Factorization:
    """Factorization of a matching function normalized by ``g_minus(0) = 1``."""
    if not is_matching(g):
        raise NotMatchingError("g(t) g(-t) = 1 fails on sample points")
    f = wiener_hopf_factor(g)
    scale = complex(f.g_minus(0.0))
    g_minus = mul(f.g_minus, Symbol.constant(1.0 / scale))
    g_plus = mul(f.g_plus, Symbol.constant(scale))
    s = sigma(g)
    t = np.linspace(-20, 20, 201)
    expected = s / reflect(g_plus)(t)
    err = np.max(np.abs(g_minus(t) - expected))
    if err > tol:
        raise NotMatchingError(f"g_minus != sigma * reflected g_plus^-1 (err {err:.2e})")
    return Factorization(g_minus, f.nu, f.n, g_plus, s)


@dataclass
class FactorizationReport:
    max_rel_error: float
    plus_margin: float
    minus_margin: float
    plus_ok: bool
    minus_ok: bool

    @property
    def ok(self) -> bool:
        return self.plus_ok and self.minus_ok

    def to_json(self) -> dict:
        return dict(self.__dict__, ok=self.ok)


def _roots(s: Symbol) -> np.ndarray:
    return np.concatenate([s.zeros, s.poles])


def verify_factorization(f: Factorization, g: Symbol, count: int = 1000,
                         margin: float = ROOT_MARGIN) -> FactorizationReport:
    """Reconstruction error on a real grid and half-plane certificates."""
    theta = (np.arange(count) + 0.5) / count * np.pi - np.pi / 2
    t = np.tan(theta)
    gt = g(t)
    err = float(np.max(np.abs(gt - f(t)) / np.abs(gt)))
    rp, rm = _roots(f.g_plus), _roots(f.g_minus)
    plus_margin = float(np.max(rp.imag)) if rp.size else -np.inf
    minus_margin = float(np.min(rm.imag)) if rm.size else np.inf
    plus_ok = bool(plus_margin < -margin) and f.g_plus.delta == 0
    minus_ok = bool(minus_margin > margin) and f.g_minus.delta == 0
    for s, ok in ((f.g_plus, plus_ok), (f.g_minus, minus_ok)):
        if s.rat.relative_degree != 0:
            plus_ok = minus_ok = False
    return FactorizationReport(err, plus_margin, minus_margin, plus_ok, minus_ok)


def plus_minus_inverses(f: Factorization):
    """``(g_plus^-1, g_minus^-1)``."""
    return inv(f.g_plus), inv(f.g_minus)
