"""Exponential-rational symbols ``g(t) = exp(i*delta*t) * r(t)``.

The rational part is stored in zero/pole/gain form.  All objects are
immutable; every operation returns a new symbol.

Fourier convention: ``(F phi)(xi) = int exp(i*xi*x) phi(x) dx``.  With this
convention a symbol analytic in the upper half-plane generates a convolution
kernel supported on ``x > 0``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import (
    NotInvertibleError,
    NotMatchingError,
    NotStrictlyProperError,
    NotUnimodularAtZeroError,
    RootMarginError,
    SchemaError,
    UnboundedSymbolError,
)

ROOT_MARGIN = 1e-6
ROOT_TOL = 1e-8
CLUSTER_TOL = 1e-5
MATCH_RTOL = 1e-10


def _as_roots(values) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(values, dtype=complex)).ravel()
    return arr


def _sorted_roots(roots: np.ndarray) -> np.ndarray:
    if roots.size == 0:
        return roots
    order = np.lexsort((roots.imag, roots.real))
    return roots[order]


def _cancel(zeros: np.ndarray, poles: np.ndarray, tol: float = ROOT_TOL):
    """Remove zero/pole pairs closer than ``tol`` (greedy nearest match)."""
    zeros = list(zeros)
    poles = list(poles)
    if not zeros or not poles:
        return np.array(zeros, dtype=complex), np.array(poles, dtype=complex)
    kept_zeros = []
    for z in zeros:
        if poles:
            dist = np.abs(np.asarray(poles) - z)
            k = int(np.argmin(dist))
            if dist[k] <= tol * max(1.0, abs(z)):
                poles.pop(k)
                continue
        kept_zeros.append(z)
    return np.array(kept_zeros, dtype=complex), np.array(poles, dtype=complex)


def poly_roots(coeffs) -> np.ndarray:
    """Roots of a polynomial given by ascending coefficients.

    Companion-matrix eigenvalues followed by one Newton step on the original
    polynomial.
    """
    c = np.trim_zeros(np.asarray(coeffs, dtype=complex), "b")
    if c.size <= 1:
        return np.zeros(0, dtype=complex)
    roots = P.polyroots(c)
    dc = P.polyder(c)
    val = P.polyval(roots, c)
    der = P.polyval(roots, dc)
    ok = np.abs(der) > 1e-300
    roots = roots.astype(complex)
    roots[ok] = roots[ok] - val[ok] / der[ok]
    return _merge_clusters(roots)


def _merge_clusters(roots: np.ndarray, tol: float = CLUSTER_TOL) -> np.ndarray:
    """Replace each tight cluster of roots by its mean.

    A root of multiplicity k comes back from the eigenvalue solver smeared
    over a radius of about ``eps**(1/k)``; the cluster mean is accurate.
    """
    roots = roots.copy()
    label = np.arange(roots.size)
    for i in range(roots.size):
        for j in range(i):
            if abs(roots[i] - roots[j]) <= tol * max(1.0, abs(roots[j])):
                label[label == label[i]] = label[j]
    for lab in np.unique(label):
        members = label == lab
        if members.sum() > 1:
            roots[members] = roots[members].mean()
    return roots


@dataclass(frozen=True)
class Rational:
    """``gain * prod(t - zeros) / prod(t - poles)`` in reduced form."""

    zeros: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))
    poles: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))
    gain: complex = 1.0

    def __post_init__(self):
        gain = complex(self.gain)
        zeros = _as_roots(self.zeros)
        poles = _as_roots(self.poles)
        if gain == 0:
            zeros = np.zeros(0, complex)
            poles = np.zeros(0, complex)
        else:
            zeros, poles = _cancel(zeros, poles)
        if poles.size and np.min(np.abs(poles.imag)) < ROOT_MARGIN:
            raise RootMarginError("pole within the root margin of the real axis")
        zeros = _sorted_roots(zeros)
        poles = _sorted_roots(poles)
        zeros.flags.writeable = False
        poles.flags.writeable = False
        object.__setattr__(self, "zeros", zeros)
        object.__setattr__(self, "poles", poles)
        object.__setattr__(self, "gain", gain)

    @classmethod
    def from_coeffs(cls, num, den) -> "Rational":
        num = np.trim_zeros(np.asarray(num, dtype=complex), "b")
        den = np.trim_zeros(np.asarray(den, dtype=complex), "b")
        if den.size == 0:
            raise SchemaError("denominator is identically zero")
        if num.size == 0:
            return cls(gain=0.0)
        return cls(poly_roots(num), poly_roots(den), num[-1] / den[-1])

    @property
    def num(self) -> np.ndarray:
        """Ascending numerator coefficients."""
        if self.gain == 0:
            return np.zeros(1, complex)
        return self.gain * P.polyfromroots(self.zeros) if self.zeros.size else np.array([self.gain])

    @property
    def den(self) -> np.ndarray:
        return P.polyfromroots(self.poles) if self.poles.size else np.ones(1, complex)

    @property
    def is_zero(self) -> bool:
        return self.gain == 0

    @property
    def relative_degree(self) -> int:
        return self.poles.size - self.zeros.size

    def at_infinity(self) -> complex:
        if self.is_zero:
            return 0j
        d = self.relative_degree
        if d < 0:
            return complex(np.inf)
        return self.gain if d == 0 else 0j

    def __call__(self, t):
        t = np.asarray(t, dtype=complex)
        out = np.full(t.shape, self.gain, dtype=complex)
        for z in self.zeros:
            out = out * (t - z)
        for p in self.poles:
            out = out / (t - p)
        return out


@dataclass(frozen=True)
class Symbol:
    """``exp(i*delta*t) * rat(t)`` on the real line."""

    delta: float = 0.0
    rat: Rational = field(default_factory=Rational)

    def __post_init__(self):
        object.__setattr__(self, "delta", float(self.delta))
        if self.rat.relative_degree < 0 and not self.rat.is_zero:
            raise UnboundedSymbolError("numerator degree exceeds denominator degree")

    # construction helpers
    @classmethod
    def from_zpk(cls, zeros=(), poles=(), gain=1.0, delta=0.0) -> "Symbol":
        return cls(delta, Rational(zeros, poles, gain))

    @classmethod
    def constant(cls, value) -> "Symbol":
        return cls(0.0, Rational(gain=value))

    @classmethod
    def exponential(cls, delta) -> "Symbol":
        return cls(delta, Rational())

    @classmethod
    def zeta(cls, power: int = 1) -> "Symbol":
        """``((t - i)/(t + i))**power``."""
        k = abs(int(power))
        up, down = [1j] * k, [-1j] * k
        if power >= 0:
            return cls.from_zpk(up, down)
        return cls.from_zpk(down, up)

    # evaluation
    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(1j * self.delta * t) * self.rat(t)

    @property
    def zeros(self):
        return self.rat.zeros

    @property
    def poles(self):
        return self.rat.poles

    @property
    def gain(self):
        return self.rat.gain

    @property
    def is_rational(self) -> bool:
        return self.delta == 0.0

    def is_invertible(self) -> bool:
        if self.rat.is_zero or self.rat.relative_degree != 0:
            return False
        return not (self.zeros.size and np.min(np.abs(self.zeros.imag)) < ROOT_MARGIN)

    def require_invertible(self):
        if self.rat.is_zero or self.rat.relative_degree != 0:
            raise NotInvertibleError("symbol vanishes at infinity or is identically zero")
        if self.zeros.size and np.min(np.abs(self.zeros.imag)) < ROOT_MARGIN:
            raise NotInvertibleError("symbol has a real zero within the root margin")

    # algebra
    def __mul__(self, other):
        if not isinstance(other, Symbol):
            other = Symbol.constant(other)
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return Symbol(self.delta, Rational(self.zeros, self.poles, -self.gain))

    def __add__(self, other):
        if not isinstance(other, Symbol):
            other = Symbol.constant(other)
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Symbol):
            other = Symbol.constant(other)
        return add(self, -other)

    def __truediv__(self, other):
        return mul(self, inv(other))

    def __pow__(self, k: int):
        out = Symbol.constant(1.0)
        base = self if k >= 0 else inv(self)
        for _ in range(abs(int(k))):
            out = mul(out, base)
        return out

    def to_json(self) -> dict:
        return symbol_to_json(self)

    def __repr__(self):
        return (f"Symbol(delta={self.delta:g}, zeros={np.round(self.zeros, 6).tolist()}, "
                f"poles={np.round(self.poles, 6).tolist()}, gain={np.round(self.gain, 6)})")


ONE = Symbol()


def reflect(g: Symbol) -> Symbol:
    """The symbol ``t -> g(-t)``."""
    sign = (-1) ** (g.zeros.size - g.poles.size)
    return Symbol(-g.delta, Rational(-g.zeros, -g.poles, sign * g.gain))


def mul(g: Symbol, h: Symbol) -> Symbol:
    rat = Rational(np.concatenate([g.zeros, h.zeros]), np.concatenate([g.poles, h.poles]),
                   g.gain * h.gain)
    return Symbol(g.delta + h.delta, rat)


def inv(g: Symbol) -> Symbol:
    g.require_invertible()
    return Symbol(-g.delta, Rational(g.poles, g.zeros, 1.0 / g.gain))


def conj(g: Symbol) -> Symbol:
    """Symbol whose values on the real line are the complex conjugates of ``g``."""
    return Symbol(-g.delta, Rational(np.conj(g.zeros), np.conj(g.poles), np.conj(g.gain)))


def add(g: Symbol, h: Symbol) -> Symbol:
    """Sum of two symbols sharing the same exponential frequency."""
    if g.rat.is_zero:
        return h
    if h.rat.is_zero:
        return g
    if g.delta != h.delta:
        raise ValueError("sum of symbols with different frequencies leaves the class")
    num = P.polyadd(P.polymul(g.rat.num, h.rat.den), P.polymul(h.rat.num, g.rat.den))
    den = P.polymul(g.rat.den, h.rat.den)
    scale = max(np.max(np.abs(P.polymul(g.rat.num, h.rat.den))),
                np.max(np.abs(P.polymul(h.rat.num, g.rat.den))))
    num = np.trim_zeros(np.where(np.abs(num) <= 1e-12 * scale, 0, num), "b")
    if num.size == 0:
        return Symbol(g.delta, Rational(gain=0.0))
    # keep the known poles exactly; only the new numerator needs a root solve
    poles = np.concatenate([g.rat.poles, h.rat.poles])
    return Symbol(g.delta, Rational(poly_roots(num), poles, num[-1] / den[-1]))


def ap_index(g: Symbol) -> float:
    """Mean motion of ``g``; for this class it is the exponential frequency."""
    g.require_invertible()
    return g.delta


def winding_index(g: Symbol) -> int:
    """Zeros minus poles of the rational part in the open upper half-plane."""
    g.require_invertible()
    roots = np.concatenate([g.zeros, g.poles])
    if roots.size and np.min(np.abs(roots.imag)) < ROOT_MARGIN:
        raise RootMarginError("root within the margin of the real axis")
    return int(np.sum(g.zeros.imag > 0) - np.sum(g.poles.imag > 0))


def sample_points(count: int = 200) -> np.ndarray:
    """Points spread over the whole real line (tangent spacing)."""
    theta = (np.arange(count) + 0.5) / count * np.pi - np.pi / 2
    return np.tan(theta)


def is_matching(g: Symbol, rtol: float = MATCH_RTOL, count: int = 200) -> bool:
    t = sample_points(count)
    return bool(np.max(np.abs(g(t) * g(-t) - 1.0)) <= rtol)


def sigma(g: Symbol, tol: float = 1e-10) -> int:
    """Factorization signature ``(-1)**n(g) * g(0)`` of a matching function."""
    if not is_matching(g):
        raise NotMatchingError("g(t) g(-t) = 1 fails on sample points")
    value = (-1) ** winding_index(g) * complex(g(0.0))
    for s in (1, -1):
        if abs(value - s) <= tol:
            return s
    raise NotUnimodularAtZeroError(f"(-1)^n g(0) = {value} is not +-1")


@dataclass(frozen=True)
class MatchingPair:
    """A pair ``(a, b)`` with ``a(t) a(-t) = b(t) b(-t)`` and its subordinated pair."""

    a: Symbol
    b: Symbol
    c: Symbol
    d: Symbol
    nu1: float
    nu2: float
    n1: int
    n2: int
    sigma_c: int
    sigma_d: int

    @property
    def indices(self) -> dict:
        return {"nu1": self.nu1, "n1": self.n1, "nu2": self.nu2, "n2": self.n2,
                "sigma": self.sigma_c}

    def to_json(self) -> dict:
        return {"a": symbol_to_json(self.a), "b": symbol_to_json(self.b)}


def make_matching_pair(a: Symbol, b: Symbol, rtol: float = MATCH_RTOL) -> MatchingPair:
    a.require_invertible()
    b.require_invertible()
    t = sample_points(200)
    lhs = a(t) * a(-t)
    rhs = b(t) * b(-t)
    if np.max(np.abs(lhs - rhs) / np.maximum(np.abs(rhs), 1e-300)) > rtol:
        raise NotMatchingError("a(t) a(-t) != b(t) b(-t) on sample points")
    c = mul(a, inv(b))
    d = mul(a, inv(reflect(b)))
    for name, g in (("c", c), ("d", d)):
        if not is_matching(g):
            raise NotMatchingError(f"subordinated symbol {name} is not a matching function")
    n1, n2 = winding_index(c), winding_index(d)
    s_c, s_d = sigma(c), sigma(d)
    assert s_c == s_d, "signatures of the subordinated pair differ"
    assert (n1 - n2) % 2 == 0, "subordinated indices differ in parity"
    return MatchingPair(a, b, c, d, ap_index(c), ap_index(d), n1, n2, s_c, s_d)


def adjoint_pair(pair: MatchingPair) -> MatchingPair:
    """Matching pair generating the adjoint operator ``W(conj a) + H(conj b~)``."""
    return make_matching_pair(conj(pair.a), conj(reflect(pair.b)))


# ---------------------------------------------------------------------------
# kernels


@dataclass(frozen=True)
class ExpPolyKernel:
    """Two-sided kernel ``sum coef * x**power * exp(-i*p*x)``.

    Terms with ``Im p < 0`` live on ``x > 0``; terms with ``Im p > 0`` on
    ``x < 0``.
    """

    poles: np.ndarray
    powers: np.ndarray
    coefs: np.ndarray

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        pos = x > 0
        neg = x < 0
        for p, k, c in zip(self.poles, self.powers, self.coefs):
            mask = pos if p.imag < 0 else neg
            xs = x[mask]
            out[mask] += c * xs ** k * np.exp(-1j * p * xs)
        return out

    def positive_part(self) -> "ExpPolyKernel":
        keep = self.poles.imag < 0
        return ExpPolyKernel(self.poles[keep], self.powers[keep], self.coefs[keep])

    @property
    def is_zero(self) -> bool:
        return self.poles.size == 0

    @property
    def decay_rate(self) -> float:
        if self.is_zero:
            return np.inf
        return float(np.min(np.abs(self.poles.imag)))


def _laurent_coefficients(func, center, radius, count):
    """Taylor coefficients of an analytic ``func`` about ``center`` (Cauchy/FFT)."""
    m = 64
    w = np.exp(2j * np.pi * np.arange(m) / m)
    vals = func(center + radius * w)
    coef = np.fft.fft(vals) / m
    return coef[:count] / radius ** np.arange(count)


def partial_fractions(r: Rational):
    """Return ``[(pole, [A_1, ..., A_mu])]`` with ``r = sum A_l / (t - pole)**l``."""
    if r.is_zero or r.poles.size == 0:
        return []
    distinct = []
    for p in r.poles:
        for entry in distinct:
            if abs(entry[0] - p) <= ROOT_TOL * max(1.0, abs(p)):
                entry[1] += 1
                break
        else:
            distinct.append([p, 1])
    out = []
    for idx, (p, mult) in enumerate(distinct):
        others = [q for j, (q, _) in enumerate(distinct) if j != idx]
        gap = min([abs(q - p) for q in others] + [2.0])
        radius = 0.4 * gap

        def h(s, p=p, mult=mult):
            rest = Rational(r.zeros, [q for q in r.poles if abs(q - p) > ROOT_TOL * max(1.0, abs(p))],
                            r.gain)
            return rest(s)

        taylor = _laurent_coefficients(h, p, radius, mult)
        # A_l = taylor[mult - l]
        out.append((p, [taylor[mult - l] for l in range(1, mult + 1)]))
    return out


def kernel_expansion(r: Rational) -> ExpPolyKernel:
    """Closed-form inverse Fourier transform of a strictly proper rational ``r``."""
    if r.is_zero:
        return ExpPolyKernel(np.zeros(0, complex), np.zeros(0, int), np.zeros(0, complex))
    if r.relative_degree <= 0:
        raise NotStrictlyProperError("rational part does not vanish at infinity")
    poles, powers, coefs = [], [], []
    for p, amps in partial_fractions(r):
        side = -1j if p.imag < 0 else 1j
        for l, amp in enumerate(amps, start=1):
            # residue of exp(-i xi x) / (xi - p)**l at p
            coef = side * amp * (-1j) ** (l - 1) / factorial(l - 1)
            poles.append(p)
            powers.append(l - 1)
            coefs.append(coef)
    return ExpPolyKernel(np.array(poles, complex), np.array(powers, int), np.array(coefs, complex))


def split_at_infinity(g: Symbol):
    """``rat = rat(inf) + strictly proper remainder``; returns (constant, kernel)."""
    r = g.rat
    if r.is_zero:
        return 0j, kernel_expansion(r)
    const = r.at_infinity()
    if const == 0:
        return 0j, kernel_expansion(r)
    rest = add(Symbol(0.0, r), Symbol.constant(-const)).rat
    return const, kernel_expansion(rest)


# ---------------------------------------------------------------------------
# JSON


def _pairs(values) -> list:
    return [[float(np.real(v)), float(np.imag(v))] for v in np.atleast_1d(values)]


def _parse_complex_list(items, key) -> np.ndarray:
    try:
        arr = np.array([complex(float(re), float(im)) for re, im in items], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"'{key}' must be a list of [re, im] pairs") from exc
    return arr


def symbol_from_json(data: dict) -> Symbol:
    if not isinstance(data, dict):
        raise SchemaError("symbol must be a JSON object")
    try:
        delta = float(data.get("delta", 0.0))
    except (TypeError, ValueError) as exc:
        raise SchemaError("'delta' must be a number") from exc
    if "num" in data or "den" in data:
        if "num" not in data or "den" not in data:
            raise SchemaError("coefficient form needs both 'num' and 'den'")
        num = _parse_complex_list(data["num"], "num")
        den = _parse_complex_list(data["den"], "den")
        return Symbol(delta, Rational.from_coeffs(num, den))
    zeros = _parse_complex_list(data.get("zeros", []), "zeros")
    poles = _parse_complex_list(data.get("poles", []), "poles")
    gain = data.get("gain", [1.0, 0.0])
    try:
        gain = complex(float(gain[0]), float(gain[1])) if isinstance(gain, (list, tuple)) else complex(gain)
    except (TypeError, ValueError, IndexError) as exc:
        raise SchemaError("'gain' must be [re, im]") from exc
    return Symbol(delta, Rational(zeros, poles, gain))


def symbol_to_json(g: Symbol) -> dict:
    return {"delta": g.delta, "zeros": _pairs(g.zeros) if g.zeros.size else [],
            "poles": _pairs(g.poles) if g.poles.size else [],
            "gain": [float(g.gain.real), float(g.gain.imag)]}


def pair_from_json(data: dict) -> MatchingPair:
    if not isinstance(data, dict) or "a" not in data or "b" not in data:
        raise SchemaError("pair file must contain 'a' and 'b' symbols")
    return make_matching_pair(symbol_from_json(data["a"]), symbol_from_json(data["b"]))
