"""Explicit inverses and kernel bases for ``W(g)`` and ``W(a) + H(b)``.

Every constructor returns an :class:`InverseRecipe` whose ``operator`` is a
lazy :class:`~winhopf.operators.DiscreteOperator` on the requested
discretization.  The inner inverses of Eqs. 22/24 style middle operators
``I - U P U`` are computed by a dense LU solve.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .discretization import Grid, laguerre_functions
from .errors import PreconditionError
from .factorization import Factorization, matching_factor, wiener_hopf_factor
from .operators import (
    DiscreteOperator,
    build_H,
    build_W,
    compose,
    identity,
    op_P,
    op_U,
    op_V,
    solve_operator,
)
from .symbols import MatchingPair, Symbol, adjoint_pair, inv, reflect, symbol_to_json


@dataclass
class InverseRecipe:
    kind: str
    formula_id: str
    operator: DiscreteOperator
    factors: dict = field(default_factory=dict)
    parts: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)

    def apply(self, v):
        return self.operator.matmat(v)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "formula_id": self.formula_id,
               "backend": self.operator.backend, "size": self.operator.size,
               "residuals": self.residuals}
        out["factors"] = {k: (f.to_json() if isinstance(f, Factorization) else symbol_to_json(f))
                          for k, f in self.factors.items()}
        return out


def invertibility_sides(g: Symbol) -> frozenset:
    """Sides from which ``W(g)`` is invertible, read off ``nu(g)`` and ``n(g)``."""
    f = wiener_hopf_factor(g)
    if f.nu < 0 or (f.nu == 0 and f.n < 0):
        return frozenset({"right"})
    if f.nu > 0 or f.n > 0:
        return frozenset({"left"})
    return frozenset({"left", "right"})


def wh_one_sided_inverse(g: Symbol, disc, side: str | None = None) -> InverseRecipe:
    """One-sided inverse of ``W(g)`` assembled from the factorization of ``g``.

    ``side`` ("left", "right" or None) asks for a particular side and raises
    ``PreconditionError`` when that side is not available.
    """
    f = wiener_hopf_factor(g)
    nu, n = f.nu, f.n
    Wp = build_W(inv(f.g_plus), disc)
    Wm = build_W(inv(f.g_minus), disc)
    parts = {}
    if nu > 0 and n >= 0:
        kind, fid = "left", "Eq21"
        op = compose(Wp, op_V(-n, disc), op_U(-nu, disc), Wm)
    elif nu > 0:
        kind, fid = "left", "Eq22"
        middle = compose(op_U(-nu, disc), op_P(-n, disc), op_U(nu, disc))
        parts["middle"] = middle
        op = compose(Wp, solve_operator(identity(disc) - middle), op_U(-nu, disc),
                     op_V(-n, disc), Wm)
    elif nu < 0 and n <= 0:
        kind, fid = "right", "Eq23"
        op = compose(Wp, op_V(-n, disc), op_U(-nu, disc), Wm)
    elif nu < 0:
        kind, fid = "right", "Eq24"
        middle = compose(op_U(nu, disc), op_P(n, disc), op_U(-nu, disc))
        parts["middle"] = middle
        op = compose(Wp, op_V(-n, disc), op_U(-nu, disc),
                     solve_operator(identity(disc) - middle), Wm)
    else:
        fid = "Eq24a"
        kind = "right" if n < 0 else "left" if n > 0 else "two_sided"
        op = compose(Wp, op_V(-n, disc), Wm)
    if side is not None and kind not in (side, "two_sided"):
        raise PreconditionError(f"W(g) with nu={nu:g}, n={n} has no {side} inverse")
    op.recipe = f"{fid}[{kind}] {op.recipe}"
    return InverseRecipe(kind, fid, op, {"g": f}, parts)


def neumann_solve(middle: DiscreteOperator, Y, tol: float = 1e-10, max_terms: int = 500):
    """``sum_j middle^j Y`` truncated once the tail term drops below ``tol``.

    Returns ``(approximation, terms_used, last_term_norm)``.
    """
    Y = np.asarray(Y, dtype=complex)
    term = Y.copy()
    total = Y.copy()
    scale = max(np.linalg.norm(Y), 1e-300)
    for j in range(1, max_terms + 1):
        term = middle.matmat(term)
        total = total + term
        size = np.linalg.norm(term) / scale
        if size < tol:
            return total, j, size
    return total, max_terms, size


def _W(g, disc):
    return build_W(g, disc)


def _H(g, disc):
    return build_H(g, disc)


def whh_operator(pair: MatchingPair, disc) -> DiscreteOperator:
    """``W(a) + H(b)``."""
    op = _W(pair.a, disc) + _H(pair.b, disc)
    op.recipe = "W(a)+H(b)"
    return op


def _require(g: Symbol, side: str, name: str):
    if side not in invertibility_sides(g):
        raise PreconditionError(f"W({name}) is not {side}-invertible")


def whh_right_inverse(pair: MatchingPair, disc) -> InverseRecipe:
    """``B = (I - H(c~)) A + H(a^-1) W_r^-1(d)``, ``A = W_r^-1(c) W(a~^-1) W_r^-1(d)``."""
    _require(pair.c, "right", "c")
    _require(pair.d, "right", "d")
    rc = wh_one_sided_inverse(pair.c, disc, "right")
    rd = wh_one_sided_inverse(pair.d, disc, "right")
    a_inv = inv(pair.a)
    A = compose(rc.operator, _W(reflect(a_inv), disc), rd.operator)
    B = compose(identity(disc) - _H(reflect(pair.c), disc), A) + \
        compose(_H(a_inv, disc), rd.operator)
    B.recipe = "EqRI"
    return InverseRecipe("right", "EqRI", B, {"c": rc.factors["g"], "d": rd.factors["g"]},
                         {"A": A, "Wr_c": rc.operator, "Wr_d": rd.operator})


def whh_left_inverse(pair: MatchingPair, disc) -> InverseRecipe:
    """``C (I - H(d~)) + W_l^-1(c) H(a~^-1)``, ``C = W_l^-1(c) W(a~^-1) W_l^-1(d)``."""
    _require(pair.c, "left", "c")
    _require(pair.d, "left", "d")
    lc = wh_one_sided_inverse(pair.c, disc, "left")
    ld = wh_one_sided_inverse(pair.d, disc, "left")
    a_inv_r = reflect(inv(pair.a))
    C = compose(lc.operator, _W(a_inv_r, disc), ld.operator)
    L = compose(C, identity(disc) - _H(reflect(pair.d), disc)) + \
        compose(lc.operator, _H(a_inv_r, disc))
    L.recipe = "EqLI"
    return InverseRecipe("left", "EqLI", L, {"c": lc.factors["g"], "d": ld.factors["g"]},
                         {"C": C, "Wl_c": lc.operator, "Wl_d": ld.operator})


def whh_two_sided_inverse(pair: MatchingPair, disc) -> InverseRecipe:
    """``(I - H(c~)) W^-1(c) W(a~^-1) W^-1(d) + H(a^-1) W^-1(d)``."""
    for g, name in ((pair.c, "c"), (pair.d, "d")):
        if invertibility_sides(g) != {"left", "right"}:
            raise PreconditionError(f"W({name}) is not invertible")
    ic = wh_one_sided_inverse(pair.c, disc)
    id_ = wh_one_sided_inverse(pair.d, disc)
    a_inv = inv(pair.a)
    op = compose(identity(disc) - _H(reflect(pair.c), disc), ic.operator,
                 _W(reflect(a_inv), disc), id_.operator) + \
        compose(_H(a_inv, disc), id_.operator)
    op.recipe = "EqN5"
    return InverseRecipe("two_sided", "EqN5", op, {"c": ic.factors["g"], "d": id_.factors["g"]})


def _wh_inverse(g: Symbol, disc) -> DiscreteOperator:
    if invertibility_sides(g) != {"left", "right"}:
        raise PreconditionError("W(g) is not invertible")
    return wh_one_sided_inverse(g, disc).operator


# closed forms for special matching pairs


def exponential_right_inverse(nu1: float, nu2: float, disc) -> DiscreteOperator:
    """Right inverse of ``W(e^{i nu1 t}) + H(e^{i nu2 t})`` for ``nu1 <= -|nu2|``.

    ``W(e^{-i(nu1-nu2)t}) W(e^{-i nu2 t}) + H(e^{-i nu1 t}) W(e^{-i(nu1+nu2)t})``.
    For ``nu2 <= 0`` the first product is ``W(e^{-i nu1 t})`` and the second
    vanishes.
    """
    if nu1 > -abs(nu2):
        raise PreconditionError("closed form needs nu1 <= -|nu2|")
    e = Symbol.exponential
    return compose(_W(e(nu2 - nu1), disc), _W(e(-nu2), disc)) + \
        compose(_H(e(-nu1), disc), _W(e(-(nu1 + nu2)), disc))


def equal_symbols_inverse(a: Symbol, disc) -> DiscreteOperator:
    """``(W(a) + H(a))^-1 = (W(a~^-1) + H(a^-1)) W^-1(a a~^-1)``."""
    a_inv = inv(a)
    return compose(_W(reflect(a_inv), disc) + _H(a_inv, disc),
                   _wh_inverse(a * reflect(a_inv), disc))


def reflected_symbols_inverse(a: Symbol, disc) -> DiscreteOperator:
    """``(W(a) + H(a~))^-1 = (I - H(a~ a^-1)) W^-1(a a~^-1) W(a~^-1) + H(a^-1)``."""
    a_inv = inv(a)
    c = a * reflect(a_inv)
    return compose(identity(disc) - _H(reflect(a) * a_inv, disc), _wh_inverse(c, disc),
                   _W(reflect(a_inv), disc)) + _H(a_inv, disc)


def identity_plus_hankel_inverse(b: Symbol, disc) -> DiscreteOperator:
    """``(I + H(b))^-1 = (I - H(b)) W^-1(b~) W^-1(b)`` for a matching ``b``."""
    return compose(identity(disc) - _H(b, disc), _wh_inverse(reflect(b), disc),
                   _wh_inverse(b, disc))


# generalized inverse


def build_block_symbol(pair: MatchingPair):
    """2x2 symbol ``[[a - b b~ a~^-1, b a~^-1], [-b~ a~^-1, a~^-1]]``."""
    ar_inv = inv(reflect(pair.a))
    br = reflect(pair.b)
    return [[pair.a - pair.b * br * ar_inv, pair.b * ar_inv],
            [-(br * ar_inv), ar_inv]]


def generalized_case(pair: MatchingPair) -> str:
    """Which operand triple applies: ``"Eq15"``, ``"Eq16"`` or ``"Eq17"``.

    ``Eq17`` takes a right inverse of ``W(c)`` and a left inverse of ``W(d)``.
    With ``W(c)`` only left- and ``W(d)`` only right-invertible the block
    operator has no generalized inverse of the required shape and
    ``PreconditionError`` is raised.
    """
    sc, sd = invertibility_sides(pair.c), invertibility_sides(pair.d)
    if "right" in sc and "right" in sd:
        return "Eq15"
    if "left" in sc and "left" in sd:
        return "Eq16"
    if "right" in sc and "left" in sd:
        return "Eq17"
    raise PreconditionError("W(c) is only left- and W(d) only right-invertible: "
                            "no generalized inverse of block form")


_SIDES = {"Eq15": ("right", "right"), "Eq16": ("left", "left"), "Eq17": ("right", "left")}


def whh_generalized_inverse(pair: MatchingPair, disc, case: str | None = None) -> InverseRecipe:
    """Generalized inverse ``G`` of ``W(a) + H(b)`` with ``(W+H) G (W+H) = W+H``.

    With ``A = M W(a~^-1) D``, ``B = -M`` for one-sided inverses ``M`` of
    ``W(c)`` and ``D`` of ``W(d)``::

        G = 1/2 W(a^-1) + 1/2 [(I - H(c~))(A(I - H(d)) - B H(a~^-1))
                               + H(a^-1) D (I - H(d))]

    The two bracketed rows are the factors that turn ``W(a) + H(b)`` into the
    block operator ``[[0, W(d)], [-W(c), W(a~^-1)]]``.
    """
    case = case or generalized_case(pair)
    side_c, side_d = _SIDES[case]
    _require(pair.c, side_c, "c")
    _require(pair.d, side_d, "d")
    rc = wh_one_sided_inverse(pair.c, disc, side_c)
    rd = wh_one_sided_inverse(pair.d, disc, side_d)
    a_inv = inv(pair.a)
    A = compose(rc.operator, _W(reflect(a_inv), disc), rd.operator)
    Bop = -rc.operator
    D = rd.operator
    I = identity(disc)
    I_Hd = I - _H(pair.d, disc)
    inner = compose(A, I_Hd) - compose(Bop, _H(reflect(a_inv), disc))
    body = compose(I - _H(reflect(pair.c), disc), inner) + compose(_H(a_inv, disc), D, I_Hd)
    G = 0.5 * _W(a_inv, disc) + 0.5 * body
    G.recipe = f"Eq6/{case}"
    return InverseRecipe("generalized", "Eq6", G, {"c": rc.factors["g"], "d": rd.factors["g"]},
                         {"A": A, "B": Bop, "D": D, "case": case})


# kernels


@dataclass
class KernelBasis:
    vectors: list
    plus_dim: int
    minus_dim: int
    construction: str
    plus: list = field(default_factory=list)
    minus: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def matrix(self) -> np.ndarray:
        if not self.vectors:
            return np.zeros((0, 0), complex)
        return np.column_stack(self.vectors)


def projection_dims(n: int, sigma: int):
    """``(dim im P+, dim im P-)`` for a matching function with ``nu = 0``, ``n < 0``."""
    if n >= 0:
        return 0, 0
    if n % 2 == 0:
        m = -n // 2
        return m, m
    m = (-n - 1) // 2
    return m + (1 - sigma) // 2, m + (1 + sigma) // 2


def _psi(j: int, disc) -> np.ndarray:
    if isinstance(disc, Grid):
        return laguerre_functions(disc.nodes, j + 1)[:, j].astype(complex)
    e = np.zeros(disc.size, complex)
    e[j] = 1.0
    return e


def kernel_basis(g: Symbol, disc) -> KernelBasis:
    """Bases of ``im P+_g`` and ``im P-_g`` inside ``ker W(g)`` (``nu = 0``, ``n < 0``)."""
    f = matching_factor(g)
    if f.nu != 0 or f.n >= 0:
        raise PreconditionError("kernel basis needs nu(g) = 0 and n(g) < 0")
    s, n = f.sigma, f.n
    Wp = build_W(inv(f.g_plus), disc)
    combos = {1: [], -1: []}
    if n % 2 == 0:
        m = -n // 2
        construction = "even"
        for sign in (1, -1):
            for k in range(m):
                combos[sign].append(_psi(m - k - 1, disc) - sign * s * _psi(m + k, disc))
    else:
        m = (-n - 1) // 2
        construction = "odd"
        for sign in (1, -1):
            for k in range(m + 1):
                v = _psi(m + k, disc) - sign * s * _psi(m - k, disc)
                if k == 0 and sign * s == 1:
                    continue  # the zero element
                combos[sign].append(v)
    plus = [Wp.matmat(v) for v in combos[1]]
    minus = [Wp.matmat(v) for v in combos[-1]]
    return KernelBasis(plus + minus, len(plus), len(minus), construction, plus, minus)


def phi_plus(pair: MatchingPair, disc) -> DiscreteOperator:
    """``(1/2)(X - H(c~) X) + (1/2) H(a^-1)`` with ``X = W_r^-1(c) W(a~^-1)``."""
    _require(pair.c, "right", "c")
    rc = wh_one_sided_inverse(pair.c, disc, "right")
    a_inv = inv(pair.a)
    X = compose(rc.operator, _W(reflect(a_inv), disc))
    op = 0.5 * (X - compose(_H(reflect(pair.c), disc), X)) + 0.5 * _H(a_inv, disc)
    op.recipe = "phi+"
    return op


def _finite_kernel_part(g: Symbol, name: str):
    f = wiener_hopf_factor(g)
    if f.nu < 0:
        raise PreconditionError(f"ker W({name}) is infinite-dimensional")
    return f.nu == 0 and f.n < 0


def kernel_of_whh(pair: MatchingPair, disc) -> KernelBasis:
    """Basis of ``ker(W(a) + H(b))``: ``phi+(im P+_d)`` plus ``im P-_c``."""
    _require(pair.c, "right", "c")
    plus, minus = [], []
    if _finite_kernel_part(pair.d, "d"):
        basis_d = kernel_basis(pair.d, disc)
        if basis_d.plus:
            phi = phi_plus(pair, disc)
            plus = [phi.matmat(v) for v in basis_d.plus]
    if _finite_kernel_part(pair.c, "c"):
        minus = kernel_basis(pair.c, disc).minus
    return KernelBasis(plus + minus, len(plus), len(minus), "phi+(P+_d) + P-_c", plus, minus)


def cokernel_of_whh(pair: MatchingPair, disc) -> KernelBasis:
    """Kernel of the adjoint operator ``W(conj a) + H(conj b~)``.

    Empty when the right inverse exists (``W(c)``, ``W(d)`` right-invertible).
    """
    if "right" in invertibility_sides(pair.c) and "right" in invertibility_sides(pair.d):
        return KernelBasis([], 0, 0, "right-invertible")
    return kernel_of_whh(adjoint_pair(pair), disc)
