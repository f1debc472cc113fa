"""Residual checks, SVD rank analysis, identity suites and a dense-oracle solver."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .classify import classify
from .discretization import Grid, LaguerreBasis, laguerre_functions
from .errors import BackendMismatchError, PreconditionError, RankAmbiguousError
from .inverses import (
    kernel_of_whh,
    whh_generalized_inverse,
    whh_left_inverse,
    whh_operator,
    whh_right_inverse,
    whh_two_sided_inverse,
)
from .operators import DiscreteOperator, build_H, build_W
from .symbols import MatchingPair, Symbol, adjoint_pair, reflect

NULL_TOL = 1e-8
MIN_GAP = 1e4


# test vectors


@dataclass
class TestVectorSet:
    """Deterministic smooth decaying test functions.

    Even entries are Gaussian bumps, odd entries mixtures of the first
    eight Laguerre functions, each with a random complex phase.
    """

    seed: int = 0
    count: int = 20
    functions: list = field(init=False, repr=False)

    __test__ = False  # not a pytest class

    def __post_init__(self):
        rng = np.random.default_rng(self.seed)
        fns = []
        for k in range(self.count):
            if k % 2 == 0:
                c, w = rng.uniform(0.5, 6.0), rng.uniform(0.8, 2.0)
                phase = np.exp(2j * np.pi * rng.random())
                fns.append(lambda t, c=c, w=w, p=phase: p * np.exp(-((t - c) / w) ** 2))
            else:
                coef = rng.standard_normal(8) + 1j * rng.standard_normal(8)
                fns.append(lambda t, coef=coef: laguerre_functions(t, coef.size) @ coef)
        self.functions = fns

    def vectors(self, disc) -> np.ndarray:
        """Columns discretized on ``disc`` (nodal values or Laguerre coefficients)."""
        return np.column_stack([disc.discretize(f) for f in self.functions])


def random_roots(rng, count: int, margin: float = 0.5, spread: float = 2.0) -> np.ndarray:
    """``count`` points with ``margin <= |Im| <= margin + spread`` and random half-plane."""
    im = rng.uniform(margin, margin + spread, count) * rng.choice([-1.0, 1.0], count)
    return rng.uniform(-spread, spread, count) + 1j * im


def random_symbol(rng, degree: int | None = None, margin: float = 0.5,
                  deltas=(0.0,), zeta_powers=(0,)) -> Symbol:
    """Random invertible exponential-rational symbol with roots at least ``margin`` off the axis.

    Zeros and poles come in equal numbers, so the rational part has a
    finite non-zero limit at infinity.
    """
    k = int(rng.integers(1, 3)) if degree is None else degree
    gain = complex(rng.uniform(0.5, 2.0) * np.exp(2j * np.pi * rng.random()))
    g = Symbol.from_zpk(random_roots(rng, k, margin), random_roots(rng, k, margin), gain,
                        float(rng.choice(deltas)))
    n = int(rng.choice(zeta_powers))
    return g * Symbol.zeta(n) if n else g


def _norms(disc, X):
    return np.atleast_1d(disc.norm(X))


def residual(op: DiscreteOperator, expected, vectors, disc=None) -> float:
    """Max relative residual ``|op v - expected v| / |v|`` over the columns.

    ``expected`` is ``"identity"`` or another operator on the same backend.
    """
    V = np.asarray(vectors, dtype=complex)
    if V.ndim == 1:
        V = V[:, None]
    if isinstance(expected, DiscreteOperator):
        if expected.backend != op.backend or expected.size != op.size:
            raise BackendMismatchError("operators live on different discretizations")
        target = expected.matmat(V)
    elif expected == "identity":
        target = V
    else:
        raise ValueError("expected must be 'identity' or a DiscreteOperator")
    diff = op.matmat(V) - target
    if disc is None:
        num, den = np.linalg.norm(diff, axis=0), np.linalg.norm(V, axis=0)
    else:
        num, den = _norms(disc, diff), _norms(disc, V)
    return float(np.max(num / den))


# rank analysis


def rank_gap(op, tol: float = NULL_TOL, min_gap: float = MIN_GAP, strict: bool = True):
    """``(nullity, gap_ratio)`` of a matrix or operator from its singular values.

    Singular values below ``tol * s_max`` are null; the gap ratio is the
    smallest non-null singular value over the largest null one (``inf``
    without a null space).  For a tall matrix the nullity counts columns.
    """
    M = op.to_dense() if isinstance(op, DiscreteOperator) else np.asarray(op)
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return M.shape[1], np.inf
    deficit = max(M.shape[1] - s.size, 0)
    null = s < tol * s[0]
    nullity = int(np.sum(null)) + deficit
    if not null.any():
        gap = np.inf
        below = s[-1] / s[0]
        if strict and below < tol * min_gap:
            raise RankAmbiguousError(f"smallest singular value ratio {below:.2e} is near the threshold")
        return nullity, gap
    live = s[~null]
    gap = float(live[-1] / max(s[null][0], 1e-300)) if live.size else np.inf
    if strict and gap < min_gap:
        raise RankAmbiguousError(f"singular value gap {gap:.2e} below {min_gap:.0e}")
    return nullity, gap


def truncated_section(op_builder, modes: int) -> np.ndarray:
    """Tall ``2 modes x modes`` Galerkin section in the Laguerre basis.

    Square sections of Toeplitz-like operators pick up spurious small
    singular values from the truncation corner; keeping twice as many rows
    removes them.
    """
    big = LaguerreBasis(2 * modes)
    return op_builder(big).to_dense()[:, :modes]


def numerical_dims(pair: MatchingPair, modes: int = 200, tol: float = NULL_TOL,
                   strict: bool = True) -> dict:
    """SVD nullities of truncated ``W(a)+H(b)`` and of its adjoint operator."""
    ker, gap_k = rank_gap(truncated_section(lambda d: whh_operator(pair, d), modes), tol,
                          strict=strict)
    adj = adjoint_pair(pair)
    coker, gap_c = rank_gap(truncated_section(lambda d: whh_operator(adj, d), modes), tol,
                            strict=strict)
    return {"ker": ker, "coker": coker, "gap_ker": gap_k, "gap_coker": gap_c}


# identity suite


def identity_suite(a: Symbol, b: Symbol, disc, vectors) -> dict:
    """Residuals of ``W(ab) = W(a)W(b) + H(a)H(b~)`` and ``H(ab) = W(a)H(b) + H(a)W(b~)``."""
    V = np.asarray(vectors, dtype=complex)
    Wa, Wb, Ha, Hb = build_W(a, disc), build_W(b, disc), build_H(a, disc), build_H(b, disc)
    br = reflect(b)
    lhs_w = build_W(a * b, disc).matmat(V)
    rhs_w = Wa.matmat(Wb.matmat(V)) + Ha.matmat(build_H(br, disc).matmat(V))
    lhs_h = build_H(a * b, disc).matmat(V)
    rhs_h = Wa.matmat(Hb.matmat(V)) + Ha.matmat(build_W(br, disc).matmat(V))
    den = _norms(disc, V)
    return {"W_identity": float(np.max(_norms(disc, lhs_w - rhs_w) / den)),
            "H_identity": float(np.max(_norms(disc, lhs_h - rhs_h) / den))}


# solver


_RECIPES = {
    "two_sided": whh_two_sided_inverse,
    "right": whh_right_inverse,
    "left": whh_left_inverse,
    "generalized": whh_generalized_inverse,
}


def choose_recipe(pair: MatchingPair, disc, kind: str = "auto"):
    """Inverse recipe for ``kind`` or, with ``"auto"``, the strongest available one."""
    if kind != "auto":
        if kind not in _RECIPES:
            raise ValueError(f"unknown inverse kind {kind!r}")
        return _RECIPES[kind](pair, disc)
    for name in ("two_sided", "right", "left", "generalized"):
        try:
            return _RECIPES[name](pair, disc)
        except PreconditionError:
            continue
    raise PreconditionError("no inverse formula applies to this pair")


@dataclass
class SolveReport:
    kind: str
    formula_id: str
    verdict: str
    residual: float
    oracle_residual: float
    oracle_difference: float | None
    in_range: bool
    kernel_dim: int | str | None
    kernel_components: list = field(default_factory=list)

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _rel(disc, v, ref):
    n = disc.norm(ref)
    return float(disc.norm(v) / n) if n > 0 else float(disc.norm(v))


def _dense_oracle(A: DiscreteOperator, f, disc):
    """Least-squares solution of the assembled matrix in the weighted norm."""
    if isinstance(disc, Grid):
        sw = np.sqrt(disc.weights)
        M = sw[:, None] * A.to_dense() / sw[None, :]
        y, *_ = np.linalg.lstsq(M, sw * f, rcond=None)
        return y / sw
    y, *_ = np.linalg.lstsq(A.to_dense(), f, rcond=None)
    return y


def solve(pair: MatchingPair, f, disc, kind: str = "auto", oracle: bool = True,
          tol: float = 1e-6):
    """Solve ``(W(a)+H(b)) x = f`` with an explicit inverse.

    ``f`` is a callable of ``t`` or an already discretized vector.  The
    report compares with a dense least-squares solve of the assembled
    matrix.  The solution difference is recorded only for two-sided
    inverses; otherwise the solutions may differ by kernel elements, whose
    coefficients in ``x`` are listed instead.  For left and generalized
    inverses ``residual`` is the distance of ``f`` from the computed range
    and ``in_range`` says whether it is below ``tol``.
    """
    fvec = disc.discretize(f) if callable(f) else np.asarray(f, dtype=complex)
    recipe = choose_recipe(pair, disc, kind)
    A = whh_operator(pair, disc)
    x = recipe.apply(fvec)
    res = _rel(disc, A.matmat(x) - fvec, fvec)
    oracle_res, diff = float("nan"), None
    if oracle:
        y = _dense_oracle(A, fvec, disc)
        oracle_res = _rel(disc, A.matmat(y) - fvec, fvec)
        if recipe.kind == "two_sided":
            diff = _rel(disc, x - y, y)
    kdim, comps = 0, []
    if recipe.kind != "two_sided":
        try:
            basis = kernel_of_whh(pair, disc)
            kdim = basis.dim
            comps = [abs(disc.inner(x, v)) / max(disc.norm(v), 1e-300) for v in basis.vectors]
        except PreconditionError as err:
            kdim = "infinite" if "infinite" in str(err) else None
    report = SolveReport(recipe.kind, recipe.formula_id, classify(pair).verdict, res, oracle_res,
                         diff, bool(res <= tol), kdim, [float(c) for c in comps])
    return x, report


# backends


def cross_backend(g: Symbol, f, T: float = 40.0, N: int = 2560, modes: int = 200,
                  which: str = "W") -> float:
    """Relative discrepancy of ``W(g) f`` (or ``H(g) f``) between grid and Laguerre."""
    grid, lag = Grid(T, N), LaguerreBasis(modes)
    build = build_W if which == "W" else build_H
    on_lag = build(g, lag)  # raises for symbols with an exponential factor
    fg = grid.discretize(f)
    out_grid = build(g, grid).matmat(fg)
    out_lag = lag.synthesize(on_lag.matmat(lag.discretize(f)), grid.nodes)
    return float(grid.norm(out_grid - out_lag) / grid.norm(fg))


# reports


@dataclass
class SuiteRow:
    name: str
    value: float
    tol: float
    passed: bool
    detail: str = ""


@dataclass
class SuiteReport:
    name: str
    rows: list = field(default_factory=list)

    def add(self, name, value, tol, passed=None, detail=""):
        ok = bool(value <= tol) if passed is None else bool(passed)
        self.rows.append(SuiteRow(name, float(value), float(tol), ok, detail))
        return ok

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def to_json(self) -> dict:
        return {"suite": self.name, "passed": self.passed,
                "rows": [r.__dict__ for r in self.rows]}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["name", "value", "tol", "passed", "detail"])
        for r in self.rows:
            w.writerow([r.name, f"{r.value:.6e}", f"{r.tol:.1e}", r.passed, r.detail])
        return buf.getvalue()

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)
