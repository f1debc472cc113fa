"""The ``paper-examples`` verification suite: nine end-to-end checks.

Each check returns a :class:`CheckResult` holding a residual table.  The
suite is shared by ``winhopf verify --suite paper-examples`` and the test
suite.  Every check compares a formula against an independent path: a
dense solve, a second formula, a numerical winding integral or an SVD.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .classify import classify
from .discretization import Grid, LaguerreBasis
from .errors import WinHopfError
from .factorization import verify_factorization, wiener_hopf_factor
from .harness import (
    SuiteReport,
    TestVectorSet,
    cross_backend,
    identity_suite,
    random_symbol,
    rank_gap,
    residual,
    truncated_section,
)
from .inverses import (
    equal_symbols_inverse,
    exponential_right_inverse,
    identity_plus_hankel_inverse,
    neumann_solve,
    projection_dims,
    reflected_symbols_inverse,
    wh_one_sided_inverse,
    whh_generalized_inverse,
    whh_operator,
    whh_right_inverse,
)
from .operators import build_H, build_W, compose, identity, solve_operator
from .symbols import Symbol, adjoint_pair, make_matching_pair, reflect

GRID_TOL = 1e-5
EXACT_TOL = 1e-8


@dataclass
class CheckResult:
    number: int
    title: str
    report: SuiteReport
    seconds: float = 0.0
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.report.passed

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        failed = [r.name for r in self.report.rows if not r.passed]
        tail = f" (failing: {', '.join(failed)})" if failed else ""
        return f"criterion {self.number} [{status}] {self.title}{tail} [{self.seconds:.1f}s]"

    def to_json(self) -> dict:
        out = self.report.to_json()
        out.update(number=self.number, title=self.title, seconds=self.seconds, notes=self.notes)
        return out


def _vectors(disc, seed=0, count=20):
    return TestVectorSet(seed, count).vectors(disc)


# 1. product identities


def check_product_identities(seed: int = 0, pairs: int = 25, T: float = 40.0, N: int = 2560,
                             tol: float = GRID_TOL) -> SuiteReport:
    """Both product identities on random exponential-rational pairs, then at doubled ``(T, N)``.

    The doubled run must not be worse, up to a round-off floor of ``1e-12``.
    """
    rng = np.random.default_rng(seed)
    deltas = (-1.0, -0.5, 0.0, 0.5, 1.0)
    syms = [(random_symbol(rng, deltas=deltas), random_symbol(rng, deltas=deltas))
            for _ in range(pairs)]
    rep = SuiteReport("product identities")
    coarse, fine = Grid(T, N), Grid(2 * T, 2 * N)
    tv = TestVectorSet(seed, 10)
    Vc, Vf = tv.vectors(coarse), tv.vectors(fine)
    for k, (a, b) in enumerate(syms):
        rc = identity_suite(a, b, coarse, Vc)
        rf = identity_suite(a, b, fine, Vf)
        for key in ("W_identity", "H_identity"):
            rep.add(f"pair{k}/{key}", rc[key], tol)
            shrink = rf[key] <= max(rc[key], 1e-12)
            rep.add(f"pair{k}/{key}/doubled", rf[key], max(rc[key], 1e-12), shrink)
    return rep


# 2. factorization


def numerical_winding(g: Symbol, count: int = 20001) -> float:
    """Winding of the rational part of ``g`` along the real line, by phase unwrapping.

    The real line is mapped to an open interval of angles and the curve is
    closed through the common value at infinity.
    """
    theta = np.linspace(-np.pi / 2, np.pi / 2, count)[1:-1]
    vals = g.rat(np.tan(theta))
    phase = np.unwrap(np.angle(vals))
    closing = np.angle(vals[0] / vals[-1])
    return float((phase[-1] - phase[0] + closing) / (2 * np.pi))


def check_factorization(seed: int = 0, count: int = 50, tol: float = 1e-9) -> SuiteReport:
    rng = np.random.default_rng(seed)
    rep = SuiteReport("factorization")
    for k in range(count):
        g = random_symbol(rng, degree=int(rng.integers(1, 4)), deltas=(-1.5, 0.0, 2.0),
                          zeta_powers=(-2, -1, 0, 1, 2))
        f = wiener_hopf_factor(g)
        fr = verify_factorization(f, g)
        rep.add(f"sym{k}/reconstruction", fr.max_rel_error, tol)
        rep.add(f"sym{k}/certificates", 0.0, 0.0, fr.ok)
        w = numerical_winding(g)
        rep.add(f"sym{k}/winding", abs(w - f.n), 1e-6, abs(w - f.n) < 1e-6,
                f"n={f.n}, integral={w:.6f}")
    return rep


# 3. one-sided inverses of W(g)


def one_sided_cases() -> dict:
    """One symbol for each inverse formula of ``W(g)``."""
    r = Symbol.from_zpk([-2j + 0.5], [-1j], 1.0) * Symbol.from_zpk([1.5j], [2j - 0.3], 1.0)
    z, e = Symbol.zeta, Symbol.exponential
    return {"Eq21": e(1.0) * z(1) * r, "Eq22": e(1.0) * z(-1) * r,
            "Eq23": e(-1.0) * z(-1) * r, "Eq24": e(-1.0) * z(1) * r,
            "Eq24a": z(-2) * r}


def check_one_sided_inverses(disc=None, tol: float = 1e-6, neumann_tol: float = 1e-8) -> SuiteReport:
    disc = disc or Grid()
    V = _vectors(disc)
    I = identity(disc)
    rep = SuiteReport("one-sided inverses")
    for fid, g in one_sided_cases().items():
        rec = wh_one_sided_inverse(g, disc)
        rep.add(f"{fid}/formula", 0.0, 0.0, rec.formula_id == fid, rec.formula_id)
        W = build_W(g, disc)
        prod = compose(rec.operator, W) if rec.kind == "left" else compose(W, rec.operator)
        rep.add(f"{fid}/{rec.kind}_identity", residual(prod, I, V, disc), tol)
        if "middle" in rec.parts:
            middle = rec.parts["middle"]
            approx, terms, _ = neumann_solve(middle, V, tol=1e-13)
            dense = solve_operator(I - middle).matmat(V)
            diff = float(np.max(disc.norm(approx - dense) / disc.norm(dense)))
            rep.add(f"{fid}/neumann_vs_dense", diff, neumann_tol, detail=f"{terms} terms")
    return rep


# 4. exponential example


def shortened_exponential_inverse(nu1: float, nu2: float, disc):
    """The shortened closed form ``H(e^{-i nu1 t}) W(e^{-i(nu1+nu2)t}) + W(e^{-i nu1 t})``."""
    e = Symbol.exponential
    return compose(build_H(e(-nu1), disc), build_W(e(-(nu1 + nu2)), disc)) + build_W(e(-nu1), disc)


def check_exponential_example(nu1: float = -2.0, nu2: float = 1.0, disc=None,
                              tol: float = 1e-8, id_tol: float = 1e-6) -> SuiteReport:
    """Assembled right inverse vs the shortened closed form, plus ``(W+H) B = I``.

    The shortened form differs from the assembled one when ``nu2 > 0``; the
    re-derived closed form is reported alongside and is not part of the
    verdict.
    """
    disc = disc or Grid()
    pair = make_matching_pair(Symbol.exponential(nu1), Symbol.exponential(nu2))
    V = _vectors(disc)
    B = whh_right_inverse(pair, disc).operator
    short = shortened_exponential_inverse(nu1, nu2, disc)
    rep = SuiteReport("exponential example")
    rep.add("assembled_vs_shortened", residual(B, short, V, disc), tol)
    rep.add("right_identity", residual(compose(whh_operator(pair, disc), B), identity(disc), V, disc),
            id_tol)
    derived = residual(B, exponential_right_inverse(nu1, nu2, disc), V, disc)
    rep.add("assembled_vs_rederived [info]", derived, tol, True,
            f"re-derived closed form agrees to {derived:.1e}")
    return rep


# 5. closed-form two-sided inverses


EXAMPLE_A = Symbol.from_zpk([-2j], [-1j], 1.0)
EXAMPLE_B = Symbol.from_zpk([1j, -2j], [-1j, 2j], 1.0)


def check_closed_forms(disc=None, tol: float = 1e-6) -> SuiteReport:
    disc = disc or Grid()
    V = _vectors(disc)
    I = identity(disc)
    a, b = EXAMPLE_A, EXAMPLE_B
    one = Symbol.constant(1.0)
    cases = {
        "equal_symbols": (make_matching_pair(a, a), equal_symbols_inverse(a, disc)),
        "reflected_symbols": (make_matching_pair(a, reflect(a)), reflected_symbols_inverse(a, disc)),
        "identity_plus_hankel": (make_matching_pair(one, b), identity_plus_hankel_inverse(b, disc)),
    }
    rep = SuiteReport("closed-form inverses")
    for name, (pair, X) in cases.items():
        A = whh_operator(pair, disc)
        rep.add(f"{name}/AX=I", residual(compose(A, X), I, V, disc), tol)
        rep.add(f"{name}/XA=I", residual(compose(X, A), I, V, disc), tol)
    return rep


# 6. kernel dimensions


def check_kernel_dimensions(modes: int = 120, min_gap: float = 1e4) -> SuiteReport:
    """SVD nullity for ``a = b = zeta^-m`` and the ``P+/P-`` split for ``n = -1``."""
    rep = SuiteReport("kernel dimensions")
    for m in (1, 2, 3):
        z = Symbol.zeta(-m)
        pair = make_matching_pair(z, z)
        nullity, gap = rank_gap(truncated_section(lambda d: whh_operator(pair, d), modes),
                                strict=False)
        rep.add(f"zeta^-{m}/nullity", abs(nullity - m), 0, nullity == m, f"nullity={nullity}")
        rep.add(f"zeta^-{m}/gap", gap, min_gap, gap >= min_gap, f"gap={gap:.2e}")
    # numerical kernel of W(g) and the sign of H(g~) on it
    for sign in (1.0, -1.0):
        g = Symbol.zeta(-1) * Symbol.constant(sign)
        M = truncated_section(lambda d: build_W(g, d), modes)
        _, s, vh = np.linalg.svd(M)
        v = vh[-1].conj()
        Hv = build_H(reflect(g), LaguerreBasis(modes)).matmat(v)
        eig = float(np.real(np.vdot(v, Hv)))
        sig = int(round(np.real(-g(0.0))))
        expected = projection_dims(-1, sig)
        found = (1, 0) if eig > 0 else (0, 1)
        rep.add(f"n=-1,sigma={sig:+d}/split", abs(abs(eig) - 1), 1e-6, found == expected,
                f"P+/P- = {found[0]}/{found[1]}, <H v, v> = {eig:+.6f}")
    return rep


# 7. generalized inverse


def check_generalized_inverse(disc=None, tol: float = GRID_TOL) -> SuiteReport:
    """``A G A = A`` in the mixed case, W(c) right- and W(d) left-invertible."""
    disc = disc or Grid()
    pair = make_matching_pair(Symbol.constant(1.0), Symbol.zeta(2))
    rec = whh_generalized_inverse(pair, disc)
    A = whh_operator(pair, disc)
    V = _vectors(disc)
    rep = SuiteReport("generalized inverse")
    rep.add("case", 0.0, 0.0, rec.parts["case"] == "Eq17", rec.parts["case"])
    rep.add("AGA=A", residual(compose(A, rec.operator, A), A, V, disc), tol)
    return rep


# 8. classification coherence


_DUAL = {"left_only": "right_only", "right_only": "left_only"}


def regression_corpus() -> list:
    """Thirty matching pairs built as ``(a, c^-1 a)`` from matching ``c``.

    The first twenty-four are rational, with indices covering every rule
    family; the rest carry exponential factors.
    """
    z, e = Symbol.zeta, Symbol.exponential
    h = Symbol.from_zpk([0.5 - 2j], [0.3 - 1j], 1.0)
    hh = h / reflect(h)  # matching, index zero
    r = Symbol.from_zpk([-2j], [-1j], 1.0)
    out = []
    for k in (-1, 0, 1):
        for n in (-2, -1, 0, 1):
            for s in (1.0, -1.0):
                a = z(k) * r
                c = z(n) * hh * Symbol.constant(s)
                out.append(make_matching_pair(a, a / c))
    for alpha, beta in ((-1.0, -1.0), (0.0, -1.0), (1.0, 0.5), (0.5, 1.0), (-0.5, 0.5), (1.0, 2.5)):
        a = e(alpha) * r
        c = e(beta) * hh
        out.append(make_matching_pair(a, a / c))
    return out


def check_classification(modes: int = 120) -> SuiteReport:
    rep = SuiteReport("classification coherence")
    for k, pair in enumerate(regression_corpus()):
        report = classify(pair)
        adj = classify(adjoint_pair(pair))
        dual = _DUAL.get(report.verdict, report.verdict)
        rep.add(f"pair{k}/adjoint_duality", 0.0, 0.0,
                adj.verdict == dual and adj.predicted_dims == report.predicted_dims[::-1],
                f"{report.verdict} vs adjoint {adj.verdict}")
        rep.add(f"pair{k}/sigma_match", 0.0, 0.0, pair.sigma_c == pair.sigma_d)
        rep.add(f"pair{k}/index_parity", 0.0, 0.0, (pair.n1 + pair.n2) % 2 == 0)
        if pair.a.delta or pair.b.delta:
            continue  # SVD of truncated shifts is not meaningful
        ker, coker = report.predicted_dims
        for label, want, p in (("ker", ker, pair), ("coker", coker, adjoint_pair(pair))):
            if not isinstance(want, int):
                continue
            got, gap = rank_gap(truncated_section(lambda d: whh_operator(p, d), modes),
                                strict=False)
            rep.add(f"pair{k}/{label}", abs(got - want), 0, got == want,
                    f"predicted {want}, SVD {got}, gap {gap:.1e}")
    return rep


# 9. backend agreement


def check_backends(seed: int = 0, symbols: int = 3, tol: float = 1e-4) -> SuiteReport:
    rng = np.random.default_rng(seed)
    rep = SuiteReport("backend agreement")
    fns = TestVectorSet(seed, 10).functions
    for k in range(symbols):
        g = random_symbol(rng, degree=2)
        for which in ("W", "H"):
            worst = max(cross_backend(g, f, which=which) for f in fns)
            rep.add(f"sym{k}/{which}", worst, tol)
    return rep


CHECKS = {
    1: ("product identities", check_product_identities),
    2: ("factorization", check_factorization),
    3: ("one-sided inverses of W(g)", check_one_sided_inverses),
    4: ("exponential example", check_exponential_example),
    5: ("closed-form two-sided inverses", check_closed_forms),
    6: ("kernel dimension law", check_kernel_dimensions),
    7: ("generalized inverse", check_generalized_inverse),
    8: ("classification coherence", check_classification),
    9: ("backend agreement", check_backends),
}


def run_check(number: int) -> CheckResult:
    title, fn = CHECKS[number]
    start = time.perf_counter()
    try:
        rep = fn()
    except WinHopfError as err:
        rep = SuiteReport(title)
        rep.add("error", np.inf, 0.0, False, str(err))
    return CheckResult(number, title, rep, time.perf_counter() - start)


def run_suite(numbers=None, jobs: int = 1) -> list:
    """Run the checks, in parallel processes when ``jobs > 1``."""
    numbers = sorted(numbers or CHECKS)
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(run_check, numbers))
    return [run_check(n) for n in numbers]
