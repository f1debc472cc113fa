import json

import numpy as np
import pytest

from winhopf import Symbol, TestVectorSet, make_matching_pair
from winhopf.errors import BackendMismatchError, BackendUnsupportedError, RankAmbiguousError
from winhopf.harness import (
    SuiteReport,
    choose_recipe,
    cross_backend,
    identity_suite,
    numerical_dims,
    random_symbol,
    rank_gap,
    residual,
    solve,
    truncated_section,
)
from winhopf.io import named_rhs
from winhopf.operators import build_W, compose, identity

z, e = Symbol.zeta, Symbol.exponential


# test vectors


def test_vectors_deterministic(grid):
    a = TestVectorSet(3, 6).vectors(grid)
    b = TestVectorSet(3, 6).vectors(grid)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, TestVectorSet(4, 6).vectors(grid))
    assert a.shape == (grid.size, 6)


def test_random_symbol_margin():
    rng = np.random.default_rng(1)
    for _ in range(10):
        g = random_symbol(rng, margin=0.5)
        roots = np.concatenate([g.rat.zeros, g.rat.poles])
        assert np.all(np.abs(roots.imag) >= 0.5)


# residuals


def test_residual_identity_and_wrong_side(grid, vecs):
    I = identity(grid)
    assert residual(I, "identity", vecs, grid) == 0.0
    V = build_W(z(1), grid)
    Vi = build_W(z(-1), grid)
    assert residual(compose(Vi, V), I, vecs, grid) < 1e-6
    assert residual(compose(V, Vi), I, vecs, grid) > 1e-2


def test_residual_backend_mismatch(grid, lag, lvecs):
    with pytest.raises(BackendMismatchError):
        residual(identity(lag), identity(grid), lvecs)


def test_identity_suite(grid, vecs):
    a = Symbol.from_zpk([-2j], [-1j], 1.0, 1.0)
    b = Symbol.from_zpk([1.5j], [2j], 1.0, -0.5)
    out = identity_suite(a, b, grid, vecs)
    assert set(out) == {"W_identity", "H_identity"}
    # quadrature error of the coarse fixture grid; the default grid reaches 1e-14
    assert max(out.values()) < 1e-8


# ranks


def test_rank_gap_identity():
    assert rank_gap(np.eye(20)) == (0, np.inf)


def test_rank_gap_shift():
    M = truncated_section(lambda d: build_W(z(-1), d), 60)
    nullity, gap = rank_gap(M)
    assert nullity == 1 and gap >= 1e4


def test_rank_gap_ambiguous():
    M = np.diag([1.0, 0.5, 1e-6, 1e-9])
    with pytest.raises(RankAmbiguousError):
        rank_gap(M, tol=1e-8)
    nullity, _ = rank_gap(M, tol=1e-8, strict=False)
    assert nullity == 1
    with pytest.raises(RankAmbiguousError):
        rank_gap(np.diag([1.0, 1e-5]), tol=1e-8)


def test_numerical_dims_kernel():
    # a = b = zeta^-2: c = 1, d = zeta^-4, kernel of dimension 2
    dims = numerical_dims(make_matching_pair(z(-2), z(-2)), modes=60)
    assert (dims["ker"], dims["coker"]) == (2, 0)


# recipes and solves


def test_choose_recipe_auto(grid):
    assert choose_recipe(make_matching_pair(z(-1), z(-1)), grid).formula_id == "EqRI"
    assert choose_recipe(make_matching_pair(e(-2.0), e(1.0)), grid).kind == "right"


def test_solve_two_sided_matches_oracle(grid):
    p = make_matching_pair(Symbol.from_zpk([2j], [1j]), Symbol.from_zpk([-2j], [-1j]))
    x, rep = solve(p, named_rhs("gauss:2,1"), grid)
    assert rep.kind == "two_sided"
    assert rep.residual < 1e-6
    assert rep.oracle_difference < 1e-6
    assert rep.kernel_dim == 0


def test_solve_right_reports_kernel(grid):
    p = make_matching_pair(z(-1), z(-1))
    x, rep = solve(p, named_rhs("gauss:3,1"), grid)
    assert rep.kind == "right"
    assert rep.residual < 1e-6 and rep.in_range
    assert rep.kernel_dim == 1 and len(rep.kernel_components) == 1
    assert rep.oracle_difference is None


def test_solve_zero_rhs(grid):
    x, rep = solve(make_matching_pair(z(-1), z(-1)), np.zeros(grid.size), grid, oracle=False)
    assert np.all(x == 0)
    assert rep.residual == 0.0


def test_solve_deterministic(grid):
    p = make_matching_pair(z(-1), z(-1))
    x1, r1 = solve(p, named_rhs("psi0"), grid, oracle=False)
    x2, r2 = solve(p, named_rhs("psi0"), grid, oracle=False)
    assert np.array_equal(x1, x2) and r1.residual == r2.residual


# backends


def test_cross_backend_constant():
    assert cross_backend(Symbol.constant(1.0), named_rhs("psi0"), N=1280, modes=60) < 1e-12


def test_cross_backend_rational():
    g = Symbol.from_zpk([-2j], [-1j])
    assert cross_backend(g, named_rhs("gauss:2,1"), N=1280, modes=120) < 1e-6


def test_cross_backend_exponential_unsupported():
    with pytest.raises(BackendUnsupportedError):
        cross_backend(e(1.0), named_rhs("psi0"), N=1280, modes=60)


# reports


def test_suite_report_formats():
    rep = SuiteReport("demo")
    assert rep.add("small", 1e-12, 1e-8)
    assert not rep.add("large", 1.0, 1e-8, detail="x")
    assert not rep.passed
    data = json.loads(rep.dumps())
    assert data["suite"] == "demo" and len(data["rows"]) == 2
    lines = rep.to_csv().splitlines()
    assert lines[0] == "name,value,tol,passed,detail" and len(lines) == 3
