import numpy as np
import pytest

from conftest import R
from winhopf import (
    Symbol,
    build_H,
    build_W,
    cokernel_of_whh,
    kernel_basis,
    kernel_of_whh,
    make_matching_pair,
    wh_one_sided_inverse,
    whh_generalized_inverse,
    whh_left_inverse,
    whh_operator,
    whh_right_inverse,
    whh_two_sided_inverse,
)
from winhopf.acceptance import EXAMPLE_A, EXAMPLE_B, one_sided_cases
from winhopf.errors import PreconditionError
from winhopf.harness import residual
from winhopf.inverses import (
    equal_symbols_inverse,
    exponential_right_inverse,
    generalized_case,
    identity_plus_hankel_inverse,
    invertibility_sides,
    neumann_solve,
    phi_plus,
    projection_dims,
    reflected_symbols_inverse,
)
from winhopf.operators import compose, identity, solve_operator
from winhopf.symbols import reflect

z, e, one = Symbol.zeta, Symbol.exponential, Symbol.constant(1.0)


def pair(a, b):
    return make_matching_pair(a, b)


# one-sided inverses of W(g)


@pytest.mark.parametrize("fid", ["Eq21", "Eq22", "Eq23", "Eq24", "Eq24a"])
def test_one_sided_inverse_cases(fid, grid, vecs):
    g = one_sided_cases()[fid]
    rec = wh_one_sided_inverse(g, grid)
    assert rec.formula_id == fid
    W = build_W(g, grid)
    good = compose(rec.operator, W) if rec.kind == "left" else compose(W, rec.operator)
    wrong = compose(W, rec.operator) if rec.kind == "left" else compose(rec.operator, W)
    I = identity(grid)
    assert residual(good, I, vecs, grid) < 1e-6
    # the other side fails: negative control
    assert residual(wrong, I, vecs, grid) > 1e-2


@pytest.mark.parametrize("fid", ["Eq22", "Eq24"])
def test_neumann_matches_dense(fid, grid, vecs):
    middle = wh_one_sided_inverse(one_sided_cases()[fid], grid).parts["middle"]
    approx, terms, last = neumann_solve(middle, vecs, tol=1e-13)
    dense = solve_operator(identity(grid) - middle).matmat(vecs)
    assert np.max(grid.norm(approx - dense) / grid.norm(dense)) < 1e-8
    assert last < 1e-13 and terms < 100


def test_sides_and_requests(lag):
    assert invertibility_sides(R) == {"left", "right"}
    assert invertibility_sides(z(-1) * R) == {"right"}
    assert invertibility_sides(e(0.5) * R) == {"left"}
    with pytest.raises(PreconditionError):
        wh_one_sided_inverse(z(2) * R, lag, side="right")
    assert wh_one_sided_inverse(R, lag).kind == "two_sided"


# W(a) + H(b)


def test_right_inverse_zeta(lag, lvecs):
    p = pair(z(-1), z(-1))
    rec = whh_right_inverse(p, lag)
    assert rec.formula_id == "EqRI"
    assert residual(compose(whh_operator(p, lag), rec.operator), identity(lag), lvecs, lag) < 1e-5


def test_left_inverse_zeta(lag, lvecs):
    p = pair(z(1), z(1))
    rec = whh_left_inverse(p, lag)
    assert rec.formula_id == "EqLI"
    assert residual(compose(rec.operator, whh_operator(p, lag)), identity(lag), lvecs, lag) < 1e-5


def test_left_inverse_exponential(grid, vecs):
    p = pair(e(2.0), e(-1.0))
    B = whh_left_inverse(p, grid).operator
    assert residual(compose(B, whh_operator(p, grid)), identity(grid), vecs, grid) < 1e-6


def test_two_sided_inverse(grid, vecs):
    p = pair(R, R)
    X = whh_two_sided_inverse(p, grid).operator
    A = whh_operator(p, grid)
    assert residual(compose(A, X), identity(grid), vecs, grid) < 1e-6
    assert residual(compose(X, A), identity(grid), vecs, grid) < 1e-6


def test_right_inverse_preconditions(lag):
    with pytest.raises(PreconditionError):
        whh_right_inverse(pair(z(1), z(1)), lag)
    with pytest.raises(PreconditionError):
        whh_two_sided_inverse(pair(z(-1), z(-1)), lag)


@pytest.mark.parametrize("nu1,nu2", [(-2.0, 1.0), (-2.0, -1.0), (-3.0, 2.5), (-1.0, 0.0)])
def test_exponential_closed_form(nu1, nu2, grid, vecs):
    p = pair(e(nu1), e(nu2))
    B = whh_right_inverse(p, grid).operator
    closed = exponential_right_inverse(nu1, nu2, grid)
    # shifts truncate at T differently in the two forms
    assert residual(B, closed, vecs, grid) < 1e-6
    assert residual(compose(whh_operator(p, grid), closed), identity(grid), vecs, grid) < 1e-6


def test_exponential_closed_form_precondition(grid):
    with pytest.raises(PreconditionError):
        exponential_right_inverse(-1.0, 2.0, grid)


@pytest.mark.parametrize("backend", ["grid", "lag"])
def test_closed_form_inverses(backend, request):
    disc = request.getfixturevalue(backend)
    V = request.getfixturevalue("vecs" if backend == "grid" else "lvecs")
    a, b = EXAMPLE_A, EXAMPLE_B
    I = identity(disc)
    for p, X in ((pair(a, a), equal_symbols_inverse(a, disc)),
                 (pair(a, reflect(a)), reflected_symbols_inverse(a, disc)),
                 (pair(one, b), identity_plus_hankel_inverse(b, disc))):
        A = whh_operator(p, disc)
        assert residual(compose(A, X), I, V, disc) < 1e-6
        assert residual(compose(X, A), I, V, disc) < 1e-6


# generalized inverse


GEN_PAIRS = {
    "Eq15": [(e(-2.0), e(1.0)), (z(-1), z(-1)), (z(-1) * R, z(1) * R)],
    "Eq16": [(e(2.0), e(-1.0)), (z(1), z(1))],
    "Eq17": [(one, z(2)), (z(-1), z(3)), (one, z(4))],
}


@pytest.mark.parametrize("case,ab", [(c, ab) for c, v in GEN_PAIRS.items() for ab in v])
def test_generalized_inverse(case, ab, grid, vecs):
    p = pair(*ab)
    assert generalized_case(p) == case
    G = whh_generalized_inverse(p, grid).operator
    A = whh_operator(p, grid)
    assert residual(compose(A, G, A), A, vecs, grid) < 1e-6


def test_generalized_inverse_is_inverse_when_invertible(lag, lvecs):
    p = pair(EXAMPLE_A, EXAMPLE_A)
    G = whh_generalized_inverse(p, lag).operator
    X = whh_two_sided_inverse(p, lag).operator
    assert residual(G, X, lvecs, lag) < 1e-6


def test_generalized_inverse_c_left_d_right_rejected(lag):
    # a = 1, b = zeta^-2: W(c) left-, W(d) right-invertible
    p = pair(one, z(-2))
    with pytest.raises(PreconditionError):
        generalized_case(p)
    with pytest.raises(PreconditionError):
        whh_generalized_inverse(p, lag)


# kernels


@pytest.mark.parametrize("n,sigma", [(-1, 1), (-1, -1), (-2, 1), (-3, 1), (-3, -1), (-4, -1)])
def test_kernel_basis_of_W(n, sigma, lag, grid):
    g = z(n) * Symbol.constant(float(sigma) * (-1) ** n) * (EXAMPLE_A / reflect(EXAMPLE_A))
    for disc in (lag, grid):
        kb = kernel_basis(g, disc)
        assert (kb.plus_dim, kb.minus_dim) == projection_dims(n, kb_sigma(g))
        assert kb.dim == -n
        W, H = build_W(g, disc), build_H(reflect(g), disc)
        for v in kb.plus + kb.minus:
            assert disc.norm(W.matmat(v)) / disc.norm(v) < 1e-9
        for v in kb.plus:
            assert disc.norm(H.matmat(v) - v) / disc.norm(v) < 1e-8
        for v in kb.minus:
            assert disc.norm(H.matmat(v) + v) / disc.norm(v) < 1e-8
        assert np.linalg.matrix_rank(kb.matrix(), tol=1e-8) == kb.dim


def kb_sigma(g):
    from winhopf.symbols import sigma
    return sigma(g)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_kernel_of_whh(m, lag):
    p = pair(z(-m), z(-m))
    kb = kernel_of_whh(p, lag)
    assert kb.dim == m
    A = whh_operator(p, lag)
    for v in kb.vectors:
        assert lag.norm(A.matmat(v)) / lag.norm(v) < 1e-10
    assert cokernel_of_whh(p, lag).dim == 0


def test_kernel_uses_phi_plus(lag):
    # a = zeta^-3, b = zeta^-1: c = zeta^-2, d = zeta^-4, kernel splits 2 + 1
    p = pair(z(-3), z(-1))
    kb = kernel_of_whh(p, lag)
    assert (kb.plus_dim, kb.minus_dim) == (2, 1)
    A = whh_operator(p, lag)
    for v in kb.vectors:
        assert lag.norm(A.matmat(v)) / lag.norm(v) < 1e-9
    assert phi_plus(p, lag).size == lag.size


def test_infinite_kernel(grid):
    with pytest.raises(PreconditionError):
        kernel_of_whh(pair(e(-2.0), e(1.0)), grid)
