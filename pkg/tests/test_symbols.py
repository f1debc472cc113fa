import json

import numpy as np
import pytest
from hypothesis import given

from strategies import matching_pairs, symbols
from winhopf import Symbol, adjoint_pair, make_matching_pair, reflect, symbol_from_json, symbol_to_json
from winhopf.errors import NotInvertibleError, NotMatchingError, SchemaError
from winhopf.symbols import ap_index, inv, is_matching, pair_from_json, sigma, winding_index

T = np.linspace(-30, 30, 301)


@given(symbols(deltas=(-1.0, 0.0, 0.5)))
def test_reflect_is_involution(g):
    assert np.allclose(reflect(reflect(g))(T), g(T))
    assert np.allclose(reflect(g)(T), g(-T))


@given(symbols(deltas=(-1.0, 0.0, 0.5)), symbols(deltas=(0.0, 2.0)))
def test_product_and_inverse_pointwise(g, h):
    assert np.allclose((g * h)(T), g(T) * h(T), rtol=1e-10)
    assert np.allclose((g * inv(g))(T), 1.0, rtol=1e-10)
    same = Symbol(g.delta, h.rat)
    assert np.allclose((g + same)(T), g(T) + same(T), rtol=1e-8, atol=1e-10)


def test_sum_needs_common_frequency():
    with pytest.raises(ValueError):
        Symbol.exponential(1.0) + Symbol.constant(1.0)


@given(symbols(deltas=(-1.5, 0.0, 2.0), zeta_powers=(-2, 0, 3)))
def test_json_round_trip(g):
    back = symbol_from_json(json.loads(json.dumps(symbol_to_json(g))))
    assert np.allclose(back(T), g(T), rtol=1e-12)


def test_coefficient_schema():
    # (t - i) / (t + i), ascending coefficients
    g = symbol_from_json({"num": [[0, -1], [1, 0]], "den": [[0, 1], [1, 0]]})
    assert np.allclose(g(T), Symbol.zeta()(T))


@pytest.mark.parametrize("bad", [[], {"num": [[1, 0]]}, {"zeros": [1, 2]}, {"delta": "x"}])
def test_schema_errors(bad):
    with pytest.raises(SchemaError):
        symbol_from_json(bad)


def test_pair_schema_error():
    with pytest.raises(SchemaError):
        pair_from_json({"a": {}})


def test_indices_of_basic_symbols():
    assert winding_index(Symbol.zeta(3)) == 3
    assert winding_index(Symbol.zeta(-2)) == -2
    assert ap_index(Symbol.exponential(-1.5)) == -1.5
    with pytest.raises(NotInvertibleError):
        winding_index(Symbol.from_zpk([1e-8j], [-1j]))


def test_zeta_powers_have_exact_roots():
    z = Symbol.zeta(2) * Symbol.zeta(2) * Symbol.zeta(-1)
    assert np.allclose(np.sort_complex(z.zeros), [1j] * 3)


def test_sigma_of_matching_functions():
    assert sigma(Symbol.zeta(-1)) == 1
    assert sigma(Symbol.zeta(-1) * Symbol.constant(-1.0)) == -1
    assert sigma(Symbol.exponential(2.0)) == 1


@given(matching_pairs(deltas=(-1.0, 0.0, 1.0)))
def test_matching_pair_invariants(pair):
    assert np.allclose((pair.c * reflect(pair.c))(T), 1.0, atol=1e-10)
    assert np.allclose((pair.d * reflect(pair.d))(T), 1.0, atol=1e-10)
    assert pair.sigma_c == pair.sigma_d
    assert (pair.n1 + pair.n2) % 2 == 0
    assert is_matching(pair.c) and is_matching(pair.d)


@given(matching_pairs(deltas=(-1.0, 0.0, 1.0)))
def test_adjoint_pair_indices(pair):
    adj = adjoint_pair(pair)
    assert (adj.nu1, adj.n1, adj.nu2, adj.n2) == (-pair.nu2, -pair.n2, -pair.nu1, -pair.n1)
    assert adj.sigma_c == pair.sigma_c


def test_not_matching():
    with pytest.raises(NotMatchingError):
        make_matching_pair(Symbol.zeta(), Symbol.from_zpk([-2j], [-1j]))
