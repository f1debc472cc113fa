import json

import numpy as np
import pytest
from hypothesis import given

from strategies import symbols
from winhopf import Factorization, Symbol, matching_factor, verify_factorization, wiener_hopf_factor
from winhopf.acceptance import numerical_winding
from winhopf.errors import NotMatchingError
from winhopf.symbols import reflect


@given(symbols(deltas=(-1.0, 0.0, 2.0), zeta_powers=(-3, -1, 0, 2), max_degree=3))
def test_factorization_reconstructs(g):
    f = wiener_hopf_factor(g)
    rep = verify_factorization(f, g)
    assert rep.max_rel_error <= 1e-9
    assert rep.ok
    assert f.nu == g.delta
    assert abs(numerical_winding(g) - f.n) < 1e-6


def test_zeta_factor():
    f = wiener_hopf_factor(Symbol.zeta())
    assert f.n == 1 and f.nu == 0


@given(symbols())
def test_matching_factor_normalization(h):
    g = h / reflect(h) * Symbol.zeta(-1)
    f = matching_factor(g)
    assert abs(f.g_minus(0.0) - 1) < 1e-12
    t = np.linspace(-10, 10, 41)
    assert np.allclose(f.g_minus(t), f.sigma / reflect(f.g_plus)(t), atol=1e-9)


def test_matching_factor_rejects():
    with pytest.raises(NotMatchingError):
        matching_factor(Symbol.from_zpk([-2j], [-1j]))


@given(symbols(deltas=(0.0, 1.5), zeta_powers=(-1, 0, 1)))
def test_json_round_trip(g):
    f = wiener_hopf_factor(g)
    back = Factorization.from_json(json.loads(json.dumps(f.to_json())))
    t = np.linspace(-20, 20, 81)
    assert np.allclose(back(t), g(t), rtol=1e-10)
