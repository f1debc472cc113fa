"""Hypothesis strategies for symbols and pairs."""
import numpy as np
from hypothesis import strategies as st

from winhopf import Symbol, make_matching_pair
from winhopf.classify import Indices
from winhopf.symbols import reflect


@st.composite
def roots(draw, count, margin=0.5):
    out = []
    for _ in range(count):
        re = draw(st.floats(-2, 2))
        im = draw(st.floats(margin, 2.5)) * draw(st.sampled_from([-1, 1]))
        out.append(complex(re, im))
    return np.array(out)


@st.composite
def symbols(draw, deltas=(0.0,), zeta_powers=(0,), max_degree=2):
    k = draw(st.integers(1, max_degree))
    gain = draw(st.floats(0.5, 2.0)) * np.exp(1j * draw(st.floats(0, 2 * np.pi)))
    g = Symbol.from_zpk(draw(roots(k)), draw(roots(k)), gain, draw(st.sampled_from(deltas)))
    n = draw(st.sampled_from(zeta_powers))
    return g * Symbol.zeta(n) if n else g


@st.composite
def matching_pairs(draw, deltas=(0.0,)):
    """``(a, a c^-1)`` with a matching ``c = s e^{i beta t} zeta^n h / h~``."""
    a = draw(symbols(deltas=deltas, zeta_powers=(-1, 0, 1)))
    h = draw(symbols())
    c = h / reflect(h) * Symbol.zeta(draw(st.integers(-3, 3)))
    c = c * Symbol.exponential(draw(st.sampled_from(deltas)))
    c = c * Symbol.constant(draw(st.sampled_from([1.0, -1.0])))
    return make_matching_pair(a, a / c)


@st.composite
def indices(draw):
    nu = st.sampled_from([-2.0, -1.0, 0.0, 1.0, 2.0])
    return Indices(draw(nu), draw(st.integers(-5, 5)), draw(nu), draw(st.integers(-5, 5)),
                   draw(st.sampled_from([1, -1])))
