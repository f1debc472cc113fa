import numpy as np
import pytest
from hypothesis import given

from strategies import indices, matching_pairs
from winhopf import Grid, Symbol, classify, make_matching_pair
from winhopf.classify import (
    Indices,
    VERDICTS,
    angle_verdict,
    check_thm32_heuristic,
    classify_indices,
    left_sufficient,
    left_violations,
    one_sided_violations,
    pair_indices,
    right_sufficient,
    right_violations,
    smallest_angle_to_vanishing,
)
from winhopf.errors import PreconditionError
from winhopf.io import load_pair
from winhopf.symbols import adjoint_pair

z, e = Symbol.zeta, Symbol.exponential
DUAL = {"two_sided": "two_sided", "left_only": "right_only", "right_only": "left_only",
        "not_one_sided": "not_one_sided", "undetermined": "undetermined",
        "generalized": "generalized"}


# rule tables


@given(indices())
def test_adjoint_duality(ix):
    r, ra = classify_indices(ix), classify_indices(ix.adjoint())
    assert ra.verdict == DUAL[r.verdict]
    ker, coker = r.predicted_dims
    assert ra.predicted_dims == (coker, ker)


@given(indices())
def test_adjoint_is_involution(ix):
    assert ix.adjoint().adjoint() == ix


@given(indices())
def test_sufficient_never_contradicts_necessary(ix):
    if right_sufficient(ix):
        assert not right_violations(ix) and not one_sided_violations(ix)
    if left_sufficient(ix):
        assert not left_violations(ix) and not one_sided_violations(ix)


@given(indices())
def test_verdict_is_cited(ix):
    r = classify_indices(ix)
    assert r.verdict in VERDICTS
    assert r.fired_rules
    if r.verdict == "two_sided":
        assert r.predicted_dims == (0, 0)


def test_trivial_indices_invertible():
    r = classify_indices(Indices(0.0, 0, 0.0, 0, 1))
    assert r.verdict == "two_sided"
    assert r.fired_rules[0][0] == "Cor 6.1"


@pytest.mark.parametrize("ix, verdict", [
    (Indices(-1.0, 0, -2.0, 0, 1), "right_only"),
    (Indices(1.0, 0, 2.0, 0, 1), "left_only"),
    (Indices(-1.0, 0, 1.0, 0, 1), "not_one_sided"),
    (Indices(1.0, 0, -1.0, 0, 1), "undetermined"),
    (Indices(0.0, -1, 0.0, -1, 1), "right_only"),
    (Indices(0.0, 1, 0.0, 1, 1), "left_only"),
])
def test_verdict_examples(ix, verdict):
    assert classify_indices(ix).verdict == verdict


# pairs


@given(matching_pairs(deltas=(0.0, 1.0, -1.0)))
def test_sigma_and_parity(p):
    assert p.sigma_c == p.sigma_d
    assert (p.n1 + p.n2) % 2 == 0


@given(matching_pairs(deltas=(0.0, 1.0, -1.0)))
def test_adjoint_pair_indices(p):
    assert pair_indices(adjoint_pair(p)) == pair_indices(p).adjoint()
    assert classify(adjoint_pair(p)).verdict == DUAL[classify(p).verdict]


@pytest.mark.parametrize("name, verdict", [
    ("pair_identity", "two_sided"),
    ("pair_zeta_inv", "right_only"),
    ("pair_exponential", "right_only"),
    ("pair_hankel", "two_sided"),
    ("pair_undetermined", "undetermined"),
])
def test_data_files(name, verdict, data_dir):
    assert classify(load_pair(data_dir / f"{name}.json")).verdict == verdict


def test_generalized_case_reported():
    r = classify(make_matching_pair(Symbol.constant(1.0), z(2)))
    assert r.generalized_inverse == "Eq17"


# subspace heuristic


def test_angle_verdict_thresholds():
    assert angle_verdict(0.0) == "violated"
    assert angle_verdict(1e-4) == "inconclusive"
    assert angle_verdict(0.5) == "plausible"


def test_smallest_angle_synthetic():
    n = 50
    w = np.ones(n)
    window = np.arange(n) < 10
    inside = np.zeros((n, 1)); inside[3] = 1.0
    outside = np.zeros((n, 1)); outside[30] = 1.0
    # outside the window: the vector itself vanishes there, angle 0
    assert smallest_angle_to_vanishing(outside, w, window) == pytest.approx(0.0)
    assert smallest_angle_to_vanishing(inside, w, window) == pytest.approx(np.pi / 2)
    tilt = inside + 1e-4 * outside  # tiny component in the window's complement
    tilt2 = outside + 1e-4 * inside
    assert angle_verdict(smallest_angle_to_vanishing(tilt2, w, window)) == "inconclusive"
    assert angle_verdict(smallest_angle_to_vanishing(tilt, w, window)) == "plausible"
    assert smallest_angle_to_vanishing(np.zeros((n, 0)), w, window) == pytest.approx(np.pi / 2)


def test_heuristic_examples():
    g = Grid(40.0, 1280)
    violated = check_thm32_heuristic(make_matching_pair(e(-1.0), e(-2.0)), g)
    plausible = check_thm32_heuristic(make_matching_pair(e(1.0), e(-2.0)), g)
    assert violated["verdict"] == "violated"
    assert plausible["verdict"] == "plausible"


def test_heuristic_preconditions(grid):
    with pytest.raises(PreconditionError):
        check_thm32_heuristic(make_matching_pair(e(-2.0), e(1.0)), grid)
