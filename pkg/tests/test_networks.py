import math

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from gromon import (
    Coupling,
    MarginalError,
    MeasureNetwork,
    MongeMap,
    NotMeasurePreservingError,
    check_exponent,
    coupling_from_map,
    distortion_map,
    distortion_p,
    one_point_network,
    parse_exponent,
    product_coupling,
    pullback_network,
    simplex_network,
    size_p,
    validate_network,
)
from gromon.networks import pseudometric_violation

from conftest import networks, relabeled


def weak_iso_pair():
    net_x = MeasureNetwork([0.5, 0.25, 0.25],
                           [[1, 0, 0], [0, 0, 0], [0, 0, 0]])
    net_y = MeasureNetwork([0.25, 0.25, 0.5],
                           [[1, 1, 0], [1, 1, 0], [0, 0, 0]])
    return net_x, net_y


# -- construction and validation ---------------------------------------------

def test_weights_must_be_positive():
    with pytest.raises(ValueError, match="strictly positive"):
        MeasureNetwork([0.0, 1.0], np.zeros((2, 2)))


def test_weights_must_sum_to_one():
    with pytest.raises(ValueError, match="sum to 1"):
        MeasureNetwork([0.6, 0.6], np.zeros((2, 2)))


def test_omega_shape_checked():
    with pytest.raises(ValueError, match="omega"):
        MeasureNetwork([0.5, 0.5], np.zeros((2, 3)))


def test_network_is_immutable():
    net = simplex_network(3)
    with pytest.raises(ValueError):
        net.omega[0, 1] = 7.0


def test_coupling_marginals_checked():
    w = [0.5, 0.5]
    with pytest.raises(MarginalError):
        Coupling([[0.5, 0.0], [0.5, 0.0]], w, w)


def test_coupling_rejects_negative_entries():
    w = [0.5, 0.5]
    with pytest.raises(ValueError, match="nonnegative"):
        Coupling([[0.6, -0.1], [-0.1, 0.6]], w, w)


def test_exponent_validation():
    assert check_exponent(1) == 1.0
    assert math.isinf(check_exponent(math.inf))
    assert math.isinf(parse_exponent("inf"))
    assert parse_exponent("2.5") == 2.5
    with pytest.raises(ValueError):
        check_exponent(0.5)
    with pytest.raises(ValueError):
        parse_exponent("nan")


def test_validate_simplex_is_metric():
    flag = validate_network(simplex_network(3))
    assert flag.is_metric
    assert flag.max_violation == 0.0


def test_validate_triangle_failure_magnitude():
    # d(1,2)=5 but d(1,3)+d(3,2)=2: worst violation is 3
    om = [[0, 5, 1], [5, 0, 1], [1, 1, 0]]
    flag = validate_network(MeasureNetwork([1 / 3] * 3, om))
    assert not flag.is_metric
    assert flag.max_violation == pytest.approx(3.0, abs=1e-12)


def test_validate_rejects_asymmetric():
    om = [[0, 1, 2], [1, 0, 1], [1, 1, 0]]  # directed-graph style table
    assert not validate_network(MeasureNetwork([1 / 3] * 3, om)).is_metric


def test_validate_pseudometric_not_metric():
    om = [[0, 0], [0, 0]]
    flag = validate_network(MeasureNetwork([0.5, 0.5], om))
    assert not flag.is_metric
    assert flag.max_violation == 0.0


# -- distortion --------------------------------------------------------------

def test_distortion_point_vs_pair():
    pt, pair = one_point_network(), simplex_network(2)
    pi = product_coupling(pt, pair)
    for p in (1, 2):
        assert distortion_p(pt, pair, pi, p) == pytest.approx(2 ** (-1 / p), abs=1e-12)


def test_distortion_identity_coupling_zero():
    net = MeasureNetwork([0.25, 0.75], [[1.5, -2], [0.25, 3]])
    pi = Coupling(np.diag(net.weights), net.weights, net.weights)
    assert distortion_p(net, net, pi, 2) == 0.0
    assert distortion_p(net, net, pi, math.inf) == 0.0


def test_distortion_weak_iso_coupling_is_zero():
    net_x, net_y = weak_iso_pair()
    pi = Coupling([[0.25, 0.25, 0], [0, 0, 0.25], [0, 0, 0.25]],
                  net_x.weights, net_y.weights)
    assert distortion_p(net_x, net_y, pi, 2) == pytest.approx(0.0, abs=1e-12)
    assert distortion_p(net_x, net_y, pi, 1) == pytest.approx(0.0, abs=1e-12)


def test_distortion_rejects_foreign_coupling():
    pt, pair = one_point_network(), simplex_network(2)
    pi = product_coupling(pt, pair)
    with pytest.raises(MarginalError):
        distortion_p(simplex_network(1), simplex_network(3), pi, 2)


def test_distortion_map_weak_iso_both_maps():
    net_x, net_y = weak_iso_pair()
    # the only measure-preserving maps send the heavy point to the heavy point
    for a in ([2, 0, 1], [2, 1, 0]):
        val = distortion_map(net_x, net_y, MongeMap(a), 2)
        assert val == pytest.approx(math.sqrt(0.5), abs=1e-12)


def test_distortion_map_identity_zero():
    net = MeasureNetwork([0.2, 0.3, 0.5], [[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    assert distortion_map(net, net, MongeMap([0, 1, 2]), 2) == 0.0


def test_distortion_map_two_to_one():
    phi = MongeMap([0, 0, 1, 1])
    val = distortion_map(simplex_network(4), simplex_network(2), phi, 1)
    assert val == pytest.approx(0.25, abs=1e-12)


def test_distortion_map_rejects_bad_assignment():
    with pytest.raises(NotMeasurePreservingError):
        distortion_map(simplex_network(3), simplex_network(2), MongeMap([0, 0, 1]), 1)


# -- induced couplings ---------------------------------------------------------

def test_coupling_from_identity_map():
    pi = coupling_from_map(MongeMap([0, 1]), [0.5, 0.5], [0.5, 0.5])
    assert np.array_equal(pi.table, np.diag([0.5, 0.5]))


def test_coupling_from_two_to_one_map():
    pi = coupling_from_map(MongeMap([0, 0, 1, 1]), [0.25] * 4, [0.5, 0.5])
    want = np.array([[0.25, 0], [0.25, 0], [0, 0.25], [0, 0.25]])
    assert np.array_equal(pi.table, want)


def test_coupling_from_weak_iso_map():
    net_x, net_y = weak_iso_pair()
    pi = coupling_from_map(MongeMap([2, 0, 1]), net_x.weights, net_y.weights)
    want = np.zeros((3, 3))
    want[0, 2], want[1, 0], want[2, 1] = 0.5, 0.25, 0.25
    assert np.array_equal(pi.table, want)


# -- size ----------------------------------------------------------------------

def test_size_examples():
    assert size_p(simplex_network(3), 1) == pytest.approx(2 / 3, abs=1e-12)
    assert size_p(one_point_network(), 2) == 0.0
    assert size_p(simplex_network(2), 2) == pytest.approx(math.sqrt(0.5), abs=1e-12)
    assert size_p(simplex_network(5), math.inf) == 1.0


# -- pullback --------------------------------------------------------------------

def test_pullback_identity():
    net = simplex_network(3)
    out = pullback_network(net, MongeMap([0, 1, 2]), net.weights)
    assert np.array_equal(out.omega, net.omega)


def test_pullback_to_point_is_zero():
    out = pullback_network(one_point_network(), MongeMap([0, 0]), [0.5, 0.5])
    assert np.array_equal(out.omega, np.zeros((2, 2)))


def test_pullback_product_support_blocks():
    # support of the product coupling of two 2-point spaces, first projection
    rho = MongeMap([0, 0, 1, 1])
    out = pullback_network(simplex_network(2), rho, [0.25] * 4)
    want = np.array([[0, 0, 1, 1], [0, 0, 1, 1], [1, 1, 0, 0], [1, 1, 0, 0]],
                    dtype=float)
    assert np.array_equal(out.omega, want)


def test_pullback_requires_metric():
    bad = MeasureNetwork([0.5, 0.5], [[0, 1], [2, 0]])
    with pytest.raises(ValueError, match="metric"):
        pullback_network(bad, MongeMap([0, 1]), [0.5, 0.5])


# -- properties -------------------------------------------------------------------

@settings(deadline=None, max_examples=60)
@given(networks(), networks(), st.randoms(use_true_random=False))
def test_distortion_relabeling_invariance(net_x, net_y, rnd):
    sx = np.array(rnd.sample(range(net_x.n), net_x.n), dtype=np.intp)
    sy = np.array(rnd.sample(range(net_y.n), net_y.n), dtype=np.intp)
    pi = product_coupling(net_x, net_y)
    pi_rel = Coupling(pi.table[np.ix_(sx, sy)], net_x.weights[sx], net_y.weights[sy])
    for p in (1, 2, math.inf):
        a = distortion_p(net_x, net_y, pi, p)
        b = distortion_p(relabeled(net_x, sx), relabeled(net_y, sy), pi_rel, p)
        assert abs(a - b) <= 1e-12


@settings(deadline=None, max_examples=60)
@given(networks(max_n=4), st.randoms(use_true_random=False))
def test_map_distortion_matches_induced_coupling(net, rnd):
    sigma = MongeMap(np.array(rnd.sample(range(net.n), net.n), dtype=np.intp))
    other = relabeled(net, np.argsort(sigma.assignment))
    pi = coupling_from_map(sigma, net.weights, other.weights)
    for p in (1, 2, math.inf):
        assert abs(distortion_map(net, other, sigma, p)
                   - distortion_p(net, other, pi, p)) <= 1e-12


@settings(deadline=None, max_examples=60)
@given(networks(), networks())
def test_distortion_monotone_in_p(net_x, net_y):
    pi = product_coupling(net_x, net_y)
    values = [distortion_p(net_x, net_y, pi, p) for p in (1, 1.5, 2, 3, math.inf)]
    for lo, hi in zip(values, values[1:]):
        assert lo <= hi + 1e-12


@settings(deadline=None, max_examples=60)
@given(networks())
def test_size_equals_distortion_to_point(net):
    phi = MongeMap(np.zeros(net.n, dtype=np.intp))
    for p in (1, 2, math.inf):
        assert abs(size_p(net, p)
                   - distortion_map(net, one_point_network(), phi, p)) <= 1e-12


@pytest.mark.parametrize("seed", range(8))
def test_pullback_is_pseudometric(seed):
    from gromon.randgen import random_metric_network

    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 6))
    net = random_metric_network(n, seed)
    rho = MongeMap(rng.permutation(np.repeat(np.arange(n), 2)))
    out = pullback_network(net, rho, np.full(2 * n, 1.0 / (2 * n)))
    assert pseudometric_violation(out.omega) <= 1e-12
