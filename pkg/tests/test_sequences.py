import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cpdshift.errors import InvalidMeasureError, NotCPDError, PositivityError, WindowError
from cpdshift.measures import DiscreteMeasure
from cpdshift.sequences import (RepresentingTriplet, gamma_hat, growth_estimate,
                                hankel, is_cpd_window, is_pd_window,
                                is_stieltjes_window, shifted_triplet, synthesize,
                                two_point_support_test, weights_from_gamma)
from conftest import random_triplet


def zero_sum_form(gamma, v):
    """Quadratic form sum gamma_{i+j} v_i v_j evaluated directly."""
    n = v.size
    return sum(gamma[i + j] * v[i] * v[j] for i in range(n) for j in range(n))


def test_triplet_validation():
    with pytest.raises(InvalidMeasureError):
        RepresentingTriplet(0.0, -0.1)
    with pytest.raises(InvalidMeasureError):
        RepresentingTriplet(0.0, 0.0, DiscreteMeasure.dirac(1.0))
    t, g0 = RepresentingTriplet.from_dict({"b": 1, "nu": {"atoms": [{"x": 2, "w": 1}]}})
    assert (t.b, t.c, g0) == (1.0, 0.0, 1.0)
    with pytest.raises(InvalidMeasureError):
        RepresentingTriplet.from_dict({"c": 1})


def test_synthesize_frozen():
    # b = c = 0, nu = d_2: gamma_n = 1 + Q_n(2) = 2**n - n
    g = synthesize(RepresentingTriplet(0.0, 0.0, DiscreteMeasure.dirac(2.0)), 1.0, 10)
    np.testing.assert_allclose(g.values, 2.0 ** np.arange(11) - np.arange(11), rtol=1e-13)
    assert g.source == "triplet" and g.horizon == 10
    g = synthesize(RepresentingTriplet(0.5, 2.0), 3.0, 5)
    np.testing.assert_allclose(g.values, 3 + 0.5 * np.arange(6) + 2 * np.arange(6) ** 2)
    with pytest.raises(WindowError):
        synthesize(RepresentingTriplet(0.0), 1.0, 1)


def test_powers_have_expected_triplet():
    for theta in (0.3, 2.0, 3.5):
        trip = RepresentingTriplet(theta - 1, 0.0, DiscreteMeasure.dirac(theta, (theta - 1) ** 2))
        np.testing.assert_allclose(synthesize(trip, 1.0, 30).values,
                                   theta ** np.arange(31), rtol=1e-11, atol=1e-13)


def test_weights_and_hat_round_trip():
    lam = np.array([1.2, 0.7, 2.0, 1.0])
    hat = gamma_hat(lam)
    np.testing.assert_allclose(hat.values, [1, 1.44, 1.44 * 0.49, 1.44 * 0.49 * 4, 1.44 * 0.49 * 4])
    np.testing.assert_allclose(weights_from_gamma(hat).weights, lam)
    with pytest.raises(PositivityError) as err:
        weights_from_gamma([1.0, 2.0, -1.0, 3.0])
    assert err.value.index == 2


def test_cpd_window_random_triplets(rng):
    for _ in range(60):
        trip = random_triplet(rng)
        gamma = synthesize(trip, 1.0, 64)
        chk = is_cpd_window(gamma, 12)
        assert chk.passed, (trip, chk)


def test_cpd_window_agrees_with_direct_zero_sum_form(rng):
    gamma = synthesize(RepresentingTriplet(-0.5, 0.2, DiscreteMeasure([0.3, 1.8], [1.0, 0.4])), 1.0, 20).values
    for _ in range(200):
        v = rng.normal(size=8)
        v -= v.mean()
        assert zero_sum_form(gamma, v) >= -1e-9 * np.abs(gamma[:15]).max()


def test_cpd_window_rejects():
    # gamma_n = -n**2 has second difference -2.
    assert not is_cpd_window(-np.arange(30.0) ** 2, 12)
    # A negative atom at odd moments breaks the window as well when the
    # hidden second difference alternates in a non-PSD way.
    seq = np.array([(-1.0) ** n for n in range(30)]) * np.arange(30)
    assert not is_cpd_window(seq, 12)
    with pytest.raises(WindowError):
        is_cpd_window(np.ones(20), 12)


def test_pd_and_stieltjes():
    g = 2.0 ** np.arange(30)
    assert is_pd_window(g, 12) and is_stieltjes_window(g, 12)
    alt = (-2.0) ** np.arange(30)
    assert is_pd_window(alt, 12) and not is_stieltjes_window(alt, 12)
    lin = 1 + 0.7 * np.arange(30)
    assert not is_stieltjes_window(lin, 12)
    assert is_cpd_window(lin, 12)


def test_hankel_layout():
    h = hankel(np.arange(10.0), 2, offset=1)
    np.testing.assert_array_equal(h, [[1, 2, 3], [2, 3, 4], [3, 4, 5]])


def test_shift_rejects_odd_with_negative_atoms():
    trip = RepresentingTriplet(0.0, 0.0, DiscreteMeasure([-0.5], [1.0]))
    with pytest.raises(NotCPDError):
        shifted_triplet(trip, 3)
    t2, _ = shifted_triplet(trip, 2)
    assert t2.nu.weights[0] == pytest.approx(0.25)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 6))
def test_shifted_triplet_resynthesizes(seed, k):
    trip = random_triplet(np.random.default_rng(seed))
    g = synthesize(trip, 1.0, 40).values
    tk, gk = shifted_triplet(trip, k)
    gs = synthesize(tk, gk, 40 - k).values
    np.testing.assert_allclose(gs, g[k:], rtol=1e-9, atol=1e-9 * np.abs(g).max())


def test_growth_estimate():
    assert growth_estimate(3.0 ** np.arange(41)) == pytest.approx(3.0)
    with pytest.raises(WindowError):
        growth_estimate(np.ones(5))


def test_two_point_support():
    z = 0.32
    g = (1 - z) * (np.arange(10) == 0) + z * 2.0 ** np.arange(10)
    assert not two_point_support_test(g, 0)
    assert two_point_support_test(g, 1)
    assert two_point_support_test(2.0 ** np.arange(6), 0)
