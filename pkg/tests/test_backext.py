import math

import numpy as np
import pytest

from cpdshift.backext import (extend_sequence_1, extend_shift_1, extend_shift_n,
                              extended_hat, infinite_step_check, n_lambda,
                              sigma_trace)
from cpdshift.errors import DomainError
from cpdshift.measures import DiscreteMeasure
from cpdshift.sequences import RepresentingTriplet, is_cpd_window, synthesize
from conftest import random_triplet, two_atom_triplet

D = DiscreteMeasure


def affine(theta):
    return RepresentingTriplet(theta)


def test_sequence_prepend_example():
    trip = RepresentingTriplet(1.0, 0.0, D.dirac(2.0))   # gamma_n = 2**n
    res = extend_sequence_1(trip, synthesize(trip, 1.0, 8), 0.5)
    assert res.feasible and res.mass_at_zero == pytest.approx(0.0, abs=1e-15)
    assert res.triplet.nu.allclose(D.dirac(2.0, 0.5))
    assert res.triplet.b == pytest.approx(0.5)
    # The new triplet reproduces (theta, gamma_0, gamma_1, ...).
    got = synthesize(res.triplet, 0.5, 8).values
    np.testing.assert_allclose(got, np.concatenate([[0.5], 2.0 ** np.arange(8)]), rtol=1e-12)
    assert not extend_sequence_1(trip, 1.0, 0.4).feasible
    assert not extend_sequence_1(RepresentingTriplet(1.0, 0.0, D([0.0, 2.0], [0.1, 1.0])), 1.0, 5.0).feasible
    with pytest.raises(DomainError):
        extend_sequence_1(RepresentingTriplet(0.0, 0.0, D.dirac(-1.0)), 1.0, 1.0)


def test_shift_one_step_examples():
    res = extend_shift_1(affine(2.0), 100.0)
    assert res.feasible and res.bound == pytest.approx(-1.0)
    res = extend_shift_1(RepresentingTriplet(0.0), 1.0)
    assert res.feasible and res.mass_at_zero == 0.0 and res.triplet.b == 0.0
    assert res.triplet.nu.is_zero
    half0 = RepresentingTriplet(0.0, 0.0, D.dirac(0.0, 0.5))
    assert not any(extend_shift_1(half0, t).feasible for t in (1e-3, 1.0, 1e3))
    with pytest.raises(DomainError):
        extend_shift_1(affine(1.0), 0.0)


def test_extended_triplet_resynthesizes(rng):
    checked = 0
    for _ in range(80):
        trip = random_triplet(rng, lo=0.05, b_range=(0.0, 2.0))
        s1 = sigma_trace(trip, 1).sigma[0]
        t = 1 / math.sqrt(s1) * 0.7 if s1 > 0 else 2.0
        res = extend_shift_1(trip, t)
        assert res.feasible
        hat = extended_hat(trip, [t], 30)
        got = synthesize(res.triplet, 1.0, 30).values
        np.testing.assert_allclose(got, hat, rtol=1e-9)
        assert is_cpd_window(hat, 12)
        checked += 1
    assert checked == 80


def test_sigma_trace_closed_forms():
    for theta in (0.7, 0.3, 1.5):
        n = np.arange(1, 9)
        np.testing.assert_allclose(sigma_trace(affine(theta), 8).sigma,
                                   (1 - n * theta) / (1 - (n - 1) * theta), rtol=1e-12)
    for theta in (1.5, 2.0, 9 / 4, 2.5):
        want = (4 * theta**2 - 8 * theta + 9) / (5 * theta)
        assert sigma_trace(two_atom_triplet(theta), 3).sigma[0] == pytest.approx(want, rel=1e-12)
    assert sigma_trace(two_atom_triplet(9 / 4), 1).sigma[0] == pytest.approx(1.0)


def test_sigma_trace_markers():
    tr = sigma_trace(affine(0.5), 5)   # sigma_2 = 0
    assert tr.degenerate_at == 2
    assert tr.sigma[1] == pytest.approx(0.0, abs=1e-12)
    assert all(math.isnan(s) for s in tr.sigma[2:])
    tr = sigma_trace(RepresentingTriplet(0.0, 0.0, D.dirac(0.0)), 4)
    assert tr.n_lambda == 0 and tr.sigma[0] == math.inf
    assert n_lambda(D.dirac(0.3)) == math.inf


@pytest.mark.parametrize("k", [2, 3, 4])
def test_n_step_affine(k):
    theta = 0.5 * (1 / k + 1 / (k - 1))
    ext = extend_shift_n(affine(theta), k)
    assert ext.feasible and ext.constraints[-1].upper == math.inf
    sig = sigma_trace(affine(theta), k).sigma
    for j in range(k - 1):
        assert ext.t_values[j] ** 2 * sig[j] == pytest.approx(1.0, rel=1e-9)
        assert ext.constraints[j].kind == "equality"
    bad = extend_shift_n(affine(theta), k + 1)
    assert not bad.feasible and bad.failed_at == k


def test_n_step_monotone_and_hankel_cross_check():
    trip = two_atom_triplet(9 / 4 + 0.1)
    ext = extend_shift_n(trip, 3)
    assert ext.feasible
    for k in (1, 2):
        assert extend_shift_n(trip, k).feasible
    hat = extended_hat(trip, ext.t_values, 40)
    assert is_cpd_window(hat, 12)
    for k, tr in enumerate(ext.triplets, start=1):
        got = synthesize(tr, 1.0, 40 - (3 - k)).values
        want = extended_hat(trip, ext.t_values[:k], 40 - (3 - k))
        np.testing.assert_allclose(got, want, rtol=1e-9)
        mass0 = tr.nu.mass_at(0.0)
        if k < 3:
            assert mass0 <= 1e-10
    sig = sigma_trace(trip, 3).sigma
    for j in range(2):
        assert ext.t_values[j] ** 2 * sig[j] == pytest.approx(1.0, rel=1e-9)


def test_n_step_last_weight():
    trip = two_atom_triplet(2.5)
    ext = extend_shift_n(trip, 2)
    upper = ext.constraints[-1].upper
    assert math.isfinite(upper) and ext.t_values[-1] == pytest.approx(upper)
    inner = extend_shift_n(trip, 2, t_last=0.5 * upper)
    assert inner.triplets[-1].nu.mass_at(0.0) > 0
    with pytest.raises(DomainError):
        extend_shift_n(trip, 2, t_last=1.01 * upper)


def test_b_le_c_extends_every_step(rng):
    for _ in range(20):
        c = rng.uniform(0.01, 1)
        trip = RepresentingTriplet(rng.uniform(-c, c), c, D(rng.uniform(0.1, 3, 2), rng.uniform(0.1, 1, 2)))
        if abs(trip.nu.support_max() - 1) < 1e-3:
            continue
        for n in (1, 4, 9):
            assert extend_shift_n(trip, n).feasible
        assert infinite_step_check(trip).status is True


def test_infinite_step_check():
    drift = RepresentingTriplet(-1.0, 1.0, D.dirac(2.0))
    assert infinite_step_check(drift).status is True
    assert infinite_step_check(RepresentingTriplet(-1.0, 1.0, D([0.0, 2.0], [1.0, 1.0]))).status is False
    res = infinite_step_check(two_atom_triplet(2.5))
    assert res.status is True and res.p == 1
    res = infinite_step_check(affine(0.3))
    assert res.status is False and res.p == 4
    # sigma_n stays in (0, 1) until n = 100: beyond the default cap.
    assert infinite_step_check(affine(0.01)).status is None
    assert infinite_step_check(affine(0.01), cap=128).status is False
