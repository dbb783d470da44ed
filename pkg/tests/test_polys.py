from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cpdshift.errors import DomainError
from cpdshift.polys import SWITCH, forward_diff, q_eval, q_table


def q_exact(n, x):
    """Exact rational Q_n(x) from the defining sum."""
    x = Fraction(x)
    return sum((n - j - 1) * x**j for j in range(n - 1))


def q_scale(n, x):
    # Size of the summands; the natural yardstick near real roots of Q_n.
    return sum((n - j - 1) * abs(x) ** j for j in range(n - 1))


orders = st.integers(min_value=0, max_value=64)
points = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)


def test_low_orders():
    x = np.linspace(-2, 2, 9)
    assert np.all(q_eval(0, x) == 0) and np.all(q_eval(1, x) == 0)
    assert np.all(q_eval(2, x) == 1)
    np.testing.assert_allclose(q_eval(3, x), 2 + x, rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(q_eval(4, x), 3 + 2 * x + x**2, rtol=1e-12, atol=1e-14)


def test_frozen_values():
    assert q_eval(3, 2.0) == pytest.approx(4.0)
    assert q_eval(5, 2.0) == pytest.approx(26.0)  # 2^5 - 1 - 5
    assert q_eval(10, 1.0) == 45.0  # n(n-1)/2


def test_scalar_and_array_shapes():
    assert isinstance(q_eval(5, 0.3), float)
    assert q_eval(5, np.zeros((2, 3))).shape == (2, 3)


def test_negative_order_rejected():
    with pytest.raises(DomainError):
        q_eval(-1, 0.5)


@settings(max_examples=400, deadline=None)
@given(orders, points)
def test_matches_exact_sum(n, x):
    diff = abs(float(Fraction(q_eval(n, x)) - q_exact(n, x)))
    assert diff <= 1e-9 * max(q_scale(n, x), 1.0)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 63), points)
def test_recurrence(n, x):
    lhs, rhs = q_eval(n + 1, x), x * q_eval(n, x) + n
    assert abs(lhs - rhs) <= 1e-9 * max(q_scale(n + 1, x), 1.0)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 62), points)
def test_second_difference_is_power(n, x):
    d2 = q_eval(n + 2, x) - 2 * q_eval(n + 1, x) + q_eval(n, x)
    assert abs(d2 - x**n) <= 1e-9 * max(q_scale(n + 2, x), 1.0)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 63), points)
def test_first_difference_is_geometric_sum(n, x):
    d1 = q_eval(n + 1, x) - q_eval(n, x)
    geo = sum(x**j for j in range(n))
    assert abs(d1 - geo) <= 1e-9 * max(q_scale(n + 1, x), 1.0)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 64), st.floats(0.0, 1.0))
def test_bounded_by_n_squared_on_unit_interval(n, x):
    assert 0 <= q_eval(n, x) / n**2 <= 1.0


def test_continuity_across_switch():
    for n in (2, 7, 40, 64):
        for x in (1 + 0.999 * SWITCH, 1 + 1.001 * SWITCH,
                  1 - 0.999 * SWITCH, 1 - 1.001 * SWITCH):
            assert q_eval(n, x) == pytest.approx(float(q_exact(n, x)), rel=1e-10)


def test_closed_form_range_is_accurate_near_one():
    for d in np.geomspace(1.0001 * SWITCH, 0.5, 40):
        for x in (1 + d, 1 - d):
            for n in (2, 3, 17, 64):
                assert q_eval(n, x) == pytest.approx(float(q_exact(n, x)), rel=1e-11)


def test_table_matches_pointwise():
    x = np.array([-2.5, 0.0, 0.5, 1.0, 1 + 1e-6, 1.7, 3.0])
    tab = q_table(30, x)
    assert tab.shape == (31, 7)
    for n in range(31):
        np.testing.assert_allclose(tab[n], q_eval(n, x), rtol=1e-12, atol=1e-12)


def test_forward_diff():
    s = np.arange(6.0) ** 2
    np.testing.assert_array_equal(forward_diff(s), 2 * np.arange(5) + 1)
    np.testing.assert_array_equal(forward_diff(s, 2), np.full(4, 2.0))
    with pytest.raises(DomainError):
        forward_diff([1.0], 1)
    with pytest.raises(DomainError):
        forward_diff(s, 0)
