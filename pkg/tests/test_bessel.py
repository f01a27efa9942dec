import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from abwave.bessel import (
    bessel_j,
    bessel_j_prime,
    cutoff_chi,
    envelope_bound,
    envelope_bound_prime,
    schlafli_decompose,
)
from abwave.errors import AccuracyWarning, DomainError, InvalidArgumentError
from oracles import j_half, j_half_prime, j_minus_half, j_three_halves, jv_asymptotic, jv_series

ORDERS = (0.3, 0.5, 1.3, 2.7, 4.7, 5.5, 7.9, 10.2, 15.5, 20.5)
RADII = tuple(np.geomspace(0.05, 1000.0, 10))


# oracle self-consistency: the two independent routes agree where both are valid


@pytest.mark.parametrize("nu", (0.3, 5.5, 20.5))
@pytest.mark.parametrize("x", (150.0, 400.0, 1000.0))
def test_oracle_routes_agree(nu, x):
    assert jv_series(nu, x) == pytest.approx(jv_asymptotic(nu, x), rel=1e-13, abs=1e-16)


def test_oracle_matches_closed_form():
    for x in (0.1, 3.0, 77.0):
        assert jv_series(0.5, x) == pytest.approx(float(j_half(x)), rel=1e-14)


# values


@pytest.mark.parametrize("nu", ORDERS)
def test_lattice_against_series_oracle(nu):
    for r in RADII:
        ref = jv_series(nu, r)
        assert abs(bessel_j(nu, r) - ref) <= 1e-10 * abs(ref)


def test_vectorised_matches_scalar():
    r = np.linspace(0.0, 60.0, 301)
    v = bessel_j(2.3, r)
    assert v.shape == r.shape
    assert all(v[i] == bessel_j(2.3, float(r[i])) for i in (0, 17, 150, 300))


@pytest.mark.parametrize(
    "nu,r,expected",
    [(2.5, 0.0, 0.0), (0.0, 0.0, 1.0)],
)
def test_origin_values(nu, r, expected):
    assert bessel_j(nu, r) == expected


def test_half_integer_zero_at_pi():
    assert abs(bessel_j(0.5, math.pi)) < 1e-15


@pytest.mark.parametrize("fn,nu", [(j_half, 0.5), (j_minus_half, -0.5), (j_three_halves, 1.5)])
def test_half_integer_closed_forms(fn, nu):
    r = np.geomspace(0.01, 900.0, 400)
    err = np.abs(bessel_j(nu, r) - fn(r))
    scale = np.maximum(np.abs(fn(r)), np.sqrt(2.0 / (np.pi * r)) * 1e-3)
    assert np.max(err / scale) < 1e-10


def test_small_argument_envelope_law():
    # |J_nu(r)| 2^nu Gamma(nu+1/2) Gamma(1/2) / r^nu stays below one constant on r <= nu/2
    ratios = []
    for nu in (0.3, 1.7, 5.5, 20.5):
        r = np.linspace(1e-3, nu / 2, 200)
        ratios.append(np.max(np.abs(bessel_j(nu, r)) / envelope_bound(nu, r)))
    assert max(ratios) <= 1.5


@pytest.mark.parametrize("nu", (0.3, 1.7, 5.5))
def test_envelope_ratio_limit_at_origin(nu):
    # as r -> 0 the ratio tends to Gamma(nu+1/2) Gamma(1/2) / (Gamma(nu+1) (1 + 1/(nu+1/2)))
    limit = math.gamma(nu + 0.5) * math.sqrt(math.pi) / (math.gamma(nu + 1.0) * (1.0 + 1.0 / (nu + 0.5)))
    assert bessel_j(nu, 1e-6) / float(envelope_bound(nu, 1e-6)) == pytest.approx(limit, rel=1e-9)


def test_envelope_bound_at_large_order_small_argument():
    assert abs(bessel_j(10.5, 1.0)) <= float(envelope_bound(10.5, 1.0))


def test_derivative_envelope():
    r = np.linspace(0.01, 3.0, 100)
    for nu in (0.7, 3.2):
        assert np.all(np.abs(bessel_j_prime(nu, r)) <= envelope_bound_prime(nu, r))


# recurrences and derivatives


@given(nu=st.floats(1.0, 40.0), r=st.floats(0.5, 800.0))
def test_three_term_recurrence(nu, r):
    j = bessel_j(nu, r)
    if abs(j) <= 1e-6:
        return
    lhs = bessel_j(nu - 1.0, r) + bessel_j(nu + 1.0, r)
    assert lhs == pytest.approx(2.0 * nu / r * j, rel=1e-8)


@given(nu=st.floats(0.0, 30.0), r=st.floats(0.5, 500.0))
def test_derivative_against_five_point_difference(nu, r):
    h = 1e-3 * max(1.0, r) ** 0.5 * min(1.0, r)
    fd = (bessel_j(nu, r - 2 * h) - 8 * bessel_j(nu, r - h) + 8 * bessel_j(nu, r + h)
          - bessel_j(nu, r + 2 * h)) / (12 * h)
    d = bessel_j_prime(nu, r)
    scale = max(abs(d), 1e-3 * math.sqrt(2.0 / (math.pi * r)), 1e-300)
    assert abs(d - fd) <= 1e-6 * scale


def test_derivative_closed_form():
    r = math.pi / 2
    assert bessel_j_prime(0.5, r) == pytest.approx(float(j_half_prime(r)), rel=1e-12)


def test_derivative_near_origin():
    assert abs(bessel_j_prime(0.0, 1e-8)) < 1e-8
    assert bessel_j_prime(1.0, 0.0) == 0.5


def test_derivative_envelope_slope_large_argument():
    r = np.geomspace(1e2, 1e4, 15)
    env = [max(abs(bessel_j_prime(7.3, x + o)) for o in np.linspace(0, 2 * np.pi, 24)) for x in r]
    slope = np.polyfit(np.log(r), np.log(env), 1)[0]
    assert abs(slope + 0.5) <= 0.05


# errors


@pytest.mark.parametrize("nu,r", [(math.nan, 1.0), (1.0, math.inf), (1.0, -1.0), (-1.5, 1.0)])
def test_invalid_arguments(nu, r):
    with pytest.raises(InvalidArgumentError):
        bessel_j(nu, r)


def test_negative_order_singular_at_origin():
    with pytest.raises(DomainError):
        bessel_j(-0.5, 0.0)


def test_derivative_domain_error():
    with pytest.raises(DomainError):
        bessel_j_prime(0.5, 0.0)


def test_accuracy_warning_beyond_range():
    with pytest.warns(AccuracyWarning):
        bessel_j(5.0, 2e5)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        bessel_j(5.0, 1e3)


# cutoff


@pytest.mark.parametrize("x,expected", [(0.25, 1.0), (0.5, 1.0), (2.0, 0.0), (1.0, 0.0), (-0.3, 1.0)])
def test_cutoff_values(x, expected):
    assert cutoff_chi(x) == expected


def test_cutoff_transition():
    x = np.linspace(0.5, 1.0, 201)
    v = cutoff_chi(x)
    assert 0.0 < cutoff_chi(0.75) < 1.0
    assert np.all(np.diff(v) <= 0.0)


@given(st.floats(-3.0, 3.0))
def test_cutoff_even_and_bounded(x):
    assert cutoff_chi(x) == cutoff_chi(-x)
    assert 0.0 <= cutoff_chi(x) <= 1.0


# Schlafli split


def test_integer_order_remainder_vanishes():
    assert schlafli_decompose(3.0, 17.2, 0.1).e == 0.0


def test_split_reconstructs_half_order_at_100():
    s = schlafli_decompose(0.5, 100.0, 0.1)
    assert abs(s.total - jv_series(0.5, 100.0)) <= 1e-8


@pytest.mark.parametrize("nu", (0.3, 1.3, 5.5, 20.5))
@pytest.mark.parametrize("r", (1.0, 9.7, 130.0, 1000.0))
@pytest.mark.parametrize("delta", (0.05, 0.1, 0.25))
def test_split_reconstruction_and_reality(nu, r, delta):
    s = schlafli_decompose(nu, r, delta)
    assert abs(s.total.real - bessel_j(nu, r)) <= 1e-8
    assert abs((s.j1 + s.j2).imag) <= 1e-8
    d = s.j1_prime + s.j2_prime + s.e_prime
    assert abs(d.real - bessel_j_prime(nu, r)) <= 1e-7


@pytest.mark.parametrize("delta", (0.0, 0.3, -0.1))
def test_split_rejects_delta(delta):
    with pytest.raises(InvalidArgumentError):
        schlafli_decompose(1.3, 10.0, delta)


def test_split_rejects_nonpositive_radius():
    with pytest.raises(InvalidArgumentError):
        schlafli_decompose(1.3, 0.0)


def test_remainder_decay_slope():
    r = np.geomspace(10.0, 1e4, 9)
    e = [abs(schlafli_decompose(1.3, x).e) for x in r]
    slope = np.polyfit(np.log(r), np.log(e), 1)[0]
    assert abs(slope + 1.0) <= 0.1
