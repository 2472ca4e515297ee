import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gupnl.core import (
    GupParams,
    Method,
    RootTriple,
    cardano_roots,
    dispersion,
    forward_map,
    match_roots,
    minimal_length,
    negate_spectrum,
    numerical_minimal_length,
    oracle_roots,
    printed_pair_imaginary,
    root_sum_identity,
    same_root_set,
    uncertainty_product,
    vieta_ok,
    vieta_residuals,
)
from gupnl.errors import DomainError


def bisect_real_root(P, beta, lo, hi, iters=200):
    f = lambda p: beta * p**3 + p - P
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if f(lo) * f(mid) <= 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def golden_section(f, a, b, tol=1e-12):
    g = (math.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    while b - a > tol * (abs(a) + abs(b)):
        if f(c) < f(d):
            b, d = d, c
            c = b - g * (b - a)
        else:
            a, c = c, d
            d = a + g * (b - a)
    return 0.5 * (a + b)


# frozen from np.roots([1, 0, 1, -1]) and bisection on [0, 1]
P1_BETA1_REAL = 0.6823278038280193
P1_BETA1_IMAG = 1.1615413999972518


def test_params_validation():
    with pytest.raises(DomainError):
        GupParams(0.0)
    with pytest.raises(DomainError):
        GupParams(-1.0)
    with pytest.raises(DomainError):
        GupParams(1.0, hbar=0.0)
    assert GupParams(2.0, hbar=0.5).beta0 == pytest.approx(1.5)


def test_bisection_oracle_frozen_value():
    assert bisect_real_root(1.0, 1.0, 0.0, 1.0) == pytest.approx(P1_BETA1_REAL, rel=1e-14)


def test_zero_P_exact():
    r = cardano_roots(0.0, GupParams(0.25))
    assert r.roots == (0j, 2j, -2j)


def test_closed_form_P1_beta1():
    r = cardano_roots(1.0, GupParams(1.0))
    assert r.method is Method.CLOSED_FORM
    assert r.p1 == pytest.approx(P1_BETA1_REAL, rel=1e-12)
    assert r.p2 == pytest.approx(complex(-P1_BETA1_REAL / 2, P1_BETA1_IMAG), rel=1e-12)
    assert r.p3 == r.p2.conjugate()


def test_companion_eigenvalue_oracle_matches_numpy_roots():
    expected = sorted(np.roots([1.0, 0.0, 1.0, -1.0]), key=lambda z: (round(z.imag, 6)))
    r = oracle_roots(1.0, GupParams(1.0))
    got = sorted(r.roots, key=lambda z: (round(z.imag, 6)))
    for a, b in zip(got, expected):
        assert abs(a - b) < 1e-12


def test_tiny_beta_first_order():
    r = cardano_roots(1.0, GupParams(1e-6))
    assert r.p1 == pytest.approx(0.9999990000, abs=1e-10)
    assert r.p1 == pytest.approx(1 - 1e-6 + 3e-12, rel=1e-15)


def test_series_path_reported():
    r = cardano_roots(1.0, GupParams(1e-12))
    assert r.method is Method.SERIES
    assert same_root_set(r, oracle_roots(1.0, GupParams(1e-12)))


def test_oracle_examples():
    p = GupParams(1.0)
    assert oracle_roots(1.0, p).p1 == pytest.approx(bisect_real_root(1.0, 1.0, 0.0, 1.0), rel=1e-13)
    zero = oracle_roots(0.0, p)
    assert zero.p1 == 0.0
    assert abs(zero.p2 - 1j) < 1e-15
    neg = oracle_roots(-1.0, p)
    assert same_root_set(neg, negate_spectrum(oracle_roots(1.0, p)))


def test_domain_errors():
    with pytest.raises(DomainError):
        cardano_roots(math.inf, GupParams(1.0))
    with pytest.raises(DomainError):
        oracle_roots(math.nan, GupParams(1.0))
    with pytest.raises(DomainError):
        forward_map(complex(math.inf, 0), GupParams(1.0))


def test_forward_map_examples():
    assert forward_map(1.0, GupParams(0.1)) == pytest.approx(1.1)
    assert abs(forward_map(P1_BETA1_REAL, GupParams(1.0)) - 1.0) < 1e-9
    assert forward_map(1j, GupParams(1.0)) == 0


def test_negate_spectrum():
    p = GupParams(1.0)
    r = cardano_roots(1.0, p)
    neg = negate_spectrum(r)
    assert neg.source_P == -1.0
    assert neg.p2.imag > 0 > neg.p3.imag
    assert same_root_set(neg, cardano_roots(-1.0, p))
    for q in neg.roots:
        assert abs(forward_map(q, p) + 1.0) < 1e-12
    z = cardano_roots(0.0, p)
    assert same_root_set(negate_spectrum(z), z)


def test_root_sum_identity_examples():
    assert root_sum_identity(cardano_roots(1.0, GupParams(1.0))) < 1e-10
    assert root_sum_identity(cardano_roots(0.0, GupParams(1.0))) == 0.0
    r = oracle_roots(7.5, GupParams(0.03))
    assert root_sum_identity(r) < 1e-10 * 7.5


def test_printed_bracket_discrepancy():
    printed, vieta = printed_pair_imaginary(1.0, GupParams(1.0))
    assert vieta == pytest.approx(P1_BETA1_IMAG, rel=1e-12)
    assert printed == pytest.approx(vieta - math.sqrt(3) / 4 * P1_BETA1_REAL, rel=1e-12)
    printed0, vieta0 = printed_pair_imaginary(0.0, GupParams(1.0))
    assert printed0 == pytest.approx(vieta0, rel=1e-15)


def test_match_roots_reports_permutation():
    p = GupParams(2.0)
    a = cardano_roots(3.0, p)
    b = RootTriple(a.p1, a.p3, a.p2, a.source_P, a.beta, Method.ORACLE)
    perm, diffs, ok = match_roots(a, b)
    assert ok and perm == (0, 2, 1) and max(diffs) == 0


def test_uncertainty_examples():
    assert uncertainty_product(1.0, GupParams(0.1)) == pytest.approx(0.65)
    assert uncertainty_product(1.0, GupParams(1 / 3)) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        uncertainty_product(0.0, GupParams(1.0))


def test_minimal_length_examples():
    assert minimal_length(GupParams(1 / 3)) == pytest.approx(1.0)
    assert minimal_length(GupParams(3.0)) == pytest.approx(3.0)
    assert minimal_length(GupParams(0.02)) == pytest.approx(0.244949, abs=1e-6)


@pytest.mark.parametrize("beta", [0.02, 1 / 3, 1.0, 5.0, 1e-4])
def test_minimal_length_golden_section_oracle(beta):
    params = GupParams(beta)
    t = golden_section(lambda t: uncertainty_product(math.exp(t), params), -20.0, 20.0)
    dx = uncertainty_product(math.exp(t), params)
    assert dx == pytest.approx(minimal_length(params), rel=1e-8)
    _, numeric = numerical_minimal_length(params)
    assert numeric == pytest.approx(dx, rel=1e-8)


def test_dispersion():
    assert dispersion(2.0, 1.0) == 2.0
    assert dispersion(0.0, 5.0) == 0.0
    assert dispersion(forward_map(1.0, GupParams(0.1)), 0.5) == pytest.approx(1.21)
    with pytest.raises(DomainError):
        dispersion(1.0, 0.0)


log_P = st.floats(-6, 6).map(lambda e: 10.0**e)
signed_P = st.tuples(log_P, st.sampled_from([-1.0, 1.0])).map(lambda t: t[0] * t[1])
log_beta = st.floats(-12, 6).map(lambda e: 10.0**e)


@settings(max_examples=300, deadline=None)
@given(signed_P, log_beta)
def test_one_real_root_and_conjugate_pair(P, beta):
    for solver in (cardano_roots, oracle_roots):
        r = solver(P, GupParams(beta))
        assert isinstance(r.p1, float)
        assert r.p2.imag > 0
        assert r.p3 == r.p2.conjugate()
        assert abs(r.p2.real + r.p1 / 2) <= 1e-12 * max(1.0, abs(r.p2))


@settings(max_examples=300, deadline=None)
@given(signed_P, log_beta)
def test_vieta_and_round_trip(P, beta):
    params = GupParams(beta)
    for solver in (cardano_roots, oracle_roots):
        r = solver(P, params)
        assert vieta_ok(r), vieta_residuals(r)
        for q in r.roots:
            assert abs(forward_map(q, params) - P) <= 1e-9 * max(1.0, abs(P))


@settings(max_examples=300, deadline=None)
@given(signed_P, log_beta)
def test_solvers_agree_and_odd_symmetry(P, beta):
    params = GupParams(beta)
    c = cardano_roots(P, params)
    assert same_root_set(c, oracle_roots(P, params))
    assert same_root_set(cardano_roots(-P, params), negate_spectrum(c))


@settings(max_examples=200, deadline=None)
@given(st.floats(-8, 8).map(lambda e: 10.0**e), st.floats(-8, 8).map(lambda e: 10.0**e), log_beta)
def test_forward_map_strictly_increasing_on_reals(a, gap, beta):
    params = GupParams(beta)
    b = a + gap
    if b > a:
        assert forward_map(b, params) > forward_map(a, params)
        assert forward_map(-a, params) > forward_map(-b, params)
