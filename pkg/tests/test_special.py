import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ml_oracle import ml_asymptotic_mp, ml_oracle, ml_series_mp
from mlnoise.errors import ConvergenceError, DomainError
from mlnoise.special import (
    DEFAULT_CONFIG,
    MLEvalConfig,
    _asymptotic,
    _contour,
    _series,
    gamma_fn,
    lgamma_fn,
    mittag_leffler,
    mittag_leffler_array,
)

LAMBDAS = (0.3, 0.6, 0.9, 1.0, 1.2, 1.5, 1.8)
XS = np.logspace(-3, 4, 40)


# ---- gamma -----------------------------------------------------------------

@pytest.mark.parametrize("x, expected", [(1.0, 1.0), (5.0, 24.0), (0.5, math.sqrt(math.pi))])
def test_gamma_examples(x, expected):
    assert gamma_fn(x) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("lo, hi", [(1e-12, 0.5), (0.5, 2.0), (2.0, 20.0), (20.0, 120.0), (120.0, 171.6)])
def test_gamma_relative_error_vs_mpmath(lo, hi):
    rng = np.random.default_rng(int(lo * 1000) + 7)
    xs = np.concatenate([rng.uniform(lo, hi, 400), np.geomspace(lo, hi, 100)])
    with mp.workdps(40):
        worst = max(abs(gamma_fn(x) / float(mp.gamma(x)) - 1.0) for x in xs)
    assert worst <= 1e-13


def test_lgamma_vs_mpmath():
    xs = np.concatenate([np.geomspace(1e-8, 1e6, 300), [1.0, 2.0]])
    with mp.workdps(40):
        for x in xs:
            ref = float(mp.loggamma(x))
            assert abs(lgamma_fn(x) - ref) <= 1e-13 * max(1.0, abs(ref))


@pytest.mark.parametrize("x", [0.0, -1.0, -2.5, float("nan"), float("inf")])
def test_gamma_domain(x):
    with pytest.raises(DomainError):
        gamma_fn(x)
    with pytest.raises(DomainError):
        lgamma_fn(x)


def test_gamma_overflow():
    with pytest.raises(OverflowError):
        gamma_fn(172.0)


# ---- Mittag-Leffler: examples and anchors ------------------------------------

@pytest.mark.parametrize("lam", [0.1, 0.6, 1.0, 1.5, 1.99])
def test_value_at_zero(lam):
    assert mittag_leffler(lam, 0.0) == 1.0
    assert mittag_leffler(lam, -0.0) == 1.0


def test_exponential_case():
    assert mittag_leffler(1.0, -1.0) == pytest.approx(0.36787944117144233, rel=1e-15)
    for x in np.linspace(0.0, 30.0, 301):
        assert abs(mittag_leffler(1.0, -x) - math.exp(-x)) <= 1e-10 * math.exp(-x)


def test_half_closed_form():
    # E_1/2(-x) = exp(x^2) erfc(x), oracle via mpmath's erfc
    with mp.workdps(40):
        ref = float(mp.e * mp.erfc(1))
    assert ref == pytest.approx(0.42758357615580700, rel=1e-15)
    assert mittag_leffler(0.5, -1.0) == pytest.approx(ref, rel=1e-10)
    for x in np.linspace(0.05, 10.0, 60):
        with mp.workdps(40):
            r = float(mp.exp(mp.mpf(x) ** 2) * mp.erfc(x))
        assert mittag_leffler(0.5, -x) == pytest.approx(r, rel=1e-10)


def test_large_argument_example():
    val = mittag_leffler(0.6, -1000.0)
    assert val == pytest.approx(ml_oracle(0.6, 1000.0), rel=1e-10)
    # leading asymptotic term is a good but not exact approximation
    assert val == pytest.approx(1.0 / (1000.0 * math.gamma(0.4)), rel=1e-2)


@pytest.mark.parametrize("lam", LAMBDAS)
def test_oracle_grid(lam):
    worst = 0.0
    for x in XS:
        ref = ml_oracle(lam, float(x)) if lam != 1.0 else math.exp(-x)
        if ref == 0.0:
            continue
        worst = max(worst, abs(mittag_leffler(lam, -x) - ref) / abs(ref))
    assert worst <= DEFAULT_CONFIG.rel_tol


# ---- invariants ---------------------------------------------------------------

@pytest.mark.parametrize("lam", [0.2, 0.5, 0.8, 1.0])
def test_complete_monotonicity(lam):
    xs = np.logspace(-4, 6, 200)
    vals = mittag_leffler_array(lam, -xs)
    if lam == 1.0:
        # exp underflows to 0 far out; check where it is representable
        keep = vals > 0
        xs, vals = xs[keep], vals[keep]
    assert np.all(vals > 0)
    assert np.all(vals <= 1.0)
    assert np.all(np.diff(vals) < 0)


def test_oscillation_lambda_18():
    vals = mittag_leffler_array(1.8, -np.linspace(1.0, 100.0, 400))
    assert vals.min() < 0


def test_array_matches_scalar_and_shape():
    z = -np.logspace(-2, 3, 12).reshape(3, 4)
    arr = mittag_leffler_array(0.7, z)
    assert arr.shape == (3, 4)
    assert all(arr.flat[i] == mittag_leffler(0.7, z.flat[i]) for i in range(12))


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 1.95), st.floats(0.0, 1e5))
def test_property_finite_and_bounded(lam, x):
    v = mittag_leffler(lam, -x)
    assert math.isfinite(v)
    # |E_lam(-x)| <= 1 for lam <= 1; for lam in (1,2) the ACF law is bounded by its lag-0 value
    assert abs(v) <= 1.0 + 1e-12


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(0.0, 500.0), st.floats(0.0, 500.0))
def test_property_monotone_below_one(lam, a, b):
    lo, hi = sorted((a, b))
    assert mittag_leffler(lam, -hi) <= mittag_leffler(lam, -lo) + 1e-15


# ---- domain and failure paths --------------------------------------------------

@pytest.mark.parametrize("lam", [0.0, 2.0, -0.5, 2.5, float("nan")])
def test_lambda_domain(lam):
    with pytest.raises(DomainError):
        mittag_leffler(lam, -1.0)


@pytest.mark.parametrize("z", [1e-9, 1.0, float("nan"), float("-inf")])
def test_argument_domain(z):
    with pytest.raises(DomainError):
        mittag_leffler(0.5, z)


def test_config_validation():
    with pytest.raises(DomainError):
        MLEvalConfig(rel_tol=0.0)
    with pytest.raises(DomainError):
        MLEvalConfig(max_series_terms=0)
    with pytest.raises(DomainError):
        MLEvalConfig(series_asymptotic_switch=-1.0)


def test_convergence_error_is_raised(monkeypatch):
    import mlnoise.special as sp

    monkeypatch.setattr(sp, "_contour", lambda *a, **k: None)
    cfg = MLEvalConfig(max_series_terms=3)
    with pytest.raises(ConvergenceError):
        sp.mittag_leffler(0.9, -10.0, cfg)


# ---- each branch against the oracle where it accepts ----------------------------

def _branch_cases():
    for lam in (0.3, 0.6, 0.9, 1.2, 1.5, 1.8):
        for x in np.logspace(-3, 4, 15):
            yield lam, float(x)


def test_series_branch():
    accepted = 0
    for lam, x in _branch_cases():
        v = _series(lam, x, DEFAULT_CONFIG)
        if v is not None:
            accepted += 1
            assert v == pytest.approx(ml_oracle(lam, x), rel=DEFAULT_CONFIG.rel_tol)
    assert accepted >= 40


def test_asymptotic_branch():
    accepted = 0
    for lam, x in _branch_cases():
        v = _asymptotic(lam, x, x ** (1 / lam), DEFAULT_CONFIG)
        if v is not None:
            accepted += 1
            assert v == pytest.approx(ml_oracle(lam, x), rel=DEFAULT_CONFIG.rel_tol)
    assert accepted >= 25


def test_contour_branch_everywhere():
    for lam, x in _branch_cases():
        v = _contour(lam, x, x ** (1 / lam))
        assert v is not None
        assert v == pytest.approx(ml_oracle(lam, x), rel=DEFAULT_CONFIG.rel_tol)


def test_series_guard_rejects_cancellation():
    # deep in the alternating regime the guard must refuse rather than return garbage
    assert _series(0.6, 1000.0, DEFAULT_CONFIG) is None


def test_oracle_routes_agree():
    # the two independent oracle evaluations agree in their overlap
    for lam, x in ((0.6, 20.0), (1.5, 1000.0), (1.8, 5000.0)):  # y = x**(1/lam) in [60, 200]
        with mp.workdps(40):
            a = ml_series_mp(lam, x)
            b = ml_asymptotic_mp(lam, x, dps=40)
            assert abs(a - b) <= mp.mpf(10) ** -25 * max(abs(a), mp.mpf(10) ** -30)
