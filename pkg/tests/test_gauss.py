import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from monocorr import gauss
from monocorr.errors import PreconditionError
from monocorr.gauss import GaussianPair, Halfspace

thresholds = st.floats(-5.0, 5.0, allow_nan=False)
correlations = st.floats(0.0, 0.999, allow_nan=False)


def scipy_orthant(t, s, rho):
    mvn = stats.multivariate_normal(mean=[0.0, 0.0], cov=[[1.0, rho], [rho, 1.0]])
    return float(mvn.cdf([-t, -s]))


def test_univariate_helpers():
    assert gauss.pdf(0.0) == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-15)
    assert gauss.upper_tail(0.0) == 0.5
    assert gauss.upper_tail(30.0) > 0.0
    assert gauss.log_upper_tail(30.0) == pytest.approx(math.log(gauss.upper_tail(30.0)), rel=1e-12)
    assert gauss.log_e_over_pdf_squared(0.0) == pytest.approx(1 + math.log(2 * math.pi), rel=1e-15)
    assert gauss.log_e_over_pdf_squared(3.0) == pytest.approx(10 + math.log(2 * math.pi), rel=1e-15)


def test_bivariate_density_value():
    assert gauss.bivariate_density(0.5, 1.0, 1.0) == pytest.approx(0.0943538977, rel=1e-9)
    at_zero = gauss.bivariate_density(0.0, 1.0, -2.0)
    assert at_zero == pytest.approx(gauss.pdf(1.0) * gauss.pdf(-2.0), rel=1e-14)


def test_bivariate_density_matches_scipy():
    for r, t, s in [(0.3, 0.5, -1.0), (0.9, 2.0, 1.5), (0.0, 0.0, 0.0)]:
        mvn = stats.multivariate_normal(mean=[0, 0], cov=[[1, r], [r, 1]])
        assert gauss.bivariate_density(r, t, s) == pytest.approx(mvn.pdf([t, s]), rel=1e-12)


def test_sheppard_and_plackett():
    assert gauss.plackett_orthant(GaussianPair(0, 0, 0.5)) == pytest.approx(1 / 3, abs=1e-15)
    for rho in (0.0, 0.25, 1.0):
        assert gauss.sign_cov(GaussianPair(0, 0, rho)) == pytest.approx(2 / math.pi * math.asin(rho), abs=1e-14)


def test_frozen_values():
    assert gauss.orthant_excess(1.0, -0.5, 0.3) == pytest.approx(0.023551983072452272, rel=1e-12)
    assert gauss.sign_cov(GaussianPair(0.5, -1.0, 0.7)) == pytest.approx(0.18304283728474235, rel=1e-12)
    assert gauss.gamma_ratio(GaussianPair(1.0, 2.0, 0.5)) == pytest.approx(35.48052643165743, rel=1e-12)
    assert gauss.gamma_ratio(GaussianPair(0.0, 0.0, 0.1)) == pytest.approx(4.00669684646, rel=1e-11)


def test_gamma_endpoints():
    assert gauss.gamma_ratio(GaussianPair(0, 0, 1.0)) == pytest.approx(2 * math.pi, rel=1e-14)
    assert gauss.gamma_ratio(GaussianPair(1.5, -0.5, 0.0)) == 4 * 2.5 * 1.5
    # rho -> 0 is continuous
    near = gauss.gamma_ratio(GaussianPair(1.5, -0.5, 1e-6))
    assert near == pytest.approx(15.0, rel=1e-5)


def test_rho_one_closed_form():
    for t, s in [(0.5, -1.0), (2.0, 2.0), (-3.0, 1.0)]:
        assert gauss.orthant_excess(t, s, 1.0) == gauss.upper_tail(max(t, s)) * gauss.upper_tail(-min(t, s))
        near = gauss.orthant_excess(t, s, 1 - 1e-9)
        assert near == pytest.approx(gauss.orthant_excess(t, s, 1.0), abs=1e-5)


def test_negative_correlation_is_supported_by_excess_only():
    p = GaussianPair(0.3, 0.2, -0.4)
    assert gauss.plackett_orthant(p) == pytest.approx(scipy_orthant(0.3, 0.2, -0.4), abs=1e-8)
    with pytest.raises(PreconditionError):
        gauss.sign_cov(p)
    with pytest.raises(PreconditionError):
        gauss.gamma_ratio(p)


def test_pair_validation():
    with pytest.raises(ValueError):
        GaussianPair(0.0, 0.0, 1.5)
    with pytest.raises(ValueError):
        GaussianPair(float("nan"), 0.0, 0.5)


def test_halfspace_validation_and_influences():
    with pytest.raises(ValueError):
        Halfspace((1.0, 1.0), 0.0)
    H = Halfspace.from_direction([3.0, 4.0], 0.5)
    assert H.w == pytest.approx((0.6, 0.8))
    inf = gauss.halfspace_influences(H)
    assert inf.signed == pytest.approx((2 * gauss.pdf(0.5) * 0.6, 2 * gauss.pdf(0.5) * 0.8))
    assert inf.indicator == pytest.approx((gauss.pdf(0.5) * 0.6, gauss.pdf(0.5) * 0.8))


def test_ltf_pair_self():
    rep = gauss.ltf_pair_report(Halfspace((1.0, 0.0), 0.0), Halfspace((1.0, 0.0), 0.0))
    assert rep.cov == 0.25
    assert rep.rhs_core == pytest.approx((1 / (2 * math.pi)) / (1 + math.log(2 * math.pi)), rel=1e-14)
    assert rep.ratio == pytest.approx(4.4577268718112775, rel=1e-13)
    assert rep.metadata["w1_signed"] == pytest.approx(4 * rep.metadata["w1"])


def test_ltf_pair_orthogonal_is_vacuous():
    rep = gauss.ltf_pair_report(Halfspace((1.0, 0.0), 0.3), Halfspace((0.0, 1.0), -0.2))
    assert rep.cov == 0.0 and rep.vacuous


def test_ltf_pair_rejects_negative_correlation():
    with pytest.raises(PreconditionError):
        gauss.ltf_pair_report(Halfspace((1.0, 0.0), 0.0), Halfspace((-1.0, 0.0), 0.0))


def test_tightness_report():
    rep = gauss.proposition1_report(2.0)
    assert rep.cov == pytest.approx(gauss.upper_tail(2.0) ** 2, rel=1e-15)
    assert rep.ratio == pytest.approx(0.8877601369540461, rel=1e-13)
    assert rep.metadata["bound_holds"]
    with pytest.raises(PreconditionError):
        gauss.proposition1_report(0.5)


def test_lemma_d1_corner():
    res = gauss.lemmaD1_check(1.0, 1.0, 100)
    assert res.pass_ and res.min_h == pytest.approx(0.4247905887793227, rel=1e-13)
    with pytest.raises(PreconditionError):
        gauss.lemmaD1_check(0.5, 2.0, 10)


def test_grid_min_small():
    res = gauss.gamma_grid_min([-1.0, 0.0, 1.0], [-1.0, 0.0, 1.0], [0.5, 1.0])
    assert res.points == 18
    assert res.argmin == GaussianPair(0.0, 0.0, 0.5)
    assert res.min == pytest.approx(4 * (1 / 3 - 1 / 4) * 2 * math.pi / 0.5, rel=1e-13)


def test_parse_axis():
    assert gauss.parse_axis("-1:1:3") == [-1.0, 0.0, 1.0]
    assert gauss.parse_axis("2:5:1") == [2.0]
    with pytest.raises(ValueError):
        gauss.parse_axis("0:1")


@settings(max_examples=60)
@given(thresholds, thresholds, correlations)
def test_orthant_matches_conditioning(t, s, rho):
    p = GaussianPair(t, s, rho)
    assert gauss.plackett_orthant(p) == pytest.approx(gauss.orthant_by_conditioning(p), abs=1e-12)


@settings(max_examples=40)
@given(thresholds, thresholds, correlations)
def test_orthant_matches_scipy(t, s, rho):
    assert gauss.plackett_orthant(GaussianPair(t, s, rho)) == pytest.approx(scipy_orthant(t, s, rho), abs=1e-7)


@given(thresholds, thresholds, correlations)
def test_excess_symmetric_and_nonnegative(t, s, rho):
    e = gauss.orthant_excess(t, s, rho)
    assert e >= 0
    assert e == pytest.approx(gauss.orthant_excess(s, t, rho), abs=1e-15)
    assert e == pytest.approx(gauss.orthant_excess(-t, -s, rho), abs=1e-14)


@given(thresholds, thresholds, st.floats(0.0, 0.95), st.floats(0.01, 0.05))
def test_excess_increasing_in_rho(t, s, rho, step):
    assert gauss.orthant_excess(t, s, rho + step) >= gauss.orthant_excess(t, s, rho) - 1e-15


@given(thresholds, thresholds, st.floats(0.01, 1.0))
def test_gamma_above_case_floor(t, s, rho):
    # every grid scan stays above 2/e, the weakest of the case constants
    assert gauss.gamma_ratio(GaussianPair(t, s, rho)) >= 2 * math.exp(-1)


@given(thresholds, thresholds, st.floats(0.01, 1.0))
def test_gamma_consistent_with_sign_cov(t, s, rho):
    p = GaussianPair(t, s, rho)
    expect = gauss.sign_cov(p) * (1 + abs(t)) * (1 + abs(s)) / (rho * gauss.pdf(t) * gauss.pdf(s))
    assert gauss.gamma_ratio(p) == pytest.approx(expect, rel=1e-9)


@given(st.floats(-4, 4), st.floats(-4, 4), st.floats(0.0, 0.999))
def test_h_integrand_is_density_ratio(t, s, r):
    ratio = gauss.h_integrand(r, t, s)
    assert ratio == pytest.approx(gauss.bivariate_density(r, t, s) / (gauss.pdf(t) * gauss.pdf(s)), rel=1e-11)
