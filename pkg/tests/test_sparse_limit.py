import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from clarity import distributions as D
from clarity import sparse_limit as S
from clarity.errors import DomainError

mpmath.mp.dps = 40

GAMMA_TABLE = {0.5: 2.2370, 0.75: 1.7383, 1.0: 1.3770, 1.25: 1.0809, 1.5: 0.8120}


def J_oracle(alpha, x):
    return float(mpmath.nsum(lambda r: mpmath.mpf(x) ** (2 * r) / (mpmath.factorial(2 * r) * (2 * r - alpha)),
                             [1, mpmath.inf]))


# -- J and gamma -----------------------------------------------------------

@pytest.mark.parametrize("alpha", [-2.0, -0.5, 0.5, 1.0, 1.5, 1.99])
@pytest.mark.parametrize("x", [1e-3, 0.7, 1.377, 5.0, 40.0, 300.0])
def test_J_against_mpmath(alpha, x):
    assert S.J_alpha(alpha, x) == pytest.approx(J_oracle(alpha, x), rel=1e-13)


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-3, 60.0))
def test_J_minus_one_closed_form(x):
    # sum x^{2r} / ((2r+1)!) = sinh(x)/x - 1
    expected = math.sinh(x) / x - 1.0 if x > 1e-2 else x * x / 6 + x**4 / 120 + x**6 / 5040
    assert S.J_alpha(-1.0, x) == pytest.approx(expected, rel=1e-13)


def test_J_is_even_and_vectorised():
    x = np.array([-3.0, 0.0, 3.0])
    v = S.J_alpha(1.0, x)
    assert v.shape == (3,) and v[1] == 0.0 and v[0] == v[2]
    with pytest.raises(DomainError):
        S.J_alpha(2.0, 1.0)


def test_J_asymptotics():
    # the expansion improves with order and with x
    assert S.J_alpha(1.0, 500.0) / S.J_alpha_asymptotic(1.0, 500.0, order=0) == pytest.approx(1.0, abs=5e-3)
    assert S.J_alpha(1.0, 650.0) / S.J_alpha_asymptotic(1.0, 650.0, order=3) == pytest.approx(1.0, abs=1e-8)
    assert S.J_alpha(1.0, 20.0) / S.J_alpha_asymptotic(1.0, 20.0, order=2) == pytest.approx(1.0037, abs=1e-4)
    # the leading term alone is 12% off at x = 20
    assert S.J_alpha(1.0, 20.0) / S.J_alpha_asymptotic(1.0, 20.0, order=0) == pytest.approx(1.1191, abs=1e-4)
    assert S.J_alpha(1.0, 705.0) == S.J_alpha_asymptotic(1.0, 705.0)
    assert math.isinf(S.J_alpha_asymptotic(1.0, 800.0))


@pytest.mark.parametrize("alpha,expected", sorted(GAMMA_TABLE.items()))
def test_gamma_alpha_table(alpha, expected):
    g = S.gamma_alpha(alpha)
    assert g == pytest.approx(expected, abs=1e-3)
    assert alpha * J_oracle(alpha, g) == pytest.approx(1.0, abs=1e-12)


def test_gamma_alpha_domain_and_monotone():
    vals = [S.gamma_alpha(a) for a in np.linspace(0.1, 1.9, 10)]
    assert np.all(np.diff(vals) < 0)
    for bad in (0.0, 2.0, -1.0):
        with pytest.raises(DomainError):
            S.gamma_alpha(bad)


# -- exceedance families ---------------------------------------------------

@pytest.mark.parametrize("alpha", [0.3, 1.0, 1.7])
def test_inverse_power_normaliser_closed_form(alpha):
    fam = S.ExceedanceFamily.inverse_power(alpha)
    assert S.exceedance_normalizer(fam) == pytest.approx(1.0 / S.inverse_power_constant(alpha), rel=1e-10)
    assert S.exceedance_integral(fam, lambda x: -math.expm1(-0.5 * x * x)) == pytest.approx(1.0, rel=1e-12)


def test_exceedance_integral_indicator():
    fam = S.ExceedanceFamily.inverse_power(1.0)
    w = lambda x: 1.0 if x >= 2.0 else 0.0  # noqa: E731
    # int_2^inf x^{-2} dx / sqrt(2 pi)
    assert S.exceedance_integral(fam, w, points=[2.0]) == pytest.approx(0.5 / math.sqrt(2 * math.pi), rel=1e-10)
    assert S.exceedance_integral(fam, w, normalized=False, points=[2.0]) == pytest.approx(0.5, rel=1e-10)


def test_cauchy_slab_normaliser():
    fam = S.ExceedanceFamily.cauchy_slab()
    # int (1 - exp(-x^2/2)) / (1 + x^2) = pi - 2 I0
    assert S.exceedance_normalizer(fam) == pytest.approx(math.pi - 2 * S.I0_cauchy_slab(), rel=1e-12)


def test_I0_closed_form():
    expected = 0.5 * math.pi * math.exp(0.5) * math.erfc(1 / math.sqrt(2))
    assert S.I0_cauchy_slab() == pytest.approx(expected, rel=1e-12)
    assert S.I0_cauchy_slab() == pytest.approx(0.8217724, abs=1e-7)


@pytest.mark.parametrize("alpha,beta", [(2.0, 1.0), (0.5, 3.0), (1.0, 0.2)])
def test_gamma_exp_constant_against_mpmath(alpha, beta):
    oracle = 2 * mpmath.quad(lambda x: mpmath.exp(-x * x / 2 - beta * x) * x ** (alpha - 1), [0, 1, mpmath.inf])
    assert S.gamma_exp_constant(alpha, beta) == pytest.approx(float(oracle), rel=1e-10)


def test_family_parse_and_validation():
    assert S.ExceedanceFamily.parse("gamma_exp:alpha=2,beta=1") == S.ExceedanceFamily.gamma_exp(2, 1)
    assert S.ExceedanceFamily.parse("cauchy_slab") == S.ExceedanceFamily.cauchy_slab()
    for bad in ("nope", "inverse_power:alpha=3", "log_exp:gamma=1", "log_exp"):
        with pytest.raises(DomainError):
            S.ExceedanceFamily.parse(bad)


# -- thresholds ------------------------------------------------------------

def test_delta_threshold_values():
    assert S.delta_threshold(S.ExceedanceFamily.cauchy_slab(), 10.0) == pytest.approx(
        math.log(20 * S.I0_cauchy_slab()) / 10, rel=1e-14)
    assert S.delta_threshold(S.ExceedanceFamily.cauchy_slab(), 10.0) == pytest.approx(0.279944, abs=1e-6)
    assert S.delta_threshold(S.ExceedanceFamily.inverse_power(1.0), -2.0) == pytest.approx(0.688520, abs=1e-6)
    L = math.log(math.log(100.0))
    assert S.delta_threshold(S.ExceedanceFamily.log_exp(1.0), 100.0) == pytest.approx(
        math.log(2 * L * math.log(100 / L)) / 100, rel=1e-14)
    assert S.delta_threshold(S.ExceedanceFamily.gamma_exp(2.0, 1.0), 100.0) == pytest.approx(0.066170, abs=1e-6)
    c = 3.0
    assert S.delta_threshold(S.ExceedanceFamily.gamma_exp(2.0, 1.0), 100.0, c=c) == pytest.approx(
        math.log(c * 100.0**2 / (2 * math.log(100.0))) / 100, rel=1e-14)


def test_delta_threshold_errors():
    with pytest.raises(DomainError):
        S.delta_threshold(S.ExceedanceFamily.inverse_power(1.0), 0.0)
    with pytest.raises(DomainError):
        S.delta_threshold(S.ExceedanceFamily.cauchy_slab(), 2.0)


def test_regular_variation_branches():
    assert S.delta_regular_variation(1.0, 4.0) == pytest.approx(S.gamma_alpha(1.0) / 4)
    assert S.delta_regular_variation(-2.0, 50.0) == pytest.approx(2 * math.log(50) / 50)
    with pytest.raises(DomainError):
        S.delta_regular_variation(2.5, 10.0)


# -- sparse families -------------------------------------------------------

@pytest.mark.parametrize("family,kw", [("cauchy", {}), ("atom_slab", {}), ("laplace_mixture", {}),
                                       ("normal_spike_slab", {"beta": 1.0}),
                                       ("student_t", {"alpha": 1.0}), ("student_t", {"alpha": 0.5})])
def test_sparse_rate_ratio_near_one(family, kw):
    exact, approx = S.sparse_rate_asymptotic(S.SparseFamilyProbe(family, 1e-3, **kw))
    assert exact / approx == pytest.approx(1.0, abs=1e-2)


def test_laplace_mixture_coefficient():
    assert 1 + S.LAPLACE1_RATE == pytest.approx(1.344, abs=5e-4)
    assert S.CAUCHY1_RATE == pytest.approx(D.sparsity_rate(D.single(D.cauchy(1.0))), rel=1e-12)


def test_student_t_constant_reduces_to_cauchy():
    assert S.student_t_rate_constant(1.0) == pytest.approx(math.sqrt(2 / math.pi), rel=1e-14)


def test_rate_ratio_convergence_in_nu():
    ratios = [np.divide(*S.sparse_rate_asymptotic(S.SparseFamilyProbe("cauchy", nu))) for nu in (1e-1, 1e-2, 1e-3)]
    assert abs(ratios[2] - 1) < abs(ratios[1] - 1) < abs(ratios[0] - 1)


def test_probe_validation():
    with pytest.raises(DomainError):
        S.SparseFamilyProbe("student_t", 0.1)
    with pytest.raises(DomainError):
        S.SparseFamilyProbe("atom_slab", 1.0)
    with pytest.raises(DomainError):
        S.SparseFamilyProbe("cauchy", -1.0)


def test_inverse_power_constant():
    assert S.inverse_power_constant(1.0) == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-14)
    assert S.inverse_power_constant(0.5) == pytest.approx(0.5 * 2**-0.75 / special.gamma(0.75), rel=1e-14)


# -- threshold probe -------------------------------------------------------

def test_threshold_probe_rows():
    rows = S.threshold_convergence_probe([0.1, 0.01], S.gamma_alpha(1.0), 1.0)
    for r in rows:
        P = D.single(D.cauchy(r.sigma))
        assert S.active_mass(P, r.y) == pytest.approx(1.0, rel=1e-9)
        assert r.delta == pytest.approx(S.gamma_alpha(1.0) / r.y)
    assert abs(rows[1].ratio - 1) < abs(rows[0].ratio - 1)
    with pytest.raises(DomainError):
        S.threshold_convergence_probe([0.01, 0.1], 1.377, 1.0)
    with pytest.raises(DomainError):
        S.threshold_convergence_probe([0.1], 1.377, -1.0)


def test_active_mass_closed_form_normal():
    P = D.single(D.normal(0.5))
    y = 3.0
    expected = math.expm1(0.25 * y * y / (2 * 1.25)) / math.sqrt(1.25)
    assert S.active_mass(P, y) == pytest.approx(expected, rel=1e-11)
