import json
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as sint
from scipy import special, stats

from clarity import distributions as D
from clarity.errors import DomainError

from conftest import symmetric_priors


def quad_marginal(comp: D.SignalComponent, y: float) -> float:
    """Independent oracle: scipy quad of ``phi(y - x) f(x)`` over the real line."""
    f = lambda x: stats.norm.pdf(y - x) * comp.pdf(x)  # noqa: E731
    pts = sorted({comp.location, y, 0.5 * (y + comp.location)})
    total = 0.0
    edges = [-np.inf] + pts + [np.inf]
    for a, b in zip(edges[:-1], edges[1:]):
        total += sint.quad(f, a, b, epsabs=1e-14, epsrel=1e-12, limit=400)[0]
    return total


def tan_normalisation(P: D.SignalDistribution, n: int = 4000) -> float:
    """``int m(y) dy`` after ``y = tan(t)``, Gauss-Legendre on 16 panels of ``t``."""
    x, w = np.polynomial.legendre.leggauss(n // 16)
    edges = np.linspace(-0.5 * np.pi, 0.5 * np.pi, 17)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        t = 0.5 * (a + b) + 0.5 * (b - a) * x
        y = np.tan(t)
        total += 0.5 * (b - a) * np.sum(w * D.marginal_density(P, y) / np.cos(t) ** 2)
    return total


# -- construction ----------------------------------------------------------

def test_weights_must_sum_to_one():
    with pytest.raises(DomainError):
        D.SignalDistribution((D.point_mass(0.0, 0.5),))


def test_component_validation():
    with pytest.raises(DomainError):
        D.cauchy(0.0)
    with pytest.raises(DomainError):
        D.student_t(-1.0, 1.0)
    with pytest.raises(DomainError):
        D.point_mass(math.inf)
    with pytest.raises(DomainError):
        D.point_mass(0.0, 1.5)


def test_atoms_at_same_location_merge():
    P = D.atoms([1.0, 1.0, 0.0], [0.25, 0.25, 0.5])
    np.testing.assert_array_equal(P.atom_locations, [1.0, 0.0])
    np.testing.assert_array_equal(P.atom_weights, [0.5, 0.5])


def test_symmetry_detection():
    assert D.dirac_cauchy(0.3).is_symmetric()
    assert D.atoms([-1.0, 1.0], [0.5, 0.5]).is_symmetric()
    assert not D.atoms([-1.0, 2.0], [0.5, 0.5]).is_symmetric()
    assert not D.single(D.cauchy(1.0, location=0.1)).is_symmetric()
    assert not D.three_point((0.8, 0.12, 0.08), 2.0, -0.45).is_symmetric()


def test_null_weight_and_conditional(dirac_cauchy_mix):
    assert dirac_cauchy_mix.null_weight == pytest.approx(0.6)
    assert D.non_null_proportion(dirac_cauchy_mix) == pytest.approx(0.4)
    cond = dirac_cauchy_mix.nonnull_conditional()
    assert cond.components == (D.cauchy(0.5),)
    with pytest.raises(DomainError):
        D.null_prior().nonnull_conditional()
    assert D.null_prior().is_null


def test_json_round_trip_and_rejections(dirac_cauchy_mix):
    text = dirac_cauchy_mix.to_json()
    assert D.SignalDistribution.from_json(text) == dirac_cauchy_mix
    assert D.SignalDistribution.from_json(text).fingerprint() == dirac_cauchy_mix.fingerprint()
    bad = json.loads(text)
    bad["components"][1]["dof"] = 3
    with pytest.raises(DomainError):
        D.SignalDistribution.from_json(bad)
    with pytest.raises(DomainError):
        D.SignalDistribution.from_json({"components": [], "extra": 1})
    with pytest.raises(DomainError):
        D.SignalDistribution.from_json({"components": [{"kind": "gamma", "weight": 1}]})


@settings(max_examples=50, deadline=None)
@given(symmetric_priors())
def test_json_round_trip_property(P):
    Q = D.SignalDistribution.from_json(P.to_json())
    assert Q == P
    assert Q.to_json() == P.to_json()


# -- rates -----------------------------------------------------------------

@pytest.mark.parametrize("scale", [0.01, 0.1, 0.5, 1.0, 3.0, 100.0])
def test_cauchy_sparsity_rate_closed_form(scale):
    # E exp(-X^2/2) = erfcx(scale / sqrt 2) for X ~ C(scale)
    expected = 1.0 - special.erfcx(scale / math.sqrt(2.0))
    assert D.sparsity_rate(D.single(D.cauchy(scale))) == pytest.approx(expected, rel=1e-10, abs=1e-15)


@pytest.mark.parametrize("scale", [0.05, 0.5, 2.0, 20.0])
def test_normal_and_laplace_rates_closed_form(scale):
    assert D.null_density_weight(D.single(D.normal(scale))) == pytest.approx(
        1.0 / math.sqrt(1.0 + scale**2), rel=1e-11)
    lap = math.sqrt(math.pi / 2.0) / scale * special.erfcx(1.0 / (scale * math.sqrt(2.0)))
    assert D.null_density_weight(D.single(D.laplace(scale))) == pytest.approx(lap, rel=1e-11)


def test_student_t_rate_against_mpmath():
    nu, s = 1.5, 0.7
    dens = lambda x: mpmath.gamma((nu + 1) / 2) / (mpmath.gamma(nu / 2) * mpmath.sqrt(nu * mpmath.pi) * s) \
        * (1 + (x / s) ** 2 / nu) ** (-(nu + 1) / 2)  # noqa: E731
    oracle = float(mpmath.quad(lambda x: (1 - mpmath.exp(-x * x / 2)) * dens(x), [-mpmath.inf, -1, 0, 1, mpmath.inf]))
    assert D.sparsity_rate(D.single(D.student_t(nu, s))) == pytest.approx(oracle, rel=1e-9)


def test_rho_values_for_named_priors(dirac_cauchy_mix):
    # frozen against the erfcx closed form
    np.testing.assert_allclose(D.sparsity_rate(dirac_cauchy_mix), 0.1203049322, rtol=1e-9)
    np.testing.assert_allclose(D.sparsity_rate(D.single(D.cauchy(1.0))), 0.4768434163, rtol=1e-9)
    np.testing.assert_allclose(D.sparsity_rate(D.single(D.cauchy(0.1))), 0.0750424294, rtol=1e-9)
    assert D.sparsity_rate(D.null_prior()) == 0.0


@settings(max_examples=40, deadline=None)
@given(symmetric_priors())
def test_rates_complement(P):
    assert D.sparsity_rate(P) + D.null_density_weight(P) == pytest.approx(1.0, abs=1e-12)
    assert 0.0 <= D.sparsity_rate(P) <= D.non_null_proportion(P) + 1e-12


# -- marginal --------------------------------------------------------------

def test_marginal_dirac_cauchy_at_zero(dirac_cauchy_mix):
    oracle = 0.6 * D.PHI0 + 0.4 * quad_marginal(D.cauchy(0.5), 0.0)
    assert D.marginal_density(dirac_cauchy_mix, 0.0) == pytest.approx(oracle, rel=1e-11)
    assert D.marginal_density(dirac_cauchy_mix, 0.0) == pytest.approx(0.350947556, abs=1e-9)


@pytest.mark.parametrize("y", [0.0, 1.0, 6.0, 20.0, 40.0, -45.0])
def test_normal_marginal_is_gaussian(y):
    P = D.single(D.normal(1.0))
    assert D.marginal_density(P, y) == pytest.approx(stats.norm.pdf(y, scale=math.sqrt(2.0)), rel=1e-9)


@pytest.mark.parametrize("y", [-3.0, 0.0, 0.7, 5.0, 25.0])
def test_laplace_marginal_closed_form(y):
    b = 0.8
    expected = (0.5 / b) * math.exp(0.5 / b**2) * (
        math.exp(-y / b) * stats.norm.cdf(y - 1 / b) + math.exp(y / b) * stats.norm.cdf(-y - 1 / b))
    assert D.marginal_density(D.single(D.laplace(b)), y) == pytest.approx(expected, rel=1e-9)


@pytest.mark.parametrize("comp", [D.cauchy(0.5), D.cauchy(2.0, location=1.0), D.student_t(3.0, 1.2),
                                  D.student_t(0.7, 0.3)])
@pytest.mark.parametrize("y", [-2.0, 0.0, 3.5, 15.0])
def test_heavy_marginals_against_quad(comp, y):
    P = D.single(comp)
    assert D.marginal_density(P, y) == pytest.approx(quad_marginal(comp, y), rel=1e-9)


@pytest.mark.parametrize("y", [35.0, 60.0, 200.0])
def test_cauchy_marginal_far_tail_against_mpmath(y):
    s = 0.5
    f = lambda x: mpmath.npdf(y - x) * s / (mpmath.pi * (s * s + x * x))  # noqa: E731
    oracle = float(mpmath.quad(f, [-mpmath.inf, 0, y - 5, y, y + 5, mpmath.inf]))
    assert D.marginal_density(D.single(D.cauchy(s)), y) == pytest.approx(oracle, rel=1e-8)


def test_marginal_vector_matches_scalar(dirac_cauchy_mix):
    y = np.array([-50.0, -3.0, 0.0, 2.0, 11.0, 40.0])
    vec = D.marginal_density(dirac_cauchy_mix, y)
    np.testing.assert_allclose(vec, [D.marginal_density(dirac_cauchy_mix, v) for v in y], rtol=1e-12)


@pytest.mark.parametrize("P", [D.dirac_cauchy(0.4), D.single(D.cauchy(0.1)),
                               D.single(D.student_t(1.5, 1.0)), D.three_point((0.8, 0.12, 0.08), 2.0, -0.45),
                               D.SignalDistribution.mixture((0.5, D.laplace(2.0)), (0.5, D.normal(3.0)))])
def test_marginal_integrates_to_one(P):
    assert tan_normalisation(P) == pytest.approx(1.0, abs=1e-7)


def test_marginal_cdf_and_sf(dirac_cauchy_mix):
    y = np.array([-12.0, -1.0, 0.0, 2.5, 12.0])
    cdf = D.marginal_cdf(dirac_cauchy_mix, y)
    sf = D.marginal_sf(dirac_cauchy_mix, y)
    np.testing.assert_allclose(cdf + sf, 1.0, atol=1e-12)
    assert D.marginal_cdf(dirac_cauchy_mix, 0.0) == pytest.approx(0.5, abs=1e-12)
    # P(Y > 12) through the Cauchy tail: oracle by quad of the density
    tail = sint.quad(lambda t: D.marginal_density(dirac_cauchy_mix, t), 12.0, np.inf, epsrel=1e-10)[0]
    assert sf[-1] == pytest.approx(tail, rel=1e-7)


@settings(max_examples=30, deadline=None)
@given(symmetric_priors(), st.floats(0.0, 30.0))
def test_symmetric_marginal_is_even_and_positive(P, y):
    a, b = D.marginal_density(P, y), D.marginal_density(P, -y)
    assert a > 0
    assert a == pytest.approx(b, rel=1e-10)


# -- sampling --------------------------------------------------------------

def test_sampler_is_reproducible(dirac_cauchy_mix):
    a = D.sample(dirac_cauchy_mix, 500, seed=7)
    b = D.sample(dirac_cauchy_mix, 500, seed=7)
    c = D.sample(dirac_cauchy_mix, 500, seed=7, replicate=1)
    np.testing.assert_array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)
    assert a.source == dirac_cauchy_mix.fingerprint()
    with pytest.raises(ValueError):
        a.values[0] = 1.0


@pytest.mark.parametrize("P", [D.dirac_cauchy(0.4), D.single(D.student_t(2.0, 1.0)),
                               D.SignalDistribution.mixture((0.3, D.laplace(1.0)), (0.7, D.normal(2.0, 1.0)))])
def test_sampler_matches_marginal_cdf(P):
    data = D.sample(P, 3000, seed=11)
    result = stats.kstest(data.values, lambda t: D.marginal_cdf(P, np.asarray(t)))
    assert result.pvalue > 1e-3


def test_dataset_validation():
    with pytest.raises(DomainError):
        D.Dataset(np.array([]))
    with pytest.raises(DomainError):
        D.Dataset(np.array([1.0, np.nan]))
    with pytest.raises(DomainError):
        D.sample(D.null_prior(), 0, seed=1)
