"""Sparse-limit asymptotics: exceedance measures, rates and false-signal thresholds.

The central objects are

* ``J_alpha(x) = sum_{r >= 1} x^{2r} / ((2r)! (2r - alpha))``;
* ``gamma_alpha``, the root of ``alpha J_alpha(gamma) = 1``;
* ``delta(y)``, the half-width of the central interval ``|X| < delta(y)``
  whose posterior probability matches ``clar(y)`` in the sparse limit.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate as sp_integrate
from scipy import optimize, special

from .distributions import (
    SignalDistribution,
    cauchy,
    dirac_cauchy,
    laplace,
    normal,
    norm_sf,
    single,
    sparsity_rate,
    student_t,
    tilted_integrals,
)
from .errors import DomainError, NonConvergence
from .posterior import central_interval_prob, clar
from .twogroups import cosh_minus_one_kernel

_J_MAX_TERMS = 500
_J_ASYMPTOTIC_FROM = 700.0


# --------------------------------------------------------------------------
# The J series and gamma constants
# --------------------------------------------------------------------------

def _J_scalar(alpha: float, x: float) -> float:
    x = abs(float(x))
    if x == 0.0:
        return 0.0
    if x > _J_ASYMPTOTIC_FROM:
        return J_alpha_asymptotic(alpha, x)
    x2 = x * x
    term = 1.0  # x^{2r} / (2r)! at r = 0
    total = 0.0
    for r in range(1, _J_MAX_TERMS + 1):
        term *= x2 / ((2 * r - 1) * (2 * r))
        add = term / (2 * r - alpha)
        total += add
        # past the peak of the terms, stop once they no longer register
        if 2 * r > x and add < 1e-16 * total:
            return total
    raise NonConvergence(f"J series did not converge at x={x}", value=total)


def J_alpha(alpha: float, x):
    """``sum_{r >= 1} x^{2r} / ((2r)! (2r - alpha))`` for ``alpha < 2``.

    Summed until the next term is below ``1e-16`` of the partial sum; for
    ``|x| > 700`` the large-``x`` expansion is returned instead.
    """
    if not alpha < 2:
        raise DomainError("J_alpha needs alpha < 2")
    if np.ndim(x) == 0:
        return _J_scalar(alpha, x)
    return np.array([_J_scalar(alpha, v) for v in np.ravel(x)]).reshape(np.shape(x))


def J_alpha_asymptotic(alpha: float, x: float, order: int = 2) -> float:
    """``e^x / (2x) * (1 + (alpha+1)/x + (alpha+1)(alpha+2)/x^2 + ...)``.

    ``order = 0`` gives the leading term only.
    """
    x = abs(float(x))
    corr, coef = 1.0, 1.0
    for k in range(1, order + 1):
        coef *= (alpha + k) / x
        corr += coef
    log_lead = x - math.log(2.0 * x)
    if log_lead > 709.0:
        return math.inf
    return math.exp(log_lead) * corr


@functools.lru_cache(maxsize=None)
def gamma_alpha(alpha: float) -> float:
    """Positive root of ``alpha J_alpha(gamma) = 1`` for ``0 < alpha < 2``."""
    alpha = float(alpha)
    if not 0.0 < alpha < 2.0:
        raise DomainError("gamma_alpha needs 0 < alpha < 2")
    return float(optimize.brentq(lambda g: alpha * _J_scalar(alpha, g) - 1.0, 1e-6, 10.0,
                                 xtol=1e-13))


# --------------------------------------------------------------------------
# Exceedance families
# --------------------------------------------------------------------------

class FamilyKind(str, enum.Enum):
    INVERSE_POWER = "inverse_power"
    LOG_EXP = "log_exp"
    CAUCHY_SLAB = "cauchy_slab"
    GAMMA_EXP = "gamma_exp"


@dataclass(frozen=True)
class ExceedanceFamily:
    """An exceedance measure ``H(dx) = h(|x|) dx`` on the real line.

    ========================  ===================================
    ``inverse_power(alpha)``  ``|x|^{-1-alpha}``, ``0 < alpha < 2``
    ``log_exp(beta)``         ``|x|^{-1} exp(-beta |x|)``
    ``cauchy_slab()``         ``1 / (1 + x^2)``
    ``gamma_exp(alpha, beta)`` ``|x|^{alpha-1} exp(-beta |x|)``
    ========================  ===================================
    """

    kind: FamilyKind
    alpha: float | None = None
    beta: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", FamilyKind(self.kind))
        k = self.kind
        if k is FamilyKind.INVERSE_POWER and not (self.alpha is not None and 0 < self.alpha < 2):
            raise DomainError("inverse_power needs 0 < alpha < 2")
        if k in (FamilyKind.LOG_EXP, FamilyKind.GAMMA_EXP) and not (self.beta is not None and self.beta > 0):
            raise DomainError(f"{k.value} needs beta > 0")
        if k is FamilyKind.GAMMA_EXP and not (self.alpha is not None and self.alpha > 0):
            raise DomainError("gamma_exp needs alpha > 0")

    @classmethod
    def inverse_power(cls, alpha: float) -> "ExceedanceFamily":
        return cls(FamilyKind.INVERSE_POWER, alpha=float(alpha))

    @classmethod
    def log_exp(cls, beta: float) -> "ExceedanceFamily":
        return cls(FamilyKind.LOG_EXP, beta=float(beta))

    @classmethod
    def cauchy_slab(cls) -> "ExceedanceFamily":
        return cls(FamilyKind.CAUCHY_SLAB)

    @classmethod
    def gamma_exp(cls, alpha: float, beta: float) -> "ExceedanceFamily":
        return cls(FamilyKind.GAMMA_EXP, alpha=float(alpha), beta=float(beta))

    @classmethod
    def parse(cls, text: str) -> "ExceedanceFamily":
        """Parse ``kind[:key=value,...]``, e.g. ``gamma_exp:alpha=2,beta=1``."""
        kind, _, rest = text.partition(":")
        params = {}
        if rest:
            for item in rest.split(","):
                key, eq, value = item.partition("=")
                if not eq or key.strip() not in ("alpha", "beta"):
                    raise DomainError(f"bad family parameter {item!r}")
                params[key.strip()] = float(value)
        try:
            return cls(FamilyKind(kind.strip()), **params)
        except ValueError as exc:
            raise DomainError(str(exc)) from None

    def density(self, x):
        """Unnormalised density ``h(|x|)``."""
        a = np.abs(np.asarray(x, dtype=float))
        with np.errstate(divide="ignore"):
            if self.kind is FamilyKind.INVERSE_POWER:
                return a ** (-1.0 - self.alpha)
            if self.kind is FamilyKind.LOG_EXP:
                return np.exp(-self.beta * a) / a
            if self.kind is FamilyKind.CAUCHY_SLAB:
                return 1.0 / (1.0 + a * a)
            return a ** (self.alpha - 1.0) * np.exp(-self.beta * a)


def _half_line_integral(f: Callable[[float], float], points: Sequence[float] = ()) -> float:
    """``int_0^inf f`` with scipy's adaptive quadrature, split at ``points``."""
    cuts = sorted({0.0, 1.0, *[abs(float(p)) for p in points if np.isfinite(p)]})
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b > a:
            total += sp_integrate.quad(f, a, b, epsabs=1e-14, epsrel=1e-12, limit=200)[0]
    total += sp_integrate.quad(f, cuts[-1], np.inf, epsabs=1e-14, epsrel=1e-12, limit=200)[0]
    return total


def exceedance_integral(family: ExceedanceFamily, w: Callable, normalized: bool = True,
                        points: Sequence[float] = ()) -> float:
    """``int w dH`` over the real line.

    With ``normalized=True`` the measure is scaled so that
    ``int (1 - exp(-x^2/2)) dH = 1``. ``w`` must be bounded and ``O(x^2)`` at
    the origin whenever ``H`` is infinite there. ``points`` are split points
    (e.g. jumps of ``w``).
    """
    def two_sided(x):
        return (float(w(x)) + float(w(-x))) * float(family.density(x))

    value = _half_line_integral(two_sided, points)
    if normalized:
        value /= exceedance_normalizer(family)
    return value


@functools.lru_cache(maxsize=None)
def exceedance_normalizer(family: ExceedanceFamily) -> float:
    """``int (1 - exp(-x^2/2)) dH`` for the unnormalised density."""
    return _half_line_integral(lambda x: 2.0 * -math.expm1(-0.5 * x * x) * float(family.density(x)))


@functools.lru_cache(maxsize=None)
def I0_cauchy_slab() -> float:
    """``int_0^inf exp(-x^2/2) / (1 + x^2) dx``."""
    return _half_line_integral(lambda x: math.exp(-0.5 * x * x) / (1.0 + x * x))


@functools.lru_cache(maxsize=None)
def gamma_exp_constant(alpha: float, beta: float) -> float:
    """``c = 2 int_0^inf exp(-x^2/2) x^{alpha-1} exp(-beta x) dx``."""
    return 2.0 * _half_line_integral(lambda x: math.exp(-0.5 * x * x - beta * x) * x ** (alpha - 1.0))


# --------------------------------------------------------------------------
# Thresholds
# --------------------------------------------------------------------------

def _check_positive(value: float, what: str) -> float:
    if not value > 0:
        raise DomainError(f"{what} is not positive at this y")
    return float(value)


def delta_threshold(family: ExceedanceFamily, y: float, c: float | None = None) -> float:
    """Sparse-limit false-signal threshold ``delta(y)`` for each exceedance family.

    ``c`` overrides the constant of the ``gamma_exp`` family, which otherwise
    is computed from ``(alpha, beta)``.
    """
    ay = abs(float(y))
    if family.kind is FamilyKind.INVERSE_POWER:
        if ay == 0:
            raise DomainError("delta(y) needs y != 0")
        return gamma_alpha(family.alpha) / ay
    if ay <= math.e:
        raise DomainError("delta(y) for this family needs |y| > e")
    L = math.log(math.log(ay))
    if family.kind is FamilyKind.LOG_EXP:
        inner = math.log(ay / L) * 2.0 * L
        _check_positive(inner, "log(|y| / loglog|y|) * 2 loglog|y|")
        return _check_positive(math.log(inner) / ay, "delta(y)")
    if family.kind is FamilyKind.CAUCHY_SLAB:
        return _check_positive(math.log(2.0 * I0_cauchy_slab() * ay) / ay, "delta(y)")
    a = family.alpha
    c = gamma_exp_constant(a, family.beta) if c is None else float(c)
    arg = c * ay ** a / (a * math.log(ay)) ** (a - 1.0)
    return _check_positive(math.log(arg) / ay, "delta(y)")


def delta_regular_variation(alpha: float, y: float) -> float:
    """Leading-order threshold by activity index: ``gamma_alpha/|y|`` for
    ``0 < alpha < 2`` and ``|alpha| log|y| / |y|`` for ``alpha < 0``."""
    ay = abs(float(y))
    if 0 < alpha < 2:
        return gamma_alpha(alpha) / ay
    if alpha < 0:
        if ay <= 1:
            raise DomainError("needs |y| > 1")
        return abs(alpha) * math.log(ay) / ay
    raise DomainError("alpha must lie in (0, 2) or be negative")


# --------------------------------------------------------------------------
# Sparse families indexed by nu
# --------------------------------------------------------------------------

class ProbeFamily(str, enum.Enum):
    CAUCHY = "cauchy"
    ATOM_SLAB = "atom_slab"
    NORMAL_SPIKE_SLAB = "normal_spike_slab"
    STUDENT_T = "student_t"
    LAPLACE_MIXTURE = "laplace_mixture"


# 1 - E exp(-X^2/2) for X ~ C(1), and for X ~ L(1)
CAUCHY1_RATE = 1.0 - math.exp(0.5) * math.erfc(1.0 / math.sqrt(2.0))
LAPLACE1_RATE = 1.0 - math.sqrt(2.0 * math.pi) * math.exp(0.5) * float(norm_sf(1.0))


@dataclass(frozen=True)
class SparseFamilyProbe:
    """A member ``P_nu`` of one of five sparse families.

    * ``cauchy``: ``C(nu)``;
    * ``atom_slab``: ``(1 - nu) delta_0 + nu C(1)``;
    * ``normal_spike_slab``: ``(1 - nu) N(0, nu^{1+beta}) + nu C(1)``;
    * ``student_t``: Student-t with ``alpha`` degrees of freedom and scale ``nu``;
    * ``laplace_mixture``: ``(1 - nu) L(nu^{1/2}) + nu L(1)``.
    """

    family: ProbeFamily
    nu: float
    alpha: float | None = None
    beta: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "family", ProbeFamily(self.family))
        if not self.nu > 0:
            raise DomainError("nu must be positive")
        if self.family is ProbeFamily.STUDENT_T and not (self.alpha is not None and 0 < self.alpha < 2):
            raise DomainError("student_t probe needs 0 < alpha < 2")
        if self.family is ProbeFamily.NORMAL_SPIKE_SLAB and not (self.beta is not None and self.beta > 0):
            raise DomainError("normal_spike_slab probe needs beta > 0")
        if self.family in (ProbeFamily.ATOM_SLAB, ProbeFamily.NORMAL_SPIKE_SLAB,
                           ProbeFamily.LAPLACE_MIXTURE) and not self.nu < 1:
            raise DomainError("mixture probes need nu < 1")

    def distribution(self) -> SignalDistribution:
        nu = self.nu
        f = self.family
        if f is ProbeFamily.CAUCHY:
            return single(cauchy(nu))
        if f is ProbeFamily.ATOM_SLAB:
            return dirac_cauchy(nu, 1.0)
        if f is ProbeFamily.NORMAL_SPIKE_SLAB:
            return SignalDistribution.mixture((1 - nu, normal(nu ** (0.5 * (1 + self.beta)))),
                                              (nu, cauchy(1.0)))
        if f is ProbeFamily.STUDENT_T:
            return single(student_t(self.alpha, nu))
        return SignalDistribution.mixture((1 - nu, laplace(math.sqrt(nu))), (nu, laplace(1.0)))

    def asymptotic_rate(self) -> float:
        nu = self.nu
        f = self.family
        if f is ProbeFamily.CAUCHY:
            return nu * math.sqrt(2.0 / math.pi)
        if f in (ProbeFamily.ATOM_SLAB, ProbeFamily.NORMAL_SPIKE_SLAB):
            return CAUCHY1_RATE * nu
        if f is ProbeFamily.STUDENT_T:
            return student_t_rate_constant(self.alpha) * nu ** self.alpha
        # spike: E X^2/2 = nu for L(sqrt(nu)); slab: nu * (1 - E exp(-X^2/2)) for L(1)
        return (1.0 + LAPLACE1_RATE) * nu


def inverse_power_constant(alpha: float) -> float:
    """``C_alpha = alpha 2^{alpha/2 - 1} / Gamma(1 - alpha/2)``, normalising ``C_alpha |x|^{-1-alpha}``."""
    return alpha * 2.0 ** (0.5 * alpha - 1.0) / special.gamma(1.0 - 0.5 * alpha)


def student_t_rate_constant(alpha: float) -> float:
    """Coefficient of ``nu^alpha`` in the rate of the scaled Student-t family."""
    return (alpha ** (0.5 * alpha) * special.gamma(0.5 * (alpha + 1))
            / (inverse_power_constant(alpha) * math.sqrt(math.pi) * special.gamma(0.5 * alpha)))


def sparse_rate_asymptotic(probe: SparseFamilyProbe) -> tuple[float, float]:
    """``(rho1 by quadrature, small-nu closed form)`` for the probe's ``P_nu``."""
    return sparsity_rate(probe.distribution()), probe.asymptotic_rate()


# --------------------------------------------------------------------------
# Threshold convergence for sparse Cauchy priors
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ThresholdProbeRow:
    sigma: float
    rho1: float
    y: float
    delta: float
    interval_prob: float
    clar: float

    @property
    def ratio(self) -> float:
        return self.interval_prob / self.clar


def active_mass(P: SignalDistribution, y: float) -> float:
    """``int (cosh(xy) - 1) exp(-x^2/2) P(dx)``, i.e. ``rho1 psi1(y) / phi(y)``."""
    (vals,), s = tilted_integrals(P, [y], [cosh_minus_one_kernel])
    return float(vals[0] * math.exp(s[0]))


def _solve_active_mass(P: SignalDistribution, omega: float) -> float:
    f = lambda y: active_mass(P, y) - omega  # noqa: E731
    hi = 1.0
    while f(hi) < 0:
        hi *= 2.0
        if hi > 64:
            raise NonConvergence("could not bracket y with the requested active mass")
    return float(optimize.brentq(f, hi / 2 if hi > 1 else 0.0, hi, xtol=1e-12))


def threshold_convergence_probe(sigma_seq: Sequence[float], gamma: float,
                                omega: float) -> list[ThresholdProbeRow]:
    """For each ``C(sigma)`` find ``y > 0`` with active mass ``omega`` and compare
    ``P(|X| < gamma/y | Y = y)`` with ``clar(y)``."""
    sig = [float(s) for s in sigma_seq]
    if any(b >= a for a, b in zip(sig[:-1], sig[1:])) or min(sig) <= 0:
        raise DomainError("sigma_seq must be positive and strictly decreasing")
    if not omega > 0 or not gamma > 0:
        raise DomainError("gamma and omega must be positive")
    rows = []
    for s in sig:
        P = single(cauchy(s))
        y = _solve_active_mass(P, omega)
        delta = gamma / y
        rows.append(ThresholdProbeRow(s, sparsity_rate(P), y, delta,
                                      central_interval_prob(P, y, delta), clar(P, y)))
    return rows
