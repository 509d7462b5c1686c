"""Exact posterior summaries under ``Y = X + N(0, 1)``, ``X ~ P``.

All posterior probabilities are ratios of integrals of
``exp(xy - x^2/2) P(dx)`` and are computed in tilted units (see
:func:`clarity.distributions.tilted_integrals`), so they stay accurate when
the marginal density itself is far below the quadrature's absolute tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from .distributions import (
    SQRT_2PI,
    SignalDistribution,
    WEIGHT_TOL,
    atoms,
    gauss_weight,
    integrate,
    norm_isf,
    norm_pdf,
    sparsity_rate,
    marginal_density,
    tilted,
    tilted_integrals,
)
from .errors import CompatibilityError, DegenerateError, DomainError, NoRoot, SymmetryError
from .twogroups import (
    Label,
    TwoGroupsDecomposition,
    active_density,
    cosh_minus_one_kernel,
    inactive_active_model,
)

COMPAT_TOL = 1e-10
Y_STAR_LIMIT = 50.0


# --------------------------------------------------------------------------
# Kernels in tilted units; x is a column, y and s are rows.
# --------------------------------------------------------------------------

def _k_total(x, y, s):
    return tilted(x, y, s)


def _k_nonpos(x, y, s):
    return np.where(x <= 0.0, tilted(x, y, s), 0.0)


def _k_nonneg(x, y, s):
    return np.where(x >= 0.0, tilted(x, y, s), 0.0)


def _k_first_moment(x, y, s):
    return x * tilted(x, y, s)


def _k_sech(x, y, s):
    # sech(xy) exp(xy - x^2/2) = 2 expit(2xy) exp(-x^2/2)
    return 2.0 * special.expit(2.0 * x * y) * gauss_weight(x, s)


def _k_exp_neg(x, y, s):
    # exp(-xy) phi(y - x) / phi(y), kept unsimplified and summed in the exponent
    with np.errstate(over="ignore", invalid="ignore"):
        return np.exp(-x * y - 0.5 * (y - x) ** 2 + 0.5 * y * y - s)


_EXPM1_SERIES = 1.0 / np.array([math.factorial(k) for k in range(2, 22)])


def expm1_minus_t(t):
    """``exp(t) - 1 - t`` with full relative accuracy for small ``|t|``."""
    t = np.asarray(t, dtype=float)
    acc = np.zeros_like(t)
    for c in _EXPM1_SERIES[::-1]:
        acc = acc * t + c
    return np.where(np.abs(t) < 0.5, acc * t * t, np.expm1(t) - t)


def _k_asym_active(x, y, s):
    """``(exp(xy) - xy - 1) exp(-x^2/2 - s)``."""
    t = x * y
    small = np.abs(t) < 0.5
    with np.errstate(over="ignore", invalid="ignore"):
        series = expm1_minus_t(np.where(small, t, 0.0)) * gauss_weight(x, s)
        direct = tilted(x, y, s) - (1.0 + t) * gauss_weight(x, s)
    return np.where(small, series, direct)


def _k_gauss(x, y, s):
    return gauss_weight(x, s)


def _scalar(y, arr):
    return float(arr[0]) if np.ndim(y) == 0 else arr


def _phi_scaled(y, s):
    """``phi(y) exp(s)``: converts tilted integrals back to densities."""
    return np.exp(-0.5 * y * y + s) / SQRT_2PI


# --------------------------------------------------------------------------
# Compatibility
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CompatibilityReport:
    """Outcome of :func:`compatibility_check`.

    ``y_star`` minimises ``h(y) = int exp(xy - x^2/2) P(dx)`` and
    ``rho0 = h(y_star)``. When ``h`` is monotone ``y_star`` is infinite,
    ``rho0`` is the infimum and ``attained`` is false.
    """

    compatible: bool
    moment: float
    y_star: float
    rho0: float
    attained: bool = True

    def to_dict(self) -> dict:
        return {"compatible": self.compatible, "moment": self.moment, "y_star": self.y_star,
                "rho0": self.rho0, "attained": self.attained}


def zero_moment(P: SignalDistribution) -> float:
    """``int x exp(-x^2/2) P(dx)``."""
    return float(integrate(P, lambda x: x * np.exp(-0.5 * x * x)))


def _posterior_mean(P, y):
    (num, den), _ = tilted_integrals(P, [y], [_k_first_moment, _k_total])
    if not den[0] > 0:
        # every abscissa underflowed; no usable sign information at this y
        return math.nan
    return float(num[0] / den[0])


def _h(P, y):
    (vals,), s = tilted_integrals(P, [y], [_k_total])
    return float(np.exp(math.log(vals[0]) + s[0])) if vals[0] > 0 else 0.0


def compatibility_check(P: SignalDistribution, tol: float = COMPAT_TOL) -> CompatibilityReport:
    """Test ``int x exp(-x^2/2) P(dx) = 0`` and locate the minimiser of ``h``.

    ``h`` is convex with ``h'(y) = h(y) E(X | Y = y)``, so ``y_star`` is the
    root of the posterior mean; it is found by Brent's method on an expanding
    bracket out to ``|y| = 50``.
    """
    if P.is_null:
        return CompatibilityReport(True, 0.0, 0.0, 1.0)
    moment = zero_moment(P)
    if abs(moment) <= tol:
        return CompatibilityReport(True, moment, 0.0, float(integrate(P, lambda x: np.exp(-0.5 * x * x))))
    direction = -1.0 if moment > 0 else 1.0
    lo, hi = 0.0, direction
    while True:
        if _posterior_mean(P, hi) * direction >= 0.0:
            a, b = sorted((lo, hi))
            y_star = optimize.brentq(lambda t: _posterior_mean(P, t), a, b, xtol=1e-12)
            return CompatibilityReport(False, moment, float(y_star), _h(P, y_star))
        if abs(hi) >= Y_STAR_LIMIT:
            break
        lo, hi = hi, direction * min(2.0 * abs(hi), Y_STAR_LIMIT)
    y_star = direction * math.inf
    locs = P.atom_locations
    one_sided = not P.continuous and (np.all(locs * direction >= 0.0))
    rho0 = P.null_weight if one_sided else _h(P, hi)
    return CompatibilityReport(False, moment, y_star, float(rho0), attained=False)


def _require_compatible(P: SignalDistribution):
    if P.is_symmetric():
        return
    moment = zero_moment(P)
    if abs(moment) > COMPAT_TOL:
        raise CompatibilityError(
            f"prior is incompatible with the zero density assumption (moment {moment:.3g})")


def _require_symmetric(P: SignalDistribution):
    if not P.is_symmetric():
        raise SymmetryError("this operation requires a prior symmetric about 0")


def solve_compatible_atom(weights, x1: float) -> float:
    """Location ``mu`` making ``w0 delta_0 + w1 delta_{x1} + w2 delta_mu`` compatible.

    Solves ``w1 x1 exp(-x1^2/2) + w2 mu exp(-mu^2/2) = 0`` on ``|mu| <= 1``,
    where ``mu exp(-mu^2/2)`` is monotone.
    """
    w0, w1, w2 = (float(w) for w in weights)
    if abs(w0 + w1 + w2 - 1.0) > WEIGHT_TOL or min(w0, w1, w2) < 0:
        raise DomainError("weights must be non-negative and sum to 1")
    if not (w1 > 0 and w2 > 0):
        raise DomainError("w1 and w2 must be positive")
    if x1 == 0:
        raise DomainError("x1 must be non-zero")
    target = -w1 * x1 * math.exp(-0.5 * x1 * x1) / w2
    peak = math.exp(-0.5)
    if abs(target) > peak * (1.0 + 4 * np.finfo(float).eps):
        raise NoRoot(f"|w1 x1 exp(-x1^2/2) / w2| = {abs(target):.6g} exceeds exp(-1/2)")
    target = max(-peak, min(peak, target))
    return float(optimize.brentq(lambda m: m * math.exp(-0.5 * m * m) - target, -1.0, 1.0,
                                 xtol=1e-14, rtol=4 * np.finfo(float).eps))


def compatible_three_point(weights=(0.8, 0.12, 0.08), x1: float = 2.0) -> SignalDistribution:
    """The three-point prior with its third atom placed by :func:`solve_compatible_atom`."""
    mu = solve_compatible_atom(weights, x1)
    return atoms([0.0, x1, mu], list(weights))


# --------------------------------------------------------------------------
# Local rates
# --------------------------------------------------------------------------

def lnsr(P: SignalDistribution, y):
    """``P(X = 0 | Y = y)``."""
    w0 = P.null_weight
    if w0 == 0.0:
        return _scalar(y, np.zeros(np.atleast_1d(y).shape))
    (total,), s = tilted_integrals(P, y, [_k_total])
    return _scalar(y, np.clip(w0 * np.exp(-s) / total, 0.0, 1.0))


def clar(P: SignalDistribution, y):
    """Complementary local activity rate ``(1 - rho1) phi(y) / marginal(y)``."""
    _require_compatible(P)
    rho0 = 1.0 - sparsity_rate(P)
    (total,), s = tilted_integrals(P, y, [_k_total])
    return _scalar(y, np.clip(rho0 * np.exp(-s) / total, 0.0, 1.0))


def _sign_tails(P, y):
    (le, ge, total), _ = tilted_integrals(P, y, [_k_nonpos, _k_nonneg, _k_total])
    return np.clip(le / total, 0.0, 1.0), np.clip(ge / total, 0.0, 1.0)


def lfsr(P: SignalDistribution, y):
    """``min(P(X <= 0 | y), P(X >= 0 | y))``; an atom at 0 counts on both sides."""
    le, ge = _sign_tails(P, y)
    return _scalar(y, np.minimum(le, ge))


def sign_error_prob(P: SignalDistribution, y):
    """``P(XY <= 0 | Y = y)``."""
    yv = np.atleast_1d(np.asarray(y, dtype=float))
    le, ge = _sign_tails(P, yv)
    out = np.where(yv > 0, le, np.where(yv < 0, ge, 1.0))
    return _scalar(y, out)


def sech_posterior_mean(P: SignalDistribution, y):
    """``E{sech(XY) | Y = y}`` for a symmetric prior."""
    _require_symmetric(P)
    (num, den), _ = tilted_integrals(P, y, [_k_sech, _k_total])
    return _scalar(y, num / den)


def exp_posterior_mean(P: SignalDistribution, y):
    """``E{exp(-XY) | Y = y}`` for a compatible prior."""
    _require_compatible(P)
    (num, den), _ = tilted_integrals(P, y, [_k_exp_neg, _k_total])
    return _scalar(y, num / den)


def activity_prob_given_x(x):
    """``P(A = 1 | X = x) = 1 - exp(-x^2/2)``."""
    x = np.asarray(x, dtype=float)
    out = -np.expm1(-0.5 * x * x)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class JointValue:
    """Value of the ``(X, Y, A)`` joint law at one ``x``.

    ``kind`` is ``"mass"`` when ``x`` is an atom of the prior (the value is a
    probability in ``x`` times a density in ``y``) and ``"density"`` otherwise.
    """

    value: float
    kind: str


def _one_minus_sech(t):
    t = np.asarray(t, dtype=float)
    with np.errstate(over="ignore"):
        return np.where(np.abs(t) < 1.0, 2.0 * np.sinh(0.5 * t) ** 2 / np.cosh(t),
                        1.0 - 1.0 / np.cosh(t))


def activity_joint_density(P: SignalDistribution, x: float, y: float, a: int) -> JointValue:
    """``phi(y - x) p(x) sech(xy)`` for ``a = 0`` and ``... (1 - sech(xy))`` for ``a = 1``."""
    _require_symmetric(P)
    if a not in (0, 1):
        raise DomainError("a must be 0 or 1")
    mass = P.atom_mass(x)
    if mass > 0:
        p, kind = mass, "mass"
    else:
        p, kind = float(P.density(x)), "density"
    t = x * y
    factor = float(1.0 / np.cosh(t)) if a == 0 else float(_one_minus_sech(t))
    return JointValue(float(norm_pdf(y - x)) * p * factor, kind)


# --------------------------------------------------------------------------
# Asymmetric compatible priors
# --------------------------------------------------------------------------

def asymmetric_active_density(P: SignalDistribution, y, rho1: float | None = None):
    """``rho1^{-1} phi(y) int (exp(xy) - xy - 1) exp(-x^2/2) P(dx)``."""
    rho1 = sparsity_rate(P) if rho1 is None else rho1
    (vals,), s = tilted_integrals(P, y, [_k_asym_active])
    yv = np.atleast_1d(np.asarray(y, dtype=float))
    return _scalar(y, _phi_scaled(yv, s) * vals / rho1)


def asymmetric_active_model(P: SignalDistribution) -> TwoGroupsDecomposition:
    """Inactive/active decomposition of a compatible, possibly asymmetric, prior."""
    _require_compatible(P)
    rho1 = sparsity_rate(P)
    if rho1 <= 0.0:
        raise DegenerateError("rho1 = 0: the inactive/active model collapses to pure noise")
    return TwoGroupsDecomposition(rho1, lambda y: asymmetric_active_density(P, y, rho1),
                                  lambda y: marginal_density(P, y), Label.INACTIVE_ACTIVE)


def weighted_sech(P: SignalDistribution, y):
    """``1 / int exp(xy) w(dx)`` with ``w = exp(-x^2/2) P / rho0``."""
    _require_compatible(P)
    (gauss, total), _ = tilted_integrals(P, y, [_k_gauss, _k_total])
    return _scalar(y, gauss / total)


@dataclass(frozen=True)
class ConsistencyReport:
    """Residuals of the three marginalisations of the ``(X, Y, A)`` joint law."""

    y_grid: np.ndarray
    total_residual: np.ndarray
    inactive_residual: np.ndarray
    active_residual: np.ndarray
    tol: float = 1e-8

    @property
    def max_residual(self) -> float:
        return float(max(np.max(np.abs(self.total_residual)),
                         np.max(np.abs(self.inactive_residual)),
                         np.max(np.abs(self.active_residual))))

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol


def asymmetric_consistency_check(P: SignalDistribution, y_grid, tol: float = 1e-8) -> ConsistencyReport:
    """Integrate the joint law ``phi(y) exp(xy - x^2/2) P(dx) sech_w(y)`` over ``x``.

    Checks, on each ``y``: both activity branches sum to the marginal, the
    inactive branch equals ``rho0 phi(y)`` and the active branch equals
    ``rho1 psi1(y)``.
    """
    _require_compatible(P)
    y = np.atleast_1d(np.asarray(y_grid, dtype=float))
    sw = weighted_sech(P, y)
    rho0 = float(integrate(P, lambda x: np.exp(-0.5 * x * x)))
    rho1 = sparsity_rate(P)

    # sech_w depends on y only, so each branch integrates the same x-kernel.
    (joint_x,), s = tilted_integrals(P, y, [_k_total])
    joint = _phi_scaled(y, s) * joint_x
    joint0 = joint * sw
    joint1 = joint * (1.0 - sw)
    marginal = np.asarray(marginal_density(P, y))
    psi1 = np.asarray(asymmetric_active_density(P, y, rho1))
    return ConsistencyReport(
        y_grid=y,
        total_residual=joint0 + joint1 - marginal,
        inactive_residual=joint0 - rho0 * norm_pdf(y),
        active_residual=joint1 - rho1 * psi1,
        tol=tol,
    )


# --------------------------------------------------------------------------
# p-values
# --------------------------------------------------------------------------

def pvalue_density(p, x):
    """Density at ``p`` of the two-sided p-value of ``Y ~ N(x, 1)``."""
    p = np.asarray(p, dtype=float)
    if np.any(~((p > 0) & (p < 1))):
        raise DomainError("p must lie strictly between 0 and 1")
    x = np.asarray(x, dtype=float)
    q = norm_isf(0.5 * p)
    # {phi(q + x) + phi(q - x)} / {2 phi(q)} = exp(-x^2/2) cosh(qx)
    with np.errstate(over="ignore"):
        out = 0.5 * (np.exp(-0.5 * x * x - q * x) + np.exp(-0.5 * x * x + q * x))
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# Curves on a grid
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PosteriorCurves:
    """``marginal``, ``lnsr``, ``clar`` and ``lfsr`` on ``y_grid``."""

    y_grid: np.ndarray
    marginal: np.ndarray
    lnsr: np.ndarray
    clar: np.ndarray
    lfsr: np.ndarray

    def dominance_holds(self, slack: float = 1e-10) -> bool:
        return bool(np.all(self.clar + slack >= self.lfsr) and np.all(self.lfsr + slack >= self.lnsr))

    def rows(self):
        return zip(self.y_grid, self.marginal, self.lnsr, self.clar, self.lfsr)


def posterior_curves(P: SignalDistribution, y_grid) -> PosteriorCurves:
    """All exact curves from one pass of tilted integrals."""
    _require_compatible(P)
    y = np.atleast_1d(np.asarray(y_grid, dtype=float))
    rho0 = 1.0 - sparsity_rate(P)
    (total, le, ge), s = tilted_integrals(P, y, [_k_total, _k_nonpos, _k_nonneg])
    es = np.exp(-s)
    return PosteriorCurves(
        y_grid=y,
        marginal=_phi_scaled(y, s) * total,
        lnsr=np.clip(P.null_weight * es / total, 0.0, 1.0),
        clar=np.clip(rho0 * es / total, 0.0, 1.0),
        lfsr=np.clip(np.minimum(le, ge) / total, 0.0, 1.0),
    )


def central_interval_prob(P: SignalDistribution, y: float, delta: float):
    """``P(|X| < delta | Y = y)``."""
    if delta <= 0:
        return 0.0
    pts = [-delta, delta]

    def inside(x, yv, s):
        return np.where(np.abs(x) < delta, tilted(x, yv, s), 0.0)

    (num, den), _ = tilted_integrals(P, [y], [inside, _k_total], points=pts)
    return float(num[0] / den[0])


__all__ = [
    "CompatibilityReport", "ConsistencyReport", "JointValue", "PosteriorCurves",
    "activity_joint_density", "activity_prob_given_x", "asymmetric_active_density",
    "asymmetric_active_model", "asymmetric_consistency_check", "central_interval_prob", "clar",
    "compatibility_check", "compatible_three_point", "cosh_minus_one_kernel", "exp_posterior_mean",
    "inactive_active_model", "lfsr", "lnsr", "posterior_curves", "pvalue_density",
    "sech_posterior_mean", "sign_error_prob", "solve_compatible_atom", "weighted_sech",
    "zero_moment", "active_density",
]
