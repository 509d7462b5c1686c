"""Two-groups decompositions ``f = (1 - eta1) phi + eta1 f1`` of the marginal density.

Any ``eta1`` in ``[rho1, 1]`` gives a non-negative ``f1`` for a symmetric
prior. Two members have names:

* null/non-null: ``eta1 = P(X != 0)`` and ``f1`` is the marginal of the
  non-null part of the prior;
* inactive/active: ``eta1 = rho1``, the smallest admissible weight, and the
  only member whose ``f1`` vanishes at the origin.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .distributions import (
    PHI0,
    SQRT_2PI,
    SignalDistribution,
    WEIGHT_TOL,
    gauss_weight,
    marginal_density,
    non_null_proportion,
    norm_pdf,
    sparsity_rate,
    tilted,
    tilted_integrals,
)
from .errors import DegenerateError, DomainError, SymmetryError

ZDA_TOL = 1e-9


class Label(str, enum.Enum):
    GENERIC = "generic"
    NULL_NONNULL = "null_nonnull"
    INACTIVE_ACTIVE = "inactive_active"


@dataclass(frozen=True)
class TwoGroupsDecomposition:
    """A mixing weight ``eta1``, a component density ``f1`` and the marginal.

    ``f1`` and ``marginal`` accept a scalar or an array of ``y`` values.
    """

    eta1: float
    f1: Callable
    marginal: Callable
    label: Label = Label.GENERIC

    def null_contribution(self, y):
        return (1.0 - self.eta1) * norm_pdf(y)

    def nonnull_contribution(self, y):
        if self.eta1 == 0.0:
            return np.zeros_like(np.asarray(y, dtype=float))
        return self.eta1 * np.asarray(self.f1(y))

    def residual(self, y):
        """``(1 - eta1) phi + eta1 f1 - marginal`` on ``y``."""
        y = np.asarray(y, dtype=float)
        return self.null_contribution(y) + self.nonnull_contribution(y) - np.asarray(self.marginal(y))


@dataclass(frozen=True)
class HInterval:
    """The admissible mixing weights ``[lower, upper]``."""

    lower: float
    upper: float = 1.0

    def __contains__(self, eta1: float) -> bool:
        return self.lower <= eta1 <= self.upper


def _require_symmetric(P: SignalDistribution):
    if not P.is_symmetric():
        raise SymmetryError("this operation requires a prior symmetric about 0")


def f1_from_eta(P: SignalDistribution, eta1: float, y):
    """Component density implied by mixing weight ``eta1``.

    ``(marginal(y) - (1 - eta1) phi(y)) / eta1``; negative values signal that
    ``eta1`` is too small to be admissible.
    """
    if not 0.0 < eta1 <= 1.0:
        raise DomainError("eta1 must lie in (0, 1]")
    return (marginal_density(P, y) - (1.0 - eta1) * norm_pdf(y)) / eta1


def h_interval(P: SignalDistribution) -> HInterval:
    """``[rho1, 1]`` for a symmetric prior."""
    _require_symmetric(P)
    return HInterval(sparsity_rate(P), 1.0)


def generic_model(P: SignalDistribution, eta1: float) -> TwoGroupsDecomposition:
    """Decomposition with a caller-chosen weight; ``eta1 = 0`` only for ``delta_0``."""
    if eta1 == 0.0:
        if not P.is_null:
            raise DomainError("eta1 = 0 is only valid for the pure-noise prior")
        return TwoGroupsDecomposition(0.0, norm_pdf, lambda y: marginal_density(P, y))
    return TwoGroupsDecomposition(float(eta1), lambda y: f1_from_eta(P, eta1, y),
                                  lambda y: marginal_density(P, y))


def null_nonnull_model(P: SignalDistribution) -> TwoGroupsDecomposition:
    """``eta1 = pi1`` and ``f1`` the marginal of ``P(. | X != 0)``."""
    pi1 = non_null_proportion(P)
    if pi1 <= WEIGHT_TOL:
        raise DegenerateError("P(X != 0) = 0: the null/non-null model collapses to pure noise")
    nonnull = P.nonnull_conditional()
    return TwoGroupsDecomposition(pi1, lambda y: marginal_density(nonnull, y),
                                  lambda y: marginal_density(P, y), Label.NULL_NONNULL)


def cosh_minus_one_kernel(x, y, s):
    """``(cosh(xy) - 1) exp(-x^2/2 - s)`` without cancellation near ``xy = 0``."""
    t = x * y
    small = np.abs(t) < 1.0
    with np.errstate(over="ignore", invalid="ignore"):
        series = 2.0 * np.sinh(0.5 * t) ** 2 * gauss_weight(x, s)
        direct = 0.5 * (tilted(x, y, s) + tilted(-x, y, s)) - gauss_weight(x, s)
    return np.where(small, series, direct)


def active_density(P: SignalDistribution, y, rho1: float | None = None):
    """``psi1(y) = rho1^{-1} phi(y) int (cosh(xy) - 1) exp(-x^2/2) P(dx)``."""
    rho1 = sparsity_rate(P) if rho1 is None else rho1
    (vals,), s = tilted_integrals(P, y, [cosh_minus_one_kernel])
    yv = np.atleast_1d(np.asarray(y, dtype=float))
    out = np.exp(-0.5 * yv * yv + s) / SQRT_2PI * vals / rho1
    return float(out[0]) if np.ndim(y) == 0 else out


def inactive_active_model(P: SignalDistribution) -> TwoGroupsDecomposition:
    """``eta1 = rho1`` with the active density ``psi1`` (symmetric priors)."""
    _require_symmetric(P)
    rho1 = sparsity_rate(P)
    if rho1 <= 0.0:
        raise DegenerateError("rho1 = 0: the inactive/active model collapses to pure noise")
    return TwoGroupsDecomposition(rho1, lambda y: active_density(P, y, rho1),
                                  lambda y: marginal_density(P, y), Label.INACTIVE_ACTIVE)


def zda_holds(d: TwoGroupsDecomposition) -> bool:
    """Whether the component ``f1`` has zero density at the origin."""
    return bool(abs(float(d.marginal(0.0)) - (1.0 - d.eta1) * PHI0) <= ZDA_TOL * PHI0)
