"""Seeded experiments: estimator comparison, perturbation study and decomposition tables."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import optimize

from ._io import csv_text, json_text, parse_grid, write_atomic
from .distributions import (
    SignalDistribution,
    marginal_cdf,
    marginal_density,
    marginal_sf,
    point_mass,
    sample,
)
from .errors import DegenerateError, DomainError
from .estimation import Method, max_workers, zda_lfdr_estimate
from .posterior import asymmetric_active_model, clar, lnsr, posterior_curves
from .quadrature import integrate_panels
from .twogroups import inactive_active_model, null_nonnull_model

_CONFIG_KEYS = {"prior_spec", "n", "seeds", "y_grid", "methods", "outputs"}


@dataclass(frozen=True)
class ExperimentConfig:
    """Settings for :func:`run_estimator_experiment`.

    JSON form::

        {"prior_spec": {"components": [...]}, "n": 10000, "seeds": [1, 2],
         "y_grid": [-4, 4, 401], "methods": ["sinc", "kde"], "outputs": "out/"}
    """

    prior_spec: dict
    n: int = 10_000
    seeds: tuple[int, ...] = (1,)
    y_grid: tuple[float, float, int] = (-4.0, 4.0, 401)
    methods: tuple[Method, ...] = (Method.SINC, Method.KDE)
    outputs: str = "experiment"

    def __post_init__(self):
        object.__setattr__(self, "methods", tuple(Method(m) for m in self.methods))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        a, b, count = self.y_grid
        object.__setattr__(self, "y_grid", (float(a), float(b), int(count)))
        if int(self.n) < 100:
            raise DomainError("n must be at least 100")
        object.__setattr__(self, "n", int(self.n))
        if self.y_grid[2] < 2:
            raise DomainError("y_grid needs at least 2 points")
        if not self.methods:
            raise DomainError("at least one method is required")
        if not self.seeds:
            raise DomainError("at least one seed is required")
        SignalDistribution.from_json(self.prior_spec)

    @classmethod
    def from_json(cls, spec) -> "ExperimentConfig":
        if isinstance(spec, (str, bytes)):
            spec = json.loads(spec)
        unknown = set(spec) - _CONFIG_KEYS
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        if "prior_spec" not in spec:
            raise DomainError("config needs 'prior_spec'")
        grid = spec.get("y_grid", (-4.0, 4.0, 401))
        if isinstance(grid, str):
            g = parse_grid(grid)
            grid = (g[0], g[-1], g.size)
        kwargs = {k: spec[k] for k in ("n", "seeds", "methods", "outputs") if k in spec}
        return cls(prior_spec=spec["prior_spec"], y_grid=tuple(grid), **kwargs)

    @property
    def prior(self) -> SignalDistribution:
        return SignalDistribution.from_json(self.prior_spec)

    def grid(self) -> np.ndarray:
        a, b, count = self.y_grid
        return np.linspace(a, b, count)


@dataclass(frozen=True)
class ExperimentResult:
    """Truth curves, per-seed estimates and error summaries."""

    y_grid: np.ndarray
    truth: object
    estimates: dict = field(repr=False)   # (method, seed) -> GridEstimate
    errors: dict                          # method -> seed -> metric -> value
    files: tuple[Path, ...] = ()

    def mean_error(self, method, metric: str) -> float:
        return float(np.mean([e[metric] for e in self.errors[Method(method).value].values()]))


def _error_summary(values, truth):
    return {
        "mean_abs_to_clar": float(np.mean(np.abs(values - truth.clar))),
        "sup_abs_to_clar": float(np.max(np.abs(values - truth.clar))),
        "mean_abs_to_lnsr": float(np.mean(np.abs(values - truth.lnsr))),
        "sup_abs_to_lnsr": float(np.max(np.abs(values - truth.lnsr))),
    }


def run_estimator_experiment(cfg: ExperimentConfig, write: bool = True) -> ExperimentResult:
    """Simulate, fit every method per seed and compare against the exact curves.

    Writes ``truth.csv``, ``estimates.csv`` and ``summary.json`` under
    ``cfg.outputs`` when ``write`` is true.
    """
    P = cfg.prior
    y = cfg.grid()
    truth = posterior_curves(P, y)

    def fit(seed):
        data = sample(P, cfg.n, seed)
        return seed, {m: zda_lfdr_estimate(data, m) for m in cfg.methods}

    with ThreadPoolExecutor(max_workers=min(max_workers(), len(cfg.seeds))) as pool:
        fitted = list(pool.map(fit, cfg.seeds))

    estimates, errors = {}, {m.value: {} for m in cfg.methods}
    for seed, models in fitted:
        for m, model in models.items():
            est = model.evaluate(y)
            estimates[(m.value, seed)] = est
            summary = _error_summary(est.values, truth)
            summary["eta1_hat"] = model.eta1_hat_raw
            summary["bandwidth"] = model.bandwidth
            summary["flagged_points"] = int(est.flags.sum())
            errors[m.value][str(seed)] = summary

    files = ()
    if write:
        out = Path(cfg.outputs)
        truth_rows = truth.rows()
        est_rows = [
            (m, seed, yy, v, r, int(f))
            for (m, seed), est in estimates.items()
            for yy, v, r, f in zip(est.y, est.values, est.raw, est.flags)
        ]
        metrics = ("mean_abs_to_clar", "sup_abs_to_clar", "mean_abs_to_lnsr", "sup_abs_to_lnsr")
        summary = {
            "prior_spec": P.to_dict(),
            "prior_fingerprint": P.fingerprint(),
            "n": cfg.n,
            "seeds": list(cfg.seeds),
            "y_grid": list(cfg.y_grid),
            "truth": {"lnsr_at_zero": lnsr(P, 0.0), "clar_at_zero": clar(P, 0.0),
                      "dominance_holds": truth.dominance_holds()},
            "methods": {
                m: {"per_seed": per_seed,
                    "mean": {k: float(np.mean([e[k] for e in per_seed.values()])) for k in metrics}}
                for m, per_seed in errors.items()
            },
        }
        files = (
            write_atomic(out / "truth.csv", csv_text(("y", "marginal", "lnsr", "clar", "lfsr"), truth_rows)),
            write_atomic(out / "estimates.csv",
                         csv_text(("method", "seed", "y", "lfdr_hat", "raw", "flag"), est_rows)),
            write_atomic(out / "summary.json", json_text(summary)),
        )
    return ExperimentResult(y, truth, estimates, errors, files)


# --------------------------------------------------------------------------
# Perturbation study
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PerturbationRow:
    xi: float
    lnsr_base: float
    lnsr_perturbed: float
    clar_base: float
    clar_perturbed: float
    tv: float
    tv_tail_bound: float


_TV_LIMIT = 10.0


def perturb_null_atom(P: SignalDistribution, xi: float) -> SignalDistribution:
    """Split the atom at zero into two atoms at ``+-xi`` of half its weight each."""
    w0 = P.null_weight
    if w0 <= 0:
        raise DomainError("the base prior has no atom at 0")
    if not xi > 0:
        raise DomainError("xi must be positive")
    kept = [c for c in P.components if not (c.is_atom and c.location == 0.0)]
    return SignalDistribution(tuple(kept) + (point_mass(xi, 0.5 * w0), point_mass(-xi, 0.5 * w0)))


def _noisy_tail_mass(component) -> float:
    """``P(|X + Z| > 10)`` for ``X`` drawn from one (unit-weight) component."""
    R = SignalDistribution((component.with_weight(1.0),))
    return float(marginal_cdf(R, -_TV_LIMIT)) + float(marginal_sf(R, _TV_LIMIT))


def tv_distance(P: SignalDistribution, Q: SignalDistribution) -> tuple[float, float]:
    """``(1/2 int_{|y|<=10} |f_P - f_Q| dy, bound on the remainder beyond |y| = 10)``.

    Components shared by both priors cancel in ``f_P - f_Q``; the bound sums
    the weighted tail masses of the components that differ.
    """
    def signed(y):
        return np.asarray(marginal_density(P, y)) - np.asarray(marginal_density(Q, y))

    # |f_P - f_Q| has kinks where the difference changes sign; put breakpoints there
    grid = np.linspace(-_TV_LIMIT, _TV_LIMIT, 2001)
    d = signed(grid)
    kinks = [optimize.brentq(lambda t: float(signed(t)), grid[i], grid[i + 1], xtol=1e-14)
             for i in np.flatnonzero(d[:-1] * d[1:] < 0)]
    breaks = np.concatenate([np.arange(-_TV_LIMIT, _TV_LIMIT + 1.0), kinks])
    value, _ = integrate_panels(lambda y: np.abs(signed(y)), breaks)
    only_p = list(P.components)
    only_q = []
    for c in Q.components:
        if c in only_p:
            only_p.remove(c)
        else:
            only_q.append(c)
    tail = sum(c.weight * _noisy_tail_mass(c) for c in only_p + only_q)
    return 0.5 * value, 0.5 * tail


def run_perturbation_demo(P_base: SignalDistribution, xi_seq: Sequence[float],
                          y: float) -> list[PerturbationRow]:
    """Compare ``lnsr``, ``clar`` and the marginal between ``P`` and its perturbations."""
    if P_base.null_weight <= 0:
        raise DomainError("the base prior has no atom at 0")
    l_base = lnsr(P_base, y)
    c_base = clar(P_base, y)
    rows = []
    for xi in xi_seq:
        Q = perturb_null_atom(P_base, float(xi))
        tv, tail = tv_distance(P_base, Q)
        rows.append(PerturbationRow(float(xi), l_base, lnsr(Q, y), c_base, clar(Q, y), tv, tail))
    return rows


# --------------------------------------------------------------------------
# Decomposition tables
# --------------------------------------------------------------------------

DECOMPOSITION_COLUMNS = ("y", "marginal", "null_component", "nonnull_component",
                         "inactive_component", "active_component")


@dataclass(frozen=True)
class DecompositionTable:
    """Weighted contributions of both two-groups models on a grid."""

    y: np.ndarray
    marginal: np.ndarray
    null_component: np.ndarray
    nonnull_component: np.ndarray
    inactive_component: np.ndarray
    active_component: np.ndarray
    notes: tuple[str, ...] = ()

    def rows(self):
        return zip(self.y, self.marginal, self.null_component, self.nonnull_component,
                   self.inactive_component, self.active_component)


def decomposition_table(P: SignalDistribution, grid) -> DecompositionTable:
    """Null/non-null and inactive/active contributions; asymmetric priors must be compatible."""
    y = np.atleast_1d(np.asarray(grid, dtype=float))
    marginal = np.asarray(marginal_density(P, y))
    notes = []
    try:
        nn = null_nonnull_model(P)
        null_c, nonnull_c = nn.null_contribution(y), nn.nonnull_contribution(y)
    except DegenerateError as exc:
        null_c, nonnull_c = marginal.copy(), np.zeros_like(y)
        notes.append(f"null/non-null: {exc}")
    try:
        ia = inactive_active_model(P) if P.is_symmetric() else asymmetric_active_model(P)
        inactive_c, active_c = ia.null_contribution(y), ia.nonnull_contribution(y)
    except DegenerateError as exc:
        inactive_c, active_c = marginal.copy(), np.zeros_like(y)
        notes.append(f"inactive/active: {exc}")
    return DecompositionTable(y, marginal, np.asarray(null_c), np.asarray(nonnull_c),
                              np.asarray(inactive_c), np.asarray(active_c), tuple(notes))


@dataclass(frozen=True)
class FigureFiles:
    null_nonnull: Path
    inactive_active: Path
    notes: tuple[str, ...] = ()


def emit_decomposition_figures(P: SignalDistribution, grid, outdir) -> FigureFiles:
    """Write ``null_nonnull.csv`` and ``inactive_active.csv`` under ``outdir``."""
    t = decomposition_table(P, grid)
    out = Path(outdir)
    a = write_atomic(out / "null_nonnull.csv",
                     csv_text(("y", "marginal", "null_contribution", "nonnull_contribution"),
                              zip(t.y, t.marginal, t.null_component, t.nonnull_component)))
    b = write_atomic(out / "inactive_active.csv",
                     csv_text(("y", "marginal", "inactive_contribution", "active_contribution"),
                              zip(t.y, t.marginal, t.inactive_component, t.active_component)))
    if t.notes:
        write_atomic(out / "notes.txt", "\n".join(t.notes) + "\n")
    return FigureFiles(a, b, t.notes)
