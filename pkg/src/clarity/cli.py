"""Command-line interface: ``clarity <subcommand> ...``.

Exit status is 0 on success, 2 on a usage error and 1 when a computation
fails, in which case a JSON object ``{"error": ..., "message": ...}`` is
printed on stdout. ``CLARITY_THREADS`` caps internal thread parallelism.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click
import numpy as np

from ._io import csv_text, fmt, json_text, parse_grid, write_atomic
from .distributions import Dataset, SignalDistribution, non_null_proportion, null_density_weight, sparsity_rate
from .errors import ClarityError
from .estimation import Method, estimate_on_grid
from .posterior import compatibility_check, posterior_curves, pvalue_density
from .simulate import DECOMPOSITION_COLUMNS, ExperimentConfig, decomposition_table, run_estimator_experiment
from .sparse_limit import ExceedanceFamily, delta_threshold, gamma_alpha, threshold_convergence_probe


class PriorType(click.ParamType):
    """A JSON prior given inline or as ``@path``."""

    name = "prior"

    def convert(self, value, param, ctx):
        if isinstance(value, SignalDistribution):
            return value
        try:
            text = Path(value[1:]).read_text() if value.startswith("@") else value
            return SignalDistribution.from_json(text)
        except (OSError, json.JSONDecodeError, ClarityError, TypeError) as exc:
            self.fail(f"invalid prior spec: {exc}", param, ctx)


class GridType(click.ParamType):
    name = "a:b:n"

    def convert(self, value, param, ctx):
        if isinstance(value, np.ndarray):
            return value
        try:
            return parse_grid(value)
        except ValueError as exc:
            self.fail(str(exc), param, ctx)


class FloatListType(click.ParamType):
    name = "x1,x2,..."

    def convert(self, value, param, ctx):
        try:
            return [float(v) for v in value.split(",") if v.strip()]
        except ValueError:
            self.fail(f"expected comma-separated numbers, got {value!r}", param, ctx)


class FamilyType(click.ParamType):
    name = "family"

    def convert(self, value, param, ctx):
        try:
            return ExceedanceFamily.parse(value)
        except ClarityError as exc:
            self.fail(str(exc), param, ctx)


PRIOR = PriorType()
GRID = GridType()

_prior_option = click.option("--prior", type=PRIOR, required=True,
                             help="JSON prior spec, inline or as @file.")
_grid_option = click.option("--grid", type=GRID, required=True, help="Evaluation grid a:b:n.")
_output_option = click.option("--output", "-o", type=click.Path(dir_okay=False), default=None,
                              help="Write to this file instead of stdout.")


def _emit(text: str, output: str | None):
    if output is None:
        click.echo(text, nl=False)
    else:
        write_atomic(output, text)


def computation(fn):
    """Turn package errors into exit status 1 with a JSON error object."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ClarityError as exc:
            click.echo(json.dumps({"error": type(exc).__name__, "message": str(exc)}))
            sys.exit(1)
    return wrapper


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def main():
    """Two-groups decompositions, local rates and sparse-limit thresholds."""


@main.command()
@_prior_option
@computation
def rates(prior):
    """Print pi1, rho1 and rho0 of a prior as JSON."""
    click.echo(json_text({
        "pi1": non_null_proportion(prior),
        "rho1": sparsity_rate(prior),
        "rho0": null_density_weight(prior),
        "symmetric": prior.is_symmetric(),
        "fingerprint": prior.fingerprint(),
        "prior": prior.to_dict(),
    }), nl=False)


@main.command()
@_prior_option
@_grid_option
@_output_option
@computation
def curves(prior, grid, output):
    """CSV of marginal, lnsr, clar and lfsr on a grid."""
    c = posterior_curves(prior, grid)
    _emit(csv_text(("y", "marginal", "lnsr", "clar", "lfsr"), c.rows()), output)


@main.command()
@_prior_option
@_grid_option
@_output_option
@computation
def decompose(prior, grid, output):
    """CSV of the weighted components of both two-groups models."""
    t = decomposition_table(prior, grid)
    for note in t.notes:
        click.echo(f"note: {note}", err=True)
    _emit(csv_text(DECOMPOSITION_COLUMNS, t.rows()), output)


@main.command("gamma-alpha")
@click.option("--alpha", type=float, required=True, help="Activity index in (0, 2).")
@computation
def gamma_alpha_cmd(alpha):
    """Print the threshold constant gamma_alpha."""
    click.echo(fmt(gamma_alpha(alpha)))


@main.command()
@click.option("--family", type=FamilyType(), required=True,
              help="inverse_power:alpha=A | log_exp:beta=B | cauchy_slab | gamma_exp:alpha=A,beta=B")
@click.option("--y", "y", type=float, required=True)
@click.option("--c", "c", type=float, default=None, help="Override the gamma_exp constant.")
@computation
def threshold(family, y, c):
    """Print the false-signal threshold delta(y)."""
    click.echo(fmt(delta_threshold(family, y, c)))


@main.command("probe-threshold")
@click.option("--gamma", type=float, required=True)
@click.option("--omega", type=float, required=True)
@click.option("--sigmas", type=FloatListType(), required=True, help="Decreasing Cauchy scales.")
@_output_option
@computation
def probe_threshold(gamma, omega, sigmas, output):
    """CSV of P(|X| < gamma/y | y) / clar(y) for shrinking Cauchy priors."""
    rows = threshold_convergence_probe(sigmas, gamma, omega)
    _emit(csv_text(("sigma", "rho1", "y", "delta", "interval_prob", "clar", "ratio"),
                   [(r.sigma, r.rho1, r.y, r.delta, r.interval_prob, r.clar, r.ratio) for r in rows]),
          output)


def _read_observations(source: str) -> np.ndarray:
    text = sys.stdin.read() if source == "-" else Path(source).read_text()
    values = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        field = line.split(",")[0]
        try:
            values.append(float(field))
        except ValueError:
            if lineno == 1:
                continue  # header
            raise click.BadParameter(f"line {lineno}: not a number: {field!r}", param_hint="--input")
    return np.array(values)


@main.command()
@click.option("--input", "source", required=True, help="CSV with one observation per line, or -.")
@click.option("--method", type=click.Choice([m.value for m in Method]), default="sinc", show_default=True)
@_grid_option
@_output_option
@computation
def estimate(source, method, grid, output):
    """CSV of the zero-density-assumption lfdr estimate on a grid."""
    try:
        values = _read_observations(source)
    except OSError as exc:
        raise click.BadParameter(str(exc), param_hint="--input")
    est = estimate_on_grid(Dataset(values), grid, method)
    _emit(csv_text(("y", "lfdr_hat", "flag"), zip(est.y, est.values, est.flags.astype(int))), output)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), required=True)
@computation
def simulate(config_path):
    """Run the estimator comparison experiment described by a JSON config."""
    try:
        cfg = ExperimentConfig.from_json(Path(config_path).read_text())
    except (json.JSONDecodeError, ClarityError, TypeError, ValueError) as exc:
        raise click.BadParameter(str(exc), param_hint="--config")
    result = run_estimator_experiment(cfg)
    click.echo(json_text({"files": [str(p) for p in result.files]}), nl=False)


@main.command()
@_prior_option
@click.option("--tol", type=float, default=1e-10, show_default=True)
@computation
def compat(prior, tol):
    """Print the compatibility report as JSON."""
    click.echo(json_text(compatibility_check(prior, tol).to_dict()), nl=False)


@main.command("pvalue-density")
@click.option("--p", "p", type=float, required=True)
@click.option("--x", "x", type=float, required=True)
@computation
def pvalue_density_cmd(p, x):
    """Print the density of a two-sided p-value at p given mean x."""
    click.echo(fmt(pvalue_density(p, x)))


if __name__ == "__main__":  # pragma: no cover
    main()
