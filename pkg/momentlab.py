"""
Moment Lab CLI
Command line entry point: moments, main-term predictions, decompositions, fits and checks
"""

import json
import logging
import sys
from typing import Optional, Tuple

import click

from analysis.lfunctions import Method
from analysis.predictor import (central_breakdown, predict_all_moduli, predict_primitive,
                                recursive_error_budget)
from database.lvalue_cache import LValueCache, lvalue_cache_get_or_compute
from harness.experiment import fit_groups, run_experiment
from harness.fitting import relative_deviations
from harness.moments import MomentReport, decompose_m1_m2
from harness.reports import gauss_table, load_archive
from harness.verify import SUITES, run_suites, selftest
from utils.config import FAMILIES, load_config, parse_complex
from utils.errors import MomentLabError
from utils.logging_setup import configure_logging


def _echo_json(payload) -> None:
    click.echo(json.dumps(payload, indent=2, sort_keys=True))


def _pair(z: complex):
    return [z.real, z.imag]


def _report_checks(results) -> None:
    failed = 0
    for result in results:
        mark = "✅" if result.passed else "❌"
        click.echo(f"{mark} [{result.suite}] {result.name}: {result.detail}")
        failed += not result.passed
    click.echo(f"{len(results) - failed}/{len(results)} checks passed")
    if failed:
        sys.exit(1)


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="INI config with [experiment], [runtime] and [accuracy] sections")
@click.option("--out", help="Output path prefix for report files")
@click.option("--threads", type=int, help="Worker processes for L-value computation")
@click.option("--cache-dir", help="L-value cache directory (default: $MOMENTLAB_CACHE_DIR or ./cache)")
@click.option("--afe-cutoff-constant", type=float, help="C in the AFE cutoff n <= C sqrt(N (1 + |Im s|))")
@click.option("--lvalue-admission-error", type=float, help="Largest admissible L-value error bound")
@click.option("--verbose", is_flag=True, help="Debug logging")
@click.pass_context
def main(ctx, config_path: Optional[str], out: Optional[str], threads: Optional[int],
         cache_dir: Optional[str], afe_cutoff_constant: Optional[float],
         lvalue_admission_error: Optional[float], verbose: bool):
    """Twisted first moments of quadratic Dirichlet L-functions."""
    configure_logging(logging.DEBUG if verbose else logging.INFO)
    try:
        config = load_config(config_path).with_overrides(
            {"out": out, "threads": threads, "cache_dir": cache_dir,
             "afe_cutoff_constant": afe_cutoff_constant,
             "lvalue_admission_error": lvalue_admission_error})
    except MomentLabError as e:
        raise click.ClickException(str(e))
    ctx.obj = config


@main.command()
@click.option("--family", type=click.Choice(FAMILIES), help="Family of moduli")
@click.option("--X", "x_values", type=float, multiple=True, help="Family size (repeatable)")
@click.option("--l", "l_values", type=int, multiple=True, help="Twist (repeatable)")
@click.option("--alpha", "alphas", multiple=True, help="Shift such as 0.1 or 0.02+0.5j (repeatable)")
@click.option("--weight", help="Weight name")
@click.pass_obj
def moment(config, family: Optional[str], x_values: Tuple[float, ...], l_values: Tuple[int, ...],
           alphas: Tuple[str, ...], weight: Optional[str]):
    """Run the moment grid and write CSV and JSON reports."""
    try:
        config = config.with_overrides({
            "family": family,
            "x_values": list(x_values) or None,
            "l_values": list(l_values) or None,
            "alphas": [parse_complex(a) for a in alphas] or None,
            "weight": weight,
        })
        result = run_experiment(config)
    except MomentLabError as e:
        raise click.ClickException(str(e))
    for report in result.reports:
        status = report.error or f"deviation {report.deviation}"
        for _, relative in relative_deviations([report]):
            status += f", relative {relative:.3e}"
        click.echo(f"{report.family} X={report.X:g} l={report.l} alpha={report.alpha}: "
                   f"empirical {report.empirical} ({status})")
    for fit in result.fits:
        click.echo(f"fit {fit.labels}: delta_hat={fit.delta_hat:.4f} r^2={fit.r_squared:.4f} "
                   f"(target {fit.target_exponent}, RH {fit.rh_exponent})")
    for kind, path in result.paths.items():
        click.echo(f"wrote {kind}: {path}")


@main.command()
@click.option("--X", "X", type=float, required=True)
@click.option("--l", "l", type=int, default=1, show_default=True)
@click.option("--alpha-re", type=float, default=0.0, show_default=True)
@click.option("--alpha-im", type=float, default=0.0, show_default=True)
@click.option("--family", type=click.Choice(["all", "primitive", "central"]), default="primitive",
              show_default=True)
@click.option("--weight", default="bump", show_default=True)
def predict(X: float, l: int, alpha_re: float, alpha_im: float, family: str, weight: str):
    """Print the main-term breakdown as JSON."""
    alpha = complex(alpha_re, alpha_im)
    try:
        if family == "all":
            breakdown = predict_all_moduli(X, l, alpha, weight)
        elif family == "central":
            breakdown = central_breakdown(X, l, weight)
        else:
            breakdown = predict_primitive(X, l, alpha, weight)
    except MomentLabError as e:
        raise click.ClickException(str(e))
    _echo_json(breakdown.to_dict())


@main.command()
@click.option("--X", "X", type=float, required=True)
@click.option("--l", "l", type=int, default=1, show_default=True)
@click.option("--alpha-re", type=float, default=0.0, show_default=True)
@click.option("--alpha-im", type=float, default=0.0, show_default=True)
@click.option("--Y", "Y", type=int, required=True, help="Split point of the a-sum")
@click.option("--weight", default="bump", show_default=True)
@click.option("--delta", type=float, default=0.5, show_default=True,
              help="Error exponent assumed for the a <= Y strata")
@click.option("--f", "f", type=float, default=0.5, show_default=True,
              help="Error exponent assumed for the rest")
@click.pass_obj
def decompose(config, X: float, l: int, alpha_re: float, alpha_im: float, Y: int, weight: str,
              delta: float, f: float):
    """Print M1, M2, their main terms and the error budget of the split."""
    cache = LValueCache(config.cache_dir)
    try:
        result = decompose_m1_m2(X, l, complex(alpha_re, alpha_im), Y, weight, cache=cache,
                                 threads=config.threads,
                                 admission_error=config.lvalue_admission_error,
                                 cutoff_constant=config.afe_cutoff_constant)
    except MomentLabError as e:
        raise click.ClickException(str(e))
    payload = {"M1": _pair(result.M1), "M2": _pair(result.M2), "total": _pair(result.total), "Y": Y}
    payload["error_budget"] = recursive_error_budget(X, l, Y, delta, f)
    if result.main_terms is not None:
        payload["main_terms"] = {k: _pair(v) for k, v in result.main_terms.items()}
    _echo_json(payload)


@main.command()
@click.argument("archive", type=click.Path(exists=True, dir_okay=False))
def fit(archive: str):
    """Fit error exponents from a JSON report archive."""
    reports = [MomentReport.from_dict(r) for r in load_archive(archive)["reports"]]
    fits = fit_groups(reports)
    if not fits:
        click.echo("No group has three successful reports with distinct X")
    for result in fits:
        _echo_json(result.to_dict())


@main.command()
@click.option("--suite", type=click.Choice(SUITES + ("all",)), default="all", show_default=True)
def verify(suite: str):
    """Run property suites; exits nonzero on any failure."""
    _report_checks(run_suites(suite))


@main.command()
@click.option("--n", "n_values", type=int, multiple=True, help="Odd positive n (repeatable)")
@click.option("--n-max", type=int, help="Add every odd n up to this bound")
@click.option("--q", "q_values", type=int, multiple=True, help="Frequency (repeatable)")
@click.option("--q-max", type=int, help="Add every q from 1 up to this bound")
@click.option("--chi", default="jacobi", show_default=True, help="jacobi, twisted or psi:<j>")
def gauss(n_values: Tuple[int, ...], n_max: Optional[int], q_values: Tuple[int, ...],
          q_max: Optional[int], chi: str):
    """Print tau and G(chi_n, q) over the requested n and q as CSV."""
    ns = sorted(set(n_values) | set(range(1, (n_max or 0) + 1, 2)))
    qs = sorted(set(q_values) | set(range(1, (q_max or 0) + 1)))
    if not ns or not qs:
        raise click.UsageError("Give at least one n (--n or --n-max) and one q (--q or --q-max)")
    try:
        frame = gauss_table(ns, qs, chi)
    except MomentLabError as e:
        raise click.ClickException(str(e))
    click.echo(frame.to_csv(index=False), nl=False)


@main.command()
@click.option("--d", "d", type=int, required=True, help="Odd square-free d")
@click.option("--s-re", type=float, default=0.5, show_default=True)
@click.option("--s-im", type=float, default=0.0, show_default=True)
@click.option("--method", type=click.Choice([m.value for m in Method]),
              default=Method.SMOOTHED_AFE.value, show_default=True)
@click.pass_obj
def lvalue(config, d: int, s_re: float, s_im: float, method: str):
    """Print L(s, chi^(8d)) from the cache, computing it if needed."""
    try:
        record = lvalue_cache_get_or_compute(d, complex(s_re, s_im), config.cache_dir, Method(method))
    except MomentLabError as e:
        raise click.ClickException(str(e))
    _echo_json(record.to_dict())


@main.command("selftest")
def selftest_command():
    """Quick run of every suite plus a small moment."""
    _report_checks(selftest())


if __name__ == "__main__":
    main()
