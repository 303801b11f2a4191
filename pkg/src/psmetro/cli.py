"""Command-line front end.

Usage:
    psmetro three-level --lambda 1 --alpha 0.785398 --x 1e-6
    psmetro three-level-sweep --lambda 1 --x-steps 61 --alpha-steps 31 -o grid.csv
    psmetro bound-check --dim 4 --trials 10000 --seed 42
    psmetro kd --demo three-level --alpha 1.0472
    psmetro wva --entangled --n 2 --lx 1 --ly -0.9
    psmetro identity-check --trials 100 --seed 3

Every command writes a table (CSV by default, or JSON with ``--format json``)
to standard output or ``--out``. CSV summaries go to standard error as
``# key: value`` lines; JSON output carries them under ``"summary"``.
Floats are written with ``repr`` so they parse back bit-exact.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from typing import Any, Iterable, Optional, Sequence

import click
import numpy as np

from .errors import AlphaSingularError, DimensionCapExceededError, PsmetroError, ZeroMeanError
from .fisher import CostModel, postselected_metrics, random_protocol
from .linalg import (
    make_rng,
    operator_norm_sq,
    random_haar_ket,
    random_hermitian,
)
from .protocols import (
    SWEEP_COLUMNS,
    SweepGrid,
    ThreeLevelConfig,
    OPTIMUM_X,
    metrics_record,
    sweep,
    three_level_limits,
    three_level_metrics,
    three_level_setup,
)
from .quasiprob import (
    classicality_report,
    kd_distribution,
    kd_identity_check,
    quantum_modification,
    wigner_formula,
)
from .states import Postselection, encode
from .weakvalue import (
    EntangledProbeConfig,
    entangled_scaling_report,
    optimal_postselection,
    sigma_z,
    spin_half_pair,
    weak_value,
    wva_efficiency,
)

__all__ = ["main"]


def _plain(value: Any) -> Any:
    """Python scalars only; non-finite floats become ``None``."""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def _csv_cell(value: Any) -> str:
    value = _plain(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _emit(
    command: str,
    params: dict,
    records: Sequence[dict],
    summary: dict,
    fmt: str,
    out: Optional[str],
    columns: Optional[Iterable[str]] = None,
) -> None:
    columns = list(columns) if columns is not None else list(records[0]) if records else []
    if fmt == "json":
        doc = {
            "command": command,
            "params": {k: _plain(v) for k, v in params.items()},
            "records": [{c: _plain(r.get(c)) for c in columns} for r in records],
            "summary": {k: _plain(v) for k, v in summary.items()},
        }
        text = json.dumps(doc, indent=2, allow_nan=False) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for r in records:
            writer.writerow([_csv_cell(r.get(c)) for c in columns])
        text = buf.getvalue()
        for k, v in summary.items():
            click.echo(f"# {k}: {_csv_cell(v)}", err=True)
    if out is None:
        click.echo(text, nl=False)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def common_options(fn):
    fn = click.option("--tol", type=float, default=1e-9, show_default=True,
                      help="Threshold used in reports only.")(fn)
    fn = click.option("--seed", type=click.IntRange(min=0, max=2**64 - 1), default=0,
                      show_default=True)(fn)
    fn = click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
                      show_default=True)(fn)
    fn = click.option("--out", "-o", type=click.Path(dir_okay=False), default=None,
                      help="Output file (default: standard output).")(fn)
    return fn


@click.group()
def main():
    """Postselected quantum metrology: Fisher information, weak values, KD tables."""


def _three_level_config(lam, lambda_tilde, alpha, x, phi, delta_theta, theta0):
    if x is not None and (phi is not None or delta_theta is not None):
        raise click.UsageError("give either --x or --phi/--delta-theta, not both")
    if x is None and phi is None:
        raise click.UsageError("one of --x or --phi is required")
    try:
        if x is not None:
            return ThreeLevelConfig.from_x(lam, alpha, x, lambda_tilde=lambda_tilde, theta0=theta0)
        return ThreeLevelConfig(lam, alpha, lambda_tilde, phi, theta0, delta_theta or 0.0)
    except PsmetroError as exc:
        raise click.BadParameter(str(exc)) from exc


@main.command("three-level")
@click.option("--lambda", "lam", type=float, required=True)
@click.option("--lambda-tilde", type=float, default=0.0, show_default=True)
@click.option("--alpha", type=float, required=True, help="Radians.")
@click.option("--x", type=float, default=None, help="x = phi - lambda * delta_theta.")
@click.option("--phi", type=float, default=None)
@click.option("--delta-theta", type=float, default=None)
@click.option("--theta0", type=float, default=0.0, show_default=True)
@click.option("--limit", is_flag=True, help="Also report the x -> 0 limits.")
@click.option("--prep-cost", type=float, default=None)
@click.option("--measure-cost", type=float, default=None)
@click.option("--postselect-cost", type=float, default=None)
@common_options
def three_level(lam, lambda_tilde, alpha, x, phi, delta_theta, theta0, limit,
                prep_cost, measure_cost, postselect_cost, out, fmt, seed, tol):
    """One point of the three-level protocol."""
    cfg = _three_level_config(lam, lambda_tilde, alpha, x, phi, delta_theta, theta0)
    cost = None
    if any(c is not None for c in (prep_cost, measure_cost, postselect_cost)):
        try:
            cost = CostModel(prep_cost or 0.0, 1.0 if measure_cost is None else measure_cost,
                             postselect_cost or 0.0)
        except ValueError as exc:
            raise click.BadParameter(str(exc)) from exc
    result = three_level_metrics(cfg, cost)
    record = metrics_record(result, alpha)
    columns = list(SWEEP_COLUMNS)
    if cost is not None:
        record["cost_rate"] = result.metrics.cost_rate
        columns.append("cost_rate")
    summary = {}
    if limit:
        try:
            p_lim, qfi_lim, xi_lim = three_level_limits(lam, alpha)
        except AlphaSingularError as exc:
            raise click.ClickException(str(exc)) from exc
        summary = {"p_lim": p_lim, "qfi_lim": qfi_lim, "xi_lim": xi_lim}
    params = {"lambda": lam, "lambda_tilde": lambda_tilde, "alpha": alpha, "x": cfg.x}
    _emit("three-level", params, [record], summary, fmt, out, columns)


@main.command("three-level-sweep")
@click.option("--lambda", "lam", type=float, required=True)
@click.option("--lambda-tilde", type=float, default=0.0, show_default=True)
@click.option("--x-min", type=float, default=-1.5, show_default=True)
@click.option("--x-max", type=float, default=1.5, show_default=True)
@click.option("--x-steps", type=click.IntRange(min=1), default=61, show_default=True)
@click.option("--alpha-min", type=float, default=0.0, show_default=True)
@click.option("--alpha-max", type=float, default=1.5, show_default=True)
@click.option("--alpha-steps", type=click.IntRange(min=1), default=31, show_default=True)
@common_options
def three_level_sweep(lam, lambda_tilde, x_min, x_max, x_steps, alpha_min, alpha_max,
                      alpha_steps, out, fmt, seed, tol):
    """Grid of the three-level protocol over (x, alpha)."""
    try:
        base = ThreeLevelConfig(lam, 0.0, lambda_tilde)
        grid = SweepGrid.linspace(x_min, x_max, x_steps, alpha_min, alpha_max, alpha_steps)
    except (PsmetroError, ValueError) as exc:
        raise click.BadParameter(str(exc)) from exc
    records = sweep(base, grid)
    params = {
        "lambda": lam, "lambda_tilde": lambda_tilde, "x_min": x_min, "x_max": x_max,
        "x_steps": x_steps, "alpha_min": alpha_min, "alpha_max": alpha_max,
        "alpha_steps": alpha_steps,
    }
    summary = {"cells": len(records), "divergent": sum(r["divergent"] for r in records)}
    _emit("three-level-sweep", params, records, summary, fmt, out, SWEEP_COLUMNS)


BOUND_COLUMNS = ("trial", "seed", "dim", "rank", "p_ps", "xi", "bound", "ratio", "within")


@main.command("bound-check")
@click.option("--dim", type=click.IntRange(2, 8), required=True)
@click.option("--trials", type=click.IntRange(min=1), default=1000, show_default=True)
@common_options
def bound_check(dim, trials, out, fmt, seed, tol):
    """Monte-Carlo check of 0 <= p I_Q <= 4 ||A^2|| on random protocols.

    Trial ``i`` uses seed ``seed + i``. Exits 1 if any trial violates the bound.
    """
    records = []
    for i in range(trials):
        psi, cfg, ps = random_protocol(dim, seed + i)
        metrics = postselected_metrics(psi, cfg, ps)
        bound = 4.0 * operator_norm_sq(cfg.generator)
        within = -tol <= metrics.xi <= bound + tol
        records.append({
            "trial": i, "seed": seed + i, "dim": dim, "rank": ps.rank, "p_ps": metrics.prob,
            "xi": metrics.xi, "bound": bound, "ratio": metrics.xi / bound, "within": within,
        })
    violations = sum(not r["within"] for r in records)
    summary = {
        "trials": trials,
        "violations": violations,
        "max_ratio": max(r["ratio"] for r in records),
    }
    params = {"dim": dim, "trials": trials, "seed": seed, "tol": tol}
    _emit("bound-check", params, records, summary, fmt, out, BOUND_COLUMNS)
    if violations:
        sys.exit(1)


KD_COLUMNS = ("table", "m", "k", "re", "im")


def _table_rows(name: str, table: np.ndarray) -> list[dict]:
    table = np.asarray(table)
    return [
        {"table": name, "m": m, "k": k, "re": float(np.real(v)), "im": float(np.imag(v))}
        for (m, k), v in np.ndenumerate(table)
    ]


@main.command("kd")
@click.option("--demo", type=click.Choice(["three-level", "commuting"]), default=None)
@click.option("--random", "use_random", is_flag=True, help="Random protocol from --seed.")
@click.option("--alpha", type=float, default=math.pi / 3, show_default=True)
@click.option("--lambda", "lam", type=float, default=1.0, show_default=True)
@click.option("--dim", type=click.IntRange(2, 8), default=3, show_default=True)
@common_options
def kd(demo, use_random, alpha, lam, dim, out, fmt, seed, tol):
    """KD table, Wigner formula and modification terms with a classicality report.

    Table rows follow ascending eigenvalues; columns follow the postselection basis.
    """
    if (demo is None) == (not use_random):
        raise click.UsageError("choose exactly one of --demo or --random")
    if demo == "three-level":
        try:
            cfg = ThreeLevelConfig.from_x(lam, alpha, OPTIMUM_X)
        except PsmetroError as exc:
            raise click.BadParameter(str(exc)) from exc
        psi_i, enc, ps = three_level_setup(cfg)
        psi, gen = encode(psi_i, enc), enc.generator
    elif demo == "commuting":
        rng = make_rng(seed)
        psi = random_haar_ket(dim, rng)
        gen = random_hermitian(dim, rng)
        ps = Postselection(gen.eigenvectors, (0,))
    else:
        rng = make_rng(seed)
        psi_i, enc, ps = random_protocol(dim, rng)
        psi, gen = encode(psi_i, enc), enc.generator
    table = kd_distribution(psi, gen, ps)
    wig = wigner_formula(psi, gen, ps)
    mod = quantum_modification(psi, gen, ps)
    report = classicality_report(table)
    ident = kd_identity_check(psi, gen, ps)
    records = _table_rows("kd", table.entries) + _table_rows("wigner", wig) + _table_rows(
        "modification", mod
    )
    summary = {
        "classical": report.classical,
        "min_real": report.min_real,
        "max_abs_imag": report.max_abs_imag,
        "identity_residual": ident.max_residual,
        "identity_holds": ident.max_residual < tol,
        "complex_identity_residual": ident.complex_residual,
        "imag_flagged": ident.imag_flagged,
        "max_abs_modification": float(np.max(np.abs(mod))),
    }
    params = {"demo": demo or "random", "alpha": alpha, "lambda": lam, "dim": dim, "seed": seed}
    _emit("kd", params, records, summary, fmt, out, KD_COLUMNS)


WVA_COLUMNS = ("aw_re", "aw_im", "p_s", "eta", "approx_p_s", "relative_gap", "anomalous")


@main.command("wva")
@click.option("--entangled", "mode", flag_value="entangled")
@click.option("--spin-half", "mode", flag_value="spin-half")
@click.option("--n", type=click.IntRange(min=1), default=2, show_default=True)
@click.option("--lx", type=float, default=1.0, show_default=True)
@click.option("--ly", type=float, default=0.0, show_default=True)
@click.option("--sub-dim", type=click.IntRange(min=2), default=2, show_default=True)
@click.option("--aw-target", type=float, default=None,
              help="Report the lambda_y values that reach this weak value.")
@click.option("--theta", type=float, default=0.6, show_default=True)
@click.option("--phi", type=float, default=0.0, show_default=True)
@common_options
def wva(mode, n, lx, ly, sub_dim, aw_target, theta, phi, out, fmt, seed, tol):
    """Optimal weak-value amplification: entangled probes or a spin-1/2 pair."""
    if mode is None:
        raise click.UsageError("choose --entangled or --spin-half")
    summary: dict = {}
    if mode == "entangled":
        try:
            config = EntangledProbeConfig(n, lx, ly, sub_dim)
            rep = entangled_scaling_report(config, aw_target)
        except (DimensionCapExceededError, ZeroMeanError) as exc:
            raise click.ClickException(str(exc)) from exc
        except ValueError as exc:
            raise click.BadParameter(str(exc)) from exc
        record = {
            "aw_re": rep.weak_value, "aw_im": 0.0, "p_s": rep.prob,
            "eta": rep.prob * rep.weak_value**2, "approx_p_s": rep.approx_prob,
            "relative_gap": rep.relative_gap, "anomalous": rep.anomalous,
        }
        if rep.lambda_y_roots is not None:
            summary = {"lambda_y_root_1": rep.lambda_y_roots[0],
                       "lambda_y_root_2": rep.lambda_y_roots[1]}
        params = {"mode": mode, "n": n, "lx": lx, "ly": ly, "sub_dim": sub_dim}
    else:
        psi_i, psi_f = spin_half_pair(theta, phi)
        gen = sigma_z()
        try:
            aw = weak_value(psi_i, psi_f, gen)
        except PsmetroError as exc:
            raise click.ClickException(str(exc)) from exc
        p_s = abs(psi_f.inner(psi_i)) ** 2
        record = {
            "aw_re": aw.real, "aw_im": aw.imag, "p_s": p_s,
            "eta": wva_efficiency(psi_i, psi_f, gen), "approx_p_s": None,
            "relative_gap": None, "anomalous": None,
        }
        optimal = optimal_postselection(psi_i, gen)
        summary = {"optimal_overlap": abs(optimal.inner(psi_f)),
                   "bound": operator_norm_sq(gen)}
        params = {"mode": mode, "theta": theta, "phi": phi}
    _emit("wva", params, [record], summary, fmt, out, WVA_COLUMNS)


IDENTITY_COLUMNS = ("trial", "seed", "dim", "residual", "complex_residual", "imag_flagged")


@main.command("identity-check")
@click.option("--trials", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--dim-max", type=click.IntRange(2, 8), default=5, show_default=True)
@common_options
def identity_check(trials, dim_max, out, fmt, seed, tol):
    """KD = Wigner + modification on random pure states.

    ``residual`` uses the real modification terms; ``complex_residual`` uses
    the complex decomposition with the rotated-projector trace as imaginary part.
    Trial ``i`` uses seed ``seed + i`` and dimension ``2 + i mod (dim_max - 1)``.
    """
    records = []
    for i in range(trials):
        dim = 2 + i % (dim_max - 1)
        psi_i, enc, ps = random_protocol(dim, seed + i)
        check = kd_identity_check(encode(psi_i, enc), enc.generator, ps)
        records.append({
            "trial": i, "seed": seed + i, "dim": dim, "residual": check.max_residual,
            "complex_residual": check.complex_residual, "imag_flagged": check.imag_flagged,
        })
    max_res = max(r["residual"] for r in records)
    max_complex = max(r["complex_residual"] for r in records)
    summary = {
        "trials": trials,
        "max_residual": max_res,
        "real_identity_holds": max_res < tol,
        "max_complex_residual": max_complex,
        "complex_identity_holds": max_complex < tol,
    }
    params = {"trials": trials, "dim_max": dim_max, "seed": seed, "tol": tol}
    _emit("identity-check", params, records, summary, fmt, out, IDENTITY_COLUMNS)


if __name__ == "__main__":
    main()
