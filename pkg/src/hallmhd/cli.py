"""Command-line entry point.

Commands: verify-spectrum, simulate, sweep, bands.  Experiments are
defined entirely by a TOML config (flags cover only paths/verbosity);
every output file name embeds the config hash.

Exit codes: 0 ok, 1 verification failure, 2 config error, 3 runtime
failure.
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import harness, symbol
from .config import ConfigError, RunConfig, load_config, serialize_config
from .fields import Grid, SpectralField, curl, load_snapshot, save_snapshot, \
    random_div_free, trig_preset
from .hall import HallState, max_stable_dt as hall_dt_bound, run_hall
from .ledger import write_ledger_csv
from .nsm import (NsmState, StepConfig, StepError,
                  max_stable_dt as nsm_dt_bound, run_nsm, stiffness_dt_bound)
from .ohm import OhmConvergenceError, electric_field_closure
from .params import PhysParams

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

OUTPUT_DIR_ENV = "HALLMHD_OUTPUT_DIR"


def _load(config_path) -> RunConfig:
    if config_path is None:
        return RunConfig()
    return load_config(config_path)


def _resolve_output_dir(flag_value, cfg: RunConfig) -> Path:
    import os
    if flag_value:
        return Path(flag_value)
    if cfg.output["directory"]:
        return Path(cfg.output["directory"])
    env = os.environ.get(OUTPUT_DIR_ENV)
    return Path(env) if env else Path("hallmhd_out")


def _initial_fields(cfg: RunConfig, grid: Grid):
    ini = cfg.initial
    if ini["preset"] == "trig":
        return trig_preset(grid, ini["amplitude"])
    rng = np.random.default_rng(ini["seed"])
    return (random_div_free(grid, rng, ini["amplitude"]),
            random_div_free(grid, rng, ini["amplitude"]))


def _auto_dt(bound: float, probe_interval: float) -> float:
    steps = max(1, math.ceil(probe_interval / bound - 1e-12))
    return probe_interval / steps


@click.group()
@click.option("--output-dir", "output_dir", default=None,
              help=f"Output directory (overrides config and "
                   f"${OUTPUT_DIR_ENV}).")
@click.option("-v", "--verbose", count=True)
@click.pass_context
def main(ctx, output_dir, verbose):
    """Spectral lab for the damped-Maxwell / Hall-MHD limit experiments."""
    ctx.ensure_object(dict)
    ctx.obj["output_dir"] = output_dir
    ctx.obj["verbose"] = verbose


@main.command("verify-spectrum")
@click.option("--config", "config_path", type=click.Path(exists=True),
              default=None, help="TOML config (defaults apply if omitted).")
@click.option("--samples", default=2000, show_default=True,
              help="Random wavevectors for the eigen-oracle comparison.")
@click.pass_context
def verify_spectrum(ctx, config_path, samples):
    """Eigen-oracle scan plus the full closed-form inequality suite."""
    try:
        cfg = _load(config_path)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    p = cfg.params()
    out_dir = _resolve_output_dir(ctx.obj.get("output_dir"), cfg)
    out_dir.mkdir(parents=True, exist_ok=True)

    rng = np.random.default_rng(cfg.initial["seed"])
    worst_rel = 0.0
    oracle_failures = 0
    for _ in range(samples):
        xi = rng.uniform(-8, 8, size=3)
        kabs = float(np.linalg.norm(xi))
        if kabs == 0 or symbol.classify_regime(kabs, p) is \
                symbol.Regime.RESONANT_SHELL:
            continue
        lam_p, lam_m = symbol.eigenvalues(kabs, p)
        predicted = [0.0, -p.damping_rate, lam_p, lam_p, lam_m, lam_m]
        numeric = list(np.linalg.eigvals(symbol.maxwell_symbol(xi, p)))
        scale = max(abs(v) for v in predicted) or 1.0
        # nearest-neighbor matching: lexicographic complex sorting is
        # unstable for conjugate pairs whose real parts agree to rounding
        rel = 0.0
        for val in predicted:
            dists = np.abs(np.asarray(numeric) - val)
            i = int(np.argmin(dists))
            rel = max(rel, float(dists[i]) / scale)
            numeric.pop(i)
        worst_rel = max(worst_rel, rel)
        if rel > 1e-10:
            oracle_failures += 1

    shell = p.shell_radius
    kabs_scan = np.concatenate([
        np.geomspace(shell * 1e-3, shell * 0.999, 2000),
        np.geomspace(shell * 1.001, shell * 1e3, 2000),
    ])
    margins = symbol.scan_gap_bound_margins(
        kabs_scan, p.beta, p.eta, p.gamma, p.band_K)
    violations = 0
    histogram = {}
    for name, m in margins.items():
        valid = m[np.isfinite(m)]
        violations += int(np.sum(valid < 0))
        if valid.size:
            counts, edges = np.histogram(valid, bins=10)
            histogram[name] = {
                "min_margin": float(valid.min()),
                "bin_edges": [float(e) for e in edges],
                "counts": [int(c) for c in counts],
            }
    report = {
        "config_hash": cfg.config_hash(),
        "eigen_oracle": {"samples": samples, "worst_rel_error": worst_rel,
                         "failures": oracle_failures},
        "inequality_violations": violations,
        "margin_histograms": histogram,
    }
    report_path = out_dir / f"verify_spectrum_{cfg.config_hash()}.json"
    report_path.write_text(json.dumps(report, indent=2, sort_keys=True))
    click.echo(f"eigen oracle: worst relative error {worst_rel:.3e} "
               f"({oracle_failures} failures)")
    click.echo(f"inequality suite: {violations} violations over "
               f"{kabs_scan.size} wavenumbers")
    click.echo(f"report: {report_path}")
    if oracle_failures or violations:
        sys.exit(EXIT_VERIFICATION)


@main.command("simulate")
@click.argument("system", type=click.Choice(["nsm", "hall"]))
@click.option("--config", "config_path", type=click.Path(exists=True),
              required=True)
@click.pass_context
def simulate(ctx, system, config_path):
    """Run one solver to time T; write the ledger CSV (plus snapshots)."""
    try:
        cfg = _load(config_path)
        p = cfg.params()
        p.validate_for_bands()
        grid = Grid(cfg.grid["n"], cfg.grid["dealias_fraction"])
    except (ConfigError, ValueError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    out_dir = _resolve_output_dir(ctx.obj.get("output_dir"), cfg)
    out_dir.mkdir(parents=True, exist_ok=True)
    t_cfg = cfg.time
    u0, B0 = _initial_fields(cfg, grid)

    try:
        if system == "nsm":
            if cfg.initial["e0_policy"] == "well_prepared":
                E0 = electric_field_closure(u0, B0, curl(B0), p)
            else:
                E0 = SpectralField.zeros(grid)
            state = NsmState(0.0, u0, E0, B0, p)
            bound = nsm_dt_bound(state, t_cfg["cfl_safety"])
            dt = t_cfg["dt"] or _auto_dt(bound, t_cfg["probe_interval"])
            if dt > bound * (1 + 1e-12):
                click.echo(
                    f"config error: dt={dt:g} exceeds the stability bound "
                    f"cfl_safety*min(advective, beta*eta^2*gamma^2/"
                    f"(1+|B|_inf)) = {bound:g} (stiffness part "
                    f"{stiffness_dt_bound(state):g})", err=True)
                sys.exit(EXIT_CONFIG)
            step_cfg = StepConfig(dt=dt, cfl_safety=t_cfg["cfl_safety"])
            runner, state0 = run_nsm, state
        else:
            state = HallState(0.0, u0, B0, p)
            bound = hall_dt_bound(state, t_cfg["cfl_safety"])
            dt = t_cfg["dt"] or _auto_dt(bound, t_cfg["probe_interval"])
            if dt > bound * (1 + 1e-12):
                click.echo(f"config error: dt={dt:g} exceeds the Hall "
                           f"stability bound {bound:g}", err=True)
                sys.exit(EXIT_CONFIG)
            step_cfg = StepConfig(dt=dt, cfl_safety=t_cfg["cfl_safety"])
            runner, state0 = run_hall, state

        snapshots = []
        snap_dt = cfg.output["snapshot_interval"]
        if snap_dt > 0:
            every = round(snap_dt / t_cfg["probe_interval"])
            if abs(every * t_cfg["probe_interval"] - snap_dt) > 1e-9 * snap_dt:
                click.echo("config error: snapshot_interval must be a "
                           "multiple of probe_interval", err=True)
                sys.exit(EXIT_CONFIG)
            counter = {"i": 0}

            def snap_probe(st):
                if counter["i"] % every == 0:
                    fields = ({"u": st.u, "B": st.B, "E": st.E}
                              if system == "nsm" else
                              {"u": st.u, "B": st.B})
                    path = out_dir / (f"{system}_{cfg.config_hash()}_"
                                      f"t{st.time:.6f}.snap")
                    save_snapshot(path, fields, st.time, p)
                    snapshots.append(path)
                counter["i"] += 1

            probes = [snap_probe]
        else:
            probes = None

        final, rows = runner(state0, t_cfg["T"], step_cfg,
                             probe_interval=t_cfg["probe_interval"],
                             probes=probes)
    except ValueError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except (StepError, OhmConvergenceError) as exc:
        click.echo(f"runtime failure: {exc}", err=True)
        sys.exit(EXIT_RUNTIME)

    ledger_path = out_dir / f"{system}_{cfg.config_hash()}.csv"
    write_ledger_csv(ledger_path, rows)
    (out_dir / f"{system}_{cfg.config_hash()}.toml").write_text(
        serialize_config(cfg))
    click.echo(f"final energy at t={final.time:g}: {rows[-1].energy:.12e}")
    click.echo(f"ledger: {ledger_path} ({len(rows)} rows)")
    for s in snapshots:
        click.echo(f"snapshot: {s}")


@main.command("sweep")
@click.option("--config", "config_path", type=click.Path(exists=True),
              required=True)
@click.pass_context
def sweep(ctx, config_path):
    """Hall reference + one NSM run per gamma; write the sweep report."""
    try:
        cfg = _load(config_path)
        if not cfg.sweep["gamma_list"]:
            raise ConfigError("[sweep] gamma_list is required and must be "
                              "nonempty for the sweep command")
        p = cfg.params()
        sweep_cfg = harness.SweepConfig(
            gamma_list=tuple(cfg.sweep["gamma_list"]),
            n=cfg.grid["n"],
            T=cfg.time["T"],
            probe_interval=cfg.time["probe_interval"],
            amplitude=cfg.initial["amplitude"],
            preset=cfg.initial["preset"],
            seed=cfg.initial["seed"],
            e0_policy=cfg.initial["e0_policy"],
            cfl_safety=cfg.time["cfl_safety"],
            params=p,
        )
        p.validate_for_bands()
    except (ConfigError, ValueError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    out_dir = _resolve_output_dir(ctx.obj.get("output_dir"), cfg)

    report = harness.gamma_sweep(sweep_cfg, config_hash=cfg.config_hash())
    json_path, csv_path = harness.write_report(report, out_dir)
    for r in report.results:
        status = "ok" if r.ok else f"FAILED ({r.reason})"
        click.echo(f"gamma={r.gamma:g}: {status}"
                   + (f"  sup_err_u={r.sup_err_u:.6e} "
                      f"sup_err_B={r.sup_err_B:.6e}" if r.ok else ""))
    click.echo(f"slope_u = {report.slope_u:.9f}")
    click.echo(f"slope_B = {report.slope_B:.9f}")
    click.echo(f"report: {json_path}")
    click.echo(f"report: {csv_path}")
    if not any(r.ok for r in report.results):
        sys.exit(EXIT_RUNTIME)


@main.command("bands")
@click.argument("snapshot", type=click.Path(exists=True))
@click.option("--field", "field_name", default="B", show_default=True)
@click.pass_context
def bands(ctx, snapshot, field_name):
    """Offline five-band analysis of a saved field snapshot."""
    try:
        fields, time, p, _ = load_snapshot(snapshot)
    except (ValueError, OSError) as exc:
        click.echo(f"config error: cannot read snapshot: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    if field_name not in fields:
        click.echo(f"config error: snapshot has no field {field_name!r} "
                   f"(available: {sorted(fields)})", err=True)
        sys.exit(EXIT_CONFIG)
    try:
        diag = harness.band_diagnostics(fields[field_name], p)
    except ValueError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    click.echo(f"t = {time:g}, field = {field_name}")
    th = diag["thresholds"]
    click.echo(f"thresholds: R={th['R']:g}  shell/K={th['shell_low']:g}  "
               f"shell*K={th['shell_high']:g}  phi={th['phi']:g}")
    for bid in ("ll", "lt", "mid", "gt", "gg"):
        mark = " (degenerate)" if bid in diag["degenerate"] else ""
        click.echo(f"  {bid:>3}: {diag[bid]:.12e}{mark}")
    click.echo(f"partition residual: {diag['partition_residual']:.3e}")


if __name__ == "__main__":
    main()
