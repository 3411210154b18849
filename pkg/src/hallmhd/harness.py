"""The gamma -> 0 convergence experiment and its frequency diagnostics.

One Hall-MHD reference trajectory is computed once; the full
Navier-Stokes-Maxwell system is then run for each gamma in a decreasing
list with identical (u0, B0) and synchronized probe times, and the
sup-in-time L2 differences, five-band norms of B, and high-frequency
current bookkeeping are collected into a SweepReport.

The asymptotic convergence statement is weak-*; the strong-norm decrease measured
here is the desk-scale surrogate and is labeled as such in reports.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict

import numpy as np

from .fields import (BandSpec, Grid, SpectralField, band_filter, curl,
                     dealiased_cross, dealiased_outer, norm_l2,
                     norm_lp_physical, trig_preset, random_div_free)
from .hall import HallState, max_stable_dt as hall_dt_bound, run_hall
from .nsm import (NsmState, StepConfig, max_stable_dt as nsm_dt_bound,
                  run_nsm)
from .ohm import electric_field_closure
from .params import PhysParams


# ---------------------------------------------------------------------------
# Pointwise diagnostics
# ---------------------------------------------------------------------------

def band_diagnostics(B: SpectralField, p: PhysParams) -> dict:
    """L2 norm of each of the five bands plus the thresholds used."""
    spec = BandSpec.from_params(p)
    out = {"thresholds": {"R": spec.R, "shell_low": spec.t_shell_low,
                          "shell_high": spec.t_shell_high, "phi": spec.phi},
           "degenerate": list(spec.degenerate)}
    total_sq = 0.0
    for bid in ("ll", "lt", "mid", "gt", "gg"):
        v = norm_l2(band_filter(B, spec, bid))
        out[bid] = v
        total_sq += v * v
    out["partition_residual"] = abs(total_sq - norm_l2(B) ** 2)
    return out


def phi_exceeds_grid(p: PhysParams, grid: Grid) -> bool:
    """True when the cutoff phi(gamma/delta) clears every retained mode."""
    return p.phi_cutoff > grid.kmax_dealiased


def high_freq_current(j: SpectralField, p: PhysParams) -> float:
    """L2 norm of the (phi, infinity) frequency band of the current."""
    mask = j.grid.kabs > p.phi_cutoff
    return float(np.sqrt(
        (2 * np.pi) ** 3 / j.grid.n**6
        * np.sum(np.abs(j.coeffs * mask) ** 2)))


def source_norms(u: SpectralField, B: SpectralField, s: float) -> dict:
    """Uniform-bound diagnostics for G3 = u x B and G4 = u (x) u."""
    grid = u.grid
    g3 = dealiased_cross(u, B)
    g4 = dealiased_outer(u, u)  # (3, 3, n, n, n) coefficients
    fac = (2 * np.pi) ** 3 / grid.n**6
    g4_l2 = float(np.sqrt(fac * np.sum(np.abs(g4) ** 2)))
    grad_g4 = 1j * grid.kvec[:, None, None] * g4[None]  # (3, 3, 3, n, n, n)
    grad_g4_l2 = float(np.sqrt(fac * np.sum(np.abs(grad_g4) ** 2)))
    # L^{3/(3-s)} of |grad G4| by physical-space quadrature
    grad_phys = np.fft.ifftn(grad_g4, axes=(3, 4, 5)).real
    mag = np.sqrt(np.sum(grad_phys**2, axis=(0, 1)))
    grad_g4_lp = norm_lp_physical(mag, 3.0 / (3.0 - s))
    return {
        "G3_L2": norm_l2(g3),
        "G4_L2": g4_l2,
        "gradG4_L2": grad_g4_l2,
        "gradG4_L3s": grad_g4_lp,
    }


# ---------------------------------------------------------------------------
# Sweep configuration and report
# ---------------------------------------------------------------------------

@dataclass
class SweepConfig:
    gamma_list: tuple
    n: int = 32
    T: float = 0.25
    probe_interval: float = 0.025
    amplitude: float = 0.2
    preset: str = "trig"
    seed: int = 0
    e0_policy: str = "well_prepared"  # or "zero"
    cfl_safety: float = 0.25
    params: PhysParams = field(default_factory=PhysParams)

    def __post_init__(self):
        gl = tuple(float(g) for g in self.gamma_list)
        if not gl:
            raise ValueError("gamma_list must be nonempty")
        if any(b >= a for a, b in zip(gl, gl[1:])):
            raise ValueError("gamma_list must be strictly decreasing")
        self.gamma_list = gl
        if self.e0_policy not in ("zero", "well_prepared"):
            raise ValueError(f"unknown E0 policy {self.e0_policy!r}")
        if self.preset not in ("trig", "random"):
            raise ValueError(f"unknown preset {self.preset!r}")


@dataclass
class GammaRunResult:
    gamma: float
    ok: bool
    reason: str = ""
    dt: float = 0.0
    sup_err_u: float = math.nan
    sup_err_B: float = math.nan
    l2t_err_u: float = math.nan
    l2t_err_B: float = math.nan
    mid_band_l2t: float = math.nan
    jgg_l2t: float = math.nan
    phi: float = math.nan
    phi_above_grid: bool = False
    degenerate_bands: list = field(default_factory=list)
    energy_residual_max: float = math.nan
    source_norm_max: dict = field(default_factory=dict)
    probe_rows: list = field(default_factory=list)   # per-probe dicts


@dataclass
class SweepReport:
    config: dict
    config_hash: str
    hall_dt: float
    results: list              # GammaRunResult, in gamma_list order
    slope_u: float = math.nan
    slope_B: float = math.nan
    error_norm_note: str = (
        "strong-norm (sup-in-time L2) surrogate for the weak-* convergence")

    def to_json(self) -> str:
        payload = {
            "config": self.config,
            "config_hash": self.config_hash,
            "hall_dt": self.hall_dt,
            "slope_u": self.slope_u,
            "slope_B": self.slope_B,
            "error_norm_note": self.error_norm_note,
            "results": [asdict(r) for r in self.results],
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    def to_csv_rows(self):
        """Long format: (gamma, t, metric, value)."""
        rows = []
        for r in self.results:
            for name in ("sup_err_u", "sup_err_B", "l2t_err_u", "l2t_err_B",
                         "mid_band_l2t", "jgg_l2t", "phi",
                         "energy_residual_max", "dt"):
                rows.append((r.gamma, 0.0, name, getattr(r, name)))
            rows.append((r.gamma, 0.0, "phi_above_grid",
                         float(r.phi_above_grid)))
            for pr in r.probe_rows:
                t = pr["t"]
                for k, v in pr.items():
                    if k != "t":
                        rows.append((r.gamma, t, k, v))
        rows.append((0.0, 0.0, "slope_u", self.slope_u))
        rows.append((0.0, 0.0, "slope_B", self.slope_B))
        return rows


def _fit_loglog_slope(x, y):
    x = np.log(np.asarray(x, dtype=float))
    y = np.log(np.asarray(y, dtype=float))
    xm = x - x.mean()
    return float(np.sum(xm * (y - y.mean())) / np.sum(xm * xm))


def fit_loglog_slope(gammas, errors) -> float:
    """Least-squares slope of log(error) against log(gamma)."""
    pairs = [(g, e) for g, e in zip(gammas, errors)
             if np.isfinite(e) and e > 0]
    if len(pairs) < 2:
        return math.nan
    return _fit_loglog_slope([p[0] for p in pairs], [p[1] for p in pairs])


def _initial_fields(cfg: SweepConfig, grid: Grid):
    if cfg.preset == "trig":
        return trig_preset(grid, cfg.amplitude)
    rng = np.random.default_rng(cfg.seed)
    return (random_div_free(grid, rng, cfg.amplitude),
            random_div_free(grid, rng, cfg.amplitude))


def _probe_synced_dt(bound: float, probe_interval: float) -> float:
    steps = max(1, math.ceil(probe_interval / bound - 1e-12))
    return probe_interval / steps


def energy_residual_rows(rows, probe_interval: float):
    """Discrete residual of the energy law between consecutive probes,
    trapezoidal dissipation: (E_{k+1}-E_k)/dt + (D_k + D_{k+1})/2."""
    out = []
    for a, b in zip(rows, rows[1:]):
        diss_a = a.grad_u_sq + a.joule
        diss_b = b.grad_u_sq + b.joule
        out.append((b.energy - a.energy) / probe_interval
                   + 0.5 * (diss_a + diss_b))
    return out


def _run_one_gamma(cfg: SweepConfig, gamma: float, u0, B0,
                   hall_traj) -> GammaRunResult:
    grid = u0.grid
    p = cfg.params.with_gamma(gamma)
    res = GammaRunResult(gamma=gamma, ok=False)
    res.phi = p.phi_cutoff
    res.phi_above_grid = phi_exceeds_grid(p, grid)
    try:
        if cfg.e0_policy == "well_prepared":
            E0 = electric_field_closure(u0, B0, curl(B0), p)
        else:
            E0 = SpectralField.zeros(grid)
        state = NsmState(0.0, u0.copy(), E0, B0.copy(), p)
        dt = _probe_synced_dt(
            nsm_dt_bound(state, cfg.cfl_safety), cfg.probe_interval)
        res.dt = dt
        step_cfg = StepConfig(dt=dt, cfl_safety=cfg.cfl_safety)

        probe_data = []

        def probe(st: NsmState):
            idx = len(probe_data)
            u_ref, B_ref = hall_traj[idx]
            entry = {
                "t": st.time,
                "err_u": norm_l2(st.u - u_ref),
                "err_B": norm_l2(st.B - B_ref),
                "jgg": (high_freq_current(st.j_cache, p)
                        if st.j_cache is not None else 0.0),
            }
            entry.update(source_norms(st.u, st.B, p.sobolev_s))
            probe_data.append(entry)

        _, rows = run_nsm(state, cfg.T, step_cfg,
                          probe_interval=cfg.probe_interval, probes=[probe])
        bands = BandSpec.from_params(p)
        res.degenerate_bands = list(bands.degenerate)
        for entry, row in zip(probe_data, rows):
            entry["energy"] = row.energy
            for bid in ("ll", "lt", "mid", "gt", "gg"):
                entry[f"band_{bid}"] = getattr(row, f"band_{bid}")
        res.probe_rows = probe_data
        times = [e["t"] for e in probe_data]
        res.sup_err_u = max(e["err_u"] for e in probe_data)
        res.sup_err_B = max(e["err_B"] for e in probe_data)
        res.l2t_err_u = float(np.sqrt(np.trapezoid(
            [e["err_u"] ** 2 for e in probe_data], times)))
        res.l2t_err_B = float(np.sqrt(np.trapezoid(
            [e["err_B"] ** 2 for e in probe_data], times)))
        res.mid_band_l2t = float(np.sqrt(np.trapezoid(
            [e["band_mid"] ** 2 for e in probe_data], times)))
        res.jgg_l2t = float(np.sqrt(np.trapezoid(
            [e["jgg"] ** 2 for e in probe_data], times)))
        residuals = energy_residual_rows(rows, cfg.probe_interval)
        res.energy_residual_max = max(abs(r) for r in residuals) \
            if residuals else 0.0
        res.source_norm_max = {
            k: max(e[k] for e in probe_data)
            for k in ("G3_L2", "G4_L2", "gradG4_L2", "gradG4_L3s")}
        res.ok = True
    except Exception as exc:  # record and continue the sweep
        res.reason = f"{type(exc).__name__}: {exc}"
    return res


def gamma_sweep(cfg: SweepConfig, config_hash: str = "") -> SweepReport:
    """Run the Hall reference once, then the NSM system per gamma."""
    grid = Grid(cfg.n)
    cfg.params.validate_for_bands()
    u0, B0 = _initial_fields(cfg, grid)

    hall_state = HallState(0.0, u0.copy(), B0.copy(), cfg.params)
    hall_dt = _probe_synced_dt(
        hall_dt_bound(hall_state, cfg.cfl_safety), cfg.probe_interval)
    hall_traj = []

    def hall_probe(st: HallState):
        hall_traj.append((st.u.copy(), st.B.copy()))

    run_hall(hall_state, cfg.T, StepConfig(dt=hall_dt,
                                           cfl_safety=cfg.cfl_safety),
             probe_interval=cfg.probe_interval, probes=[hall_probe])

    results = [_run_one_gamma(cfg, g, u0, B0, hall_traj)
               for g in cfg.gamma_list]

    ok = [r for r in results if r.ok]
    report = SweepReport(
        config=_config_dict(cfg), config_hash=config_hash, hall_dt=hall_dt,
        results=results,
        slope_u=fit_loglog_slope([r.gamma for r in ok],
                                 [r.sup_err_u for r in ok]),
        slope_B=fit_loglog_slope([r.gamma for r in ok],
                                 [r.sup_err_B for r in ok]),
    )
    return report


def _config_dict(cfg: SweepConfig) -> dict:
    d = asdict(cfg)
    d["params"] = asdict(cfg.params)
    return d


def write_report(report: SweepReport, directory, stem: str = "sweep"):
    """Persist JSON (machine) + CSV (long format) report files."""
    import csv
    from pathlib import Path

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    suffix = f"_{report.config_hash}" if report.config_hash else ""
    json_path = directory / f"{stem}{suffix}.json"
    csv_path = directory / f"{stem}{suffix}.csv"
    json_path.write_text(report.to_json())
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("gamma", "t", "metric", "value"))
        for gamma, t, metric, value in report.to_csv_rows():
            w.writerow((format(gamma, ".17g"), format(t, ".17g"),
                        metric, format(float(value), ".17g")))
    return json_path, csv_path
