"""Convergence sweep harness, diagnostics, and report persistence."""

import csv
import json
import math

import numpy as np
import pytest

from hallmhd.fields import (Grid, SpectralField, curl, norm_l2,
                            random_div_free, trig_preset)
from hallmhd.harness import (SweepConfig, SweepReport, band_diagnostics,
                             energy_residual_rows, fit_loglog_slope,
                             gamma_sweep, high_freq_current, phi_exceeds_grid,
                             source_norms, write_report)
from hallmhd.ledger import LedgerRow, read_ledger_csv, write_ledger_csv
from hallmhd.params import PhysParams


# ---------------------------------------------------------------------------
# Band diagnostics
# ---------------------------------------------------------------------------

def test_band_diagnostics_single_mode_lands_in_one_band():
    p = PhysParams(gamma=0.1, band_K=1.1)  # shell = 5, edges 4 < 4.54 < 5.5
    g = Grid(16)
    B = SpectralField.zeros(g)
    B.coeffs[1, 5, 0, 0] = 1.0  # |k| = 5: inside (shell/K, shell K]
    d = band_diagnostics(B, p)
    assert d["mid"] > 0
    for bid in ("ll", "lt", "gt", "gg"):
        assert d[bid] == 0.0
    assert d["degenerate"] == []
    assert d["thresholds"]["R"] == 4.0
    assert d["partition_residual"] < 1e-15


def test_band_diagnostics_partition():
    p = PhysParams(gamma=0.1, band_K=1.1)
    g = Grid(16)
    B = random_div_free(g, np.random.default_rng(0), amplitude=0.5)
    d = band_diagnostics(B, p)
    total = sum(d[bid] ** 2 for bid in ("ll", "lt", "mid", "gt", "gg"))
    assert abs(total - norm_l2(B) ** 2) < 1e-10 * norm_l2(B) ** 2
    assert d["partition_residual"] < 1e-10 * norm_l2(B) ** 2


def test_phi_exceeds_grid_flips_between_sweep_gammas():
    g = Grid(32)
    assert not phi_exceeds_grid(PhysParams(gamma=0.2, band_K=1.1), g)
    assert phi_exceeds_grid(PhysParams(gamma=0.1, band_K=1.1), g)


def test_high_freq_current_full_and_empty():
    g = Grid(16)
    j = random_div_free(g, np.random.default_rng(1), amplitude=0.3)
    # phi far above the grid: nothing retained
    p_hi = PhysParams(gamma=0.01, band_K=1.1)
    assert p_hi.phi_cutoff > g.kmax_dealiased
    assert high_freq_current(j, p_hi) == 0.0
    # phi below every nonzero mode: everything except the mean retained
    p_lo = PhysParams(gamma=0.9, band_K=1.1, band_delta=0.4)
    assert p_lo.phi_cutoff < 1.0
    assert high_freq_current(j, p_lo) == pytest.approx(norm_l2(j), rel=1e-12)


def test_source_norms_zero_and_single_mode():
    g = Grid(16)
    z = SpectralField.zeros(g)
    out = source_norms(z, z, 0.75)
    assert all(v == 0.0 for v in out.values())

    # u = a sin(x) e_y: G4 = u (x) u has one nonzero entry a^2 sin^2 x;
    # ||G4||_L2^2 = a^4 * (2pi)^3 * 3/8, |grad G4| = a^2 |sin 2x|
    a = 0.5
    X, _, _ = g.coordinates()
    zero = np.zeros_like(X)
    u = SpectralField.from_physical(g, np.stack([zero, a * np.sin(X), zero]))
    out = source_norms(u, z, 0.75)
    assert out["G3_L2"] == 0.0
    assert out["G4_L2"] == pytest.approx(
        np.sqrt(a**4 * (2 * np.pi) ** 3 * 3 / 8), rel=1e-12)
    assert out["gradG4_L2"] == pytest.approx(
        np.sqrt(a**4 * (2 * np.pi) ** 3 / 2), rel=1e-12)
    p_exp = 3.0 / (3.0 - 0.75)
    lp = (np.mean(np.abs(np.sin(2 * X)) ** p_exp)
          * (2 * np.pi) ** 3) ** (1 / p_exp) * a**2
    assert out["gradG4_L3s"] == pytest.approx(lp, rel=1e-12)


# ---------------------------------------------------------------------------
# Slope fit and energy residuals
# ---------------------------------------------------------------------------

def test_fit_loglog_slope_exact_power_law():
    gammas = [0.4, 0.2, 0.1, 0.05]
    errors = [3.0 * g**1.7 for g in gammas]
    assert fit_loglog_slope(gammas, errors) == pytest.approx(1.7, abs=1e-12)


def test_fit_loglog_slope_skips_nonpositive_entries():
    assert math.isnan(fit_loglog_slope([0.4, 0.2], [0.0, -1.0]))
    assert fit_loglog_slope([0.4, 0.2, 0.1],
                            [0.4, float("nan"), 0.1]) == pytest.approx(1.0)


def test_energy_residual_rows_trapezoid():
    rows = [
        LedgerRow(t=0.0, energy=1.0, grad_u_sq=0.5, joule=0.5,
                  divu_max=0, divB_max=0, band_ll=0, band_lt=0,
                  band_mid=0, band_gt=0, band_gg=0),
        LedgerRow(t=0.1, energy=0.9, grad_u_sq=0.3, joule=0.3,
                  divu_max=0, divB_max=0, band_ll=0, band_lt=0,
                  band_mid=0, band_gt=0, band_gg=0),
    ]
    (res,) = energy_residual_rows(rows, 0.1)
    assert res == pytest.approx((0.9 - 1.0) / 0.1 + 0.5 * (1.0 + 0.6))


# ---------------------------------------------------------------------------
# Sweep configuration
# ---------------------------------------------------------------------------

def test_sweep_config_validation():
    with pytest.raises(ValueError, match="nonempty"):
        SweepConfig(gamma_list=())
    with pytest.raises(ValueError, match="decreasing"):
        SweepConfig(gamma_list=(0.2, 0.4))
    with pytest.raises(ValueError, match="decreasing"):
        SweepConfig(gamma_list=(0.2, 0.2))
    with pytest.raises(ValueError, match="policy"):
        SweepConfig(gamma_list=(0.2,), e0_policy="warm")
    with pytest.raises(ValueError, match="preset"):
        SweepConfig(gamma_list=(0.2,), preset="vortex")


# ---------------------------------------------------------------------------
# Mini sweeps (desk scale)
# ---------------------------------------------------------------------------

def mini_config(**kw):
    defaults = dict(gamma_list=(0.5, 0.25), n=8, T=0.05,
                    probe_interval=0.025, amplitude=0.1,
                    params=PhysParams(band_K=1.1))
    defaults.update(kw)
    return SweepConfig(**defaults)


def test_mini_sweep_runs_and_is_deterministic():
    # gamma = 0.25 places lattice modes |k| = 2 exactly on the resonant
    # shell, exercising the Jordan branch inside a full sweep
    rep1 = gamma_sweep(mini_config())
    rep2 = gamma_sweep(mini_config())
    assert [r.ok for r in rep1.results] == [True, True]
    for r1, r2 in zip(rep1.results, rep2.results):
        assert r1.sup_err_u == r2.sup_err_u  # bitwise determinism
        assert r1.sup_err_B == r2.sup_err_B
        assert r1.probe_rows == r2.probe_rows
    assert rep1.to_json() == rep2.to_json()


def test_mini_sweep_contents():
    rep = gamma_sweep(mini_config(), config_hash="abc123")
    assert rep.config_hash == "abc123"
    assert rep.hall_dt > 0
    for r, gamma in zip(rep.results, (0.5, 0.25)):
        assert r.gamma == gamma
        assert r.ok
        assert len(r.probe_rows) == 3  # t = 0, 0.025, 0.05
        assert r.probe_rows[0]["err_u"] < 1e-12  # identical u0
        assert r.sup_err_u >= r.probe_rows[1]["err_u"] * 0  # finite
        assert math.isfinite(r.sup_err_B)
        assert math.isfinite(r.energy_residual_max)
        assert set(r.source_norm_max) == {"G3_L2", "G4_L2", "gradG4_L2",
                                          "gradG4_L3s"}
    assert math.isfinite(rep.slope_u)
    assert math.isfinite(rep.slope_B)


def test_sweep_with_zero_horizon_single_probe():
    rep = gamma_sweep(mini_config(gamma_list=(0.5,), T=0.0))
    (r,) = rep.results
    assert r.ok
    assert len(r.probe_rows) == 1
    assert r.sup_err_u < 1e-12
    assert math.isnan(rep.slope_u)  # one point cannot fix a slope


def test_sweep_records_failure_and_continues():
    # an unreachable Ohm fixed point (amplitude above beta*eta) must mark
    # that gamma as failed without aborting the others
    cfg = mini_config(amplitude=4.0, preset="random", seed=3,
                      e0_policy="zero")
    rep = gamma_sweep(cfg)
    assert len(rep.results) == len(cfg.gamma_list)  # no abort
    assert any(not r.ok for r in rep.results)
    for r in rep.results:
        if not r.ok:
            assert r.reason != ""


def test_write_report_files(tmp_path):
    rep = gamma_sweep(mini_config(), config_hash="deadbeef0123")
    json_path, csv_path = write_report(rep, tmp_path)
    assert json_path.name == "sweep_deadbeef0123.json"
    payload = json.loads(json_path.read_text())
    assert payload["config_hash"] == "deadbeef0123"
    assert len(payload["results"]) == 2

    with open(csv_path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["gamma", "t", "metric", "value"]
    metrics = {r[2] for r in rows[1:]}
    for needed in ("sup_err_u", "sup_err_B", "slope_u", "slope_B",
                   "err_u", "err_B", "band_mid", "jgg", "energy",
                   "phi_above_grid", "G3_L2"):
        assert needed in metrics
    # every value parses back as a float (.17g round-trip format)
    for r in rows[1:]:
        float(r[0]), float(r[1]), float(r[3])


# ---------------------------------------------------------------------------
# Run-ledger CSV round trip
# ---------------------------------------------------------------------------

def test_ledger_csv_round_trip(tmp_path):
    row = LedgerRow(t=0.1, energy=1.2345678901234567, grad_u_sq=0.1,
                    joule=0.2, divu_max=1e-16, divB_max=2e-16,
                    band_ll=0.5, band_lt=0.0, band_mid=0.1, band_gt=0.0,
                    band_gg=0.0, ohm_iters=7, ohm_residual=3e-13)
    path = tmp_path / "ledger.csv"
    write_ledger_csv(path, [row])
    (back,) = read_ledger_csv(path)
    assert back == row  # .17g preserves float64 exactly


def test_ledger_csv_rejects_wrong_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ValueError, match="header"):
        read_ledger_csv(path)
