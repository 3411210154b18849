"""Acceptance suite: one test (one pass/fail line under pytest -v) per
criterion, at the stated tolerances.

The expensive shared artifacts (the gamma-convergence reference sweep and
the energy-residual Richardson runs) are computed once per module.
"""

import math
import time

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from hallmhd import symbol
from hallmhd.fields import (Grid, SpectralField, curl, norm_l2,
                            random_div_free, trig_preset)
from hallmhd.hall import HallState, hall_term, run_hall, step_hall
from hallmhd.harness import (SweepConfig, energy_residual_rows, gamma_sweep)
from hallmhd.nsm import NsmState, StepConfig, run_nsm
from hallmhd.ohm import solve_ohm, solve_ohm_dense, electric_field_closure
from hallmhd.params import PhysParams

SWEEP_GAMMAS = (0.4, 0.2, 0.1, 0.05)


def random_transverse_mode(rng, xi):
    e = rng.normal(size=3) + 1j * rng.normal(size=3)
    b = rng.normal(size=3) + 1j * rng.normal(size=3)
    b = b - xi * (xi @ b) / (xi @ xi)
    return symbol.ModePair(e, b)


@pytest.fixture(scope="module")
def reference_sweep():
    cfg = SweepConfig(gamma_list=SWEEP_GAMMAS, n=32, T=0.25,
                      probe_interval=0.025, amplitude=0.2, preset="trig",
                      e0_policy="well_prepared",
                      params=PhysParams(band_K=1.1))
    t0 = time.monotonic()
    report = gamma_sweep(cfg)
    report.elapsed = time.monotonic() - t0
    return report


@pytest.fixture(scope="module")
def richardson_runs():
    """Reference-configuration runs at dt = T/80 and T/160 (both systems)."""
    grid = Grid(32)
    p = PhysParams(gamma=0.2, band_K=1.1)
    u0, B0 = trig_preset(grid, 0.2)
    T = 0.25
    out = {}
    for nsteps in (80, 160):
        dt = T / nsteps
        E0 = electric_field_closure(u0, B0, curl(B0), p)
        state = NsmState(0.0, u0.copy(), E0, B0.copy(), p)
        _, rows = run_nsm(state, T, StepConfig(dt=dt), probe_interval=dt)
        out[("nsm", nsteps)] = rows
        hall = HallState(0.0, u0.copy(), B0.copy(), p)
        _, hrows = run_hall(hall, T, StepConfig(dt=dt), probe_interval=dt)
        out[("hall", nsteps)] = hrows
    return out


# ---------------------------------------------------------------------------
# 1. Closed-form eigenvalues vs numeric eigendecomposition
# ---------------------------------------------------------------------------

def test_criterion_1_eigenvalue_closed_forms_match_numeric_oracle():
    rng = np.random.default_rng(2024)
    t0 = time.monotonic()
    checked = 0
    worst = 0.0
    while checked < 10_000:
        p = PhysParams(beta=rng.uniform(0.3, 3.0), eta=rng.uniform(0.3, 3.0),
                       gamma=rng.uniform(0.05, 1.0))
        xi = rng.normal(size=3) * rng.uniform(0.05, 10.0)
        kabs = float(np.linalg.norm(xi))
        if kabs == 0.0 or symbol.classify_regime(kabs, p) is \
                symbol.Regime.RESONANT_SHELL:
            continue
        lp, lm = symbol.eigenvalues(kabs, p)
        predicted = [0.0, -p.damping_rate, lp, lp, lm, lm]
        numeric = list(np.linalg.eigvals(symbol.maxwell_symbol(xi, p)))
        scale = max(abs(v) for v in predicted)
        for val in predicted:
            dists = np.abs(np.asarray(numeric) - val)
            i = int(np.argmin(dists))
            worst = max(worst, float(dists[i]) / scale)
            numeric.pop(i)
        checked += 1
    elapsed = time.monotonic() - t0
    print(f"criterion 1: worst relative eigenvalue error {worst:.3e} "
          f"over {checked} samples in {elapsed:.1f}s")
    assert worst < 1e-10
    assert elapsed < 10.0


# ---------------------------------------------------------------------------
# 2. Closed-form inequality suite over the full regime scan
# ---------------------------------------------------------------------------

def test_criterion_2_inequality_suite_has_zero_violations():
    t0 = time.monotonic()
    violations = 0
    scanned = 0
    for K in (1.05, 1.1, np.sqrt(5) / 2 - 0.01):
        for beta in (0.5, 1.0, 2.0):
            for eta in (0.5, 1.0, 2.0):
                for gamma in (0.05, 0.1, 0.5, 1.0):
                    p = PhysParams(beta=beta, eta=eta, gamma=gamma)
                    shell = p.shell_radius
                    kabs = np.concatenate([
                        np.geomspace(shell * 1e-3, shell * 0.9999, 600),
                        np.geomspace(shell * 1.0001, shell * 1e3, 600)])
                    margins = symbol.scan_gap_bound_margins(
                        kabs, beta, eta, gamma, K)
                    for m in margins.values():
                        valid = m[np.isfinite(m)]
                        violations += int(np.sum(valid < 0))
                        scanned += valid.size
    elapsed = time.monotonic() - t0
    print(f"criterion 2: {violations} violations over {scanned} "
          f"applicable checks in {elapsed:.1f}s")
    assert violations == 0
    assert elapsed < 30.0


# ---------------------------------------------------------------------------
# 3. Semigroup: contraction, composition, RK oracle
# ---------------------------------------------------------------------------

def test_criterion_3_propagator_contraction_composition_rk_oracle():
    rng = np.random.default_rng(7)
    t0 = time.monotonic()
    worst_rk = 0.0
    for _ in range(100):
        p = PhysParams(beta=rng.uniform(0.5, 2.0), eta=rng.uniform(0.5, 2.0),
                       gamma=rng.uniform(0.05, 1.0))
        xi = rng.normal(size=3) * rng.uniform(0.1, 4.0)
        if np.linalg.norm(xi) < 1e-6:
            xi = np.array([1.0, 0.0, 0.0])
        mode = random_transverse_mode(rng, xi)
        t1, t2 = rng.uniform(0.02, 0.4, size=2)

        out = symbol.propagate_mode(t1 + t2, mode, xi, p)
        assert out.norm() <= mode.norm() * (1 + 1e-10)

        composed = symbol.propagate_mode(
            t2, symbol.propagate_mode(t1, mode, xi, p), xi, p)
        err = np.max(np.abs(np.concatenate(
            [out.e - composed.e, out.b - composed.b])))
        assert err < 1e-10 * max(1.0, mode.norm())

        A = symbol.maxwell_symbol(xi, p)
        y0 = np.concatenate([mode.e, mode.b])
        sol = solve_ivp(lambda t, y: A @ y, (0.0, t1), y0,
                        rtol=1e-11, atol=1e-13)
        via_rk = sol.y[:, -1]
        via_cf = symbol.propagate_mode(t1, mode, xi, p)
        rk_err = np.max(np.abs(np.concatenate([via_cf.e, via_cf.b]) - via_rk))
        worst_rk = max(worst_rk, rk_err / max(1.0, mode.norm()))
    elapsed = time.monotonic() - t0
    print(f"criterion 3: worst RK-oracle error {worst_rk:.3e} "
          f"over 100 modes in {elapsed:.1f}s")
    assert worst_rk < 1e-8
    assert elapsed < 30.0


# ---------------------------------------------------------------------------
# 4. Eigen decomposition: recomposition identity and mixing bounds
# ---------------------------------------------------------------------------

def test_criterion_4_decomposition_identity_and_mixing_bounds():
    rng = np.random.default_rng(11)
    checked = 0
    worst_rec = 0.0
    while checked < 10_000:
        p = PhysParams(beta=rng.uniform(0.5, 2.0), eta=rng.uniform(0.5, 2.0),
                       gamma=rng.uniform(0.05, 1.0))
        xi = rng.normal(size=3) * rng.uniform(0.05, 5.0)
        kabs = float(np.linalg.norm(xi))
        if kabs < 1e-6 or symbol.classify_regime(kabs, p) is \
                symbol.Regime.RESONANT_SHELL:
            continue
        mode = random_transverse_mode(rng, xi)
        par, plus, minus = symbol.decompose_initial(mode, xi, p)
        rec = par + plus + minus
        err = np.max(np.abs(np.concatenate(
            [rec.e - mode.e, rec.b - mode.b]))) / max(1.0, mode.norm())
        worst_rec = max(worst_rec, err)

        es = symbol.eigen_structure(xi, p)
        e0, b0 = minus.e, plus.b
        total = (np.linalg.norm(mode.e - par.e) + np.linalg.norm(mode.b))
        s = abs(es.mixing_s)
        assert s * np.linalg.norm(e0) <= total * (1 + 1e-9)
        assert s * np.linalg.norm(b0) <= total * (1 + 1e-9)
        checked += 1
    print(f"criterion 4: worst recomposition error {worst_rec:.3e} "
          f"over {checked} modes")
    assert worst_rec < 1e-12


# ---------------------------------------------------------------------------
# 5. Ohm fixed point vs dense linear oracle
# ---------------------------------------------------------------------------

def test_criterion_5_ohm_fixed_point_matches_dense_oracle():
    g = Grid(8)
    rng = np.random.default_rng(13)
    worst = 0.0
    for i in range(20):
        p = PhysParams(beta=rng.uniform(0.7, 1.5), eta=rng.uniform(0.7, 1.5))
        amp_B = 0.5 * p.beta * p.eta * rng.uniform(0.3, 1.0)
        u = random_div_free(g, rng, amplitude=0.3, kmax=2)
        B = random_div_free(g, rng, amplitude=amp_B, kmax=2)
        E = random_div_free(g, rng, amplitude=0.3, kmax=2)
        rep = solve_ohm(u, B, E, p, tol=1e-14)
        dense = solve_ohm_dense(u, B, E, p)
        scale = max(np.max(np.abs(dense.coeffs)), 1e-300)
        worst = max(worst, float(
            np.max(np.abs(rep.j.coeffs - dense.coeffs))) / scale)
        bound = rep.contraction_estimate + 1e-6
        assert all(r <= bound for r in rep.ratios)
    print(f"criterion 5: worst Picard-vs-dense relative error {worst:.3e} "
          f"over 20 instances")
    assert worst < 1e-9


# ---------------------------------------------------------------------------
# 6. Energy law residual is second order in dt
# ---------------------------------------------------------------------------

def test_criterion_6_energy_residual_is_second_order(richardson_runs):
    T = 0.25
    factors = {}
    for system in ("nsm", "hall"):
        res = {}
        for nsteps in (80, 160):
            rows = richardson_runs[(system, nsteps)]
            residuals = energy_residual_rows(rows, T / nsteps)
            res[nsteps] = max(abs(r) for r in residuals)
        factors[system] = res[80] / res[160]
    print(f"criterion 6: dt-halving residual factors "
          f"nsm={factors['nsm']:.3f}, hall={factors['hall']:.3f} "
          f"(second order = 4)")
    assert 3.4 <= factors["nsm"] <= 4.6
    assert 3.4 <= factors["hall"] <= 4.6


# ---------------------------------------------------------------------------
# 7. Structure preservation
# ---------------------------------------------------------------------------

def test_criterion_7_divergences_energy_neutral_hall_heat_exactness(
        richardson_runs, reference_sweep):
    # divergence cleanliness across the acceptance runs (ledger metric)
    worst_div = 0.0
    for rows in richardson_runs.values():
        for row in rows:
            worst_div = max(worst_div, row.divu_max, row.divB_max)
    for r in reference_sweep.results:
        assert r.ok, r.reason

    # E and j divergence on a dedicated probed run
    grid = Grid(16)
    p = PhysParams(gamma=0.2, band_K=1.1)
    u0, B0 = trig_preset(grid, 0.2)
    E0 = electric_field_closure(u0, B0, curl(B0), p)
    state = NsmState(0.0, u0, E0, B0, p)

    divs = []

    def probe(st):
        rep = solve_ohm(st.u, st.B, st.E, p, tol=1e-12)
        divs.extend([st.u.max_divergence(), st.B.max_divergence(),
                     st.E.max_divergence(), rep.j.max_divergence()])

    run_nsm(state, 0.1, StepConfig(dt=0.005), probe_interval=0.025,
            probes=[probe])
    worst_div = max(worst_div, max(divs))

    # Hall term energy neutrality
    rng = np.random.default_rng(17)
    worst_neutral = 0.0
    for _ in range(10):
        B = random_div_free(Grid(16), rng, amplitude=0.5, kmax=3)
        ht = hall_term(B, 1.0)
        ip = abs(np.sum(np.conj(B.coeffs) * ht.coeffs).real)
        worst_neutral = max(
            worst_neutral, ip / np.sum(np.abs(B.coeffs) ** 2))

    # heat-semigroup exactness for a magnetic-only one-dimensional run
    g = Grid(16)
    X, _, _ = g.coordinates()
    B0 = SpectralField.from_physical(g, 0.3 * np.stack(
        [np.zeros_like(X), np.sin(X), np.cos(X)]))
    st = HallState(0.0, SpectralField.zeros(g), B0.copy(), p)
    for _ in range(40):
        st = step_hall(st, StepConfig(dt=0.005))
    fac = np.exp(-p.beta * p.eta**2 * 0.2)
    heat_err = float(np.max(np.abs(st.B.coeffs - fac * B0.coeffs))
                     / np.max(np.abs(B0.coeffs)))

    print(f"criterion 7: worst divergence {worst_div:.3e}, Hall "
          f"energy-neutrality {worst_neutral:.3e}, heat exactness "
          f"{heat_err:.3e}")
    assert worst_div < 1e-10
    assert worst_neutral < 1e-11
    assert heat_err < 1e-10


# ---------------------------------------------------------------------------
# 8. Desk-scale singular limit: errors decrease with gamma
# ---------------------------------------------------------------------------

def test_criterion_8_sweep_errors_strictly_decrease(reference_sweep):
    rep = reference_sweep
    assert [r.gamma for r in rep.results] == list(SWEEP_GAMMAS)
    assert all(r.ok for r in rep.results), \
        [(r.gamma, r.reason) for r in rep.results]
    err_u = [r.sup_err_u for r in rep.results]
    err_B = [r.sup_err_B for r in rep.results]
    assert all(b < a for a, b in zip(err_u, err_u[1:]))
    assert all(b < a for a, b in zip(err_B, err_B[1:]))
    assert err_u[-1] <= 0.3 * err_u[0]
    assert err_B[-1] <= 0.3 * err_B[0]
    # time-integrated mid-band norm decreases among the entries whose mid
    # band is non-degenerate (clamped-empty bands report 0 by construction
    # and are excluded)
    mids = [(r.gamma, r.mid_band_l2t) for r in rep.results
            if "mid" not in r.degenerate_bands]
    assert len(mids) >= 2
    assert all(b[1] < a[1] for a, b in zip(mids, mids[1:]))
    print(f"criterion 8: sup_err_u {err_u}, sup_err_B {err_B}, "
          f"mid-band {mids}, slopes u={rep.slope_u:.3f} "
          f"B={rep.slope_B:.3f}, elapsed {rep.elapsed:.0f}s")
    assert rep.elapsed < 1800.0


# ---------------------------------------------------------------------------
# 9. High-frequency bookkeeping and the cutoff regime change
# ---------------------------------------------------------------------------

def test_criterion_9_high_frequency_current_zero_above_grid(reference_sweep):
    rep = reference_sweep
    by_gamma = {r.gamma: r for r in rep.results}
    assert not by_gamma[0.4].phi_above_grid
    assert not by_gamma[0.2].phi_above_grid
    assert by_gamma[0.1].phi_above_grid   # regime change between 0.2 and 0.1
    assert by_gamma[0.05].phi_above_grid
    for gamma in (0.1, 0.05):
        r = by_gamma[gamma]
        assert r.jgg_l2t == 0.0
        assert all(pr["jgg"] == 0.0 for pr in r.probe_rows)
    for gamma in (0.4, 0.2):
        assert by_gamma[gamma].jgg_l2t > 0.0
    print("criterion 9: phi_above_grid flags "
          f"{[(g, by_gamma[g].phi_above_grid) for g in SWEEP_GAMMAS]}, "
          f"jgg {[ (g, by_gamma[g].jgg_l2t) for g in SWEEP_GAMMAS]}")


# ---------------------------------------------------------------------------
# 10. The numerical suite stands alone without the figure package
# ---------------------------------------------------------------------------

def test_criterion_10_primary_package_independent_of_figures():
    import pathlib
    src = pathlib.Path(__file__).resolve().parents[1] / "src" / "hallmhd"
    for path in src.glob("*.py"):
        text = path.read_text()
        assert "import figures" not in text
        assert "from figures" not in text
    print("criterion 10: primary package has no figure-package imports")
