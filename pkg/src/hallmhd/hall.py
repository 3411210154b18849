"""Time integration of the limiting Hall-MHD system.

    du/dt + div(u@u) - Lap u + grad p = (curl B) x B,      div u = 0
    dB/dt + eta curl((curl B) x B) - curl(u x B) = beta eta^2 Lap B

General coefficients (viscosity 1, resistivity beta eta^2, Hall
coefficient eta); the unit-coefficient system is the beta = eta = 1
slice.  Heun steps with exact viscous/resistive integrating factors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import (BandSpec, SpectralField, band_filter, curl,
                     dealiased_cross, divergence_of_outer, laplacian_factor,
                     leray_project, norm_hdot, norm_l2, norm_linf)
from .ledger import LedgerRow
from .nsm import StepConfig, StepError
from .params import PhysParams

WHISTLER_CFL = 0.5


@dataclass
class HallState:
    time: float
    u: SpectralField
    B: SpectralField
    p: PhysParams

    def energy(self) -> float:
        return 0.5 * (norm_l2(self.u) ** 2 + norm_l2(self.B) ** 2)


def hall_term(B: SpectralField, eta: float) -> SpectralField:
    """eta curl((curl B) x B); divergence-free by construction."""
    return curl(dealiased_cross(curl(B), B)) * eta


def hall_rhs(state: HallState):
    """Nonlinear tendencies (du, dB); diffusion left to the factors."""
    j = curl(state.B)
    du = leray_project(
        divergence_of_outer(state.u) * (-1.0)
        + dealiased_cross(j, state.B))
    dB = curl(dealiased_cross(state.u, state.B)) \
        - curl(dealiased_cross(j, state.B)) * state.p.eta
    du.coeffs[:, 0, 0, 0] = 0.0
    dB.coeffs[:, 0, 0, 0] = 0.0
    return du, dB


def whistler_dt_bound(state: HallState) -> float:
    """Hall waves have frequency ~ eta |B| k^2: dt <= c dx^2/(eta |B|_inf)."""
    dx = 2.0 * np.pi / state.u.grid.n
    bmax = norm_linf(state.B)
    if bmax == 0:
        return np.inf
    return WHISTLER_CFL * dx**2 / (state.p.eta * bmax)


def advective_dt_bound(state: HallState) -> float:
    dx = 2.0 * np.pi / state.u.grid.n
    umax = norm_linf(state.u)
    return dx / umax if umax > 0 else np.inf


def max_stable_dt(state: HallState, cfl_safety: float = 0.25) -> float:
    return cfl_safety * min(whistler_dt_bound(state),
                            advective_dt_bound(state))


def step_hall(state: HallState, cfg: StepConfig) -> HallState:
    """Integrating-factor Heun step (viscosity 1, resistivity beta eta^2)."""
    dt = cfg.dt
    p = state.p
    grid = state.u.grid
    visc = laplacian_factor(grid, 1.0, dt)
    resist = laplacian_factor(grid, p.beta * p.eta**2, dt)

    if cfg.linear_only:
        return HallState(
            state.time + dt,
            SpectralField(grid, visc * state.u.coeffs, div_free=True),
            SpectralField(grid, resist * state.B.coeffs, div_free=True),
            p)

    du1, dB1 = hall_rhs(state)
    pred = HallState(
        state.time + dt,
        SpectralField(grid, visc * (state.u.coeffs + dt * du1.coeffs),
                      div_free=True),
        SpectralField(grid, resist * (state.B.coeffs + dt * dB1.coeffs),
                      div_free=True),
        p)
    du2, dB2 = hall_rhs(pred)
    u_out = SpectralField(
        grid, visc * (state.u.coeffs + 0.5 * dt * du1.coeffs)
        + 0.5 * dt * du2.coeffs, div_free=True)
    B_out = SpectralField(
        grid, resist * (state.B.coeffs + 0.5 * dt * dB1.coeffs)
        + 0.5 * dt * dB2.coeffs, div_free=True)
    if not (np.all(np.isfinite(u_out.coeffs))
            and np.all(np.isfinite(B_out.coeffs))):
        raise StepError(
            f"non-finite field after Hall step at t={state.time:.6g}")
    return HallState(state.time + dt, u_out, B_out, p)


def diagnostics_row(state: HallState, bands: BandSpec) -> LedgerRow:
    p = state.p
    j = curl(state.B)
    band_norms = {bid: norm_l2(band_filter(state.B, bands, bid))
                  for bid in ("ll", "lt", "mid", "gt", "gg")}
    return LedgerRow(
        t=state.time,
        energy=state.energy(),
        grad_u_sq=norm_hdot(state.u, 1.0) ** 2,
        joule=p.beta * p.eta**2 * norm_l2(j) ** 2,
        divu_max=state.u.max_divergence(),
        divB_max=state.B.max_divergence(),
        band_ll=band_norms["ll"],
        band_lt=band_norms["lt"],
        band_mid=band_norms["mid"],
        band_gt=band_norms["gt"],
        band_gg=band_norms["gg"],
    )


def run_hall(initial: HallState, T: float, cfg: StepConfig,
             probe_interval: float = None, probes=None,
             check_dt: bool = True):
    """Advance to time T; same ledger schema as the NSM run (the joule
    column is beta eta^2 ||curl B||^2).  Returns (final_state, rows)."""
    if T < 0:
        raise ValueError("horizon must be nonnegative")
    if probe_interval is None:
        probe_interval = cfg.dt
    steps_per_probe = max(1, round(probe_interval / cfg.dt))
    if abs(steps_per_probe * cfg.dt - probe_interval) > 1e-9 * probe_interval:
        raise ValueError(
            f"probe interval {probe_interval} is not a multiple of "
            f"dt {cfg.dt}")
    if check_dt and T > 0 and not cfg.linear_only:
        bound = max_stable_dt(initial, cfg.cfl_safety)
        if cfg.dt > bound * (1 + 1e-12):
            raise StepError(
                f"dt={cfg.dt:.6g} exceeds the Hall stability bound "
                f"cfl_safety*min(advective, whistler) = {bound:.6g}")
    bands = BandSpec.from_params(initial.p)
    state = initial
    rows = [diagnostics_row(state, bands)]
    if probes:
        for probe in probes:
            probe(state)
    n_probes = round(T / probe_interval) if T > 0 else 0
    if T > 0 and abs(n_probes * probe_interval - T) > 1e-9 * T:
        raise ValueError(
            f"horizon {T} is not a multiple of probe interval "
            f"{probe_interval}")
    for _ in range(n_probes):
        for _ in range(steps_per_probe):
            state = step_hall(state, cfg)
        rows.append(diagnostics_row(state, bands))
        if probes:
            for probe in probes:
                probe(state)
    return state, rows
