"""Time integration of the gamma-parameterized Navier-Stokes-Maxwell system.

    du/dt + div(u@u) - Lap u + grad p = j x B,    div u = 0
    gamma^2 dE/dt - curl B = -j
    dB/dt + curl E = 0,                            div B = 0

with j from the generalized Ohm's law.  The stiff linear (E, B) block is
advanced exactly: in the rescaled variable Et = gamma E it is precisely
the damped Maxwell symbol, so the closed-form per-mode propagator
applies verbatim.  Nonlinear sources enter through an integrating-factor
Heun stage (second order); the viscous factor on u is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import symbol
from .fields import (BandSpec, SpectralField, band_filter, dealiased_cross,
                     divergence_of_outer, energy, laplacian_factor,
                     leray_project, norm_hdot, norm_l2, norm_linf)
from .ledger import LedgerRow
from .ohm import solve_ohm
from .params import PhysParams


class StepError(RuntimeError):
    pass


@dataclass
class StepConfig:
    dt: float
    scheme: str = "etd_heun"
    cfl_safety: float = 0.25
    linear_only: bool = False  # diagnostics: drop all nonlinear sources
    ohm_tol: float = 1e-12
    ohm_max_iter: int = 200

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not 0 < self.cfl_safety <= 1:
            raise ValueError("cfl_safety must lie in (0, 1]")
        if self.scheme != "etd_heun":
            raise ValueError(f"unknown scheme {self.scheme!r}")


@dataclass
class NsmState:
    time: float
    u: SpectralField
    E: SpectralField
    B: SpectralField
    p: PhysParams
    j_cache: Optional[SpectralField] = None  # warm start for the Ohm solve

    def energy(self) -> float:
        return energy(self.u, self.B, self.E, self.p.gamma)


def stiffness_dt_bound(state: NsmState) -> float:
    """beta eta^2 gamma^2 / (1 + ||B||_inf): explicit-source stability."""
    p = state.p
    return p.beta * p.eta**2 * p.gamma**2 / (1.0 + norm_linf(state.B))


def advective_dt_bound(state: NsmState) -> float:
    dx = 2.0 * np.pi / state.u.grid.n
    umax = norm_linf(state.u)
    return dx / umax if umax > 0 else np.inf


def max_stable_dt(state: NsmState, cfl_safety: float = 0.25) -> float:
    return cfl_safety * min(stiffness_dt_bound(state),
                            advective_dt_bound(state))


def nsm_rhs_nonlinear(state: NsmState, cfg: StepConfig):
    """Non-stiff sources (du, dE_source) plus the Ohm report.

    du = P[-div(u@u) + j x B]  (viscosity via integrating factor);
    dE_source = -(1/gamma^2)(j - P E/(beta eta^2)), the remainder after
    the exact propagator absorbs curl B/gamma^2 and the linear damping;
    dB_source = 0 (Faraday is linear in (E, B)).
    """
    p = state.p
    report = solve_ohm(state.u, state.B, state.E, p,
                       tol=cfg.ohm_tol, max_iter=cfg.ohm_max_iter,
                       j0=state.j_cache)
    j = report.j
    du = leray_project(
        divergence_of_outer(state.u) * (-1.0)
        + dealiased_cross(j, state.B))
    dE = (j - state.E * (1.0 / (p.beta * p.eta**2))) * (-1.0 / p.gamma**2)
    dE.div_free = True
    # mean modes are genuine dynamics here: the Lorentz force exchanges
    # momentum between the fluid and the field (mean du = mean j x B),
    # and mean E relaxes through the mean current; the k = 0 branch of
    # the propagator supplies the linear damping.
    return du, dE, report


def _propagate_EB(dt: float, E: SpectralField, B: SpectralField,
                  p: PhysParams):
    """Exact linear step: conjugate by Et = gamma E, apply the symbol."""
    grid = E.grid
    e_out, b_out = symbol.propagate_arrays(
        dt, p.gamma * E.coeffs, B.coeffs, grid.kvec, p)
    return (SpectralField(grid, e_out / p.gamma, div_free=E.div_free),
            SpectralField(grid, b_out, div_free=B.div_free))


def step(state: NsmState, cfg: StepConfig) -> NsmState:
    """One integrating-factor Heun step of size cfg.dt."""
    dt = cfg.dt
    p = state.p
    grid = state.u.grid
    visc = laplacian_factor(grid, 1.0, dt)

    if cfg.linear_only:
        E1, B1 = _propagate_EB(dt, state.E, state.B, p)
        u1 = SpectralField(grid, visc * state.u.coeffs, div_free=True)
        return NsmState(state.time + dt, u1, E1, B1, p,
                        j_cache=state.j_cache)

    du1, dE1, rep1 = nsm_rhs_nonlinear(state, cfg)

    # predictor y* = e^{dt L}(y + dt k1)
    E_pred, B_pred = _propagate_EB(dt, state.E + dt * dE1, state.B, p)
    u_pred = SpectralField(grid, visc * (state.u.coeffs + dt * du1.coeffs),
                           div_free=True)
    pred = NsmState(state.time + dt, u_pred, E_pred, B_pred, p,
                    j_cache=rep1.j)
    du2, dE2, rep2 = nsm_rhs_nonlinear(pred, cfg)

    # corrector y+ = e^{dt L}(y + dt/2 k1) + dt/2 k2
    E_half, B_out = _propagate_EB(dt, state.E + (0.5 * dt) * dE1, state.B, p)
    E_out = E_half + (0.5 * dt) * dE2
    u_out = SpectralField(
        grid,
        visc * (state.u.coeffs + (0.5 * dt) * du1.coeffs)
        + (0.5 * dt) * du2.coeffs,
        div_free=True)

    if not (np.all(np.isfinite(u_out.coeffs))
            and np.all(np.isfinite(E_out.coeffs))
            and np.all(np.isfinite(B_out.coeffs))):
        raise StepError(
            f"non-finite field after step at t={state.time:.6g}, dt={dt:.3g}")
    return NsmState(state.time + dt, u_out, E_out, B_out, p, j_cache=rep2.j)


def diagnostics_row(state: NsmState, cfg: StepConfig,
                    bands: BandSpec) -> LedgerRow:
    p = state.p
    rep = solve_ohm(state.u, state.B, state.E, p, tol=cfg.ohm_tol,
                    max_iter=cfg.ohm_max_iter, j0=state.j_cache)
    state.j_cache = rep.j
    band_norms = {bid: norm_l2(band_filter(state.B, bands, bid))
                  for bid in ("ll", "lt", "mid", "gt", "gg")}
    return LedgerRow(
        t=state.time,
        energy=state.energy(),
        grad_u_sq=norm_hdot(state.u, 1.0) ** 2,
        joule=p.beta * p.eta**2 * norm_l2(rep.j) ** 2,
        divu_max=state.u.max_divergence(),
        divB_max=state.B.max_divergence(),
        band_ll=band_norms["ll"],
        band_lt=band_norms["lt"],
        band_mid=band_norms["mid"],
        band_gt=band_norms["gt"],
        band_gg=band_norms["gg"],
        ohm_iters=rep.iterations,
        ohm_residual=rep.residual,
    )


def run_nsm(initial: NsmState, T: float, cfg: StepConfig,
            probe_interval: float = None, probes=None, check_dt: bool = True):
    """Advance to time T, emitting one ledger row per probe interval.

    probes: optional callables invoked as probe(state) at every probe
    time (after the row is recorded).  Returns (final_state, rows).
    """
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
                f"dt={cfg.dt:.6g} exceeds the stability bound "
                f"cfl_safety*min(advective, beta*eta^2*gamma^2/(1+|B|_inf))"
                f" = {bound:.6g}")

    bands = BandSpec.from_params(initial.p)
    state = initial
    rows = [diagnostics_row(state, cfg, bands)]
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
            state = step(state, cfg)
        rows.append(diagnostics_row(state, cfg, bands))
        if probes:
            for probe in probes:
                probe(state)
    return state, rows
