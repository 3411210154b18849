"""Closed-form spectral analysis of the damped Maxwell symbol.

Per wavevector xi the linear (E, B) block is the 6x6 matrix

    [ -I/(beta eta^2 gamma^2)   (i/gamma) xi x . ]
    [ -(i/gamma) xi x .          0               ]

acting on pairs (e, b).  Its eigenvalues are lambda0 = -1/(beta eta^2
gamma^2) on the xi-parallel e-direction and

    lambda_pm = (-1 +- sqrt(1 - 4 beta^2 eta^4 gamma^2 |xi|^2))
                / (2 beta eta^2 gamma^2)

on the transverse pairs.  The discriminant vanishes on the resonant
shell |xi| = 1/(2 beta eta^2 gamma), where the symbol has a Jordan
block and the exponential picks up a linear-in-t factor.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .params import PhysParams

# Jordan branch activates when |1 - 4 b^2 e^4 g^2 |xi|^2| is below this;
# the diagonalized formula keeps >= 8 digits on either side.
RESONANCE_TOL = 1e-8


class Regime(enum.Enum):
    SUB_RESONANT = "sub_resonant"
    RESONANT_SHELL = "resonant_shell"
    SUPER_RESONANT = "super_resonant"


class ZeroWavevectorError(ValueError):
    """Raised when an eigen formula is asked for xi = 0."""


def _cross_matrix(xi: np.ndarray) -> np.ndarray:
    x, y, z = xi
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def maxwell_symbol(xi, p: PhysParams) -> np.ndarray:
    """The 6x6 matrix of the symbol at wavevector xi (xi = 0 allowed)."""
    xi = np.asarray(xi, dtype=float)
    S = _cross_matrix(xi)
    A = np.zeros((6, 6), dtype=complex)
    A[:3, :3] = -np.eye(3) * p.damping_rate
    A[:3, 3:] = (1j / p.gamma) * S
    A[3:, :3] = -(1j / p.gamma) * S
    return A


def _discriminant(k2: float, p: PhysParams) -> float:
    return 1.0 - 4.0 * p.beta**2 * p.eta**4 * p.gamma**2 * k2


def classify_regime(kabs: float, p: PhysParams) -> Regime:
    disc = _discriminant(kabs * kabs, p)
    if abs(disc) < RESONANCE_TOL:
        return Regime.RESONANT_SHELL
    return Regime.SUB_RESONANT if disc > 0 else Regime.SUPER_RESONANT


def eigenvalues(kabs, p: PhysParams):
    """Vectorized closed-form (lambda_plus, lambda_minus) at |xi| = kabs.

    The sub-resonant lambda_plus uses the rationalized form
    -2 beta eta^2 |xi|^2 / (1 + sqrt(1 - x)) to avoid cancellation.
    """
    kabs = np.asarray(kabs, dtype=float)
    k2 = kabs * kabs
    denom = 2.0 * p.beta * p.eta**2 * p.gamma**2
    disc = 1.0 - 4.0 * p.beta**2 * p.eta**4 * p.gamma**2 * k2
    sq = np.sqrt(disc.astype(complex))  # principal branch
    lam_minus = (-1.0 - sq) / denom
    lam_plus_naive = (-1.0 + sq) / denom
    with np.errstate(invalid="ignore"):
        lam_plus_sub = -2.0 * p.beta * p.eta**2 * k2 / (
            1.0 + np.sqrt(np.clip(disc, 0.0, None)))
    lam_plus = np.where(disc > 0, lam_plus_sub.astype(complex), lam_plus_naive)
    if lam_plus.ndim == 0:
        return complex(lam_plus), complex(lam_minus)
    return lam_plus, lam_minus


@dataclass(frozen=True)
class EigenStructure:
    """Spectral data of the symbol at one nonzero wavevector."""

    xi: np.ndarray
    lambda0: float
    lambda_plus: complex
    lambda_minus: complex
    mixing_s: Optional[complex]  # (lam_- - lam_+)/lam_-; None on the shell
    regime: Regime
    gamma: float

    def _xi_cross(self, v):
        return np.cross(self.xi, v)

    # Eigenvector families of the symbol.  The e-parameterized family of the
    # plus-eigenspace carries lambda_plus; the b-parameterized one
    # carries lambda_minus (and vice versa for the minus-eigenspace).
    def mode_plus_from_e(self, e):
        return np.asarray(e, dtype=complex), \
            -1j / (self.gamma * self.lambda_plus) * self._xi_cross(e)

    def mode_plus_from_b(self, b):
        return -1j / (self.gamma * self.lambda_minus) * self._xi_cross(b), \
            np.asarray(b, dtype=complex)

    def mode_minus_from_e(self, e):
        return np.asarray(e, dtype=complex), \
            -1j / (self.gamma * self.lambda_minus) * self._xi_cross(e)

    def mode_minus_from_b(self, b):
        return -1j / (self.gamma * self.lambda_plus) * self._xi_cross(b), \
            np.asarray(b, dtype=complex)


def eigen_structure(xi, p: PhysParams) -> EigenStructure:
    xi = np.asarray(xi, dtype=float)
    kabs = float(np.linalg.norm(xi))
    if kabs == 0.0:
        raise ZeroWavevectorError(
            "eigen formulas are undefined at xi = 0; use the zero-mode "
            "branch of the propagator")
    regime = classify_regime(kabs, p)
    if regime is Regime.RESONANT_SHELL:
        lam1 = -0.5 * p.damping_rate
        return EigenStructure(xi=xi, lambda0=-p.damping_rate,
                              lambda_plus=lam1, lambda_minus=lam1,
                              mixing_s=None, regime=regime, gamma=p.gamma)
    lam_plus, lam_minus = eigenvalues(kabs, p)
    s = (lam_minus - lam_plus) / lam_minus
    return EigenStructure(xi=xi, lambda0=-p.damping_rate,
                          lambda_plus=lam_plus, lambda_minus=lam_minus,
                          mixing_s=s, regime=regime, gamma=p.gamma)


# ---------------------------------------------------------------------------
# Spectral-gap and mixing-ratio bound report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundCheck:
    name: str
    lhs: float
    rhs: float
    applicable: bool

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        return (not self.applicable) or self.margin >= 0.0


@dataclass(frozen=True)
class GapBoundReport:
    kabs: float
    regime: Regime
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def ratio_constant(K: float) -> float:
    """The frozen constant in |lam_+/(lam_- - lam_+)| <= C gamma^2 |xi|^2.

    Twice the sharp value 2 b^2 e^4 / (sqrt(1-1/K^2)(1+sqrt(1-1/K^2)))
    at the regime boundary, divided by b^2 e^4 (reattached by caller).
    """
    r = np.sqrt(1.0 - 1.0 / (K * K))
    return 4.0 / (r * (1.0 + r))


def check_gap_bounds(xi, p: PhysParams, K: float = None) -> GapBoundReport:
    """Evaluate each spectral-gap and mixing-ratio bound with its margin at one xi."""
    xi = np.asarray(xi, dtype=float)
    kabs = float(np.linalg.norm(xi))
    if kabs == 0.0:
        raise ZeroWavevectorError("gap bounds need xi != 0")
    if K is None:
        K = p.band_K
    be2 = p.beta * p.eta**2
    shell = p.shell_radius
    regime = classify_regime(kabs, p)
    lam_plus, lam_minus = eigenvalues(kabs, p)
    diff = lam_minus - lam_plus
    checks = []

    sub = kabs <= shell
    checks.append(BoundCheck("lambda_plus_lower",
                             -2.0 * be2 * kabs**2, lam_plus.real, sub))
    checks.append(BoundCheck("lambda_plus_upper",
                             lam_plus.real, -be2 * kabs**2, sub))
    checks.append(BoundCheck("lambda_minus_lower",
                             -p.damping_rate, lam_minus.real, sub))
    checks.append(BoundCheck("lambda_minus_upper",
                             lam_minus.real, -0.5 * p.damping_rate, sub))

    low = kabs <= shell / K
    if low:
        C = ratio_constant(K) * p.beta**2 * p.eta**4
        checks.append(BoundCheck("ratio_minus_low",
                                 abs(lam_minus / diff),
                                 K / np.sqrt(K * K - 1.0), True))
        checks.append(BoundCheck("ratio_plus_low",
                                 abs(lam_plus / diff),
                                 C * p.gamma**2 * kabs**2, True))
    else:
        checks.append(BoundCheck("ratio_minus_low", 0.0, 0.0, False))
        checks.append(BoundCheck("ratio_plus_low", 0.0, 0.0, False))

    sup = kabs > shell
    checks.append(BoundCheck("modulus_identity",
                             abs(abs(lam_plus) - kabs / p.gamma),
                             1e-9 * kabs / p.gamma, sup))
    checks.append(BoundCheck("real_part_identity",
                             abs(lam_plus.real + 0.5 * p.damping_rate),
                             1e-9 * p.damping_rate, sup))

    high = kabs >= K * shell
    if high:
        bound = K / (2.0 * np.sqrt(K * K - 1.0))
        checks.append(BoundCheck("ratio_pm_high",
                                 max(abs(lam_plus / diff),
                                     abs(lam_minus / diff)), bound, True))
        checks.append(BoundCheck("inv_diff_high",
                                 abs(1.0 / diff),
                                 bound * p.gamma / kabs, True))
    else:
        checks.append(BoundCheck("ratio_pm_high", 0.0, 0.0, False))
        checks.append(BoundCheck("inv_diff_high", 0.0, 0.0, False))

    return GapBoundReport(kabs=kabs, regime=regime, checks=tuple(checks))


def scan_gap_bound_margins(kabs: np.ndarray, beta: float, eta: float,
                         gamma: float, K: float):
    """Vectorized minimum margins of every applicable gap/ratio bound.

    Returns a dict name -> margin array (NaN where not applicable).
    """
    p = PhysParams(beta=beta, eta=eta, gamma=gamma)
    kabs = np.asarray(kabs, dtype=float)
    be2 = beta * eta**2
    shell = p.shell_radius
    lam_plus, lam_minus = eigenvalues(kabs, p)
    diff = lam_minus - lam_plus
    nan = np.full_like(kabs, np.nan)

    sub = kabs <= shell
    low = kabs <= shell / K
    high = kabs >= K * shell
    sup = kabs > shell

    out = {}
    out["lambda_plus_lower"] = np.where(sub, lam_plus.real + 2 * be2 * kabs**2, nan)
    out["lambda_plus_upper"] = np.where(sub, -be2 * kabs**2 - lam_plus.real, nan)
    out["lambda_minus_lower"] = np.where(sub, lam_minus.real + p.damping_rate, nan)
    out["lambda_minus_upper"] = np.where(
        sub, -0.5 * p.damping_rate - lam_minus.real, nan)
    with np.errstate(divide="ignore", invalid="ignore"):
        rm = np.abs(lam_minus / diff)
        rp = np.abs(lam_plus / diff)
        inv = np.abs(1.0 / diff)
    C = ratio_constant(K) * beta**2 * eta**4
    out["ratio_minus_low"] = np.where(low, K / np.sqrt(K * K - 1) - rm, nan)
    out["ratio_plus_low"] = np.where(low, C * gamma**2 * kabs**2 - rp, nan)
    out["modulus_identity"] = np.where(
        sup, 1e-9 * kabs / gamma - np.abs(np.abs(lam_plus) - kabs / gamma), nan)
    out["real_part_identity"] = np.where(
        sup, 1e-9 * p.damping_rate
        - np.abs(lam_plus.real + 0.5 * p.damping_rate), nan)
    bound = K / (2.0 * np.sqrt(K * K - 1.0))
    out["ratio_pm_high"] = np.where(high, bound - np.maximum(rm, rp), nan)
    out["inv_diff_high"] = np.where(high, bound * gamma / kabs - inv, nan)
    return out


# ---------------------------------------------------------------------------
# Exact propagator and eigen decomposition of modes
# ---------------------------------------------------------------------------

@dataclass
class ModePair:
    """One Fourier mode of the (E, B) pair."""

    e: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.e = np.asarray(self.e, dtype=complex)
        self.b = np.asarray(self.b, dtype=complex)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.e) ** 2)
                             + np.sum(np.abs(self.b) ** 2)))

    def __add__(self, other):
        return ModePair(self.e + other.e, self.b + other.b)


def decompose_initial(mode: ModePair, xi, p: PhysParams):
    """Split a mode into (parallel, plus-eigenspace, minus-eigenspace) parts.

    Inversion of the eigenbasis: with s = (lam_- - lam_+)/lam_-,

        s e0 = e_hat + (i/(gamma lam_-)) xi x b_hat
        s b0 = b_hat + (i/(gamma lam_-)) xi x e_hat

    and the plus part is (-(i/(gamma lam_-)) xi x b0, b0), the minus part
    (e0, -(i/(gamma lam_-)) xi x e0).  Requires xi . b_hat = 0.
    """
    xi = np.asarray(xi, dtype=float)
    es = eigen_structure(xi, p)
    if es.regime is Regime.RESONANT_SHELL:
        raise ValueError(
            "eigen decomposition is undefined on the resonant shell "
            "(symbol not diagonalizable)")
    k2 = float(xi @ xi)
    bpar = complex(xi @ mode.b)
    if abs(bpar) > 1e-10 * (np.linalg.norm(mode.b) * np.sqrt(k2) + 1e-300):
        raise ValueError("mode must satisfy xi . b = 0")
    e_par = (complex(xi @ mode.e) / k2) * xi
    parallel = ModePair(e_par, np.zeros(3, dtype=complex))

    e_perp = mode.e - e_par
    s = es.mixing_s
    coef = 1j / (p.gamma * es.lambda_minus)
    e0 = (e_perp + coef * np.cross(xi, mode.b)) / s
    b0 = (mode.b + coef * np.cross(xi, e_perp)) / s
    plus = ModePair(-coef * np.cross(xi, b0), b0)
    minus = ModePair(e0, -coef * np.cross(xi, e0))
    return parallel, plus, minus


def propagate_mode(t: float, mode: ModePair, xi, p: PhysParams) -> ModePair:
    """Apply exp(t * symbol(xi)) to one mode via the closed forms.

    Diagonalized path off the resonant shell; Jordan formula
    exp(t lam1) (I + t (A - lam1 I)) on it; pure e-damping at xi = 0.
    """
    if t < 0:
        raise ValueError(f"propagation time must be nonnegative, got {t}")
    xi = np.asarray(xi, dtype=float)
    kabs = float(np.linalg.norm(xi))
    if kabs == 0.0:
        return ModePair(mode.e * np.exp(-t * p.damping_rate), mode.b.copy())
    regime = classify_regime(kabs, p)
    if regime is Regime.RESONANT_SHELL:
        lam1 = -0.5 * p.damping_rate
        # nilpotent part N(e,b) = (lam1 e + (i/g) xi x b, -(i/g) xi x e - lam1 b)
        ig = 1j / p.gamma
        k2 = kabs * kabs
        e_par = (complex(xi @ mode.e) / k2) * xi
        e_perp = mode.e - e_par
        ne = lam1 * e_perp + ig * np.cross(xi, mode.b)
        nb = -ig * np.cross(xi, e_perp) - lam1 * mode.b
        fac = np.exp(t * lam1)
        e_out = fac * (e_perp + t * ne) + np.exp(-t * p.damping_rate) * e_par
        b_out = fac * (mode.b + t * nb)
        return ModePair(e_out, b_out)
    parallel, plus, minus = decompose_initial(mode, xi, p)
    es = eigen_structure(xi, p)
    e_out = (np.exp(-t * p.damping_rate) * parallel.e
             + np.exp(t * es.lambda_plus) * plus.e
             + np.exp(t * es.lambda_minus) * minus.e)
    b_out = (np.exp(t * es.lambda_plus) * plus.b
             + np.exp(t * es.lambda_minus) * minus.b)
    return ModePair(e_out, b_out)


# ---------------------------------------------------------------------------
# Lattice-wide propagator used by the NSM solver
# ---------------------------------------------------------------------------

def propagate_arrays(t: float, ehat: np.ndarray, bhat: np.ndarray,
                     kvec: np.ndarray, p: PhysParams):
    """exp(t * symbol) applied at every lattice wavevector at once.

    ehat, bhat: (3, ...) complex coefficient arrays, kvec: (3, ...) real
    wavevectors.  Returns new (ehat, bhat).  Solver fields are
    divergence-projected, but the xi-parallel components are still
    handled explicitly (e decays at lambda0, b is constant): feeding
    them through the transverse eigen formulas would amplify rounding
    noise by 1/s every step near the resonant shell.
    """
    if t < 0:
        raise ValueError(f"propagation time must be nonnegative, got {t}")
    k2 = np.sum(kvec * kvec, axis=0)
    kabs = np.sqrt(k2)
    disc = 1.0 - 4.0 * p.beta**2 * p.eta**4 * p.gamma**2 * k2
    shell_mask = np.abs(disc) < RESONANCE_TOL
    zero_mask = k2 == 0.0
    inv_k2 = np.where(zero_mask, 0.0, 1.0 / np.where(zero_mask, 1.0, k2))

    e_par = kvec * (np.sum(kvec * ehat, axis=0) * inv_k2)
    b_par = kvec * (np.sum(kvec * bhat, axis=0) * inv_k2)
    ehat = ehat - e_par
    bhat = bhat - b_par

    lam_plus, lam_minus = eigenvalues(kabs, p)
    # guard the shell/zero modes against division blowups; fixed below
    safe = ~(shell_mask | zero_mask)
    lam_minus_safe = np.where(safe, lam_minus, 1.0)
    s = np.where(safe, (lam_minus - lam_plus) / lam_minus_safe, 1.0)

    kx_e = np.cross(kvec, ehat, axis=0)
    kx_b = np.cross(kvec, bhat, axis=0)
    coef = 1j / (p.gamma * lam_minus_safe)
    e0 = (ehat + coef * kx_b) / s
    b0 = (bhat + coef * kx_e) / s
    ep = np.exp(t * lam_plus)
    em = np.exp(t * lam_minus)
    e_out = em * e0 - ep * coef * np.cross(kvec, b0, axis=0)
    b_out = ep * b0 - em * coef * np.cross(kvec, e0, axis=0)

    if np.any(shell_mask):
        lam1 = -0.5 * p.damping_rate
        ig = 1j / p.gamma
        ne = lam1 * ehat + ig * kx_b
        nb = -ig * kx_e - lam1 * bhat
        fac = np.exp(t * lam1)
        e_j = fac * (ehat + t * ne)
        b_j = fac * (bhat + t * nb)
        e_out = np.where(shell_mask, e_j, e_out)
        b_out = np.where(shell_mask, b_j, b_out)
    e_out = e_out + np.exp(-t * p.damping_rate) * e_par
    b_out = b_out + b_par
    if np.any(zero_mask):
        e_out = np.where(zero_mask, ehat * np.exp(-t * p.damping_rate), e_out)
        b_out = np.where(zero_mask, bhat, b_out)
    return e_out, b_out


def resonant_shell_decay_scan(p: PhysParams, K: float = None,
                              n_xi: int = 64, n_t: int = 200) -> float:
    """Empirical omega in |e^{t lam+}(1-e^{t(lam- - lam+)})/(t(lam- - lam+))|
    <= e^{-omega t / gamma^2} over the mid band.

    No closed form is claimed; this records the best (largest) omega
    observed on a (|xi|, t) grid.
    """
    if K is None:
        K = p.band_K
    shell = p.shell_radius
    kk = np.linspace(shell / K * 1.0001, shell * K * 0.9999, n_xi)
    lam_plus, lam_minus = eigenvalues(kk, p)
    diff = lam_minus - lam_plus
    tt = np.linspace(1e-3, 5.0, n_t)[:, None] * p.gamma**2 * p.beta * p.eta**2
    z = tt * diff[None, :]
    g = np.exp(tt * lam_plus[None, :]) * (1.0 - np.exp(z)) / z
    mag = np.abs(g)
    mag = np.clip(mag, 1e-300, None)
    omega = -(p.gamma**2) * np.log(mag) / tt
    return float(np.min(omega))
