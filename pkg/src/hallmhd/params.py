"""Physical and analysis parameters shared by every module."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

# The mid-band machinery needs K < sqrt(5)/2; the raw eigenvalue bounds
# only need K < 2.  Band construction enforces the tighter interval.
K_MAX_BANDS = math.sqrt(5.0) / 2.0
K_MAX_EIGEN = 2.0


@dataclass(frozen=True)
class PhysParams:
    """Coefficients beta, eta, gamma plus the analysis parameters.

    beta      -- collision/relaxation coefficient, > 0
    eta       -- current-scale ratio, > 0
    gamma     -- light-speed ratio, in (0, 1]
    sobolev_s -- regularity exponent, in (1/2, 1); also sets the
                 high-frequency cutoff exponent 2/(2s-3)
    band_K    -- shell-width constant, in (1, 2); bands need (1, sqrt(5)/2)
    band_R    -- low-frequency radius, > 0
    band_delta-- high-frequency cutoff parameter, > 0
    """

    beta: float = 1.0
    eta: float = 1.0
    gamma: float = 1.0
    sobolev_s: float = 0.75
    band_K: float = 1.1
    band_R: float = 4.0
    band_delta: float = 1.0

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not self.eta > 0:
            raise ValueError(f"eta must be positive, got {self.eta}")
        if not 0 < self.gamma <= 1:
            raise ValueError(f"gamma must lie in (0, 1], got {self.gamma}")
        if not 0.5 < self.sobolev_s < 1:
            raise ValueError(
                f"sobolev_s must lie in (1/2, 1), got {self.sobolev_s}")
        if not 1 < self.band_K < K_MAX_EIGEN:
            raise ValueError(
                f"band_K must lie in (1, 2), got {self.band_K}")
        if not self.band_R > 0:
            raise ValueError(f"band_R must be positive, got {self.band_R}")
        if not self.band_delta > 0:
            raise ValueError(
                f"band_delta must be positive, got {self.band_delta}")

    @property
    def damping_rate(self) -> float:
        """1/(beta eta^2 gamma^2), the electric relaxation rate."""
        return 1.0 / (self.beta * self.eta**2 * self.gamma**2)

    @property
    def shell_radius(self) -> float:
        """|xi| = 1/(2 beta eta^2 gamma): eigenvalues collide here."""
        return 1.0 / (2.0 * self.beta * self.eta**2 * self.gamma)

    @property
    def phi_cutoff(self) -> float:
        """(gamma/delta)^(2/(2s-3)); grows as gamma -> 0 since 2s-3 < 0."""
        return (self.gamma / self.band_delta) ** (2.0 / (2.0 * self.sobolev_s - 3.0))

    def with_gamma(self, gamma: float) -> "PhysParams":
        return replace(self, gamma=gamma)

    def validate_for_bands(self) -> None:
        """Extra invariants required before the five-band split is built."""
        if not self.band_K < K_MAX_BANDS:
            raise ValueError(
                f"band construction needs band_K < sqrt(5)/2, got {self.band_K}")
