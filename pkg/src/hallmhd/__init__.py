"""Spectral laboratory for the damped-Maxwell / Hall-MHD limit.

Closed-form spectral analysis of the per-mode Maxwell symbol, periodic
pseudo-spectral solvers for the full Navier-Stokes-Maxwell system and
its Hall-MHD limit, and a sweep harness that measures convergence as
the light-speed ratio gamma goes to zero.
"""

from .params import PhysParams
from .fields import Grid, SpectralField, BandSpec
from .symbol import EigenStructure, ModePair, Regime
from .harness import SweepConfig, SweepReport, gamma_sweep

__version__ = "0.1.0"

__all__ = [
    "PhysParams", "Grid", "SpectralField", "BandSpec",
    "EigenStructure", "ModePair", "Regime",
    "SweepConfig", "SweepReport", "gamma_sweep",
    "__version__",
]
