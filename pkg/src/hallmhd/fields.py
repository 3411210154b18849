"""Periodic-box spectral field algebra on the 2pi-periodic torus.

Fields live as complex Fourier coefficients, shape (3, n, n, n), with
numpy's unnormalized forward transform and 1/n^3 inverse.  All norms
apply the Parseval factor (2pi)^3 / n^6 explicitly.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from .params import PhysParams

BOX_VOLUME = (2.0 * np.pi) ** 3
DIV_FREE_TOL = 1e-12


class GridMismatchError(ValueError):
    pass


class Grid:
    """Cubic lattice of n^3 points on [0, 2pi)^3 with integer wavevectors."""

    def __init__(self, n: int, dealias_fraction: float = 2.0 / 3.0):
        if n < 8 or n % 2 != 0:
            raise ValueError(f"grid size must be even and >= 8, got {n}")
        self.n = n
        self.dealias_fraction = dealias_fraction
        k1 = np.fft.fftfreq(n, d=1.0 / n)  # integers -n/2+1 .. n/2 reordered
        self.kx, self.ky, self.kz = np.meshgrid(k1, k1, k1, indexing="ij")
        self.kvec = np.stack([self.kx, self.ky, self.kz])
        self.k2 = self.kx**2 + self.ky**2 + self.kz**2
        self.kabs = np.sqrt(self.k2)
        inv = np.zeros_like(self.k2)
        nz = self.k2 > 0
        inv[nz] = 1.0 / self.k2[nz]
        self.inv_k2 = inv
        cut = dealias_fraction * n / 2.0
        # also drops the unpaired Nyquist plane (|k| = n/2 > cut for 2/3)
        self.dealias_mask = ((np.abs(self.kx) <= cut)
                             & (np.abs(self.ky) <= cut)
                             & (np.abs(self.kz) <= cut))
        self.kmax_dealiased = float(np.max(self.kabs[self.dealias_mask]))

    def __eq__(self, other):
        return (isinstance(other, Grid) and other.n == self.n
                and other.dealias_fraction == self.dealias_fraction)

    def __hash__(self):
        return hash((self.n, self.dealias_fraction))

    def coordinates(self):
        x1 = np.arange(self.n) * (2.0 * np.pi / self.n)
        return np.meshgrid(x1, x1, x1, indexing="ij")


@dataclass
class SpectralField:
    """A 3-vector field stored as Fourier coefficients."""

    grid: Grid
    coeffs: np.ndarray  # (3, n, n, n) complex128
    div_free: bool = False

    @classmethod
    def zeros(cls, grid: Grid, div_free: bool = True) -> "SpectralField":
        n = grid.n
        return cls(grid, np.zeros((3, n, n, n), dtype=complex), div_free)

    @classmethod
    def from_physical(cls, grid: Grid, values: np.ndarray) -> "SpectralField":
        values = np.asarray(values, dtype=float)
        return cls(grid, np.fft.fftn(values, axes=(1, 2, 3)))

    def to_physical(self) -> np.ndarray:
        return np.fft.ifftn(self.coeffs, axes=(1, 2, 3)).real

    def copy(self) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs.copy(), self.div_free)

    def __add__(self, other):
        self._check(other)
        return SpectralField(self.grid, self.coeffs + other.coeffs,
                             self.div_free and other.div_free)

    def __sub__(self, other):
        self._check(other)
        return SpectralField(self.grid, self.coeffs - other.coeffs,
                             self.div_free and other.div_free)

    def __mul__(self, a):
        return SpectralField(self.grid, self.coeffs * a, self.div_free)

    __rmul__ = __mul__

    def _check(self, other):
        if self.grid != other.grid:
            raise GridMismatchError("fields live on different grids")

    def max_divergence(self) -> float:
        """max over modes of |xi . f|, normalized by the field scale
        max |xi||f| (per-mode normalization would amplify modes whose
        amplitude is pure rounding noise)."""
        g = self.grid
        dot = np.abs(np.sum(g.kvec * self.coeffs, axis=0))
        scale = np.max(g.kabs * np.sqrt(
            np.sum(np.abs(self.coeffs) ** 2, axis=0)))
        return float(np.max(dot) / (scale + np.finfo(float).eps))


# ---------------------------------------------------------------------------
# Differential operators and projections
# ---------------------------------------------------------------------------

def leray_project(f: SpectralField) -> SpectralField:
    """Remove the gradient part: u_hat -> u_hat - xi (xi.u_hat)/|xi|^2."""
    g = f.grid
    dot = np.sum(g.kvec * f.coeffs, axis=0)
    out = f.coeffs - g.kvec * (dot * g.inv_k2)
    return SpectralField(g, out, div_free=True)


def curl(f: SpectralField) -> SpectralField:
    out = 1j * np.cross(f.grid.kvec, f.coeffs, axis=0)
    return SpectralField(f.grid, out, div_free=True)


def div(f: SpectralField) -> np.ndarray:
    """Scalar spectral field i xi . f_hat, shape (n, n, n)."""
    return 1j * np.sum(f.grid.kvec * f.coeffs, axis=0)


def gradient(scalar: np.ndarray, grid: Grid) -> SpectralField:
    return SpectralField(grid, 1j * grid.kvec * scalar[None])


def laplacian_factor(grid: Grid, coeff: float, dt: float) -> np.ndarray:
    """Integrating factor exp(-coeff |xi|^2 dt)."""
    return np.exp(-coeff * grid.k2 * dt)


# ---------------------------------------------------------------------------
# Dealiased products
# ---------------------------------------------------------------------------

def dealiased_cross(a: SpectralField, b: SpectralField) -> SpectralField:
    a._check(b)
    g = a.grid
    pa = a.to_physical()
    pb = b.to_physical()
    prod = np.cross(pa, pb, axis=0)
    out = np.fft.fftn(prod, axes=(1, 2, 3)) * g.dealias_mask
    return SpectralField(g, out)


def cross_physical(a_phys: np.ndarray, b_phys: np.ndarray,
                   grid: Grid) -> SpectralField:
    """Cross product when physical representations are already in hand."""
    prod = np.cross(a_phys, b_phys, axis=0)
    out = np.fft.fftn(prod, axes=(1, 2, 3)) * grid.dealias_mask
    return SpectralField(grid, out)


def dealiased_outer(a: SpectralField, b: SpectralField) -> np.ndarray:
    """Dealiased coefficients of the tensor a_i b_j, shape (3, 3, n, n, n)."""
    a._check(b)
    g = a.grid
    pa = a.to_physical()
    pb = b.to_physical()
    prod = pa[:, None] * pb[None, :]
    return np.fft.fftn(prod, axes=(2, 3, 4)) * g.dealias_mask


def divergence_of_outer(u: SpectralField) -> SpectralField:
    """div(u (x) u) computed from the dealiased tensor product."""
    g = u.grid
    tens = dealiased_outer(u, u)
    out = 1j * np.sum(g.kvec[None] * tens, axis=1)
    return SpectralField(g, out)


# ---------------------------------------------------------------------------
# Frequency bands
# ---------------------------------------------------------------------------

BAND_IDS = ("ll", "lt", "mid", "gt", "gg")


@dataclass(frozen=True)
class BandSpec:
    """The five-band thresholds R < 1/(2K b e^2 g) < K/(2 b e^2 g) < Phi.

    Raw thresholds may be non-monotone when gamma is large; the effective
    edges are clamped upward so the indicator sets still partition the
    lattice, and `degenerate` marks which bands were emptied by clamping.
    """

    R: float
    t_shell_low: float
    t_shell_high: float
    phi: float
    edges: tuple          # clamped (e0, e1, e2, e3): band boundaries
    degenerate: tuple     # band ids whose raw interval collapsed

    @classmethod
    def from_params(cls, p: PhysParams) -> "BandSpec":
        p.validate_for_bands()
        R = p.band_R
        t1 = p.shell_radius / p.band_K
        t2 = p.shell_radius * p.band_K
        phi = p.phi_cutoff
        e1 = max(R, t1)
        e2 = max(e1, t2)
        e3 = max(e2, phi)
        degenerate = []
        if t1 <= R:
            degenerate.append("lt")
        if t2 <= e1:
            degenerate.append("mid")
        if phi <= e2:
            degenerate.append("gt")
        return cls(R=R, t_shell_low=t1, t_shell_high=t2, phi=phi,
                   edges=(R, e1, e2, e3), degenerate=tuple(degenerate))

    def indicator(self, band_id: str, kabs: np.ndarray) -> np.ndarray:
        """Interval conventions: ll = [0, R], then left-open right-closed."""
        if band_id not in BAND_IDS:
            raise ValueError(f"unknown band {band_id!r}")
        e0, e1, e2, e3 = self.edges
        if band_id == "ll":
            return kabs <= e0
        if band_id == "lt":
            return (kabs > e0) & (kabs <= e1)
        if band_id == "mid":
            return (kabs > e1) & (kabs <= e2)
        if band_id == "gt":
            return (kabs > e2) & (kabs <= e3)
        return kabs > e3


def band_filter(f: SpectralField, spec: BandSpec, band_id: str) -> SpectralField:
    mask = spec.indicator(band_id, f.grid.kabs)
    return SpectralField(f.grid, f.coeffs * mask, f.div_free)


# ---------------------------------------------------------------------------
# Norms and energy
# ---------------------------------------------------------------------------

def _parseval_factor(grid: Grid) -> float:
    return BOX_VOLUME / grid.n**6


def norm_l2(f: SpectralField) -> float:
    return float(np.sqrt(_parseval_factor(f.grid)
                         * np.sum(np.abs(f.coeffs) ** 2)))


def norm_hdot(f: SpectralField, s: float) -> float:
    """Homogeneous Sobolev norm with multiplier |xi|^(2s)."""
    g = f.grid
    w = g.k2 ** s if s == 1.0 else np.where(g.k2 > 0, g.kabs ** (2 * s), 0.0)
    return float(np.sqrt(_parseval_factor(g)
                         * np.sum(w * np.sum(np.abs(f.coeffs) ** 2, axis=0))))


def norm_linf(f: SpectralField) -> float:
    return float(np.max(np.abs(f.to_physical())))


def norm_lp_physical(values: np.ndarray, p_exp: float) -> float:
    """L^p norm of a physical-space field by lattice quadrature."""
    n3 = values.shape[-1] ** 3
    mag = np.sqrt(np.sum(values**2, axis=0)) if values.ndim == 4 else np.abs(values)
    return float((BOX_VOLUME / n3 * np.sum(mag ** p_exp)) ** (1.0 / p_exp))


def norms(f: SpectralField, s: float = 0.75) -> dict:
    return {
        "L2": norm_l2(f),
        "H1dot": norm_hdot(f, 1.0),
        "H1psdot": norm_hdot(f, 1.0 + s),
        "Linf": norm_linf(f),
    }


def energy(u: SpectralField, B: SpectralField, E: SpectralField,
           gamma: float) -> float:
    """(1/2)(|u|^2 + |B|^2 + gamma^2 |E|^2) in L^2."""
    return 0.5 * (norm_l2(u) ** 2 + norm_l2(B) ** 2
                  + gamma**2 * norm_l2(E) ** 2)


# ---------------------------------------------------------------------------
# Snapshot container
# ---------------------------------------------------------------------------

SNAPSHOT_MAGIC = b"HMSF"
SNAPSHOT_VERSION = 1


def save_snapshot(path, fields: dict, time: float, params: PhysParams,
                  extra: dict = None) -> None:
    """Self-describing binary container: header JSON + raw coefficients."""
    names = sorted(fields)
    grid = fields[names[0]].grid
    header = {
        "n": grid.n,
        "dealias_fraction": grid.dealias_fraction,
        "time": time,
        "params": {
            "beta": params.beta, "eta": params.eta, "gamma": params.gamma,
            "sobolev_s": params.sobolev_s, "band_K": params.band_K,
            "band_R": params.band_R, "band_delta": params.band_delta,
        },
        "fields": [
            {"name": nm, "div_free": fields[nm].div_free} for nm in names
        ],
        "extra": extra or {},
    }
    hdr = json.dumps(header, sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(struct.pack("<BI", SNAPSHOT_VERSION, len(hdr)))
        fh.write(hdr)
        for nm in names:
            f = fields[nm]
            if f.grid != grid:
                raise GridMismatchError("snapshot fields must share one grid")
            fh.write(np.ascontiguousarray(f.coeffs, dtype=complex).tobytes())


def load_snapshot(path):
    """Returns (fields dict, time, PhysParams, extra dict)."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != SNAPSHOT_MAGIC:
            raise ValueError(f"not a field snapshot: bad magic {magic!r}")
        version, hlen = struct.unpack("<BI", fh.read(5))
        if version != SNAPSHOT_VERSION:
            raise ValueError(f"unsupported snapshot version {version}")
        header = json.loads(fh.read(hlen))
        grid = Grid(header["n"], header["dealias_fraction"])
        params = PhysParams(**header["params"])
        fields = {}
        nbytes = 3 * grid.n**3 * 16
        for meta in header["fields"]:
            raw = fh.read(nbytes)
            coeffs = np.frombuffer(raw, dtype=complex).reshape(
                3, grid.n, grid.n, grid.n).copy()
            fields[meta["name"]] = SpectralField(
                grid, coeffs, div_free=meta["div_free"])
    return fields, header["time"], params, header.get("extra", {})


# ---------------------------------------------------------------------------
# Reference initial data
# ---------------------------------------------------------------------------

def trig_preset(grid: Grid, amplitude: float = 0.2):
    """Divergence-free single-mode trig pair used by the reference sweep."""
    X, Y, Z = grid.coordinates()
    u = np.stack([np.sin(Y), np.sin(Z), np.sin(X)]) * amplitude
    B = np.stack([np.sin(Z), np.sin(X), np.sin(Y)]) * amplitude
    u_f = leray_project(SpectralField.from_physical(grid, u))
    B_f = leray_project(SpectralField.from_physical(grid, B))
    u_f.coeffs *= grid.dealias_mask
    B_f.coeffs *= grid.dealias_mask
    return u_f, B_f


def random_div_free(grid: Grid, rng: np.random.Generator,
                    amplitude: float = 1.0, kmax: int = None) -> SpectralField:
    """Random smooth divergence-free field, band-limited to |k_i| <= kmax."""
    if kmax is None:
        kmax = grid.n // 4
    phys = np.zeros((3, grid.n, grid.n, grid.n))
    X, Y, Z = grid.coordinates()
    for _ in range(6):
        k = rng.integers(-kmax, kmax + 1, size=3)
        while not np.any(k):  # keep the field mean-free
            k = rng.integers(-kmax, kmax + 1, size=3)
        a = rng.normal(size=3)
        phase = rng.uniform(0, 2 * np.pi)
        phys += a[:, None, None, None] * np.cos(
            k[0] * X + k[1] * Y + k[2] * Z + phase)
    f = leray_project(SpectralField.from_physical(grid, phys))
    f.coeffs *= grid.dealias_mask
    amp = norm_linf(f)
    if amp > 0:
        f = f * (amplitude / amp)
    f.div_free = True
    return f
