"""Periodic grids, discrete Fourier transforms and spectral operators.

Conventions used throughout the package:

* The box is ``[0, L)^dim`` sampled on ``N`` uniform points per axis.
* Forward transform:  ``F(m) = (L/N)^dim * sum_x f(x) exp(-i xi.x)`` with
  ``xi = 2*pi*m/L``, so that Parseval reads
  ``||f||_L2^2 = L^-dim * sum_m |F(m)|^2``.
* Derivative wavenumbers zero the Nyquist mode (``m = -N/2``) on every axis,
  which keeps odd-order derivatives of real fields exactly real.  Fields are
  expected to live below the dealiasing cutoff anyway (see
  :func:`dealias_mask`).
* The 2/3-rule dealiasing zeroes every mode with any ``|m_j| > N/3``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "GridSpec",
    "RealField",
    "SpectralField",
    "WaveVector",
    "forward_transform",
    "inverse_transform",
    "fractional_derivative",
    "gradient",
    "divergence",
    "laplacian",
    "sobolev_norm",
    "lp_norm",
    "dealias_mask",
    "dealias",
    "dealiased_product",
    "is_conjugate_symmetric",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on ``[0, period)^dim``."""

    dim: int
    points_per_axis: int
    period: float = 2.0 * np.pi

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if self.points_per_axis <= 0 or self.points_per_axis % 2 != 0:
            raise ValueError(
                f"points_per_axis must be a positive even integer, got {self.points_per_axis}"
            )
        if not (self.period > 0.0 and np.isfinite(self.period)):
            raise ValueError(f"period must be positive and finite, got {self.period}")

    @property
    def shape(self) -> tuple:
        return (self.points_per_axis,) * self.dim

    @property
    def total_points(self) -> int:
        return self.points_per_axis**self.dim

    @property
    def spacing(self) -> float:
        return self.period / self.points_per_axis

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    def axis_coordinates(self) -> np.ndarray:
        """Sample points along one axis."""
        return np.arange(self.points_per_axis) * self.spacing

    def meshgrid(self) -> list:
        """Physical coordinates, one array of grid shape per axis."""
        x = self.axis_coordinates()
        return list(np.meshgrid(*([x] * self.dim), indexing="ij"))


@lru_cache(maxsize=64)
def _integer_modes(grid: GridSpec) -> tuple:
    """Integer wavevector components m_j, each shaped like the grid."""
    n = grid.points_per_axis
    m1d = np.fft.fftfreq(n, d=1.0 / n)  # 0, 1, ..., -1 as floats
    comps = np.meshgrid(*([m1d] * grid.dim), indexing="ij")
    for c in comps:
        c.flags.writeable = False
    return tuple(comps)


@lru_cache(maxsize=64)
def _xi_components(grid: GridSpec) -> tuple:
    """Physical derivative wavenumbers 2*pi*m/L with the Nyquist mode zeroed."""
    n = grid.points_per_axis
    scale = 2.0 * np.pi / grid.period
    comps = []
    for m in _integer_modes(grid):
        xi = scale * m.copy()
        xi[m == -n // 2] = 0.0
        xi.flags.writeable = False
        comps.append(xi)
    return tuple(comps)


@lru_cache(maxsize=64)
def _k_squared(grid: GridSpec) -> np.ndarray:
    k2 = np.zeros(grid.shape)
    for xi in _xi_components(grid):
        k2 += xi * xi
    k2.flags.writeable = False
    return k2


@lru_cache(maxsize=64)
def dealias_mask(grid: GridSpec) -> np.ndarray:
    """Boolean mask keeping modes with |m_j| <= N/3 on every axis."""
    cutoff = grid.points_per_axis / 3.0
    keep = np.ones(grid.shape, dtype=bool)
    for m in _integer_modes(grid):
        keep &= np.abs(m) <= cutoff
    keep.flags.writeable = False
    return keep


@dataclass(frozen=True)
class WaveVector:
    """One Fourier mode: integer index, physical wavevector (padded to 3 components)."""

    m: tuple
    xi: np.ndarray
    k2: float

    @classmethod
    def from_index(cls, grid: GridSpec, m) -> "WaveVector":
        m = tuple(int(v) for v in np.atleast_1d(m))
        if len(m) != grid.dim:
            raise ValueError(f"index has {len(m)} components, grid is {grid.dim}-dimensional")
        n = grid.points_per_axis
        scale = 2.0 * np.pi / grid.period
        xi = np.zeros(3)
        for j, mj in enumerate(m):
            xi[j] = 0.0 if mj == -n // 2 else scale * mj
        return cls(m=m, xi=xi, k2=float(xi @ xi))


class RealField:
    """A ``c``-component real field sampled on a periodic grid.

    Data layout is ``(components, *grid.shape)`` float64.
    """

    __slots__ = ("grid", "data")

    def __init__(self, grid: GridSpec, data: np.ndarray):
        data = np.asarray(data, dtype=np.float64)
        if data.ndim == grid.dim:
            data = data[np.newaxis]
        if data.shape[1:] != grid.shape:
            raise ValueError(f"data shape {data.shape} does not match grid shape {grid.shape}")
        self.grid = grid
        self.data = data

    @classmethod
    def zeros(cls, grid: GridSpec, components: int = 1) -> "RealField":
        return cls(grid, np.zeros((components,) + grid.shape))

    @classmethod
    def from_function(cls, grid: GridSpec, *funcs) -> "RealField":
        """Sample scalar callables ``f(*coords)``, one per component."""
        coords = grid.meshgrid()
        return cls(grid, np.stack([np.asarray(f(*coords), dtype=np.float64) for f in funcs]))

    @property
    def components(self) -> int:
        return self.data.shape[0]

    def copy(self) -> "RealField":
        return RealField(self.grid, self.data.copy())

    def __add__(self, other: "RealField") -> "RealField":
        return RealField(self.grid, self.data + other.data)

    def __sub__(self, other: "RealField") -> "RealField":
        return RealField(self.grid, self.data - other.data)

    def __mul__(self, scalar: float) -> "RealField":
        return RealField(self.grid, self.data * scalar)

    __rmul__ = __mul__


class SpectralField:
    """Fourier coefficients of a :class:`RealField` (full complex layout)."""

    __slots__ = ("grid", "modes")

    def __init__(self, grid: GridSpec, modes: np.ndarray):
        modes = np.asarray(modes, dtype=np.complex128)
        if modes.ndim == grid.dim:
            modes = modes[np.newaxis]
        if modes.shape[1:] != grid.shape:
            raise ValueError(f"modes shape {modes.shape} does not match grid shape {grid.shape}")
        self.grid = grid
        self.modes = modes

    @classmethod
    def zeros(cls, grid: GridSpec, components: int = 1) -> "SpectralField":
        return cls(grid, np.zeros((components,) + grid.shape, dtype=np.complex128))

    @property
    def components(self) -> int:
        return self.modes.shape[0]

    def copy(self) -> "SpectralField":
        return SpectralField(self.grid, self.modes.copy())


def _spatial_axes(grid: GridSpec) -> tuple:
    return tuple(range(1, grid.dim + 1))


def forward_transform(f: RealField) -> SpectralField:
    """Discrete Fourier transform with the (L/N)^dim normalization."""
    if not np.all(np.isfinite(f.data)):
        raise ValueError("cannot transform a field with non-finite samples")
    scale = f.grid.cell_volume
    modes = np.fft.fftn(f.data, axes=_spatial_axes(f.grid)) * scale
    return SpectralField(f.grid, modes)


def inverse_transform(F: SpectralField) -> RealField:
    """Inverse transform; the imaginary residue of conjugate-symmetric data is dropped."""
    scale = F.grid.cell_volume
    data = np.fft.ifftn(F.modes / scale, axes=_spatial_axes(F.grid))
    return RealField(F.grid, data.real)


def fractional_derivative(F: SpectralField, s: float) -> SpectralField:
    """Multiply every mode by |xi|^s (s = 0 is the identity; the zero mode dies for s > 0)."""
    if not np.isfinite(s) or s < 0:
        raise ValueError(f"fractional order must be finite and >= 0, got {s}")
    if s == 0:
        return F.copy()
    k2 = _k_squared(F.grid)
    return SpectralField(F.grid, F.modes * k2 ** (s / 2.0))


def gradient(F: SpectralField) -> SpectralField:
    """Spectral gradient; output component ``c*dim + a`` is d(f_c)/dx_a."""
    xi = _xi_components(F.grid)
    out = np.empty((F.components * F.grid.dim,) + F.grid.shape, dtype=np.complex128)
    for c in range(F.components):
        for a in range(F.grid.dim):
            out[c * F.grid.dim + a] = 1j * xi[a] * F.modes[c]
    return SpectralField(F.grid, out)


def divergence(F: SpectralField) -> SpectralField:
    """Divergence of a vector field; components beyond the grid dimension are ignored
    (their derivatives along the missing axes vanish)."""
    if F.components < F.grid.dim:
        raise ValueError("divergence needs at least one component per grid axis")
    xi = _xi_components(F.grid)
    out = np.zeros((1,) + F.grid.shape, dtype=np.complex128)
    for a in range(F.grid.dim):
        out[0] += 1j * xi[a] * F.modes[a]
    return SpectralField(F.grid, out)


def laplacian(F: SpectralField) -> SpectralField:
    return SpectralField(F.grid, -_k_squared(F.grid) * F.modes)


def sobolev_norm(F: SpectralField, k: float, order: str = "homogeneous",
                 upper: int | None = None) -> float:
    """Sobolev norm via Parseval.

    ``order="homogeneous"`` gives ``||grad^k f||_L2``; ``order="inhomogeneous"``
    gives ``(sum_{j=k..upper} ||grad^j f||_L2^2)^(1/2)`` and requires ``upper``.
    Derivatives are the isotropic |xi|^k multipliers, which for integer k agree
    with the full derivative-tensor L2 norms.
    """
    if k < 0:
        raise ValueError(f"derivative order must be >= 0, got {k}")
    k2 = _k_squared(F.grid)
    power = np.abs(F.modes) ** 2
    if order == "homogeneous":
        weight = k2**k
    elif order == "inhomogeneous":
        if upper is None:
            raise ValueError("inhomogeneous norm needs the upper index")
        if upper < k:
            raise ValueError(f"upper index {upper} below base order {k}")
        weight = np.zeros_like(k2)
        for j in np.arange(k, upper + 1):
            weight += k2**j
    else:
        raise ValueError(f"unknown order {order!r}")
    total = float(np.sum(weight * power)) / F.grid.period**F.grid.dim
    return np.sqrt(max(total, 0.0))


def lp_norm(f: RealField, p: float) -> float:
    """L^p norm of the pointwise Euclidean magnitude, rectangle rule on the grid."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    mag = np.sqrt(np.sum(f.data * f.data, axis=0))
    if np.isinf(p):
        return float(mag.max())
    return float((np.sum(mag**p) * f.grid.cell_volume) ** (1.0 / p))


def dealias(F: SpectralField) -> SpectralField:
    return SpectralField(F.grid, F.modes * dealias_mask(F.grid))


def dealiased_product(F: SpectralField, G: SpectralField) -> SpectralField:
    """Pointwise physical-space product with the 2/3-rule truncation.

    Component counts must match, or one factor must be scalar (it then
    multiplies every component of the other).
    """
    if F.grid != G.grid:
        raise ValueError("dealiased_product requires fields on the same grid")
    f = inverse_transform(F).data
    g = inverse_transform(G).data
    if f.shape[0] == g.shape[0]:
        prod = f * g
    elif f.shape[0] == 1:
        prod = f[0] * g
    elif g.shape[0] == 1:
        prod = f * g[0]
    else:
        raise ValueError(f"component mismatch: {f.shape[0]} vs {g.shape[0]}")
    P = forward_transform(RealField(F.grid, prod))
    return dealias(P)


def is_conjugate_symmetric(F: SpectralField, tol: float = 0.0) -> bool:
    """Check F(-m) == conj(F(m)) on all axes (exactly by default)."""
    flipped = F.modes.copy()
    for ax in _spatial_axes(F.grid):
        flipped = np.flip(np.roll(flipped, -1, axis=ax), axis=ax)
    if tol == 0.0:
        return bool(np.array_equal(flipped, np.conj(F.modes)))
    scale = np.abs(F.modes).max()
    return bool(np.abs(flipped - np.conj(F.modes)).max() <= tol * max(scale, 1.0))
