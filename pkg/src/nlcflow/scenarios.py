"""Initial-data presets for simulations and decay studies.

All presets keep the director exactly on the unit sphere and band-limit every
field to low wavenumbers (|m_j| <= 4), well inside the dealiasing cutoff.
"""

from __future__ import annotations

import numpy as np

from .dynamics import PerturbationState
from .spectral import GridSpec, RealField, SpectralField, _integer_modes, forward_transform, inverse_transform
from .wholespace import RadialProfile

__all__ = ["SCENARIOS", "build_initial_state", "gaussian_profiles", "random_band_limited"]

SCENARIOS = ("gaussian-linear", "small-acoustic", "director-twist", "mixed-small")

W0 = np.array([0.0, 0.0, 1.0])
BAND_LIMIT = 4


def random_band_limited(grid: GridSpec, components: int, rng: np.random.Generator,
                        band: int = BAND_LIMIT) -> np.ndarray:
    """Random real field with modes confined to |m_j| <= band, unit sup norm.

    The band is clipped to the dealiasing cutoff so presets stay consistent
    with truncated products on coarse grids.
    """
    band = min(band, grid.points_per_axis // 3)
    raw = rng.standard_normal((components,) + grid.shape)
    F = forward_transform(RealField(grid, raw))
    keep = np.ones(grid.shape, dtype=bool)
    for m in _integer_modes(grid):
        keep &= np.abs(m) <= band
    modes = F.modes * keep
    modes[:, tuple(0 for _ in range(grid.dim))] = 0.0  # zero mean
    out = inverse_transform(SpectralField(grid, modes)).data
    peak = np.abs(out).max()
    return out / peak if peak > 0 else out


def _normalized_director(n_raw: np.ndarray, grid: GridSpec) -> np.ndarray:
    shape = (3,) + (1,) * grid.dim
    full = n_raw + W0.reshape(shape)
    mag = np.sqrt(np.sum(full * full, axis=0))
    return full / mag - W0.reshape(shape)


def build_initial_state(name: str, grid: GridSpec, amplitude: float = 1e-3,
                        seed: int = 0) -> PerturbationState:
    if name not in SCENARIOS:
        raise ValueError(f"unknown scenario {name!r}, choose from {SCENARIOS}")
    zeros = np.zeros((3,) + grid.shape)
    x = grid.meshgrid()[0]

    if name == "small-acoustic":
        rho = amplitude * np.cos(2.0 * np.pi * x / grid.period)
        return PerturbationState(grid, rho, zeros, zeros.copy(), w0=W0)

    if name == "director-twist":
        n_raw = zeros.copy()
        n_raw[0] = amplitude * np.sin(2.0 * np.pi * x / grid.period)
        n = _normalized_director(n_raw, grid)
        return PerturbationState(grid, np.zeros(grid.shape), zeros, n, w0=W0)

    if name == "mixed-small":
        rng = np.random.default_rng(seed)
        rho = amplitude * random_band_limited(grid, 1, rng)[0]
        u = amplitude * random_band_limited(grid, 3, rng)
        n = _normalized_director(amplitude * random_band_limited(grid, 3, rng), grid)
        return PerturbationState(grid, rho, u, n, w0=W0)

    # gaussian-linear is a decay-study preset; as a state it is simply empty
    return PerturbationState.zeros(grid, w0=W0)


def gaussian_profiles(width: float = 1.0) -> tuple:
    """The Gaussian profile set exciting every block of the linear system."""
    return (
        RadialProfile("gaussian", (width,), "density"),
        RadialProfile("gaussian", (width,), "potential_velocity"),
        RadialProfile("gaussian", (width,), "solenoidal_velocity"),
        RadialProfile("gaussian", (width,), "director"),
    )
