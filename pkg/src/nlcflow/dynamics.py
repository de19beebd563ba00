"""Perturbation-form state, coefficient functions and nonlinear sources.

The unknowns are the density deviation from 1, the velocity, and the director
deviation from a constant unit vector w0.  Vectors always carry 3 components,
also on 1D/2D grids (derivatives along missing axes vanish).  The stacked
spectral layout used across the package is

    component 0      density deviation
    components 1..3  velocity
    components 4..6  director deviation

Products are evaluated pointwise in physical space and the assembled source
spectra are truncated by the 2/3 rule; derivatives are always spectral.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .propagator import FluidParams
from .spectral import (
    GridSpec,
    RealField,
    SpectralField,
    _k_squared,
    _xi_components,
    dealias_mask,
    forward_transform,
    inverse_transform,
)

__all__ = [
    "PerturbationState",
    "CoefficientFields",
    "coefficients",
    "pressure_slope_bound",
    "source_S1",
    "source_S2",
    "source_S3",
    "full_tendency",
    "renormalize_director",
    "nonlinear_sources_hat",
]


class PerturbationState:
    """Deviation of (density, velocity, director) from the constant equilibrium."""

    __slots__ = ("grid", "rho", "velocity", "director", "w0", "time")

    def __init__(self, grid: GridSpec, rho, velocity, director, w0=(0.0, 0.0, 1.0),
                 time: float = 0.0, validate: bool = True):
        self.grid = grid
        self.rho = np.asarray(rho, dtype=np.float64).reshape(grid.shape)
        self.velocity = np.asarray(velocity, dtype=np.float64).reshape((3,) + grid.shape)
        self.director = np.asarray(director, dtype=np.float64).reshape((3,) + grid.shape)
        self.w0 = np.asarray(w0, dtype=np.float64).reshape(3)
        self.time = float(time)
        if validate:
            if not np.isclose(np.linalg.norm(self.w0), 1.0, atol=1e-12):
                raise ValueError(f"w0 must be a unit vector, |w0|={np.linalg.norm(self.w0)}")
            self._check_positive_density()

    def _check_positive_density(self):
        m = self.rho.min()
        if not np.isfinite(m) or m <= -1.0:
            idx = tuple(int(i) for i in
                        np.unravel_index(int(np.argmin(self.rho)), self.grid.shape))
            raise ValueError(
                f"density must stay positive: deviation {m} at grid index {idx}"
            )

    @classmethod
    def zeros(cls, grid: GridSpec, w0=(0.0, 0.0, 1.0)) -> "PerturbationState":
        return cls(grid, np.zeros(grid.shape), np.zeros((3,) + grid.shape),
                   np.zeros((3,) + grid.shape), w0=w0)

    @property
    def rho_pert(self) -> RealField:
        return RealField(self.grid, self.rho[np.newaxis])

    @property
    def velocity_field(self) -> RealField:
        return RealField(self.grid, self.velocity)

    @property
    def director_pert(self) -> RealField:
        return RealField(self.grid, self.director)

    def in_small_data_regime(self) -> bool:
        """True when 1/2 <= rho + 1 <= 3/2 everywhere."""
        return bool(self.rho.min() >= -0.5 and self.rho.max() <= 0.5)

    def director_drift(self) -> float:
        """max | |n + w0| - 1 | over the grid."""
        full = self.director + self.w0.reshape((3,) + (1,) * self.grid.dim)
        mag = np.sqrt(np.sum(full * full, axis=0))
        return float(np.abs(mag - 1.0).max())

    def to_spectral(self) -> SpectralField:
        stacked = np.concatenate(
            [self.rho[np.newaxis], self.velocity, self.director], axis=0
        )
        return forward_transform(RealField(self.grid, stacked))

    @classmethod
    def from_spectral(cls, U: SpectralField, w0, time: float = 0.0,
                      validate: bool = False) -> "PerturbationState":
        if U.components != 7:
            raise ValueError(f"expected 7 components, got {U.components}")
        phys = inverse_transform(U).data
        return cls(U.grid, phys[0], phys[1:4], phys[4:7], w0=w0, time=time,
                   validate=validate)

    def copy(self) -> "PerturbationState":
        return PerturbationState(self.grid, self.rho.copy(), self.velocity.copy(),
                                 self.director.copy(), w0=self.w0.copy(),
                                 time=self.time, validate=False)


@dataclass(frozen=True)
class CoefficientFields:
    """Pointwise coefficient functions of the density deviation."""

    h_field: RealField
    f_field: RealField
    g_field: RealField


def _coefficient_arrays(rho: np.ndarray, params: FluidParams):
    one_plus = 1.0 + rho
    h = rho / one_plus
    g = 1.0 / one_plus
    if params.pressure_law == "linear":
        f = -h
    else:
        f = one_plus ** (params.gamma_exponent - 2.0) - 1.0
    return h, f, g


def coefficients(rho_pert: RealField, params: FluidParams) -> CoefficientFields:
    """h = rho/(rho+1), f = P'(rho+1)/(rho+1) - 1, g = 1/(rho+1), pointwise."""
    rho = rho_pert.data[0]
    m = rho.min()
    if not np.isfinite(m) or m <= -1.0:
        idx = tuple(int(i) for i in np.unravel_index(int(np.argmin(rho)), rho.shape))
        raise ValueError(f"nonpositive density: deviation {m} at grid index {idx}")
    h, f, g = _coefficient_arrays(rho, params)
    grid = rho_pert.grid
    return CoefficientFields(
        h_field=RealField(grid, h[np.newaxis]),
        f_field=RealField(grid, f[np.newaxis]),
        g_field=RealField(grid, g[np.newaxis]),
    )


def pressure_slope_bound(params: FluidParams, regime_radius: float = 0.5) -> float:
    """sup |f(rho)/rho| over |rho| <= regime_radius (the pointwise-bound constant)."""
    r = np.linspace(-regime_radius, regime_radius, 20001)
    r = r[np.abs(r) > 1e-12]
    _, f, _ = _coefficient_arrays(r, params)
    return float(np.abs(f / r).max())


# ---------------------------------------------------------------------------
# Nonlinear sources.  One spectral implementation shared by the public
# wrappers and the time integrator.
# ---------------------------------------------------------------------------


def _physical_work(grid: GridSpec, modes: np.ndarray):
    """Invert the stacked state and its needed derivatives to physical space.

    Returns a dict of real arrays: rho, u (3), n (3), div_u, grad_rho (3),
    lap_u (3), grad_div_u (3), grad_u (3,3) as du[i][j] = d_i u_j,
    grad_n (3,3), lap_n (3).  Entries along missing grid axes are zero.
    """
    dim = grid.dim
    xi = _xi_components(grid)
    k2 = _k_squared(grid)
    axes = tuple(range(1, dim + 1))
    scale = grid.cell_volume

    rho_h = modes[0]
    u_h = modes[1:4]
    n_h = modes[4:7]

    div_u_h = sum(1j * xi[a] * u_h[a] for a in range(dim))

    nspec = 1 + 3 + 3 + 1 + dim + 3 + dim + 3 * dim + 3 * dim + 3
    work = np.empty((nspec,) + grid.shape, dtype=np.complex128)
    i = 0

    def put(arr):
        nonlocal i
        work[i] = arr
        i += 1
        return i - 1

    idx_rho = put(rho_h)
    idx_u = [put(u_h[j]) for j in range(3)]
    idx_n = [put(n_h[j]) for j in range(3)]
    idx_div = put(div_u_h)
    idx_grad_rho = [put(1j * xi[a] * rho_h) for a in range(dim)]
    idx_lap_u = [put(-k2 * u_h[j]) for j in range(3)]
    idx_gdiv = [put(1j * xi[a] * div_u_h) for a in range(dim)]
    idx_grad_u = [[put(1j * xi[a] * u_h[j]) for j in range(3)] for a in range(dim)]
    idx_grad_n = [[put(1j * xi[a] * n_h[j]) for j in range(3)] for a in range(dim)]
    idx_lap_n = [put(-k2 * n_h[j]) for j in range(3)]

    phys = np.fft.ifftn(work / scale, axes=axes).real

    zeros = np.zeros(grid.shape)
    out = {
        "rho": phys[idx_rho],
        "u": [phys[j] for j in idx_u],
        "n": [phys[j] for j in idx_n],
        "div_u": phys[idx_div],
        "grad_rho": [phys[idx_grad_rho[a]] if a < dim else zeros for a in range(3)],
        "lap_u": [phys[j] for j in idx_lap_u],
        "grad_div_u": [phys[idx_gdiv[a]] if a < dim else zeros for a in range(3)],
        "grad_u": [[phys[idx_grad_u[a][j]] if a < dim else zeros for j in range(3)]
                   for a in range(3)],
        "grad_n": [[phys[idx_grad_n[a][j]] if a < dim else zeros for j in range(3)]
                   for a in range(3)],
        "lap_n": [phys[j] for j in idx_lap_n],
    }
    return out


def _sources_physical(grid: GridSpec, params: FluidParams, w0: np.ndarray,
                      modes: np.ndarray) -> np.ndarray:
    """All seven source components evaluated pointwise (not yet dealiased)."""
    w = _physical_work(grid, modes)
    rho, u, n = w["rho"], w["u"], w["n"]
    h, f, g = _coefficient_arrays(rho, params)
    mu, mn = params.mu, params.mu + params.nu

    out = np.empty((7,) + grid.shape)

    # density source: -rho div u - u . grad rho
    s1 = -rho * w["div_u"]
    for a in range(3):
        s1 -= u[a] * w["grad_rho"][a]
    out[0] = s1

    # velocity source
    grad_n, lap_n = w["grad_n"], w["lap_n"]
    for j in range(3):
        adv = u[0] * w["grad_u"][0][j] + u[1] * w["grad_u"][1][j] + u[2] * w["grad_u"][2][j]
        visc = h * (mu * w["lap_u"][j] + mn * w["grad_div_u"][j])
        elastic = grad_n[j][0] * lap_n[0] + grad_n[j][1] * lap_n[1] + grad_n[j][2] * lap_n[2]
        out[1 + j] = -adv - visc - f * w["grad_rho"][j] - g * elastic

    # director source
    gn2 = np.zeros(grid.shape)
    for a in range(3):
        for j in range(3):
            gn2 += grad_n[a][j] * grad_n[a][j]
    for j in range(3):
        adv = u[0] * grad_n[0][j] + u[1] * grad_n[1][j] + u[2] * grad_n[2][j]
        out[4 + j] = -adv + gn2 * (n[j] + w0[j])
    return out


def nonlinear_sources_hat(grid: GridSpec, params: FluidParams, w0: np.ndarray,
                          modes: np.ndarray) -> np.ndarray:
    """Dealiased spectra of the three nonlinear sources, stacked like the state."""
    phys = _sources_physical(grid, params, w0, modes)
    axes = tuple(range(1, grid.dim + 1))
    hat = np.fft.fftn(phys, axes=axes) * grid.cell_volume
    hat *= dealias_mask(grid)
    return hat


def _state_sources_hat(state: PerturbationState, params: FluidParams) -> np.ndarray:
    return nonlinear_sources_hat(state.grid, params, state.w0,
                                 state.to_spectral().modes)


def _hat_to_real(grid: GridSpec, hat: np.ndarray) -> RealField:
    return inverse_transform(SpectralField(grid, hat))


def source_S1(state: PerturbationState, params: FluidParams | None = None) -> RealField:
    """Mass-equation source (dealiased)."""
    params = params or FluidParams(mu=1.0, nu=0.0)
    hat = _state_sources_hat(state, params)
    return _hat_to_real(state.grid, hat[0:1])


def source_S2(state: PerturbationState, params: FluidParams) -> RealField:
    """Momentum-equation source (dealiased, 3 components)."""
    hat = _state_sources_hat(state, params)
    return _hat_to_real(state.grid, hat[1:4])


def source_S3(state: PerturbationState, params: FluidParams | None = None) -> RealField:
    """Director-equation source (dealiased, 3 components)."""
    params = params or FluidParams(mu=1.0, nu=0.0)
    hat = _state_sources_hat(state, params)
    return _hat_to_real(state.grid, hat[4:7])


def full_tendency(state: PerturbationState, params: FluidParams,
                  include_sources: bool = True):
    """(d rho/dt, d u/dt, d n/dt) of the perturbation system as real fields."""
    from .propagator import linear_rhs

    U = state.to_spectral()
    rhs = linear_rhs(U, params).modes
    if include_sources:
        rhs = rhs + nonlinear_sources_hat(state.grid, params, state.w0, U.modes)
    grid = state.grid
    return (
        _hat_to_real(grid, rhs[0:1]),
        _hat_to_real(grid, rhs[1:4]),
        _hat_to_real(grid, rhs[4:7]),
    )


def renormalize_director(state: PerturbationState):
    """Project the director back to unit length.

    Returns (new_state, drift) where drift is the max pre-normalization
    deviation of |n + w0| from 1.
    """
    shape = (3,) + (1,) * state.grid.dim
    full = state.director + state.w0.reshape(shape)
    mag = np.sqrt(np.sum(full * full, axis=0))
    if mag.min() <= 0.0:
        idx = np.unravel_index(int(np.argmin(mag)), state.grid.shape)
        raise ValueError(f"director vanishes at grid index {idx}; cannot normalize")
    drift = float(np.abs(mag - 1.0).max())
    director = full / mag - state.w0.reshape(shape)
    new = PerturbationState(state.grid, state.rho.copy(), state.velocity.copy(),
                            director, w0=state.w0.copy(), time=state.time,
                            validate=False)
    return new, drift
