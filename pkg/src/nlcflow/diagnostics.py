"""Measurable quantities: norm tables, energy functionals, inequality checks
and decay-exponent fitting.

Derivative orders are isotropic spectral multipliers |xi|^k throughout, which
for L2 norms coincide with the full derivative tensors.  Ratio checkers treat
the generic constants of the underlying estimates as empirical: they record
values, scaling behavior is asserted by the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import PerturbationState, _coefficient_arrays, full_tendency
from .propagator import FluidParams
from .spectral import (
    RealField,
    SpectralField,
    _k_squared,
    _xi_components,
    forward_transform,
    fractional_derivative,
    inverse_transform,
    lp_norm,
    sobolev_norm,
)

__all__ = [
    "DEFAULT_ETA",
    "NormReport",
    "EnergyFunctional",
    "DecayFit",
    "norm_report",
    "time_derivative_norms",
    "energy_functional_F",
    "energy_functional_E",
    "velocity_density_cross_term",
    "fourier_split_slack",
    "gn_ratio",
    "solve_gn_exponent",
    "composite_bound_ratio",
    "decay_fit",
    "simulation_record",
    "director_dissipation_excess",
]

# default coupling of the velocity-density cross term; any value <= 1/8 keeps
# the functional within a factor [1/2, 3/2] of the plain squared-norm sum
DEFAULT_ETA = 0.125


@dataclass
class NormReport:
    time: float
    entries: dict
    norm_order: int

    def __getitem__(self, key: str) -> float:
        return self.entries[key]


def _component_norms(U: SpectralField, sl: slice) -> SpectralField:
    return SpectralField(U.grid, U.modes[sl])


def norm_report(state: PerturbationState, N: int = 3) -> NormReport:
    """Sobolev/Lp norm table of one state.

    N >= 3 is the standing convention; smaller values are accepted (the table
    just shrinks).
    """
    if N < 1:
        raise ValueError(f"norm order must be >= 1, got {N}")
    U = state.to_spectral()
    rho = _component_norms(U, slice(0, 1))
    u = _component_norms(U, slice(1, 4))
    n = _component_norms(U, slice(4, 7))

    entries: dict = {}
    for name, F in (("rho", rho), ("u", u)):
        for k in range(N):
            entries[f"{name}_grad{k}_HN"] = sobolev_norm(F, k, "inhomogeneous", upper=N)
        for k in range(N + 1):
            entries[f"{name}_grad{k}_L2"] = sobolev_norm(F, k, "homogeneous")
    for l in range(N + 2):
        entries[f"n_grad{l}_L2"] = sobolev_norm(n, l, "homogeneous")

    fields = {
        "rho": state.rho_pert,
        "u": state.velocity_field,
        "n": state.director_pert,
    }
    for name, f in fields.items():
        entries[f"{name}_L2"] = lp_norm(f, 2)
        entries[f"{name}_L6"] = lp_norm(f, 6)
        entries[f"{name}_Linf"] = lp_norm(f, np.inf)
    return NormReport(time=state.time, entries=entries, norm_order=N)


def time_derivative_norms(state: PerturbationState, params: FluidParams,
                          N: int = 3, include_sources: bool = True) -> dict:
    """Norms of the time derivatives computed from the evolution equations."""
    drho, du, dn = full_tendency(state, params, include_sources=include_sources)
    rho_t = forward_transform(drho)
    u_t = forward_transform(du)
    n_t = forward_transform(dn)
    entries: dict = {}
    for k in range(N - 1):
        entries[f"rho_t_grad{k}_HN1"] = sobolev_norm(rho_t, k, "inhomogeneous", upper=N - 1)
        entries[f"u_t_grad{k}_L2"] = sobolev_norm(u_t, k, "homogeneous")
    for l in range(N):
        entries[f"n_t_grad{l}_L2"] = sobolev_norm(n_t, l, "homogeneous")
    return entries


# ---------------------------------------------------------------------------
# Energy functionals
# ---------------------------------------------------------------------------


@dataclass
class EnergyFunctional:
    m: int
    l: int
    eta: float
    value: float
    norm_sum: float
    cross: float

    def equivalence_ok(self) -> bool:
        """For eta <= 1/8 the value must sit within [1/2, 3/2] of the norm sum."""
        return abs(self.value - self.norm_sum) <= 0.5 * self.norm_sum + 1e-300


def velocity_density_cross_term(state: PerturbationState, k: int) -> float:
    """int grad^k u . grad^k (grad rho) dx, evaluated spectrally."""
    U = state.to_spectral()
    grid = state.grid
    xi = list(_xi_components(grid))
    while len(xi) < 3:
        xi.append(np.zeros(grid.shape))
    k2 = _k_squared(grid)
    rho = U.modes[0]
    v = xi[0] * U.modes[1] + xi[1] * U.modes[2] + xi[2] * U.modes[3]
    total = np.sum(k2**k * np.imag(v * np.conj(rho)))
    return float(total) / grid.period**grid.dim


def _check_energy_indices(m: int, l: int, eta: float):
    if not (0 <= l <= m - 1):
        raise ValueError(f"energy functional needs 0 <= l <= m-1, got l={l}, m={m}")
    if not (eta > 0):
        raise ValueError(f"coupling eta must be positive, got {eta}")


def energy_functional_F(state: PerturbationState, m: int, l: int,
                        eta: float = DEFAULT_ETA) -> EnergyFunctional:
    """Squared-norm functional with density/velocity at orders l..m, director
    at orders l..m+1, plus the coupled cross term."""
    _check_energy_indices(m, l, eta)
    U = state.to_spectral()
    rho = _component_norms(U, slice(0, 1))
    u = _component_norms(U, slice(1, 4))
    n = _component_norms(U, slice(4, 7))
    S = (sobolev_norm(rho, l, "inhomogeneous", upper=m) ** 2
         + sobolev_norm(u, l, "inhomogeneous", upper=m) ** 2
         + sobolev_norm(n, l, "inhomogeneous", upper=m + 1) ** 2)
    cross = sum(velocity_density_cross_term(state, k) for k in range(l, m))
    return EnergyFunctional(m=m, l=l, eta=eta, value=S + eta * cross,
                            norm_sum=S, cross=cross)


def energy_functional_E(state: PerturbationState, m: int, l: int,
                        eta: float = DEFAULT_ETA) -> EnergyFunctional:
    """Variant with the director entering through its gradient at orders l..m."""
    _check_energy_indices(m, l, eta)
    U = state.to_spectral()
    rho = _component_norms(U, slice(0, 1))
    u = _component_norms(U, slice(1, 4))
    n = _component_norms(U, slice(4, 7))
    S = (sobolev_norm(rho, l, "inhomogeneous", upper=m) ** 2
         + sobolev_norm(u, l, "inhomogeneous", upper=m) ** 2
         + sobolev_norm(n, l + 1, "inhomogeneous", upper=m + 1) ** 2)
    cross = sum(velocity_density_cross_term(state, k) for k in range(l, m))
    return EnergyFunctional(m=m, l=l, eta=eta, value=S + eta * cross,
                            norm_sum=S, cross=cross)


# ---------------------------------------------------------------------------
# Inequality checkers
# ---------------------------------------------------------------------------


def fourier_split_slack(F: SpectralField, k: int, R: float, t: float) -> float:
    """Slack of the frequency-splitting inequality.

    slack = ||grad^{k+2} f||^2 - [R/(1+t)] ||grad^{k+1} f||^2
            + [R/(1+t)]^2 ||grad^k f||^2

    which is a sum of pointwise values |xi|^{2k} (|xi|^4 - r|xi|^2 + r^2) >= 0,
    so the result is nonnegative up to roundoff.
    """
    if k < 0:
        raise ValueError(f"derivative order must be >= 0, got {k}")
    if R <= 0 or t < 0:
        raise ValueError(f"need R > 0 and t >= 0, got R={R}, t={t}")
    r = R / (1.0 + t)
    a2 = sobolev_norm(F, k + 2, "homogeneous") ** 2
    a1 = sobolev_norm(F, k + 1, "homogeneous") ** 2
    a0 = sobolev_norm(F, k, "homogeneous") ** 2
    return a2 - r * a1 + r * r * a0


def solve_gn_exponent(alpha: float, p: float, m: float, l: float) -> float:
    """Interpolation weight from the dimensional balance
    1/p - alpha/3 = (1/2 - m/3)(1 - theta) + (1/2 - l/3) theta."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if min(alpha, m, l) < 0:
        raise ValueError("derivative orders must be >= 0")
    inv_p = 0.0 if np.isinf(p) else 1.0 / p
    if m == l:
        if abs(inv_p - alpha / 3.0 - (0.5 - m / 3.0)) > 1e-12:
            raise ValueError(
                f"inadmissible exponents: m == l = {m} but the balance relation fails")
        return 0.0
    theta = (3.0 * inv_p - alpha - 1.5 + m) / (m - l)
    if not (-1e-12 <= theta <= 1.0 + 1e-12):
        raise ValueError(
            f"inadmissible exponent combination: solved theta = {theta}, outside [0, 1]")
    return float(min(max(theta, 0.0), 1.0))


def gn_ratio(f: RealField, alpha: float, p: float, m: float, l: float) -> float:
    """||grad^alpha f||_Lp / (||grad^m f||_L2^(1-theta) ||grad^l f||_L2^theta)."""
    theta = solve_gn_exponent(alpha, p, m, l)
    F = forward_transform(f)
    lhs = lp_norm(inverse_transform(fractional_derivative(F, alpha)), p)
    nm = sobolev_norm(F, m, "homogeneous")
    nl = sobolev_norm(F, l, "homogeneous")
    rhs = nm ** (1.0 - theta) * nl**theta
    if rhs == 0.0:
        raise ValueError("interpolation denominator vanishes; field must be nonzero")
    return lhs / rhs


def composite_bound_ratio(rho_pert: RealField, m: int, params: FluidParams | None = None) -> dict:
    """sup-norm ratio ||grad^m G(rho)||_inf / ||grad^m rho||_inf for the three
    coefficient functions.  The 0/0 case is defined as 0."""
    if m < 1:
        raise ValueError(f"derivative order must be >= 1, got {m}")
    params = params or FluidParams(mu=1.0, nu=0.0)
    rho = rho_pert.data[0]
    sup = np.abs(rho).max()
    if sup > 1.0:
        raise ValueError(f"hypothesis violated: sup|rho| = {sup} > 1")
    grid = rho_pert.grid
    den = lp_norm(inverse_transform(fractional_derivative(forward_transform(rho_pert), m)),
                  np.inf)
    h, f, g = _coefficient_arrays(rho, params)
    out = {}
    for name, arr in (("h", h), ("f", f), ("g", g)):
        F = forward_transform(RealField(grid, arr[np.newaxis]))
        num = lp_norm(inverse_transform(fractional_derivative(F, m)), np.inf)
        out[name] = 0.0 if (num == 0.0 and den == 0.0) else (
            np.inf if den == 0.0 else num / den)
    return out


# ---------------------------------------------------------------------------
# Decay fitting
# ---------------------------------------------------------------------------


@dataclass
class DecayFit:
    label: str
    window: tuple
    exponent: float
    r_squared: float


def decay_fit(times, values, window=None, label: str = "") -> DecayFit:
    """Least-squares slope of log(value) against log(1+t) inside the window."""
    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if window is None:
        window = (float(times.min()), float(times.max()))
    t1, t2 = window
    if not t1 < t2:
        raise ValueError(f"empty fit window {window}")
    sel = (times >= t1) & (times <= t2)
    if int(sel.sum()) < 8:
        raise ValueError(f"need at least 8 samples in the window, got {int(sel.sum())}")
    v = values[sel]
    if np.any(v <= 0.0):
        raise ValueError("decay fit requires strictly positive values")
    x = np.log(1.0 + times[sel])
    y = np.log(v)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return DecayFit(label=label, window=(float(t1), float(t2)),
                    exponent=float(slope), r_squared=r2)


# ---------------------------------------------------------------------------
# Per-snapshot record used by the time integrator
# ---------------------------------------------------------------------------


def simulation_record(state: PerturbationState, params: FluidParams, N: int = 3,
                      eta: float = DEFAULT_ETA,
                      include_time_derivatives: bool = False) -> dict:
    """One diagnostics row: the norm table plus conserved/monitored scalars."""
    rep = norm_report(state, N)
    rec = dict(rep.entries)
    rec["mass_mode0"] = float(np.sum(state.rho) * state.grid.cell_volume)
    rec["director_drift"] = state.director_drift()
    rec["energy_F_N1"] = energy_functional_F(state, N, 1, eta).value
    if include_time_derivatives:
        rec.update(time_derivative_norms(state, params, N))
    return rec


def director_dissipation_excess(times, nk_sq, nk1_sq, uk1_sq, coeff: float = 0.1):
    """Forward-difference excess of the director dissipation estimate:

        [ ||grad^k n||^2(t+dt) - ||grad^k n||^2(t) ] / dt
            + ||grad^{k+1} n||^2(t) - coeff * ||grad^{k+1} u||^2(t)

    evaluated on consecutive records; nonpositive values mean the estimate
    holds with the recorded coefficient.
    """
    times = np.asarray(times)
    nk_sq = np.asarray(nk_sq)
    dt = np.diff(times)
    fwd = np.diff(nk_sq) / dt
    return fwd + np.asarray(nk1_sq)[:-1] - coeff * np.asarray(uk1_sq)[:-1]
