"""Seeded property suites behind the ``check`` mode: every structural
inequality the model provides, evaluated on random ensembles and reported as
machine-readable pass/fail records."""

from __future__ import annotations

import numpy as np

from .diagnostics import (
    DEFAULT_ETA,
    energy_functional_F,
    gn_ratio,
    solve_gn_exponent,
)
from .dynamics import PerturbationState, _coefficient_arrays, pressure_slope_bound
from .propagator import FluidParams
from .scenarios import random_band_limited
from .spectral import GridSpec, RealField, _k_squared, forward_transform

__all__ = [
    "split_slack_minimum",
    "moment_sums",
    "inequality_suite",
    "default_rt_pairs",
]


def default_rt_pairs() -> list:
    return [(R, t) for R in (0.5, 2.0, 8.0, 32.0, 128.0) for t in (0.0, 9.0)]


def moment_sums(F_modes: np.ndarray, grid: GridSpec, k_max: int) -> np.ndarray:
    """Squared homogeneous norms ||grad^j f||^2 for j = 0..k_max, via Parseval."""
    k2 = _k_squared(grid)
    power = np.sum(np.abs(F_modes) ** 2, axis=0)
    out = np.empty(k_max + 1)
    weight = np.ones_like(k2)
    vol = grid.period**grid.dim
    for j in range(k_max + 1):
        out[j] = float(np.sum(weight * power)) / vol
        weight = weight * k2
    return out


def split_slack_minimum(grid: GridSpec, seed: int, n_fields: int,
                        k_list=(0, 1, 2, 3, 4), rt_pairs=None) -> float:
    """Minimum of the splitting slack normalized by ||f||_{H^{k+2}}^2."""
    rt_pairs = rt_pairs or default_rt_pairs()
    rng = np.random.default_rng(seed)
    k_top = max(k_list) + 2
    worst = np.inf
    for _ in range(n_fields):
        data = random_band_limited(grid, 1, rng)
        F = forward_transform(RealField(grid, data))
        mom = moment_sums(F.modes, grid, k_top)
        for k in k_list:
            scale = mom[: k + 3].sum()  # ||f||_{H^{k+2}}^2
            if scale == 0.0:
                continue
            for R, t in rt_pairs:
                r = R / (1.0 + t)
                slack = mom[k + 2] - r * mom[k + 1] + r * r * mom[k]
                worst = min(worst, slack / scale)
    return float(worst)


def _random_small_state(grid: GridSpec, rng: np.random.Generator,
                        amplitude: float) -> PerturbationState:
    rho = amplitude * random_band_limited(grid, 1, rng)[0]
    u = amplitude * random_band_limited(grid, 3, rng)
    n = amplitude * random_band_limited(grid, 3, rng)
    return PerturbationState(grid, rho, u, n, validate=False)


def inequality_suite(params: FluidParams, seed: int, n_fields: int = 200,
                     eta: float = DEFAULT_ETA) -> list:
    """All checks as a list of {check, min_slack-or-ratio, pass} records."""
    checks = []
    grid3 = GridSpec(dim=3, points_per_axis=16)
    grid2 = GridSpec(dim=2, points_per_axis=32)

    # frequency-splitting inequality: exact Parseval consequence
    min_slack = split_slack_minimum(grid3, seed, n_fields)
    checks.append({"check": "fourier_splitting_slack", "min_slack": min_slack,
                   "pass": bool(min_slack >= -1e-12)})

    # interpolation-ratio checker: invariance, identity case, ensemble record
    rng = np.random.default_rng(seed + 1)
    tup = dict(alpha=1.0, p=2.0, m=0.0, l=2.0)
    inv_err = 0.0
    max_ratio = 0.0
    for _ in range(min(n_fields, 50)):
        data = random_band_limited(grid3, 1, rng)
        f = RealField(grid3, data)
        r1 = gn_ratio(f, **tup)
        r2 = gn_ratio(RealField(grid3, 7.25 * data), **tup)
        inv_err = max(inv_err, abs(r2 / r1 - 1.0))
        max_ratio = max(max_ratio, r1)
    checks.append({"check": "gn_amplitude_invariance", "ratio": inv_err,
                   "pass": bool(inv_err <= 1e-12)})
    data = random_band_limited(grid3, 1, np.random.default_rng(seed + 2))
    ident = gn_ratio(RealField(grid3, data), alpha=0.0, p=2.0, m=0.0, l=2.0)
    checks.append({"check": "gn_identity_case", "ratio": abs(ident - 1.0),
                   "pass": bool(abs(ident - 1.0) <= 1e-12)})
    checks.append({"check": "gn_ensemble_max_ratio", "ratio": max_ratio,
                   "pass": bool(np.isfinite(max_ratio))})
    try:
        solve_gn_exponent(alpha=2.0, p=np.inf, m=0.0, l=1.0)
        rejected = False
    except ValueError:
        rejected = True
    checks.append({"check": "gn_rejects_inadmissible", "ratio": float(not rejected),
                   "pass": rejected})

    # energy-functional equivalence with the plain squared-norm sum
    rng = np.random.default_rng(seed + 3)
    worst_dev = 0.0
    for _ in range(min(n_fields, 40)):
        st = _random_small_state(grid2, rng, amplitude=1e-2)
        ef = energy_functional_F(st, m=3, l=1, eta=eta)
        if ef.norm_sum > 0:
            worst_dev = max(worst_dev, abs(ef.value - ef.norm_sum) / ef.norm_sum)
    checks.append({"check": "energy_equivalence", "ratio": worst_dev,
                   "pass": bool(worst_dev <= 0.5)})

    # pointwise coefficient bounds on the small-data regime
    rng = np.random.default_rng(seed + 4)
    cp = pressure_slope_bound(params)
    margin_h = margin_f = margin_g = -np.inf
    for _ in range(min(n_fields, 40)):
        rho = 0.5 * random_band_limited(grid2, 1, rng)[0]
        h, f, g = _coefficient_arrays(rho, params)
        margin_h = max(margin_h, float((np.abs(h) - 2.0 * np.abs(rho)).max()))
        margin_f = max(margin_f, float((np.abs(f) - cp * np.abs(rho)).max()))
        margin_g = max(margin_g, float(np.abs(g).max() - 2.0))
    worst_margin = max(margin_h, margin_f, margin_g)
    checks.append({"check": "coefficient_pointwise_bounds", "ratio": worst_margin,
                   "pass": bool(worst_margin <= 1e-12)})
    return checks
