"""Structural inequalities evaluated on random ensembles.

Each check mirrors an estimate the model's analysis relies on: the
frequency-splitting lower bound (an exact Parseval consequence, so its slack
must be nonnegative), the interpolation-ratio homogeneity, the composite
coefficient-function bound, and the equivalence of the coupled energy
functional with the plain squared-norm sum.
"""

import numpy as np

from nlcflow import FluidParams, fourier_split_slack, gn_ratio
from nlcflow.checks import inequality_suite
from nlcflow.diagnostics import composite_bound_ratio
from nlcflow.scenarios import random_band_limited
from nlcflow.spectral import GridSpec, RealField, forward_transform, sobolev_norm

params = FluidParams(mu=1.0, nu=0.0)
grid = GridSpec(dim=3, points_per_axis=16)
rng = np.random.default_rng(0)

print("Frequency-splitting slack on random fields (always >= 0):")
for trial in range(3):
    F = forward_transform(RealField(grid, random_band_limited(grid, 1, rng)))
    scale = sobolev_norm(F, 0, "inhomogeneous", upper=2) ** 2
    slacks = [fourier_split_slack(F, 0, R, t) / scale
              for R, t in ((0.5, 0.0), (8.0, 3.0), (64.0, 99.0))]
    print(f"  field {trial}: normalized slack "
          + ", ".join(f"{s:+.4f}" for s in slacks))

print("\nInterpolation ratio is amplitude-invariant (exact homogeneity):")
data = random_band_limited(grid, 1, rng)
for c in (1.0, 100.0, 1e-6):
    r = gn_ratio(RealField(grid, c * data), alpha=1.0, p=2.0, m=0.0, l=2.0)
    print(f"  amplitude x{c:>8g}: ratio = {r:.12f}")

print("\nComposite coefficient-function bound (sup-norm ratios, m = 2):")
g2 = GridSpec(dim=2, points_per_axis=32)
rho = RealField(g2, 0.5 * random_band_limited(g2, 1, rng))
for name, value in composite_bound_ratio(rho, 2, params).items():
    print(f"  {name}: {value:.4f}")

print("\nFull machine-readable suite (same records as the check CLI mode):")
for check in inequality_suite(params, seed=0, n_fields=50):
    value = check.get("min_slack", check.get("ratio"))
    print(f"  {'PASS' if check['pass'] else 'FAIL'}  {check['check']}: {value:.3e}")
