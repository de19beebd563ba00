"""Structure of the linear propagator in Fourier space.

The acoustic pair switches from oscillatory (complex-conjugate decay rates) at
low wavenumber to overdamped (two real rates) at high wavenumber; the
transition point is where |xi| (mu + nu/2) = 1.  The propagator itself stays
smooth across the transition, and composes exactly as a semigroup.
"""

import numpy as np

from nlcflow import FluidParams, eigenvalues, green_matrix

params = FluidParams(mu=1.0, nu=0.0)
half = params.mu + 0.5 * params.nu

print("Acoustic decay rates across the oscillatory/overdamped transition:")
for mag in (0.25, 0.5, 0.9, 1.0, 1.1, 2.0, 10.0):
    ev = eigenvalues(params, (mag / half) ** 2)
    kind = "oscillatory" if abs(ev.lambda_plus.imag) > 0 else "overdamped"
    print(f"  |xi|(mu+nu/2) = {mag:5.2f}:  lambda+ = {ev.lambda_plus:+.4f}  "
          f"lambda- = {ev.lambda_minus:+.4f}   [{kind}]")

print("\nContinuity across the degenerate point (entrywise difference):")
for t in (0.1, 1.0, 5.0):
    lo = green_matrix(params, [(1 - 1e-6) / half, 0, 0], t).matrix
    hi = green_matrix(params, [(1 + 1e-6) / half, 0, 0], t).matrix
    print(f"  t={t:4.1f}:  max |G(1-eps) - G(1+eps)| = {np.abs(lo - hi).max():.3e}")

print("\nSemigroup composition error G(t+s) vs G(t) G(s):")
xi = np.array([0.6, -0.8, 0.0])
for t, s in ((0.5, 0.5), (2.0, 3.0), (0.01, 10.0)):
    Gts = green_matrix(params, xi, t + s).matrix
    prod = green_matrix(params, xi, t).matrix @ green_matrix(params, xi, s).matrix
    print(f"  t={t:5.2f}, s={s:5.2f}:  {np.abs(Gts - prod).max():.3e}")

print("\nBlock structure at |xi| = 1, t = ln 2 (the director block halves):")
G = green_matrix(params, [1.0, 0.0, 0.0], np.log(2.0))
with np.printoptions(precision=3, suppress=True):
    print(np.abs(G.matrix))
