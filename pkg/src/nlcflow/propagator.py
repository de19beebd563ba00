"""Exact Fourier-multiplier propagator of the linearized system.

Per mode, the linear system couples (density, longitudinal velocity) through a
2x2 acoustic block whose eigenvalues are the roots of

    lambda^2 + (2*mu + nu)*|xi|^2 * lambda + |xi|^2 = 0,

while the transverse velocity decays with rate mu*|xi|^2 and the director with
rate |xi|^2.  The full 7x7 multiplier is assembled from three scalar functions
of the acoustic root pair:

    A  = (l+ e^{l- t} - l- e^{l+ t}) / (l+ - l-)        density-density entry
    B  = (e^{l+ t} - e^{l- t}) / (l+ - l-)              coupling weight
    At = (l+ e^{l+ t} - l- e^{l- t}) / (l+ - l-)        longitudinal velocity

Near the root collision the quotients are evaluated by their analytic limits
(series in the root separation); the switchover is |l+ - l-| * t < 1e-4, where
both branches agree far below 1e-10.  The roots are computed from sum/product
identities, never from the printed radical, so no branch ambiguity arises when
the radicand changes sign.

The zero mode is the conserved-mean convention: the multiplier is the identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import GridSpec, SpectralField, WaveVector, _k_squared, _xi_components

__all__ = [
    "FluidParams",
    "SpectralEigen",
    "GreenMatrix",
    "eigenvalues",
    "pair_functions",
    "green_matrix",
    "apply_propagator",
    "acoustic_roots",
    "acoustic_scalars",
    "acoustic_phi_weights",
    "acoustic_phi2_weights",
    "scalar_phi1",
    "scalar_phi2",
]

# switchover for the degenerate acoustic pair, |l+ - l-| * t below this uses the series
PAIR_DEGENERACY_THRESHOLD = 1e-4
# switchover for the small-|M|h series of the integrator weights
WEIGHT_SERIES_THRESHOLD = 1e-2


@dataclass(frozen=True)
class FluidParams:
    """Viscosities and pressure law, normalized so that P'(1) = 1.

    Admissibility: mu > 0 and 2*mu + 3*nu >= 0 (which forces mu + nu/2 > 0).
    ``pressure_law`` is "linear" (P(rho) = rho) or "gamma" (P(rho) = rho^g / g,
    with exponent ``gamma_exponent``).
    """

    mu: float
    nu: float
    pressure_law: str = "linear"
    gamma_exponent: float = 1.4

    def __post_init__(self):
        if not (np.isfinite(self.mu) and self.mu > 0.0):
            raise ValueError(f"shear viscosity must satisfy mu > 0, got mu={self.mu}")
        if not (np.isfinite(self.nu) and 2.0 * self.mu + 3.0 * self.nu >= 0.0):
            raise ValueError(
                "invalid viscosities: require 2*mu + 3*nu >= 0, got "
                f"mu={self.mu}, nu={self.nu} (2*mu+3*nu={2.0 * self.mu + 3.0 * self.nu})"
            )
        if self.pressure_law not in ("linear", "gamma"):
            raise ValueError(f"unknown pressure law {self.pressure_law!r}")
        if self.pressure_law == "gamma" and not (
            np.isfinite(self.gamma_exponent) and self.gamma_exponent > 0.0
        ):
            raise ValueError(f"gamma exponent must be positive, got {self.gamma_exponent}")

    @property
    def acoustic_damping(self) -> float:
        """2*mu + nu, the damping coefficient of the acoustic pair."""
        return 2.0 * self.mu + self.nu


@dataclass(frozen=True)
class SpectralEigen:
    """The four decay rates of one Fourier mode."""

    lambda0: complex
    lambda1: complex
    lambda_plus: complex
    lambda_minus: complex


def acoustic_roots(params: FluidParams, k2):
    """Roots of lambda^2 + (2mu+nu) k2 lambda + k2 = 0, vectorized over k2.

    Returns (l_plus, l_minus) with l_plus the root of larger real part
    (larger imaginary part on ties).  Uses the product identity for the
    small root, so there is no cancellation in the overdamped regime.
    """
    k2 = np.asarray(k2, dtype=np.float64)
    b = params.acoustic_damping * k2
    disc = b * b - 4.0 * k2
    lp = np.empty(k2.shape, dtype=np.complex128)
    lm = np.empty(k2.shape, dtype=np.complex128)

    real_case = disc >= 0.0
    if np.any(real_case):
        bb = b[real_case]
        q = -0.5 * (bb + np.sqrt(disc[real_case]))
        small = np.divide(k2[real_case], q, out=np.zeros_like(q), where=q != 0.0)
        lp[real_case] = small
        lm[real_case] = q
    osc = ~real_case
    if np.any(osc):
        omega = 0.5 * np.sqrt(-disc[osc])
        re = -0.5 * b[osc]
        lp[osc] = re + 1j * omega
        lm[osc] = re - 1j * omega
    return lp, lm


def eigenvalues(params: FluidParams, k2: float) -> SpectralEigen:
    """All four eigenvalues at squared wavenumber k2 >= 0."""
    if k2 < 0:
        raise ValueError(f"k2 must be >= 0, got {k2}")
    lp, lm = acoustic_roots(params, np.asarray([k2]))
    return SpectralEigen(
        lambda0=complex(-params.mu * k2),
        lambda1=complex(-k2),
        lambda_plus=complex(lp[0]),
        lambda_minus=complex(lm[0]),
    )


def _pair_arrays(lp, lm, t):
    """(A, B, At) for arrays of root pairs at time t >= 0."""
    lp = np.asarray(lp, dtype=np.complex128)
    lm = np.asarray(lm, dtype=np.complex128)
    mean = 0.5 * (lp + lm)
    diff = lp - lm
    A = np.empty(lp.shape, dtype=np.complex128)
    B = np.empty(lp.shape, dtype=np.complex128)

    small = np.abs(diff) * t < PAIR_DEGENERACY_THRESHOLD
    if np.any(small):
        # series in z = (l+ - l-) t / 2 around the collision
        z = 0.5 * diff[small] * t
        z2 = z * z
        cosh_s = 1.0 + z2 / 2.0 + z2 * z2 / 24.0
        sinhc_s = 1.0 + z2 / 6.0 + z2 * z2 / 120.0
        emt = np.exp(mean[small] * t)
        mt = mean[small] * t
        A[small] = emt * (cosh_s - mt * sinhc_s)
        B[small] = t * emt * sinhc_s
    big = ~small
    if np.any(big):
        ep = np.exp(lp[big] * t)
        em = np.exp(lm[big] * t)
        d = diff[big]
        A[big] = (lp[big] * em - lm[big] * ep) / d
        B[big] = (ep - em) / d
    At = A + (lp + lm) * B
    return A, B, At


def pair_functions(lp: complex, lm: complex, t: float):
    """The two divided-difference exponential quotients (A, B) for one root pair."""
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    A, B, _ = _pair_arrays(np.asarray([lp]), np.asarray([lm]), float(t))
    return complex(A[0]), complex(B[0])


def acoustic_scalars(params: FluidParams, k2, t: float):
    """(A, B, At, exp(lambda0 t), exp(lambda1 t)) as real arrays over k2 >= 0.

    All five multipliers are real functions of k2; the imaginary residue of the
    complex evaluation is discarded.
    """
    k2 = np.asarray(k2, dtype=np.float64)
    lp, lm = acoustic_roots(params, k2)
    A, B, At = _pair_arrays(lp, lm, t)
    e0 = np.exp(-params.mu * k2 * t)
    e1 = np.exp(-k2 * t)
    return A.real, B.real, At.real, e0, e1


@dataclass(frozen=True)
class GreenMatrix:
    """The 7x7 linear multiplier at one wavevector: (density | velocity | director)."""

    matrix: np.ndarray

    @property
    def rho_rho(self) -> complex:
        return self.matrix[0, 0]

    @property
    def rho_u(self) -> np.ndarray:
        return self.matrix[0, 1:4]

    @property
    def u_rho(self) -> np.ndarray:
        return self.matrix[1:4, 0]

    @property
    def u_u(self) -> np.ndarray:
        return self.matrix[1:4, 1:4]

    @property
    def n_n(self) -> np.ndarray:
        return self.matrix[4:7, 4:7]


def green_matrix(params: FluidParams, xi, t: float) -> GreenMatrix:
    """Assemble the full multiplier at one wavevector (3-vector or WaveVector)."""
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    if isinstance(xi, WaveVector):
        xi = xi.xi
    xi = np.asarray(xi, dtype=np.float64)
    if xi.shape != (3,):
        xi3 = np.zeros(3)
        xi3[: xi.size] = xi
        xi = xi3
    k2 = float(xi @ xi)
    M = np.zeros((7, 7), dtype=np.complex128)
    if k2 == 0.0:
        return GreenMatrix(np.eye(7, dtype=np.complex128))
    A, B, At, e0, e1 = acoustic_scalars(params, np.asarray([k2]), t)
    A, B, At, e0, e1 = A[0], B[0], At[0], e0[0], e1[0]
    proj = np.outer(xi, xi) / k2
    M[0, 0] = A
    M[0, 1:4] = -1j * xi * B
    M[1:4, 0] = -1j * xi * B
    M[1:4, 1:4] = At * proj + e0 * (np.eye(3) - proj)
    M[4:7, 4:7] = e1 * np.eye(3)
    return GreenMatrix(M)


def _stacked_xi(grid: GridSpec):
    """Wavenumber components padded to 3, plus k2 and a zero-safe k2."""
    xi = list(_xi_components(grid))
    while len(xi) < 3:
        xi.append(np.zeros(grid.shape))
    k2 = _k_squared(grid)
    k2_safe = np.where(k2 == 0.0, 1.0, k2)
    return xi, k2, k2_safe


def apply_propagator(state_hat: SpectralField, params: FluidParams, t: float) -> SpectralField:
    """Propagate a 7-component spectral state (rho, u1..u3, n1..n3) by time t.

    Conjugate-symmetric input yields conjugate-symmetric output exactly: every
    multiplier is a real function of k2, and the imaginary couplings carry the
    odd factor xi.
    """
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    if state_hat.components != 7:
        raise ValueError(f"expected 7 components (rho, u, n), got {state_hat.components}")
    grid = state_hat.grid
    xi, k2, k2_safe = _stacked_xi(grid)
    A, B, At, e0, e1 = acoustic_scalars(params, k2, t)

    rho = state_hat.modes[0]
    u = state_hat.modes[1:4]
    n = state_hat.modes[4:7]

    v = xi[0] * u[0] + xi[1] * u[1] + xi[2] * u[2]  # xi . u
    rho_new = A * rho - 1j * B * v
    v_new = -1j * k2 * B * rho + At * v
    out = np.empty_like(state_hat.modes)
    out[0] = rho_new
    for a in range(3):
        ua_par = xi[a] * v / k2_safe
        out[1 + a] = xi[a] * v_new / k2_safe + e0 * (u[a] - ua_par)
    for a in range(3):
        out[4 + a] = e1 * n[a]

    zero = k2 == 0.0
    out[:, zero] = state_hat.modes[:, zero]
    return SpectralField(grid, out)


def linear_rhs(state_hat: SpectralField, params: FluidParams) -> SpectralField:
    """Right-hand side of the linearized system in spectral space."""
    if state_hat.components != 7:
        raise ValueError(f"expected 7 components, got {state_hat.components}")
    grid = state_hat.grid
    xi, k2, _ = _stacked_xi(grid)
    rho = state_hat.modes[0]
    u = state_hat.modes[1:4]
    n = state_hat.modes[4:7]
    v = xi[0] * u[0] + xi[1] * u[1] + xi[2] * u[2]
    out = np.empty_like(state_hat.modes)
    out[0] = -1j * v
    mu, mn = params.mu, params.mu + params.nu
    for a in range(3):
        out[1 + a] = -mu * k2 * u[a] - mn * xi[a] * v - 1j * xi[a] * rho
    for a in range(3):
        out[4 + a] = -k2 * n[a]
    return SpectralField(grid, out)


# ---------------------------------------------------------------------------
# Integrator weights: Phi = int_0^h exp(M s) ds  and  W = h*phi2(M h)
# expressed blockwise with the same degenerate-safe scalar machinery.
# ---------------------------------------------------------------------------


def scalar_phi1(lam, h: float):
    """(e^{lam h} - 1)/lam for real lam (the lam -> 0 limit is h)."""
    lam = np.asarray(lam, dtype=np.float64)
    x = lam * h
    out = np.full(lam.shape, h, dtype=np.float64)
    nz = lam != 0.0
    out[nz] = np.expm1(x[nz]) / lam[nz]
    return out


def scalar_phi2(lam, h: float):
    """(e^{lam h} - 1 - lam h)/(lam^2 h) for real lam (limit h/2), series-safe."""
    lam = np.asarray(lam, dtype=np.float64)
    x = lam * h
    out = np.empty(lam.shape, dtype=np.float64)
    small = np.abs(x) < WEIGHT_SERIES_THRESHOLD
    if np.any(small):
        xs = x[small]
        # h * sum_k x^k/(k+2)!, truncated far below double precision
        acc = np.zeros_like(xs)
        for fact in (40320.0, 5040.0, 720.0, 120.0, 24.0, 6.0):
            acc = (acc + 1.0 / fact) * xs
        out[small] = h * (acc + 0.5)
    big = ~small
    if np.any(big):
        xb = x[big]
        out[big] = (np.expm1(xb) - xb) / (lam[big] * xb)
    return out


def _acoustic_weight_series(s, c, h: float, shifted: bool):
    """Taylor weights for Phi (shifted=False) or W (shifted=True) at small |M|h.

    Uses M^k = a_k M + b_k I with the characteristic recurrence
    a_{k+1} = s a_k + b_k, b_{k+1} = -c a_k.
    """
    a = np.zeros_like(s)
    b = np.ones_like(s)
    coeff_i = np.zeros_like(s)
    coeff_m = np.zeros_like(s)
    hk = h  # h^{k+1}
    fact = 1.0  # k!
    for k in range(14):
        denom = fact * (k + 1.0) * (k + 2.0) if shifted else fact * (k + 1.0)
        coeff_i += b * hk / denom
        coeff_m += a * hk / denom
        a, b = s * a + b, -c * a
        hk *= h
        fact *= k + 1.0
    return coeff_i, coeff_m


def acoustic_phi_weights(params: FluidParams, k2, h: float):
    """Coefficients (alpha, beta) with int_0^h e^{M s} ds = alpha I + beta M.

    Closed form alpha = B + s (A-1)/c, beta = (1-A)/c away from the origin;
    Taylor series where (|s| + sqrt(c)) h is small (covers the zero mode).
    """
    k2 = np.asarray(k2, dtype=np.float64)
    s = -params.acoustic_damping * k2
    c = k2
    alpha = np.empty(k2.shape)
    beta = np.empty(k2.shape)
    small = (np.abs(s) + np.sqrt(c)) * h < WEIGHT_SERIES_THRESHOLD
    if np.any(small):
        ai, am = _acoustic_weight_series(s[small], c[small], h, shifted=False)
        alpha[small], beta[small] = ai, am
    big = ~small
    if np.any(big):
        A, B, _, _, _ = acoustic_scalars(params, k2[big], h)
        cb = c[big]
        beta[big] = (1.0 - A) / cb
        alpha[big] = B + s[big] * (A - 1.0) / cb
    return alpha, beta


def acoustic_phi2_weights(params: FluidParams, k2, h: float):
    """Coefficients (gamma, delta) with (e^{Mh} - I - Mh) M^-2 / h = gamma I + delta M."""
    k2 = np.asarray(k2, dtype=np.float64)
    s = -params.acoustic_damping * k2
    c = k2
    gamma = np.empty(k2.shape)
    delta = np.empty(k2.shape)
    small = (np.abs(s) + np.sqrt(c)) * h < WEIGHT_SERIES_THRESHOLD
    if np.any(small):
        gi, gm = _acoustic_weight_series(s[small], c[small], h, shifted=True)
        gamma[small], delta[small] = gi, gm
    big = ~small
    if np.any(big):
        alpha, beta = acoustic_phi_weights(params, k2[big], h)
        cb = c[big]
        delta[big] = -(alpha - h) / (cb * h)
        gamma[big] = beta / h + s[big] * (alpha - h) / (cb * h)
    return gamma, delta
