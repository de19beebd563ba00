"""Continuous-Fourier quadrature of the linear semigroup for radial data.

On the whole space the linear decay is algebraic, and for radially structured
data every block of the propagator acts through scalar functions of r = |xi|:

* density profile phi(r)        -> density evolves as A phi + r^2 B psi
* potential velocity i xi psi(r) -> velocity stays potential: i xi (At psi - B phi)
* solenoidal amplitude chi(r)   -> pure heat decay with viscosity mu
* director profile(r)           -> pure heat decay with unit diffusivity

so the squared norms reduce to one-dimensional radial integrals

    4 pi * int_0^inf r^{2k+2} (scalar multiplier)^2 (profile)^2 dr

evaluated by adaptive quadrature.  The blocks are labelled "rho",
"u_potential", "u_solenoidal" and "n".
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .diagnostics import DecayFit, decay_fit
from .propagator import FluidParams

__all__ = [
    "RadialProfile",
    "DecayStudyConfig",
    "DecayStudyRow",
    "QuadratureError",
    "linear_sq_norm",
    "decay_study",
    "BLOCKS",
]

BLOCKS = ("rho", "u_potential", "u_solenoidal", "n")

ROLES = ("density", "potential_velocity", "solenoidal_velocity", "director")


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class RadialProfile:
    """Radial spectral profile with a role in the initial data.

    kinds: "gaussian" (params: sigma), "rational" (params: a, b for
    a/(1+r^2)^b), "table" (params: (radii, values), linear interpolation,
    zero beyond the table).
    """

    kind: str
    params: tuple
    role: str

    def __post_init__(self):
        if self.kind not in ("gaussian", "rational", "table"):
            raise ValueError(f"unknown profile kind {self.kind!r}")
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}, must be one of {ROLES}")
        if self.kind == "gaussian" and (len(self.params) != 1 or self.params[0] <= 0):
            raise ValueError("gaussian profile needs one positive width parameter")
        if self.kind == "rational":
            if len(self.params) != 2 or self.params[1] <= 1.5:
                # moments up to r^8 * profile^2 must converge
                raise ValueError("rational profile needs (a, b) with b > 1.5")
        if self.kind == "table":
            r, v = self.params
            if len(r) != len(v) or len(r) < 2:
                raise ValueError("table profile needs matching radii/values, >= 2 points")

    def __call__(self, r: float) -> float:
        if self.kind == "gaussian":
            s = self.params[0]
            return math.exp(-r * r / (2.0 * s * s))
        if self.kind == "rational":
            a, b = self.params
            return a / (1.0 + r * r) ** b
        radii, values = self.params
        return float(np.interp(r, radii, values, left=values[0], right=0.0))

    def support_radius(self, k_max: int = 4, tiny: float = 1e-36) -> float:
        """Radius beyond which r^{2k+4} profile^2 is negligible."""
        r = np.logspace(-3, 4, 600)
        env = r ** (2 * k_max + 4) * np.array([self(x) for x in r]) ** 2
        peak = env.max()
        if peak == 0.0:
            return 1.0
        above = np.nonzero(env > tiny * peak)[0]
        return float(r[above[-1]]) * 1.5

    def check_moments(self, k_max: int = 4, rel: float = 1e-9):
        """Tail estimate: the outer half of the support must be negligible."""
        rmax = self.support_radius(k_max)
        w = lambda r: r ** (2 * k_max + 2) * self(r) ** 2
        total, _ = quad(w, 0.0, rmax, limit=200)
        tail, _ = quad(w, 0.75 * rmax, rmax, limit=200)
        if total > 0 and not tail <= rel * total + 1e-300:
            raise ValueError(
                f"profile moments do not converge: tail fraction {tail / total:.2e}")


def _acoustic_ABAt(mu: float, nu: float, k2: float, t: float):
    """Scalar (A, B, At) of the acoustic pair; mirrors propagator.acoustic_scalars."""
    b = (2.0 * mu + nu) * k2
    disc = b * b - 4.0 * k2
    if disc >= 0.0:
        q = -0.5 * (b + math.sqrt(disc))
        lp = k2 / q if q != 0.0 else 0.0
        lm = q
    else:
        om = 0.5 * math.sqrt(-disc)
        lp = complex(-0.5 * b, om)
        lm = complex(-0.5 * b, -om)
    diff = lp - lm
    mean = 0.5 * (lp + lm)
    if abs(diff) * t < 1e-4:
        z = 0.5 * diff * t
        z2 = z * z
        cosh_s = 1.0 + z2 / 2.0 + z2 * z2 / 24.0
        sinhc_s = 1.0 + z2 / 6.0 + z2 * z2 / 120.0
        emt = cmath.exp(mean * t) if isinstance(mean, complex) else math.exp(mean * t)
        A = emt * (cosh_s - mean * t * sinhc_s)
        B = t * emt * sinhc_s
    else:
        if isinstance(lp, complex):
            ep, em = cmath.exp(lp * t), cmath.exp(lm * t)
        else:
            ep, em = math.exp(lp * t), math.exp(lm * t)
        A = (lp * em - lm * ep) / diff
        B = (ep - em) / diff
    At = A + (lp + lm) * B
    if isinstance(A, complex):
        return A.real, B.real, At.real
    return A, B, At


def _zero_profile(r: float) -> float:
    return 0.0


def _profiles_by_role(profiles) -> dict:
    table = {role: _zero_profile for role in ROLES}
    for p in profiles:
        table[p.role] = p
    return table


def _block_integrand(params: FluidParams, roles: dict, block: str, k: int, t: float):
    mu, nu = params.mu, params.nu
    phi = roles["density"]
    psi = roles["potential_velocity"]
    chi = roles["solenoidal_velocity"]
    eta = roles["director"]

    if block == "rho":
        def f(r):
            A, B, _ = _acoustic_ABAt(mu, nu, r * r, t)
            val = A * phi(r) + r * r * B * psi(r)
            return r ** (2 * k + 2) * val * val
    elif block == "u_potential":
        def f(r):
            _, B, At = _acoustic_ABAt(mu, nu, r * r, t)
            val = At * psi(r) - B * phi(r)
            return r ** (2 * k + 4) * val * val
    elif block == "u_solenoidal":
        def f(r):
            val = math.exp(-mu * r * r * t) * chi(r)
            return r ** (2 * k + 2) * val * val
    elif block == "n":
        def f(r):
            val = math.exp(-r * r * t) * eta(r)
            return r ** (2 * k + 2) * val * val
    else:
        raise ValueError(f"unknown block {block!r}, must be one of {BLOCKS}")
    return f


def linear_sq_norm(params: FluidParams, profiles, k: int, t: float,
                   block: str = "n", rel_tol: float = 1e-9) -> float:
    """Squared L2 norm of grad^k of one propagated block at time t."""
    if k < 0:
        raise ValueError(f"derivative order must be >= 0, got {k}")
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    roles = _profiles_by_role(profiles)
    f = _block_integrand(params, roles, block, k, t)

    rmax = max(p.support_radius(k_max=max(k, 2)) for p in profiles) if profiles else 1.0
    # interior breakpoints: the oscillatory/overdamped transition and the
    # thermal bump scale, which shrinks like 1/sqrt(1+t)
    pts = []
    half = params.mu + 0.5 * params.nu
    if half > 0 and 1.0 / half < rmax:
        pts.append(1.0 / half)
    bump = 2.0 / math.sqrt(1.0 + t)
    if bump < rmax:
        pts.append(bump)
    val, err = quad(f, 0.0, rmax, points=sorted(set(pts)) or None,
                    epsabs=0.0, epsrel=rel_tol, limit=800, full_output=False)
    scale = max(abs(val), 1e-300)
    if err > 50.0 * rel_tol * scale:
        raise QuadratureError(
            f"quadrature did not converge: achieved {err:.3e} on value {val:.3e}, "
            f"requested relative {rel_tol:.1e}")
    return 4.0 * math.pi * val


@dataclass(frozen=True)
class DecayStudyConfig:
    params: FluidParams
    profiles: tuple
    k_list: tuple = (0, 1, 2)
    t_min: float = 1e2
    t_max: float = 1e4
    points_per_decade: int = 20
    rel_tol: float = 1e-9
    blocks: tuple = BLOCKS

    def __post_init__(self):
        if self.t_min < 1.0:
            raise ValueError(f"t_min must be >= 1, got {self.t_min}")
        if self.t_max <= self.t_min:
            raise ValueError("t_max must exceed t_min")
        if self.points_per_decade < 20:
            raise ValueError("need at least 20 points per decade for stable fits")

    def time_grid(self) -> np.ndarray:
        decades = math.log10(self.t_max / self.t_min)
        npts = max(int(round(decades * self.points_per_decade)) + 1, 8)
        return np.logspace(math.log10(self.t_min), math.log10(self.t_max), npts)


@dataclass
class DecayStudyRow:
    component: str
    k: int
    fit: DecayFit
    expected: float
    times: np.ndarray = field(repr=False, default=None)
    values: np.ndarray = field(repr=False, default=None)


def _study_one(args):
    cfg, block, k = args
    times = cfg.time_grid()
    vals = np.array([
        linear_sq_norm(cfg.params, cfg.profiles, k, float(t), block=block,
                       rel_tol=cfg.rel_tol)
        for t in times
    ])
    fit = decay_fit(times, vals, window=(cfg.t_min, cfg.t_max), label=f"{block}_k{k}")
    return DecayStudyRow(component=block, k=k, fit=fit, expected=-(1.5 + k),
                         times=times, values=vals)


def decay_study(cfg: DecayStudyConfig, workers: int = 1) -> list:
    """Fit squared-norm decay exponents per block and derivative order.

    Blocks without a matching profile are skipped (their norms vanish).
    """
    for p in cfg.profiles:
        p.check_moments(k_max=max(cfg.k_list))
    roles = {p.role for p in cfg.profiles}
    need = {
        "rho": {"density", "potential_velocity"},
        "u_potential": {"density", "potential_velocity"},
        "u_solenoidal": {"solenoidal_velocity"},
        "n": {"director"},
    }
    jobs = [(cfg, block, k) for block in cfg.blocks for k in cfg.k_list
            if roles & need[block]]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_study_one, jobs))
    return [_study_one(j) for j in jobs]
