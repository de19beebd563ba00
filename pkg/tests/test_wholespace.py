import numpy as np
import pytest

from nlcflow.propagator import FluidParams, acoustic_scalars
from nlcflow.wholespace import (
    DecayStudyConfig,
    RadialProfile,
    _acoustic_ABAt,
    decay_study,
    linear_sq_norm,
)

P = FluidParams(mu=1.0, nu=0.0)

GAUSS = {role: RadialProfile("gaussian", (1.0,), role)
         for role in ("density", "potential_velocity", "solenoidal_velocity",
                      "director")}


def heat_closed_form(k, t):
    # 4 pi int r^{2k+2} e^{-r^2 (2t+1)} dr with Gaussian width 1
    a = 2.0 * t + 1.0
    from math import gamma, pi, sqrt

    # int_0^inf r^{2m} e^{-a r^2} dr = Gamma(m + 1/2) / (2 a^{m + 1/2})
    m = k + 1
    return 4.0 * pi * gamma(m + 0.5) / (2.0 * a ** (m + 0.5))


# ---------------------------------------------------------------------------
# profiles


def test_profile_validation():
    with pytest.raises(ValueError, match="kind"):
        RadialProfile("spline", (1.0,), "director")
    with pytest.raises(ValueError, match="role"):
        RadialProfile("gaussian", (1.0,), "pressure")
    with pytest.raises(ValueError, match="b > 1.5"):
        RadialProfile("rational", (1.0, 1.2), "director")
    with pytest.raises(ValueError, match="matching"):
        RadialProfile("table", ((0.0, 1.0), (1.0,)), "director")


def test_profile_moment_check_passes_for_decaying_profiles():
    GAUSS["director"].check_moments(k_max=4)
    RadialProfile("rational", (1.0, 4.0), "director").check_moments(k_max=2)


def test_scalar_multipliers_match_array_implementation():
    rng = np.random.default_rng(0)
    for _ in range(200):
        k2 = 10.0 ** rng.uniform(-6, 6)
        t = rng.uniform(0.0, 20.0)
        A, B, At = _acoustic_ABAt(P.mu, P.nu, k2, t)
        Aa, Ba, Ata, _, _ = acoustic_scalars(P, np.array([k2]), t)
        assert abs(A - Aa[0]) < 1e-13 * (1.0 + abs(A))
        assert abs(B - Ba[0]) < 1e-13 * (1.0 + abs(B))
        assert abs(At - Ata[0]) < 1e-13 * (1.0 + abs(At))


# ---------------------------------------------------------------------------
# closed forms


def test_heat_block_closed_form():
    prof = (GAUSS["director"],)
    for t in (0.0, 1.0, 10.0, 100.0):
        got = linear_sq_norm(P, prof, 0, t, block="n")
        exact = np.pi**1.5 * (2.0 * t + 1.0) ** -1.5
        assert abs(got - exact) < 1e-8 * exact


def test_heat_block_higher_derivatives_closed_form():
    prof = (GAUSS["director"],)
    for k in (1, 2):
        for t in (0.0, 5.0):
            got = linear_sq_norm(P, prof, k, t, block="n")
            assert abs(got - heat_closed_form(k, t)) < 1e-8 * heat_closed_form(k, t)


def test_heat_block_moment_ratio():
    prof = (GAUSS["director"],)
    for t in (0.0, 3.0, 50.0):
        r = (linear_sq_norm(P, prof, 1, t, block="n")
             / linear_sq_norm(P, prof, 0, t, block="n"))
        assert abs(r - 1.5 / (2.0 * t + 1.0)) < 1e-8


def test_propagator_is_identity_at_t0():
    profs = (GAUSS["density"], GAUSS["potential_velocity"],
             GAUSS["solenoidal_velocity"], GAUSS["director"])
    # at t=0 the density block reduces to the raw moment of the density profile
    got = linear_sq_norm(P, (GAUSS["density"],), 0, 0.0, block="rho")
    assert abs(got - heat_closed_form(0, 0.0)) < 1e-8 * got
    got = linear_sq_norm(P, profs, 1, 0.0, block="u_solenoidal")
    assert abs(got - heat_closed_form(1, 0.0)) < 1e-8 * got


def test_director_block_monotone_in_time():
    prof = (GAUSS["director"],)
    times = np.linspace(0.0, 20.0, 15)
    vals = [linear_sq_norm(P, prof, 0, t, block="n") for t in times]
    assert np.all(np.diff(vals) < 0.0)


def test_quadrature_self_consistency():
    prof = (GAUSS["density"],)
    for t in (1.0, 100.0):
        a = linear_sq_norm(P, prof, 0, t, block="rho", rel_tol=1e-9)
        b = linear_sq_norm(P, prof, 0, t, block="rho", rel_tol=5e-10)
        assert abs(a - b) < 1e-8 * abs(a)


def test_coupled_block_against_riemann_sum_oracle():
    # trapezoid on a fine fixed grid, array multiplier implementation
    prof = (GAUSS["density"],)
    for k, t in ((0, 10.0), (1, 100.0)):
        got = linear_sq_norm(P, prof, k, t, block="rho")
        r = np.linspace(0.0, 20.0, 400001)
        A, B, _, _, _ = acoustic_scalars(P, r * r, t)
        phi = np.exp(-r * r / 2.0)
        integrand = r ** (2 * k + 2) * (A * phi) ** 2
        oracle = 4.0 * np.pi * np.trapezoid(integrand, r)
        assert abs(got - oracle) < 1e-6 * abs(oracle)


# ---------------------------------------------------------------------------
# decay study


def test_decay_study_gaussian_exponents():
    cfg = DecayStudyConfig(params=P, profiles=tuple(GAUSS.values()))
    rows = decay_study(cfg)
    assert len(rows) == 12
    for row in rows:
        tol = 0.10 if row.component in ("rho", "u_potential") else 0.05
        assert abs(row.fit.exponent - row.expected) < tol, row
        assert row.fit.r_squared > 0.999


def test_decay_study_exponent_additivity_heat_block():
    cfg = DecayStudyConfig(params=P, profiles=(GAUSS["director"],),
                           t_max=1e3, blocks=("n",))
    rows = decay_study(cfg)
    exps = {row.k: row.fit.exponent for row in rows}
    assert abs((exps[1] - exps[0]) + 1.0) < 0.02
    assert abs((exps[2] - exps[1]) + 1.0) < 0.02


def test_decay_study_skips_blocks_without_profiles():
    cfg = DecayStudyConfig(params=P, profiles=(GAUSS["director"],), t_max=1e3)
    rows = decay_study(cfg)
    assert {row.component for row in rows} == {"n"}


def test_low_frequency_deficient_data_decays_faster():
    # density spectrum vanishing to second order at the origin: the fitted
    # exponent must be strictly more negative than the generic -3/2
    r = np.linspace(0.0, 12.0, 400)
    vals = r**2 * np.exp(-r * r / 2.0)
    prof = RadialProfile("table", (tuple(r), tuple(vals)), "director")
    times = np.logspace(2, 3, 25)
    norms = [linear_sq_norm(P, (prof,), 0, t, block="n", rel_tol=1e-6)
             for t in times]
    from nlcflow.diagnostics import decay_fit

    fit = decay_fit(times, norms)
    assert fit.exponent < -2.5


def test_study_config_validation():
    with pytest.raises(ValueError, match="t_min"):
        DecayStudyConfig(params=P, profiles=(GAUSS["director"],), t_min=0.5)
    with pytest.raises(ValueError, match="points per decade"):
        DecayStudyConfig(params=P, profiles=(GAUSS["director"],),
                         points_per_decade=5)
