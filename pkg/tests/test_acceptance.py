"""Acceptance suite: one test per headline criterion, each printing a
pass/fail line with the measured values (run pytest -s to see them all)."""

import time

import numpy as np
import pytest

from nlcflow.checks import default_rt_pairs, moment_sums
from nlcflow.cli import main
from nlcflow.diagnostics import (
    decay_fit,
    director_dissipation_excess,
    gn_ratio,
    solve_gn_exponent,
)
from nlcflow.dynamics import PerturbationState, nonlinear_sources_hat
from nlcflow.evolution import IntegratorConfig, simulate
from nlcflow.persist import load_checkpoint, save_checkpoint
from nlcflow.propagator import (
    FluidParams,
    acoustic_roots,
    apply_propagator,
    green_matrix,
    linear_rhs,
)
from nlcflow.scenarios import build_initial_state, gaussian_profiles, random_band_limited
from nlcflow.spectral import GridSpec, RealField, SpectralField, forward_transform
from nlcflow.wholespace import DecayStudyConfig, decay_study, linear_sq_norm

P = FluidParams(mu=1.0, nu=0.0)
W0 = np.array([0.0, 0.0, 1.0])


def criterion(name: str, ok: bool, detail: str):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


# ---------------------------------------------------------------------------


def test_linear_decay_exponents():
    t0 = time.time()
    cfg = DecayStudyConfig(params=P, profiles=gaussian_profiles(),
                           k_list=(0, 1, 2), t_min=1e2, t_max=1e4)
    rows = decay_study(cfg)
    elapsed = time.time() - t0
    worst = {}
    for row in rows:
        tol = 0.10 if row.component in ("rho", "u_potential") else 0.05
        err = abs(row.fit.exponent - row.expected)
        worst[row.component] = max(worst.get(row.component, 0.0), err / tol)
        assert err < tol, (row.component, row.k, row.fit.exponent)
    detail = (", ".join(f"{c} err/tol={v:.2f}" for c, v in sorted(worst.items()))
              + f", elapsed {elapsed:.1f}s")
    criterion("linear decay exponents -(3/2+k)", elapsed < 60.0, detail)


def test_heat_block_closed_form():
    prof = gaussian_profiles()[3:]
    worst = 0.0
    for t in (0.0, 1.0, 10.0, 100.0):
        got = linear_sq_norm(P, prof, 0, t, block="n")
        exact = np.pi**1.5 * (2.0 * t + 1.0) ** -1.5
        worst = max(worst, abs(got - exact) / exact)
    criterion("heat-block closed form", worst < 1e-8, f"max rel err {worst:.2e}")


def test_green_matrix_identities():
    t0 = time.time()
    direction = np.array([2.0, -1.0, 2.0]) / 3.0
    mags = np.logspace(-3, 3, 25)
    id_err = 0.0
    semi_err = 0.0
    for mag in mags:
        xi = mag * direction
        id_err = max(id_err, np.abs(green_matrix(P, xi, 0.0).matrix - np.eye(7)).max())
        for t, s in ((0.4, 0.6), (2.0, 8.0), (0.0, 5.0)):
            Gts = green_matrix(P, xi, t + s).matrix
            prod = green_matrix(P, xi, t).matrix @ green_matrix(P, xi, s).matrix
            semi_err = max(semi_err,
                           np.abs(Gts - prod).max() / (1.0 + np.abs(Gts).max()))
    half = P.mu + 0.5 * P.nu
    cont_err = 0.0
    for t in (0.1, 1.0, 5.0):
        lo = green_matrix(P, [(1.0 - 1e-6) / half, 0, 0], t).matrix
        hi = green_matrix(P, [(1.0 + 1e-6) / half, 0, 0], t).matrix
        cont_err = max(cont_err, np.abs(lo - hi).max())
    rng = np.random.default_rng(0)
    worst_re = -np.inf
    for _ in range(50):
        mu = rng.uniform(0.05, 4.0)
        nu = rng.uniform(-2.0 * mu / 3.0, 4.0)
        lp, lm = acoustic_roots(FluidParams(mu=mu, nu=nu), mags**2)
        worst_re = max(worst_re, float(lp.real.max()), float(lm.real.max()))
    elapsed = time.time() - t0
    ok = (id_err < 1e-12 and semi_err < 1e-10 and cont_err < 1e-5
          and worst_re <= 0.0 and elapsed < 30.0)
    criterion("green-matrix identities", ok,
              f"identity {id_err:.1e}, semigroup {semi_err:.1e}, "
              f"degeneracy continuity {cont_err:.1e}, max Re(lambda) {worst_re:.1e}, "
              f"elapsed {elapsed:.1f}s")


def test_fourier_splitting_inequality():
    grid = GridSpec(dim=3, points_per_axis=16)
    rng = np.random.default_rng(2024)
    pairs = default_rt_pairs()
    assert len(pairs) == 10
    worst = np.inf
    for _ in range(1000):
        F = forward_transform(RealField(grid, random_band_limited(grid, 1, rng)))
        mom = moment_sums(F.modes, grid, 6)
        for k in range(5):
            scale = mom[: k + 3].sum()
            for R, t in pairs:
                r = R / (1.0 + t)
                slack = mom[k + 2] - r * mom[k + 1] + r * r * mom[k]
                worst = min(worst, slack / scale)
    criterion("frequency-splitting slack nonnegative", worst >= -1e-12,
              f"min normalized slack {worst:.3e} over 1000 fields x 5 k x 10 pairs")


def test_gn_checker():
    grid = GridSpec(dim=3, points_per_axis=8)
    rng = np.random.default_rng(5)
    data = random_band_limited(grid, 1, rng)
    base = gn_ratio(RealField(grid, data), 1.0, 2.0, 0.0, 2.0)
    inv_err = max(abs(gn_ratio(RealField(grid, c * data), 1.0, 2.0, 0.0, 2.0) - base)
                  for c in (13.5, 1e-7, -2.0)) / base
    ident = abs(gn_ratio(RealField(grid, data), 0.0, 2.0, 0.0, 2.0) - 1.0)
    try:
        solve_gn_exponent(2.0, np.inf, 0.0, 1.0)
        rejected = False
    except ValueError:
        rejected = True
    ok = inv_err <= 1e-12 and ident <= 1e-12 and rejected
    criterion("interpolation-ratio checker", ok,
              f"amplitude invariance {inv_err:.1e}, identity case {ident:.1e}, "
              f"inadmissible tuple rejected: {rejected}")


def test_nonlinear_simulation_properties():
    t0 = time.time()
    grid = GridSpec(dim=2, points_per_axis=64)
    state = build_initial_state("mixed-small", grid, amplitude=1e-3, seed=0)
    cfg = IntegratorConfig(scheme="ETD2RK", dt=1e-2, t_end=10.0,
                           diagnostics_every=1, renormalize_every=0)
    traj = simulate(state, P, cfg, norm_order=3)

    mass = traj.column("mass_mode0")
    mass_ok = np.abs(mass - mass[0]).max() < 1e-10 * (1.0 + abs(mass[0]))

    drift_ok = traj.max_director_drift < 1e-6

    F = traj.column("energy_F_N1")
    diffs = np.diff(F[5:])
    mono_ok = bool(np.all(diffs <= 1e-12 * F[5:-1] + 1e-300))

    times = traj.time_array
    shadow_worst = -np.inf
    for k in range(3):
        nk = traj.column(f"n_grad{k}_L2") ** 2
        nk1 = traj.column(f"n_grad{k + 1}_L2") ** 2
        uk1 = traj.column(f"u_grad{k + 1}_L2") ** 2
        excess = director_dissipation_excess(times, nk, nk1, uk1, coeff=0.1)
        scale = max(nk1[0], 1e-300)
        shadow_worst = max(shadow_worst, float(excess[5:].max() / scale))
    shadow_ok = shadow_worst <= 1e-10

    # linear-consistency mode against the exact propagator
    lin_state = build_initial_state("mixed-small", grid, amplitude=1e-3, seed=1)
    lin_cfg = IntegratorConfig(scheme="ETD1", dt=1e-2, t_end=10.0,
                               diagnostics_every=1000, include_nonlinear=False)
    lin = simulate(lin_state, P, lin_cfg)
    exact = apply_propagator(lin_state.to_spectral(), P, 10.0)
    got = lin.final_state.to_spectral()
    scale = np.abs(exact.modes).max()
    lin_err = np.abs(got.modes - exact.modes).max() / scale
    lin_ok = lin_err < 1000 * 1e-11

    elapsed = time.time() - t0
    ok = mass_ok and drift_ok and mono_ok and shadow_ok and lin_ok and elapsed < 120.0
    criterion(
        "nonlinear simulation properties", ok,
        f"mass drift {np.abs(mass - mass[0]).max():.1e}, "
        f"director drift {traj.max_director_drift:.1e}, "
        f"energy monotone after transient: {mono_ok}, "
        f"dissipation-shadow excess {shadow_worst:.1e}, "
        f"linear consistency {lin_err:.1e} over 1000 steps, "
        f"elapsed {elapsed:.1f}s")


def test_integrator_orders():
    grid = GridSpec(dim=2, points_per_axis=16)
    rng = np.random.default_rng(5)
    base = PerturbationState(
        grid,
        0.1 * random_band_limited(grid, 1, rng, band=2)[0],
        0.1 * random_band_limited(grid, 3, rng, band=2),
        0.1 * random_band_limited(grid, 3, rng, band=2),
        w0=W0)
    U0 = base.to_spectral().modes.copy()

    def forcing(t):
        decayed = np.exp(-t) * U0
        lin = linear_rhs(SpectralField(grid, decayed), P).modes
        src = nonlinear_sources_hat(grid, P, W0, decayed)
        return -decayed - lin - src

    exact_final = np.exp(-1.0) * U0
    dts = [1.0 / 40, 1.0 / 80, 1.0 / 160]
    orders = {}
    for scheme in ("ETD1", "ETD2RK"):
        errs = []
        for dt in dts:
            cfg = IntegratorConfig(scheme=scheme, dt=dt, t_end=1.0,
                                   diagnostics_every=10**9)
            traj = simulate(base, P, cfg, forcing=forcing)
            got = traj.final_state.to_spectral().modes
            errs.append(np.abs(got - exact_final).max() / np.abs(exact_final).max())
        orders[scheme] = min(
            np.log(errs[i] / errs[i + 1]) / np.log(dts[i] / dts[i + 1])
            for i in range(2))
    ok = orders["ETD1"] >= 0.9 and orders["ETD2RK"] >= 1.8
    criterion("integrator convergence orders", ok,
              f"ETD1 order {orders['ETD1']:.2f} (>= 0.9), "
              f"ETD2RK order {orders['ETD2RK']:.2f} (>= 1.8)")


def test_determinism(tmp_path):
    cfg_text = f"""
scenario = "mixed-small"
seed = 11
amplitude = 1e-3
out = "{tmp_path / 'out'}"

[grid]
dim = 2
points_per_axis = 16

[fluid]
mu = 1.0
nu = 0.0

[integrator]
scheme = "ETD2RK"
dt = 0.01
t_end = 0.2
diagnostics_every = 5

[check]
fields = 20
"""
    cfg = tmp_path / "run.toml"
    cfg.write_text(cfg_text)
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "a")]) == 0
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "b")]) == 0
    csv_same = ((tmp_path / "a" / "norms.csv").read_bytes()
                == (tmp_path / "b" / "norms.csv").read_bytes())
    assert main(["check", "--config", str(cfg), "--out", str(tmp_path / "ca")]) == 0
    assert main(["check", "--config", str(cfg), "--out", str(tmp_path / "cb")]) == 0
    json_same = ((tmp_path / "ca" / "inequalities.json").read_bytes()
                 == (tmp_path / "cb" / "inequalities.json").read_bytes())

    grid = GridSpec(dim=2, points_per_axis=16)
    st = build_initial_state("mixed-small", grid, amplitude=1e-3, seed=11)
    p1, p2 = tmp_path / "c1.bin", tmp_path / "c2.bin"
    save_checkpoint(st, p1, P)
    save_checkpoint(load_checkpoint(p1, params=P), p2, P)
    ckpt_same = p1.read_bytes() == p2.read_bytes()

    ok = csv_same and json_same and ckpt_same
    criterion("determinism and checkpoint round trip", ok,
              f"csv identical: {csv_same}, json identical: {json_same}, "
              f"checkpoint bitwise: {ckpt_same}")
