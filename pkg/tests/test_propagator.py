import numpy as np
import pytest
import scipy.linalg as sla

from nlcflow.propagator import (
    FluidParams,
    acoustic_phi2_weights,
    acoustic_phi_weights,
    acoustic_roots,
    acoustic_scalars,
    apply_propagator,
    eigenvalues,
    green_matrix,
    linear_rhs,
    pair_functions,
    scalar_phi1,
    scalar_phi2,
)
from nlcflow.spectral import (
    GridSpec,
    RealField,
    SpectralField,
    forward_transform,
    is_conjugate_symmetric,
)

P = FluidParams(mu=1.0, nu=0.0)


def acoustic_matrix(params, k2):
    b = params.acoustic_damping * k2
    return np.array([[0.0, -1j], [-1j * k2, -b]])


# ---------------------------------------------------------------------------
# parameters


def test_params_reject_nonpositive_mu():
    with pytest.raises(ValueError, match="mu > 0"):
        FluidParams(mu=0.0, nu=1.0)


def test_params_reject_violated_bulk_constraint():
    with pytest.raises(ValueError, match=r"2\*mu \+ 3\*nu >= 0"):
        FluidParams(mu=1.0, nu=-1.0)


# ---------------------------------------------------------------------------
# eigenvalues


def test_eigenvalues_vanish_at_zero_mode():
    ev = eigenvalues(P, 0.0)
    assert ev.lambda0 == ev.lambda1 == ev.lambda_plus == ev.lambda_minus == 0.0


def test_eigenvalues_overdamped_sample():
    # mu=1, nu=0, k2=4: quadratic-root oracle gives -4 +- 2 sqrt(3)
    ev = eigenvalues(P, 4.0)
    assert abs(ev.lambda_plus - (-4.0 + 2.0 * np.sqrt(3.0))) < 1e-12
    assert abs(ev.lambda_minus - (-4.0 - 2.0 * np.sqrt(3.0))) < 1e-12
    assert abs(ev.lambda_plus * ev.lambda_minus - 4.0) < 1e-12
    assert abs(ev.lambda_plus + ev.lambda_minus + 8.0) < 1e-12
    assert ev.lambda0 == -4.0 and ev.lambda1 == -4.0


def test_eigenvalues_degenerate_point():
    # radicand k2 - (mu + nu/2)^2 k2^2 vanishes at k2 = 1 for mu=1, nu=0
    ev = eigenvalues(P, 1.0)
    assert abs(ev.lambda_plus - (-1.0)) < 1e-12
    assert abs(ev.lambda_minus - (-1.0)) < 1e-12


def test_root_identities_on_log_grid():
    k2 = np.logspace(-6, 6, 200)
    for params in (P, FluidParams(mu=0.3, nu=0.5), FluidParams(mu=2.0, nu=-1.0)):
        lp, lm = acoustic_roots(params, k2)
        assert np.all(np.abs(lp * lm - k2) < 1e-12 * (1.0 + k2))
        assert np.all(np.abs(lp + lm + params.acoustic_damping * k2)
                      < 1e-12 * (1.0 + k2))


def test_stability_under_admissible_viscosities():
    rng = np.random.default_rng(11)
    k2 = np.logspace(-6, 6, 50)
    for _ in range(25):
        mu = rng.uniform(0.05, 5.0)
        nu = rng.uniform(-2.0 * mu / 3.0, 3.0)
        params = FluidParams(mu=mu, nu=nu)
        lp, lm = acoustic_roots(params, k2)
        assert np.all(lp.real < 0.0) and np.all(lm.real < 0.0)
        ev = eigenvalues(params, 0.0)
        assert ev.lambda_plus.real <= 0.0


# ---------------------------------------------------------------------------
# pair functions


def test_pair_functions_at_time_zero():
    for lp, lm in ((-1.0, -2.0), (-1 + 2j, -1 - 2j), (-3.0, -3.0)):
        A, B = pair_functions(lp, lm, 0.0)
        assert A == 1.0 and B == 0.0


def test_pair_functions_degenerate_limit():
    A, B = pair_functions(-1.0, -1.0, 1.0)
    assert abs(A - 2.0 / np.e) < 1e-14
    assert abs(B - 1.0 / np.e) < 1e-14


def test_pair_functions_against_high_precision_oracle():
    # frozen from a 50-digit evaluation of the defining quotients
    A, B = pair_functions(-0.5359, -7.4641, 1.0)
    assert abs(A - 0.63035916137733984133) < 1e-10
    assert abs(B - 0.084375324629140986321) < 1e-10


def test_pair_functions_continuous_across_switchover():
    # straddle |l+ - l-| t = 1e-4 and compare the two branches
    for eps in (0.99e-4, 1.01e-4):
        A1, B1 = pair_functions(-1.0 + eps / 2, -1.0 - eps / 2, 1.0)
        A2, B2 = pair_functions(-1.0 + eps / 1.999, -1.0 - eps / 1.999, 1.0)
        assert abs(A1 - A2) < 1e-10
        assert abs(B1 - B2) < 1e-10


def test_pair_functions_rejects_negative_time():
    with pytest.raises(ValueError):
        pair_functions(-1.0, -2.0, -0.5)


# ---------------------------------------------------------------------------
# green matrix


def test_green_matrix_identity_at_t0():
    for xi in ([1.0, 0.0, 0.0], [0.3, -0.7, 1.1], [0.0, 0.0, 0.0]):
        G = green_matrix(P, xi, 0.0)
        assert np.abs(G.matrix - np.eye(7)).max() < 1e-12


def test_green_matrix_director_block_halves_at_log2():
    G = green_matrix(P, [1.0, 0.0, 0.0], np.log(2.0))
    assert np.abs(G.n_n - 0.5 * np.eye(3)).max() < 1e-12


def test_green_matrix_degenerate_density_entry():
    G = green_matrix(P, [1.0, 0.0, 0.0], 1.0)
    assert abs(G.rho_rho - 2.0 / np.e) < 1e-12


def test_green_matrix_rejects_negative_time():
    with pytest.raises(ValueError):
        green_matrix(P, [1.0, 0.0, 0.0], -1.0)


def test_green_matrix_matches_matrix_exponential():
    # independent oracle: expm of the full 7x7 generator
    rng = np.random.default_rng(3)
    for _ in range(20):
        xi = rng.standard_normal(3) * 10.0 ** rng.uniform(-2, 2)
        k2 = xi @ xi
        t = rng.uniform(0.0, 3.0)
        L = np.zeros((7, 7), dtype=np.complex128)
        L[0, 1:4] = -1j * xi
        L[1:4, 0] = -1j * xi
        L[1:4, 1:4] = -P.mu * k2 * np.eye(3) - (P.mu + P.nu) * np.outer(xi, xi)
        L[4:7, 4:7] = -k2 * np.eye(3)
        expected = sla.expm(L * t)
        G = green_matrix(P, xi, t).matrix
        assert np.abs(G - expected).max() < 1e-10 * (1.0 + np.abs(expected).max())


def test_semigroup_composition_over_log_grid():
    params = FluidParams(mu=0.8, nu=0.1)
    direction = np.array([0.36, -0.48, 0.8])
    for mag in np.logspace(-3, 3, 13):
        xi = mag * direction
        for t, s in ((0.5, 0.25), (4.0, 6.0), (0.0, 10.0), (1e-3, 1.0)):
            Gts = green_matrix(params, xi, t + s).matrix
            prod = green_matrix(params, xi, t).matrix @ green_matrix(params, xi, s).matrix
            scale = 1.0 + np.abs(Gts).max()
            assert np.abs(Gts - prod).max() < 1e-10 * scale


def test_continuity_across_degeneracy():
    half = P.mu + 0.5 * P.nu
    for t in (0.1, 1.0, 5.0):
        lo = green_matrix(P, [(1.0 - 1e-6) / half, 0, 0], t).matrix
        hi = green_matrix(P, [(1.0 + 1e-6) / half, 0, 0], t).matrix
        assert np.abs(lo - hi).max() < 1e-5


# ---------------------------------------------------------------------------
# propagator application


def random_state_hat(grid, seed=0):
    rng = np.random.default_rng(seed)
    data = rng.standard_normal((7,) + grid.shape)
    return forward_transform(RealField(grid, data))


def test_apply_propagator_identity_at_t0():
    grid = GridSpec(dim=2, points_per_axis=16)
    U = random_state_hat(grid)
    out = apply_propagator(U, P, 0.0)
    scale = np.abs(U.modes).max()
    assert np.abs(out.modes - U.modes).max() < 1e-14 * scale


def test_apply_propagator_pure_director_is_heat_flow():
    grid = GridSpec(dim=2, points_per_axis=16)
    U = random_state_hat(grid, seed=2)
    U.modes[0:4] = 0.0
    t = 0.7
    out = apply_propagator(U, P, t)
    from nlcflow.spectral import _k_squared

    heat = np.exp(-_k_squared(grid) * t)
    for c in range(4, 7):
        assert np.abs(out.modes[c] - heat * U.modes[c]).max() < 1e-12
    assert np.abs(out.modes[0:4]).max() == 0.0


def test_apply_propagator_semigroup():
    grid = GridSpec(dim=2, points_per_axis=16)
    U = random_state_hat(grid, seed=3)
    once = apply_propagator(U, P, 0.9)
    twice = apply_propagator(apply_propagator(U, P, 0.4), P, 0.5)
    scale = np.abs(once.modes).max()
    assert np.abs(once.modes - twice.modes).max() < 1e-10 * scale


def test_apply_propagator_preserves_realness_exactly():
    grid = GridSpec(dim=3, points_per_axis=8)
    U = random_state_hat(grid, seed=4)
    out = apply_propagator(U, P, 1.3)
    assert is_conjugate_symmetric(out)  # exact, tol=0


def test_apply_propagator_grid_consistency():
    grid = GridSpec(dim=2, points_per_axis=16)
    bad = SpectralField.zeros(grid, components=5)
    with pytest.raises(ValueError, match="7 components"):
        apply_propagator(bad, P, 1.0)


def test_linear_rhs_is_generator_of_propagator():
    grid = GridSpec(dim=2, points_per_axis=16)
    U = random_state_hat(grid, seed=5)
    h = 1e-6
    fwd = apply_propagator(U, P, h).modes
    deriv = (fwd - U.modes) / h
    rhs = linear_rhs(U, P).modes
    scale = np.abs(rhs).max()
    assert np.abs(deriv - rhs).max() < 1e-4 * scale


# ---------------------------------------------------------------------------
# integrator weights


def test_phi_weights_match_quadrature_oracle():
    # oracle: Phi = int_0^h exp(M s) ds via the augmented matrix exponential
    h = 0.37
    for k2 in (1e-8, 1e-3, 0.5, 1.0, 4.0, 400.0):
        M = acoustic_matrix(P, k2)
        aug = np.zeros((4, 4), dtype=np.complex128)
        aug[:2, :2] = M * h
        aug[:2, 2:] = np.eye(2) * h
        Phi = sla.expm(aug)[:2, 2:]
        alpha, beta = acoustic_phi_weights(P, np.array([k2]), h)
        approx = alpha[0] * np.eye(2) + beta[0] * M
        assert np.abs(Phi - approx).max() < 1e-12 * (1.0 + np.abs(Phi).max())


def test_phi2_weights_match_quadrature_oracle():
    h = 0.21
    for k2 in (1e-8, 1e-3, 1.0, 25.0):
        M = acoustic_matrix(P, k2)
        E = sla.expm(M * h)
        W = np.linalg.solve(M @ M, E - np.eye(2) - M * h) / h if k2 > 1e-6 else None
        gamma, delta = acoustic_phi2_weights(P, np.array([k2]), h)
        approx = gamma[0] * np.eye(2) + delta[0] * M
        if W is None:
            # series limit: W -> (h/2) I + (h^2/6) M
            W = 0.5 * h * np.eye(2) + h * h / 6.0 * M
            assert np.abs(W - approx).max() < 1e-10 * h
        else:
            assert np.abs(W - approx).max() < 1e-12 * (1.0 + np.abs(W).max())


def test_scalar_phi_functions_limits():
    h = 0.5
    assert scalar_phi1(np.array([0.0]), h)[0] == h
    assert abs(scalar_phi2(np.array([0.0]), h)[0] - 0.5 * h) < 1e-15
    lam = np.array([-3.0])
    assert abs(scalar_phi1(lam, h)[0] - (np.expm1(-1.5)) / -3.0) < 1e-15
    w = (np.expm1(-1.5) + 1.5) / (9.0 * h)
    assert abs(scalar_phi2(lam, h)[0] - w) < 1e-15
