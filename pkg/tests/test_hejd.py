import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import KOU_REF, random_spec
from levy_ihr import Diffusion, Direction, HyperExpSpec, McConfig, Regime, kou, simulate_fpp
from levy_ihr.errors import DomainError
from levy_ihr.hejd import (build_dirichlet_matrix, find_roots, lc_fpp, boundary_residual,
                           randomized_fpp, solve_weights)
from levy_ihr.models import laplace_exponent

# roots of the reference Kou spec at level 10, frozen from the brentq oracle
KOU_UP_ROOTS = [21.83614924, 51.82058252]
KOU_DOWN_ROOTS = [-18.04063814, -30.61609363]


def test_diffusion_roots():
    r = find_roots(Diffusion(0.0, 1.0), 2.0)
    np.testing.assert_allclose(r.up_roots, [2.0], rtol=1e-12)
    np.testing.assert_allclose(r.down_roots, [-2.0], rtol=1e-12)


def test_kou_roots_interlace_and_match_oracle():
    r = find_roots(KOU_REF, 10.0)
    b, g = r.up_roots, r.down_roots
    assert 0 < b[0] < 50 < b[1]
    assert g[1] < -25 < g[0] < 0
    np.testing.assert_allclose(b, KOU_UP_ROOTS, rtol=1e-8)
    np.testing.assert_allclose(g, KOU_DOWN_ROOTS, rtol=1e-8)
    ob, og = oracles.roots_brentq(0, 0.2, 3, [0.5], [50], [0.5], [25], 10.0)
    np.testing.assert_allclose(b, ob, rtol=1e-12)
    np.testing.assert_allclose(g, og, rtol=1e-12)
    resid = laplace_exponent(KOU_REF, np.concatenate([b, g])) - 10.0
    assert np.max(np.abs(resid)) < 1e-10


def test_pure_jump_negative_drift_root_count():
    spec = kou(-0.01, 0.0, 3, 0.5, 50, 25)
    r = find_roots(spec, 10.0)
    assert r.regime is Regime.SIGMA_ZERO_MU_NEG
    assert r.up_roots.size == 1 and r.down_roots.size == 2


def test_pure_jump_positive_drift_root_count():
    r = find_roots(kou(0.01, 0.0, 3, 0.5, 50, 25), 10.0)
    assert r.regime is Regime.SIGMA_ZERO_MU_POS
    assert r.up_roots.size == 2 and r.down_roots.size == 1


def test_nonpositive_level_rejected():
    with pytest.raises(DomainError):
        find_roots(KOU_REF, 0.0)


def test_dirichlet_matrix_single_up_type():
    r = find_roots(KOU_REF, 10.0)
    A = build_dirichlet_matrix(KOU_REF, r, Direction.UP)
    b1, b2 = r.up_roots
    np.testing.assert_allclose(A, [[1, 1], [50 / (50 - b1), 50 / (50 - b2)]], rtol=1e-14)


def test_dirichlet_matrix_without_up_jumps():
    spec = HyperExpSpec(0.0, 0.3, 2.0, (), (), (1.0,), (10.0,))
    A = build_dirichlet_matrix(spec, find_roots(spec, 5.0), Direction.UP)
    np.testing.assert_array_equal(A, [[1.0]])


def test_diffusion_only_weights():
    fpp = randomized_fpp(Diffusion(0.0, 1.0), 2.0, Direction.DOWN)
    np.testing.assert_allclose(fpp.w_diffusion, [1.0])
    assert fpp.n_types == 0
    assert lc_fpp(fpp, "all", 0.7, 0.0) == pytest.approx(np.exp(-2.0 * 0.7))


def test_kou_down_weights_closed_vs_linear():
    r = find_roots(KOU_REF, 10.0)
    lin = solve_weights(KOU_REF, r, Direction.DOWN, "linear")
    clo = solve_weights(KOU_REF, r, Direction.DOWN, "closed")
    np.testing.assert_allclose(clo.w_jump_by_type, lin.w_jump_by_type, atol=1e-8)
    np.testing.assert_allclose(clo.w_diffusion, lin.w_diffusion, atol=1e-8)
    lit = oracles.per_type_weights_down(r.down_roots, KOU_REF.r_down, lin.w_diffusion)
    np.testing.assert_allclose(clo.w_jump_by_type, lit, atol=1e-12)
    for x in (0.01, 0.1, 0.5):
        assert boundary_residual(clo, KOU_REF, x, 0.0) < 1e-8


def test_first_diffusion_weight_literal_form():
    r = find_roots(KOU_REF, 10.0)
    fpp = solve_weights(KOU_REF, r, Direction.UP)
    assert fpp.w_diffusion[0] == pytest.approx(oracles.diffusion_weight_first_up(r.up_roots, KOU_REF.r_up), rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), m=st.integers(0, 5), n=st.integers(0, 5),
       level=st.floats(0.1, 500.0))
def test_weight_sums(seed, m, n, level):
    if m + n == 0:
        return
    spec = random_spec(np.random.default_rng(seed), m, n)
    for d in Direction:
        fpp = randomized_fpp(spec, level, d)
        assert fpp.w_diffusion.sum() == pytest.approx(1.0, abs=1e-8)
        assert fpp.w_jump_total.sum() == pytest.approx(0.0, abs=1e-8)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), m=st.integers(1, 5), n=st.integers(1, 5),
       sigma=st.sampled_from([0.0, 0.2]), mu=st.sampled_from([-0.05, 0.05]))
def test_closed_form_matches_linear_all_regimes(seed, m, n, sigma, mu):
    spec = random_spec(np.random.default_rng(seed), m, n, sigma=sigma, mu=mu)
    r = find_roots(spec, 7.0)
    for d in Direction:
        lin = solve_weights(spec, r, d, "linear")
        clo = solve_weights(spec, r, d, "closed")
        np.testing.assert_allclose(clo.w_jump_by_type, lin.w_jump_by_type, atol=1e-8)
        np.testing.assert_allclose(clo.w_diffusion, lin.w_diffusion, atol=1e-8)


def test_boundary_values():
    fpp = randomized_fpp(KOU_REF, 10.0, Direction.UP)
    assert lc_fpp(fpp, "diffusion", 0.0, 0.0) == 1.0
    assert lc_fpp(fpp, "jump_total", 0.0, 0.0) == 0.0
    assert lc_fpp(fpp, "all", 0.0, 0.0) == 1.0


def test_wrong_side_rejected():
    fpp = randomized_fpp(KOU_REF, 10.0, Direction.UP)
    with pytest.raises(DomainError):
        lc_fpp(fpp, "all", 0.1, 0.0)


@settings(max_examples=50, deadline=None)
@given(level=st.floats(0.05, 1000.0), dist=st.floats(0.0, 2.0))
def test_components_decompose(level, dist):
    for d in Direction:
        fpp = randomized_fpp(KOU_REF, level, d)
        x = -dist if d is Direction.UP else dist
        total = lc_fpp(fpp, "all", x, 0.0)
        parts = lc_fpp(fpp, "diffusion", x, 0.0) + sum(lc_fpp(fpp, i, x, 0.0) for i in range(fpp.n_types))
        assert abs(total - parts) < 1e-10
        assert -1e-10 <= total <= 1 + 1e-10


def test_randomized_probability_matches_simulation():
    level = 10.0
    fpp = randomized_fpp(KOU_REF, level, Direction.DOWN)
    mc = simulate_fpp(KOU_REF, 0.1, 0.0, Direction.DOWN,
                      McConfig(n_paths=1_000_000, seed=3, exp_horizon_rate=level))
    value = lc_fpp(fpp, "all", 0.1, 0.0)
    assert abs(value - mc.p_hat) < 3 * mc.stderr
    assert abs(lc_fpp(fpp, "diffusion", 0.1, 0.0) - mc.p_diffusion_hat) < 3 * mc.stderr_diffusion
