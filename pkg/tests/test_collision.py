import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boltzlab.collision import (
    BoundSampleReport,
    CollisionKernel,
    _gain_arrays,
    _loss_arrays,
    build_kernel,
    collision_operator,
    gain_term,
    grad_cutoff_constant,
    loss_term,
    make_kernel,
    post_collision,
    verify_bilinear_bound,
)
from boltzlab.phase_grid import DistributionFunction, PhaseGrid, lebesgue_norm_a, make_maxwellian

from conftest import random_distribution
from reference_collision import reference_gain, reference_loss

vec2 = st.lists(st.floats(-3, 3, allow_nan=False), min_size=2, max_size=2)


class TestPostCollision:
    def test_perpendicular_axis_no_exchange(self):
        v, vs = np.array([1.0, 0.0]), np.array([-1.0, 0.0])
        omega = np.array([0.0, 1.0])  # perpendicular to v - v*
        vp, vsp = post_collision(v, vs, omega)
        assert np.allclose(vp, v) and np.allclose(vsp, vs)

    def test_parallel_axis_swaps(self):
        v, vs = np.array([1.0, 2.0]), np.array([-0.5, 0.3])
        u = v - vs
        omega = u / np.linalg.norm(u)
        vp, vsp = post_collision(v, vs, omega)
        assert np.allclose(vp, vs) and np.allclose(vsp, v)

    @settings(max_examples=200, deadline=None)
    @given(v=vec2, vs=vec2, ang=st.floats(0, 2 * math.pi))
    def test_momentum_and_energy_conserved(self, v, vs, ang):
        v, vs = np.array(v), np.array(vs)
        omega = np.array([math.cos(ang), math.sin(ang)])
        vp, vsp = post_collision(v, vs, omega)
        assert np.allclose(vp + vsp, v + vs, atol=1e-12)
        assert np.isclose(vp @ vp + vsp @ vsp, v @ v + vs @ vs, atol=1e-12)

    def test_relative_speed_preserved(self):
        rng = np.random.default_rng(3)
        v, vs = rng.normal(size=3), rng.normal(size=3)
        omega = rng.normal(size=3)
        omega /= np.linalg.norm(omega)
        vp, vsp = post_collision(v, vs, omega)
        assert np.isclose(np.linalg.norm(vp - vsp), np.linalg.norm(v - vs), atol=1e-12)


class TestAngularRule:
    def test_half_circle_measure(self):
        ker = make_kernel(2, 0, epsilon=0.0, n_angular=64)
        assert grad_cutoff_constant(ker) == pytest.approx(math.pi, abs=1e-6)

    def test_zero_angular_function(self):
        ker = make_kernel(2, 0, epsilon=0.0, b=lambda mu: 0.0 * mu, n_angular=8)
        assert grad_cutoff_constant(ker) == 0.0

    def test_hemisphere_measure(self):
        ker = make_kernel(3, 0, epsilon=0.0, n_angular=32)
        # cap height 1: area 2 pi
        assert grad_cutoff_constant(ker) == pytest.approx(2 * math.pi, rel=1e-12)

    def test_nonconstant_angular_function(self):
        # integral of cos(theta) over the 3-d cap: 2 pi * 1/2
        ker = make_kernel(3, 0, epsilon=0.0, b=lambda mu: mu, n_angular=32)
        assert grad_cutoff_constant(ker) == pytest.approx(math.pi, rel=1e-10)

    def test_angles_restricted_to_quarter(self):
        for dim in (2, 3):
            ker = make_kernel(dim, 0, epsilon=0.0, n_angular=16)
            assert np.all(ker.mu >= 0.0) and np.all(ker.mu <= 1.0)

    def test_dimension_mismatch(self):
        ker = make_kernel(2, 0, epsilon=0.0, n_angular=8)
        with pytest.raises(ValueError):
            grad_cutoff_constant(ker, 3)

    def test_gamma_validation(self):
        with pytest.raises(ValueError):
            make_kernel(2, F(-5, 2), epsilon=0.1)
        with pytest.raises(ValueError):
            make_kernel(2, F(1, 2), epsilon=0.1)


def tiny_fields(rng, grid, count):
    pairs = []
    for _ in range(count):
        f = random_distribution(grid, rng)
        g = random_distribution(grid, rng)
        pairs.append((f, g))
    return pairs


class TestOracleEquivalence:
    @pytest.mark.parametrize("gamma", [F(0), F(-1, 2), F(-1)])
    def test_two_dim_gain_and_loss(self, gamma, rng):
        grid = PhaseGrid(dim=2, x_period=4.0, n_x=4, v_max=3.0, n_v=6)
        ker = build_kernel(grid, gamma, n_angular=8)
        for f, g in tiny_fields(rng, grid, 3):
            got = gain_term(f, g, ker)
            fx = f.xv_view()
            for cell in (0, 7):
                want = reference_gain(fx[cell], g.xv_view()[cell], ker,
                                      grid.n_v, grid.v_max)
                np.testing.assert_allclose(got.xv_view()[cell], want, rtol=1e-12,
                                           atol=1e-300)
            got_l = loss_term(f, g, ker)
            want_l = reference_loss(fx[0], g.xv_view()[0], ker, grid.n_v, grid.v_max)
            np.testing.assert_allclose(got_l.xv_view()[0], want_l, rtol=1e-12)

    def test_three_dim_gain_and_loss(self, rng):
        grid = PhaseGrid(dim=3, x_period=4.0, n_x=4, v_max=3.0, n_v=6)
        ker = build_kernel(grid, F(-1), n_angular=8)
        f = random_distribution(grid, rng)
        g = random_distribution(grid, rng)
        got = gain_term(f, g, ker).xv_view()[0]
        want = reference_gain(f.xv_view()[0], g.xv_view()[0], ker, grid.n_v, grid.v_max)
        np.testing.assert_allclose(got, want, rtol=1e-12)
        got_l = loss_term(f, g, ker).xv_view()[0]
        want_l = reference_loss(f.xv_view()[0], g.xv_view()[0], ker, grid.n_v, grid.v_max)
        np.testing.assert_allclose(got_l, want_l, rtol=1e-12)


class TestOperatorAlgebra:
    def test_zero_second_argument(self, grid2d_tiny, rng):
        f = random_distribution(grid2d_tiny, rng)
        zero = DistributionFunction(grid2d_tiny, np.zeros(grid2d_tiny.shape))
        ker = build_kernel(grid2d_tiny, F(-1, 2), n_angular=8)
        assert not gain_term(f, zero, ker).values.any()
        assert not loss_term(zero, f, ker).values.any()
        assert not collision_operator(zero, ker).values.any()

    def test_bilinearity(self, grid2d_tiny, rng):
        f = random_distribution(grid2d_tiny, rng)
        g = random_distribution(grid2d_tiny, rng)
        ker = build_kernel(grid2d_tiny, F(-1, 2), n_angular=8)
        for op in (gain_term, loss_term):
            scaled = op(2.5 * f, -1.5 * g, ker)
            base = op(f, g, ker)
            np.testing.assert_allclose(scaled.values, 2.5 * -1.5 * base.values,
                                       rtol=1e-12, atol=1e-300)

    def test_grid_mismatch(self, grid2d_tiny, grid2d_small, rng):
        ker = build_kernel(grid2d_tiny, F(0), n_angular=8)
        with pytest.raises(ValueError):
            gain_term(random_distribution(grid2d_tiny, rng),
                      random_distribution(grid2d_small, rng), ker)

    def test_kernel_grid_dimension_mismatch(self, grid2d_tiny, rng):
        ker = make_kernel(3, F(0), epsilon=0.1, n_angular=8)
        f = random_distribution(grid2d_tiny, rng)
        with pytest.raises(ValueError):
            gain_term(f, f, ker)

    def test_loss_closed_form_maxwell_molecules(self, grid2d_tiny, rng):
        # gamma = 0, b = b0: the loss collapses to b0 |cap| f * (sum g dv^N)
        b0 = 0.7
        ker = build_kernel(grid2d_tiny, F(0), b=lambda mu: b0 * np.ones_like(mu),
                           n_angular=8, epsilon=0.0)
        f = random_distribution(grid2d_tiny, rng)
        g = random_distribution(grid2d_tiny, rng)
        got = loss_term(f, g, ker)
        gv = g.xv_view().sum(axis=1) * grid2d_tiny.v_cell_volume
        want = b0 * math.pi * f.xv_view() * gv[:, None]
        np.testing.assert_allclose(got.xv_view(), want, rtol=1e-12)

    def test_galilean_shift_equivariance(self, rng):
        # whole-cell velocity shift of compactly supported data commutes
        # with the collision operator (same relative geometry)
        grid = PhaseGrid(dim=2, x_period=4.0, n_x=4, v_max=4.0, n_v=8)
        ker = build_kernel(grid, F(-1, 2), n_angular=8)
        vals = np.zeros(grid.shape)
        vals[:, :, 2:5, 2:5] = rng.uniform(size=(4, 4, 3, 3))
        f = DistributionFunction(grid, vals)
        shifted = DistributionFunction(grid, np.roll(vals, (1, 1), axis=(2, 3)))
        q = collision_operator(f, ker)
        q_shifted = collision_operator(shifted, ker)
        want = np.roll(q.values, (1, 1), axis=(2, 3))
        # central block: away from the box boundary, where truncation differs
        np.testing.assert_allclose(q_shifted.values[:, :, 2:6, 2:6],
                                   want[:, :, 2:6, 2:6], rtol=1e-12, atol=1e-16)


@pytest.fixture(scope="module")
def maxwellian_setup():
    grid = PhaseGrid(dim=2, x_period=4.0, n_x=4, v_max=4.0, n_v=16)
    ker = build_kernel(grid, F(0), n_angular=16)
    m = make_maxwellian(grid, rho=1.0, u=[0, 0], temperature=1.0)
    return grid, ker, m


def x_uniform_v_gaussian(grid, v0, sigma_v, amplitude=1.0):
    vn = grid.v_node_coords()
    prof = amplitude * np.exp(-0.5 * np.sum((vn - np.asarray(v0)) ** 2, axis=1)
                              / sigma_v ** 2)
    vals = np.broadcast_to(prof, (grid.n_x_total, grid.n_v_total)).reshape(grid.shape)
    return DistributionFunction(grid, vals.copy(), nonnegative=amplitude >= 0)


class TestCollisionInvariants:
    def test_maxwellian_near_equilibrium(self, maxwellian_setup):
        grid, ker, m = maxwellian_setup
        qp = gain_term(m, m, ker)
        q = qp - loss_term(m, m, ker)
        rel = lebesgue_norm_a(q, 0.5) / lebesgue_norm_a(qp, 0.5)
        assert rel < 0.05

    def test_moment_decay(self, maxwellian_setup):
        grid, ker, _ = maxwellian_setup
        f = x_uniform_v_gaussian(grid, v0=[0.5, -0.3], sigma_v=1.2)
        q = collision_operator(f, ker).xv_view()
        qp = gain_term(f, f, ker).xv_view()
        scale = np.abs(qp).sum(axis=1).max() * grid.v_cell_volume
        mass = np.abs(q.sum(axis=1)).max() * grid.v_cell_volume
        assert mass / scale < 0.05
        vn = grid.v_node_coords()
        for d in range(grid.dim):
            mom = np.abs(q @ vn[:, d]).max() * grid.v_cell_volume
            mom_scale = (np.abs(qp) @ np.abs(vn[:, d])).max() * grid.v_cell_volume
            assert mom / mom_scale < 0.05


class TestBilinearBounds:
    def test_relation_violation(self):
        with pytest.raises(ValueError):
            verify_bilinear_bound("gain", 2, 2, 2, dim=2, gamma=F(0))

    def test_exponent_range(self):
        with pytest.raises(ValueError):
            verify_bilinear_bound("gain", 1, 2, 2, dim=2, gamma=F(0))

    def test_which_validation(self):
        with pytest.raises(ValueError):
            verify_bilinear_bound("both", 2, 2, 4, dim=2, gamma=F(-1, 2))

    def test_sampled_ratios_finite_and_stable(self):
        rep = verify_bilinear_bound(
            "gain", F(3, 2), F(3, 2), 3, dim=2, gamma=F(0),
            resolutions=(8, 12), samples=12, seed=0, n_angular=8)
        assert rep.max_ratio[8] > 0 and math.isfinite(rep.max_ratio[12])
        assert rep.drift < 0.5
        d = rep.to_dict()
        assert d["exponents"]["r_v"] == "3"
