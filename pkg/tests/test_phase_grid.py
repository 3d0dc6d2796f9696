import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boltzlab.phase_grid import (
    DistributionFunction,
    NormTrace,
    PhaseGrid,
    lebesgue_norm_a,
    load_snapshot,
    make_gaussian,
    make_maxwellian,
    mixed_norm_xv,
    save_snapshot,
    time_norm,
)

from conftest import random_distribution


def gaussian_norm_closed_form(amplitude, sigma_x, sigma_v, r, p, dim):
    """Unbounded-domain separable Gaussian mixed norm, per 1-d closed forms."""
    return (
        amplitude
        * (2.0 * math.pi * sigma_x ** 2 / r) ** (dim / (2.0 * r))
        * (2.0 * math.pi * sigma_v ** 2 / p) ** (dim / (2.0 * p))
    )


class TestGridGeometry:
    def test_validation(self):
        with pytest.raises(ValueError):
            PhaseGrid(dim=4, x_period=1, n_x=8, v_max=1, n_v=8)
        with pytest.raises(ValueError):
            PhaseGrid(dim=2, x_period=1, n_x=7, v_max=1, n_v=8)
        with pytest.raises(ValueError):
            PhaseGrid(dim=2, x_period=1, n_x=2, v_max=1, n_v=8)

    def test_cell_centers(self):
        g = PhaseGrid(dim=2, x_period=2.0, n_x=4, v_max=1.0, n_v=4)
        assert np.allclose(g.x_nodes, [0.25, 0.75, 1.25, 1.75])
        assert np.allclose(g.v_nodes, [-0.75, -0.25, 0.25, 0.75])

    def test_shape_mismatch_rejected(self, grid2d_small):
        with pytest.raises(ValueError):
            DistributionFunction(grid2d_small, np.zeros((3, 3)))

    def test_nonfinite_rejected(self, grid2d_small):
        vals = np.zeros(grid2d_small.shape)
        vals[0, 0, 0, 0] = np.inf
        with pytest.raises(ValueError):
            DistributionFunction(grid2d_small, vals)


class TestMixedNorm:
    def test_constant_field(self, grid2d_small):
        g = grid2d_small
        c = 0.7
        f = DistributionFunction(g, np.full(g.shape, c))
        for inv_r, inv_p in [(F(1, 2), F(1, 3)), (F(1, 4), F(1, 2)), (F(1, 1), F(1, 1))]:
            r, p = 1 / inv_r, 1 / inv_p
            expect = c * g.x_period ** (g.dim / r) * (2 * g.v_max) ** (g.dim / p)
            assert mixed_norm_xv(f, inv_r, inv_p) == pytest.approx(expect, rel=1e-12)

    def test_sup_reading(self, grid2d_small):
        g = grid2d_small
        vals = np.zeros(g.shape)
        vals[1, 2, 3, 4] = -3.0
        f = DistributionFunction(g, vals)
        assert mixed_norm_xv(f, 0, 0) == 3.0

    def test_separable_gaussian_closed_form(self):
        g = PhaseGrid(dim=2, x_period=8.0, n_x=32, v_max=4.0, n_v=32)
        sx, sv = 0.6, 0.7
        f = make_gaussian(g, x0=[4, 4], v0=[0, 0], sigma_x=sx, sigma_v=sv, amplitude=1.0)
        for r, p in [(2.0, 2.0), (5 / 2, 5 / 3), (3.0, 1.5)]:
            got = mixed_norm_xv(f, 1 / r, 1 / p)
            want = gaussian_norm_closed_form(1.0, sx, sv, r, p, 2)
            assert got == pytest.approx(want, rel=1e-2)

    def test_reduces_to_joint_norm(self, grid2d_small, rng):
        f = random_distribution(grid2d_small, rng)
        assert mixed_norm_xv(f, F(1, 3), F(1, 3)) == lebesgue_norm_a(f, F(1, 3))

    def test_single_cell_indicator(self, grid2d_small):
        g = grid2d_small
        vals = np.zeros(g.shape)
        vals[0, 0, 0, 0] = 1.0
        f = DistributionFunction(g, vals)
        for a in (2.0, 3.0):
            want = (g.x_cell_volume * g.v_cell_volume) ** (1 / a)
            assert lebesgue_norm_a(f, 1 / a) == pytest.approx(want, rel=1e-12)

    def test_homogeneity(self, grid2d_small, rng):
        f = random_distribution(grid2d_small, rng, nonnegative=False)
        for inv in (F(1, 2), F(2, 5)):
            assert lebesgue_norm_a(-2.0 * f, inv) == pytest.approx(
                2.0 * lebesgue_norm_a(f, inv), rel=1e-12)

    def test_triangle_inequality(self, grid2d_small, rng):
        f = random_distribution(grid2d_small, rng)
        g = random_distribution(grid2d_small, rng)
        for inv_r, inv_p in [(F(1, 2), F(1, 2)), (F(2, 5), F(3, 5))]:
            assert mixed_norm_xv(f + g, inv_r, inv_p) <= (
                mixed_norm_xv(f, inv_r, inv_p) + mixed_norm_xv(g, inv_r, inv_p) + 1e-12)

    def test_monotone_in_absolute_value(self, grid2d_small, rng):
        f = random_distribution(grid2d_small, rng)
        g = DistributionFunction(grid2d_small, f.values * rng.uniform(0, 1, f.values.shape))
        assert mixed_norm_xv(g, F(1, 2), F(1, 3)) <= mixed_norm_xv(f, F(1, 2), F(1, 3))

    def test_continuity_over_exponent_grid(self):
        g = PhaseGrid(dim=2, x_period=4.0, n_x=16, v_max=3.0, n_v=16)
        f = make_gaussian(g, x0=[2, 2], v0=[0, 0], sigma_x=0.7, sigma_v=0.8, amplitude=1.0)
        inv_vals = np.linspace(0.2, 0.8, 5)
        norms = np.array([[mixed_norm_xv(f, ir, ip) for ip in inv_vals] for ir in inv_vals])
        # no discretization cliffs: neighbor ratios stay near one
        for axis in (0, 1):
            ratios = np.diff(np.log(norms), axis=axis)
            assert np.all(np.abs(ratios) < 0.8)

    def test_refinement_stability(self):
        vals = {}
        for n in (16, 32):
            g = PhaseGrid(dim=2, x_period=8.0, n_x=n, v_max=4.0, n_v=n)
            f = make_gaussian(g, x0=[4, 4], v0=[0, 0], sigma_x=1.0, sigma_v=1.0,
                              amplitude=1.0)
            vals[n] = mixed_norm_xv(f, F(2, 5), F(3, 5))
        assert abs(vals[32] - vals[16]) / vals[16] < 0.005


class TestTimeNorm:
    def test_constant_trace(self):
        tr = NormTrace(np.linspace(0, 2, 9), np.full(9, 3.0))
        assert time_norm(tr, F(1, 1)) == pytest.approx(6.0, rel=1e-12)

    def test_sup(self):
        tr = NormTrace(np.linspace(0, 1, 5), np.array([1.0, 4.0, 2.0, 0.5, 1.5]))
        assert time_norm(tr, 0) == 4.0

    def test_exponential_decay_oracle(self):
        t = np.arange(0, 5.0 + 1e-12, 0.01)
        tr = NormTrace(t, np.exp(-t))
        want = math.sqrt((1 - math.exp(-10.0)) / 2.0)
        assert time_norm(tr, F(1, 2)) == pytest.approx(want, abs=1e-3)

    def test_validation(self):
        with pytest.raises(ValueError):
            NormTrace(np.array([0.0, 0.0]), np.array([1.0, 1.0]))
        with pytest.raises(ValueError):
            NormTrace(np.array([0.0, 1.0]), np.array([1.0, -1.0]))
        with pytest.raises(ValueError):
            NormTrace(np.array([]), np.array([]))


class TestDataFamilies:
    def test_zero_amplitude(self, grid2d_small):
        f = make_gaussian(grid2d_small, x0=[2, 2], v0=[0, 0], sigma_x=1.2,
                          sigma_v=1.5, amplitude=0.0)
        assert not f.values.any()

    def test_reflection_symmetry(self):
        g = PhaseGrid(dim=2, x_period=4.0, n_x=8, v_max=3.0, n_v=8)
        # center on a node-symmetric point: midway between cell centers
        f = make_gaussian(g, x0=[2.0, 2.0], v0=[0, 0], sigma_x=1.1, sigma_v=1.6,
                          amplitude=1.0)
        assert np.allclose(f.values, f.values[::-1, :, :, :], rtol=1e-13)
        assert np.allclose(f.values, f.values[:, :, ::-1, :], rtol=1e-13)

    def test_unresolvable_width(self, grid2d_small):
        with pytest.raises(ValueError):
            make_gaussian(grid2d_small, [2, 2], [0, 0], sigma_x=0.1, sigma_v=1.5,
                          amplitude=1.0)

    def test_maxwellian_mass(self):
        g = PhaseGrid(dim=2, x_period=4.0, n_x=4, v_max=5.0, n_v=32)
        rho = 1.3
        m = make_maxwellian(g, rho=rho, u=[0, 0], temperature=1.0)
        mass = m.values[0, 0].sum() * g.v_cell_volume
        assert mass == pytest.approx(rho, rel=1e-2)

    def test_maxwellian_validation(self, grid2d_small):
        with pytest.raises(ValueError):
            make_maxwellian(grid2d_small, rho=1.0, u=[0, 0], temperature=-1.0)

    @settings(max_examples=20, deadline=None)
    @given(amp=st.floats(-2.0, 2.0, allow_nan=False))
    def test_gaussian_scales_linearly(self, amp):
        g = PhaseGrid(dim=2, x_period=4.0, n_x=8, v_max=3.0, n_v=8)
        base = make_gaussian(g, [2, 2], [0, 0], 1.2, 1.5, 1.0)
        scaled = make_gaussian(g, [2, 2], [0, 0], 1.2, 1.5, amp)
        assert np.allclose(scaled.values, amp * base.values, atol=1e-14)


class TestSnapshotIO:
    def test_roundtrip_exact(self, grid2d_small, rng, tmp_path):
        f = random_distribution(grid2d_small, rng)
        path = tmp_path / "f.bin"
        save_snapshot(f, path)
        g = load_snapshot(path)
        assert g.grid == f.grid
        assert np.array_equal(g.values, f.values)
        assert g.nonnegative == f.nonnegative

    def test_rejects_garbage(self, tmp_path):
        path = tmp_path / "junk.bin"
        path.write_bytes(b"\x00\x01\x02 not a snapshot\n123")
        with pytest.raises(ValueError):
            load_snapshot(path)
