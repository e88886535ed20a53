from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from eventfhn import SystemParams, build_grid, build_system, discrete_l2_norm, implicit_euler_solve
from eventfhn.discretization import dirichlet_laplacian


def coeffs(a=-11.0, rho=1.0, gamma=1.0, delta=1.0, lambda_damp=1.0):
    return SimpleNamespace(a=a, rho=rho, gamma=gamma, delta=delta, lambda_damp=lambda_damp)


class TestGrid:
    def test_default_grid(self):
        g = build_grid(40, 2000, 6)
        assert g.h == pytest.approx(1 / 41, abs=1e-15)
        assert g.dt == pytest.approx(0.003, abs=1e-15)
        assert g.h * 41 == pytest.approx(1.0, abs=1e-14)
        assert g.dt * 2000 == pytest.approx(6.0, abs=1e-12)
        assert g.x_nodes.shape == (40,) and g.t_nodes.shape == (2001,)
        assert g.t_nodes[-1] == pytest.approx(6.0, abs=1e-12)

    def test_small_grid(self):
        g = build_grid(3, 1, 1)
        assert (g.h, g.dt) == (0.25, 1.0)
        assert np.allclose(g.x_nodes, [0.25, 0.5, 0.75])

    @pytest.mark.parametrize("args", [(1, 10, 1.0), (2, 10, 1.0), (5, 0, 1.0), (5, 10, 0.0), (5, 10, -1.0), (4.5, 10, 1.0)])
    def test_rejects_bad_arguments(self, args):
        with pytest.raises(ValueError):
            build_grid(*args)


class TestSystem:
    def test_hand_assembled_entry(self):
        g = build_grid(3, 1, 1.0)
        s = build_system(g, SystemParams(a=-11.0, rho=1.0, gamma=1.0, delta=1.0))
        a = s.a_h.toarray()
        assert a[0, 0] == pytest.approx(21.0)
        # full hand assembly at h = 1/4
        lap = 16.0 * np.array([[2, -1, 0], [-1, 2, -1], [0, -1, 2]])
        expected = np.block([[lap - 11 * np.eye(3), np.eye(3)], [-np.eye(3), np.eye(3)]])
        assert np.allclose(a, expected)

    def test_control_column(self):
        for n in (3, 10, 40):
            s = build_system(build_grid(n, 1, 1.0), SystemParams())
            nz = np.flatnonzero(s.b_h)
            assert nz.tolist() == [n - 1]
            assert s.b_h[n - 1] == pytest.approx((n + 1) ** 2)

    def test_decoupled_blocks(self):
        n = 6
        s = build_system(build_grid(n, 1, 1.0), coeffs(rho=0.0, gamma=0.0, delta=2.5))
        a = s.a_h.toarray()
        assert np.all(a[:n, n:] == 0) and np.all(a[n:, :n] == 0)
        assert np.array_equal(a[n:, n:], 2.5 * np.eye(n))

    def test_coupling_and_gain_padding(self):
        s = build_system(build_grid(8, 1, 1.0), SystemParams(a=-3.0, rho=0.5, gamma=2.0, delta=0.7))
        assert np.array_equal(s.coupling, [[-3.0, 0.5], [-2.0, 0.7]])
        assert np.all(s.gain[8:] == 0.0)
        assert np.all(s.gain[:8] < 0.0)


class TestLaplacian:
    def test_spd(self):
        lap = dirichlet_laplacian(30, 1 / 31).toarray()
        assert np.allclose(lap, lap.T)
        assert np.linalg.eigvalsh(lap).min() > 0

    def test_smallest_eigenvalue_converges(self):
        lap = dirichlet_laplacian(80, 1 / 81).toarray()
        assert np.linalg.eigvalsh(lap).min() == pytest.approx(np.pi**2, rel=0.01)


class TestImplicitEuler:
    def test_homogeneous(self):
        g = build_grid(10, 5, 1.0)
        s = build_system(g, SystemParams())
        assert np.all(implicit_euler_solve(s, g, np.zeros(20), 0.0) == 0.0)

    def test_discrete_eigenmode_decay(self):
        g = build_grid(40, 100, 0.1)
        s = build_system(g, coeffs(a=0.0, rho=0.0, gamma=0.0, delta=1.0))
        z = np.concatenate([np.sin(np.pi * g.x_nodes), np.zeros(40)])
        mu = 2.0 / g.h**2 * (1 - np.cos(np.pi * g.h))
        nxt = implicit_euler_solve(s, g, z, 0.0)
        assert np.allclose(nxt[:40], z[:40] / (1 + g.dt * mu), rtol=1e-12, atol=1e-15)

    def test_w_conserved_without_ode_dynamics(self):
        g = build_grid(12, 10, 1.0)
        s = build_system(g, coeffs(gamma=0.0, delta=0.0))
        rng = np.random.default_rng(3)
        z = rng.normal(size=24)
        nxt = implicit_euler_solve(s, g, z, 0.7)
        assert np.allclose(nxt[12:], z[12:], rtol=0, atol=1e-14)

    def test_factorization_reuse_is_bit_identical(self):
        g = build_grid(20, 10, 1.0)
        s = build_system(g, SystemParams())
        z = np.linspace(-1, 1, 40)
        first = implicit_euler_solve(s, g, z, 0.3)
        for _ in range(3):
            assert np.array_equal(implicit_euler_solve(s, g, z, 0.3), first)

    def test_matches_dense_solve(self):
        g = build_grid(15, 10, 0.5)
        s = build_system(g, SystemParams())
        z = np.cos(np.arange(30.0))
        mat = np.eye(30) + g.dt * s.a_h.toarray()
        expected = np.linalg.solve(mat, z + g.dt * s.b_h * 1.25)
        assert np.allclose(implicit_euler_solve(s, g, z, 1.25), expected, rtol=1e-12, atol=1e-12)

    def test_other_dt_refactorizes(self):
        g = build_grid(15, 10, 0.5)
        s = build_system(g, SystemParams())
        g2 = build_grid(15, 20, 0.5)
        z = np.ones(30)
        expected = np.linalg.solve(np.eye(30) + g2.dt * s.a_h.toarray(), z)
        assert np.allclose(implicit_euler_solve(s, g2, z, 0.0), expected)

    def test_rejects_wrong_length(self):
        g = build_grid(5, 1, 1.0)
        s = build_system(g, SystemParams())
        with pytest.raises(ValueError):
            implicit_euler_solve(s, g, np.zeros(9), 0.0)

    @settings(max_examples=40, deadline=None)
    @given(
        a=st.floats(0.0, 20.0),
        z=arrays(np.float64, 32, elements=st.floats(-10, 10)),
    )
    def test_v_norm_monotone_for_spd_decoupled(self, a, z):
        g = build_grid(16, 10, 0.2)
        s = build_system(g, coeffs(a=a, rho=0.0, gamma=0.0))
        nxt = implicit_euler_solve(s, g, z, 0.0)
        assert discrete_l2_norm(nxt[:16], g.h) <= discrete_l2_norm(z[:16], g.h) * (1 + 1e-12) + 1e-300


class TestNorm:
    def test_zero(self):
        assert discrete_l2_norm(np.zeros(7), 0.1) == 0.0

    def test_ones(self):
        assert discrete_l2_norm(np.ones(40), 1 / 41) == pytest.approx(np.sqrt(40 / 41), abs=1e-12)

    def test_sine_samples(self):
        g = build_grid(40, 1, 1.0)
        assert discrete_l2_norm(np.sin(np.pi * g.x_nodes), g.h) == pytest.approx(np.sqrt(0.5), abs=1e-3)
