import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nhtopo import dynamics, models
from nhtopo.errors import DimensionMismatch, WrongGeometry
from nhtopo.linalg import eigendecompose

from conftest import random_complex


def rk4(H, psi, t, dt=1e-4):
    """Classical fourth-order Runge-Kutta on i dpsi/dt = H psi."""
    f = lambda y: -1j * (H @ y)  # noqa: E731
    n = int(round(t / dt))
    y = psi.astype(complex)
    for _ in range(n):
        k1 = f(y)
        k2 = f(y + 0.5 * dt * k1)
        k3 = f(y + 0.5 * dt * k2)
        k4 = f(y + dt * k3)
        y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


class TestWaveState:
    def test_norm_filled(self):
        s = dynamics.WaveState(np.array([3, 4j]))
        assert s.norm == pytest.approx(25.0)

    def test_inconsistent_norm(self):
        with pytest.raises(ValueError):
            dynamics.WaveState(np.array([1.0, 0]), norm=2.0)

    def test_intensities(self):
        s = dynamics.WaveState(np.array([1, 1j, 0]))
        np.testing.assert_allclose(s.intensities(), [0.5, 0.5, 0])


class TestEvolve:
    def test_rk4_oracle_three_level(self):
        H = models.build_three_level(1.0, 0.5, 5.0)
        g = np.array([0, 1, 0], dtype=complex)
        psi = g
        tprev = 0.0
        states = dynamics.evolve(H, g, [0.5, 1.0, 2.0])
        for s in states:
            psi = rk4(H, psi, s.time - tprev)
            tprev = s.time
            assert np.max(np.abs(s.amplitudes - psi)) < 1e-6

    def test_time_zero_exact(self, rng):
        H = random_complex(rng, 5)
        psi = rng.standard_normal(5) + 0j
        assert np.array_equal(dynamics.evolve(H, psi, [0.0])[0].amplitudes, psi)

    def test_hermitian_conserves_norm(self, rng):
        A = random_complex(rng, 8)
        psi = rng.standard_normal(8) + 0j
        psi /= np.linalg.norm(psi)
        for s in dynamics.evolve(A + A.conj().T, psi, np.linspace(0, 20, 11)):
            assert abs(s.norm - 1) < 1e-9

    @pytest.mark.parametrize(
        "H",
        [
            models.build_nhti_chain(1, 1, 0.2, 20).matrix,
            models.build_majorana_chain(1.4, 0.6, 0.5, 1.0, 12).matrix,
            models.build_qsh_cylinder(1, -1, 0.5, 0.8, 10, 0.3).matrix,
        ],
    )
    def test_paths_agree(self, H):
        psi = np.ones(H.shape[0], dtype=complex) / np.sqrt(H.shape[0])
        ts = [0.5, 2.0]
        a = dynamics.evolve(H, psi, ts, method="eigen")
        b = dynamics.evolve(H, psi, ts, method="propagator")
        for x, y in zip(a, b):
            scale = max(1.0, np.linalg.norm(y.amplitudes))
            assert np.max(np.abs(x.amplitudes - y.amplitudes)) < 1e-7 * scale

    def test_defective_uses_propagator(self):
        J = np.array([[0, 1], [0, 0]], dtype=complex)
        s = dynamics.evolve(J, np.array([0, 1], dtype=complex), [2.0])[0]
        np.testing.assert_allclose(s.amplitudes, [-2j, 1])

    def test_errors(self):
        with pytest.raises(DimensionMismatch):
            dynamics.evolve(np.eye(3), np.ones(2), [1.0])
        with pytest.raises(ValueError):
            dynamics.evolve(np.eye(2), np.ones(2), [2.0, 1.0])

    @settings(max_examples=25, deadline=None)
    @given(st.integers(2, 12), st.integers(0, 2**32 - 1), st.floats(0.0, 5.0))
    def test_norm_bound(self, n, seed, t):
        rng = np.random.default_rng(seed)
        H = random_complex(rng, n, 0.5)
        psi = dynamics.WaveState(rng.standard_normal(n) + 1j * rng.standard_normal(n))
        spec = eigendecompose(H)
        s = dynamics.evolve(H, psi, [t], spectrum=spec)[0]
        assert np.sqrt(s.norm) <= dynamics.norm_bound(spec, psi, t) * (1 + 1e-6)


class TestThreeLevel:
    def test_initial(self):
        r = dynamics.three_level_populations(1, 0.5, 5, [0.0])
        assert r.p1[0] == 0 and r.p2[0] == 0

    def test_mirror_symmetry(self):
        r = dynamics.three_level_populations(1, 0.8, 0.8, np.linspace(0, 10, 51))
        np.testing.assert_allclose(r.p1, r.p2, atol=1e-14)

    def test_early_suppression(self):
        r = dynamics.three_level_populations(1, 0.5, 5, np.arange(1, 51) * 0.1)
        assert np.all(r.p2 < r.p1)


class TestEdgePopulation:
    def test_initial_profile(self):
        m = models.build_nhti_chain(1, 1, 0.2, 50)
        r = dynamics.edge_population_experiment(m, [0.0])
        x = np.arange(1, 51)
        w = np.repeat(np.exp(-2 * x), 2)
        np.testing.assert_allclose(r.profiles[0], w / w.sum(), atol=1e-15)

    def test_normalized(self):
        m = models.build_nhti_chain(1, 1, 3.0, 50)
        r = dynamics.edge_population_experiment(m, np.linspace(0, 10, 6))
        assert np.all(r.profiles >= 0) and np.all(r.profiles <= 1)
        np.testing.assert_allclose(r.profiles.sum(axis=1), 1, atol=1e-10)
        assert r.log_amplification[-1] > np.log(1e12)

    def test_cutoff_flags_saturation(self):
        m = models.build_nhti_chain(1, 1, 3.0, 50)
        r = dynamics.edge_population_experiment(m, [0.0, 1.0, 10.0], cutoff=1e12)
        assert list(r.saturated) == [False, False, True]
        assert np.all(np.isnan(r.profiles[2]))

    def test_geometry(self):
        with pytest.raises(WrongGeometry):
            dynamics.edge_population_experiment(models.build_majorana_chain(1.4, 0.6, 0.5, 1.0, 10), [1.0])


class TestWavepacket:
    def test_maps_normalized_and_paths_agree(self):
        m = models.build_qsh_rectangle(1, -1, 0.5, 0.8, 8, 8)
        a = dynamics.wavepacket_2d(m, [0.0, 2.0, 4.0])
        b = dynamics.wavepacket_2d(m, [0.0, 2.0, 4.0], method="dense")
        np.testing.assert_allclose(a.maps.sum(axis=(1, 2)), 1, atol=1e-12)
        np.testing.assert_allclose(a.maps, b.maps, atol=1e-9)

    def test_geometry(self):
        with pytest.raises(WrongGeometry):
            dynamics.wavepacket_2d(models.build_qsh_cylinder(1, -1, 0.5, 0.8, 10, 0.0), [1.0])
