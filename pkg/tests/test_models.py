import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linear_sum_assignment

from nhtopo import models
from nhtopo.core import bz_grid
from nhtopo.errors import NonPositiveHopping, TooFewSites, UnknownModelKind
from nhtopo.topology import complex_gap


def match_error(a, b):
    a, b = np.ravel(a), np.ravel(b)
    cost = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(cost)
    return cost[r, c].max()


def momenta(L):
    return 2 * np.pi * np.arange(L) / L


class TestNHTI:
    def test_k_zero_values(self):
        H = models.build_nhti(1.0, 0.5, 1.0).evaluate(0.0)
        np.testing.assert_allclose(H, np.diag([3j, -3j]))

    def test_dispersion_matches_matrices(self):
        Hk = models.build_nhti(0.7, 0.3 + 0.2j, 1.1)
        ks = bz_grid(33)
        err = max(match_error(np.linalg.eigvals(Hk.matrices(ks))[i], Hk.analytic_dispersion(ks)[i]) for i in range(33))
        assert err < 1e-12

    def test_periodic_chain_is_bloch(self):
        L = 16
        chain = models.build_nhti_chain(1, 0.5, 1, L, "periodic")
        bloch = models.build_nhti(1, 0.5, 1).analytic_dispersion(momenta(L))
        assert match_error(np.linalg.eigvals(chain.matrix), bloch) < 1e-12

    def test_open_chain_shape(self):
        m = models.build_nhti_chain(1, 0.5, 1, 10)
        assert m.matrix.shape == (20, 20) and m.geometry.n_sites == 10

    def test_errors(self):
        with pytest.raises(NonPositiveHopping):
            models.build_nhti(0.0, 0.5, 1)
        with pytest.raises(TooFewSites):
            models.build_nhti_chain(1, 0.5, 1, 3)


class TestMajorana:
    def test_periodic_chain_is_bloch(self):
        L = 14
        chain = models.build_majorana_chain(1.4, 0.6, 0.5, 1.0, L, "periodic")
        bloch = models.build_majorana(1.4, 0.6, 0.5, 1.0).analytic_dispersion(momenta(L))
        assert match_error(np.linalg.eigvals(chain.matrix), bloch) < 1e-12

    def test_gap_closes_at_boundary(self):
        assert not complex_gap(models.build_majorana(1.4, 0.6, 0.5, 2.0)).gapped

    def test_gap_against_closed_form(self):
        # band separation is 2 sqrt(4|Delta|^2 sin^2 k + (mu + (tL+tR) cos k)^2)
        k = np.linspace(-np.pi, np.pi, 200001)
        oracle = 2 * np.sqrt(np.sin(k) ** 2 + (1 + 2 * np.cos(k)) ** 2).min()
        gap = complex_gap(models.build_majorana(1.4, 0.6, 0.5, 1.0)).min_separation
        assert gap == pytest.approx(oracle, abs=1e-4)
        assert oracle == pytest.approx(2 * np.sqrt(2 / 3), rel=1e-8)

    def test_open_chain_zero_modes(self):
        E = np.linalg.eigvals(models.build_majorana_chain(1.4, 0.6, 0.5, 1.0, 50).matrix)
        assert np.sum(np.abs(E) < 1e-6) == 2


class TestQSH:
    def test_dirac_algebra(self):
        alg = models.build_dirac_algebra()
        for i in range(1, 6):
            for j in range(1, 6):
                a = alg.G(i) @ alg.G(j) + alg.G(j) @ alg.G(i)
                np.testing.assert_allclose(a, 2 * np.eye(4) * (i == j), atol=1e-15)

    def test_dispersion(self):
        Hk = models.build_qsh(1, -1, 0.5, 0.8)
        ks = bz_grid(9, 2)
        E = np.linalg.eigvals(Hk.matrices(ks))
        A = models.qsh_dispersion(ks, 1, -1, 0.5, 0.8)
        assert max(match_error(E[i], A[i]) for i in range(ks.shape[0])) < 1e-10

    def test_cylinder_periodic_is_bloch(self):
        Lx, ky = 12, 0.37
        cyl = models.build_qsh_cylinder(1, -1, 0.5, 0.8, Lx, ky, "periodic")
        ks = np.column_stack([momenta(Lx), np.full(Lx, ky)])
        bloch = models.qsh_dispersion(ks, 1, -1, 0.5, 0.8)
        assert match_error(np.linalg.eigvals(cyl.matrix), bloch) < 1e-11

    def test_rectangle_periodic_is_bloch(self):
        L = 6
        rect = models.build_qsh_rectangle(1, 3, 0.8, 1.2, L, L, ("periodic", "periodic"))
        kx, ky = np.meshgrid(momenta(L), momenta(L), indexing="ij")
        ks = np.column_stack([kx.ravel(), ky.ravel()])
        assert match_error(np.linalg.eigvals(rect.matrix), models.qsh_dispersion(ks, 1, 3, 0.8, 1.2)) < 1e-11

    def test_rectangle_too_small(self):
        with pytest.raises(TooFewSites):
            models.build_qsh_rectangle(1, -1, 0.5, 0.8, 3, 10)


class TestDisorder:
    def test_zero_amplitude_is_clean(self):
        base = {"t": 1.0, "delta": 0.5, "gamma": 1.0, "L": 20}
        m = models.build_disordered("nhti", base, {"t": 0.0}, seed=3)
        np.testing.assert_array_equal(m.matrix, models.build_nhti_chain(1, 0.5, 1, 20).matrix)

    def test_deterministic(self):
        base = {"tL": 1.4, "tR": 0.6, "Delta": 0.5, "mu": 1.0, "L": 20}
        a = models.build_disordered("majorana", base, {"mu": 0.7}, seed=11, realization=4)
        b = models.build_disordered("majorana", base, {"mu": 0.7}, seed=11, realization=4)
        c = models.build_disordered("majorana", base, {"mu": 0.7}, seed=11, realization=5)
        np.testing.assert_array_equal(a.matrix, b.matrix)
        assert not np.array_equal(a.matrix, c.matrix)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**64 - 1), st.integers(0, 1000), st.integers(0, 2))
    def test_streams_uniform_and_stable(self, seed, real, slot):
        x = models.disorder_stream(seed, real, slot, 64)
        assert np.all((x >= -0.5) & (x < 0.5))
        np.testing.assert_array_equal(x[:10], models.disorder_stream(seed, real, slot, 10))

    def test_amplitude_scales_same_variates(self):
        base = {"t": 1.0, "m": -1.0, "lam": 0.5, "gamma": 0.5, "Lx": 10, "ky": 0.2}
        clean = models.build_disordered("qsh_cylinder", base, {}, 0).matrix
        h1 = models.build_disordered("qsh_cylinder", base, {"m": 0.1}, 0).matrix - clean
        h2 = models.build_disordered("qsh_cylinder", base, {"m": 0.2}, 0).matrix - clean
        np.testing.assert_allclose(h2, 2 * h1, atol=1e-14)

    def test_unknown(self):
        with pytest.raises(UnknownModelKind):
            models.build_disordered("graphene", {}, {}, 0)
        with pytest.raises(ValueError):
            models.build_disordered("nhti", {"t": 1, "delta": 0.5, "gamma": 1, "L": 10}, {"mu": 1}, 0)


class TestSmallModels:
    def test_three_level(self):
        H = models.build_three_level(1.0, 0.5, 5.0)
        assert H.shape == (3, 3)
        assert H[0, 0] == pytest.approx(-0.25j) and H[2, 2] == pytest.approx(-2.5j)
        np.testing.assert_allclose(H[1], [0.5, 0, 0.5])

    def test_dirac_chiral(self):
        p = models.ContinuumDiracParams.single(0.3, 1.0, 0.2)
        H = models.dirac_continuum(0.4, p)
        np.testing.assert_allclose(models.SZ @ H @ models.SZ, -H)
