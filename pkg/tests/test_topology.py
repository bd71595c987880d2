import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nhtopo import models, topology
from nhtopo.errors import GapClosedAtTRIM, GaplessRegion, UnknownModelKind
from nhtopo.linalg import pfaffian
from nhtopo.symmetry import deform_phase


class TestGap:
    def test_nhti_closed_form(self):
        # separation is 2 sqrt((gamma + 2t cos k)^2 + 4 delta^2 sin^2 k)
        k = np.linspace(-np.pi, np.pi, 501)
        oracle = 2 * np.sqrt((1 + 2 * np.cos(k)) ** 2 + np.sin(k) ** 2).min()
        rep = topology.complex_gap(models.build_nhti(1, 0.5, 1), 501)
        assert rep.gapped and rep.min_separation == pytest.approx(oracle, rel=1e-12)

    def test_gapless_at_transition(self):
        rep = topology.complex_gap(models.build_nhti(1, 0.5, 2.0), 501)
        assert not rep.gapped

    def test_grid_floor(self):
        with pytest.raises(ValueError):
            topology.complex_gap(models.build_nhti(1, 0.5, 1), 32)

    def test_qsh_two_dimensional(self):
        assert topology.complex_gap(models.build_qsh(1, -1, 0.5, 0.8), 65).gapped


class TestNuAI:
    @pytest.mark.parametrize("gamma,nu", [(0.0, 1), (1.5, 1), (-1.9, 1), (2.1, 0), (-3.0, 0)])
    def test_phase_diagram(self, gamma, nu):
        assert topology.nu_ai(models.build_nhti(1, 0.5, gamma)) == nu

    def test_gap_at_trim(self):
        with pytest.raises(GapClosedAtTRIM):
            topology.nu_ai(models.build_nhti(1, 0.5, 2.0))

    def test_rejects_deformed(self):
        with pytest.raises(ValueError):
            topology.nu_ai(deform_phase(models.build_nhti(1, 0.5, 1), np.pi))


class TestNuD:
    def test_topological(self):
        r = topology.nu_d(models.build_majorana(1.4, 0.6, 0.5, 1.0))
        assert r.nu == r.nu_sign == r.nu_pfaffian == 1

    def test_trivial(self):
        assert topology.nu_d(models.build_majorana(1.4, 0.6, 0.5, 3.0)).nu == 0

    def test_majorana_form_antisymmetric(self):
        Hk = models.build_majorana(1.4, 0.6, 0.5, 1.0)
        for k in (0.0, np.pi):
            A = topology.majorana_form(Hk.evaluate(k))
            np.testing.assert_allclose(A, -A.T, atol=1e-14)
            assert abs(pfaffian(A).imag) < 1e-12


class TestNuAII:
    def test_caption_points(self):
        assert topology.nu_aii(models.build_qsh(1, -1, 0.5, 0.8)).nu == 1
        assert topology.nu_aii(models.build_qsh(1, 3, 0.8, 1.2)).nu == 0

    def test_paths_agree(self):
        r = topology.nu_aii(models.build_qsh(1, -1, 0.5, 0.8))
        assert r.nu_d1 == r.nu_parity

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0.3, 2.0), st.floats(-4.0, 4.0), st.floats(0.0, 1.0), st.floats(0.0, 0.3))
    def test_formula(self, t, m, lam, gamma):
        if min(abs(m), abs(abs(m) - 2 * t)) < 0.4:
            return
        r = topology.nu_aii(models.build_qsh(t, m, lam, gamma))
        assert r.nu == topology.z2_formula(m, t)


class TestWinding:
    @pytest.mark.parametrize("m", [1.0, -0.7, 2.5])
    def test_sign(self, m):
        p = models.ContinuumDiracParams.single(0.2, m, 0.3)
        assert topology.winding_number(p) == pytest.approx(-np.sign(m) / 2, abs=1e-6)

    def test_gapless_rejected(self):
        with pytest.raises(GaplessRegion):
            topology.winding_number(models.ContinuumDiracParams.single(1.0, 0.5, 0.0))


class TestDomainWall:
    def test_bound_state(self):
        p = models.ContinuumDiracParams.wall(0.1, 1.0, 0.2, 0.0, -1.0, 0.1)
        rep = topology.domain_wall_bound_state(p, n_sites=400)
        assert rep.exists and rep.numeric_exists
        assert rep.decay_plus > 0 and rep.decay_minus > 0

    def test_no_bound_state(self):
        p = models.ContinuumDiracParams.wall(0.1, 1.0, 0.2, 0.0, 2.0, 0.1)
        rep = topology.domain_wall_bound_state(p, n_sites=400)
        assert not rep.exists and not rep.numeric_exists


class TestEdges:
    def test_nhti_edge_pair(self):
        rep = topology.find_edge_states(models.build_nhti_chain(1, 0.5, 1, 50))
        assert rep.count == 2
        assert sorted(rep.left_or_right) == ["left", "right"]
        assert np.all(np.abs(rep.midgap_energies.imag) < 1e-6)

    def test_nhti_trivial(self):
        assert topology.find_edge_states(models.build_nhti_chain(1, 0.5, 3, 50)).count == 0

    def test_majorana(self):
        rep = topology.find_edge_states(models.build_majorana_chain(1.4, 0.6, 0.5, 1.0, 50))
        assert rep.count == 2 and np.all(np.abs(rep.midgap_energies) < 1e-6)

    def test_localization_fit_synthetic(self):
        xi = 2.5
        amp = np.exp(-np.arange(30) / xi)
        assert topology.fit_localization_length(amp) == pytest.approx(xi, rel=1e-10)

    def test_qsh_cylinder_midgap(self):
        rep = topology.find_edge_states(models.build_qsh_cylinder(1, -1, 0.5, 0.8, 30, 0.0))
        assert rep.count >= 2

    def test_qsh_trivial(self):
        assert topology.find_edge_states(models.build_qsh_cylinder(1, 3, 0.8, 1.2, 30, 0.0)).count == 0


class TestDisorderSweep:
    def test_small_sweep(self):
        tab = topology.disorder_sweep("nhti", d_grid=(0.0, 1.0), n_realizations=3, seed=5)
        assert len(tab.rows) == 6
        assert all(r.n_edge == 2 for r in tab.rows)
        assert tab.summary[0].max_deviation < 1e-8

    def test_reproducible(self):
        a = topology.disorder_sweep("majorana", d_grid=(0.5,), n_realizations=2, seed=9)
        b = topology.disorder_sweep("majorana", d_grid=(0.5,), n_realizations=2, seed=9)
        for ra, rb in zip(a.rows, b.rows):
            np.testing.assert_array_equal(ra.eigenvalues, rb.eigenvalues)

    def test_unknown(self):
        with pytest.raises(UnknownModelKind):
            topology.disorder_sweep("kagome")


def _bulk_edge_mismatches(values, boundary, build, invariant):
    step = values[1] - values[0]
    bad = []
    for v in values:
        if abs(abs(v) - boundary) < 1e-9 or abs(abs(v) - boundary) <= step + 1e-9:
            continue
        nu = invariant(v)
        count = topology.find_edge_states(build(v)).count
        if (nu == 1) != (count == 2):
            bad.append((round(float(v), 6), nu, count))
    return bad


def test_bulk_edge_nhti_sweep():
    gs = np.linspace(0, 4, 41)
    bad = _bulk_edge_mismatches(
        gs, 2.0, lambda g: models.build_nhti_chain(1, 0.5, g, 50), lambda g: topology.nu_ai(models.build_nhti(1, 0.5, g))
    )
    assert bad == []


def test_bulk_edge_majorana_sweep():
    mus = np.linspace(0, 4, 41)
    bad = _bulk_edge_mismatches(
        mus,
        2.0,
        lambda mu: models.build_majorana_chain(1.4, 0.6, 0.5, mu, 50),
        lambda mu: topology.nu_d(models.build_majorana(1.4, 0.6, 0.5, mu)).nu,
    )
    assert bad == []


def test_nu_aii_parity_path_phase_independent():
    Hk = models.build_qsh(1, -1, 0.5, 0.8)
    for phi in (0.3, 1.0, np.pi, 4.0):
        assert topology.nu_aii(deform_phase(Hk, phi)).nu_parity == 1
