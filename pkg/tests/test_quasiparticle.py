"""Quasi-particle entropy/contour quadratures and the equilibration gate."""

import numpy as np
import pytest

from cosmodirac.gaussian import (
    CondensatePair,
    Trajectory,
    evolve,
    free_ground_state,
)
from cosmodirac.lattice import LatticeSpec, QuenchProfile, band_velocity
from cosmodirac.production import bogoliubov_spectrum, mode_pair_entropy
from cosmodirac.quasiparticle import (
    NonEquilibratedWindowError,
    QPInput,
    condensate_persistence,
    horizon_width,
    qp_contour,
    qp_entropy,
    qp_input_from_spectrum,
    qp_plateau,
    renormalized_velocity,
)


def _flat_qp(v0=0.4, s0=0.9, length=32.0, n=64):
    ks = np.linspace(-np.pi, np.pi, n, endpoint=False)
    return QPInput(k=ks, v=np.full(n, v0), s_pair=np.full(n, s0),
                   block_length=length)


class TestQuadratures:
    def test_flat_input_closed_form(self):
        # constant v and s: S(eta) = s0 * min(2 v0 eta, l) at unit spacing
        qp = _flat_qp(v0=0.4, s0=0.9, length=32.0)
        assert qp.v_max == pytest.approx(0.8)
        for eta in (0.0, 5.0, 20.0, 39.9, 45.0, 200.0):
            expected = 0.9 * min(0.8 * eta, 32.0)
            assert qp_entropy(qp, eta) == pytest.approx(expected, rel=1e-10)
        assert qp_plateau(qp) == pytest.approx(0.9 * 32.0, rel=1e-12)

    def test_flat_input_contour_steps(self):
        qp = _flat_qp(v0=0.5, s0=1.0, length=32.0)
        eta = 10.0  # front reach = 10 sites from each edge
        xs = np.array([2.0, 9.0, 16.0, 23.0, 30.0])
        vals = qp_contour(qp, eta, xs)
        assert np.allclose(vals, [1.0, 1.0, 0.0, 1.0, 1.0])
        # late time: both step functions fire everywhere
        assert qp_contour(qp, 1e4, 16.0) == pytest.approx(2.0)
        assert qp_contour(qp, 0.0, 16.0) == 0.0

    def test_quadrature_converged_on_real_spectrum(self):
        spec = LatticeSpec(num_sites=64, mass=1.0)
        state = free_ground_state(spec, 0.01, a_val=0.01)
        out = bogoliubov_spectrum(state, 10.0, a_ref=10.0)
        qp = qp_input_from_spectrum(out, spec, 32.0)
        for eta in (3.0, 30.0):
            coarse = qp_entropy(qp, eta, n_points=4096)
            fine = qp_entropy(qp, eta, n_points=65536)
            assert coarse == pytest.approx(fine, rel=1e-3)

    def test_input_from_spectrum_wiring(self):
        spec = LatticeSpec(num_sites=32, mass=1.0)
        state = free_ground_state(spec, 0.01, a_val=0.01)
        out = bogoliubov_spectrum(state, 10.0, a_ref=10.0)
        qp = qp_input_from_spectrum(out, spec, 16.0, out_of_validity=True)
        assert qp.out_of_validity
        assert np.allclose(qp.v, band_velocity(out.k, 10.0, 0.0, 0.0))
        assert np.allclose(qp.s_pair, mode_pair_entropy(out.beta_sq)[1])

    def test_validation(self):
        with pytest.raises(ValueError):
            _flat_qp(v0=-0.1)
        with pytest.raises(ValueError):
            _flat_qp(s0=5.0)
        qp = _flat_qp()
        with pytest.raises(ValueError):
            qp_entropy(qp, -1.0)
        with pytest.raises(ValueError):
            qp_contour(qp, 1.0, 40.0)


def _synthetic_trajectory(damping, n=400, eta_max=40.0):
    etas = np.linspace(0.0, eta_max, n)
    sig = 0.3 * np.cos(2.0 * etas) * np.exp(-damping * etas) - 0.8
    conds = [CondensatePair(s, 0.0) for s in sig]
    return Trajectory(etas, [None] * n, conds, None)


class TestEquilibrationGate:
    def test_persistence_ratio_separates_regimes(self):
        damped = condensate_persistence(_synthetic_trajectory(0.2))
        persistent = condensate_persistence(_synthetic_trajectory(0.0))
        assert damped < 0.05
        assert persistent > 0.8

    def test_constant_series_gives_zero(self):
        n = 50
        traj = Trajectory(np.linspace(0, 10, n), [None] * n,
                          [CondensatePair(-0.5, 0.1)] * n, None)
        assert condensate_persistence(traj) == 0.0
        with pytest.raises(ValueError):
            condensate_persistence(Trajectory(np.array([0.0, 1.0]), [None] * 2,
                                              [CondensatePair(0, 0)] * 2, None))

    def test_free_quench_returns_bare_group_velocity(self):
        spec = LatticeSpec(num_sites=64, mass=-1.0, coupling=0.0)
        state = free_ground_state(spec, -0.7, a_val=0.7)
        traj = evolve(state, QuenchProfile(0.7, 1.3), (0.0, 10.0), 1e-3,
                      sample_every=100)
        v = renormalized_velocity(traj, spec, 1.3, (5.0, 10.0))
        assert v == pytest.approx(0.3, abs=1e-9)  # |ma_f + 1| = 0.3

    def test_persistent_oscillations_refuse(self):
        traj = _synthetic_trajectory(0.0)
        spec = LatticeSpec(num_sites=64, mass=-1.0, coupling=3.0)
        with pytest.raises(NonEquilibratedWindowError):
            renormalized_velocity(traj, spec, 1.3, (30.0, 40.0))

    def test_empty_window_rejected(self):
        traj = _synthetic_trajectory(0.2)
        spec = LatticeSpec(num_sites=64, mass=-1.0)
        with pytest.raises(ValueError):
            renormalized_velocity(traj, spec, 1.3, (100.0, 101.0))


class TestHorizon:
    def test_width_formula_and_validation(self):
        assert horizon_width(160.0, 0.92, 0.1, 1.0 / 3.0) == pytest.approx(
            160.0 - 4.0 * 0.92 / (0.1 / 3.0)
        )
        assert horizon_width(10.0, 1.0, 0.1, 1.0) < 0.0  # cones meet
        with pytest.raises(ValueError):
            horizon_width(10.0, 1.0, 0.0, 1.0)
