"""Discrete-symmetry relations, residual patterns, and spectrum checks."""

import numpy as np
import pytest

from cosmodirac.entanglement import BlockSpec, ContourField, contour_trajectory
from cosmodirac.gaussian import evolve, free_ground_state
from cosmodirac.lattice import ExponentialProfile, LatticeSpec, QuenchProfile
from cosmodirac.symmetry import (
    contour_cp_check,
    operator_squares,
    spectrum_symmetry_check,
    symmetry_report,
    time_reversal_condition_residual,
)


class TestOperators:
    def test_squares_are_identity(self):
        for name, sq in operator_squares().items():
            assert np.allclose(sq, np.eye(2)), name


class TestReport:
    def test_all_five_hold_without_pseudoscalar(self):
        spec = LatticeSpec(num_sites=64)
        rep = symmetry_report(-1.3, 0.05, 0.0, spec)
        assert all(rep.holds.values())
        assert max(rep.residuals.values()) < 1e-12
        assert "T" in rep.table() and "holds" in rep.table()

    def test_pseudoscalar_breaks_c_s_p_exactly(self):
        # the pi sigma_y term is the only piece that flips under C, S, P,
        # so those residuals are exactly 2|pi|; T and CP survive
        spec = LatticeSpec(num_sites=64)
        for pi in (0.3, 1.1):
            rep = symmetry_report(-1.3, 0.05, pi, spec)
            assert rep.holds["T"] and rep.holds["CP"]
            for broken in ("C", "S", "P"):
                assert not rep.holds[broken]
                assert rep.residuals[broken] == pytest.approx(2.0 * pi, rel=1e-12)

    def test_residuals_linear_in_pseudoscalar(self):
        spec = LatticeSpec(num_sites=32)
        r1 = symmetry_report(0.4, 0.0, 0.01, spec).residuals["P"]
        r2 = symmetry_report(0.4, 0.0, 0.02, spec).residuals["P"]
        assert r2 == pytest.approx(2.0 * r1, rel=1e-10)


class TestTimeReversalCondition:
    def test_holds_only_at_reference_time(self):
        prof = ExponentialProfile(a_0=0.7, a_f=1.3, hubble=0.3)
        eta_0 = 0.5 * prof.eta_clamp
        assert time_reversal_condition_residual(prof, eta_0, eta_0) < 1e-14
        for d_eta in (0.3, 0.8):
            res = time_reversal_condition_residual(prof, eta_0, eta_0 + d_eta)
            # residual is the mass mismatch |a(eta) - a(2 eta_0 - eta)|
            expected = abs(
                float(prof.scale_factor(eta_0 + d_eta))
                - float(prof.scale_factor(eta_0 - d_eta))
            )
            assert res == pytest.approx(expected, rel=1e-10)
            assert res > 1e-3

    def test_static_background_time_reversal_everywhere(self):
        from cosmodirac.lattice import StaticProfile

        prof = StaticProfile(a_val=1.3)
        assert time_reversal_condition_residual(prof, 0.0, 7.0) < 1e-14


class TestContourCP:
    def test_synthetic_detector_floor(self, rng):
        blk = BlockSpec.centered(8, 32)
        up = rng.uniform(0.0, 1.0, size=(4, 8))
        vals = np.stack([up, up[:, ::-1]], axis=-1)  # exact CP partner
        field = ContourField(etas=np.arange(4.0), values=vals, block=blk)
        assert contour_cp_check(field) == 0.0
        vals2 = vals.copy()
        vals2[2, 3, 0] += 1e-3
        field2 = ContourField(etas=np.arange(4.0), values=vals2, block=blk)
        assert contour_cp_check(field2) == pytest.approx(1e-3, rel=1e-9)

    def test_real_quench_field_respects_cp(self):
        spec = LatticeSpec(num_sites=32, mass=1.0)
        state = free_ground_state(spec, 0.01, a_val=0.01)
        traj = evolve(state, QuenchProfile(0.01, 10.0), (0.0, 3.0), 1e-3,
                      sample_every=500)
        field = contour_trajectory(traj, BlockSpec.centered(12, 32))
        assert contour_cp_check(field) < 1e-10


class TestSpectrumSweep:
    def test_quench_limit_symmetric_slow_ramp_not(self):
        spec = LatticeSpec(num_sites=64, mass=-1.0, coupling=3.0)
        rows = spectrum_symmetry_check(spec, 0.7, 1.3, [100.0, 0.3])
        by_h = {r["hubble"]: r for r in rows}
        assert by_h[100.0]["asymmetry"] < 1e-8
        assert by_h[0.3]["asymmetry"] > 1e-3
        assert by_h[0.3]["beta_sq_sum"] > 0.0

    def test_reference_mode_validation(self):
        spec = LatticeSpec(num_sites=16, mass=-1.0, coupling=3.0)
        with pytest.raises(ValueError):
            spectrum_symmetry_check(spec, 0.7, 1.3, [100.0],
                                    reference_mode="nope")
