import numpy as np
import pytest

from horizonfem import (KernelCase, SigmaMode, StudyConfig, assemble_mass,
                        assemble_stiffness, build_space, convergence_rates,
                        error_vs_reference, interpolate_nodal, local_gap_study,
                        make_kernel, prolong, run_study)
from horizonfem.analysis import obstacle_function


class TestErrorVsReference:
    def _spaces(self):
        coarse = build_space(0.0, 1.0, 8, 0.25)
        fine = build_space(0.0, 1.0, 32, 0.25)
        ker = make_kernel(KernelCase.FRACTIONAL, 0.5, 0.25, SigmaMode.CONSTANT, 1.0)
        A = assemble_stiffness(fine, ker)
        M = assemble_mass(fine)
        return coarse, fine, A, M

    def test_zero_for_coarse_representable_fine_function(self):
        coarse, fine, A, M = self._spaces()
        u_c = interpolate_nodal(coarse, lambda x: x * (1.0 - x))
        u_f = prolong(coarse, fine, u_c)
        pair = error_vs_reference(coarse, u_c, fine, u_f, A, M)
        assert pair.energy == 0.0 and pair.l2 == 0.0

    def test_norm_homogeneity(self, rng):
        coarse, fine, A, M = self._spaces()
        u_c = rng.standard_normal(coarse.n_free)
        u_f = rng.standard_normal(fine.n_free)
        one = error_vs_reference(coarse, u_c, fine, u_f, A, M)
        two = error_vs_reference(coarse, 2.0 * u_c, fine, 2.0 * u_f, A, M)
        assert two.energy == pytest.approx(2.0 * one.energy, rel=1e-13)
        assert two.l2 == pytest.approx(2.0 * one.l2, rel=1e-13)


class TestConvergenceRates:
    def test_halving_errors(self):
        assert convergence_rates([4.0, 2.0, 1.0]) == pytest.approx([1.0, 1.0])

    def test_flat_errors(self):
        assert convergence_rates([1.0, 1.0]) == pytest.approx([0.0])

    def test_input_validation(self):
        with pytest.raises(ValueError):
            convergence_rates([1.0])
        with pytest.raises(ValueError):
            convergence_rates([1.0, 0.0])
        with pytest.raises(ValueError):
            convergence_rates([1.0, 0.5], direction="x")


class TestObstacleSelector:
    def test_selectors(self):
        assert obstacle_function("none") is None
        assert obstacle_function(None) is None
        f = obstacle_function(0.1)
        assert np.all(f(np.zeros(3)) == 0.1)
        assert obstacle_function("smooth")(0.5) == 0.25
        with pytest.raises(ValueError):
            obstacle_function("bumpy")


SMALL_LINEAR = StudyConfig(kind="h", problem="linear", s=0.5, delta=0.5,
                           sigma_mode=SigmaMode.CONSTANT, sigma_value=1.0,
                           f=1.0, levels=(3, 4, 5), ref_level=8)


class TestRunStudy:
    def test_deterministic_rows(self):
        r1 = run_study(SMALL_LINEAR)
        r2 = run_study(SMALL_LINEAR)
        for a, b in zip(r1.rows, r2.rows):
            assert (a.param, a.energy_error, a.l2_error) == (b.param, b.energy_error, b.l2_error)
            assert a.energy_rate == b.energy_rate and a.l2_rate == b.l2_rate

    def test_linear_energy_error_monotone(self):
        rep = run_study(SMALL_LINEAR)
        errs = rep.column("energy_error")
        for a, b in zip(errs, errs[1:]):
            assert b <= 1.02 * a  # allow 2% surrogate noise
        assert rep.rows[0].energy_rate is None
        assert rep.rows[1].energy_rate is not None

    def test_obstacle_study_smoke(self):
        cfg = StudyConfig(kind="h", problem="obstacle", s=0.5, delta=1.0,
                          sigma_mode=SigmaMode.CONSTANT, sigma_value=1.0,
                          f=0.0, psi="smooth", levels=(4, 5), ref_level=7)
        rep = run_study(cfg)
        assert all(r.iterations is not None and r.iterations <= 25 for r in rep.rows)
        assert all(r.energy_error > 0 for r in rep.rows)

    def test_s_study_reports_one_row_per_order(self):
        cfg = StudyConfig(kind="s", problem="linear", delta=1.0,
                          sigma_mode=SigmaMode.CONSTANT, sigma_value=1.0, f=1.0,
                          levels=(4, 5), ref_level=7, s_values=(0.25, 0.75))
        rep = run_study(cfg)
        assert [r.param for r in rep.rows] == [0.25, 0.75]
        assert all(r.energy_rate is not None for r in rep.rows)

    def test_delta_study_rates_near_two_s(self):
        cfg = StudyConfig(kind="delta", problem="linear", s=0.5,
                          sigma_mode=SigmaMode.FRACTIONAL_NORMALIZATION,
                          sigma_value=None, f=1.0, deltas=(4.0, 8.0, 16.0), level=6)
        rep = run_study(cfg)
        rates = [r for r in rep.column("energy_rate") if r is not None]
        assert all(abs(r - 1.0) < 0.2 for r in rates)

    def test_bad_configs_rejected(self):
        with pytest.raises(ValueError):
            run_study(StudyConfig(kind="x", problem="linear"))
        with pytest.raises(ValueError):
            run_study(StudyConfig(kind="h", problem="both"))
        with pytest.raises(ValueError):
            run_study(StudyConfig(kind="delta", problem="linear",
                                  case=KernelCase.CONSTANT, s=None))


class TestLocalGapStudy:
    def test_linear_gaps_shrink(self):
        cfg = StudyConfig(kind="h", problem="linear", s=0.5,
                          sigma_mode=SigmaMode.LOCAL_SCALING, sigma_value=None,
                          f=1.0, level=7)
        gaps = local_gap_study(cfg, (0.25, 0.125, 0.0625))
        assert gaps[0] > gaps[1] > gaps[2]
