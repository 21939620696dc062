import numpy as np
import pytest

from horizonfem import (DUAL_STENCIL, build_space, interpolate_nodal, prolong,
                        kink_obstacle, smooth_obstacle)
from horizonfem.grid import refinement_factor


class TestBuildSpace:
    def test_basic_counts(self):
        sp = build_space(0.0, 1.0, 8, 0.5)
        assert sp.h == 0.125
        assert sp.k_delta == 4
        assert sp.n_free == 7
        assert sp.total_cells == 16
        assert len(sp.nodes) == 17
        assert np.all(sp.free_coords > 0.0) and np.all(sp.free_coords < 1.0)

    def test_misaligned_delta_rejected_with_hint(self):
        with pytest.raises(ValueError) as err:
            build_space(0.0, 1.0, 8, 0.3)
        assert "0.25" in str(err.value) and "0.375" in str(err.value)

    def test_large_space_counts(self):
        sp = build_space(0.0, 1.0, 512, 2.0)
        assert sp.n_free == 511
        assert len(sp.nodes) == 512 + 2 * 1024 + 1

    def test_nodes_from_index_formula(self):
        sp = build_space(0.0, 1.0, 12, 0.25)
        idx = np.arange(-sp.k_delta, sp.n_cells + sp.k_delta + 1)
        assert np.array_equal(sp.nodes, idx * (1.0 / 12))

    def test_too_few_cells(self):
        with pytest.raises(ValueError):
            build_space(0.0, 1.0, 1, 0.5)


class TestInterpolateNodal:
    def test_smooth_obstacle_peak(self):
        sp = build_space(0.0, 1.0, 8, 0.25)
        vals = interpolate_nodal(sp, smooth_obstacle)
        at_half = vals[np.argmin(np.abs(sp.free_coords - 0.5))]
        assert at_half == pytest.approx(0.25, abs=1e-15)

    def test_kink_obstacle_plateau(self):
        sp = build_space(0.0, 1.0, 16, 0.25)
        vals = interpolate_nodal(sp, kink_obstacle)
        at_quarter = vals[np.argmin(np.abs(sp.free_coords - 0.25))]
        assert at_quarter == pytest.approx(0.02, abs=1e-15)

    def test_zero_function(self):
        sp = build_space(0.0, 1.0, 8, 0.25)
        assert np.all(interpolate_nodal(sp, lambda x: 0.0 * x) == 0.0)

    def test_nonfinite_rejected(self):
        sp = build_space(0.0, 1.0, 8, 0.25)
        with pytest.raises(ValueError, match="non-finite"), np.errstate(divide="ignore"):
            interpolate_nodal(sp, lambda x: 1.0 / (x - x[0]))


class TestProlong:
    def test_midpoint_averages_for_factor_two(self):
        coarse = build_space(0.0, 1.0, 8, 0.25)
        fine = build_space(0.0, 1.0, 16, 0.25)
        v = interpolate_nodal(coarse, lambda x: x * (1.0 - x))
        vf = prolong(coarse, fine, v)
        full = np.zeros(9)
        full[1:-1] = v
        for i_f, x in enumerate(fine.free_coords, start=1):
            if i_f % 2 == 0:
                assert vf[i_f - 1] == full[i_f // 2]
            else:
                assert vf[i_f - 1] == pytest.approx(0.5 * (full[i_f // 2] + full[i_f // 2 + 1]), abs=1e-16)

    def test_zero_maps_to_zero(self):
        coarse = build_space(0.0, 1.0, 4, 0.25)
        fine = build_space(0.0, 1.0, 16, 0.25)
        assert np.all(prolong(coarse, fine, np.zeros(3)) == 0.0)

    def test_hat_decay_factor_four(self):
        coarse = build_space(0.0, 1.0, 8, 0.25)
        fine = build_space(0.0, 1.0, 32, 0.25)
        v = np.zeros(7)
        v[3] = 1.0  # hat at x = 0.5
        vf = prolong(coarse, fine, v)
        expected = np.maximum(0.0, 1.0 - np.abs(fine.free_coords - 0.5) / coarse.h)
        assert np.allclose(vf, expected, atol=1e-15)
        assert vf.max() == 1.0

    def test_shared_nodes_exact(self):
        coarse = build_space(0.0, 1.0, 8, 0.5)
        fine = build_space(0.0, 1.0, 64, 0.5)
        v = np.sin(np.pi * coarse.free_coords)
        vf = prolong(coarse, fine, v)
        assert np.array_equal(vf[7::8], v)  # coarse nodes sit at every 8th fine node

    def test_non_nested_rejected(self):
        a = build_space(0.0, 1.0, 8, 0.25)
        b = build_space(0.0, 1.0, 12, 0.25)
        with pytest.raises(ValueError, match="nested"):
            prolong(a, b, np.zeros(7))
        c = build_space(0.0, 1.0, 16, 0.5)
        with pytest.raises(ValueError, match="nested"):
            prolong(a, c, np.zeros(7))
        assert refinement_factor(a, build_space(0.0, 1.0, 32, 0.25)) == 4


class TestDualBasis:
    def test_cellwise_biorthogonality(self):
        # xi = 2 phi_same - phi_other on each cell; exact quadratic integrals:
        # int_0^1 (2(1-t) - t)(1-t) dt = 1/2 = int (1-t);  cross terms vanish
        t = np.polynomial.legendre.leggauss(3)
        xg, wg = 0.5 * (t[0] + 1.0), 0.5 * t[1]
        phi0, phi1 = 1.0 - xg, xg
        xi0 = DUAL_STENCIL[0] * phi0 + DUAL_STENCIL[1] * phi1
        xi1 = DUAL_STENCIL[0] * phi1 + DUAL_STENCIL[1] * phi0
        assert np.sum(wg * xi0 * phi0) == pytest.approx(np.sum(wg * phi0), abs=1e-15)
        assert np.sum(wg * xi1 * phi1) == pytest.approx(np.sum(wg * phi1), abs=1e-15)
        assert np.sum(wg * xi0 * phi1) == pytest.approx(0.0, abs=1e-15)
        assert np.sum(wg * xi1 * phi0) == pytest.approx(0.0, abs=1e-15)

    def test_hat_partition_of_unity(self):
        sp = build_space(0.0, 1.0, 16, 0.25)
        xs = np.linspace(sp.a + sp.h, sp.b - sp.h, 113)
        total = np.zeros_like(xs)
        for node in range(sp.n_cells + 1):  # include constrained boundary hats
            xp = sp.a + node * sp.h
            total += np.maximum(0.0, 1.0 - np.abs(xs - xp) / sp.h)
        assert np.allclose(total, 1.0, atol=1e-13)
