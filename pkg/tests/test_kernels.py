import math

import numpy as np
import pytest
from scipy.integrate import quad

from horizonfem import (INFINITE, KernelCase, SigmaMode, c_ns, kernel_value,
                        make_kernel, radial_tail_integral, truncation_constant)

# frozen via a 50-digit Gamma-function evaluation (mpmath)
CNS_2_HALF = 0.15915494309189533577   # = 1/(2 pi)
CNS_1_QUARTER = 0.19947114020071633897
CNS_1_THREEQ = 0.29920671030107450845


class TestMakeKernel:
    def test_fractional_normalization_resolves_sigma(self):
        spec = make_kernel(KernelCase.FRACTIONAL, 0.5, 2.0, SigmaMode.FRACTIONAL_NORMALIZATION)
        assert spec.sigma == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-14)

    def test_local_scaling_resolves_sigma(self):
        # (1-s)/delta^(2-2s); the second-moment normalization that makes the
        # operator converge to -u'' as delta -> 0
        spec = make_kernel(KernelCase.FRACTIONAL, 0.5, 0.5, SigmaMode.LOCAL_SCALING)
        assert spec.sigma == pytest.approx(1.0, rel=1e-14)
        spec = make_kernel(KernelCase.FRACTIONAL, 0.25, 0.25, SigmaMode.LOCAL_SCALING)
        assert spec.sigma == pytest.approx(0.75 / 0.25 ** 1.5, rel=1e-14)

    def test_inverse_two_delta_sq(self):
        spec = make_kernel(KernelCase.FRACTIONAL, 0.5, 2.0, SigmaMode.INVERSE_TWO_DELTA_SQ)
        assert spec.sigma == pytest.approx(0.125, rel=1e-15)

    def test_peridynamic_infinite_horizon_rejected(self):
        with pytest.raises(ValueError, match="tail"):
            make_kernel(KernelCase.PERIDYNAMIC, None, INFINITE, SigmaMode.CONSTANT, 1.0)

    @pytest.mark.parametrize("s", [0.0, 1.0, -0.3, 1.5])
    def test_bad_fractional_order(self, s):
        with pytest.raises(ValueError, match="s must lie"):
            make_kernel(KernelCase.FRACTIONAL, s, 1.0, SigmaMode.CONSTANT, 1.0)

    def test_s_forbidden_for_other_cases(self):
        with pytest.raises(ValueError):
            make_kernel(KernelCase.CONSTANT, 0.5, 1.0, SigmaMode.CONSTANT, 1.0)

    def test_nonpositive_delta_or_sigma(self):
        with pytest.raises(ValueError):
            make_kernel(KernelCase.CONSTANT, None, -1.0, SigmaMode.CONSTANT, 1.0)
        with pytest.raises(ValueError):
            make_kernel(KernelCase.CONSTANT, None, 1.0, SigmaMode.CONSTANT, 0.0)
        with pytest.raises(ValueError):
            make_kernel(KernelCase.CONSTANT, None, 1.0, SigmaMode.CONSTANT, None)

    def test_infinite_horizon_allowed_for_fractional(self):
        spec = make_kernel(KernelCase.FRACTIONAL, 0.5, INFINITE,
                           SigmaMode.FRACTIONAL_NORMALIZATION)
        assert math.isinf(spec.delta)


class TestKernelValue:
    def test_fractional_formula(self):
        spec = make_kernel(KernelCase.FRACTIONAL, 0.5, 1.0, SigmaMode.CONSTANT, 1.0)
        assert kernel_value(spec, 0.5) == pytest.approx(4.0, rel=1e-14)

    def test_compact_support(self):
        for case, s in [(KernelCase.FRACTIONAL, 0.5), (KernelCase.CONSTANT, None),
                        (KernelCase.PERIDYNAMIC, None)]:
            spec = make_kernel(case, s, 1.0, SigmaMode.CONSTANT, 1.0)
            assert kernel_value(spec, 1.5) == 0.0

    def test_peridynamic_formula(self):
        spec = make_kernel(KernelCase.PERIDYNAMIC, None, 1.0, SigmaMode.CONSTANT, 2.0)
        assert kernel_value(spec, 0.25) == pytest.approx(8.0, rel=1e-14)

    def test_constant_value(self):
        spec = make_kernel(KernelCase.CONSTANT, None, 0.5, SigmaMode.CONSTANT, 3.0)
        assert kernel_value(spec, 0.3) == 3.0

    def test_singular_at_zero_raises(self):
        spec = make_kernel(KernelCase.FRACTIONAL, 0.5, 1.0, SigmaMode.CONSTANT, 1.0)
        with pytest.raises(ValueError, match="r = 0"):
            kernel_value(spec, 0.0)

    @pytest.mark.parametrize("case,s", [(KernelCase.FRACTIONAL, 0.3),
                                        (KernelCase.CONSTANT, None),
                                        (KernelCase.PERIDYNAMIC, None)])
    def test_nonnegative_everywhere(self, case, s):
        spec = make_kernel(case, s, 0.7, SigmaMode.CONSTANT, 2.5)
        r = np.linspace(1e-6, 3.0, 400)
        v = kernel_value(spec, r)
        assert np.all(v >= 0.0)
        assert np.all(v[r > spec.delta] == 0.0)


class TestCns:
    def test_half_closed_form(self):
        assert c_ns(1, 0.5) == pytest.approx(1.0 / math.pi, rel=1e-14)

    def test_frozen_gamma_oracle_values(self):
        assert c_ns(2, 0.5) == pytest.approx(CNS_2_HALF, rel=1e-13)
        assert c_ns(1, 0.25) == pytest.approx(CNS_1_QUARTER, rel=1e-13)
        assert c_ns(1, 0.75) == pytest.approx(CNS_1_THREEQ, rel=1e-13)

    def test_positive_on_range(self):
        for n in (1, 2, 3):
            for s in np.linspace(0.01, 0.99, 25):
                assert c_ns(n, float(s)) > 0.0

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            c_ns(0, 0.5)
        with pytest.raises(ValueError):
            c_ns(1, 1.0)


class TestRadialTailIntegral:
    def test_fractional_infinite_tail(self):
        spec = make_kernel(KernelCase.FRACTIONAL, 0.5, 2.0, SigmaMode.CONSTANT, 1.0)
        assert radial_tail_integral(spec, 1.0, INFINITE) == pytest.approx(1.0, rel=1e-14)

    def test_constant_segment(self):
        spec = make_kernel(KernelCase.CONSTANT, None, 1.0, SigmaMode.CONSTANT, 3.0)
        assert radial_tail_integral(spec, 0.1, 0.4) == pytest.approx(0.9, rel=1e-13)

    def test_fractional_quarter_frozen_and_live(self):
        spec = make_kernel(KernelCase.FRACTIONAL, 0.25, 4.0, SigmaMode.CONSTANT, 1.0)
        got = radial_tail_integral(spec, 0.5, 2.0)
        assert got == pytest.approx(math.sqrt(2.0), rel=1e-13)  # 50-digit oracle: 1.41421356...
        live, _ = quad(lambda r: r ** -1.5, 0.5, 2.0, epsrel=1e-12)
        assert got == pytest.approx(live, rel=1e-10)

    @pytest.mark.parametrize("case,s", [(KernelCase.FRACTIONAL, 0.37),
                                        (KernelCase.PERIDYNAMIC, None),
                                        (KernelCase.CONSTANT, None)])
    def test_additivity(self, case, s, rng):
        spec = make_kernel(case, s, 8.0, SigmaMode.CONSTANT, 1.7)
        for _ in range(25):
            a, b, c = np.sort(rng.uniform(0.05, 6.0, size=3))
            if a == b or b == c:
                continue
            whole = radial_tail_integral(spec, a, c)
            split = radial_tail_integral(spec, a, b) + radial_tail_integral(spec, b, c)
            assert split == pytest.approx(whole, rel=1e-13)

    def test_divergent_tails_raise(self):
        for case in (KernelCase.CONSTANT, KernelCase.PERIDYNAMIC):
            spec = make_kernel(case, None, 1.0, SigmaMode.CONSTANT, 1.0)
            with pytest.raises(ValueError, match="divergent"):
                radial_tail_integral(spec, 1.0, INFINITE)

    def test_bad_limits(self):
        spec = make_kernel(KernelCase.CONSTANT, None, 1.0, SigmaMode.CONSTANT, 1.0)
        with pytest.raises(ValueError):
            radial_tail_integral(spec, 0.0, 1.0)
        with pytest.raises(ValueError):
            radial_tail_integral(spec, 2.0, 1.0)


class TestTruncationConstant:
    def test_fractional_normalization_example(self):
        # sigma = c_{1,1/2}/2 = 1/(2 pi), delta = 2: C = 2 sigma/(s delta^(2s)) = 1/pi
        spec = make_kernel(KernelCase.FRACTIONAL, 0.5, 2.0, SigmaMode.FRACTIONAL_NORMALIZATION)
        assert truncation_constant(spec) == pytest.approx(1.0 / math.pi, rel=1e-13)

    def test_quarter_frozen_value(self):
        spec = make_kernel(KernelCase.FRACTIONAL, 0.25, 4.0, SigmaMode.CONSTANT, 1.0)
        assert truncation_constant(spec) == pytest.approx(4.0, rel=1e-13)

    def test_compact_kernel_has_zero_tail(self):
        spec = make_kernel(KernelCase.CONSTANT, None, 1.0, SigmaMode.CONSTANT, 5.0)
        assert truncation_constant(spec) == 0.0

    def test_peridynamic_raises(self):
        spec = make_kernel(KernelCase.PERIDYNAMIC, None, 1.0, SigmaMode.CONSTANT, 1.0)
        with pytest.raises(ValueError, match="divergent"):
            truncation_constant(spec)

    @pytest.mark.parametrize("s", [0.1, 0.25, 0.5, 0.75])
    @pytest.mark.parametrize("delta", [1.0, 2.0, 8.0])
    def test_against_tail_quadrature(self, s, delta):
        # C = 2 int_{|z|>delta} sigma |z|^(-1-2s) dz = 4 sigma int_delta^inf
        spec = make_kernel(KernelCase.FRACTIONAL, s, delta, SigmaMode.CONSTANT, 1.3)
        live, _ = quad(lambda r: 4.0 * spec.sigma * r ** (-1.0 - 2.0 * s),
                       delta, np.inf, epsrel=1e-12)
        assert truncation_constant(spec) == pytest.approx(live, rel=1e-10)
