"""Interaction kernels for finite-horizon nonlocal diffusion.

Three radial kernel families are supported, all compactly supported on a
ball of radius delta (the horizon):

* fractional type   gamma(r) = sigma * r^(-(n+2s)),  s in (0,1)
* constant          gamma(r) = sigma  (the simplest square-integrable case)
* peridynamic type  gamma(r) = sigma * r^(-1)

sigma is a single positive constant, either given directly or resolved
from one of the standard normalizations.  For the fractional family with
sigma = c_{n,s}/2 the infinite-horizon operator is the integral fractional
Laplacian (-Delta)^s.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

INFINITE = math.inf


class KernelCase(enum.Enum):
    FRACTIONAL = "fractional"
    CONSTANT = "constant"
    PERIDYNAMIC = "peridynamic"


class SigmaMode(enum.Enum):
    CONSTANT = "constant"
    FRACTIONAL_NORMALIZATION = "fractional-normalization"  # sigma = c_{n,s}/2
    LOCAL_SCALING = "local-scaling"                        # sigma = (1-s)/delta^(2-2s)
    INVERSE_TWO_DELTA_SQ = "inv-two-delta-sq"              # sigma = 1/(2 delta^2)


@dataclass(frozen=True)
class KernelSpec:
    """A validated kernel: family, fractional order, horizon, and resolved sigma."""
    case: KernelCase
    s: float | None
    delta: float
    sigma: float
    sigma_mode: SigmaMode
    n: int = 1

    @property
    def singular(self) -> bool:
        return self.case in (KernelCase.FRACTIONAL, KernelCase.PERIDYNAMIC)

    def with_delta(self, delta: float) -> "KernelSpec":
        """Same family and sigma value at a different horizon.

        sigma is kept fixed (not re-resolved) so that truncating or extending
        the horizon compares the same gamma_infinity profile.
        """
        return KernelSpec(self.case, self.s, delta, self.sigma, SigmaMode.CONSTANT, self.n)


def c_ns(n: int, s: float) -> float:
    """Normalization constant of the integral fractional Laplacian,
    c_{n,s} = 2^(2s) s Gamma(s + n/2) / (pi^(n/2) Gamma(1 - s))."""
    if not (isinstance(n, int) and n >= 1):
        raise ValueError("dimension n must be a positive integer")
    if not 0.0 < s < 1.0:
        raise ValueError("fractional order s must lie in (0,1)")
    return 2.0 ** (2 * s) * s * math.gamma(s + 0.5 * n) / (math.pi ** (0.5 * n) * math.gamma(1.0 - s))


def make_kernel(case: KernelCase, s: float | None, delta: float,
                sigma_mode: SigmaMode, sigma_value: float | None = None,
                n: int = 1) -> KernelSpec:
    """Validate parameters and resolve sigma to a concrete positive number."""
    if case is KernelCase.FRACTIONAL:
        if s is None or not 0.0 < s < 1.0:
            raise ValueError("s must lie in (0,1)")
    elif s is not None:
        raise ValueError("fractional order s only applies to the fractional kernel")
    if not delta > 0.0:
        raise ValueError("horizon delta must be positive")
    if math.isinf(delta) and case is KernelCase.PERIDYNAMIC:
        raise ValueError("infinite horizon with the r^-1 kernel has a non-integrable tail in 1D")

    if sigma_mode is SigmaMode.CONSTANT:
        if sigma_value is None:
            raise ValueError("SigmaMode.CONSTANT requires an explicit sigma value")
        sigma = float(sigma_value)
    elif sigma_mode is SigmaMode.FRACTIONAL_NORMALIZATION:
        if case is not KernelCase.FRACTIONAL:
            raise ValueError("fractional normalization requires the fractional kernel")
        sigma = 0.5 * c_ns(n, s)
    elif sigma_mode is SigmaMode.LOCAL_SCALING:
        if case is not KernelCase.FRACTIONAL or math.isinf(delta):
            raise ValueError("local scaling requires the fractional kernel with finite delta")
        sigma = (1.0 - s) / delta ** (2.0 - 2.0 * s)
    elif sigma_mode is SigmaMode.INVERSE_TWO_DELTA_SQ:
        if math.isinf(delta):
            raise ValueError("sigma = 1/(2 delta^2) requires finite delta")
        sigma = 1.0 / (2.0 * delta ** 2)
    else:  # pragma: no cover
        raise ValueError("unknown sigma mode %r" % sigma_mode)
    if not sigma > 0.0:
        raise ValueError("resolved sigma must be positive, got %g" % sigma)
    return KernelSpec(case, s, float(delta), sigma, sigma_mode, n)


def profile_exponent(spec: KernelSpec) -> float:
    """Exponent e such that gamma(r) = sigma * r^e inside the horizon."""
    if spec.case is KernelCase.FRACTIONAL:
        return -(spec.n + 2.0 * spec.s)
    if spec.case is KernelCase.PERIDYNAMIC:
        return -1.0
    return 0.0


def kernel_value(spec: KernelSpec, r):
    """gamma as a function of distance; zero beyond the horizon.

    Singular kernels must not be evaluated at r = 0 (the assembly only ever
    integrates the difference form, which never needs the diagonal value).
    """
    r = np.asarray(r, dtype=float)
    scalar = r.ndim == 0
    r = np.atleast_1d(r)
    if np.any(r < 0.0):
        raise ValueError("distance must be nonnegative")
    if spec.singular and np.any(r == 0.0):
        raise ValueError("singular kernel evaluated at r = 0")
    inside = r <= spec.delta
    e = profile_exponent(spec)
    vals = np.zeros_like(r)
    if e == 0.0:
        vals[inside] = spec.sigma
    else:
        vals[inside] = spec.sigma * np.power(r[inside], e)
    return float(vals[0]) if scalar else vals


def radial_tail_integral(spec: KernelSpec, a: float, b: float) -> float:
    """int_a^b gamma(r) dr of the kernel profile, in closed form.

    Integrates the un-truncated profile (no clipping at delta); callers clip
    the limits themselves.  b may be infinite only when the tail decays
    (fractional case).
    """
    if not 0.0 < a <= b:
        raise ValueError("limits must satisfy 0 < a <= b")
    if spec.case is KernelCase.FRACTIONAL:
        decay = 2.0 * spec.s + (spec.n - 1)  # profile r^-(n+2s) integrates to r^-decay/decay
        if math.isinf(b):
            return spec.sigma * a ** (-decay) / decay
        return spec.sigma * (a ** (-decay) - b ** (-decay)) / decay
    if math.isinf(b):
        raise ValueError("divergent tail: %s kernel has no integrable tail" % spec.case.value)
    if spec.case is KernelCase.PERIDYNAMIC:
        return spec.sigma * math.log(b / a)
    return spec.sigma * (b - a)


def truncation_constant(spec: KernelSpec) -> float:
    """Mass coefficient C(delta, n) = 2 * int_{|z| > delta} gamma_inf(|z|) dz
    relating the truncated operator to its infinite-horizon counterpart.

    For the fractional family this is 2 sigma omega_n / (2s delta^(2s)) with
    omega_n the measure of the unit sphere; a compactly supported kernel has
    no tail, so the constant is zero.
    """
    if math.isinf(spec.delta):
        raise ValueError("truncation constant requires a finite horizon")
    if spec.case is KernelCase.CONSTANT:
        return 0.0
    if spec.case is KernelCase.PERIDYNAMIC:
        raise ValueError("divergent tail: r^-1 profile is not integrable at infinity")
    omega_n = 2.0 * math.pi ** (0.5 * spec.n) / math.gamma(0.5 * spec.n)
    return spec.sigma * omega_n / (spec.s * spec.delta ** (2.0 * spec.s))
