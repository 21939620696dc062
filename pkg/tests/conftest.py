import numpy as np
import pytest
from scipy.integrate import quad

from horizonfem import KernelCase


def hat_function(space, p):
    """Global hat at Omega-node p (mesh numbering 0..N over Omega)."""
    xp = space.a + p * space.h

    def phi(x):
        return max(0.0, 1.0 - abs(x - xp) / space.h)
    return phi


def profile_exponent_of(kernel):
    if kernel.case is KernelCase.FRACTIONAL:
        return -(1.0 + 2.0 * kernel.s)
    if kernel.case is KernelCase.PERIDYNAMIC:
        return -1.0
    return 0.0


def stiffness_entry_quadrature(space, kernel, i, j, epsrel=1e-9):
    """Brute-force nested adaptive quadrature of a(phi_i, phi_j).

    Integrates the difference form over the whole strip |x - y| <= delta
    (the integrand vanishes wherever both hats do, so extending the outer
    domain delta beyond the supports reproduces the full double integral).
    """
    fi, fj = hat_function(space, i), hat_function(space, j)
    e = profile_exponent_of(kernel)

    def inner(x):
        vfi, vfj = fi(x), fj(x)

        def g(y):
            r = abs(y - x)
            if r == 0.0:
                return 0.0
            return (vfi - fi(y)) * (vfj - fj(y)) * kernel.sigma * r ** e
        v1, _ = quad(g, x - kernel.delta, x, limit=100, epsrel=epsrel)
        v2, _ = quad(g, x, x + kernel.delta, limit=100, epsrel=epsrel)
        return v1 + v2

    pts = [space.a + k * space.h for k in (i - 1, i, i + 1, j - 1, j, j + 1)]
    lo, hi = min(pts) - kernel.delta, max(pts) + kernel.delta
    cuts = sorted(set([lo, hi] + [p for p in pts if lo < p < hi]
                      + [p + s * kernel.delta for p in pts for s in (-1, 1)
                         if lo < p + s * kernel.delta < hi]))
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b > a:
            v, _ = quad(inner, a, b, limit=60, epsrel=1e-8)
            total += v
    return total


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
