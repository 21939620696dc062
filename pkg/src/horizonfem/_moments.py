"""Exact integrals of low-degree polynomials against power-law weights.

Everything the stiffness assembly integrates reduces, after one analytic
pass over the mesh direction, to integrals of the form

    int_{wlo}^{whi} P(w) (d + w)^e dw

with P a polynomial of degree <= 3, d >= 0 a shift measured in mesh cells,
and e the kernel profile exponent (e = -1-2s, -1, or 0).  This module
evaluates them in closed form, switching between two representations:

* small shifts: binomial expansion into monomial moments of rho = d + w,
  which is exact but cancels catastrophically once d is large;
* large shifts: the series (d+w)^e = d^e sum_m C(e,m) (w/d)^m, whose terms
  decay at least like (2/d)^m for |w| <= 2.

A Gauss-Legendre variant with geometric grading toward the rho = 0
singularity is provided as an alternative engine.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.polynomial.legendre import leggauss

# Largest shift handled by binomial expansion; beyond it the series is
# both faster and more accurate (relative cancellation grows like d^4*eps).
SMALL_SHIFT_MAX = 16
_SERIES_MAX_TERMS = 80
_SERIES_STOP = 1e-18

_gauss_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [0, 1], cached by order."""
    if order not in _gauss_cache:
        x, w = leggauss(order)
        _gauss_cache[order] = (0.5 * (x + 1.0), 0.5 * w)
    return _gauss_cache[order]


def power_moment(e: float, lo, hi):
    """int_lo^hi rho^e drho for real e, elementwise in (lo, hi).

    Handles lo = 0 (requires e > -1), the logarithmic case e = -1, and
    exponents within ~1e-6 of -1 via an expm1 formulation that avoids the
    0/0 cancellation.  hi may be inf when e < -1.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    scalar = lo.ndim == 0 and hi.ndim == 0
    lo, hi = np.broadcast_arrays(lo, hi)
    out = np.empty(lo.shape, dtype=float)
    ep1 = e + 1.0

    if np.any(lo < 0.0):
        raise ValueError("power_moment requires lo >= 0")
    inf_mask = np.isinf(hi)
    if np.any(inf_mask) and ep1 >= 0.0:
        raise ValueError("divergent tail: exponent %g with infinite upper limit" % e)
    zero_lo = lo == 0.0
    if np.any(zero_lo) and ep1 <= 0.0:
        raise ValueError("divergent moment: exponent %g with zero lower limit" % e)

    if ep1 == 0.0:
        out = np.log(hi / lo)
    elif abs(ep1) < 1e-6:
        # (hi^ep1 - lo^ep1)/ep1 via expm1 to keep relative accuracy as ep1 -> 0
        out = (np.expm1(ep1 * np.log(hi)) - np.expm1(ep1 * np.log(np.where(zero_lo, 1.0, lo)))) / ep1
        out = np.where(zero_lo, np.power(hi, ep1) / ep1, out)
    else:
        hi_term = np.where(inf_mask, 0.0, np.power(np.where(inf_mask, 1.0, hi), ep1))
        out = (hi_term - np.power(lo, ep1)) / ep1
    return float(out) if scalar else out


def poly_integral(coeffs, lo: float, hi: float) -> float:
    """Plain int_lo^hi P(w) dw for coefficient array (low to high)."""
    return sum(c / (p + 1.0) * (hi ** (p + 1) - lo ** (p + 1)) for p, c in enumerate(coeffs))


def _shift_to_monomials(coeffs, d: float) -> np.ndarray:
    """Coefficients of P(rho - d) in powers of rho, P given in powers of w."""
    deg = len(coeffs) - 1
    out = np.zeros(deg + 1)
    for q, c in enumerate(coeffs):
        if c == 0.0:
            continue
        for p in range(q + 1):
            out[p] += c * math.comb(q, p) * (-d) ** (q - p)
    return out


def _small_shift_moment(coeffs, wlo: float, whi: float, d: float, e: float) -> float:
    crho = _shift_to_monomials(coeffs, d)
    lo = d + wlo
    hi = d + whi
    if lo < 1e-12:
        # The integrand vanishes to the order required for integrability at
        # rho = 0; rounding can leave ~1e-16 residues on the divergent
        # monomials, which must be cleared before integrating them.
        scale = max(1.0, float(np.max(np.abs(crho))))
        for p in range(len(crho)):
            if p + e <= -1.0 + 1e-12:
                if abs(crho[p]) > 1e-9 * scale:
                    raise ValueError("non-integrable term rho^%g near rho=0" % (p + e))
                crho[p] = 0.0
        lo = 0.0
    return float(sum(c * power_moment(p + e, lo, hi) for p, c in enumerate(crho) if c != 0.0))


def _series_shift_moment(coeffs, wlo: float, whi: float, d: np.ndarray, e: float) -> np.ndarray:
    # S_m = int w^m P(w) dw are scalars; the d-dependence is d^(e-m).
    dmin = float(np.min(d))
    if dmin <= max(abs(wlo), abs(whi)):
        raise ValueError("series shift requires d > |w|")
    acc = np.zeros(d.shape)
    coef = 1.0  # C(e, m) running value
    dpow = np.power(d, e)
    ref = None
    for m in range(_SERIES_MAX_TERMS):
        s_m = poly_integral(coeffs, wlo, whi) if m == 0 else \
            sum(c / (p + m + 1.0) * (whi ** (p + m + 1) - wlo ** (p + m + 1))
                for p, c in enumerate(coeffs))
        term = coef * s_m * dpow
        acc += term
        tmax = float(np.max(np.abs(term)))
        if ref is None:
            ref = max(tmax, 1e-300)
        if tmax <= _SERIES_STOP * max(ref, float(np.max(np.abs(acc)))):
            return acc
        coef *= (e - m) / (m + 1.0)
        dpow = dpow / d
    raise RuntimeError("power series for shifted moment did not converge (d_min=%g)" % dmin)


def shifted_poly_moment(coeffs, wlo: float, whi: float, d, e: float):
    """Exact int_{wlo}^{whi} P(w) (d+w)^e dw; d may be a scalar or an array."""
    coeffs = np.asarray(coeffs, dtype=float)
    d_arr = np.asarray(d, dtype=float)
    if d_arr.ndim == 0:
        if d_arr <= SMALL_SHIFT_MAX:
            return _small_shift_moment(coeffs, wlo, whi, float(d_arr), e)
        return float(_series_shift_moment(coeffs, wlo, whi, d_arr.reshape(1), e)[0])
    out = np.empty(d_arr.shape)
    small = d_arr <= SMALL_SHIFT_MAX
    for i in np.nonzero(small)[0]:
        out[i] = _small_shift_moment(coeffs, wlo, whi, float(d_arr[i]), e)
    if np.any(~small):
        out[~small] = _series_shift_moment(coeffs, wlo, whi, d_arr[~small], e)
    return out


def shifted_poly_log_moment(coeffs, wlo: float, whi: float, c) -> float:
    """int_{wlo}^{whi} P(w) ln(c + w) dw, exact (used by the r^-1 profile)."""
    coeffs = np.asarray(coeffs, dtype=float)
    c = float(c)
    if c <= SMALL_SHIFT_MAX:
        # substitute u = c + w and expand (u - c)^q
        lo, hi = c + wlo, c + whi
        total = 0.0
        for q, cf in enumerate(coeffs):
            if cf == 0.0:
                continue
            for p in range(q + 1):
                a = cf * math.comb(q, p) * (-c) ** (q - p)
                total += a * (_xp_logx_integral(p, hi) - _xp_logx_integral(p, lo))
        return total
    # ln(c+w) = ln c + sum_{m>=1} (-1)^(m+1) (w/c)^m / m
    total = math.log(c) * poly_integral(coeffs, wlo, whi)
    sign = 1.0
    for m in range(1, _SERIES_MAX_TERMS):
        s_m = sum(cf / (p + m + 1.0) * (whi ** (p + m + 1) - wlo ** (p + m + 1))
                  for p, cf in enumerate(coeffs))
        term = sign * s_m / (m * c ** m)
        total += term
        if abs(term) <= _SERIES_STOP * max(abs(total), 1e-300):
            return total
        sign = -sign
    raise RuntimeError("log series did not converge (c=%g)" % c)


def _xp_logx_integral(p: int, x: float) -> float:
    """Antiderivative of x^p ln x, with the x -> 0 limit equal to 0."""
    if x == 0.0:
        return 0.0
    return x ** (p + 1) * (math.log(x) / (p + 1.0) - 1.0 / (p + 1.0) ** 2)


def gauss_shifted_poly_moment(coeffs, wlo: float, whi: float, d: float, e: float,
                              order: int = 5, subdivisions: int = 4,
                              grading_ratio: float = 0.5, min_subcell: float = 1e-6) -> float:
    """Graded Gauss-Legendre counterpart of shifted_poly_moment.

    Intervals touching the singular point rho = d + w = 0 are subdivided
    geometrically toward it; the sliver below min_subcell is integrated with
    the closed form (it carries an O(min_subcell^(2-2s)) share of the value,
    which plain truncation would lose for s near 1).
    """
    coeffs = np.asarray(coeffs, dtype=float)
    xg, wg = gauss_rule(order)

    def _gauss_piece(a: float, b: float) -> float:
        w_pts = a + (b - a) * xg
        vals = np.zeros_like(w_pts)
        for q in range(len(coeffs) - 1, -1, -1):
            vals = vals * w_pts + coeffs[q]
        return float((b - a) * np.sum(wg * vals * np.power(d + w_pts, e)))

    total = 0.0
    if d + wlo <= 0.0 and e < 0.0:
        # geometric bands [b*ratio, b] shrinking toward the singularity
        hi_band = whi
        while (hi_band - wlo) > min_subcell:
            lo_band = wlo + (hi_band - wlo) * grading_ratio
            total += _gauss_piece(lo_band, hi_band)
            hi_band = lo_band
        total += _small_shift_moment(coeffs, wlo, hi_band, d, e)
        return total
    step = (whi - wlo) / subdivisions
    for j in range(subdivisions):
        total += _gauss_piece(wlo + j * step, wlo + (j + 1) * step)
    return total
