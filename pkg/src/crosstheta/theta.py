"""Closed-form and brute-force L1-norm theta functions of rational lattices.

The closed form for a lattice between m*Z^n and Z^n evaluates the symmetric
weight enumerator of the quotient code at x_i = q^i + q^(m-i), divided by
(1 - q^m)^n; the dual-lattice form substitutes truncated series
1 / (q^2 - 2q cos(2*pi*k/m) + 1).  Brute-force enumeration provides the
independent oracle for both.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from . import geometry
from .codes import LinearCode, SweEnumerator, code_from_lattice, swe
from .errors import NoSignChange, NonIntegralResult, NotIntegral
from .lattices import Lattice
from .series import PowerSeries, ThetaRational, poly_add, poly_mul, poly_pow

_RATIONAL_COS_MODULI = {1, 2, 3, 4, 6}


def theta_from_swe(s: SweEnumerator, scale: int = 1) -> ThetaRational:
    """Closed-form theta of the Construction A lattice of a code, from its swe."""
    m, n = s.m, s.n
    # substitution polynomials x_i -> q^i + q^(m-i)
    subs = []
    for i in range(s.t + 1):
        lo, hi = min(i, m - i), max(i, m - i)
        p = [0] * (hi + 1)
        p[lo] += 1
        p[hi] += 1
        subs.append(tuple(p))
    numer: tuple = ()
    for expo, cnt in s.terms.items():
        term = (cnt,)
        for i, e in enumerate(expo):
            if e:
                term = poly_mul(term, poly_pow(subs[i], e))
        numer = poly_add(numer, term)
    dm = [0] * (m + 1)
    dm[0], dm[m] = 1, -1
    denom = poly_pow(tuple(dm), n)
    return ThetaRational(numer=numer, denom=denom, scale=scale)


def theta_l1_construction_a(code: LinearCode, cap: int | None = None) -> ThetaRational:
    return theta_from_swe(swe(code, cap=cap))


def theta_l1_lattice(lat: Lattice, cap: int | None = None) -> ThetaRational:
    """Exact rational theta of any rational lattice.

    Denominators are cleared first; a cleared factor d puts the result on the
    exponent grid u = q^(1/d).
    """
    if not lat.exact:
        raise NotIntegral("closed-form theta needs a rational basis")
    rows, den = lat.integral_rows()
    from .lattices import IntegerLattice

    pair = code_from_lattice(IntegerLattice(rows))
    tr = theta_from_swe(swe(pair.code, cap=cap))
    return ThetaRational(numer=tr.numer, denom=tr.denom, scale=den)


def theta_l1_dual_construction_a(code: LinearCode, order: int,
                                 cap: int | None = None,
                                 prec_digits: int = 60) -> PowerSeries:
    """Theta series of the Construction A lattice of the DUAL code, computed
    from the swe of the given code by the cosine substitution.

    Exact for m in {1,2,3,4,6}; other moduli run in high-precision floats and
    the final coefficients are rounded and verified integral (1e-6).
    """
    s = swe(code, cap=cap)
    m, n = s.m, s.n
    size_c = s.size
    exact = m in _RATIONAL_COS_MODULI
    if exact:
        from .codes import _RATIONAL_COS

        cosv = _RATIONAL_COS[m]
        one = Fraction(1)
        series = _dual_series(s, cosv, one, order, size_c, n)
        return series.integerized()

    import mpmath

    with mpmath.workdps(prec_digits):
        cosv = [mpmath.cos(2 * mpmath.pi * k / m) for k in range(m)]
        one = mpmath.mpf(1)
        series = _dual_series(s, cosv, one, order, size_c, n)
        coeffs = []
        for c in series.coeffs:
            r = int(mpmath.nint(c))
            if abs(c - r) > 1e-6:
                raise NonIntegralResult(f"dual theta coefficient {c} not integral")
            coeffs.append(Fraction(r))
    return PowerSeries(tuple(coeffs), series.scale)


def _dual_series(s: SweEnumerator, cosv, one, order: int, size_c: int, n: int):
    ys = []
    for k in range(s.t + 1):
        quad = PowerSeries.from_poly([one, -2 * one * cosv[k % s.m], one], order)
        ys.append(quad.reciprocal())
    total = PowerSeries.from_poly([0 * one], order)
    for expo, cnt in s.terms.items():
        term = PowerSeries.from_poly([one * cnt], order)
        for k, e in enumerate(expo):
            if e:
                term = term * ys[k].pow(e)
        total = total + term
    front = PowerSeries.from_poly([one, 0 * one, -one], order).pow(n)
    out = front * total
    if isinstance(one, Fraction):
        return out * Fraction(1, size_c)
    return out * (one / size_c)


def theta_lp_bruteforce(lat: Lattice, p, order: int,
                        cap: int | None = None) -> PowerSeries:
    """Oracle theta: exact vector counts N_k = #{x : ||x||_p^p = k/scale}.

    p must be a positive integer (the L1 and L2 cases of interest); rational
    lattices are cleared to an integer frame so every count is exact.
    """
    if float(p) != int(p) or int(p) < 1:
        raise ValueError("brute-force theta requires integer p >= 1")
    p = int(p)
    if not lat.exact:
        raise NotIntegral("brute-force theta needs a rational basis")
    rows, den = lat.integral_rows()
    b_int = np.array(rows, dtype=np.int64)
    scale = den ** p
    k_max = order * scale  # max ||v||_p^p in the integer frame
    if p == 1:
        r2 = float(k_max)
    elif p == 2:
        r2 = math.sqrt(k_max)
    else:
        r2 = math.sqrt(lat.n) * k_max ** (1.0 / p)
    coeffs = geometry.enumerate_l2_coeffs(lat.basis_float * den, r2, cap=cap)
    counts = [0] * (k_max + 1)
    counts[0] = 1
    for row in coeffs:
        v = row @ b_int
        val = int(np.abs(v).sum()) if p == 1 else int((np.abs(v).astype(object) ** p).sum())
        if val <= k_max:
            counts[val] += 2  # both signs
    return PowerSeries(tuple(Fraction(c) for c in counts), scale)


# ---------------------------------------------------------------------------
# numeric evaluation, crossover, orthogonal comparison


def theta_eval(lat: Lattice, q: float, dps: int = 40) -> float:
    """Theta of an exact rational lattice at real 0 <= q < 1 (closed form)."""
    return theta_l1_lattice(lat).eval_q(q, dps=dps)


def _eval_powered(tr: ThetaRational, q: float, exponent_factor: float, dps: int = 40) -> float:
    """Evaluate tr at u = q^(exponent_factor / scale)."""
    import mpmath

    from .series import poly_eval

    with mpmath.workdps(dps):
        u = mpmath.mpf(q) ** (mpmath.mpf(exponent_factor) / tr.scale)
        return float(poly_eval(tr.numer, u) / poly_eval(tr.denom, u))


def theta_crossover(lat_a: Lattice, lat_b: Lattice,
                    bracket: tuple[float, float], tol: float = 1e-7) -> float:
    """Bisection root of Theta_A(q) - Theta_B(q), both scaled to unit volume.

    Rational closed forms are evaluated with the irrational unit-volume
    rescaling folded into the exponent; accuracy far exceeds the 1e-7 root
    tolerance.
    """
    tr_a, tr_b = theta_l1_lattice(lat_a), theta_l1_lattice(lat_b)
    fa = float(lat_a.volume) ** (1.0 / lat_a.n)
    fb = float(lat_b.volume) ** (1.0 / lat_b.n)

    def diff(q: float) -> float:
        va = _eval_powered(tr_a, q, 1.0 / fa)
        vb = _eval_powered(tr_b, q, 1.0 / fb)
        d = va - vb
        # identical series differ only by float jitter; call that zero
        return 0.0 if abs(d) <= 1e-12 * (abs(va) + abs(vb)) else d

    lo, hi = bracket
    flo, fhi = diff(lo), diff(hi)
    if flo == 0 or fhi == 0 or (flo > 0) == (fhi > 0):
        raise NoSignChange(f"no sign change on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = diff(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def theta_orthogonal_comparison(alphas, q: float) -> tuple[float, float]:
    """(theta of Z^n, theta of alpha_1 Z + ... + alpha_n Z) at real q.

    The alphas must multiply to 1 (within 1e-12); each axis factor has the
    closed form (1 + q^a) / (1 - q^a).
    """
    alphas = [float(a) for a in alphas]
    prod = math.prod(alphas)
    if abs(prod - 1.0) > 1e-12:
        raise ValueError(f"alphas must have product 1, got {prod}")
    if not 0 < q < 1:
        raise ValueError("q must be in (0, 1)")
    n = len(alphas)
    theta_z = ((1 + q) / (1 - q)) ** n
    theta_scaled = 1.0
    for a in alphas:
        qa = q ** a
        theta_scaled *= (1 + qa) / (1 - qa)
    return theta_z, theta_scaled
