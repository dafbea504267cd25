"""q-ary linear codes, weight enumerators, duals, and Construction A.

A length-n code over Z/mZ and a lattice between m*Z^n and Z^n are two views
of the same object; both directions of that correspondence live here.
Codeword streams are produced from the Smith decomposition of the associated
lattice, so enumeration cost is |C| rather than m^n.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CapExceeded, NonIntegralResult, NotIntegral, enumeration_cap
from .lattices import IntegerLattice, hnf, mat_inv

#: exact cosine tables cos(2*pi*k/m) for the moduli where they are rational
_RATIONAL_COS = {
    1: [Fraction(1)],
    2: [Fraction(1), Fraction(-1)],
    3: [Fraction(1), Fraction(-1, 2), Fraction(-1, 2)],
    4: [Fraction(1), Fraction(0), Fraction(-1), Fraction(0)],
    6: [Fraction(1), Fraction(1, 2), Fraction(-1, 2), Fraction(-1),
        Fraction(-1, 2), Fraction(1, 2)],
}


@dataclass(frozen=True)
class LinearCode:
    """Linear code over Z/mZ given by (possibly redundant) generator rows.

    m = 1 is allowed as the degenerate case Z^n / Z^n (single zero codeword);
    it shows up naturally as code_from_lattice(Z^n).
    """

    m: int
    n: int
    generators: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("modulus must be >= 1")
        for row in self.generators:
            if len(row) != self.n:
                raise ValueError("generator length mismatch")

    @classmethod
    def from_rows(cls, m: int, rows) -> "LinearCode":
        rows = [tuple(int(x) % m if m > 1 else 0 for x in row) for row in rows]
        if not rows:
            raise ValueError("need at least one generator row")
        return cls(m=m, n=len(rows[0]), generators=tuple(rows))

    @classmethod
    def zero(cls, m: int, n: int) -> "LinearCode":
        return cls(m=m, n=n, generators=((0,) * n,))

    def to_json(self) -> str:
        return json.dumps({"m": self.m, "n": self.n,
                           "generators": [list(g) for g in self.generators]})

    @classmethod
    def from_json(cls, text: str) -> "LinearCode":
        obj = json.loads(text)
        code = cls.from_rows(int(obj["m"]), obj["generators"])
        if code.n != int(obj["n"]):
            raise ValueError("generator length disagrees with declared n")
        return code


@dataclass(frozen=True)
class SweEnumerator:
    """Symmetric weight enumerator: sparse homogeneous counting polynomial.

    terms maps exponent tuples (n_0, ..., n_t), t = floor(m/2), to codeword
    counts; every exponent tuple sums to the code length n.
    """

    m: int
    n: int
    terms: dict

    @property
    def t(self) -> int:
        return self.m // 2

    @property
    def size(self) -> int:
        return sum(self.terms.values())

    def __post_init__(self):
        width = self.t + 1
        for expo, cnt in self.terms.items():
            if len(expo) != width or sum(expo) != self.n:
                raise ValueError(f"bad exponent tuple {expo}")
            if cnt < 0:
                raise ValueError("negative count")

    def hamming_weights(self) -> dict[int, int]:
        """Collapse to Hamming weight distribution {weight: count}."""
        out: dict[int, int] = {}
        for expo, cnt in self.terms.items():
            w = self.n - expo[0]
            out[w] = out.get(w, 0) + cnt
        return out

    def to_json(self) -> str:
        items = [{"exponents": list(k), "count": v}
                 for k, v in sorted(self.terms.items(), reverse=True)]
        return json.dumps(items)


# ---------------------------------------------------------------------------
# Construction A, both directions


@dataclass(frozen=True)
class CodeLatticePair:
    m: int
    code: LinearCode
    lattice: IntegerLattice


def construction_a(code: LinearCode) -> IntegerLattice:
    """Lattice {x in Z^n : x mod m in C}, via HNF of stacked generators."""
    n = code.n
    stack = [list(g) for g in code.generators]
    stack += [[code.m * int(i == j) for j in range(n)] for i in range(n)]
    basis = hnf(stack)
    if len(basis) != n:
        raise NotIntegral("generators do not span a full-rank lattice")
    return IntegerLattice(basis)


def code_from_lattice(lat: IntegerLattice, modulus: int | None = None) -> CodeLatticePair:
    """Code C = lattice / m*Z^n for m = exponent (or a given multiple)."""
    if not isinstance(lat, IntegerLattice):
        if not lat.exact:
            raise NotIntegral("integer basis required")
        lat = lat.to_integer()
    m = lat.exponent if modulus is None else int(modulus)
    if m % lat.exponent:
        raise NotIntegral(f"modulus {m} is not a multiple of the exponent {lat.exponent}")
    gens = _scaled_unimodular_rows(lat)
    rows = [[x % m if m > 1 else 0 for x in row] for row in gens]
    code = LinearCode.from_rows(max(m, 1), rows)
    return CodeLatticePair(m=m, code=code, lattice=lat)


def _scaled_unimodular_rows(lat: IntegerLattice) -> list[list[int]]:
    """Rows d_i * w_i with {w_i} a Z^n basis, so the lattice is their direct
    sum (invariant-factor decomposition from the Smith normal form)."""
    _, d, v = lat.snf
    w = mat_inv(tuple(tuple(Fraction(x) for x in row) for row in v))
    n = lat.n
    return [[int(d[i][i] * w[i][j]) for j in range(n)] for i in range(n)]


def code_size(code: LinearCode) -> int:
    lat = construction_a(code)
    return code.m ** code.n // int(lat.volume)


def _traversal(code: LinearCode):
    """(radices, scaled generator rows) for duplicate-free codeword traversal."""
    lat = construction_a(code)
    m = code.m
    rows = _scaled_unimodular_rows(lat)
    d = lat.invariant_factors
    radices = [m // di for di in d]
    return radices, np.array(rows, dtype=np.int64)


def _mixed_radix_rows(radices, rows, m):
    """All sums of digit multiples of the given rows, mod m (R x n array)."""
    total = 1
    for r in radices:
        total *= r
    strides = []
    s = 1
    for r in radices:
        strides.append(s)
        s *= r
    ks = np.arange(total, dtype=np.int64)
    digits = (ks[:, None] // np.array(strides, dtype=np.int64)[None, :]) \
        % np.array(radices, dtype=np.int64)[None, :]
    return (digits @ rows) % m


def enumerate_codewords(code: LinearCode, cap: int | None = None,
                        chunk: int = 1 << 16):
    """Yield every codeword exactly once, as int16 row blocks.

    Large codes are walked meet-in-the-middle: one digit half is expanded
    into a table once, the other half is scanned and broadcast-added."""
    size = code_size(code)
    if size > enumeration_cap(cap):
        raise CapExceeded(f"|C| = {size} exceeds cap")
    if code.m == 1:
        yield np.zeros((1, code.n), dtype=np.int16)
        return
    radices, rows = _traversal(code)
    split = 0
    prod = 1
    while split < len(radices) and prod * radices[split] <= chunk:
        prod *= radices[split]
        split += 1
    low = _mixed_radix_rows(radices[:split], rows[:split], code.m).astype(np.int16)
    high_radices = radices[split:]
    if not high_radices:
        yield low
        return
    high = _mixed_radix_rows(high_radices, rows[split:], code.m).astype(np.int16)
    for offset in high:
        yield (low + offset[None, :]) % code.m


def swe(code: LinearCode, cap: int | None = None) -> SweEnumerator:
    """Symmetric weight enumerator by full (chunked, vectorized) enumeration."""
    m, n = code.m, code.n
    t = m // 2
    base = n + 1
    keyed = base ** t <= 1 << 22  # encode count profiles into one integer
    totals = np.zeros(base ** t if keyed else 0, dtype=np.int64)
    counts: dict[tuple[int, ...], int] = {}
    for block in enumerate_codewords(code, cap=cap):
        sym = np.minimum(block, m - block) if m > 1 else block
        if t == 0:
            counts[(n,)] = counts.get((n,), 0) + block.shape[0]
            continue
        key = (sym == 1).sum(axis=1, dtype=np.int64)
        mult = 1
        for i in range(2, t + 1):
            mult *= base
            key += mult * (sym == i).sum(axis=1, dtype=np.int64)
        if keyed:
            totals += np.bincount(key, minlength=len(totals))
        else:
            uniq, cnt = np.unique(key, return_counts=True)
            for k, c in zip(uniq, cnt):
                counts[int(k)] = counts.get(int(k), 0) + int(c)
    if t and keyed:
        for k in np.nonzero(totals)[0]:
            counts[int(k)] = int(totals[k])
    if t:
        decoded = {}
        for k, c in counts.items():
            rest = []
            kk = int(k)
            for _ in range(t):
                rest.append(kk % base)
                kk //= base
            decoded[(n - sum(rest), *rest)] = c
        counts = decoded
    return SweEnumerator(m=m, n=n, terms=counts)


def dual_code(code: LinearCode) -> LinearCode:
    """Dual code C-perp, via m * (Construction A lattice)^* over Z."""
    lat = construction_a(code)
    scaled_dual = lat.dual.scale(code.m)
    m_lat = scaled_dual.to_integer()
    return code_from_lattice(m_lat, modulus=code.m).code


# ---------------------------------------------------------------------------
# generalized MacWilliams transform on symmetric weight enumerators


def _cosines(m: int, prec_digits: int = 50):
    """cos(2*pi*k/m) for k = 0..m-1, exact when rational, else mpmath."""
    if m in _RATIONAL_COS:
        return _RATIONAL_COS[m], True
    import mpmath

    with mpmath.workdps(prec_digits):
        vals = [mpmath.cos(2 * mpmath.pi * k / m) for k in range(m)]
    return vals, False


def _poly_mul(a: dict, b: dict, zero):
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            key = tuple(x + y for x, y in zip(ea, eb))
            out[key] = out.get(key, zero) + ca * cb
    return out


def _poly_pow(base: dict, k: int, nvars: int, one, zero):
    result = {(0,) * nvars: one}
    while k:
        if k & 1:
            result = _poly_mul(result, base, zero)
        base = _poly_mul(base, base, zero)
        k >>= 1
    return result


def macwilliams_swe(s: SweEnumerator, size_c: int | None = None,
                    prec_digits: int = 50) -> SweEnumerator:
    """swe of the dual code from the swe of the code.

    Substitutes each variable by the cosine linear form of the generalized
    MacWilliams identity and divides by |C|.  Exact for m in {1,2,3,4,6};
    other moduli run at prec_digits decimal digits and the final counts are
    rounded and checked to be integers within 1e-6.
    """
    m, n, t = s.m, s.n, s.t
    size_c = s.size if size_c is None else size_c
    cos, exact = _cosines(m, prec_digits)
    if exact:
        one, zero = Fraction(1), Fraction(0)
        lift = Fraction
    else:
        import mpmath
        one, zero = mpmath.mpf(1), mpmath.mpf(0)
        lift = mpmath.mpf
    nvars = t + 1
    # y_i as linear forms  y_i = sum_j coeff[i][j] * x_j
    forms = []
    for i in range(nvars):
        coeffs = [one]  # x_0 coefficient is 1
        if m % 2 == 0 and m > 1:
            for j in range(1, t):
                coeffs.append(2 * lift(cos[(i * j) % m]))
            if t >= 1:
                coeffs.append(lift(cos[(i * t) % m]))  # cos(pi*i) term
        else:
            for j in range(1, t + 1):
                coeffs.append(2 * lift(cos[(i * j) % m]))
        poly = {}
        for j, c in enumerate(coeffs):
            if c != 0:
                key = tuple(int(k == j) for k in range(nvars))
                poly[key] = c
        forms.append(poly)

    total: dict = {}
    for expo, cnt in s.terms.items():
        term = {(0,) * nvars: one * cnt}
        for i, e in enumerate(expo):
            if e:
                term = _poly_mul(term, _poly_pow(forms[i], e, nvars, one, zero), zero)
        for key, val in term.items():
            total[key] = total.get(key, zero) + val

    out: dict[tuple[int, ...], int] = {}
    for key, val in total.items():
        scaled = val / size_c
        if exact:
            if scaled.denominator != 1:
                raise NonIntegralResult(f"non-integer dual count {scaled} at {key}")
            c = int(scaled)
        else:
            import mpmath
            rounded = int(mpmath.nint(scaled))
            if abs(scaled - rounded) > 1e-6:
                raise NonIntegralResult(f"count {scaled} at {key} not integral")
            c = rounded
        if c < 0:
            raise NonIntegralResult(f"negative dual count {c} at {key}")
        if c:
            out[key] = c
    return SweEnumerator(m=m, n=n, terms=out)
