"""Exact rational lattice arithmetic: bases, volumes, duals, normal forms.

All exact computations run over Python integers / fractions; floating point
enters only through explicitly inexact operations (unit-volume scaling) and
lattices constructed from float bases (e.g. optimizer output).
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import InvalidLattice, NotIntegral

Row = tuple[Fraction, ...]


# ---------------------------------------------------------------------------
# exact matrix helpers (row-major lists/tuples of Fraction or int)


def mat_fractions(rows) -> tuple[Row, ...]:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def mat_det(rows: tuple[Row, ...]) -> Fraction:
    """Determinant by fraction-free-ish Gaussian elimination."""
    m = [list(r) for r in rows]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        inv = 1 / Fraction(m[c][c])
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] * inv
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return det


def mat_inv(rows: tuple[Row, ...]) -> tuple[Row, ...]:
    """Exact inverse via Gauss-Jordan; raises InvalidLattice if singular."""
    n = len(rows)
    m = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            raise InvalidLattice("singular matrix")
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / Fraction(m[c][c])
        m[c] = [x * inv for x in m[c]]
        for i in range(n):
            if i != c and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return tuple(tuple(r[n:]) for r in m)


def mat_mul(a, b) -> tuple[tuple, ...]:
    bt = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(ra, cb)) for cb in bt) for ra in a)


def hnf(rows: list[list[int]], ncols: int | None = None) -> list[list[int]]:
    """Row-style Hermite normal form of the row span of an integer matrix.

    Returns the nonzero rows: row-echelon with positive pivots and entries
    above each pivot reduced to [0, pivot).
    """
    m = [list(map(int, r)) for r in rows]
    if not m:
        return []
    ncols = ncols if ncols is not None else len(m[0])
    nrows = len(m)
    r = 0
    for c in range(ncols):
        while True:
            nz = [i for i in range(r, nrows) if m[i][c] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(m[i][c]))
            m[r], m[i0] = m[i0], m[r]
            a = m[r][c]
            finished = True
            for i in range(r + 1, nrows):
                if m[i][c]:
                    q = m[i][c] // a
                    m[i] = [x - q * y for x, y in zip(m[i], m[r])]
                    if m[i][c]:
                        finished = False
            if finished:
                break
        if r < nrows and m[r][c] != 0:
            if m[r][c] < 0:
                m[r] = [-x for x in m[r]]
            a = m[r][c]
            for i in range(r):
                q = m[i][c] // a
                if q:
                    m[i] = [x - q * y for x, y in zip(m[i], m[r])]
            r += 1
            if r == nrows:
                break
    return m[:r]


def snf(rows: list[list[int]]):
    """Smith normal form with transforms: U @ M @ V = D.

    U, V are unimodular; D is diagonal with d[i] | d[i+1] and d[i] >= 0.
    Returns (U, D, V) as lists of lists of int.
    """
    d = [list(map(int, r)) for r in rows]
    n = len(d)
    m = len(d[0]) if d else 0
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    v = [[int(i == j) for j in range(m)] for i in range(m)]

    def row_sub(i, j, q):  # row_i -= q * row_j
        d[i] = [a - q * b for a, b in zip(d[i], d[j])]
        u[i] = [a - q * b for a, b in zip(u[i], u[j])]

    def col_sub(i, j, q):  # col_i -= q * col_j
        for row in d:
            row[i] -= q * row[j]
        for row in v:
            row[i] -= q * row[j]

    def row_swap(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def col_swap(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    for t in range(min(n, m)):
        while True:
            entries = [(abs(d[i][j]), i, j)
                       for i in range(t, n) for j in range(t, m) if d[i][j]]
            if not entries:
                break
            _, i0, j0 = min(entries)
            if i0 != t:
                row_swap(t, i0)
            if j0 != t:
                col_swap(t, j0)
            piv = d[t][t]
            clean = True
            for i in range(t + 1, n):
                if d[i][t]:
                    row_sub(i, t, d[i][t] // piv)
                    clean = clean and d[i][t] == 0
            for j in range(t + 1, m):
                if d[t][j]:
                    col_sub(j, t, d[t][j] // piv)
                    clean = clean and d[t][j] == 0
            if not clean:
                continue
            piv = d[t][t]
            offender = next(((i, j) for i in range(t + 1, n) for j in range(t + 1, m)
                             if d[i][j] % piv), None)
            if offender is None:
                break
            row_sub(t, offender[0], -1)  # fold offending row into the pivot row
        if t < min(n, m) and d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
    return u, d, v


# ---------------------------------------------------------------------------


class Lattice:
    """Full-rank lattice given by basis row vectors.

    Exact lattices carry Fraction entries; inexact ones (from float input,
    e.g. unit-volume rescaling or optimizer output) carry only a float basis
    and refuse exact-only operations.
    """

    def __init__(self, basis, exact: bool | None = None):
        if isinstance(basis, Lattice):
            raise TypeError("pass raw rows")
        rows = list(basis)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise InvalidLattice("basis must be a nonempty square matrix")
        if exact is None:
            exact = all(isinstance(x, (int, Fraction)) for row in rows for x in row)
        self.n = n
        self.exact = bool(exact)
        if self.exact:
            self.rows: tuple[Row, ...] | None = mat_fractions(rows)
            self.basis_float = np.array([[float(x) for x in r] for r in self.rows])
        else:
            self.rows = None
            self.basis_float = np.array(rows, dtype=float)
        if self.exact:
            if mat_det(self.rows) == 0:
                raise InvalidLattice("singular basis")
        else:
            if abs(np.linalg.det(self.basis_float)) < 1e-300:
                raise InvalidLattice("singular basis")

    # -- construction helpers

    @classmethod
    def identity(cls, n: int) -> "Lattice":
        return cls([[Fraction(int(i == j)) for j in range(n)] for i in range(n)])

    def __repr__(self):
        kind = "exact" if self.exact else "float"
        return f"Lattice(n={self.n}, {kind})"

    def __eq__(self, other):
        """Equality of lattices (same Z-row-span), via HNF of cleared bases."""
        if not isinstance(other, Lattice):
            return NotImplemented
        if not (self.exact and other.exact) or self.n != other.n:
            return False
        a, da = self.integral_rows()
        b, db = other.integral_rows()
        # rescale to a common denominator before comparing spans
        a = [[x * db for x in row] for row in a]
        b = [[x * da for x in row] for row in b]
        return hnf(a) == hnf(b)

    def __hash__(self):
        a, da = self.integral_rows()
        return hash((self.n, da, tuple(map(tuple, hnf(a)))))

    # -- exact accessors

    def _require_exact(self):
        if not self.exact:
            raise NotIntegral("operation requires an exact rational basis")

    def integral_rows(self) -> tuple[list[list[int]], int]:
        """Clear denominators: returns (integer rows of d*basis, d)."""
        self._require_exact()
        d = 1
        for row in self.rows:
            for x in row:
                d = d * x.denominator // math.gcd(d, x.denominator)
        return [[int(x * d) for x in row] for row in self.rows], d

    @cached_property
    def volume(self) -> Fraction | float:
        """|det(basis)|: exact Fraction when the basis is exact."""
        if self.exact:
            return abs(mat_det(self.rows))
        return float(abs(np.linalg.det(self.basis_float)))

    @cached_property
    def dual(self) -> "Lattice":
        """Dual lattice, generated by the inverse-transpose basis."""
        if self.exact:
            inv = mat_inv(self.rows)
            return Lattice(tuple(zip(*inv)))
        return Lattice(np.linalg.inv(self.basis_float).T, exact=False)

    def scale(self, c) -> "Lattice":
        """Lattice with basis multiplied by c > 0 (exact iff c is rational)."""
        if isinstance(c, (int, Fraction)) and self.exact:
            c = Fraction(c)
            if c <= 0:
                raise ValueError("scale factor must be positive")
            return Lattice([[x * c for x in row] for row in self.rows])
        c = float(c)
        if c <= 0:
            raise ValueError("scale factor must be positive")
        return Lattice(self.basis_float * c, exact=False)

    def unit_volume_form(self) -> "Lattice":
        """Rescaled to volume 1.  The scale factor is floating point, so the
        result is flagged inexact."""
        v = float(self.volume)
        return Lattice(self.basis_float * v ** (-1.0 / self.n), exact=False)

    def to_integer(self) -> "IntegerLattice":
        rows, d = self.integral_rows()
        if d != 1:
            raise NotIntegral("basis has denominators")
        return IntegerLattice(rows)

    def contains(self, other: "Lattice") -> bool:
        """True if other is a sublattice of self (exact lattices only)."""
        self._require_exact()
        other._require_exact()
        inv = mat_inv(self.rows)
        coeff = mat_mul(other.rows, inv)
        return all(x.denominator == 1 for row in coeff for x in row)


class IntegerLattice(Lattice):
    """Lattice with an integer basis; caches Hermite and Smith normal forms."""

    def __init__(self, basis):
        rows = [list(r) for r in basis]
        for row in rows:
            for x in row:
                xf = Fraction(x)
                if xf.denominator != 1:
                    raise NotIntegral(f"non-integer entry {x}")
        super().__init__([[int(x) for x in row] for row in rows])
        self.int_rows = [[int(x) for x in row] for row in self.rows]

    @cached_property
    def hnf(self) -> list[list[int]]:
        h = hnf(self.int_rows)
        if len(h) != self.n:
            raise InvalidLattice("rank-deficient basis")
        return h

    @cached_property
    def snf(self):
        """(U, D, V) with U @ basis @ V = D diagonal, d_i | d_{i+1}."""
        return snf(self.int_rows)

    @cached_property
    def invariant_factors(self) -> tuple[int, ...]:
        _, d, _ = self.snf
        return tuple(d[i][i] for i in range(self.n))

    @cached_property
    def exponent(self) -> int:
        """Smallest m with m * Z^n contained in the lattice (largest invariant
        factor of Z^n / lattice)."""
        return self.invariant_factors[-1]

    def member(self, vec) -> bool:
        """Exact membership test for an integer vector."""
        inv = self._inv
        coeff = [sum(Fraction(vec[i]) * inv[i][j] for i in range(self.n))
                 for j in range(self.n)]
        return all(c.denominator == 1 for c in coeff)

    @cached_property
    def _inv(self):
        return mat_inv(self.rows)


def from_rows(rows) -> Lattice:
    """Build the most specific lattice type for the given rows."""
    try:
        return IntegerLattice(rows)
    except NotIntegral:
        return Lattice(rows)


# ---------------------------------------------------------------------------
# file formats: JSON {"n":..., "basis": [["p/q",...],...]} and plain text


def lattice_to_json(lat: Lattice) -> str:
    if lat.exact:
        basis = [[str(x) for x in row] for row in lat.rows]
    else:
        basis = [[format(float(x), ".17g") for x in row] for row in lat.basis_float]
    return json.dumps({"n": lat.n, "basis": basis})


def lattice_from_json(text: str) -> Lattice:
    obj = json.loads(text)
    n = int(obj["n"])
    basis = obj["basis"]
    if len(basis) != n:
        raise InvalidLattice("basis row count does not match n")
    rows = []
    exact = True
    for row in basis:
        parsed = []
        for cell in row:
            if isinstance(cell, str) and ("." in cell or "e" in cell or "E" in cell):
                parsed.append(float(cell))
                exact = False
            elif isinstance(cell, float):
                parsed.append(cell)
                exact = False
            else:
                parsed.append(Fraction(cell))
        rows.append(parsed)
    return from_rows(rows) if exact else Lattice(rows, exact=False)


def lattice_to_text(lat: Lattice) -> str:
    if lat.exact:
        return "\n".join(" ".join(str(x) for x in row) for row in lat.rows) + "\n"
    return "\n".join(" ".join(format(float(x), ".17g") for x in row)
                     for row in lat.basis_float) + "\n"


def lattice_from_text(text: str) -> Lattice:
    rows = []
    exact = True
    for line in text.strip().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parsed = []
        for tok in line.split():
            if "." in tok or "e" in tok.lower().replace("/", ""):
                parsed.append(float(tok))
                exact = False
            else:
                parsed.append(Fraction(tok))
        rows.append(parsed)
    if not rows:
        raise InvalidLattice("empty lattice file")
    return from_rows(rows) if exact else Lattice(rows, exact=False)


def load_lattice(path: str) -> Lattice:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return lattice_from_json(text)
    return lattice_from_text(text)


def save_lattice(lat: Lattice, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if str(path).endswith(".json"):
            fh.write(lattice_to_json(lat) + "\n")
        else:
            fh.write(lattice_to_text(lat))
