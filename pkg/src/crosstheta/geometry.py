"""L1 shortest vectors, kissing numbers, packing density, well-roundedness.

The single enumeration engine is L2 Fincke-Pohst (Schnorr-Euchner order) on
an LLL-reduced basis; L1 queries filter its output, which is valid because
the L2 ball of radius r contains the L1 ball of radius r.  Exact lattices
get certified integer arithmetic at the filtering stage; float lattices use
a 1e-9 norm tolerance.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CapExceeded, enumeration_cap
from .lattices import IntegerLattice, Lattice, hnf


# ---------------------------------------------------------------------------
# LLL (float arithmetic, exact unimodular transform)


def _gso(b: np.ndarray):
    n = len(b)
    bs = np.zeros_like(b)
    mu = np.zeros((n, n))
    for i in range(n):
        bs[i] = b[i]
        for j in range(i):
            denom = bs[j] @ bs[j]
            mu[i, j] = (b[i] @ bs[j]) / denom
            bs[i] = bs[i] - mu[i, j] * bs[j]
    return bs, mu


def lll_transform(basis: np.ndarray, delta: float = 0.99,
                  max_steps: int = 100000):
    """(reduced basis, unimodular T) with reduced = T @ basis."""
    b = np.array(basis, dtype=float)
    n = len(b)
    t = np.eye(n, dtype=np.int64)
    bs, mu = _gso(b)
    k = 1
    steps = 0
    while k < n and steps < max_steps:
        steps += 1
        for j in range(k - 1, -1, -1):
            q = round(mu[k, j])
            if q:
                b[k] -= q * b[j]
                t[k] -= q * t[j]
                bs, mu = _gso(b)
        if bs[k] @ bs[k] >= (delta - mu[k, k - 1] ** 2) * (bs[k - 1] @ bs[k - 1]):
            k += 1
        else:
            b[[k - 1, k]] = b[[k, k - 1]]
            t[[k - 1, k]] = t[[k, k - 1]]
            bs, mu = _gso(b)
            k = max(k - 1, 1)
    return b, t


def lll_reduce(lat: Lattice, delta: float = 0.99) -> Lattice:
    """LLL-reduced basis spanning the same lattice (exactness preserved)."""
    _, t = lll_transform(lat.basis_float, delta)
    if lat.exact:
        rows = [[sum(int(t[i][k]) * lat.rows[k][j] for k in range(lat.n))
                 for j in range(lat.n)] for i in range(lat.n)]
        return IntegerLattice(rows) if isinstance(lat, IntegerLattice) else Lattice(rows)
    return Lattice(t @ lat.basis_float, exact=False)


# ---------------------------------------------------------------------------
# Fincke-Pohst enumeration in coefficient space


def _ldl(gram: np.ndarray):
    n = len(gram)
    low = np.eye(n)
    d = np.zeros(n)
    for i in range(n):
        d[i] = gram[i, i] - sum(low[i, k] ** 2 * d[k] for k in range(i))
        if d[i] <= 0:
            raise ValueError("Gram matrix not positive definite")
        for j in range(i + 1, n):
            low[j, i] = (gram[j, i] - sum(low[j, k] * low[i, k] * d[k]
                                          for k in range(i))) / d[i]
    return low, d


def enumerate_l2_coeffs(basis: np.ndarray, radius: float,
                        cap: int | None = None) -> np.ndarray:
    """Integer coefficient rows x != 0 with ||x @ basis||_2 <= radius (within a
    small completeness slack; callers re-verify norms).

    One representative per +-x pair is returned, normalized so the last
    nonzero coefficient is positive.
    """
    limit = enumeration_cap(cap)
    bred, t = lll_transform(basis)
    gram = bred @ bred.T
    low, d = _ldl(gram)
    n = len(d)
    bound = radius * radius * (1 + 1e-9) + 1e-12
    out: list[np.ndarray] = []
    x = np.zeros(n, dtype=np.int64)

    def descend(i: int, partial: float):
        if partial > bound:
            return
        if i < 0:
            if np.any(x):
                # canonical half: last nonzero coefficient positive
                nz = np.nonzero(x)[0][-1]
                if x[nz] > 0:
                    if len(out) >= limit:
                        raise CapExceeded(f"more than {limit} lattice points in ball")
                    out.append(x.copy())
            return
        center = float(low[i + 1:, i] @ x[i + 1:]) if i + 1 < n else 0.0
        room = (bound - partial) / d[i]
        half = math.sqrt(room) if room > 0 else 0.0
        lo = math.ceil(-center - half - 1e-12)
        hi = math.floor(-center + half + 1e-12)
        for xi in range(lo, hi + 1):
            x[i] = xi
            descend(i - 1, partial + d[i] * (xi + center) ** 2)
        x[i] = 0

    descend(n - 1, 0.0)
    if not out:
        return np.zeros((0, n), dtype=np.int64)
    return np.asarray(out, dtype=np.int64) @ t


def _integral_frame(lat: Lattice):
    """(integer row matrix, denominator) for an exact lattice."""
    rows, den = lat.integral_rows()
    return np.array(rows, dtype=np.int64), den


def enumerate_within_l1(lat: Lattice, radius, include_negatives: bool = True,
                        cap: int | None = None):
    """All nonzero v in the lattice with ||v||_1 <= radius.

    Returns (vectors, coeffs): float vector rows and integer coefficient rows
    with respect to the input basis.  For exact lattices the filter is exact;
    float lattices admit a 1e-9 tolerance.
    """
    if lat.exact:
        b_int, den = _integral_frame(lat)
        r_int = Fraction(radius) * den
        coeffs = enumerate_l2_coeffs(lat.basis_float, float(r_int) / den, cap=cap)
        keep = []
        for row in coeffs:
            v = row @ b_int
            if Fraction(int(np.abs(v).sum())) <= r_int:
                keep.append(row)
        coeffs = np.array(keep, dtype=np.int64).reshape(-1, lat.n)
    else:
        coeffs = enumerate_l2_coeffs(lat.basis_float, float(radius) + 1e-9, cap=cap)
        vecs = coeffs @ lat.basis_float
        mask = np.abs(vecs).sum(axis=1) <= float(radius) + 1e-9
        coeffs = coeffs[mask]
    if include_negatives and len(coeffs):
        coeffs = np.concatenate([coeffs, -coeffs], axis=0)
    vectors = coeffs @ lat.basis_float
    return vectors, coeffs


# ---------------------------------------------------------------------------
# minima and reports


@dataclass
class MinimalVectorSet:
    """Shortest nonzero vectors in the L1 norm, closed under negation."""

    lambda1: Fraction | float
    vectors: np.ndarray  # kappa x n floats
    coeffs: np.ndarray   # kappa x n integer coefficients

    @property
    def kissing(self) -> int:
        return len(self.vectors)

    def pair_representatives(self) -> np.ndarray:
        return self.coeffs[: len(self.coeffs) // 2]


def l1_minimum(lat: Lattice, cap: int | None = None) -> MinimalVectorSet:
    """Certified L1 minimum: exact for rational lattices, 1e-9 tol for float.

    The search radius starts at the Minkowski bound (n! vol)^(1/n), inside
    which a nonzero vector always exists, and doubles on (float-pathology)
    misses.
    """
    n = lat.n
    vol = float(lat.volume)
    radius = (math.factorial(n) * vol) ** (1.0 / n)
    for _ in range(16):
        if lat.exact:
            b_int, den = _integral_frame(lat)
            r_int = int(math.floor(radius * den + 1e-9)) + 1
            coeffs = enumerate_l2_coeffs(lat.basis_float, r_int / den, cap=cap)
            if len(coeffs):
                vecs = coeffs @ b_int
                norms = np.abs(vecs).sum(axis=1)
                lam_int = int(norms.min())
                sel = coeffs[norms == lam_int]
                lam = Fraction(lam_int, den)
                sel = np.concatenate([sel, -sel], axis=0)
                return MinimalVectorSet(lambda1=lam,
                                        vectors=sel @ lat.basis_float,
                                        coeffs=sel)
        else:
            coeffs = enumerate_l2_coeffs(lat.basis_float, radius, cap=cap)
            if len(coeffs):
                vecs = coeffs @ lat.basis_float
                norms = np.abs(vecs).sum(axis=1)
                lam = float(norms.min())
                sel = coeffs[norms <= lam + 1e-9]
                sel = np.concatenate([sel, -sel], axis=0)
                return MinimalVectorSet(lambda1=lam,
                                        vectors=sel @ lat.basis_float,
                                        coeffs=sel)
        radius *= 2
    raise CapExceeded("minimum search did not terminate")


@dataclass
class PackingReport:
    """Cross-polytope packing data for one lattice."""

    n: int
    lambda1: float
    volume: float
    density: float
    kissing: int
    well_rounded: bool
    strongly_well_rounded: bool
    has_minimal_basis: bool

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "lambda1": self.lambda1,
            "volume": self.volume,
            "density": self.density,
            "kissing": self.kissing,
            "well_rounded": self.well_rounded,
            "strongly_well_rounded": self.strongly_well_rounded,
            "has_minimal_basis": self.has_minimal_basis,
        }


def _coeff_rank(coeffs: np.ndarray) -> int:
    rows = [list(map(int, r)) for r in coeffs]
    return len(hnf(rows))


def _spans_everything(coeffs: np.ndarray, n: int) -> bool:
    rows = [list(map(int, r)) for r in coeffs]
    h = hnf(rows)
    return len(h) == n and all(h[i][i] == 1 for i in range(n))


def _has_minimal_basis(coeffs: np.ndarray, n: int,
                       combo_cap: int = 10 ** 6) -> bool:
    reps = coeffs[: len(coeffs) // 2]
    k = len(reps)
    if k < n:
        return False
    # fast path: greedy pick of independent vectors, check unimodularity
    picked: list[np.ndarray] = []
    for row in reps:
        trial = picked + [row]
        if _coeff_rank(np.array(trial)) == len(trial):
            picked.append(row)
            if len(picked) == n:
                break
    if len(picked) == n:
        det = round(np.linalg.det(np.array(picked, dtype=float)))
        if abs(det) == 1:
            return True
    if math.comb(k, n) > combo_cap:
        return False  # best effort beyond the combination cap
    for combo in itertools.combinations(range(k), n):
        det = round(np.linalg.det(reps[list(combo)].astype(float)))
        if abs(det) == 1:
            return True
    return False


def packing_report(lat: Lattice, cap: int | None = None) -> PackingReport:
    mvs = l1_minimum(lat, cap=cap)
    n = lat.n
    lam = mvs.lambda1
    vol = lat.volume
    if isinstance(lam, Fraction) and isinstance(vol, Fraction):
        density = float(lam ** n / (math.factorial(n) * vol))
    else:
        density = float(lam) ** n / (math.factorial(n) * float(vol))
    return PackingReport(
        n=n,
        lambda1=float(lam),
        volume=float(vol),
        density=density,
        kissing=mvs.kissing,
        well_rounded=_coeff_rank(mvs.coeffs) == n,
        strongly_well_rounded=_spans_everything(mvs.coeffs, n),
        has_minimal_basis=_has_minimal_basis(mvs.coeffs, n),
    )


def halfnorm_pair_count(lat: Lattice, mvs: MinimalVectorSet | None = None,
                        tol: float = 1e-9) -> int:
    """Number of +- pairs of minimal vectors with max-norm <= lambda1 / 2."""
    mvs = mvs or l1_minimum(lat)
    half = float(mvs.lambda1) / 2
    reps = mvs.vectors[: len(mvs.vectors) // 2]
    return int(np.sum(np.abs(reps).max(axis=1) <= half + tol))


def l1_histogram(lat: Lattice, max_norm: float, tol: float = 1e-6,
                 cap: int | None = None) -> list[tuple[float, int]]:
    """Counts of nonzero lattice vectors by L1 norm up to max_norm.

    Norm values within tol are merged; both signs counted.  This is the
    float-lattice analogue of a truncated theta series.
    """
    vectors, _ = enumerate_within_l1(lat, max_norm, cap=cap)
    if not len(vectors):
        return []
    norms = np.sort(np.abs(vectors).sum(axis=1))
    groups: list[tuple[float, int]] = []
    for v in norms:
        if groups and v - groups[-1][0] <= tol:
            groups[-1] = (groups[-1][0], groups[-1][1] + 1)
        else:
            groups.append((float(v), 1))
    return groups
