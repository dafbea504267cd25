"""Standard codes and reference lattices used across the library and CLI.

The dense cross-polytope packing bases in dimensions 1..6 are the best
known lattice packings (dimension 3 is Minkowski's optimal lattice, 5 and 6
are the circulant constructions of Cools and Govaert, 4 is the record
found by constrained optimization).
"""

from __future__ import annotations

import numpy as np

from .codes import LinearCode
from .lattices import IntegerLattice


def circulant(first_row) -> list[list[int]]:
    n = len(first_row)
    return [[first_row[(j - i) % n] for j in range(n)] for i in range(n)]


def zn(n: int) -> IntegerLattice:
    return IntegerLattice([[int(i == j) for j in range(n)] for i in range(n)])


def dn(n: int) -> IntegerLattice:
    """Checkerboard lattice: integer vectors with even coordinate sum."""
    rows = [[0] * n for _ in range(n)]
    rows[0][0] = 2
    for i in range(1, n):
        rows[i][i - 1] = 1
        rows[i][i] = 1
    return IntegerLattice(rows)


def even_weight_code(n: int) -> LinearCode:
    gens = []
    for i in range(1, n):
        row = [0] * n
        row[0] = 1
        row[i] = 1
        gens.append(row)
    return LinearCode.from_rows(2, gens)


def repetition_code(n: int, m: int = 2) -> LinearCode:
    return LinearCode.from_rows(m, [[1] * n])


def full_code(n: int, m: int = 2) -> LinearCode:
    return LinearCode.from_rows(m, [[int(i == j) for j in range(n)] for i in range(n)])


def extended_hamming_code() -> LinearCode:
    """The binary [8,4,4] extended Hamming code (self-dual)."""
    return LinearCode.from_rows(2, [
        [1, 1, 1, 1, 0, 0, 0, 0],
        [0, 0, 1, 1, 1, 1, 0, 0],
        [0, 0, 0, 0, 1, 1, 1, 1],
        [0, 1, 0, 1, 0, 1, 0, 1],
    ])


def golay_code_z4() -> LinearCode:
    """The length-24 self-dual quaternary Golay code.

    Built as the extended cyclic code generated by the Hensel lift (Graeffe
    construction) of a binary Golay generator polynomial to Z/4Z.
    """
    g2 = [1, 0, 1, 0, 1, 1, 1, 0, 0, 0, 1, 1]  # x^11+x^10+x^6+x^5+x^4+x^2+1
    even = [c if i % 2 == 0 else 0 for i, c in enumerate(g2)]
    odd = [c if i % 2 == 1 else 0 for i, c in enumerate(g2)]

    def mul4(a, b):
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] = (out[i + j] + x * y) % 4
        return out

    e2 = mul4(even, even)
    o2 = mul4(odd, odd)
    width = max(len(e2), len(o2))
    diff = [((e2[i] if i < len(e2) else 0) - (o2[i] if i < len(o2) else 0)) % 4
            for i in range(width)]
    lift = [diff[2 * i] for i in range((width + 1) // 2)]
    while lift and lift[-1] == 0:
        lift.pop()
    if lift[-1] == 3:  # normalize to a monic generator
        lift = [(-c) % 4 for c in lift]
    gens = np.zeros((12, 24), dtype=np.int64)
    for i in range(12):
        for j, c in enumerate(lift):
            gens[i, (i + j) % 23] = c
    gens[:, 23] = (-gens[:, :23].sum(axis=1)) % 4
    return LinearCode.from_rows(4, gens.tolist())


#: densest known lattice cross-polytope packings, dimensions 1..6
KNOWN_PACKINGS: dict[int, list[list[int]]] = {
    1: [[1]],
    2: [[1, 1], [1, -1]],
    3: circulant([3, -2, 1]),
    4: [[20, 53, -53, -42],
        [-62, -22, 42, -42],
        [-22, -22, -62, 62],
        [20, 53, 42, 53]],
    5: circulant([-1, -4, 4, 5, 6]),
    6: circulant([-3, -4, 5, 4, 9, 3]),
}


def known_packing(n: int) -> IntegerLattice:
    return IntegerLattice(KNOWN_PACKINGS[n])
