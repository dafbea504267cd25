import math
from fractions import Fraction

import numpy as np
import pytest

from conftest import random_sublattice, scramble_unimodular
from crosstheta import catalog
from crosstheta.geometry import (
    enumerate_l2_coeffs,
    enumerate_within_l1,
    halfnorm_pair_count,
    l1_histogram,
    l1_minimum,
    lll_reduce,
    packing_report,
)
from crosstheta.lattices import IntegerLattice, Lattice, hnf
from crosstheta.theta import theta_lp_bruteforce

TABLE_LAMBDA = {1: 1.0, 2: 1.41421, 3: 1.78467, 4: 2.10934, 5: 2.41383, 6: 2.69874}
TABLE_DELTA = {1: 1.0, 2: 1.0, 3: 0.947368, 4: 0.824858, 5: 0.682885, 6: 0.536574}
TABLE_KISSING = {1: 2, 2: 8, 3: 14, 4: 30, 5: 50, 6: 72}


# -- LLL


def test_lll_identity_fixed():
    lat = lll_reduce(Lattice.identity(3))
    assert lat == Lattice.identity(3)


def test_lll_2d_gauss_oracle():
    lat = lll_reduce(IntegerLattice([[1, 0], [100, 1]]))
    norms = np.linalg.norm(lat.basis_float, axis=1)
    assert norms.max() <= math.sqrt(2) + 1e-9
    assert lat == IntegerLattice([[1, 0], [100, 1]])


def test_lll_unimodular_scramble_recovers_unit_vectors(rng):
    for _ in range(5):
        rows = scramble_unimodular(rng, [[int(i == j) for j in range(4)]
                                         for i in range(4)], steps=20)
        lat = lll_reduce(IntegerLattice(rows))
        assert lat == Lattice.identity(4)
        norms = np.linalg.norm(lat.basis_float, axis=1)
        np.testing.assert_allclose(norms, 1.0, atol=1e-12)


# -- enumeration


def test_enumerate_z2_radius1():
    vecs, _ = enumerate_within_l1(Lattice.identity(2), 1)
    got = sorted(map(tuple, vecs.astype(int).tolist()))
    assert got == [(-1, 0), (0, -1), (0, 1), (1, 0)]


def test_enumerate_d4_radius2():
    vecs, _ = enumerate_within_l1(catalog.dn(4), 2)
    assert len(vecs) == 32


def test_enumerate_unit_volume_dim3_radius():
    lat = catalog.known_packing(3).unit_volume_form()
    vecs, _ = enumerate_within_l1(lat, 1.7847)
    assert len(vecs) == 14


def test_enumerate_counts_match_brute_theta(rng):
    for _ in range(5):
        lat = random_sublattice(rng, n=3, max_index=16)
        vecs, _ = enumerate_within_l1(lat, 6)
        series = theta_lp_bruteforce(lat, 1, 6)
        assert len(vecs) == sum(int(c) for c in series.coeffs[1:])


def test_enumerate_exact_boundary_inclusion():
    # boundary vectors at exactly the radius must be included
    vecs, _ = enumerate_within_l1(Lattice.identity(2), 2)
    got = set(map(tuple, vecs.astype(int).tolist()))
    assert (1, 1) in got and (2, 0) in got
    assert len(got) == 12


def test_half_enumeration_mode():
    vecs, _ = enumerate_within_l1(Lattice.identity(3), 1, include_negatives=False)
    assert len(vecs) == 3


# -- minima


def test_l1_minimum_zn():
    for n in (2, 3, 5):
        mvs = l1_minimum(catalog.zn(n))
        assert mvs.lambda1 == 1
        assert mvs.kissing == 2 * n


def test_l1_minimum_dn():
    for n in (3, 4, 5):
        mvs = l1_minimum(catalog.dn(n))
        assert mvs.lambda1 == 2
        assert mvs.kissing == 2 * n * n


def test_l1_minimum_exact_rational():
    lat = IntegerLattice([[2, 0], [1, 1]]).scale(Fraction(1, 3))
    mvs = l1_minimum(lat)
    assert mvs.lambda1 == Fraction(2, 3)


def test_l1_minimum_negation_closed(rng):
    lat = random_sublattice(rng, n=4, max_index=20)
    mvs = l1_minimum(lat)
    coeffs = set(map(tuple, mvs.coeffs.tolist()))
    assert coeffs == {tuple(-x for x in c) for c in coeffs}
    assert mvs.kissing % 2 == 0


def test_l1_minimum_scaling_covariance():
    lat = catalog.known_packing(3)
    lam = l1_minimum(lat).lambda1
    assert l1_minimum(lat.scale(Fraction(3, 2))).lambda1 == lam * Fraction(3, 2)


def test_table_rows_exact_integer_minima():
    # integer-frame l1 minima and kissing numbers of the reference packings
    expected = {1: 1, 2: 2, 3: 6, 4: 168, 5: 20, 6: 28}
    for n, lam in expected.items():
        mvs = l1_minimum(catalog.known_packing(n))
        assert mvs.lambda1 == lam
        assert mvs.kissing == TABLE_KISSING[n]


def test_table_rows_unit_volume_reports():
    for n in range(1, 7):
        lat = catalog.known_packing(n)
        report = packing_report(lat)
        vol = float(lat.volume)
        lam_unit = report.lambda1 / vol ** (1.0 / n)
        assert abs(lam_unit - TABLE_LAMBDA[n]) < 1e-4
        assert abs(report.density - TABLE_DELTA[n]) < 1e-5
        assert report.kissing == TABLE_KISSING[n]
        assert abs(report.density - lam_unit ** n / math.factorial(n)) < 1e-7


def test_kissing_matches_theta_coefficient(rng):
    for _ in range(5):
        lat = random_sublattice(rng, n=3, max_index=12)
        mvs = l1_minimum(lat)
        series = theta_lp_bruteforce(lat, 1, int(mvs.lambda1))
        assert int(series.coeffs[-1]) == mvs.kissing


# -- packing reports


def test_report_z4():
    report = packing_report(catalog.zn(4))
    assert report.density == pytest.approx(1 / 24)
    assert report.well_rounded
    assert report.strongly_well_rounded
    assert report.has_minimal_basis


def test_report_density_bound(rng):
    for _ in range(8):
        lat = random_sublattice(rng, n=3, max_index=16)
        report = packing_report(lat)
        assert report.density <= 1 + 1e-12
        assert report.kissing <= 3 ** 3 - 1


def test_report_2d_tiling_density_one():
    lat = IntegerLattice([[1, 1], [1, -1]]).scale(Fraction(7, 3))
    report = packing_report(lat)
    assert report.density == pytest.approx(1.0)


def test_density_scale_invariant():
    lat = catalog.known_packing(4)
    r1 = packing_report(lat)
    r2 = packing_report(lat.unit_volume_form())
    assert abs(r1.density - r2.density) < 1e-9


def test_well_roundedness_flags():
    # Z x 3Z: minimal vectors only along the first axis
    skew = IntegerLattice([[1, 0], [0, 3]])
    report = packing_report(skew)
    assert not report.well_rounded
    assert report.kissing == 2


def test_strongly_well_rounded_vs_minimal_basis():
    # D4 has minimal vectors spanning and generating the lattice
    report = packing_report(catalog.dn(4))
    assert report.well_rounded
    assert report.strongly_well_rounded
    assert report.has_minimal_basis


# -- half-max-norm pairs


def test_halfnorm_zn_zero_pairs():
    assert halfnorm_pair_count(catalog.zn(3)) == 0


def test_halfnorm_2d_optimal():
    lat = Lattice([[Fraction(1, 2), Fraction(1, 2)],
                   [Fraction(1, 2), Fraction(-1, 2)]])
    assert halfnorm_pair_count(lat) >= 1


def test_halfnorm_dim4_record():
    lat = catalog.known_packing(4)
    lam = l1_minimum(lat).lambda1  # integer frame: scale so lambda1 = 1
    unit = lat.scale(Fraction(1, int(lam)))
    assert halfnorm_pair_count(unit) >= 6


# -- histograms


def test_l1_histogram_matches_series():
    hist = l1_histogram(catalog.dn(3), 4)
    assert hist == [(2.0, 18), (4.0, 66)]


def test_histogram_float_lattice():
    unit = catalog.known_packing(2).unit_volume_form()
    hist = l1_histogram(unit, 2.9)
    assert hist[0] == (pytest.approx(math.sqrt(2)), 8)
