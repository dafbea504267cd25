import math
from fractions import Fraction

import numpy as np
import pytest

from conftest import random_sublattice
from crosstheta import catalog
from crosstheta.codes import code_from_lattice, dual_code, swe
from crosstheta.errors import NoSignChange, NotIntegral
from crosstheta.lattices import IntegerLattice, Lattice
from crosstheta.series import ThetaRational
from crosstheta.theta import (
    theta_crossover,
    theta_from_swe,
    theta_l1_construction_a,
    theta_l1_dual_construction_a,
    theta_l1_lattice,
    theta_lp_bruteforce,
    theta_orthogonal_comparison,
)


def series_ints(ps, upto=None):
    coeffs = ps.coeffs if upto is None else ps.coeffs[: upto + 1]
    return [int(c) for c in coeffs]


def zn_series(n, order):
    out = [1]
    for k in range(1, order + 1):
        # N_k for Z^n: closed form via the generating function (1+q)^n/(1-q)^n
        out.append(sum(math.comb(n, j) * math.comb(k - 1, j - 1) * 2 ** j
                       for j in range(1, min(n, k) + 1)))
    return out


def test_zn_closed_form_series():
    for n in range(1, 6):
        tr = theta_l1_lattice(catalog.zn(n))
        got = series_ints(tr.series_q(4))
        want = [1, 2 * n, 2 * n * n, 2 * n * (1 + 2 * n * n) // 3,
                2 * n * n * (2 + n * n) // 3]
        assert got == want
        assert got == zn_series(n, 4)


def test_dn_closed_form_series():
    for n in range(2, 7):
        tr = theta_l1_lattice(catalog.dn(n))
        got = series_ints(tr.series_q(4))
        assert got == [1, 0, 2 * n * n, 0, 2 * n * n * (2 + n * n) // 3]


def test_dn_dual_series():
    # D_n^* = (1/2) * construction-A lattice of the repetition code
    for n in (3, 4, 5):
        dn_dual = catalog.dn(n).dual
        ps = theta_l1_lattice(dn_dual).series_q(n // 2 + 2)
        terms = dict(ps.q_terms())
        zn = dict(theta_l1_lattice(catalog.zn(n)).series_q(n // 2 + 2).q_terms())
        # Z^n part plus the shifted-coset block starting at exponent n/2
        assert terms[Fraction(n, 2)] == zn.get(Fraction(n, 2), 0) + 2 ** n
        assert terms[Fraction(n, 2) + 1] == zn.get(Fraction(n, 2) + 1, 0) + n * 2 ** n
        for k in range(1, (n + 1) // 2):  # below n/2 only the Z^n part shows
            assert terms.get(Fraction(k), 0) == zn[Fraction(k)]


def test_e8_scaled_series():
    tr = theta_l1_construction_a(catalog.extended_hamming_code())
    got = series_ints(tr.series_q(8))
    assert got[::2] == [1, 16, 352, 3376, 19648]
    assert got[1::2] == [0, 0, 0, 0]


def test_golay_swe_and_leech_series():
    code = catalog.golay_code_z4()
    s = swe(code)
    assert s.size == 4 ** 12
    assert s.terms[(24, 0, 0)] == 1
    assert s.terms[(16, 0, 8)] == 759
    assert s.terms[(11, 12, 1)] == 61824
    tr = theta_from_swe(s)
    got = series_ints(tr.series_q(18))
    want = [0] * 19
    for k, c in [(0, 1), (4, 48), (8, 1152), (12, 67024), (14, 512256),
                 (16, 7850592), (18, 61193984)]:
        want[k] = c
    assert got == want
    # halving the lattice moves the series onto the q^(1/2) grid
    half = ThetaRational(numer=tr.numer, denom=tr.denom, scale=2)
    terms = dict(half.series_q(8).q_terms())
    assert terms[Fraction(2)] == 48
    assert terms[Fraction(4)] == 1152


def test_theta_lattice_z3_via_full_code():
    tr = theta_l1_lattice(catalog.zn(3))
    assert series_ints(tr.series_q(3)) == [1, 6, 18, 38]


def test_brute_force_z1():
    ps = theta_lp_bruteforce(catalog.zn(1), 1, 3)
    assert series_ints(ps) == [1, 2, 2, 2]


def test_brute_force_d4_kissing():
    ps = theta_lp_bruteforce(catalog.dn(4), 1, 2)
    assert series_ints(ps) == [1, 0, 32]


def test_brute_force_e8_scaled():
    from crosstheta.codes import construction_a

    lat = construction_a(catalog.extended_hamming_code())
    ps = theta_lp_bruteforce(lat, 1, 4)
    assert series_ints(ps) == [1, 0, 16, 0, 352]


def test_brute_force_l2_matches_l1_on_zn():
    # For Z^n, ||x||_2^2 exponents give the classical counts r_n(k)
    ps = theta_lp_bruteforce(catalog.zn(2), 2, 5)
    assert series_ints(ps) == [1, 4, 4, 0, 4, 8]


def test_brute_force_rejects_float_lattice():
    with pytest.raises(NotIntegral):
        theta_lp_bruteforce(Lattice(np.eye(2) * 1.5, exact=False), 1, 3)


def test_brute_force_fractional_scale():
    lat = IntegerLattice([[2, 0], [1, 1]]).scale(Fraction(1, 2))
    ps = theta_lp_bruteforce(lat, 1, 3)
    terms = dict(ps.q_terms())
    assert terms[Fraction(1)] == 8  # the norm-2 shell, halved
    assert terms[Fraction(2)] == 16


def test_oracle_equivalence_random_sublattices(rng):
    for _ in range(12):
        lat = random_sublattice(rng, n=4, max_index=32)
        brute = theta_lp_bruteforce(lat, 1, 8)
        closed = theta_l1_lattice(lat).series_q(8)
        assert series_ints(brute) == series_ints(closed)


def test_dual_path_matches_closed_form(rng):
    for _ in range(8):
        m = int(rng.choice((2, 3, 4, 5)))
        n = int(rng.integers(2, 5))
        gens = rng.integers(0, m, size=(2, n)).tolist()
        from crosstheta.codes import LinearCode

        code = LinearCode.from_rows(m, gens)
        dual_series = theta_l1_dual_construction_a(code, 8)
        closed = theta_l1_construction_a(dual_code(code)).series_q(8)
        assert series_ints(dual_series, 8) == series_ints(closed)


def test_dual_path_binary_weight_enumerator_identity():
    # binary case: (1/|C|) W_C((1+q)/(1-q), (1-q)/(1+q))
    code = catalog.even_weight_code(4)
    got = theta_l1_dual_construction_a(code, 30)
    n = 4
    q = 0.37
    w = lambda x, y: ((x + y) ** n + (x - y) ** n) / 2
    direct = w((1 + q) / (1 - q), (1 - q) / (1 + q)) / 2 ** (n - 1)
    series_val = sum(float(c) * q ** k for k, c in enumerate(got.coeffs))
    assert abs(direct - series_val) < 1e-7  # truncation tail at q^31


def test_signed_permutation_invariance(rng):
    base = random_sublattice(rng, n=4, max_index=16)
    perm = [2, 0, 3, 1]
    signs = [1, -1, 1, -1]
    rows = [[signs[j] * row[perm[j]] for j in range(4)] for row in base.int_rows]
    transformed = IntegerLattice(rows)
    a = series_ints(theta_l1_lattice(base).series_q(6))
    b = series_ints(theta_l1_lattice(transformed).series_q(6))
    assert a == b


def test_nonnegative_integer_coefficients(rng):
    for _ in range(6):
        lat = random_sublattice(rng, n=3, max_index=24)
        ps = theta_l1_lattice(lat).series_q(6)
        ints = series_ints(ps)
        assert ints[0] == 1
        assert all(c >= 0 for c in ints)


# -- crossover and the orthogonal minimization inequality


L1 = IntegerLattice([[2, 0], [1, 1]])
L2 = IntegerLattice([[3, 0], [1, 1]])


def test_crossover_value():
    q_star = theta_crossover(L1, L2, (0.005, 0.05))
    assert abs(q_star - 0.0162678) < 1e-6


def test_crossover_orders_thetas():
    # below q*: denser packing (L1) has the smaller theta; above: reversed
    from crosstheta.theta import _eval_powered

    tr1, tr2 = theta_l1_lattice(L1), theta_l1_lattice(L2)
    s1, s2 = math.sqrt(2), math.sqrt(3)
    for q, sign in ((0.01, -1), (0.02, 1)):
        d = _eval_powered(tr1, q, 1 / s1) - _eval_powered(tr2, q, 1 / s2)
        assert (d > 0) == (sign > 0)


def test_crossover_identical_lattices_no_sign_change():
    with pytest.raises(NoSignChange):
        theta_crossover(L1, L1, (0.005, 0.05))


def test_crossover_signed_permutation_no_sign_change():
    rot = IntegerLattice([[0, -2], [1, -1]])  # signed permutation image of L1
    with pytest.raises(NoSignChange):
        theta_crossover(L1, rot, (0.005, 0.05))


def test_orthogonal_comparison_equal_case():
    tz, ts = theta_orthogonal_comparison([1.0, 1.0, 1.0], 0.3)
    assert abs(tz - ts) < 1e-14


def test_orthogonal_comparison_hyperbolic_identity():
    # q = e^{-2}: theta(Z^2) = coth(1)^2, scaled = coth(2) coth(1/2)
    q = math.exp(-2)
    tz, ts = theta_orthogonal_comparison([2.0, 0.5], q)
    assert abs(tz - 1 / math.tanh(1) ** 2) < 1e-12
    assert abs(ts - 1 / (math.tanh(2) * math.tanh(0.5))) < 1e-12
    assert tz < ts


def test_orthogonal_comparison_numeric_sum_oracle():
    q = 0.1
    alphas = [2.0, 1.0, 0.5]
    tz, ts = theta_orthogonal_comparison(alphas, q)
    brute = 1.0
    for a in alphas:
        brute *= sum(q ** (a * abs(k)) for k in range(-80, 81))
    assert abs(ts - brute) < 1e-10
    assert tz < ts


def test_orthogonal_comparison_grid():
    for alpha in (1.1, 1.5, 2.0, 4.0):
        for q in (0.01, 0.1, 0.5, 0.9):
            for n in (2, 3, 4):
                alphas = [alpha] + [1.0] * (n - 2) + [1.0 / alpha]
                tz, ts = theta_orthogonal_comparison(alphas, q)
                assert tz < ts


def test_orthogonal_comparison_validates_product():
    with pytest.raises(ValueError):
        theta_orthogonal_comparison([2.0, 1.0], 0.5)
