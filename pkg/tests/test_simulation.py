import numpy as np
import pytest

from crosstheta import catalog
from crosstheta.errors import InsufficientConstellation, NotSublattice
from crosstheta.lattices import IntegerLattice, Lattice
from crosstheta.simulation import (
    SimConfig,
    build_coset_code,
    compare_sublattices,
    dual_l1_minimum,
    scaled_self_pair,
    simulate,
)

Z3 = catalog.zn(3)
Z4 = catalog.zn(4)

# Index-256 sublattices of Z^4 used in the fixed-superlattice comparison
SUBLATTICE_BASES = {
    1: [(-2, 5, -4, -4), (2, 2, -2, 4), (2, 4, -5, -3), (0, -4, 1, 1)],
    2: [(0, 2, 0, -4), (4, 0, 0, 2), (0, 0, -4, -2), (3, -3, -1, -1)],
    3: [(0, 5, 0, 4), (-1, 1, 1, -2), (-1, 0, 0, 6), (8, 8, 2, -8)],
    4: [(3, -1, -6, -4), (2, -6, -4, -2), (-8, -7, -3, -4), (1, -7, -6, -3)],
    5: [(6, 9, -6, 8), (1, 8, 1, -4), (4, -2, -2, 1), (7, -6, -7, 9)],
    6: [(-5, 3, 4, 7), (1, 7, 4, 5), (6, 4, 2, -3), (9, 2, -4, -9)],
}


def test_reference_sublattices_have_index_256():
    for rows in SUBLATTICE_BASES.values():
        lat = IntegerLattice(rows)
        assert abs(int(lat.volume)) == 256
        assert Z4.contains(lat)


def test_build_coset_code_z3():
    latb, late = scaled_self_pair(Z3, 2)
    code = build_coset_code(latb, late, 4)
    assert code.n_cosets == 8
    assert len(code.points) == 64


def test_build_coset_code_z4_16pam():
    latb, late = scaled_self_pair(Z4, 4)
    code = build_coset_code(latb, late, 16)
    assert code.n_cosets == 256
    assert len(code.points) == 65536
    assert np.all(code.coset_counts == 256)


def test_build_coset_code_trivial():
    code = build_coset_code(Z3, Z3, 4)
    assert code.n_cosets == 1


def test_build_rejects_non_sublattice():
    with pytest.raises(NotSublattice):
        build_coset_code(IntegerLattice([[2, 0], [0, 2]]), Lattice.identity(2), 4)


def test_build_rejects_small_pam():
    latb, late = scaled_self_pair(Z3, 4)
    with pytest.raises(InsufficientConstellation):
        build_coset_code(latb, late, 2)  # 2^3 < 64 cosets


def test_power_normalization_is_identity_on_zn():
    latb, late = scaled_self_pair(Z4, 4)
    code = build_coset_code(latb, late, 16)
    np.testing.assert_allclose(code.basis_b, np.eye(4), atol=1e-12)


def test_power_equalized_across_lattices():
    target = None
    for lat in (Z4, catalog.dn(4), catalog.known_packing(4).dual):
        latb, late = scaled_self_pair(lat, 4)
        code = build_coset_code(latb, late, 16)
        centered = code.points - code.points.mean(axis=0)
        power = float((centered ** 2).sum(axis=1).mean())
        if target is None:
            target = power
        assert power == pytest.approx(target, rel=1e-9)


CODE_Z3 = build_coset_code(*scaled_self_pair(Z3, 2), 4)


def test_simulate_deterministic():
    cfg = SimConfig(snr_db_grid=(5.0,), num_rounds=6000, seed=11)
    a = simulate(CODE_Z3, cfg, who="eve")
    b = simulate(CODE_Z3, cfg, who="eve")
    assert a.estimates == b.estimates


def test_simulate_threads_match_serial():
    cfg = SimConfig(snr_db_grid=(5.0, 12.0), num_rounds=10000, seed=3)
    a = simulate(CODE_Z3, cfg, who="eve", threads=1)
    b = simulate(CODE_Z3, cfg, who="eve", threads=3)
    assert a.estimates == b.estimates


def test_simulate_bob_high_snr():
    cfg = SimConfig(snr_db_grid=(60.0,), num_rounds=4000, seed=7)
    res = simulate(CODE_Z3, cfg, who="bob")
    assert res.estimates[0] <= res.ci_halfwidths[0]


def test_simulate_eve_guessing_floor_deep_noise():
    cfg = SimConfig(snr_db_grid=(-25.0,), num_rounds=30000, seed=5)
    res = simulate(CODE_Z3, cfg, who="eve")
    floor = 1 / CODE_Z3.n_cosets
    assert abs(res.estimates[0] - floor) <= 3 * res.ci_halfwidths[0]
    assert res.estimates[0] >= floor - 3 * res.ci_halfwidths[0]


def test_simulate_monotone_in_snr():
    cfg = SimConfig(snr_db_grid=(0.0, 20.0), num_rounds=20000, seed=9)
    res = simulate(CODE_Z3, cfg, who="eve")
    assert res.estimates[1] >= res.estimates[0] - 3 * sum(res.ci_halfwidths)


def test_estimates_within_unit_interval_and_ci_shrinks():
    small = simulate(CODE_Z3, SimConfig(snr_db_grid=(8.0,), num_rounds=2000,
                                        seed=4), who="eve")
    large = simulate(CODE_Z3, SimConfig(snr_db_grid=(8.0,), num_rounds=32000,
                                        seed=4), who="eve")
    assert 0 <= small.estimates[0] <= 1
    # 16x the rounds shrinks the Wilson halfwidth about 4x
    assert large.ci_halfwidths[0] < small.ci_halfwidths[0] / 2.5


def test_eve_cdp_bounded_by_pce_bound():
    from crosstheta.bounds import bound_Pce

    latb, late = scaled_self_pair(Z4, 4)
    code = build_coset_code(latb, late, 16)
    cfg = SimConfig(snr_db_grid=(10.0,), num_rounds=20000, seed=13)
    res = simulate(code, cfg, who="eve", threads=2)
    bound = bound_Pce(latb, late.to_integer() if late.exact else late,
                      10.0 ** (10.0 / 10.0))
    assert res.estimates[0] <= bound + 3 * res.ci_halfwidths[0]


def test_snr_definitions_differ_by_fixed_offset():
    # es_n0 = gamma * 2 * (pam^2 - 1) / 12: identical estimates at shifted dB
    import math

    shift = 10 * math.log10(2 * (16 ** 2 - 1) / 12.0)
    latb, late = scaled_self_pair(Z4, 4)
    code = build_coset_code(latb, late, 16)
    a = simulate(code, SimConfig(snr_db_grid=(0.0,), num_rounds=4096, seed=2,
                                 snr_definition="es_n0"), who="eve")
    b = simulate(code, SimConfig(snr_db_grid=(-shift,), num_rounds=4096, seed=2,
                                 snr_definition="gamma"), who="eve")
    assert a.estimates[0] == pytest.approx(b.estimates[0], abs=1e-12)


def test_dual_l1_minimum_values():
    assert dual_l1_minimum(Z4) == pytest.approx(1.0)
    # dual of D4 contains (1/2,...,1/2); l1 minimum is 1 (e_i are in D4*)
    assert dual_l1_minimum(catalog.dn(4)) == pytest.approx(1.0)


def test_compare_sublattices_fixed_superlattice():
    subs = [IntegerLattice(SUBLATTICE_BASES[2]), IntegerLattice(SUBLATTICE_BASES[6])]
    cfg = SimConfig(snr_db_grid=(8.0,), num_rounds=4096, seed=21)
    out = compare_sublattices(Z4, subs, cfg, pam_levels=16)
    assert len(out["eve_cdp"]) == 2
    assert len(out["dual_l1_minima"]) == 2
    assert out["dual_l1_minima"][0] > out["dual_l1_minima"][1]
    for ests in out["eve_cdp"]:
        assert 0 <= ests[0] <= 1


def test_compare_sublattices_identical_inputs_identical_estimates():
    sub = IntegerLattice(SUBLATTICE_BASES[2])
    cfg = SimConfig(snr_db_grid=(8.0,), num_rounds=4096, seed=21)
    out = compare_sublattices(Z4, [sub, sub], cfg, pam_levels=16)
    assert out["eve_cdp"][0] == out["eve_cdp"][1]
