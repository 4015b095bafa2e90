import math

import numpy as np
import pytest
from mpmath import mpc

from app import constants
from app.aggregates import (
    DenseLambda, bfi_discrepancy, main_term, pair_lower_bound, ratio_trend, s_direct, s_identity, sweep,
    term_ii, term_iii_trend, term_unswitched, trend_grid, z_count_average,
)
from app.arith_core import brute_force_psi, euler_phi
from app.characters import character_group
from app.errors import DomainError, MissingReportsError, ResourceError
from app.models import CentralValueReport, CertifiedConstant

C3_APPROX = 1.3920824905113


def _s_by_definition(Q, x):
    terms = []
    for q in range(int(Q) + 1, int(2 * Q) + 1):
        terms.append(brute_force_psi(x, q, 1) - brute_force_psi(x, q) / euler_phi(q))
    return -math.fsum(terms)


def test_s_direct_against_the_definition():
    assert s_direct(10, 600) == pytest.approx(_s_by_definition(10, 600), abs=1e-9)
    assert s_direct(12.5, 800) == pytest.approx(_s_by_definition(12.5, 800), abs=1e-9)


def test_divisor_switch_identity_holds():
    for Q, x in ((20.0, 3000.0), (150.0, 20_000.0), (1999.0, 20_000.0)):
        result = s_identity(Q, x, c3_value=C3_APPROX)
        scale = abs(result.term_I) + abs(result.term_II) + abs(result.term_III)
        assert abs(result.identity_gap) <= 1e-9 * max(scale, 1.0)
        assert result.residual == pytest.approx(result.S_direct - result.main_term)


@pytest.mark.slow
def test_divisor_switch_identity_on_random_points():
    rng = np.random.default_rng(20240601)
    points = []
    for _ in range(20):
        x = float(rng.integers(100, 10**5 + 1))
        points.append((float(rng.uniform(1.0, x / 2)), x))
    points.append((1e7 ** 0.8, 1e7))
    for Q, x in points:
        result = s_identity(Q, x, c3_value=C3_APPROX)
        scale = abs(result.term_I) + abs(result.term_II) + abs(result.term_III)
        assert abs(result.identity_gap) <= 1e-9 * max(scale, 1.0), (Q, x)


def test_switched_second_term_matches_modulus_by_modulus():
    dense = DenseLambda(5000)
    assert term_ii(40, 5000, dense) == pytest.approx(term_unswitched(40, 5000, dense), abs=1e-8)


def test_dense_class_sums(small_table):
    dense = DenseLambda(3000, small_table)
    assert dense.class_sum(4, 0, 3000) == pytest.approx(brute_force_psi(3000, 4, 1), abs=1e-9)
    assert dense.class_sum(1, 0, 3000) == pytest.approx(brute_force_psi(3000), abs=1e-9)
    assert dense.class_sum(10, 2500, 2600) == pytest.approx(
        brute_force_psi(2600, 10, 1) - brute_force_psi(2500, 10, 1), abs=1e-9
    )
    assert dense.class_sum(7, 3000, 3000) == 0.0


def test_dense_array_respects_the_memory_budget():
    with pytest.raises(ResourceError):
        DenseLambda(1e9)


def test_range_checks():
    with pytest.raises(DomainError):
        s_direct(100, 100)
    with pytest.raises(DomainError):
        s_identity(0, 100)
    with pytest.raises(DomainError):
        sweep(1000, 50, 20)
    with pytest.raises(DomainError):
        main_term(-1, 10, 0.0)


def test_main_term():
    assert main_term(100, 10_000, C3_APPROX) == pytest.approx(50 * math.log(100) + C3_APPROX * 100)


def test_third_term_approximation_is_reported():
    result = s_identity(300, 30_000, c3_value=C3_APPROX)
    assert result.term_III_approx == pytest.approx(result.term_III, rel=1e-2)


def test_sweep_grid_endpoints():
    results = sweep(5000, 10, 100, points=4, c3_value=C3_APPROX)
    assert [round(r.Q, 6) for r in (results[0], results[-1])] == [10, 100]
    assert len(sweep(5000, 30, 30, c3_value=C3_APPROX)) == 1


def test_trend_grid():
    grid = trend_grid(1e6, eta=0.8, points=5)
    centre = 1e6 ** 0.8
    assert grid["window"][0] == pytest.approx(centre / 3)
    assert grid["window"][-1] == pytest.approx(centre / 2)
    assert grid["log_grid"][0] == pytest.approx(1e3)
    with pytest.raises(DomainError):
        trend_grid(1e6, eta=1.0)


def test_ratio_trend_rows():
    rows, monotone = ratio_trend([2000.0, 8000.0], 0.8, c3_value=C3_APPROX)
    for x, Q, direct, mt, ratio in rows:
        assert Q == pytest.approx(x ** 0.8)
        assert direct == pytest.approx(s_direct(Q, x))
        assert mt == pytest.approx(main_term(Q, x, C3_APPROX))
        assert ratio == pytest.approx(direct / mt)
    gaps = [abs(r[4] - 1) for r in rows]
    assert monotone == (gaps[1] <= gaps[0])


def test_term_iii_trend_matches_the_identity(monkeypatch):
    monkeypatch.setattr(constants, "c1", lambda: CertifiedConstant("C1", 1.9435964368207592, 1e-9, 8))
    rows = term_iii_trend([3000.0], 0.7)
    x, Q, third, scaled, c1_value = rows[0]
    assert third == pytest.approx(s_identity(Q, x, c3_value=C3_APPROX).term_III)
    assert scaled == pytest.approx(third / (x * math.log(2)))
    assert c1_value == 1.9435964368207592


def test_bfi_discrepancy_by_definition():
    Q, x = 8, 1000
    expected = math.fsum(
        abs(brute_force_psi(x, q, 1) - brute_force_psi(x, q) / euler_phi(q)) for q in range(9, 17)
    )
    with_abs, zero_route = bfi_discrepancy(Q, x)
    assert with_abs == pytest.approx(expected, abs=1e-9)
    assert zero_route is None


def test_bfi_skips_moduli_sharing_a_factor_with_the_residue():
    with_abs, _ = bfi_discrepancy(8, 1000, a=3)
    expected = math.fsum(
        abs(brute_force_psi(1000, q, 3) - brute_force_psi(1000, q) / euler_phi(q))
        for q in range(9, 17) if math.gcd(3, q) == 1
    )
    assert with_abs == pytest.approx(expected, abs=1e-9)


def test_pair_lower_bound_is_nonnegative():
    rho = np.linspace(0.01, 0.99, 99)[:, None]
    x = np.geomspace(1.0, 1e8, 200)[None, :]
    assert np.all(pair_lower_bound(rho, x) >= -1e-9)
    assert pair_lower_bound(0.5, 1.0) == pytest.approx(3.0)
    with pytest.raises(DomainError):
        pair_lower_bound(1.0, 10.0)
    with pytest.raises(DomainError):
        pair_lower_bound(0.5, 0.5)


def _reports(Q, z=0):
    out = []
    for q in range(3, Q + 1):
        for chi in character_group(q).nonprincipal():
            out.append(CentralValueReport(chi.label, mpc(0.7), z, 1e-3))
    return out


def test_z_count_average():
    assert z_count_average(10, _reports(10)) == 0.0
    assert z_count_average(5, _reports(5, z=1)) == pytest.approx(5 / 25)


def test_z_count_average_lists_missing_moduli():
    reports = [r for r in _reports(8) if r.modulus != 7]
    with pytest.raises(MissingReportsError) as info:
        z_count_average(8, reports)
    assert info.value.moduli == [7]
    unresolved = _reports(4)
    unresolved[0].z_chi = None
    with pytest.raises(MissingReportsError):
        z_count_average(4, unresolved)
