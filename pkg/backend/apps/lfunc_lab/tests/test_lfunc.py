import math
from fractions import Fraction

import pytest
from mpmath import mp, mpf

from app.arith_core import euler_phi, psi_character, sieve_table
from app.characters import character_group, conductor_and_primitive_part, primitive_nonprincipal
from app.errors import DomainError, PoleError
from app.lfunc import (
    central_report, central_sweep, completed_l, count_zeros_between, hardy_z, hardy_z_complex, hurwitz_zeta,
    imprimitive_psi_correction, l_at_one, l_value, riemann_von_mangoldt_main, scan_zeros, verify_ordinate,
    zero_count_audit,
)

FIRST_ZERO_MOD_4 = 6.020948904697596
FIRST_ZERO_MOD_3 = 8.039737155681468


def test_hurwitz_zeta_at_two_is_basel():
    with mp.workdps(40):
        assert abs(hurwitz_zeta(2, 1, 30) - mp.pi ** 2 / 6) < mpf(10) ** -28


def test_hurwitz_zeta_at_one_half_shift():
    with mp.workdps(40):
        value = hurwitz_zeta(3, Fraction(1, 2), 30)
        assert abs(value - 7 * mp.zeta(3)) < mpf(10) ** -27


def test_hurwitz_zeta_matches_mpmath_off_the_line():
    with mp.workdps(40):
        s = mp.mpc(0.5, 20)
        assert abs(hurwitz_zeta(s, Fraction(1, 3), 30) - mp.zeta(s, mpf(1) / 3)) < mpf(10) ** -25


def test_hurwitz_zeta_rejects_pole_and_bad_shift():
    with pytest.raises(PoleError):
        hurwitz_zeta(1, 1)
    with pytest.raises(DomainError):
        hurwitz_zeta(2, 0)
    with pytest.raises(DomainError):
        hurwitz_zeta(2, 3)


def test_l_value_at_two_is_catalan(chi4):
    with mp.workdps(40):
        assert abs(l_value(2, chi4, 30) - mp.catalan) < mpf(10) ** -28


def test_central_value_mod_four(chi4):
    assert abs(l_value(mpf(1) / 2, chi4) - 0.6676914571896) < 1e-10


def test_principal_pole():
    with pytest.raises(PoleError):
        l_value(1, character_group(5).principal)


def test_l_value_at_one_for_nonprincipal_characters(chi4, chi3):
    with mp.workdps(40):
        assert abs(l_value(1, chi4, 30) - mp.pi / 4) < mpf(10) ** -28
        assert abs(l_value(1, chi3, 30) - mp.pi / (3 * mp.sqrt(3))) < mpf(10) ** -28
    # continuous across the digamma branch
    near = l_value(mp.mpc(1, 0.01), chi4)
    assert abs(near - l_at_one(chi4)) < 0.01
    with pytest.raises(PoleError):
        l_at_one(character_group(5).principal)


def test_functional_equation_symmetry(chi4):
    # real primitive chi with root number 1: Lambda(s) = Lambda(1 - s)
    with mp.workdps(40):
        s = mp.mpc(0.3, 4.0)
        assert abs(completed_l(s, chi4) - completed_l(1 - s, chi4)) < mpf(10) ** -20


def test_hardy_function_is_real_on_the_line():
    for chi in character_group(5).nonprincipal():
        value = hardy_z_complex(7.3, chi)
        assert abs(mp.im(value)) < mpf(10) ** -20


def test_completed_function_needs_primitive_character():
    chi = next(c for c in character_group(12) if c.conductor == 4)
    with pytest.raises(DomainError):
        completed_l(2, chi)


def test_first_zero_mod_four(chi4):
    zs = scan_zeros(chi4, 10.0)
    assert len(zs) == 1
    assert abs(float(zs.ordinates[0]) - FIRST_ZERO_MOD_4) < 1e-9
    assert verify_ordinate(chi4, zs.ordinates[0])
    assert zero_count_audit(chi4, 10.0) == 1


def test_first_zero_mod_three(chi3):
    zs = scan_zeros(chi3, 9.0)
    assert abs(float(zs.ordinates[0]) - FIRST_ZERO_MOD_3) < 1e-6


def test_scan_window_above_a_height(chi4):
    zs = scan_zeros(chi4, 10.0, t_lo=7.0)
    assert len(zs) == 0
    assert count_zeros_between(chi4, 5.0, 7.0) == 1


def test_scan_rejects_principal_and_imprimitive():
    with pytest.raises(DomainError):
        scan_zeros(character_group(7).principal, 5.0)
    chi = next(c for c in character_group(12) if c.conductor == 4)
    with pytest.raises(DomainError):
        scan_zeros(chi, 5.0)


def test_zero_count_from_the_origin_mod_five():
    chi = character_group(5).nonprincipal()[0]
    assert zero_count_audit(chi, 10.0) == len(scan_zeros(chi, 10.0))


@pytest.mark.slow
@pytest.mark.parametrize("q", [3, 4, 5, 7, 8])
def test_sign_changes_match_the_argument_principle(q):
    for chi in primitive_nonprincipal(q):
        zs = scan_zeros(chi, 50.0)
        assert len(zs) == zero_count_audit(chi, 50.0)
        first = zs.ordinates[0]
        oracle = scan_zeros(chi, float(first) + 0.5, dps=60)
        assert abs(float(oracle.ordinates[0]) - float(first)) < 1e-8


@pytest.mark.slow
def test_zero_count_tracks_the_main_term(chi4):
    T = 40.0
    count = zero_count_audit(chi4, T)
    # two sides of the critical line for a real character
    assert abs(2 * count - riemann_von_mangoldt_main(4, T)) < 2 * math.log(4 * T) + 4


def test_hardy_sign_change_brackets_the_zero(chi4):
    assert hardy_z(6.0, chi4) * hardy_z(6.05, chi4) < 0


def test_central_report_nonvanishing(chi4):
    report = central_report(chi4)
    assert report.z_chi == 0
    assert report.status == "nonvanishing"
    assert report.modulus == 4


def test_central_report_escalates_below_threshold(chi4):
    report = central_report(chi4, threshold=1.0, escalation_threshold=1e-10)
    assert report.status == "escalated-nonvanishing"
    assert report.z_chi == 0
    assert report.precision_digits == 60


def test_central_sweep_small_moduli():
    reports = central_sweep(6)
    # 1 + 1 + 3 + 1 nonprincipal characters for q = 3, 4, 5, 6
    assert len(reports) == 6
    assert all(r.z_chi == 0 for r in reports)


@pytest.mark.slow
def test_no_central_zeros_up_to_modulus_100():
    reports = central_sweep(100)
    assert len(reports) == sum(euler_phi(q) - 1 for q in range(3, 101))
    assert [r.label for r in reports if r.z_chi != 0] == []


def test_imprimitive_correction_restores_psi():
    chi = next(c for c in character_group(12) if c.conductor == 4)
    _, star = conductor_and_primitive_part(chi)
    x = 5000
    table = sieve_table(x)
    lhs = psi_character(x, chi, table)
    rhs = psi_character(x, star, table) - imprimitive_psi_correction(chi, x)
    assert abs(lhs - rhs) < 1e-9
    assert imprimitive_psi_correction(star, x) == 0
