import math

import pytest

from app import constants
from app.constants import (
    C3_NOTE, MAX_DIGITS, _certify, all_constants, c0, c1, c1_zeta_ratio, c2, c3, prime_sum, theta_bounds,
)
from app.errors import DomainError, ResourceError

# sum_p log p / (p (p - 1)) = -E - gamma with Mertens' E = -1.3325822757332...
PRIME_SUM_C0 = 0.7553666108317
C1_VALUE = 1.9435964368207592
C0_VALUE = 2.085229671071289
C3_VALUE = C0_VALUE - math.log(2)

SMALL = dict(digits=5, cutoff=10**5)


def test_theta_bounds():
    lo, hi = theta_bounds(41)
    assert lo == pytest.approx(1 - 1 / math.log(41)) and hi == 1.01624
    lo, hi = theta_bounds(4_000_000)
    assert hi - 1 == pytest.approx(0.2 / math.log(4_000_000) ** 2)
    with pytest.raises(DomainError):
        theta_bounds(40)


def test_prime_sum_encloses_the_known_value():
    value, error = prime_sum("c0", 10**5)
    assert abs(value - PRIME_SUM_C0) <= error + 1e-12
    assert error < 1e-5
    with pytest.raises(DomainError):
        prime_sum("c4", 1000)


def test_larger_cutoff_shrinks_the_error():
    _, coarse = prime_sum("c2", 5000)
    _, fine = prime_sum("c2", 80_000)
    assert fine < coarse


def test_c1_routes_agree():
    one = c1(**SMALL)
    assert one.value == pytest.approx(C1_VALUE, abs=1e-10)
    assert one.error_bound < 1e-5
    assert c1_zeta_ratio() == pytest.approx(C1_VALUE, abs=1e-10)
    assert "Euler product" in one.notes[0]


def test_c0_and_c3():
    zero = c0(**SMALL)
    three = c3(**SMALL)
    assert abs(zero.value - C0_VALUE) <= zero.error_bound + 1e-12
    assert zero.error_bound < 1e-5
    assert three.value == pytest.approx(zero.value - math.log(2))
    assert abs(three.value - C3_VALUE) <= three.error_bound + 1e-12
    assert three.notes == [C3_NOTE]


def test_c2_is_built_from_c1():
    two = c2(**SMALL)
    one = c1(6, SMALL["cutoff"])
    assert two.value < 0
    assert two.error_bound < 1e-5
    s2 = float(two.notes[0].split("=")[1])
    assert two.value == pytest.approx(one.value * (0.5772156649015329 - 1 - s2), rel=1e-12)


def test_all_constants_keys_and_serialization():
    found = all_constants(**SMALL)
    assert list(found) == ["C0", "C1", "C2", "C3"]
    data = found["C1"].to_dict()
    assert float(data["value"]) == found["C1"].value
    assert data["digits_requested"] == 5


def test_digit_range_is_checked():
    with pytest.raises(DomainError):
        _certify("c0", MAX_DIGITS + 1, 10**5)
    with pytest.raises(DomainError):
        _certify("c0", 0, 10**5)


def test_cutoff_growth_is_capped(monkeypatch):
    monkeypatch.setattr(constants, "MAX_CUTOFF", 1000)
    with pytest.raises(ResourceError):
        _certify("c0", 10, 100)


def test_certification_doubles_the_cutoff():
    value, error, P = _certify("c0", 4, 50)
    assert error < 1e-4
    assert P >= 50 and (P == 50 or prime_sum("c0", P // 2)[1] >= 1e-4)
