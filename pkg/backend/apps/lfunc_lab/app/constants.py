# lfunc_lab/app/constants.py
"""Certified values of the constants C0, C1, C2, C3.

Each prime sum sum_p log p * h(p) is taken exactly up to a cutoff P and its tail
is enclosed by partial summation against explicit bounds on theta(t):

    sum_{p > P} log p h(p) = -h(P) theta(P) + int_P^inf theta(t) (-h'(t)) dt,

with c_lo t <= theta(t) <= c_hi t for t >= P and decreasing h. The tail then
lies in [c_lo I - h(P) theta(P), c_hi I - h(P) theta(P)] where
I = P h(P) + int_P^inf h(t) dt. The estimate uses theta(t) ~ t.
"""
import math
from functools import lru_cache
from typing import Callable, Dict, Tuple

import numpy as np
from mpmath import mp, mpf

from .arith_core import primes_up_to
from .display_utils import formatted_print
from .errors import DomainError, ResourceError
from .lfunc import hurwitz_zeta
from .models import CertifiedConstant

DEFAULT_CUTOFF = 10**7
MAX_CUTOFF = 1 << 28
MAX_DIGITS = 13

DUSART_START = 3594641
ROSSER_SCHOENFELD_START = 41
RS_UPPER = 1.01624

C3_NOTE = (
    "C3 = C0 - log 2 with the convergent prime sum sum_p log p/(p(p-1)); "
    "the printed variant with sum_p log p/(p-1) diverges and is treated as a typo."
)


def theta_bounds(P: int) -> Tuple[float, float]:
    """(c_lo, c_hi) with c_lo t <= theta(t) <= c_hi t for every t >= P."""
    if P >= DUSART_START:
        eps = 0.2 / math.log(P) ** 2
        return 1.0 - eps, 1.0 + eps
    if P >= ROSSER_SCHOENFELD_START:
        return 1.0 - 1.0 / math.log(P), RS_UPPER
    raise DomainError(f"Prime cutoff must be at least {ROSSER_SCHOENFELD_START}, got {P}.")


# weight h(t) for each prime sum, as (numpy form, mpmath form)
_WEIGHTS: Dict[str, Tuple[Callable, Callable]] = {
    "c0": (
        lambda t: 1.0 / (t * (t - 1.0)),
        lambda t: 1 / (t * (t - 1)),
    ),
    "c2": (
        lambda t: 1.0 / (t * t - t + 1.0),
        lambda t: 1 / (t * t - t + 1),
    ),
    # log(1 + 1/(p(p-1))) written as log p * h(p)
    "c1_product": (
        lambda t: np.log1p(1.0 / (t * (t - 1.0))) / np.log(t),
        lambda t: mp.log1p(1 / (t * (t - 1))) / mp.log(t),
    ),
}


@lru_cache(maxsize=32)
def prime_sum(kind: str, P: int) -> Tuple[float, float]:
    """(estimate, certified error) of sum over all primes of log p * h_kind(p)."""
    if kind not in _WEIGHTS:
        raise DomainError(f"Unknown prime sum '{kind}'.")
    h_np, h_mp = _WEIGHTS[kind]
    c_lo, c_hi = theta_bounds(P)
    primes = primes_up_to(P).astype(np.float64)
    logs = np.log(primes)
    head = math.fsum((logs * h_np(primes)).tolist())
    theta_P = math.fsum(logs.tolist())
    with mp.workdps(30):
        hP = h_mp(mpf(P))
        integral = P * hP + mp.quad(h_mp, [P, mp.inf])
        base = float(hP * theta_P)
        I = float(integral)
    tail_lo = c_lo * I - base
    tail_hi = c_hi * I - base
    estimate = I - base
    error = max(tail_hi - estimate, estimate - tail_lo)
    # float accumulation over the head
    error += 4 * np.finfo(np.float64).eps * abs(head)
    return math.fsum([head, estimate]), error


def _certify(kind: str, digits: int, cutoff: int) -> Tuple[float, float, int]:
    if not 1 <= digits <= MAX_DIGITS:
        raise DomainError(f"digits must lie in [1, {MAX_DIGITS}] for float certification, got {digits}.")
    target = 10.0 ** (-digits)
    P = max(int(cutoff), ROSSER_SCHOENFELD_START)
    while True:
        value, error = prime_sum(kind, P)
        if error < target:
            return value, error, P
        if 2 * P > MAX_CUTOFF:
            raise ResourceError(
                f"Prime sum '{kind}' needs a cutoff beyond {MAX_CUTOFF} for {digits} digits (error {error:.2e})."
            )
        formatted_print(f"Prime sum '{kind}': error {error:.2e} at P={P}, doubling", level="DEBUG")
        P *= 2


@lru_cache(maxsize=16)
def c1_zeta_ratio(dps: int = 30) -> float:
    """zeta(2) zeta(3) / zeta(6) from the Euler-Maclaurin evaluator."""
    with mp.workdps(dps):
        z2 = hurwitz_zeta(2, 1, dps).real
        z3 = hurwitz_zeta(3, 1, dps).real
        z6 = hurwitz_zeta(6, 1, dps).real
        return float(z2 * z3 / z6)


@lru_cache(maxsize=16)
def c1(digits: int = 8, cutoff: int = DEFAULT_CUTOFF) -> CertifiedConstant:
    value = c1_zeta_ratio()
    log_product, error, P = _certify("c1_product", digits, cutoff)
    product = math.exp(log_product)
    product_error = product * math.expm1(error)
    notes = [f"Euler product route: {product!r} +/- {product_error:.1e} (P={P})"]
    if abs(product - value) > product_error + 1e-15:
        formatted_print(
            f"C1 routes disagree: zeta ratio {value!r}, Euler product {product!r} (+/- {product_error:.1e})",
            level="WARNING",
        )
    # zeta route carries 30 digits; the certified bound is the Euler product one
    return CertifiedConstant("C1", value, product_error, digits, P, notes)


@lru_cache(maxsize=16)
def c0(digits: int = 8, cutoff: int = DEFAULT_CUTOFF) -> CertifiedConstant:
    """C0 = (log 2 pi + gamma + sum_p log p/(p(p-1)) + 1) / 2."""
    s0, error, P = _certify("c0", digits, cutoff)
    with mp.workdps(30):
        rest = float(mp.log(2 * mp.pi) + mp.euler + 1)
    value = (rest + s0) / 2
    return CertifiedConstant("C0", value, error / 2, digits, P, [f"sum_p log p/(p(p-1)) = {s0!r}"])


@lru_cache(maxsize=16)
def c2(digits: int = 8, cutoff: int = DEFAULT_CUTOFF) -> CertifiedConstant:
    """C2 = C1 (gamma - 1 - sum_p log p/(p^2 - p + 1))."""
    finer = min(digits + 1, MAX_DIGITS)
    s2, error, P = _certify("c2", finer, cutoff)
    one = c1(finer, cutoff)
    with mp.workdps(30):
        gamma = float(mp.euler)
    inner = gamma - 1 - s2
    value = one.value * inner
    bound = abs(one.value) * error + abs(inner) * one.error_bound
    return CertifiedConstant("C2", value, bound, digits, P, [f"sum_p log p/(p^2-p+1) = {s2!r}"])


@lru_cache(maxsize=16)
def c3(digits: int = 8, cutoff: int = DEFAULT_CUTOFF) -> CertifiedConstant:
    zero = c0(digits, cutoff)
    value = zero.value - math.log(2)
    return CertifiedConstant("C3", value, zero.error_bound, digits, zero.cutoff, [C3_NOTE])


def all_constants(digits: int = 8, cutoff: int = DEFAULT_CUTOFF) -> Dict[str, CertifiedConstant]:
    return {c.name: c for c in (c0(digits, cutoff), c1(digits, cutoff), c2(digits, cutoff), c3(digits, cutoff))}
