# lfunc_lab/app/aggregates.py
"""q-averaged quantities over a dyadic range of moduli Q < q <= 2Q.

S(Q;x) = -sum_{Q<q<=2Q} (psi(x;q,1) - psi(x;chi_0)/phi(q)) is evaluated twice:
by counting divisors of n - 1 per modulus, and through the rearrangement
S = I - II + III where

    I   = sum_{q > 2Q} psi(x;q,1)
    II  = sum_{1 <= r < (x-1)/Q} (psi(x;r,1) - psi(rQ+1;r,1))
    III = sum_{Q<q<=2Q} psi(x;chi_0 mod q)/phi(q).

I is switched the same way as II with threshold 2Q, so both sides share no
intermediate sums.
"""
import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .arith_core import (
    MEMORY_BUDGET_BYTES, SieveTable, principal_psi_from_total, psi_total, sieve_table, _table_for,
    distinct_prime_factors, smallest_prime_factors_up_to, totients_up_to,
)
from .characters import character_group
from .display_utils import formatted_print
from .errors import DomainError, MissingReportsError, ResourceError
from .models import CentralValueReport, SweepResult
from .zero_library import ZeroLibrary


def _moduli(Q: float) -> range:
    """Integers q with Q < q <= 2Q."""
    return range(int(math.floor(Q)) + 1, int(math.floor(2 * Q)) + 1)


def _check_range(Q: float, x: float) -> None:
    if Q <= 0:
        raise DomainError(f"Q must be positive, got {Q}.")
    if Q >= x:
        raise DomainError(f"Need Q < x, got Q={Q:g}, x={x:g}.")
    if x < 2:
        raise DomainError(f"Need x >= 2, got {x:g}.")


class DenseLambda:
    """Lambda(n) for 0 <= n <= x as a dense float array, for strided class sums."""

    def __init__(self, x: float, table: Optional[SieveTable] = None):
        self.limit = int(math.floor(x))
        if 8.0 * (self.limit + 1) > MEMORY_BUDGET_BYTES:
            raise ResourceError(f"Dense Lambda array up to {x:g} exceeds the memory budget.")
        table = table if table is not None else sieve_table(x)
        table.require(x)
        k = table.cut(x)
        self.table = table
        self.values = np.zeros(self.limit + 1, dtype=np.float64)
        self.values[table.n[:k]] = table.lam[:k]

    def class_sum(self, r: int, lo: float, hi: float) -> float:
        """sum of Lambda(n) over lo < n <= hi with n = 1 mod r."""
        hi = min(int(math.floor(hi)), self.limit)
        lo = int(math.floor(lo))
        start = lo + 1
        # smallest n >= start with n = 1 mod r
        start += (1 - start) % r
        if start > hi:
            return 0.0
        block = self.values[start:hi + 1:r]
        return math.fsum(block[block > 0].tolist())


def _principal_third(Q: float, x: float, psi_x: float) -> Tuple[float, float]:
    """(sum psi(x;chi_0 mod q)/phi(q), sum 1/phi(q)) over Q < q <= 2Q."""
    qs = _moduli(Q)
    if len(qs) == 0:
        return 0.0, 0.0
    top = qs[-1]
    spf = smallest_prime_factors_up_to(top)
    phi = totients_up_to(top)
    terms = []
    inverse = []
    for q in qs:
        psi0 = principal_psi_from_total(x, q, psi_x, distinct_prime_factors(q, spf))
        terms.append(psi0 / int(phi[q]))
        inverse.append(1.0 / int(phi[q]))
    return math.fsum(terms), math.fsum(inverse)


def s_direct(Q: float, x: float, table: Optional[SieveTable] = None) -> float:
    _check_range(Q, x)
    qs = _moduli(Q)
    if len(qs) == 0:
        return 0.0
    t = table if table is not None else sieve_table(x)
    k = t.cut(x)
    n = t.n[:k]
    lam = t.lam[:k]
    limit = int(math.floor(x))
    # counts[m] = #{q in (Q, 2Q] : q | m}
    counts = np.zeros(limit + 1, dtype=np.uint16)
    for q in qs:
        counts[q::q] += 1
    weights = counts[n - 1].astype(np.float64)
    hit = weights > 0
    first = math.fsum((lam[hit] * weights[hit]).tolist())
    principal, _ = _principal_third(Q, x, psi_total(x, t))
    return math.fsum([-first, principal])


def _switched(dense: DenseLambda, threshold: float, x: float) -> float:
    """sum_{q > threshold} psi(x;q,1) as sum_{1 <= r < (x-1)/threshold} (psi(x;r,1) - psi(r*threshold+1;r,1))."""
    r_max = (x - 1) / threshold
    terms = []
    r = 1
    while r < r_max:
        terms.append(dense.class_sum(r, r * threshold + 1, x))
        r += 1
    return math.fsum(terms)


def term_unswitched(lower: float, x: float, dense: Optional[DenseLambda] = None) -> float:
    """sum_{lower < q <= x} psi(x;q,1) summed modulus by modulus."""
    dense = dense or DenseLambda(x)
    terms = [dense.class_sum(q, 1, x) for q in range(int(math.floor(lower)) + 1, int(math.floor(x)) + 1)]
    return math.fsum(terms)


def term_ii(Q: float, x: float, dense: Optional[DenseLambda] = None) -> float:
    dense = dense or DenseLambda(x)
    return _switched(dense, Q, x)


def main_term(Q: float, x: float, c3_value: Optional[float] = None) -> float:
    """Q/2 log(x/Q) + C3 Q."""
    if Q <= 0 or x <= 0:
        raise DomainError("main_term needs positive Q and x.")
    if c3_value is None:
        from .constants import c3
        c3_value = c3().value
    return Q / 2 * math.log(x / Q) + c3_value * Q


def s_identity(Q: float, x: float, table: Optional[SieveTable] = None,
               c3_value: Optional[float] = None) -> SweepResult:
    _check_range(Q, x)
    t = table if table is not None else sieve_table(x)
    dense = DenseLambda(x, t)
    term_I = _switched(dense, 2 * Q, x)
    term_II = _switched(dense, Q, x)
    psi_x = psi_total(x, t)
    term_III, inverse_sum = _principal_third(Q, x, psi_x)
    direct = s_direct(Q, x, t)
    mt = main_term(Q, x, c3_value)
    result = SweepResult(
        Q=Q, x=x, S_direct=direct,
        term_I=term_I, term_II=term_II, term_III=term_III,
        main_term=mt, residual=direct - mt,
        term_III_approx=psi_x * inverse_sum,
    )
    scale = abs(term_I) + abs(term_II) + abs(term_III)
    if abs(result.identity_gap) > 1e-9 * max(scale, 1.0):
        formatted_print(
            f"S_direct and I - II + III differ by {result.identity_gap:.3e} at Q={Q:g}, x={x:g}", level="WARNING"
        )
    return result


def trend_grid(x: float, eta: float = 0.8, points: int = 8) -> Dict[str, List[float]]:
    """Q values in the window x^eta/3 .. x^eta/2 and on a log-spaced grid x^0.5 .. x^0.9."""
    if not 0 < eta < 1:
        raise DomainError(f"eta must lie in (0, 1), got {eta}.")
    centre = x ** eta
    window = np.linspace(centre / 3, centre / 2, points)
    spread = np.geomspace(x ** 0.5, x ** 0.9, points)
    return {
        "window": [float(q) for q in window if 2 <= q < x],
        "log_grid": [float(q) for q in spread if 2 <= q < x],
    }


def sweep(x: float, qmin: float, qmax: float, points: int = 8,
          c3_value: Optional[float] = None, table: Optional[SieveTable] = None) -> List[SweepResult]:
    """s_identity on a log-spaced grid of Q in [qmin, qmax]."""
    if not 2 <= qmin <= qmax < x:
        raise DomainError(f"Need 2 <= qmin <= qmax < x, got qmin={qmin:g}, qmax={qmax:g}, x={x:g}.")
    table = _table_for(x, table)
    if c3_value is None:
        from .constants import c3
        c3_value = c3().value
    grid = np.geomspace(qmin, qmax, points) if qmax > qmin else np.array([qmin])
    return [s_identity(float(Q), x, table, c3_value) for Q in grid]


def ratio_trend(xs: Sequence[float], exponent: float = 0.8,
                c3_value: Optional[float] = None, table: Optional[SieveTable] = None) -> Tuple[List[List[float]], bool]:
    """Rows (x, Q, S_direct, main_term, ratio) at Q = x^exponent; the flag says
    whether |ratio - 1| is nonincreasing along xs."""
    if c3_value is None:
        from .constants import c3
        c3_value = c3().value
    rows = []
    for x in xs:
        Q = x ** exponent
        direct = s_direct(Q, x, _table_for(x, table))
        mt = main_term(Q, x, c3_value)
        rows.append([float(x), Q, direct, mt, direct / mt])
    gaps = [abs(r[4] - 1) for r in rows]
    monotone = all(b <= a for a, b in zip(gaps, gaps[1:]))
    if not monotone:
        formatted_print(f"|S/main - 1| is not nonincreasing over x = {list(xs)}", level="WARNING")
    return rows, monotone


def term_iii_trend(xs: Sequence[float], exponent: float = 0.8, table: Optional[SieveTable] = None) -> List[List[float]]:
    """Rows (x, Q, III, III/(x log 2), C1)."""
    from .constants import c1
    c1_value = c1().value
    rows = []
    for x in xs:
        Q = x ** exponent
        third, _ = _principal_third(Q, x, psi_total(x, _table_for(x, table)))
        rows.append([float(x), Q, third, third / (x * math.log(2)), c1_value])
    return rows


def bfi_discrepancy(Q: float, x: float, a: int = 1, library: Optional[ZeroLibrary] = None,
                    T_height: Optional[float] = None, table: Optional[SieveTable] = None) -> Tuple[float, Optional[float]]:
    """(sum |psi(x;q,a) - psi(x;chi_0)/phi(q)|, same with the non-real zero sum) over
    Q < q <= 2Q, (q, a) = 1. The zero route is computed only when a library is given."""
    _check_range(Q, x)
    qs = [q for q in _moduli(Q) if math.gcd(a, q) == 1]
    if not qs:
        return 0.0, (0.0 if library is not None else None)
    t = _table_for(x, table)
    dense = DenseLambda(x, t)
    psi_x = psi_total(x, t)
    spf = smallest_prime_factors_up_to(qs[-1])
    phi = totients_up_to(qs[-1])
    terms = []
    for q in qs:
        psi_a = _residue_sum(dense, q, a, x)
        psi0 = principal_psi_from_total(x, q, psi_x, distinct_prime_factors(q, spf))
        terms.append(abs(psi_a - psi0 / int(phi[q])))
    with_abs = math.fsum(terms)
    if library is None:
        return with_abs, None
    from .explicit_formula import ZeroSpectrum
    height = T_height if T_height is not None else 50.0
    root_x = math.sqrt(x)
    zero_terms = []
    for q in qs:
        if q < 3:
            zero_terms.append(0.0)
            continue
        spectrum = ZeroSpectrum(q, a, height, library)
        zero_terms.append(abs(root_x * complex(spectrum.tstar([x])[0])))
    return with_abs, math.fsum(zero_terms)


def _residue_sum(dense: DenseLambda, q: int, a: int, x: float) -> float:
    start = a % q
    if q == 1:
        start = 0
    hi = min(int(math.floor(x)), dense.limit)
    block = dense.values[start:hi + 1:q]
    return math.fsum(block[block > 0].tolist())


def pair_lower_bound(rho, x) -> np.ndarray:
    """x^rho/rho + x^{1-rho}/(1-rho) - x^{1/2}; nonnegative for real rho in (0, 1), x >= 1."""
    rho = np.asarray(rho, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if np.any((rho <= 0) | (rho >= 1)):
        raise DomainError("pair_lower_bound needs 0 < rho < 1.")
    if np.any(x < 1):
        raise DomainError("pair_lower_bound needs x >= 1.")
    return x ** rho / rho + x ** (1 - rho) / (1 - rho) - np.sqrt(x)


def z_count_average(Q: int, reports: Iterable[CentralValueReport]) -> float:
    """Q^{-2} sum_{q <= Q} sum_chi z(chi); principal characters contribute 0."""
    if Q < 1:
        raise DomainError(f"Q must be at least 1, got {Q}.")
    by_label: Dict[str, Optional[int]] = {}
    for rep in reports:
        by_label[rep.label] = rep.z_chi
    missing = []
    total = 0
    for q in range(3, int(Q) + 1):
        for chi in character_group(q).nonprincipal():
            z = by_label.get(chi.label)
            if z is None:
                missing.append(q)
                break
            total += z
    if missing:
        raise MissingReportsError(missing)
    return total / float(Q) ** 2
