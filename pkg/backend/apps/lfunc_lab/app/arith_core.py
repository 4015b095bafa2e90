# lfunc_lab/app/arith_core.py
"""Exact prime machinery: segmented von Mangoldt sieve, totients, and psi sums.

Everything here is computed from definitions. Sums of log p are accumulated with
math.fsum so that x up to 1e8 (millions of terms) stays correctly rounded.
"""
import math
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import DomainError, ResourceError
from .models import PsiValue

SEGMENT_SIZE = 1 << 22
DEFAULT_SIEVE_CAP = 10**9
# int64 + float64 per stored prime power
MEMORY_BUDGET_BYTES = 2 << 30


def simple_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p: limit + 1: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def factorize(n: int) -> List[Tuple[int, int]]:
    """Trial-division factorization, [(p, e), ...] with p ascending."""
    if n < 1:
        raise DomainError(f"Cannot factor {n}.")
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def euler_phi(q: int) -> int:
    if q < 1:
        raise DomainError(f"euler_phi needs q >= 1, got {q}.")
    result = q
    for p, _ in factorize(q):
        result -= result // p
    return result


def totients_up_to(limit: int) -> np.ndarray:
    """phi(n) for 0 <= n <= limit (phi(0) reported as 0)."""
    phi = np.arange(limit + 1, dtype=np.int64)
    for p in simple_sieve(limit):
        phi[p::p] -= phi[p::p] // p
    return phi


def smallest_prime_factors_up_to(limit: int) -> np.ndarray:
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in simple_sieve(limit):
        block = spf[p::p]
        block[block == 0] = p
    return spf


def distinct_prime_factors(n: int, spf: np.ndarray) -> List[int]:
    out = []
    while n > 1:
        p = int(spf[n])
        out.append(p)
        while n % p == 0:
            n //= p
    return out


class SieveTable:
    """Prime powers p^k in [range_start, range_end] with Lambda(p^k) = log p.

    `n` is sorted ascending; `lam[i]` is log of the prime under n[i]. The
    table is immutable once built.
    """

    def __init__(self, range_start: int, range_end: int, n: np.ndarray, lam: np.ndarray):
        self.range_start = range_start
        self.range_end = range_end
        self.n = n
        self.lam = lam
        self.n.setflags(write=False)
        self.lam.setflags(write=False)

    @property
    def entries(self) -> List[Tuple[int, float]]:
        return list(zip(self.n.tolist(), self.lam.tolist()))

    def __len__(self) -> int:
        return int(self.n.size)

    def covers(self, x: float) -> bool:
        return self.range_start <= 2 and math.floor(x) <= self.range_end

    def cut(self, x: float) -> int:
        """Number of stored entries with n <= x."""
        return int(np.searchsorted(self.n, math.floor(x), side="right"))

    def require(self, x: float) -> None:
        if not self.covers(x):
            raise ResourceError(
                f"Sieve table covers [{self.range_start}, {self.range_end}] but x = {x:g} was requested."
            )

    def __repr__(self) -> str:
        return f"SieveTable([{self.range_start}, {self.range_end}], entries={len(self)})"


def _estimated_bytes(range_end: int) -> float:
    if range_end < 3:
        return 0.0
    # pi(x) < 1.26 x / log x; prime powers add O(sqrt x)
    count = 1.26 * range_end / math.log(range_end) + 2 * math.isqrt(range_end)
    return 16.0 * count


def build_sieve(range_start: int, range_end: int, cap: int = DEFAULT_SIEVE_CAP,
                segment_size: int = SEGMENT_SIZE) -> SieveTable:
    if range_start < 2 or range_end < range_start:
        raise DomainError(f"build_sieve needs 2 <= range_start <= range_end, got [{range_start}, {range_end}].")
    if range_end > cap:
        raise ResourceError(f"Sieve range end {range_end:g} exceeds the configured cap {cap:g}.")
    if _estimated_bytes(range_end) > MEMORY_BUDGET_BYTES:
        raise ResourceError(f"Sieve up to {range_end:g} exceeds the memory budget of {MEMORY_BUDGET_BYTES >> 20} MiB.")

    base = simple_sieve(math.isqrt(range_end))
    chunks_n = []
    chunks_lam = []

    lo = range_start
    while lo <= range_end:
        hi = min(lo + segment_size, range_end + 1)  # exclusive
        mask = np.ones(hi - lo, dtype=bool)
        for p in base:
            p = int(p)
            p2 = p * p
            if p2 >= hi:
                break
            start = max(p2, ((lo + p - 1) // p) * p)
            mask[start - lo::p] = False
        primes = lo + np.flatnonzero(mask).astype(np.int64)
        chunks_n.append(primes)
        chunks_lam.append(np.log(primes.astype(np.float64)))
        lo = hi

    # higher powers p^k, k >= 2, all come from primes <= sqrt(range_end)
    power_n = []
    power_lam = []
    for p in base.tolist():
        logp = math.log(p)
        pk = p * p
        while pk <= range_end:
            if pk >= range_start:
                power_n.append(pk)
                power_lam.append(logp)
            pk *= p
    chunks_n.append(np.array(power_n, dtype=np.int64))
    chunks_lam.append(np.array(power_lam, dtype=np.float64))

    n = np.concatenate(chunks_n)
    lam = np.concatenate(chunks_lam)
    order = np.argsort(n, kind="stable")
    return SieveTable(range_start, range_end, n[order], lam[order])


_shared_table: Optional[SieveTable] = None


def sieve_table(upto: float, cap: int = DEFAULT_SIEVE_CAP) -> SieveTable:
    """Process-wide table starting at 2, grown by doubling when a larger x is needed."""
    global _shared_table
    need = max(int(math.floor(upto)), 10)
    if need > cap:
        raise ResourceError(f"Sieve up to {need:g} exceeds the configured cap {cap:g}.")
    if _shared_table is None or _shared_table.range_end < need:
        current = _shared_table.range_end if _shared_table is not None else 0
        target = min(max(need, 2 * current, 1 << 16), cap)
        _shared_table = build_sieve(2, target, cap=cap)
    return _shared_table


def _table_for(x: float, table: Optional[SieveTable]) -> SieveTable:
    if table is None:
        return sieve_table(x)
    table.require(x)
    return table


def primes_up_to(limit: int) -> np.ndarray:
    if limit <= 1 << 24:
        return simple_sieve(int(limit))
    t = sieve_table(limit)
    k = t.cut(limit)
    n = t.n[:k]
    lam = t.lam[:k]
    # p^k with k >= 2 has log n - log p >= log 2
    return n[np.log(n.astype(np.float64)) - lam < 0.5]


def psi_total(x: float, table: Optional[SieveTable] = None) -> float:
    t = _table_for(x, table)
    return math.fsum(t.lam[:t.cut(x)].tolist())


def theta(x: float) -> float:
    """Chebyshev theta(x) = sum of log p over primes p <= x."""
    if x < 2:
        return 0.0
    primes = primes_up_to(int(math.floor(x)))
    return math.fsum(np.log(primes.astype(np.float64)).tolist())


def psi_progression(x: float, q: int, a: int, table: Optional[SieveTable] = None) -> PsiValue:
    if q < 1:
        raise DomainError(f"Modulus must be positive, got {q}.")
    if math.gcd(a, q) != 1:
        raise DomainError(f"psi_progression needs gcd(a, q) = 1, got a={a}, q={q}.")
    if x < 2:
        return PsiValue(x=x, modulus=q, residue=a, value=0.0)
    t = _table_for(x, table)
    k = t.cut(x)
    n = t.n[:k]
    sel = (n % q) == (a % q)
    return PsiValue(x=x, modulus=q, residue=a, value=math.fsum(t.lam[:k][sel].tolist()))


def psi_principal(x: float, q: int, table: Optional[SieveTable] = None) -> PsiValue:
    if q < 1:
        raise DomainError(f"Modulus must be positive, got {q}.")
    if x < 2:
        return PsiValue(x=x, modulus=q, residue=None, value=0.0)
    t = _table_for(x, table)
    k = t.cut(x)
    if q == 1:
        return PsiValue(x=x, modulus=q, residue=None, value=math.fsum(t.lam[:k].tolist()))
    sel = np.gcd(t.n[:k], q) == 1
    return PsiValue(x=x, modulus=q, residue=None, value=math.fsum(t.lam[:k][sel].tolist()))


def principal_psi_from_total(x: float, q: int, psi_x: float, prime_factors: List[int]) -> float:
    """psi(x; chi_0 mod q) from psi(x) by removing the prime powers of each p | q."""
    removed = []
    for p in prime_factors:
        if p > x:
            continue
        k = 0
        pk = p
        while pk <= x:
            k += 1
            pk *= p
        removed.append(k * math.log(p))
    return math.fsum([psi_x] + [-r for r in removed])


def class_psi_values(x: float, q: int, table: Optional[SieveTable] = None) -> Dict[int, float]:
    """psi(x; q, b) for every residue b mod q with gcd(b, q) = 1, each correctly rounded."""
    if q < 1:
        raise DomainError(f"Modulus must be positive, got {q}.")
    t = _table_for(max(x, 2), table)
    k = t.cut(x)
    residues = t.n[:k] % q
    lam = t.lam[:k]
    order = np.argsort(residues, kind="stable")
    residues = residues[order]
    lam = lam[order]
    bounds = np.searchsorted(residues, np.arange(q + 1), side="left")
    out = {}
    for b in range(q):
        if math.gcd(b, q) != 1:
            continue
        out[b] = math.fsum(lam[bounds[b]:bounds[b + 1]].tolist())
    return out


def psi_character(x: float, chi, table: Optional[SieveTable] = None) -> complex:
    """sum_{n <= x} chi(n) Lambda(n), assembled from exact residue-class sums."""
    if x < 2:
        return complex(0.0)
    classes = class_psi_values(x, chi.modulus, table)
    re_terms = []
    im_terms = []
    for b, value in classes.items():
        c = chi.evaluate(b)
        re_terms.append(c.real * value)
        im_terms.append(c.imag * value)
    return complex(math.fsum(re_terms), math.fsum(im_terms))


class ProgressionIndex:
    """Fast repeated psi(x; q, a) (or psi(x; chi_0) when a is None) for many x.

    Entries of the class are cut into blocks; block sums are prefix-accumulated
    with fsum, so each query costs one fsum over at most one block.
    """

    BLOCK = 4096

    def __init__(self, table: SieveTable, q: int, a: Optional[int]):
        if a is not None and math.gcd(a, q) != 1:
            raise DomainError(f"gcd(a, q) must be 1, got a={a}, q={q}.")
        if q == 1:
            sel = np.ones(table.n.size, dtype=bool)
        elif a is None:
            sel = np.gcd(table.n, q) == 1
        else:
            sel = (table.n % q) == (a % q)
        self.table = table
        self.q = q
        self.a = a
        self.n = table.n[sel]
        self.lam = table.lam[sel].tolist()
        block_sums = [math.fsum(self.lam[i:i + self.BLOCK]) for i in range(0, len(self.lam), self.BLOCK)]
        self.prefix = [0.0]
        for k in range(1, len(block_sums) + 1):
            self.prefix.append(math.fsum(block_sums[:k]))

    def __call__(self, x: float) -> float:
        self.table.require(x)
        j = int(np.searchsorted(self.n, math.floor(x), side="right"))
        full = j // self.BLOCK
        return math.fsum([self.prefix[full]] + self.lam[full * self.BLOCK:j])

    def many(self, xs) -> np.ndarray:
        return np.array([self(float(x)) for x in xs], dtype=np.float64)


def brute_force_psi(x: float, q: int = 1, a: Optional[int] = None) -> float:
    """Trial-division oracle for tests and small checks."""
    terms = []
    for n in range(2, int(math.floor(x)) + 1):
        f = factorize(n)
        if len(f) != 1:
            continue
        if a is None:
            if math.gcd(n, q) != 1:
                continue
        elif n % q != a % q:
            continue
        terms.append(math.log(f[0][0]))
    return math.fsum(terms)


@lru_cache(maxsize=8)
def prime_power_count_oracle(limit: int) -> int:
    return sum(1 for n in range(2, limit + 1) if len(factorize(n)) == 1)
