# lfunc_lab/app/characters.py
"""Dirichlet characters mod q on a fixed generator basis.

Basis convention: the 2-part comes first (generators -1 and 5 when 8 | q,
only -1 when 4 || q, nothing when 2 || q), then each odd prime power in
ascending order with its smallest primitive root. Each generator is lifted
by CRT so that it is 1 on every other component. A character is the tuple
of exponents k_i with chi(g_i) = exp(2 pi i k_i / d_i).

Values are kept exact as angle numerators over the group exponent E, i.e.
chi(n) = exp(2 pi i * angle(n) / E).
"""
import cmath
import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
from mpmath import mp, mpc, mpf

from .arith_core import euler_phi, factorize
from .errors import DomainError

MAX_MODULUS = 10**6

_QUARTER_TURNS = (complex(1, 0), complex(0, 1), complex(-1, 0), complex(0, -1))


@dataclass(frozen=True)
class _Component:
    prime: int
    modulus: int  # prime power
    generator: int  # generator mod `modulus`
    order: int
    lifted: int  # generator mod q, 1 on the other components
    kind: str  # "cyclic" | "sign" | "five"


def _is_primitive_root(g: int, p: int, e: int) -> bool:
    if math.gcd(g, p) != 1:
        return False
    for r, _ in factorize(p - 1):
        if pow(g, (p - 1) // r, p) == 1:
            return False
    if e >= 2 and pow(g, p - 1, p * p) == 1:
        return False
    return True


def smallest_primitive_root(p: int, e: int = 1) -> int:
    """Smallest primitive root mod p^e for an odd prime p."""
    g = 2
    while not _is_primitive_root(g, p, e):
        g += 1
    return g


@lru_cache(maxsize=256)
def _dlog_table(modulus: int, generator: int, order: int) -> np.ndarray:
    table = np.full(modulus, -1, dtype=np.int64)
    value = 1
    for j in range(order):
        table[value] = j
        value = value * generator % modulus
    table.setflags(write=False)
    return table


class _GroupBasis:
    def __init__(self, q: int):
        self.modulus = q
        comps = []
        factors = factorize(q) if q > 1 else []

        def lift(g: int, m: int) -> int:
            rest = q // m
            if rest == 1:
                return g % q
            # x = g mod m, x = 1 mod rest
            return (g * rest * pow(rest, -1, m) + m * pow(m, -1, rest)) % q

        for p, e in factors:
            m = p ** e
            if p == 2:
                if e >= 2:
                    comps.append(_Component(2, m, m - 1, 2, lift(m - 1, m), "sign"))
                if e >= 3:
                    comps.append(_Component(2, m, 5, m // 4, lift(5, m), "five"))
            else:
                g = smallest_primitive_root(p, e)
                comps.append(_Component(p, m, g, m - m // p, lift(g, m), "cyclic"))
        self.components: Tuple[_Component, ...] = tuple(comps)
        self.orders = tuple(c.order for c in comps)
        self.exponent = math.lcm(*self.orders) if self.orders else 1

    def dlogs(self, n: int) -> Optional[Tuple[int, ...]]:
        q = self.modulus
        if math.gcd(n, q) != 1:
            return None
        out = []
        for c in self.components:
            r = n % c.modulus
            if c.kind == "sign":
                out.append(0 if r % 4 == 1 else 1)
            elif c.kind == "five":
                if r % 4 == 3:
                    r = (-r) % c.modulus
                out.append(int(_dlog_table(c.modulus, 5, c.order)[r]))
            else:
                out.append(int(_dlog_table(c.modulus, c.generator, c.order)[r]))
        return tuple(out)


@lru_cache(maxsize=64)
def _basis(q: int) -> _GroupBasis:
    return _GroupBasis(q)


def _conductor(basis: _GroupBasis, exponents: Tuple[int, ...]) -> int:
    f = 1
    sign_k = 0
    for c, k in zip(basis.components, exponents):
        if c.kind == "sign":
            sign_k = k
            continue
        order = c.order // math.gcd(k, c.order)
        if c.kind == "five":
            if order > 1:
                f *= 4 * order  # 5 of order 2^j needs modulus 2^(j+2)
                sign_k = None
            continue
        if order > 1:
            v = 0
            while order % c.prime == 0:
                order //= c.prime
                v += 1
            f *= c.prime ** (v + 1)
    if sign_k:
        f *= 4
    return f


@dataclass(frozen=True)
class DirichletCharacter:
    modulus: int
    exponents: Tuple[int, ...]
    parity: int
    conductor: int
    is_principal: bool
    is_real: bool
    basis: _GroupBasis = field(compare=False, repr=False, hash=False)

    @property
    def label(self) -> str:
        return f"{self.modulus}:" + ",".join(str(k) for k in self.exponents)

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    @property
    def order(self) -> int:
        o = 1
        for k, d in zip(self.exponents, self.basis.orders):
            o = math.lcm(o, d // math.gcd(k, d))
        return o

    def angle(self, n: int) -> Optional[int]:
        """Numerator a with chi(n) = exp(2 pi i a / E), or None when gcd(n, q) > 1."""
        logs = self.basis.dlogs(n)
        if logs is None:
            return None
        E = self.basis.exponent
        return sum(k * j * (E // d) for k, j, d in zip(self.exponents, logs, self.basis.orders)) % E

    def evaluate(self, n: int) -> complex:
        a = self.angle(n)
        if a is None:
            return complex(0.0)
        E = self.basis.exponent
        if (4 * a) % E == 0:
            return _QUARTER_TURNS[4 * a // E]
        return cmath.exp(2j * math.pi * a / E)

    def value_mp(self, n: int):
        a = self.angle(n)
        if a is None:
            return mpc(0)
        E = self.basis.exponent
        if (4 * a) % E == 0:
            return mpc(_QUARTER_TURNS[4 * a // E])
        return mp.expjpi(mpf(2 * a) / E)

    def value_table(self) -> List[Optional[int]]:
        return [self.angle(n) for n in range(self.modulus)]

    def conjugate(self) -> 'DirichletCharacter':
        return _make(self.basis, tuple((-k) % d for k, d in zip(self.exponents, self.basis.orders)))

    def product(self, other: 'DirichletCharacter') -> 'DirichletCharacter':
        if other.modulus != self.modulus:
            raise DomainError("Characters of different moduli cannot be multiplied pointwise here.")
        return _make(self.basis, tuple((a + b) % d for a, b, d in zip(self.exponents, other.exponents, self.basis.orders)))

    def __call__(self, n: int) -> complex:
        return self.evaluate(n)


def _make(basis: _GroupBasis, exponents: Tuple[int, ...]) -> DirichletCharacter:
    q = basis.modulus
    E = basis.exponent
    principal = all(k == 0 for k in exponents)
    real = all((2 * k) % d == 0 for k, d in zip(exponents, basis.orders))
    parity = 0
    if q > 2:
        logs = basis.dlogs(q - 1)
        a = sum(k * j * (E // d) for k, j, d in zip(exponents, logs, basis.orders)) % E
        parity = 0 if a == 0 else 1
    return DirichletCharacter(
        modulus=q,
        exponents=exponents,
        parity=parity,
        conductor=_conductor(basis, exponents),
        is_principal=principal,
        is_real=real,
        basis=basis,
    )


@dataclass(frozen=True)
class CharacterGroup:
    modulus: int
    generators: Tuple[Tuple[int, int], ...]  # (lifted generator mod q, order)
    characters: Tuple[DirichletCharacter, ...]

    def __len__(self) -> int:
        return len(self.characters)

    def __iter__(self):
        return iter(self.characters)

    @property
    def principal(self) -> DirichletCharacter:
        return self.characters[0]

    def by_exponents(self, exponents: Tuple[int, ...]) -> DirichletCharacter:
        basis = _basis(self.modulus)
        if len(exponents) != len(basis.orders):
            raise DomainError(f"Modulus {self.modulus} has {len(basis.orders)} generators, got {len(exponents)} exponents.")
        return _make(basis, tuple(int(k) % d for k, d in zip(exponents, basis.orders)))

    def nonprincipal(self) -> List[DirichletCharacter]:
        return [c for c in self.characters if not c.is_principal]


@lru_cache(maxsize=64)
def character_group(q: int) -> CharacterGroup:
    if q < 1:
        raise DomainError(f"Modulus must be at least 1, got {q}.")
    if q > MAX_MODULUS:
        raise DomainError(f"Character tables are limited to q <= {MAX_MODULUS}, got {q}.")
    basis = _basis(q)
    chars = tuple(_make(basis, ks) for ks in itertools.product(*(range(d) for d in basis.orders)))
    gens = tuple((c.lifted, c.order) for c in basis.components)
    return CharacterGroup(modulus=q, generators=gens, characters=chars)


def parse_label(label: str) -> Tuple[int, Tuple[int, ...]]:
    try:
        q_part, _, ks = label.partition(":")
        q = int(q_part)
        exponents = tuple(int(k) for k in ks.split(",") if k.strip() != "")
    except ValueError:
        raise DomainError(f"Malformed character label '{label}'. Expected 'q:k1,k2,...'.")
    return q, exponents


def character_from_label(label: str) -> DirichletCharacter:
    q, exponents = parse_label(label)
    return character_group(q).by_exponents(exponents)


def evaluate(chi: DirichletCharacter, n: int) -> complex:
    return chi.evaluate(n)


def conductor_and_primitive_part(chi: DirichletCharacter) -> Tuple[int, DirichletCharacter]:
    f = chi.conductor
    if f == chi.modulus:
        return f, chi
    star_group = character_group(f)
    star_basis = _basis(f)
    E = chi.basis.exponent
    ks = []
    for comp in star_basis.components:
        n = comp.lifted
        while math.gcd(n, chi.modulus) != 1:
            n += f
        a = chi.angle(n)
        # chi*(g) = exp(2 pi i k / d) must match exp(2 pi i a / E)
        num = a * comp.order
        if num % E != 0:
            raise DomainError(f"Character {chi.label} is not induced from modulus {f}.")
        ks.append((num // E) % comp.order)
    return f, star_group.by_exponents(tuple(ks))


def gauss_sum(chi: DirichletCharacter):
    """tau(chi) = sum_{a=1}^{q} chi(a) e(a/q), at the current mpmath precision."""
    q = chi.modulus
    E = chi.basis.exponent
    terms = []
    for a in range(1, q + 1):
        ang = chi.angle(a)
        if ang is None:
            continue
        # chi(a) e(a/q) = exp(2 pi i (ang/E + a/q))
        terms.append(mp.expjpi(mpf(2 * ((ang * q + a * E) % (E * q))) / (E * q)))
    return mp.fsum(terms) if terms else mpc(0)


def root_number(chi: DirichletCharacter):
    if not chi.is_primitive:
        raise DomainError(f"root_number needs a primitive character; {chi.label} has conductor {chi.conductor}.")
    tau = gauss_sum(chi)
    return tau / (mpc(0, 1) ** chi.parity * mp.sqrt(chi.modulus))


def real_primitive_characters(q: int) -> List[DirichletCharacter]:
    return [c for c in character_group(q) if c.is_real and c.is_primitive and not c.is_principal]


def primitive_nonprincipal(q: int) -> List[DirichletCharacter]:
    return [c for c in character_group(q) if c.is_primitive and not c.is_principal]


def group_size_matches(q: int) -> bool:
    return len(character_group(q)) == euler_phi(q)
