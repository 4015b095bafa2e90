# lfunc_lab/app/explicit_formula.py
"""Zero-side of the prime counting problem in progressions.

Sign convention: for primitive nonprincipal chi,
    psi(x, chi) = -sum_rho x^rho / rho + trivial_zero_term(x, a_chi) - b(chi),
hence T(x;q,a) = T*(x;q,a) + (2/phi(q)) sum conj chi(a) z(chi) + O(x^{-1/2} log x).
"""
import math
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .arith_core import ProgressionIndex, euler_phi, psi_character, psi_principal, psi_progression, sieve_table
from .characters import DirichletCharacter, character_group, conductor_and_primitive_part
from .errors import DomainError
from .lfunc import imprimitive_psi_correction
from .models import RemainderValue, ZeroSumConfig
from .zero_library import ZeroLibrary

TRUNCATION_CONSTANT = 4.0
_CHUNK = 256


def truncation_bound(x: float, q: int, T: float, normalized: bool = False) -> float:
    """C0 x log^2(qx) / T, times x^{-1/2} for the normalized remainders."""
    if T <= 0:
        raise DomainError(f"Truncation height must be positive, got {T}.")
    bound = TRUNCATION_CONSTANT * x * math.log(q * x) ** 2 / T
    return bound / math.sqrt(x) if normalized else bound


def trivial_zero_term(x: float, parity: int) -> float:
    """-(1-a) log x + sum_{m>=1} x^{a-2m}/(2m-a), in closed form."""
    if x <= 1:
        raise DomainError("trivial_zero_term needs x > 1.")
    if parity == 0:
        return -math.log(x) - 0.5 * math.log1p(-x ** -2)
    return math.atanh(1.0 / x)


def _require_zero_character(chi: DirichletCharacter) -> None:
    if not chi.is_primitive:
        raise DomainError(f"{chi.label} is imprimitive; route it through its primitive part.")
    if chi.is_principal:
        raise DomainError("The zero sum is defined here for nonprincipal characters.")


def _fsum_complex(values: np.ndarray) -> complex:
    return complex(math.fsum(np.real(values).tolist()), math.fsum(np.imag(values).tolist()))


def zero_sum(x: float, chi: DirichletCharacter, T: float, include_real: bool = True,
             library: Optional[ZeroLibrary] = None) -> complex:
    """-sum_{|gamma| <= T} x^rho / rho over the critical-line zeros of L(s, chi)."""
    _require_zero_character(chi)
    library = library or ZeroLibrary()
    gam = library.signed_ordinates(chi, T)
    gam = gam[np.abs(gam) <= T]
    root_x = math.sqrt(x)
    log_x = math.log(x)
    if chi.is_real:
        # gamma and -gamma pair into 2 Re(x^rho / rho)
        pos = gam[gam > 0]
        terms = 2.0 * np.real(root_x * np.exp(1j * pos * log_x) / (0.5 + 1j * pos))
        total = complex(-math.fsum(terms.tolist()), 0.0)
    else:
        total = -_fsum_complex(root_x * np.exp(1j * gam * log_x) / (0.5 + 1j * gam))
    if include_real:
        z = library.central_order(chi)
        if z:
            total -= z * root_x / 0.5
    return total


def pair_contribution(x: float, gamma: float) -> float:
    """Contribution of the pair +-gamma: 2 Re(x^rho / rho)."""
    rho = complex(0.5, gamma)
    return 2.0 * (x ** rho / rho).real


class ZeroSpectrum:
    """Frequencies and weights of the non-real zero sum for one (q, a).

    T*(x) = (1/phi(q)) sum_j w_j exp(i gamma_j log x), with
    w_j = conj chi(a) / (1/2 + i gamma_j).
    """

    def __init__(self, q: int, a: int, T_height: float, library: ZeroLibrary):
        if math.gcd(a, q) != 1:
            raise DomainError(f"gcd(a, q) must be 1, got a={a}, q={q}.")
        self.q = q
        self.a = a
        self.T_height = T_height
        self.phi = euler_phi(q)
        chars = character_group(q).nonprincipal()
        stars = []
        for chi in chars:
            _, star = conductor_and_primitive_part(chi)
            stars.append(star)
        library.ensure({s.label: s for s in stars}.values(), T_height)
        # both sides of complex characters need their conjugates
        library.ensure({s.conjugate().label: s.conjugate() for s in stars if not s.is_real}.values(), T_height)

        freqs = []
        weights = []
        central = 0j
        self.characters: List[DirichletCharacter] = chars
        self.primitive_parts: List[DirichletCharacter] = stars
        for chi, star in zip(chars, stars):
            w = chi.evaluate(a).conjugate()
            gam = library.signed_ordinates(star, T_height)
            gam = gam[np.abs(gam) <= T_height]
            freqs.append(gam)
            weights.append(w / (0.5 + 1j * gam))
            central += w * library.central_order(star)
        self.frequencies = np.concatenate(freqs) if freqs else np.zeros(0)
        self.weights = np.concatenate(weights) if weights else np.zeros(0, dtype=complex)
        self.central_sum = central

    def __len__(self) -> int:
        return int(self.frequencies.size)

    def tstar(self, xs: Sequence[float]) -> np.ndarray:
        xs = np.atleast_1d(np.asarray(xs, dtype=np.float64))
        out = np.zeros(xs.size, dtype=complex)
        if self.frequencies.size == 0:
            return out
        logs = np.log(xs)
        for start in range(0, xs.size, _CHUNK):
            block = logs[start:start + _CHUNK]
            phases = np.exp(1j * np.outer(block, self.frequencies))
            out[start:start + _CHUNK] = phases @ self.weights
        return out / self.phi

    def central_term(self) -> complex:
        return 2.0 * self.central_sum / self.phi

    def lower_order(self, x: float) -> complex:
        """x^{-1/2}/phi(q) sum conj chi(a) (correction - trivial term); b(chi) not included."""
        total = 0j
        for chi, star in zip(self.characters, self.primitive_parts):
            w = chi.evaluate(self.a).conjugate()
            total += w * (imprimitive_psi_correction(chi, x) - trivial_zero_term(x, star.parity))
        return total / (self.phi * math.sqrt(x))

    def zero_route_T(self, x: float) -> complex:
        return complex(self.tstar([x])[0]) + self.central_term() + self.lower_order(x)


def remainder_T(x: float, q: int, a: int, table=None) -> RemainderValue:
    """T(x;q,a) = -x^{-1/2} (psi(x;q,a) - psi(x;chi_0)/phi(q)) from the sieve."""
    if math.gcd(a, q) != 1:
        raise DomainError(f"remainder_T needs gcd(a, q) = 1, got a={a}, q={q}.")
    if q == 1:
        return RemainderValue(x=x, q=q, a=a, T_value=0.0)
    psi_a = psi_progression(x, q, a, table).value
    psi_0 = psi_principal(x, q, table).value
    value = -(psi_a - psi_0 / euler_phi(q)) / math.sqrt(x)
    return RemainderValue(x=x, q=q, a=a, T_value=value)


def remainder_Tstar(x: float, q: int, a: int, T_height: float, library: Optional[ZeroLibrary] = None,
                    spectrum: Optional[ZeroSpectrum] = None, table=None) -> RemainderValue:
    library = library or ZeroLibrary()
    spectrum = spectrum or ZeroSpectrum(q, a, T_height, library)
    exact = remainder_T(x, q, a, table)
    tstar = complex(spectrum.tstar([x])[0])
    return RemainderValue(
        x=x, q=q, a=a,
        T_value=exact.T_value,
        Tstar_value=tstar,
        truncation_error_bound=truncation_bound(x, q, T_height, normalized=True),
        zero_route_T=spectrum.zero_route_T(x),
        T_height=T_height,
    )


def hypothesis_ratio(x: float, q: int, a: int, T_height: float, epsilon: float,
                     library: Optional[ZeroLibrary] = None, spectrum: Optional[ZeroSpectrum] = None) -> float:
    """Measured over conjectured size of the non-real zero sum; diagnostic only.

    The numerator is |(1/phi(q)) sum_chi conj(chi(a)) sum_rho x^rho / rho|. That is
    |x^{1/2} T*|, since T* already carries the 1/phi(q), so no further phi(q)
    factor is applied. Dividing by x^{1/2+eps} / q^{1/2} gives |T*| q^{1/2} x^{-eps}.
    """
    library = library or ZeroLibrary()
    spectrum = spectrum or ZeroSpectrum(q, a, T_height, library)
    tstar = complex(spectrum.tstar([x])[0])
    return abs(tstar) * math.sqrt(q) * x ** (-epsilon)


def scaling_table(xs: Iterable[float], qs: Iterable[int], T_height: float, epsilon: float,
                  library: ZeroLibrary, a: int = 1) -> List[List[float]]:
    """Rows (q, x, |T*|, ratio) for the scaling study; reported, not asserted."""
    rows = []
    for q in qs:
        if math.gcd(a, q) != 1:
            continue
        spectrum = ZeroSpectrum(q, a, T_height, library)
        for x in xs:
            tstar = complex(spectrum.tstar([x])[0])
            rows.append([q, float(x), abs(tstar), abs(tstar) * math.sqrt(q) * x ** (-epsilon)])
    return rows


def differenced_explicit_check(x1: float, x2: float, chi: DirichletCharacter, T_height: float,
                               library: Optional[ZeroLibrary] = None, table=None) -> float:
    """|(psi(x2,chi) - psi(x1,chi)) - (zero_sum(x2) - zero_sum(x1)) - (trivial(x2) - trivial(x1))|.

    Differencing removes the constant b(chi).
    """
    _require_zero_character(chi)
    if x1 == x2:
        return 0.0
    if not 2 <= x1 < x2:
        raise DomainError(f"differenced_explicit_check needs 2 <= x1 < x2, got {x1}, {x2}.")
    library = library or ZeroLibrary()
    if table is None:
        table = sieve_table(x2)
    d_psi = psi_character(x2, chi, table) - psi_character(x1, chi, table)
    d_zero = zero_sum(x2, chi, T_height, True, library) - zero_sum(x1, chi, T_height, True, library)
    d_triv = trivial_zero_term(x2, chi.parity) - trivial_zero_term(x1, chi.parity)
    return abs(d_psi - d_zero - d_triv)


def zero_sum_config(x: float, q: int, a: int, T: float, include_real: bool, library: ZeroLibrary) -> ZeroSumConfig:
    """Validated ZeroSumConfig: every zero set used reaches height T."""
    if math.gcd(a, q) != 1:
        raise DomainError(f"gcd(a, q) must be 1, got a={a}, q={q}.")
    for chi in character_group(q).nonprincipal():
        _, star = conductor_and_primitive_part(chi)
        library.zeros(star, T)
    return ZeroSumConfig(T=T, include_real_zeros=include_real, x=x, q=q, a=a)


def progression_pair(q: int, a: int, x_max: float):
    """Index pair (psi(.; q, a), psi(.; chi_0)) for repeated evaluation up to x_max."""
    table = sieve_table(x_max)
    return ProgressionIndex(table, q, a), ProgressionIndex(table, q, None)
