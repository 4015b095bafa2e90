# lfunc_lab/app/distribution.py
"""Logarithmic sampling of the normalized remainders and their limiting moments."""
import math
from typing import Iterable, List, Optional

import numpy as np

from .arith_core import ProgressionIndex, euler_phi, sieve_table
from .characters import character_group, conductor_and_primitive_part
from .display_utils import formatted_print
from .errors import DomainError
from .explicit_formula import ZeroSpectrum, truncation_bound
from .models import ChebyshevReport, LogSampleSeries, MomentReport, OneLevelDensity, VarianceEstimate
from .zero_library import ZeroLibrary

DEFAULT_SAMPLES = 2000
VARIANCE_FACTOR = 3.0
WHICH = ("T", "Tstar")


def sample_series(q: int, a: int, y_min: float, y_max: float, n_samples: int = DEFAULT_SAMPLES,
                  which: str = "T", T_height: Optional[float] = None, library: Optional[ZeroLibrary] = None,
                  cap: Optional[int] = None) -> LogSampleSeries:
    """T(e^y;q,a) or T*(e^y;q,a) on a uniform y-grid."""
    if which not in WHICH:
        raise DomainError(f"which must be one of {WHICH}, got '{which}'.")
    if q < 1 or math.gcd(a, q) != 1:
        raise DomainError(f"Need q >= 1 and gcd(a, q) = 1, got q={q}, a={a}.")
    if n_samples < 1:
        raise DomainError(f"n_samples must be positive, got {n_samples}.")
    if not math.log(2) <= y_min <= y_max:
        raise DomainError(f"Need log 2 <= y_min <= y_max, got [{y_min}, {y_max}].")
    y = np.linspace(y_min, y_max, n_samples)
    xs = np.exp(y)

    if which == "T":
        if q == 1:
            return LogSampleSeries(q, a, y, np.zeros(n_samples), which)
        table = sieve_table(xs[-1], cap) if cap is not None else sieve_table(xs[-1])
        residue = ProgressionIndex(table, q, a)
        principal = ProgressionIndex(table, q, None)
        phi = euler_phi(q)
        values = -(residue.many(xs) - principal.many(xs) / phi) / np.sqrt(xs)
        return LogSampleSeries(q, a, y, values, which)

    if T_height is None:
        raise DomainError("Sampling T* needs a truncation height.")
    if q < 3:
        return LogSampleSeries(q, a, y, np.zeros(n_samples), which, 0.0, T_height)
    library = library or ZeroLibrary()
    spectrum = ZeroSpectrum(q, a, T_height, library)
    # T* is real: the sum pairs chi with its conjugate
    values = np.real(spectrum.tstar(xs))
    bound = truncation_bound(float(xs[-1]), q, T_height, normalized=True)
    return LogSampleSeries(q, a, y, values, which, bound, T_height)


def theoretical_variance(q: int, a: int, T_height: float, library: Optional[ZeroLibrary] = None) -> VarianceEstimate:
    """(1/phi^2) sum_{chi != chi_0} sum_{0 < |gamma| <= T} 1/(1/4 + gamma^2), plus the density tail."""
    if math.gcd(a, q) != 1:
        raise DomainError(f"gcd(a, q) must be 1, got a={a}, q={q}.")
    if T_height <= 0:
        raise DomainError(f"T_height must be positive, got {T_height}.")
    chars = character_group(q).nonprincipal()
    if not chars:
        return VarianceEstimate(q, a, T_height, 0.0, 0.0)
    library = library or ZeroLibrary()
    phi = euler_phi(q)
    partial = []
    for chi in chars:
        _, star = conductor_and_primitive_part(chi)
        gam = library.signed_ordinates(star, T_height)
        gam = gam[(np.abs(gam) <= T_height) & (gam != 0)]
        # |chi(a)|^2 = 1 for (a, q) = 1
        partial.append(math.fsum((1.0 / (0.25 + gam * gam)).tolist()))
    per_character = 2.0 / (math.pi * T_height) * (math.log(q * T_height / (2 * math.pi)) + 1)
    tail = len(chars) * per_character / phi ** 2
    return VarianceEstimate(q, a, T_height, math.fsum(partial) / phi ** 2, tail)


def real_zero_mean(q: int, a: int, library: Optional[ZeroLibrary] = None) -> float:
    """(2/phi(q)) sum_{chi != chi_0} conj chi(a) z(chi)."""
    chars = character_group(q).nonprincipal()
    if not chars:
        return 0.0
    library = library or ZeroLibrary()
    total = 0j
    for chi in chars:
        total += chi.evaluate(a).conjugate() * library.central_order(chi)
    return 2.0 * total.real / euler_phi(q)


def moment_report(series: LogSampleSeries, T_height: float, library: Optional[ZeroLibrary] = None) -> MomentReport:
    if len(series) == 0:
        raise DomainError("moment_report needs a nonempty series.")
    library = library or ZeroLibrary()
    values = np.asarray(series.values, dtype=np.float64)
    mean = float(np.mean(values))
    var = float(np.var(values))
    estimate = theoretical_variance(series.q, series.a, T_height, library)
    theo_mean = 0.0 if series.which == "Tstar" else real_zero_mean(series.q, series.a, library)
    theo_var = estimate.theoretical_variance
    flags = []
    if abs(mean - theo_mean) > math.sqrt(theo_var):
        flags.append("mean-outside-sqrt-variance")
    if theo_var > 0 and not (theo_var / VARIANCE_FACTOR <= var <= theo_var * VARIANCE_FACTOR):
        flags.append("variance-outside-factor-3")
    for flag in flags:
        formatted_print(f"q={series.q}, a={series.a}, {series.which}: {flag}", level="WARNING")
    return MomentReport(
        q=series.q, a=series.a, which=series.which,
        empirical_mean=mean, empirical_variance=var,
        theoretical_mean=theo_mean, theoretical_variance=theo_var,
        tail_estimate=estimate.tail_estimate, flags=flags,
    )


def chebyshev_bound(psi_threshold: float, q: int, a: int, series: Optional[LogSampleSeries] = None) -> ChebyshevReport:
    """Bound 1/Psi^2 for P(|X| >= Psi phi(q)^{-1/2} (log q)^{1/2})."""
    if psi_threshold <= 0:
        raise DomainError(f"psi_threshold must be positive, got {psi_threshold}.")
    if math.gcd(a, q) != 1:
        raise DomainError(f"gcd(a, q) must be 1, got a={a}, q={q}.")
    scaled = psi_threshold * math.sqrt(math.log(q) / euler_phi(q)) if q > 1 else 0.0
    exceedance = None
    if series is not None and len(series):
        exceedance = float(np.mean(np.abs(series.values) >= scaled))
    return ChebyshevReport(psi_threshold, 1.0 / psi_threshold ** 2, scaled, exceedance)


def one_level_density(q: int, kappa: float, T_height: float, library: Optional[ZeroLibrary] = None) -> OneLevelDensity:
    """(1/(phi(q)-1)) sum_{chi != chi_0} sum_{|gamma| <= T} (sin(pi kappa u)/(pi kappa u))^2,
    u = gamma log q / (2 pi)."""
    if kappa <= 0:
        raise DomainError(f"kappa must be positive, got {kappa}.")
    if q < 3:
        raise DomainError(f"one_level_density needs nonprincipal characters, q >= 3, got {q}.")
    library = library or ZeroLibrary()
    chars = character_group(q).nonprincipal()
    scale = math.log(q) / (2 * math.pi)
    sums = []
    count = 0
    for chi in chars:
        _, star = conductor_and_primitive_part(chi)
        gam = library.signed_ordinates(star, T_height)
        gam = gam[np.abs(gam) <= T_height]
        count += int(gam.size)
        sums.append(math.fsum((np.sinc(kappa * gam * scale) ** 2).tolist()))
    value = math.fsum(sums) / len(chars)
    return OneLevelDensity(q, kappa, T_height, value, 1.0 / kappa, count)


def density_report(qs: Iterable[int], kappa: float, T_height: float,
                   library: Optional[ZeroLibrary] = None) -> List[OneLevelDensity]:
    library = library or ZeroLibrary()
    return [one_level_density(q, kappa, T_height, library) for q in qs]
