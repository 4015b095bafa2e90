# lfunc_lab/app/lfunc.py
"""High-precision Dirichlet L-functions.

L(s, chi) is evaluated through Hurwitz zeta values computed by Euler-Maclaurin
summation with an explicit remainder bound. On top of that sit the completed
function, a Hardy-type real function on the critical line, sign-change zero
location, an argument-principle zero count, and central-value reports.
"""
import math
from collections import OrderedDict
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from mpmath import mp, mpc, mpf

from .arith_core import factorize
from .characters import (
    DirichletCharacter, character_group, conductor_and_primitive_part, root_number,
)
from .display_utils import formatted_print
from .errors import AuditError, DomainError, IncompleteScanError, PoleError
from .models import CentralValueReport, ZeroSet

DEFAULT_PRECISION = 30
GUARD_DIGITS = 10
EM_ORDER = 25
MAX_EM_SHIFT = 1 << 20

MAX_SCAN_HEIGHT = 1e4
GRID_STEP = 0.05
MAX_HALVINGS = 8
BISECT_TOL = 1e-9

# argument principle
EDGE_SPACING = 0.1
PHASE_STEP = math.pi / 4
MAX_PHASE_DEPTH = 12
RIGHT_EDGE = mpf(3) / 2

VANISHING_THRESHOLD = 1e-3
ESCALATION_THRESHOLD = 1e-10


def _alpha_key(alpha) -> Tuple[int, int]:
    fr = Fraction(alpha) if not isinstance(alpha, Fraction) else alpha
    return fr.numerator, fr.denominator


@lru_cache(maxsize=1024)
def _log_table(alpha_num: int, alpha_den: int, N: int, dps: int) -> Tuple:
    with mp.workdps(dps):
        a = mpf(alpha_num) / alpha_den
        return tuple(mp.log(a + k) for k in range(N + 1))


@lru_cache(maxsize=32)
def _em_coefficients(M: int, dps: int) -> Tuple:
    """B_{2j} / (2j)! for j = 1 .. M+1."""
    with mp.workdps(dps):
        return tuple(mp.bernoulli(2 * j) / mp.factorial(2 * j) for j in range(1, M + 2))


def _euler_maclaurin(s, alpha_key: Tuple[int, int], N: int, M: int, dps: int):
    coeffs = _em_coefficients(M, dps)
    logs = _log_table(alpha_key[0], alpha_key[1], N, dps)
    head = mp.fsum(mp.exp(-s * logs[k]) for k in range(N))
    w = mpf(alpha_key[0]) / alpha_key[1] + N
    wpow = mp.exp(-s * logs[N])  # w^{-s}
    terms = [head, w * wpow / (s - 1), wpow / 2]
    rising = s  # (s)_{2j-1}
    w_pow = wpow / w  # w^{-s-2j+1}
    inv_w2 = 1 / (w * w)
    for j in range(1, M + 1):
        terms.append(coeffs[j - 1] * rising * w_pow)
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        w_pow *= inv_w2
    nxt = abs(coeffs[M] * rising * w_pow)
    bound = nxt * abs(s + 2 * M + 1) / (mp.re(s) + 2 * M + 1)
    return mp.fsum(terms), bound


def hurwitz_zeta(s, alpha, dps: Optional[int] = None):
    """zeta(s, alpha) for 0 < alpha <= 1, with the Euler-Maclaurin remainder certified
    below 10^-(dps+2) relative to the result."""
    dps = dps or DEFAULT_PRECISION
    key = _alpha_key(alpha)
    if not (0 < key[0] <= key[1]):
        raise DomainError(f"hurwitz_zeta needs alpha in (0, 1], got {alpha}.")
    work = dps + GUARD_DIGITS
    with mp.workdps(work):
        s = mpc(s)
        if s == 1:
            raise PoleError("zeta(s, alpha) has a pole at s = 1.")
        N = max(20, int(2 * abs(mp.im(s))) + 1)
        target = mpf(10) ** (-(dps + 2))
        while True:
            value, bound = _euler_maclaurin(s, key, N, EM_ORDER, work)
            if bound <= target * max(1, abs(value)):
                return value
            N *= 2
            if N > MAX_EM_SHIFT:
                raise AuditError(f"Euler-Maclaurin remainder did not certify at s={s}, alpha={alpha}.")


_ROW_CACHE: "OrderedDict[tuple, Dict[int, object]]" = OrderedDict()
_ROW_CACHE_SIZE = 512


def hurwitz_row(s, q: int, dps: Optional[int] = None) -> Dict[int, object]:
    """zeta(s, a/q) for every unit a mod q. Shared by all characters of one modulus."""
    dps = dps or DEFAULT_PRECISION
    with mp.workdps(dps + GUARD_DIGITS):
        s = mpc(s)
        key = (s._mpc_, q, dps)
        row = _ROW_CACHE.get(key)
        if row is not None:
            _ROW_CACHE.move_to_end(key)
            return row
        row = {a: hurwitz_zeta(s, Fraction(a, q), dps) for a in range(1, q + 1) if math.gcd(a, q) == 1}
    _ROW_CACHE[key] = row
    if len(_ROW_CACHE) > _ROW_CACHE_SIZE:
        _ROW_CACHE.popitem(last=False)
    return row


def l_value(s, chi: DirichletCharacter, dps: Optional[int] = None):
    """L(s, chi) = q^{-s} sum_a chi(a) zeta(s, a/q)."""
    dps = dps or DEFAULT_PRECISION
    with mp.workdps(dps + GUARD_DIGITS):
        s = mpc(s)
        if chi.is_principal and s == 1:
            raise PoleError("L(s, chi_0) has a pole at s = 1.")
        q = chi.modulus
        if q == 1:
            return hurwitz_zeta(s, 1, dps)
        if s == 1:
            return l_at_one(chi, dps)
        row = hurwitz_row(s, q, dps)
        total = mp.fsum(chi.value_mp(a) * z for a, z in row.items())
        return mp.power(q, -s) * total


def l_at_one(chi: DirichletCharacter, dps: Optional[int] = None):
    """L(1, chi) = -(1/q) sum_a chi(a) digamma(a/q) for nonprincipal chi.

    The Hurwitz poles at s = 1 cancel because sum_a chi(a) = 0.
    """
    if chi.is_principal:
        raise PoleError("L(s, chi_0) has a pole at s = 1.")
    dps = dps or DEFAULT_PRECISION
    q = chi.modulus
    with mp.workdps(dps + GUARD_DIGITS):
        total = mp.fsum(
            chi.value_mp(a) * mp.digamma(mpf(a) / q) for a in range(1, q + 1) if math.gcd(a, q) == 1
        )
        return mpc(-total / q)


def _require_primitive(chi: DirichletCharacter, what: str) -> None:
    if not chi.is_primitive:
        raise DomainError(f"{what} needs a primitive character; {chi.label} has conductor {chi.conductor}.")


@lru_cache(maxsize=512)
def _root_number(chi: DirichletCharacter, dps: int):
    with mp.workdps(dps + GUARD_DIGITS):
        eps = root_number(chi)
        return eps, mp.sqrt(eps)


def completed_l(s, chi: DirichletCharacter, dps: Optional[int] = None):
    """Lambda(s, chi) = (q/pi)^{(s+a)/2} Gamma((s+a)/2) L(s, chi) for primitive chi."""
    _require_primitive(chi, "completed_l")
    dps = dps or DEFAULT_PRECISION
    with mp.workdps(dps + GUARD_DIGITS):
        s = mpc(s)
        h = (s + chi.parity) / 2
        factor = mp.exp(h * mp.log(mpf(chi.modulus) / mp.pi) + mp.loggamma(h))
        return factor * l_value(s, chi, dps)


def _theta(t, chi: DirichletCharacter):
    h = (mpc(mpf(1) / 2, t) + chi.parity) / 2
    return mp.im(mp.loggamma(h)) + t / 2 * mp.log(mpf(chi.modulus) / mp.pi)


def hardy_z_complex(t, chi: DirichletCharacter, dps: Optional[int] = None):
    """eps^{-1/2} e^{i theta(t)} L(1/2 + it, chi); real up to rounding for primitive chi."""
    _require_primitive(chi, "hardy_z")
    dps = dps or DEFAULT_PRECISION
    _, sqrt_eps = _root_number(chi, dps)
    with mp.workdps(dps + GUARD_DIGITS):
        t = mpf(t)
        return mp.expj(_theta(t, chi)) * l_value(mpc(mpf(1) / 2, t), chi, dps) / sqrt_eps


def hardy_z(t, chi: DirichletCharacter, dps: Optional[int] = None):
    return mp.re(hardy_z_complex(t, chi, dps))


def riemann_von_mangoldt_main(q: int, T: float) -> float:
    """(T/pi) log(qT / (2 pi e)): zeros with |gamma| <= T summed over chi and conj chi."""
    if T <= 0:
        return 0.0
    return T / math.pi * math.log(q * T / (2 * math.pi * math.e))


# --- argument principle -------------------------------------------------------


class _PhaseWalker:
    """Continuous arg of Lambda along a polygonal path, refined until every step
    turns by less than PHASE_STEP."""

    def __init__(self, chi: DirichletCharacter, dps: int):
        self.chi = chi
        self.dps = dps
        self.cache: Dict[Tuple[float, float], object] = {}

    def value(self, sigma, t):
        key = (float(sigma), float(t))
        v = self.cache.get(key)
        if v is None:
            v = completed_l(mpc(sigma, t), self.chi, self.dps)
            if v == 0:
                raise AuditError(f"Lambda vanishes on the audit contour at {key}; move the contour.")
            self.cache[key] = v
        return v

    def _step(self, a, b, fa, fb, depth: int) -> float:
        d = float(mp.arg(fb / fa))
        if abs(d) <= PHASE_STEP:
            return d
        if depth >= MAX_PHASE_DEPTH:
            raise AuditError(
                f"Phase ambiguity for {self.chi.label} between {a} and {b} after {depth} subdivisions."
            )
        m = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
        fm = self.value(*m)
        return self._step(a, m, fa, fm, depth + 1) + self._step(m, b, fm, fb, depth + 1)

    def segment(self, a, b) -> float:
        length = math.hypot(float(b[0] - a[0]), float(b[1] - a[1]))
        pieces = max(1, int(math.ceil(length / EDGE_SPACING)))
        total = 0.0
        prev = a
        fprev = self.value(*a)
        for k in range(1, pieces + 1):
            frac = mpf(k) / pieces
            cur = (a[0] + (b[0] - a[0]) * frac, a[1] + (b[1] - a[1]) * frac)
            fcur = self.value(*cur)
            total += self._step(prev, cur, fprev, fcur, 0)
            prev, fprev = cur, fcur
        return total


def count_zeros_between(chi: DirichletCharacter, t_lo: float, t_hi: float, dps: Optional[int] = None) -> int:
    """Number of zeros of L(s, chi) in the strip with t_lo < gamma <= t_hi.

    By the functional equation the full rectangle Re s in [-1/2, 3/2] winds
    twice the half-path 1/2+i t_lo -> 3/2+i t_lo -> 3/2+i t_hi -> 1/2+i t_hi,
    so the count is that half-path's arg change divided by pi.
    """
    _require_primitive(chi, "count_zeros_between")
    if chi.is_principal:
        raise DomainError("Zero counting is only implemented for nonprincipal characters.")
    if t_hi <= t_lo:
        return 0
    dps = dps or DEFAULT_PRECISION
    walker = _PhaseWalker(chi, dps)
    with mp.workdps(dps + GUARD_DIGITS):
        half = mpf(1) / 2
        lo = mpf(t_lo)
        hi = mpf(t_hi)
        path = [(half, lo), (RIGHT_EDGE, lo), (RIGHT_EDGE, hi), (half, hi)]
        total = sum(walker.segment(path[i], path[i + 1]) for i in range(3))
    count = total / math.pi
    nearest = round(count)
    if abs(count - nearest) > 0.05:
        raise AuditError(f"Non-integral winding {count:.4f} for {chi.label} on ({t_lo}, {t_hi}].")
    return int(nearest)


def _safe_height(chi: DirichletCharacter, T: float, dps: int) -> float:
    """Nudge T off an ordinate so the contour does not run through a zero."""
    for _ in range(5):
        if abs(hardy_z(T, chi, dps)) > 1e-5:
            return T
        T += 1e-6
    return T


def zero_count_audit(chi: DirichletCharacter, T: float, dps: Optional[int] = None) -> int:
    dps = dps or DEFAULT_PRECISION
    return count_zeros_between(chi, 0.0, _safe_height(chi, T, dps), dps)


# --- zero location -------------------------------------------------------------


class _HardyScanner:
    def __init__(self, chi: DirichletCharacter, dps: int):
        self.chi = chi
        self.dps = dps
        self.memo: Dict[float, object] = {}

    def z(self, t: float):
        v = self.memo.get(t)
        if v is None:
            v = hardy_z(t, self.chi, self.dps)
            self.memo[t] = v
        return v

    def grid(self, t_lo: float, t_hi: float, step: float) -> List[float]:
        n = int(math.ceil((t_hi - t_lo) / step))
        pts = [t_lo + k * step for k in range(n)]
        pts.append(t_hi)
        return pts

    def brackets(self, t_lo: float, t_hi: float, step: float) -> List[Tuple[float, float]]:
        pts = self.grid(t_lo, t_hi, step)
        out = []
        prev_t = pts[0]
        prev_sign = mp.sign(self.z(prev_t))
        for t in pts[1:]:
            sgn = mp.sign(self.z(t))
            if sgn == 0:
                out.append((t, t))
            elif prev_sign != 0 and sgn != prev_sign:
                out.append((prev_t, t))
            prev_t, prev_sign = t, sgn
        return out

    def refine(self, lo: float, hi: float):
        if lo == hi:
            with mp.workdps(self.dps + GUARD_DIGITS):
                return mpf(lo)
        f_lo = mp.sign(self.z(lo))
        while hi - lo > BISECT_TOL:
            mid = (lo + hi) / 2
            s_mid = mp.sign(hardy_z(mid, self.chi, self.dps))
            if s_mid == 0:
                lo = hi = mid
                break
            if s_mid == f_lo:
                lo = mid
            else:
                hi = mid
        return self._polish(lo, hi)

    def _polish(self, lo: float, hi: float):
        tol = mpf(10) ** (-(self.dps - 5))
        with mp.workdps(self.dps + GUARD_DIGITS):
            f = lambda t: hardy_z(t, self.chi, self.dps)
            a, b = mpf(lo), mpf(hi)
            if a == b:
                return a
            root = None
            try:
                root = mp.findroot(f, (a, b), solver="illinois", verify=False, maxsteps=60)
            except (ValueError, ArithmeticError):
                root = None
            if root is not None and a <= root <= b and abs(f(root)) < tol:
                return +root
            # fall back to plain bisection at full precision
            fa = mp.sign(f(a))
            width = mpf(10) ** (-(self.dps + GUARD_DIGITS - 2))
            while b - a > width:
                m = (a + b) / 2
                fm = f(m)
                if abs(fm) < tol:
                    return m
                if mp.sign(fm) == fa:
                    a = m
                else:
                    b = m
            return (a + b) / 2


def _require_scannable(chi: DirichletCharacter) -> None:
    _require_primitive(chi, "scan_zeros")
    if chi.is_principal:
        raise DomainError("scan_zeros needs a nonprincipal character.")


def _localize(scanner: _HardyScanner, lo: float, hi: float, step: float) -> Tuple[float, float, int, int]:
    found = len(scanner.brackets(lo, hi, step))
    expected = count_zeros_between(scanner.chi, lo, hi, scanner.dps)
    if found == expected:
        return lo, hi, found, expected
    if hi - lo <= 1.0:
        return lo, hi, found, expected
    mid = _safe_height(scanner.chi, (lo + hi) / 2, scanner.dps)
    left = _localize(scanner, lo, mid, step)
    if left[2] != left[3]:
        return left
    return _localize(scanner, mid, hi, step)


def scan_zeros(chi: DirichletCharacter, T: float, grid_step: float = GRID_STEP,
               dps: Optional[int] = None, t_lo: float = 0.0) -> ZeroSet:
    """Zeros of L(s, chi) on the critical line with t_lo < gamma <= T.

    Sign changes of the Hardy-type function are bracketed on a grid and bisected;
    the count is audited against the argument principle and the grid is halved
    until the two agree.
    """
    _require_scannable(chi)
    if T > MAX_SCAN_HEIGHT:
        raise DomainError(f"Scan height {T:g} exceeds the limit {MAX_SCAN_HEIGHT:g}.")
    if grid_step <= 0:
        raise DomainError("grid_step must be positive.")
    dps = dps or DEFAULT_PRECISION
    T = _safe_height(chi, float(T), dps)
    if T <= t_lo:
        return ZeroSet(label=chi.label, height=max(T, t_lo), precision_digits=dps)

    expected = count_zeros_between(chi, t_lo, T, dps)
    scanner = _HardyScanner(chi, dps)
    step = grid_step
    brackets = scanner.brackets(t_lo, T, step)
    halvings = 0
    while len(brackets) != expected:
        if halvings >= MAX_HALVINGS:
            lo, hi, found, exp_count = _localize(scanner, t_lo, T, step)
            raise IncompleteScanError(chi.label, lo, hi, found, exp_count)
        step /= 2
        halvings += 1
        formatted_print(
            f"{chi.label}: {len(brackets)} sign changes vs {expected} zeros on ({t_lo:g}, {T:g}]; grid step -> {step:g}",
            level="DEBUG",
        )
        brackets = scanner.brackets(t_lo, T, step)

    ordinates = [scanner.refine(lo, hi) for lo, hi in brackets]
    return ZeroSet(label=chi.label, height=T, ordinates=ordinates, precision_digits=dps)


def verify_ordinate(chi: DirichletCharacter, gamma, dps: Optional[int] = None) -> bool:
    dps = dps or DEFAULT_PRECISION
    with mp.workdps(dps + GUARD_DIGITS):
        return abs(hardy_z(gamma, chi, dps)) < mpf(10) ** (-(dps - 5))


# --- central values and finite corrections ------------------------------------------


def central_report(chi: DirichletCharacter, threshold: float = VANISHING_THRESHOLD,
                   escalation_threshold: float = ESCALATION_THRESHOLD,
                   dps: Optional[int] = None) -> CentralValueReport:
    """Order of vanishing at s = 1/2, decided by thresholds; never asserts a zero."""
    if chi.is_principal:
        raise DomainError("central_report needs a nonprincipal character.")
    dps = dps or DEFAULT_PRECISION
    half = mpf(1) / 2
    value = l_value(half, chi, dps)
    if abs(value) > threshold:
        return CentralValueReport(chi.label, value, 0, threshold, "nonvanishing", dps)

    formatted_print(
        f"|L(1/2, {chi.label})| = {mp.nstr(abs(value), 5)} below {threshold:g}; escalating to {2 * dps} digits",
        level="WARNING",
    )
    value = l_value(half, chi, 2 * dps)
    if abs(value) > escalation_threshold:
        return CentralValueReport(chi.label, value, 0, escalation_threshold, "escalated-nonvanishing", 2 * dps)
    formatted_print(f"Possible central zero for {chi.label}: |L(1/2)| = {mp.nstr(abs(value), 5)}", level="WARNING")
    return CentralValueReport(chi.label, value, None, escalation_threshold, "possible-zero", 2 * dps)


def imprimitive_psi_correction(chi: DirichletCharacter, x: float) -> complex:
    """sum over p | q, p not dividing the conductor, of sum_{p^k <= x} chi*(p^k) log p,
    so that psi(x, chi) = psi(x, chi*) - correction."""
    f, star = conductor_and_primitive_part(chi)
    if f == chi.modulus:
        return complex(0.0)
    re_terms = []
    im_terms = []
    for p, _ in factorize(chi.modulus):
        if f % p == 0:
            continue
        logp = math.log(p)
        pk = p
        while pk <= x:
            v = star.evaluate(pk)
            re_terms.append(v.real * logp)
            im_terms.append(v.imag * logp)
            pk *= p
    return complex(math.fsum(re_terms), math.fsum(im_terms))


def _central_reports_for_modulus(q: int, threshold: float, escalation_threshold: float, dps: int) -> List[dict]:
    reports = []
    for chi in character_group(q).nonprincipal():
        reports.append(central_report(chi, threshold, escalation_threshold, dps).to_dict())
    return reports


def central_sweep(qmax: int, threshold: float = VANISHING_THRESHOLD,
                  escalation_threshold: float = ESCALATION_THRESHOLD,
                  dps: Optional[int] = None, workers: int = 1, qmin: int = 3) -> List[CentralValueReport]:
    """Central reports for every nonprincipal character mod q, qmin <= q <= qmax."""
    dps = dps or DEFAULT_PRECISION
    moduli = list(range(max(qmin, 3), qmax + 1))
    if workers > 1 and len(moduli) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_central_reports_for_modulus, q, threshold, escalation_threshold, dps) for q in moduli]
            chunks = [f.result() for f in futures]
    else:
        chunks = [_central_reports_for_modulus(q, threshold, escalation_threshold, dps) for q in moduli]
    return [CentralValueReport.from_dict(d) for chunk in chunks for d in chunk]
