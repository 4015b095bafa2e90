# lfunc_lab/app/iteration.py
"""The exponent-improvement map f(t) = 2 - 1/eta - t (1 - 1/eta).

1 - f(t) = (1/eta - 1)(1 - t), so starting from t0 = 2 - 1/eta the n-th iterate
is 1 - (1/eta - 1)^{n+1}.
"""
from typing import Iterable, List, Optional, Tuple

from .display_utils import formatted_print
from .errors import DomainError
from .models import IterationTrace

STOP_LEVEL = 0.5


def _check_eta(eta: float) -> None:
    if not 0.5 < eta < 1:
        raise DomainError(f"eta must lie in (1/2, 1), got {eta}.")


def f_map(eta: float, t: float) -> float:
    _check_eta(eta)
    return 2 - 1 / eta - t * (1 - 1 / eta)


def closed_form(eta: float, n: int) -> float:
    return 1 - (1 / eta - 1) ** (n + 1)


def iterate_trace(eta: float, n_max: int) -> IterationTrace:
    """Iterates f from 2 - 1/eta for n = 0 .. n_max.

    Stops early with `saturated` once an iterate no longer increases in floating point.
    """
    _check_eta(eta)
    if n_max < 0:
        raise DomainError(f"n_max must be nonnegative, got {n_max}.")
    t = 2 - 1 / eta
    values = [t]
    saturated = False
    for _ in range(n_max):
        nxt = f_map(eta, t)
        if not nxt > t:
            saturated = True
            break
        values.append(nxt)
        t = nxt
    closed = [closed_form(eta, n) for n in range(len(values))]
    check = max(abs(v - c) for v, c in zip(values, closed))
    n_stop = next((n for n, v in enumerate(values) if v > STOP_LEVEL), None)
    truncated = n_stop is None
    if truncated:
        formatted_print(f"eta={eta}: iterates stay at or below 1/2 for n <= {len(values) - 1}", level="DEBUG")
    return IterationTrace(
        eta=eta, values=values, closed_form=closed, n_stop=n_stop,
        closed_form_check=check, truncated=truncated, saturated=saturated,
    )


def kappa_update(eta: float, kappa: float) -> float:
    """min(1/2, f(kappa))."""
    _check_eta(eta)
    if not 0 < kappa < 0.5:
        raise DomainError(f"kappa must lie in (0, 1/2), got {kappa}.")
    return min(STOP_LEVEL, f_map(eta, kappa))


def improved_exponent_chain(eta: float, max_steps: int = 1000) -> List[float]:
    """kappa_0 = min(1/2, 2 - 1/eta), then kappa_update until the clamp at 1/2."""
    _check_eta(eta)
    chain = [min(STOP_LEVEL, 2 - 1 / eta)]
    while chain[-1] < STOP_LEVEL and len(chain) <= max_steps:
        chain.append(kappa_update(eta, chain[-1]))
    return chain


def stop_table(etas: Iterable[float], n_max: int = 10000) -> Tuple[List[Tuple[float, Optional[int]]], bool]:
    """(eta, n_stop) rows and whether n_stop is nonincreasing along ascending eta."""
    rows = [(eta, iterate_trace(eta, n_max).n_stop) for eta in sorted(etas)]
    stops = [s for _, s in rows]
    ok = None not in stops and all(b <= a for a, b in zip(stops, stops[1:]))
    if not ok:
        formatted_print("n_stop is not nonincreasing in eta on this grid", level="WARNING")
    return rows, ok
