# lfunc_lab/app/errors.py
from typing import Iterable, Optional


class LabError(Exception):
    """Base class for every failure the lab reports back to the command line."""
    exit_code = 1


class DomainError(LabError, ValueError):
    """Input outside the domain of an operation (gcd failure, bad eta, Q >= x, ...)."""
    exit_code = 2


class PoleError(DomainError):
    """Evaluation requested at the pole s = 1."""


class ResourceError(LabError):
    """Sieve cap, memory budget or prime-cutoff growth exceeded."""
    exit_code = 3


class AuditError(LabError):
    """A numerical cross-check failed or could not be decided."""
    exit_code = 4


class IncompleteScanError(AuditError):
    def __init__(self, label: str, t_lo: float, t_hi: float, found: int, expected: Optional[int] = None):
        self.label = label
        self.t_lo = t_lo
        self.t_hi = t_hi
        self.found = found
        self.expected = expected
        detail = f"found {found}" + (f", argument principle says {expected}" if expected is not None else "")
        super().__init__(f"Zero scan for {label} incomplete on [{t_lo:.6f}, {t_hi:.6f}] ({detail}).")


class InsufficientZerosError(AuditError):
    def __init__(self, label: str, requested: float, available: float):
        self.label = label
        self.requested = requested
        self.available = available
        super().__init__(
            f"Zeros of L(s, {label}) needed up to height {requested:g}, "
            f"but only {available:g} is available (enable scanning or extend the cache)."
        )


class MissingReportsError(AuditError):
    def __init__(self, moduli: Iterable[int]):
        self.moduli = sorted(set(moduli))
        shown = ", ".join(str(q) for q in self.moduli[:20])
        more = "" if len(self.moduli) <= 20 else f" (+{len(self.moduli) - 20} more)"
        super().__init__(f"Central-value reports missing or unresolved for moduli: {shown}{more}")
