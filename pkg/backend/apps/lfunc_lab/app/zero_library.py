# lfunc_lab/app/zero_library.py
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
from mpmath import mp, mpf

from .characters import DirichletCharacter, character_group, conductor_and_primitive_part
from .display_utils import formatted_print
from .errors import AuditError, DomainError, IncompleteScanError, InsufficientZerosError
from .lfunc import DEFAULT_PRECISION, GRID_STEP, central_report, count_zeros_between, scan_zeros, verify_ordinate
from .models import ZeroSet
from .storage import append_zero_records, load_zero_cache, zero_records

COINCIDENCE_TOL = 1e-6


def _scan_job(q: int, exponents: Tuple[int, ...], height: float, t_lo: float, grid_step: float, dps: int):
    chi = character_group(q).by_exponents(exponents)
    zs = scan_zeros(chi, height, grid_step=grid_step, dps=dps, t_lo=t_lo)
    return zs.to_dict()


class ZeroLibrary:
    """Critical-line zeros per primitive character, backed by the JSON-lines cache.

    Zero sets grow on demand: cached ordinates are re-verified once, then the
    window above the cached height is scanned and appended to the cache.
    """

    def __init__(self, cache_path: Optional[str] = None, dps: int = DEFAULT_PRECISION,
                 grid_step: float = GRID_STEP, auto_scan: bool = True, workers: int = 1):
        self.cache_path = cache_path
        self.dps = dps
        self.grid_step = grid_step
        self.auto_scan = auto_scan
        self.workers = max(1, int(workers))
        self._sets: Dict[str, ZeroSet] = {}
        self._unverified: set = set()
        self._central: Dict[str, Optional[int]] = {}
        if cache_path:
            entries, msg = load_zero_cache(cache_path)
            if entries is None:
                raise AuditError(msg)
            formatted_print(msg, level="DEBUG")
            for label, entry in entries.items():
                with mp.workdps(entry["prec_digits"] + 10):
                    ordinates = sorted(mpf(g) for g in entry["ordinates"])
                self._sets[label] = ZeroSet(
                    label=label, height=entry["height"], ordinates=ordinates,
                    precision_digits=entry["prec_digits"],
                )
                self._unverified.add(label)

    @classmethod
    def from_config(cls, config, auto_scan: bool = True) -> 'ZeroLibrary':
        return cls(cache_path=config.cache_path, dps=config.precision_digits,
                   grid_step=config.zero_grid_step, auto_scan=auto_scan, workers=config.workers)

    def add(self, zero_set: ZeroSet) -> None:
        """Registers an in-memory zero set (no cache write)."""
        self._sets[zero_set.label] = zero_set
        self._unverified.discard(zero_set.label)

    def available_height(self, label: str) -> float:
        zs = self._sets.get(label)
        return zs.height if zs else 0.0

    def labels(self) -> List[str]:
        return sorted(self._sets)

    def _check(self, chi: DirichletCharacter) -> None:
        if not chi.is_primitive or chi.is_principal:
            raise DomainError(f"Zero sets are kept for primitive nonprincipal characters only, got {chi.label}.")

    def _verify_cached(self, chi: DirichletCharacter) -> None:
        if chi.label not in self._unverified:
            return
        zs = self._sets[chi.label]
        for g in zs.ordinates:
            if not verify_ordinate(chi, g, zs.precision_digits):
                raise AuditError(f"Cached ordinate {mp.nstr(g, 12)} of {chi.label} fails verification.")
        if zs.height > 0:
            expected = count_zeros_between(chi, 0.0, zs.height, zs.precision_digits)
            if expected != len(zs.ordinates):
                raise IncompleteScanError(chi.label, 0.0, zs.height, len(zs.ordinates), expected)
        self._unverified.discard(chi.label)

    def _merge(self, chi: DirichletCharacter, new: ZeroSet) -> ZeroSet:
        old = self._sets.get(chi.label)
        ordinates = (old.ordinates if old else []) + list(new.ordinates)
        merged = ZeroSet(label=chi.label, height=new.height, ordinates=ordinates,
                         precision_digits=min(new.precision_digits, old.precision_digits) if old else new.precision_digits)
        self._sets[chi.label] = merged
        if self.cache_path:
            ok, msg = append_zero_records(
                self.cache_path, zero_records(chi.modulus, chi.label, new.ordinates, new.precision_digits, new.height)
            )
            formatted_print(msg, level="DEBUG" if ok else "WARNING")
        return merged

    def zeros(self, chi: DirichletCharacter, height: float) -> ZeroSet:
        self._check(chi)
        current = self._sets.get(chi.label)
        if current is not None and current.height >= height:
            self._verify_cached(chi)
            return current.restricted(height)
        if not self.auto_scan:
            raise InsufficientZerosError(chi.label, height, current.height if current else 0.0)
        if current is not None:
            self._verify_cached(chi)
        t_lo = current.height if current else 0.0
        formatted_print(f"Scanning zeros of L(s, {chi.label}) on ({t_lo:g}, {height:g}]", level="INFO")
        new = scan_zeros(chi, height, grid_step=self.grid_step, dps=self.dps, t_lo=t_lo)
        return self._merge(chi, new).restricted(height)

    def ensure(self, chars: Iterable[DirichletCharacter], height: float) -> None:
        """Makes zeros to `height` available for every character, scanning in parallel."""
        todo = []
        for chi in chars:
            self._check(chi)
            if self.available_height(chi.label) >= height:
                continue
            if not self.auto_scan:
                raise InsufficientZerosError(chi.label, height, self.available_height(chi.label))
            if chi.label in self._sets:
                self._verify_cached(chi)
            todo.append(chi)
        if not todo:
            return
        jobs = [(c.modulus, c.exponents, height, self.available_height(c.label), self.grid_step, self.dps) for c in todo]
        if self.workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=self.workers) as pool:
                futures = [pool.submit(_scan_job, *job) for job in jobs]
                results = [f.result() for f in futures]
        else:
            results = [_scan_job(*job) for job in jobs]
        for chi, data in zip(todo, results):
            self._merge(chi, ZeroSet.from_dict(data))

    def signed_ordinates(self, chi: DirichletCharacter, height: float) -> np.ndarray:
        """All nonzero ordinates of L(s, chi) with |gamma| <= height; the negative ones
        are the negated positive ordinates of the conjugate character."""
        pos = self.zeros(chi, height).gammas()
        if chi.is_real:
            neg = -pos
        else:
            neg = -self.zeros(chi.conjugate(), height).gammas()
        return np.concatenate([neg[::-1], pos])

    def central_order(self, chi: DirichletCharacter) -> int:
        f, star = conductor_and_primitive_part(chi)
        if star.is_principal:
            return 0
        if star.label not in self._central:
            self._central[star.label] = central_report(star, dps=self.dps).z_chi
        z = self._central[star.label]
        if z is None:
            raise AuditError(f"Central order of L(s, {star.label}) unresolved (possible central zero).")
        return z

    def set_central_order(self, label: str, z: Optional[int]) -> None:
        self._central[label] = z

    def near_coincidences(self, labels: Optional[Iterable[str]] = None, tol: float = COINCIDENCE_TOL) -> List[Tuple[str, str, float, float]]:
        """Ordinates of different characters closer than `tol`; reported, never merged."""
        pool = []
        for label in (labels if labels is not None else self.labels()):
            zs = self._sets.get(label)
            if zs is None:
                continue
            pool.extend((float(g), label) for g in zs.ordinates)
        pool.sort()
        hits = []
        for (g1, l1), (g2, l2) in zip(pool, pool[1:]):
            if l1 != l2 and g2 - g1 < tol:
                hits.append((l1, l2, g1, g2))
                formatted_print(f"Near-coincident ordinates: {l1} @ {g1:.10f} and {l2} @ {g2:.10f}", level="WARNING")
        return hits
