# lfunc_lab/app/config.py
import hashlib
import json
import os
from typing import Any, Dict, Optional

from .errors import DomainError

ENV_CACHE = "LFUNC_LAB_CACHE"
ENV_THREADS = "LFUNC_LAB_THREADS"

DEFAULT_DATA_DIR = "data"
MIN_PRECISION_DIGITS = 30


class RunConfig:
    """Settings shared by every command of one run."""

    def __init__(
        self,
        precision_digits: int = 30,
        prime_cutoff: int = 10**7,
        sieve_cap: int = 10**9,
        zero_grid_step: float = 0.05,
        zero_height_default: float = 50.0,
        vanishing_threshold: float = 1e-3,
        escalation_threshold: float = 1e-10,
        cache_path: str = os.path.join(DEFAULT_DATA_DIR, "zeros.jsonl"),
        output_path: str = DEFAULT_DATA_DIR,
        seed: int = 20240601,
        workers: int = 1,
    ):
        self.precision_digits = int(precision_digits)
        self.prime_cutoff = int(prime_cutoff)
        self.sieve_cap = int(sieve_cap)
        self.zero_grid_step = float(zero_grid_step)
        self.zero_height_default = float(zero_height_default)
        self.vanishing_threshold = float(vanishing_threshold)
        self.escalation_threshold = float(escalation_threshold)
        self.cache_path = cache_path
        self.output_path = output_path
        self.seed = int(seed)
        self.workers = int(workers)

    def validate(self) -> "RunConfig":
        positive = [
            "precision_digits", "prime_cutoff", "sieve_cap", "zero_grid_step",
            "zero_height_default", "vanishing_threshold", "escalation_threshold", "workers",
        ]
        for name in positive:
            if getattr(self, name) <= 0:
                raise DomainError(f"Configuration field '{name}' must be positive, got {getattr(self, name)!r}.")
        if self.precision_digits < MIN_PRECISION_DIGITS:
            raise DomainError(f"precision_digits must be at least {MIN_PRECISION_DIGITS} on the L path.")
        if self.escalation_threshold >= self.vanishing_threshold:
            raise DomainError("escalation_threshold must be smaller than vanishing_threshold.")
        if self.seed < 0:
            raise DomainError("seed must be nonnegative.")
        return self

    def artifact_path(self, out: Optional[str]) -> Optional[str]:
        """Relative artifact paths land under output_path."""
        if not out or os.path.isabs(out):
            return out
        return os.path.join(self.output_path, out)

    def apply_environment(self, environ: Optional[Dict[str, str]] = None) -> "RunConfig":
        env = os.environ if environ is None else environ
        if env.get(ENV_CACHE):
            self.cache_path = env[ENV_CACHE]
        if env.get(ENV_THREADS):
            try:
                self.workers = int(env[ENV_THREADS])
            except ValueError:
                raise DomainError(f"{ENV_THREADS} must be an integer, got {env[ENV_THREADS]!r}.")
        return self

    def to_dict(self) -> Dict[str, Any]:
        return {
            "precision_digits": self.precision_digits,
            "prime_cutoff": self.prime_cutoff,
            "sieve_cap": self.sieve_cap,
            "zero_grid_step": self.zero_grid_step,
            "zero_height_default": self.zero_height_default,
            "vanishing_threshold": self.vanishing_threshold,
            "escalation_threshold": self.escalation_threshold,
            "cache_path": self.cache_path,
            "output_path": self.output_path,
            "seed": self.seed,
            "workers": self.workers,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        known = cls().to_dict().keys()
        return cls(**{k: v for k, v in data.items() if k in known})

    def config_hash(self) -> str:
        # Paths and worker count do not change results.
        payload = {k: v for k, v in self.to_dict().items() if k not in ("cache_path", "output_path", "workers")}
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def __repr__(self) -> str:
        return f"RunConfig(precision={self.precision_digits}, P={self.prime_cutoff}, cache='{self.cache_path}')"
