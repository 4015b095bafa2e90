# lfunc_lab/app/models.py
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
from mpmath import mp, mpf


def _dec(value, digits: int) -> str:
    """Decimal string for a real; files never carry binary floats."""
    return mp.nstr(mpf(value), digits, strip_zeros=False)


@dataclass
class PsiValue:
    """A Chebyshev sum; residue None marks the principal-character sum."""
    x: float
    modulus: int
    residue: Optional[int]
    value: float

    def to_dict(self) -> Dict[str, Any]:
        return {"x": self.x, "modulus": self.modulus, "residue": self.residue, "value": self.value}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PsiValue':
        return cls(x=data["x"], modulus=data["modulus"], residue=data.get("residue"), value=data["value"])

    def __float__(self) -> float:
        return float(self.value)

    def __repr__(self) -> str:
        which = "chi0" if self.residue is None else str(self.residue)
        return f"PsiValue(x={self.x}, q={self.modulus}, a={which}, value={self.value!r})"


@dataclass
class ZeroSet:
    """Positive ordinates of L(s, chi) on the critical line up to `height`."""
    label: str
    height: float
    ordinates: List[Any] = field(default_factory=list)  # mpf, ascending
    multiplicities: List[int] = field(default_factory=list)
    precision_digits: int = 30
    central_order: int = 0

    def __post_init__(self):
        if not self.multiplicities:
            self.multiplicities = [1] * len(self.ordinates)

    def __len__(self) -> int:
        return len(self.ordinates)

    def gammas(self) -> np.ndarray:
        return np.array([float(g) for g in self.ordinates], dtype=np.float64)

    def restricted(self, height: float) -> 'ZeroSet':
        keep = [i for i, g in enumerate(self.ordinates) if g <= height]
        return ZeroSet(
            label=self.label,
            height=min(height, self.height),
            ordinates=[self.ordinates[i] for i in keep],
            multiplicities=[self.multiplicities[i] for i in keep],
            precision_digits=self.precision_digits,
            central_order=self.central_order,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "height": self.height,
            "ordinates": [_dec(g, self.precision_digits + 5) for g in self.ordinates],
            "multiplicities": list(self.multiplicities),
            "precision_digits": self.precision_digits,
            "central_order": self.central_order,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ZeroSet':
        prec = int(data.get("precision_digits", 30))
        with mp.workdps(prec + 5):
            ordinates = [mpf(g) for g in data.get("ordinates", [])]
        return cls(
            label=data["label"],
            height=float(data["height"]),
            ordinates=ordinates,
            multiplicities=list(data.get("multiplicities", [])),
            precision_digits=prec,
            central_order=int(data.get("central_order", 0)),
        )

    def __repr__(self) -> str:
        first = f", first={float(self.ordinates[0]):.6f}" if self.ordinates else ""
        return f"ZeroSet(label='{self.label}', T={self.height}, count={len(self.ordinates)}{first})"


@dataclass
class CentralValueReport:
    label: str
    L_half: Any  # mpc
    z_chi: Optional[int]
    vanishing_threshold: float
    status: str = "nonvanishing"  # nonvanishing | escalated-nonvanishing | possible-zero
    precision_digits: int = 30

    @property
    def modulus(self) -> int:
        return int(self.label.split(":")[0])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "L_half_re": _dec(self.L_half.real, 20),
            "L_half_im": _dec(self.L_half.imag, 20),
            "abs_L_half": _dec(abs(self.L_half), 20),
            "z_chi": self.z_chi,
            "vanishing_threshold": self.vanishing_threshold,
            "status": self.status,
            "precision_digits": self.precision_digits,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'CentralValueReport':
        return cls(
            label=data["label"],
            L_half=mp.mpc(data["L_half_re"], data["L_half_im"]),
            z_chi=data.get("z_chi"),
            vanishing_threshold=float(data["vanishing_threshold"]),
            status=data.get("status", "nonvanishing"),
            precision_digits=int(data.get("precision_digits", 30)),
        )


@dataclass
class ZeroSumConfig:
    T: float
    include_real_zeros: bool
    x: float
    q: int
    a: int

    def to_dict(self) -> Dict[str, Any]:
        return {"T": self.T, "include_real_zeros": self.include_real_zeros, "x": self.x, "q": self.q, "a": self.a}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ZeroSumConfig':
        return cls(**{k: data[k] for k in ("T", "include_real_zeros", "x", "q", "a")})


@dataclass
class RemainderValue:
    """Normalized remainder T(x;q,a) and, when zeros were used, its zero-side counterparts."""
    x: float
    q: int
    a: int
    T_value: Optional[float]
    Tstar_value: Optional[complex] = None
    truncation_error_bound: float = 0.0
    zero_route_T: Optional[complex] = None
    T_height: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        def cplx(v):
            return None if v is None else [float(np.real(v)), float(np.imag(v))]
        return {
            "x": self.x, "q": self.q, "a": self.a,
            "T_value": self.T_value,
            "Tstar_value": cplx(self.Tstar_value),
            "zero_route_T": cplx(self.zero_route_T),
            "truncation_error_bound": self.truncation_error_bound,
            "T_height": self.T_height,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RemainderValue':
        def cplx(v):
            return None if v is None else complex(v[0], v[1])
        return cls(
            x=data["x"], q=data["q"], a=data["a"], T_value=data.get("T_value"),
            Tstar_value=cplx(data.get("Tstar_value")),
            truncation_error_bound=data.get("truncation_error_bound", 0.0),
            zero_route_T=cplx(data.get("zero_route_T")),
            T_height=data.get("T_height"),
        )


@dataclass
class SweepResult:
    Q: float
    x: float
    S_direct: float
    term_I: float
    term_II: float
    term_III: float
    main_term: float
    residual: float
    term_III_approx: Optional[float] = None

    COLUMNS = ("Q", "x", "S_direct", "I", "II", "III", "main_term", "residual")

    @property
    def identity_gap(self) -> float:
        return self.S_direct - (self.term_I - self.term_II + self.term_III)

    def row(self) -> List[float]:
        return [self.Q, self.x, self.S_direct, self.term_I, self.term_II, self.term_III, self.main_term, self.residual]

    def to_dict(self) -> Dict[str, Any]:
        data = dict(zip(self.COLUMNS, self.row()))
        data["III_approx"] = self.term_III_approx
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SweepResult':
        return cls(
            Q=data["Q"], x=data["x"], S_direct=data["S_direct"], term_I=data["I"], term_II=data["II"],
            term_III=data["III"], main_term=data["main_term"], residual=data["residual"],
            term_III_approx=data.get("III_approx"),
        )


@dataclass
class CertifiedConstant:
    name: str
    value: float
    error_bound: float
    digits_requested: int
    cutoff: Optional[int] = None
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "value": repr(float(self.value)),
            "error_bound": f"{float(self.error_bound):.3e}",
            "digits_requested": self.digits_requested,
            "prime_cutoff": self.cutoff,
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'CertifiedConstant':
        return cls(
            name=data["name"], value=float(data["value"]), error_bound=float(data["error_bound"]),
            digits_requested=int(data["digits_requested"]), cutoff=data.get("prime_cutoff"),
            notes=list(data.get("notes", [])),
        )

    def __repr__(self) -> str:
        return f"CertifiedConstant({self.name}={self.value:.12f} +/- {self.error_bound:.1e})"


@dataclass
class IterationTrace:
    eta: float
    values: List[float]
    closed_form: List[float]
    n_stop: Optional[int]
    closed_form_check: float
    truncated: bool = False
    saturated: bool = False

    def rows(self) -> List[List[Any]]:
        return [[n, v, c, self.n_stop] for n, (v, c) in enumerate(zip(self.values, self.closed_form))]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eta": self.eta, "values": self.values, "closed_form": self.closed_form, "n_stop": self.n_stop,
            "closed_form_check": self.closed_form_check, "truncated": self.truncated, "saturated": self.saturated,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'IterationTrace':
        return cls(**data)


@dataclass
class LogSampleSeries:
    q: int
    a: int
    y_grid: np.ndarray
    values: np.ndarray
    which: str  # "T" or "Tstar"
    truncation_bound: Optional[float] = None
    T_height: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "q": self.q, "a": self.a, "which": self.which,
            "y_grid": [float(y) for y in self.y_grid],
            "values": [float(v) for v in self.values],
            "truncation_bound": self.truncation_bound, "T_height": self.T_height,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'LogSampleSeries':
        return cls(
            q=data["q"], a=data["a"], which=data["which"],
            y_grid=np.asarray(data["y_grid"], dtype=np.float64),
            values=np.asarray(data["values"], dtype=np.float64),
            truncation_bound=data.get("truncation_bound"), T_height=data.get("T_height"),
        )

    def __len__(self) -> int:
        return len(self.y_grid)


@dataclass
class VarianceEstimate:
    q: int
    a: int
    T_height: float
    partial_sum: float
    tail_estimate: float

    @property
    def theoretical_variance(self) -> float:
        return self.partial_sum + self.tail_estimate

    def to_dict(self) -> Dict[str, Any]:
        return {
            "q": self.q, "a": self.a, "T_height": self.T_height, "partial_sum": self.partial_sum,
            "tail_estimate": self.tail_estimate, "theoretical_variance": self.theoretical_variance,
        }


@dataclass
class MomentReport:
    q: int
    a: int
    which: str
    empirical_mean: float
    empirical_variance: float
    theoretical_mean: float
    theoretical_variance: float
    tail_estimate: float
    flags: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "q": self.q, "a": self.a, "which": self.which,
            "empirical_mean": self.empirical_mean, "empirical_variance": self.empirical_variance,
            "theoretical_mean": self.theoretical_mean, "theoretical_variance": self.theoretical_variance,
            "tail_estimate": self.tail_estimate, "flags": list(self.flags),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'MomentReport':
        return cls(**data)


@dataclass
class ChebyshevReport:
    psi_threshold: float
    bound: float
    scaled_threshold: float
    exceedance: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "psi_threshold": self.psi_threshold, "bound": self.bound,
            "scaled_threshold": self.scaled_threshold, "exceedance": self.exceedance,
        }


@dataclass
class OneLevelDensity:
    q: int
    kappa: float
    T_height: float
    value: float
    prediction: float
    zero_count: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "q": self.q, "kappa": self.kappa, "T_height": self.T_height,
            "value": self.value, "prediction": self.prediction, "zero_count": self.zero_count,
        }
