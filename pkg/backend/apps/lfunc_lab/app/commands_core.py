# lfunc_lab/app/commands_core.py
import math
import os
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np

from . import aggregates, constants, distribution, explicit_formula, iteration
from .arith_core import psi_principal, psi_progression, sieve_table
from .characters import character_from_label, character_group, conductor_and_primitive_part, primitive_nonprincipal
from .config import RunConfig
from .errors import AuditError, DomainError, LabError, ResourceError
from .lfunc import central_sweep, zero_count_audit
from .models import SweepResult
from .storage import artifact_header, render_csv, render_json, write_text
from .zero_library import ZeroLibrary


class CommandStatus:
    SUCCESS = "success"
    ERROR = "error"
    DOMAIN_ERROR = "domain_error"
    RESOURCE_ERROR = "resource_error"
    AUDIT_ERROR = "audit_error"

    EXIT_CODES = {
        SUCCESS: 0,
        ERROR: 1,
        DOMAIN_ERROR: 2,
        RESOURCE_ERROR: 3,
        AUDIT_ERROR: 4,
    }

    @classmethod
    def exit_code(cls, status: str) -> int:
        return cls.EXIT_CODES.get(status, 1)


# Result tuple structure: (status: CommandStatus, data: Any, message: str)
# 'data' is the computed record(s); artifact text is written to a file or returned for printing.


def status_for(error: Exception) -> str:
    if isinstance(error, DomainError):
        return CommandStatus.DOMAIN_ERROR
    if isinstance(error, ResourceError):
        return CommandStatus.RESOURCE_ERROR
    if isinstance(error, AuditError):
        return CommandStatus.AUDIT_ERROR
    return CommandStatus.ERROR


def _emit(config: RunConfig, text: str, out: Optional[str], what: str) -> Tuple[str, Optional[str], str]:
    """Writes `text` to `out` (relative paths under output_path) when given, else hands it back for printing."""
    if not out:
        return CommandStatus.SUCCESS, text, f"{what} generated."
    ok, msg = write_text(config.artifact_path(out), text)
    if ok:
        return CommandStatus.SUCCESS, None, msg
    return CommandStatus.ERROR, None, msg


def _library(config: RunConfig) -> ZeroLibrary:
    return ZeroLibrary.from_config(config)


def characters_action(config: RunConfig, q: int, out: Optional[str] = None) -> Tuple[str, Any, str]:
    """Character table for modulus q."""
    try:
        group = character_group(q)
        rows = []
        for chi in group:
            f, _ = conductor_and_primitive_part(chi)
            rows.append([chi.label, chi.order, chi.parity, f, chi.is_primitive, chi.is_real, chi.is_principal])
        columns = ["label", "order", "parity", "conductor", "primitive", "real", "principal"]
        text = render_csv(columns, rows, artifact_header(config, f"characters --modulus {q}"))
        status, content, msg = _emit(config, text, out, f"Character table for q={q} ({len(group)} characters)")
        return status, {"rows": rows, "text": content}, msg
    except LabError as e:
        return status_for(e), None, str(e)


def zeros_action(config: RunConfig, q: int, label: Optional[str], height: Optional[float],
                 out: Optional[str] = None) -> Tuple[str, Any, str]:
    """Scans (or loads from the cache) zeros up to `height`, audited by the argument principle."""
    try:
        height = height or config.zero_height_default
        if label:
            chars = [character_from_label(label)]
            if chars[0].modulus != q:
                raise DomainError(f"Label '{label}' is not a character mod {q}.")
        else:
            chars = primitive_nonprincipal(q)
        library = _library(config)
        library.ensure(chars, height)
        rows = []
        sets = []
        for chi in chars:
            zs = library.zeros(chi, height)
            audit = zero_count_audit(chi, height, config.precision_digits)
            if audit != len(zs):
                raise AuditError(f"{chi.label}: {len(zs)} ordinates located but the argument principle counts {audit}.")
            sets.append(zs)
            rows.extend([chi.label, i + 1, float(g)] for i, g in enumerate(zs.ordinates))
        library.near_coincidences([c.label for c in chars])
        text = render_csv(["label", "index", "gamma"], rows,
                          artifact_header(config, f"zeros --modulus {q} --height {height:g}"))
        status, content, msg = _emit(config, text, out, f"{len(rows)} zero(s) for {len(chars)} character(s) up to T={height:g}")
        return status, {"zero_sets": sets, "text": content}, msg
    except LabError as e:
        return status_for(e), None, str(e)


def psi_action(config: RunConfig, x: float, q: int, a: Optional[int]) -> Tuple[str, Any, str]:
    try:
        table = sieve_table(x, config.sieve_cap)
        value = psi_principal(x, q, table) if a is None else psi_progression(x, q, a, table)
        which = "chi_0" if a is None else f"a={a}"
        return CommandStatus.SUCCESS, value, f"psi({x:g}; q={q}, {which}) = {value.value!r}"
    except LabError as e:
        return status_for(e), None, str(e)


def sweep_action(config: RunConfig, x: float, qmin: float, qmax: float, points: int,
                 random_pairs: int = 0, out: Optional[str] = None) -> Tuple[str, Any, str]:
    """S(Q;x) against I - II + III on a Q grid, plus optional seeded random (Q, x) pairs."""
    try:
        c3_value = constants.c3().value
        table = sieve_table(x, config.sieve_cap)
        results: List[SweepResult] = aggregates.sweep(x, qmin, qmax, points, c3_value, table)
        if random_pairs:
            rng = np.random.default_rng(config.seed)
            for _ in range(random_pairs):
                xr = float(rng.integers(100, int(x) + 1))
                Qr = float(rng.uniform(2, xr / 2))
                results.append(aggregates.s_identity(Qr, xr, table, c3_value))
        worst = max(abs(r.identity_gap) / max(abs(r.term_I) + abs(r.term_II) + abs(r.term_III), 1.0) for r in results)
        header = artifact_header(config, f"sweep-s --x {x:g} --qmin {qmin:g} --qmax {qmax:g}")
        text = render_csv(SweepResult.COLUMNS, [r.row() for r in results], header)
        status, content, msg = _emit(config, text, out, "Sweep table")
        if worst > 1e-9 and status == CommandStatus.SUCCESS:
            return CommandStatus.AUDIT_ERROR, {"results": results, "text": content}, (
                f"Divisor-switch identity off by {worst:.3e} (relative)."
            )
        return status, {"results": results, "text": content}, f"{msg} Worst relative identity gap {worst:.2e}."
    except LabError as e:
        return status_for(e), None, str(e)


def trend_action(config: RunConfig, xs: Sequence[float], exponent: float = 0.8,
                 out: Optional[str] = None) -> Tuple[str, Any, str]:
    """S_direct/main_term and III/(x log 2) at Q = x^exponent for each x."""
    try:
        if not xs or any(x <= 2 for x in xs):
            raise DomainError("trend needs at least one x > 2.")
        if not 0 < exponent < 1:
            raise DomainError(f"exponent must lie in (0, 1), got {exponent!r}.")
        xs = sorted(float(x) for x in xs)
        table = sieve_table(xs[-1], config.sieve_cap)
        ratio_rows, monotone = aggregates.ratio_trend(xs, exponent, constants.c3().value, table)
        third_rows = aggregates.term_iii_trend(xs, exponent, table)
        rows = [r + t[2:] for r, t in zip(ratio_rows, third_rows)]
        header = artifact_header(config, f"trend --exponent {exponent:g} --x " + " ".join(f"{x:g}" for x in xs))
        text = render_csv(["x", "Q", "S_direct", "main_term", "ratio", "III", "III_over_xlog2", "C1"], rows, header)
        status, content, msg = _emit(config, text, out, "Trend table")
        data = {"rows": rows, "monotone": monotone, "text": content}
        if not monotone:
            msg += " |ratio - 1| is not nonincreasing in x."
        last_ratio = rows[-1][4]
        if status == CommandStatus.SUCCESS and not 0.5 <= last_ratio <= 1.5:
            return CommandStatus.AUDIT_ERROR, data, (
                f"S_direct/main_term = {last_ratio:.4f} at x = {xs[-1]:g}, outside [0.5, 1.5]."
            )
        return status, data, msg
    except LabError as e:
        return status_for(e), None, str(e)


def bfi_action(config: RunConfig, x: float, Q: float, a: int, height: Optional[float] = None,
               with_zeros: bool = False) -> Tuple[str, Any, str]:
    try:
        library = _library(config) if with_zeros else None
        table = sieve_table(x, config.sieve_cap)
        with_abs, zero_route = aggregates.bfi_discrepancy(Q, x, a, library, height or config.zero_height_default, table)
        scale = x * (math.log(math.log(x)) / math.log(x)) ** 2
        data = {"Q": Q, "x": x, "a": a, "with_abs": with_abs, "zero_route_no_real": zero_route, "scale": scale}
        zr = "n/a" if zero_route is None else f"{zero_route!r}"
        return CommandStatus.SUCCESS, data, (
            f"sum |psi - psi0/phi| = {with_abs!r}; zero route = {zr}; x (loglog x/log x)^2 = {scale!r}"
        )
    except LabError as e:
        return status_for(e), None, str(e)


def constants_action(config: RunConfig, digits: int, out: Optional[str] = None) -> Tuple[str, Any, str]:
    try:
        found = constants.all_constants(digits, config.prime_cutoff)
        payload = {"constants": [c.to_dict() for c in found.values()]}
        text = render_json(payload, artifact_header(config, f"constants --digits {digits}"))
        status, content, msg = _emit(config, text, out, "Certified constants")
        return status, {"constants": found, "text": content}, msg
    except LabError as e:
        return status_for(e), None, str(e)


def iterate_action(config: RunConfig, eta: float, n_max: int, out: Optional[str] = None) -> Tuple[str, Any, str]:
    try:
        trace = iteration.iterate_trace(eta, n_max)
        text = render_csv(["n", "value", "closed_form", "n_stop"], trace.rows(),
                          artifact_header(config, f"iterate --eta {eta!r} --nmax {n_max}"))
        status, content, msg = _emit(config, text, out, f"Trace for eta={eta}")
        if trace.truncated:
            msg += f" n_stop not reached within {n_max} steps."
        return status, {"trace": trace, "text": content}, msg
    except LabError as e:
        return status_for(e), None, str(e)


def distribution_action(config: RunConfig, q: int, a: int, y_min: float, y_max: float, samples: int,
                        which: str, height: Optional[float] = None, thresholds: Sequence[float] = (2.0, 5.0, 10.0),
                        out: Optional[str] = None) -> Tuple[str, Any, str]:
    """Samples the series, writes (y, value) CSV, returns moment and Chebyshev reports."""
    try:
        height = height or config.zero_height_default
        library = _library(config)
        series = distribution.sample_series(q, a, y_min, y_max, samples, which, height, library, config.sieve_cap)
        report = distribution.moment_report(series, height, library)
        tails = [distribution.chebyshev_bound(psi, q, a, series) for psi in thresholds]
        command = f"distribution --modulus {q} --residue {a} --which {which}"
        header = artifact_header(config, command)
        series_text = render_csv(["y", "value"], zip(series.y_grid.tolist(), series.values.tolist()), header)
        report_text = render_json({"moments": report.to_dict(), "chebyshev": [t.to_dict() for t in tails]}, header)
        data = {"series": series, "moments": report, "chebyshev": tails, "text": report_text}
        if out:
            base, _ = os.path.splitext(config.artifact_path(out))
            ok, msg = write_text(base + ".csv", series_text)
            if not ok:
                return CommandStatus.ERROR, data, msg
            ok, msg2 = write_text(base + ".json", report_text)
            if not ok:
                return CommandStatus.ERROR, data, msg2
            data["text"] = None
            return CommandStatus.SUCCESS, data, f"{msg} {msg2}"
        return CommandStatus.SUCCESS, data, f"Moments for q={q}, a={a}, {which} over {samples} samples."
    except LabError as e:
        return status_for(e), None, str(e)


def density_action(config: RunConfig, q: int, kappa: float, height: Optional[float] = None) -> Tuple[str, Any, str]:
    try:
        height = height or config.zero_height_default
        result = distribution.one_level_density(q, kappa, height, _library(config))
        return CommandStatus.SUCCESS, result, (
            f"one-level density q={q}, kappa={kappa:g}, T={height:g}: {result.value!r} "
            f"(prediction 1/kappa = {result.prediction!r}, {result.zero_count} zeros)"
        )
    except LabError as e:
        return status_for(e), None, str(e)


def explicit_check_action(config: RunConfig, q: int, x1: float, x2: float, heights: Sequence[float],
                          label: Optional[str] = None, out: Optional[str] = None) -> Tuple[str, Any, str]:
    """Differenced explicit-formula residual per primitive character and height, against the truncation bound."""
    try:
        chars = [character_from_label(label)] if label else primitive_nonprincipal(q)
        library = _library(config)
        table = sieve_table(max(x1, x2), config.sieve_cap)
        rows = []
        failures = []
        non_monotone = []
        for chi in chars:
            residuals = []
            for T in heights:
                residual = explicit_formula.differenced_explicit_check(x1, x2, chi, T, library, table)
                bound = explicit_formula.truncation_bound(x2, chi.modulus, T)
                rows.append([chi.label, float(T), residual, bound])
                residuals.append(residual)
                if residual > bound:
                    failures.append(f"{chi.label} at T={T:g}")
            if any(b >= a_ for a_, b in zip(residuals, residuals[1:])):
                non_monotone.append(chi.label)
        text = render_csv(["label", "T", "residual", "bound"], rows,
                          artifact_header(config, f"explicit-check --modulus {q} --x1 {x1:g} --x2 {x2:g}"))
        status, content, msg = _emit(config, text, out, "Differenced explicit-formula table")
        if non_monotone:
            msg += " Residual not decreasing in T for " + ", ".join(non_monotone) + "."
        if failures:
            return CommandStatus.AUDIT_ERROR, {"rows": rows, "text": content}, (
                "Residual above the truncation bound for " + ", ".join(failures)
            )
        return status, {"rows": rows, "text": content}, msg
    except LabError as e:
        return status_for(e), None, str(e)


def central_sweep_action(config: RunConfig, qmax: int, out: Optional[str] = None) -> Tuple[str, Any, str]:
    try:
        reports = central_sweep(qmax, config.vanishing_threshold, config.escalation_threshold,
                                config.precision_digits, config.workers)
        flagged = [r for r in reports if r.z_chi != 0]
        average = aggregates.z_count_average(qmax, reports) if not flagged else None
        payload = {
            "qmax": qmax,
            "characters": len(reports),
            "z_count_average": average,
            "below_threshold": [r.to_dict() for r in flagged],
            "escalated": [r.label for r in reports if r.status != "nonvanishing"],
        }
        text = render_json(payload, artifact_header(config, f"central-sweep --qmax {qmax}"))
        status, content, msg = _emit(config, text, out, f"Central sweep over {len(reports)} character(s)")
        if flagged:
            return CommandStatus.AUDIT_ERROR, {"reports": reports, "text": content}, (
                f"{len(flagged)} character(s) with a possible central zero: " + ", ".join(r.label for r in flagged)
            )
        return status, {"reports": reports, "text": content}, msg
    except LabError as e:
        return status_for(e), None, str(e)


# --- Help Messages ---
detailed_help_messages = {
    "characters": """Usage: characters --modulus Q [--out FILE]\nLists every Dirichlet character mod Q with order, parity and conductor.""",
    "zeros": """Usage: zeros --modulus Q [--label L] [--height T] [--out FILE]\nLocates critical-line zeros up to height T (cached), audited by the argument principle.""",
    "psi": """Usage: psi --x X --modulus Q [--residue A]\nChebyshev psi(X; Q, A); without --residue, the principal-character sum.""",
    "sweep-s": """Usage: sweep-s --x X --qmin Q1 --qmax Q2 [--points N] [--random K] [--out FILE]\nS(Q;X) directly and as I - II + III, with the main term and residual.""",
    "trend": """Usage: trend --x X [X ...] [--exponent E] [--out FILE]\nS(Q;X)/main term and III/(X log 2) at Q = X^E, with the monotonicity of |ratio - 1|.""",
    "bfi": """Usage: bfi --x X --Q Q [--residue A] [--height T] [--zeros]\nSum of |psi(X;q,A) - psi(X;chi_0)/phi(q)| over Q < q <= 2Q, optionally via zeros.""",
    "constants": """Usage: constants [--digits D] [--out FILE]\nC0, C1, C2, C3 with certified error bounds (JSON).""",
    "iterate": """Usage: iterate --eta E [--nmax N] [--out FILE]\nIterates of the exponent map with closed-form check (CSV).""",
    "distribution": """Usage: distribution --modulus Q [--residue A] --ymin Y0 --ymax Y1 [--samples N] [--which T|Tstar] [--height T] [--out FILE]\nLog-uniform samples of T or T* with moments and Chebyshev exceedances.""",
    "density": """Usage: density --modulus Q --kappa K [--height T]\nOne-level density with the Fejer-type test function, next to 1/K.""",
    "explicit-check": """Usage: explicit-check --modulus Q --x1 X1 --x2 X2 [--height T ...] [--label L] [--out FILE]\nDifferenced explicit formula residuals against the truncation bound.""",
    "central-sweep": """Usage: central-sweep --qmax Q [--out FILE]\n|L(1/2, chi)| for every nonprincipal chi mod q <= Q, with escalation below threshold.""",
    "help": """Usage: help [<command>]\nDisplays help.""",
}


def get_general_help_text() -> str:
    lines = ["\nlfunc-lab - Available Commands", "Type 'help <command>' for more details."]
    cmd_list = sorted(detailed_help_messages.keys())
    max_len = max(len(cmd) for cmd in cmd_list) if cmd_list else 0
    for cmd_name in cmd_list:
        summary = detailed_help_messages[cmd_name].split('\n')[0]
        lines.append(f"  {cmd_name:<{max_len + 2}} {summary.replace('Usage: ', '')}")
    lines.append("\nGlobal options (before the command): --precision --cache --out-dir --workers --seed --prime-cutoff --sieve-cap --grid-step --quiet --debug")
    return "\n".join(lines)


def get_specific_help_text(command_name: str) -> str:
    command_name = command_name.lower()
    if command_name in detailed_help_messages:
        return detailed_help_messages[command_name].strip()
    return f"Unknown command '{command_name}'. Type 'help' for a list."
