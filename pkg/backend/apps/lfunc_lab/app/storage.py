# lfunc_lab/app/storage.py
import csv
import io
import json
import os
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from mpmath import mp

from . import TOOL_NAME, __version__


def zero_records(q: int, label: str, ordinates: Iterable[Any], prec_digits: int, height_scanned: float) -> List[Dict[str, Any]]:
    """One record per zero plus a closing marker (gamma null) carrying the scanned height."""
    records = [
        {
            "q": q,
            "label": label,
            "gamma": mp.nstr(g, prec_digits + 5, strip_zeros=False),
            "prec_digits": prec_digits,
            "height_scanned": height_scanned,
        }
        for g in ordinates
    ]
    records.append({"q": q, "label": label, "gamma": None, "prec_digits": prec_digits, "height_scanned": height_scanned})
    return records


def _drop_partial_line(filepath: str) -> None:
    """Cuts a final line left without its newline by an interrupted write."""
    with open(filepath, 'r+b') as f:
        data = f.read()
        if not data or data.endswith(b"\n"):
            return
        f.truncate(data.rfind(b"\n") + 1)


def append_zero_records(filepath: str, records: List[Dict[str, Any]]) -> Tuple[bool, str]:
    """Appends JSON-lines records to the zero cache. Returns (success_status, message)."""
    try:
        dir_name = os.path.dirname(filepath)
        if dir_name:
            os.makedirs(dir_name, exist_ok=True)
        payload = "".join(json.dumps(rec, sort_keys=True) + "\n" for rec in records)
        if os.path.exists(filepath):
            _drop_partial_line(filepath)
        with open(filepath, 'a', encoding='utf-8') as f:
            f.write(payload)
        return True, f"Appended {len(records)} record(s) to '{filepath}'."
    except IOError as e:
        return False, f"Error: Could not write to zero cache '{filepath}'. {e}"
    except TypeError as e:
        return False, f"Error: Could not serialize zero records. {e}"


def load_zero_cache(filepath: str) -> Tuple[Optional[Dict[str, Dict[str, Any]]], str]:
    """Reads the zero cache into {label: {"q", "ordinates", "height", "prec_digits"}}.

    Ordinates count only once a closing marker (gamma null) follows them; the
    marker's height_scanned is the height the label is complete to. Records of
    an interrupted append (no marker yet) are dropped, and so is a final line
    cut off before its newline.

    Returns (None, message) on a read or format error, ({}, message) when the file
    does not exist yet.
    """
    if not os.path.exists(filepath):
        return {}, f"Info: Zero cache '{filepath}' not found. Starting with an empty cache."
    entries: Dict[str, Dict[str, Any]] = {}
    pending: Dict[str, List[str]] = {}
    notes = []
    lineno = 0
    try:
        with open(filepath, 'r', encoding='utf-8') as f:
            text = f.read()
        lines = text.split("\n")
        partial = lines.pop() if lines else ""
        for lineno, line in enumerate(lines, start=1):
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            _apply_zero_record(rec, entries, pending)
        if partial.strip():
            lineno = len(lines) + 1
            try:
                _apply_zero_record(json.loads(partial), entries, pending)
            except json.JSONDecodeError:
                notes.append(f"dropped a truncated last line ({len(partial)} chars)")
    except json.JSONDecodeError as e:
        return None, f"Error: Could not decode line {lineno} of '{filepath}'. Invalid format? {e}"
    except (ValueError, KeyError, TypeError) as e:
        return None, f"Error: Invalid zero record in '{filepath}'. {e}"
    except IOError as e:
        return None, f"Error: Could not read zero cache '{filepath}'. {e}"
    dangling = sum(len(v) for v in pending.values())
    if dangling:
        notes.append(f"dropped {dangling} ordinate(s) without a closing marker")
    entries = {label: e for label, e in entries.items() if e["height"] > 0 or e["ordinates"]}
    count = sum(len(e["ordinates"]) for e in entries.values())
    msg = f"Loaded {count} cached zero(s) for {len(entries)} character(s) from '{filepath}'."
    if notes:
        msg += " Warning: " + "; ".join(notes) + "."
    return entries, msg


def _apply_zero_record(rec: Dict[str, Any], entries: Dict[str, Dict[str, Any]],
                       pending: Dict[str, List[str]]) -> None:
    label = rec["label"]
    entry = entries.setdefault(
        label, {"q": int(rec["q"]), "ordinates": [], "height": 0.0, "prec_digits": int(rec["prec_digits"])}
    )
    height = float(rec["height_scanned"])
    if rec["gamma"] is not None:
        pending.setdefault(label, []).append(rec["gamma"])
        return
    for g in pending.pop(label, []):
        if g not in entry["ordinates"]:
            entry["ordinates"].append(g)
    entry["height"] = max(entry["height"], height)
    entry["prec_digits"] = min(entry["prec_digits"], int(rec["prec_digits"]))


def artifact_header(config, command: str) -> Dict[str, str]:
    return {
        "tool": f"{TOOL_NAME} {__version__}",
        "config": config.config_hash(),
        "command": command,
    }


def render_csv(columns: Sequence[str], rows: Iterable[Sequence[Any]], header: Dict[str, str]) -> str:
    buf = io.StringIO()
    for key, value in header.items():
        buf.write(f"# {key}={value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in row])
    return buf.getvalue()


def render_json(payload: Dict[str, Any], header: Dict[str, str]) -> str:
    document = {"header": header}
    document.update(payload)
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"


def write_text(filepath: str, text: str) -> Tuple[bool, str]:
    """Writes an artifact. Returns (success_status, message)."""
    try:
        dir_name = os.path.dirname(filepath)
        if dir_name:
            os.makedirs(dir_name, exist_ok=True)
        with open(filepath, 'w', encoding='utf-8', newline="") as f:
            f.write(text)
        return True, f"Output written to '{filepath}'."
    except IOError as e:
        return False, f"Error: Could not write to file '{filepath}'. {e}"
