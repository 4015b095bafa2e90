# lfunc_lab/app/display_utils.py
import sys
import os
from typing import Iterable, Sequence

try:
    import colorama
    colorama.init()  # wraps stdout/stderr on Windows
except ImportError:
    colorama = None

class Colors:
    HEADER = '\033[95m'
    OKBLUE = '\033[94m'
    OKCYAN = '\033[96m'
    OKGREEN = '\033[92m'
    WARNING = '\033[93m'
    FAIL = '\033[91m'
    ENDC = '\033[0m'
    BOLD = '\033[1m'

if colorama:
    USE_COLORS = True
else:
    USE_COLORS = (os.name != 'nt') or ('WT_SESSION' in os.environ) or ('TERM' in os.environ and 'xterm' in os.environ['TERM'])

# quiet: only results, warnings and errors; debug: everything
VERBOSITY_LEVELS = ("quiet", "normal", "debug")
_verbosity = "normal"

_QUIET_SUPPRESSED = {"INFO", "SUCCESS", "DETAIL", "DEBUG"}


def set_verbosity(level: str) -> None:
    global _verbosity
    if level not in VERBOSITY_LEVELS:
        raise ValueError(f"Unknown verbosity '{level}'. Choose from {', '.join(VERBOSITY_LEVELS)}.")
    _verbosity = level


def get_verbosity() -> str:
    return _verbosity


def formatted_print(message: str, level: str = "INFO", indent: int = 0, use_prefix: bool = True):
    """
    Prints a formatted message with optional indentation, prefix, and color.
    Levels: INFO, SUCCESS, WARNING, ERROR, DEBUG, RESULT, DETAIL, NONE, USAGE, HEADER, COMMAND_NAME
    """
    level = level.upper()
    if level == "DEBUG" and _verbosity != "debug":
        return
    if _verbosity == "quiet" and level in _QUIET_SUPPRESSED:
        return

    prefix_map = {
        "INFO": "[INFO] ",
        "SUCCESS": "[SUCCESS] ",
        "WARNING": "[WARNING] ",
        "ERROR": "[ERROR] ",
        "DEBUG": "[DEBUG] ",
        "RESULT": "[RESULT] ",
        "DETAIL": "  -> ",
        "NONE": "",
        "USAGE": "Usage: ",
        "HEADER": "",
        "COMMAND_NAME": ""
    }

    color_map = {
        "INFO": Colors.OKBLUE,
        "SUCCESS": Colors.OKGREEN,
        "WARNING": Colors.WARNING,
        "ERROR": Colors.FAIL,
        "DEBUG": Colors.OKCYAN,
        "RESULT": Colors.OKCYAN,
        "DETAIL": Colors.OKBLUE,
        "NONE": "",
        "USAGE": Colors.OKCYAN,
        "HEADER": Colors.HEADER + Colors.BOLD,
        "COMMAND_NAME": Colors.OKGREEN
    }

    prefix_str = prefix_map.get(level, "[INFO] ") if use_prefix else ""
    indent_str = "  " * indent

    output_message = f"{indent_str}{prefix_str}{message}"

    stream = sys.stderr if level in ("ERROR", "WARNING") else sys.stdout

    if USE_COLORS and stream.isatty():
        color_code = color_map.get(level, "")
        if prefix_str:
            output_message = f"{indent_str}{color_code}{prefix_str}{Colors.ENDC}{message}"
        elif color_code:
            output_message = f"{indent_str}{color_code}{message}{Colors.ENDC}"

    print(output_message, file=stream)


def format_table(columns: Sequence[str], rows: Iterable[Sequence], float_digits: int = 10) -> str:
    """Renders rows as an aligned plain-text table for terminal summaries."""
    def cell(value) -> str:
        if isinstance(value, float):
            return f"{value:.{float_digits}g}"
        return "" if value is None else str(value)

    body = [[cell(v) for v in row] for row in rows]
    widths = [len(c) for c in columns]
    for row in body:
        for i, text in enumerate(row):
            widths[i] = max(widths[i], len(text))
    lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for row in body:
        lines.append("  ".join(t.rjust(w) for t, w in zip(row, widths)))
    return "\n".join(lines)
