# lfunc_lab/app/cli.py
import argparse
import sys
from typing import Optional

from .commands_core import (
    bfi_action, central_sweep_action, characters_action, constants_action, density_action,
    distribution_action, explicit_check_action, iterate_action, psi_action, sweep_action, trend_action, zeros_action,
    get_general_help_text, get_specific_help_text, CommandStatus,
)
from .config import RunConfig
from .display_utils import format_table, formatted_print, set_verbosity
from .errors import LabError


def build_config(args) -> RunConfig:
    """Defaults, then environment overrides, then global command-line flags."""
    config = RunConfig().apply_environment()
    if args.precision is not None:
        config.precision_digits = args.precision
    if args.cache is not None:
        config.cache_path = args.cache
    if args.out_dir is not None:
        config.output_path = args.out_dir
    if args.workers is not None:
        config.workers = args.workers
    if args.seed is not None:
        config.seed = args.seed
    if args.prime_cutoff is not None:
        config.prime_cutoff = args.prime_cutoff
    if args.sieve_cap is not None:
        config.sieve_cap = args.sieve_cap
    if args.grid_step is not None:
        config.zero_grid_step = args.grid_step
    return config.validate()


def _finish(status: str, msg: str, text: Optional[str] = None) -> None:
    """Prints the artifact (if any) and the status message, exiting nonzero on failure."""
    if text:
        sys.stdout.write(text)
    if status == CommandStatus.SUCCESS:
        formatted_print(msg, level="SUCCESS")
        return
    formatted_print(msg, level="ERROR")
    sys.exit(CommandStatus.exit_code(status))


def _text(data) -> Optional[str]:
    return data.get("text") if isinstance(data, dict) else None


def handle_characters(args, config: RunConfig):
    status, data, msg = characters_action(config, args.modulus, args.out)
    _finish(status, msg, _text(data))


def handle_zeros(args, config: RunConfig):
    status, data, msg = zeros_action(config, args.modulus, args.label, args.height, args.out)
    _finish(status, msg, _text(data))


def handle_psi(args, config: RunConfig):
    status, value, msg = psi_action(config, args.x, args.modulus, args.residue)
    if status == CommandStatus.SUCCESS:
        formatted_print(msg, level="RESULT")
        return
    _finish(status, msg)


def handle_sweep(args, config: RunConfig):
    status, data, msg = sweep_action(config, args.x, args.qmin, args.qmax, args.points, args.random, args.out)
    _finish(status, msg, _text(data))


def handle_trend(args, config: RunConfig):
    status, data, msg = trend_action(config, args.x, args.exponent, args.out)
    _finish(status, msg, _text(data))


def handle_bfi(args, config: RunConfig):
    status, data, msg = bfi_action(config, args.x, args.Q, args.residue, args.height, args.zeros)
    if status == CommandStatus.SUCCESS:
        formatted_print(msg, level="RESULT")
        return
    _finish(status, msg)


def handle_constants(args, config: RunConfig):
    status, data, msg = constants_action(config, args.digits, args.out)
    if status == CommandStatus.SUCCESS and data and data["text"] is None:
        rows = [[c.name, c.value, c.error_bound] for c in data["constants"].values()]
        formatted_print(format_table(["name", "value", "error_bound"], rows, float_digits=12), level="NONE", use_prefix=False)
    _finish(status, msg, _text(data))


def handle_iterate(args, config: RunConfig):
    status, data, msg = iterate_action(config, args.eta, args.nmax, args.out)
    _finish(status, msg, _text(data))


def handle_distribution(args, config: RunConfig):
    status, data, msg = distribution_action(
        config, args.modulus, args.residue, args.ymin, args.ymax, args.samples, args.which, args.height,
        out=args.out,
    )
    if status == CommandStatus.SUCCESS and data:
        report = data["moments"]
        formatted_print(f"mean {report.empirical_mean!r} (theory {report.theoretical_mean!r})", level="DETAIL", use_prefix=True)
        formatted_print(f"variance {report.empirical_variance!r} (theory {report.theoretical_variance!r})", level="DETAIL")
        for flag in report.flags:
            formatted_print(f"flag: {flag}", level="WARNING")
    _finish(status, msg, _text(data))


def handle_density(args, config: RunConfig):
    status, result, msg = density_action(config, args.modulus, args.kappa, args.height)
    if status == CommandStatus.SUCCESS:
        formatted_print(msg, level="RESULT")
        return
    _finish(status, msg)


def handle_explicit_check(args, config: RunConfig):
    heights = args.height or [50.0, 100.0, 200.0]
    status, data, msg = explicit_check_action(config, args.modulus, args.x1, args.x2, heights, args.label, args.out)
    _finish(status, msg, _text(data))


def handle_central_sweep(args, config: RunConfig):
    status, data, msg = central_sweep_action(config, args.qmax, args.out)
    _finish(status, msg, _text(data))


def handle_help(args, config: Optional[RunConfig] = None):
    if args.command_name:  # Specific command help
        command_name_val = args.command_name[0] if isinstance(args.command_name, list) else args.command_name
        help_text = get_specific_help_text(command_name_val)
        if "Unknown command" in help_text:
            formatted_print(help_text, level="ERROR")
            return

        lines = help_text.strip().split('\n')
        for line_content in lines:
            if line_content.lower().startswith("usage:"):
                formatted_print(line_content[len("Usage: "):], level="USAGE", use_prefix=True)
            else:
                formatted_print(line_content, level="NONE", use_prefix=False, indent=1)
    else:  # General help
        help_string = get_general_help_text()
        lines = help_string.strip().split('\n')
        if not lines:
            return

        formatted_print(lines[0], level="HEADER", use_prefix=False)
        if len(lines) > 1:
            formatted_print(lines[1], level="INFO", use_prefix=False, indent=1)

        command_lines_started = False
        for line_content in lines[2:]:
            stripped_line = line_content.strip()
            if stripped_line and line_content.startswith("  "):
                command_lines_started = True
                formatted_print(line_content, level="COMMAND_NAME", use_prefix=False)
            elif command_lines_started and not stripped_line:
                formatted_print("", level="NONE", use_prefix=False)
            elif stripped_line:
                formatted_print(stripped_line, level="INFO", use_prefix=False, indent=1)
        formatted_print("\nUse 'python main.py <command> --help' for detailed command-specific options via argparse.", level="INFO", indent=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="lfunc-lab (one-shot)", add_help=False)
    parser.add_argument("--precision", type=int, help="Significant digits on the L-function path (>= 30).")
    parser.add_argument("--cache", help="Zero cache file (JSON lines).")
    parser.add_argument("--out-dir", dest="out_dir", help="Directory for relative --out paths (default: data).")
    parser.add_argument("--workers", type=int, help="Worker processes for zero scans and sweeps.")
    parser.add_argument("--seed", type=int, help="Seed for randomized sweeps.")
    parser.add_argument("--prime-cutoff", dest="prime_cutoff", type=int, help="Starting prime cutoff for constants.")
    parser.add_argument("--sieve-cap", dest="sieve_cap", type=int, help="Largest x the sieve may reach.")
    parser.add_argument("--grid-step", dest="grid_step", type=float, help="Zero-scan grid step.")
    parser.add_argument("--quiet", action="store_true", help="Only results, warnings and errors.")
    parser.add_argument("--debug", action="store_true", help="Show debug messages.")

    subparsers = parser.add_subparsers(dest="command", title="Available commands")
    subparsers.required = True

    def summary(name: str) -> str:
        return get_specific_help_text(name).split("\n")[-1]

    # Characters
    p = subparsers.add_parser("characters", help=summary("characters"))
    p.add_argument("--modulus", type=int, required=True)
    p.add_argument("--out", help="Write the CSV here instead of stdout.")
    p.set_defaults(func=handle_characters)

    # Zeros
    p = subparsers.add_parser("zeros", help=summary("zeros"))
    p.add_argument("--modulus", type=int, required=True)
    p.add_argument("--label", help="Character label 'q:k1,k2,...' (default: all primitive characters).")
    p.add_argument("--height", type=float)
    p.add_argument("--out")
    p.set_defaults(func=handle_zeros)

    # Psi
    p = subparsers.add_parser("psi", help=summary("psi"))
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--modulus", type=int, required=True)
    p.add_argument("--residue", type=int, help="Residue class; omit for the principal-character sum.")
    p.set_defaults(func=handle_psi)

    # Sweep
    p = subparsers.add_parser("sweep-s", help=summary("sweep-s"))
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--qmin", type=float, required=True)
    p.add_argument("--qmax", type=float, required=True)
    p.add_argument("--points", type=int, default=8)
    p.add_argument("--random", type=int, default=0, help="Extra seeded random (Q, x) pairs with x <= X.")
    p.add_argument("--out")
    p.set_defaults(func=handle_sweep)

    # Trend
    p = subparsers.add_parser("trend", help=summary("trend"))
    p.add_argument("--x", type=float, nargs="+", required=True)
    p.add_argument("--exponent", type=float, default=0.8)
    p.add_argument("--out")
    p.set_defaults(func=handle_trend)

    # BFI
    p = subparsers.add_parser("bfi", help=summary("bfi"))
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--Q", type=float, required=True)
    p.add_argument("--residue", type=int, default=1)
    p.add_argument("--height", type=float)
    p.add_argument("--zeros", action="store_true", help="Also evaluate the non-real zero route.")
    p.set_defaults(func=handle_bfi)

    # Constants
    p = subparsers.add_parser("constants", help=summary("constants"))
    p.add_argument("--digits", type=int, default=8)
    p.add_argument("--out")
    p.set_defaults(func=handle_constants)

    # Iterate
    p = subparsers.add_parser("iterate", help=summary("iterate"))
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--nmax", type=int, default=50)
    p.add_argument("--out")
    p.set_defaults(func=handle_iterate)

    # Distribution
    p = subparsers.add_parser("distribution", help=summary("distribution"))
    p.add_argument("--modulus", type=int, required=True)
    p.add_argument("--residue", type=int, default=1)
    p.add_argument("--ymin", type=float, required=True)
    p.add_argument("--ymax", type=float, required=True)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--which", choices=["T", "Tstar"], default="T")
    p.add_argument("--height", type=float)
    p.add_argument("--out", help="Base path; writes <base>.csv (series) and <base>.json (moments).")
    p.set_defaults(func=handle_distribution)

    # Density
    p = subparsers.add_parser("density", help=summary("density"))
    p.add_argument("--modulus", type=int, required=True)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--height", type=float)
    p.set_defaults(func=handle_density)

    # Explicit check
    p = subparsers.add_parser("explicit-check", help=summary("explicit-check"))
    p.add_argument("--modulus", type=int, required=True)
    p.add_argument("--x1", type=float, required=True)
    p.add_argument("--x2", type=float, required=True)
    p.add_argument("--height", type=float, nargs="+")
    p.add_argument("--label")
    p.add_argument("--out")
    p.set_defaults(func=handle_explicit_check)

    # Central sweep
    p = subparsers.add_parser("central-sweep", help=summary("central-sweep"))
    p.add_argument("--qmax", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=handle_central_sweep)

    # Help
    p_help = subparsers.add_parser("help", help="Show help.", add_help=False)
    p_help.add_argument('command_name', nargs='*', help="Command to get help for.")
    p_help.set_defaults(func=handle_help)
    return parser


def main_cli(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    if not argv:  # Just 'python main.py'
        formatted_print(get_general_help_text(), level="NONE", use_prefix=False)
        sys.exit(0)

    parser = build_parser()
    if argv == ['--help']:
        formatted_print(get_general_help_text(), level="NONE", use_prefix=False)
        parser.print_help()
        sys.exit(0)

    parsed_args = parser.parse_args(argv)
    set_verbosity("debug" if parsed_args.debug else "quiet" if parsed_args.quiet else "normal")
    try:
        config = build_config(parsed_args)
    except LabError as e:
        formatted_print(str(e), level="ERROR")
        sys.exit(e.exit_code)
    parsed_args.func(parsed_args, config)
