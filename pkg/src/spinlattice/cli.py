"""Command line front end.

    spinlattice simulate CONFIG
    spinlattice converge CONFIG --h 2^-4,2^-5,... --ref 2^-12
    spinlattice check-tableau FILE

Exit status is 0 on success, 1 for a solver or verification failure and 2
for usage or parse errors.
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

from spinlattice.errors import SpinLatticeError
from spinlattice.experiment import (
    ConfigError,
    ExperimentConfig,
    save_state,
    simulate,
    converge,
    write_energy_file,
    write_error_file,
)
from spinlattice.tableau import SchemeParseError, check_scheme, load_scheme

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def bundled_scheme(name: str) -> Path:
    """Path of a scheme file shipped with the package, e.g. ``production.scheme``."""
    return Path(str(resources.files("spinlattice") / "schemes" / name))


def parse_step(text: str) -> float:
    """Parse ``0.01``, ``1/64`` or ``2^-6``."""
    text = text.strip()
    if "^" in text:
        base, exp = text.split("^", 1)
        return float(base) ** float(exp)
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def _step_list(text: str) -> list[float]:
    try:
        return [parse_step(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad step list {text!r}") from None


def _step(text: str) -> float:
    try:
        return parse_step(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad step {text!r}") from None


def _output_path(config: ExperimentConfig, config_path: Path) -> Path:
    out = Path(config.output)
    return out if out.is_absolute() else config_path.parent / out


def cmd_simulate(args) -> int:
    config = ExperimentConfig.from_file(args.config)
    out = Path(args.output) if args.output else _output_path(config, Path(args.config))
    result = simulate(config)
    write_energy_file(out, result.records)
    final_path = out.with_suffix(".final.dat")
    save_state(final_path, result.final_state)
    print(f"wrote {out} ({len(result.records)} rows) and {final_path}")
    print(f"max |H(t) - H(0)| = {result.max_energy_deviation:.6e}")
    print(f"max fixed-point iterations = {result.max_iterations}")
    return EXIT_OK


def cmd_converge(args) -> int:
    config = ExperimentConfig.from_file(args.config)
    if args.t_end is not None:
        config = config.replace(t_end=args.t_end)
    out = Path(args.output) if args.output else Path(args.config).parent / "errors.dat"
    result = converge(config, args.h, args.ref)
    write_error_file(out, result)
    for h, e in zip(result.h, result.err):
        print(f"h = {h:.6e}  err = {e:.6e}")
    print(f"wrote {out}")
    print(f"log-log slope = {result.slope:.4f}")
    return EXIT_OK


def cmd_check_tableau(args) -> int:
    path = args.file
    if not Path(path).exists() and Path(bundled_scheme(path)).exists():
        path = bundled_scheme(path)
    scheme = load_scheme(path)
    verdict = check_scheme(scheme)
    for cond, label in (("(i)", "symplecticity of each tableau"), ("(ii)", "b = bhat in pairs"),
                        ("(iii)", "common weights across components")):
        bad = [v for v in verdict.violations if v.condition == cond]
        print(f"condition {cond} {label}: {'FAIL' if bad else 'pass'}")
        for v in bad:
            print(f"    {v}")
    print("symplectic" if verdict.passed else "NOT symplectic")
    return EXIT_OK if verdict.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinlattice", description="Collective symplectic integration of spin-lattice chains."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="energy time series of a chain run")
    p.add_argument("config")
    p.add_argument("-o", "--output", help="energy file (overrides the config's output)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("converge", help="pseudo-error against a finer reference step")
    p.add_argument("config")
    p.add_argument("--h", type=_step_list, required=True, help="comma separated steps, e.g. 2^-4,2^-5")
    p.add_argument("--ref", type=_step, required=True, help="reference step")
    p.add_argument("--t-end", type=float, help="override t_end")
    p.add_argument("-o", "--output", help="error file")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("check-tableau", help="verify symplecticity conditions of a scheme file")
    p.add_argument("file", help="scheme file, or the name of a bundled one")
    p.set_defaults(func=cmd_check_tableau)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, SchemeParseError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SpinLatticeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
