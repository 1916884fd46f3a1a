"""Command-line front end: ``fracdisk {solve,apply,verify,report}``.

Settings come from flags, optionally seeded by a flat ``key = value`` file
given with ``--config`` (keys match the long flag names, dashes or
underscores).  Flags win over the file.

Exit codes: 0 success, 1 failed verification, 2 usage or input error,
3 resolution or truncation error.
"""

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .basis import BasisIndex, CoefficientField, eval_expansion, format_coefficients, read_coefficients
from .errors import ResolutionError, TruncationError
from .operators import OperatorParams, apply_forward
from .regularity import decay_rhs, regularity_gain_report
from .spectral_solver import solve
from .verify import SUITES, checks_to_csv, run_suite

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_RESOLUTION = 0, 1, 2, 3

DEFAULTS = {
    "alpha": 1.0,
    "k1": 1.0,
    "k2": 1.0,
    "max_chain": 30,
    "grid": "64x128",
    "suite": "all",
    "seed": 0,
}
_TYPES = {"alpha": float, "k1": float, "k2": float, "max_chain": int, "seed": int,
          "grid": str, "suite": str, "rhs": str, "input": str, "out": str}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    alpha: float
    k1: float
    k2: float
    max_chain: int
    grid: tuple
    suite: str
    seed: int
    rhs: str = None
    input: str = None
    out: str = None

    @property
    def params(self):
        return OperatorParams(self.alpha, self.k1, self.k2)


def read_config_file(path):
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    values = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _TYPES:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def parse_grid(text):
    try:
        nr, nphi = (int(s) for s in text.lower().split("x"))
    except ValueError:
        raise UsageError(f"grid must look like NRxNPHI, got {text!r}") from None
    if nr < 1 or nphi < 1:
        raise UsageError("grid sizes must be positive")
    return nr, nphi


def build_config(args):
    merged = dict(DEFAULTS)
    if args.config:
        merged.update(read_config_file(args.config))
    for key in _TYPES:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    try:
        typed = {k: (_TYPES[k](v) if v is not None else None) for k, v in merged.items()}
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    typed["grid"] = parse_grid(typed["grid"])
    if typed["max_chain"] < 1:
        raise UsageError("max-chain must be at least 1")
    if typed["suite"] != "all" and typed["suite"] not in SUITES:
        raise UsageError(f"unknown suite {typed['suite']!r}")
    config = RunConfig(**typed)
    try:
        config.params
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return config


def _split(spec, count, what):
    parts = spec.split(",")
    if len(parts) != count:
        raise UsageError(f"{what} needs {count} comma-separated values, got {spec!r}")
    return parts


def load_field(spec, config):
    """Built-in right-hand side name or coefficient file, in the alpha/2 family."""
    a = config.alpha / 2.0
    if spec is None:
        raise UsageError("no right-hand side given (use --rhs)")
    if spec == "constant":
        return CoefficientField({(0, 0, 1): 1.0}, a)
    if spec.startswith("basis:"):
        l, n, mu = _split(spec[6:], 3, "basis:")
        try:
            idx = BasisIndex(int(l), int(n), int(mu))  # "+1" parses as 1
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        return CoefficientField({idx: 1.0}, a)
    if spec.startswith("decay:"):
        try:
            p, q = (float(s) for s in _split(spec[6:], 2, "decay:"))
        except ValueError as exc:
            raise UsageError(f"bad decay exponents in {spec!r}: {exc}") from None
        return decay_rhs(p, q, config.alpha, config.max_chain)
    try:
        field = read_coefficients(spec, beta=a)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read coefficients from {spec}: {exc}") from None
    if abs(field.beta - a) > 1e-14:
        raise UsageError(f"{spec} holds beta={field.beta}, expected alpha/2 = {a}")
    return field


def polar_grid(nr, nphi):
    """Cell-centred radii (r < 1) times uniform angles, flattened radius-major."""
    r = (np.arange(nr) + 0.5) / nr
    r = r[r < 1.0 - 1e-9]
    phi = 2.0 * math.pi * np.arange(nphi) / nphi
    rr, pp = np.meshgrid(r, phi, indexing="ij")
    return (rr * np.cos(pp)).ravel(), (rr * np.sin(pp)).ravel()


def format_field(x, y, values, name):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "y", name])
    for row in zip(x, y, values):
        writer.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def _out_dir(config):
    if config.out is None:
        raise UsageError("an output directory is required (use --out)")
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def cmd_solve(config, stdout):
    f = load_field(config.rhs, config)
    out = _out_dir(config)
    u = solve(f, config.params, config.max_chain)
    residual = apply_forward(u, config.params).max_abs_diff(f)
    x, y = polar_grid(*config.grid)
    values = eval_expansion(u, x, y, weighted=True)
    _write(out / "solution.csv", format_coefficients(u))
    _write(out / "field.csv", format_field(x, y, np.atleast_1d(values), "u_tilde"))
    print(f"residual {residual!r}", file=stdout)
    return EXIT_OK


def cmd_apply(config, stdout):
    u = load_field(config.input or config.rhs, config)
    out = _out_dir(config)
    _write(out / "forward.csv", format_coefficients(apply_forward(u, config.params)))
    return EXIT_OK


def cmd_verify(config, stdout):
    checks = run_suite(config.suite, config.params, seed=config.seed)
    text = checks_to_csv(checks)
    if config.out is not None:
        _write(_out_dir(config) / "verify.csv", text)
    stdout.write(text)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_VERIFY


def cmd_report(config, stdout):
    if not (config.rhs or "").startswith("decay:"):
        raise UsageError("report needs a decay right-hand side, e.g. --rhs decay:3,3")
    f = load_field(config.rhs, config)
    u = solve(f, config.params, config.max_chain)
    text = regularity_gain_report(f, u, config.alpha).to_csv()
    if config.out is not None:
        _write(_out_dir(config) / "report.csv", text)
    stdout.write(text)
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "apply": cmd_apply, "verify": cmd_verify, "report": cmd_report}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value settings file")
    common.add_argument("--alpha", type=float, help="operator order, 0 < alpha < 2 (default 1)")
    common.add_argument("--k1", type=float, help="x conductivity (default 1)")
    common.add_argument("--k2", type=float, help="y conductivity (default 1)")
    common.add_argument("--max-chain", dest="max_chain", type=int, help="largest chain size solved (default 30)")
    common.add_argument("--rhs", help="constant | basis:l,n,mu | decay:p,q | coefficient CSV")
    common.add_argument("--input", help="coefficient CSV for apply (defaults to --rhs)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--grid", help="polar sampling grid NRxNPHI (default 64x128)")
    common.add_argument("--suite", choices=sorted(SUITES) + ["all"], help="verification suite (default all)")
    common.add_argument("--seed", type=int, help="seed for randomized checks (default 0)")
    parser = argparse.ArgumentParser(prog="fracdisk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="solve for u and sample the weighted field")
    sub.add_parser("apply", parents=[common], help="apply the forward operator to coefficients")
    sub.add_parser("verify", parents=[common], help="run property suites against the oracles")
    sub.add_parser("report", parents=[common], help="regularity report for a decay right-hand side")
    return parser


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        config = build_config(args)
        return COMMANDS[args.command](config, stdout)
    except UsageError as exc:
        print(f"fracdisk: error: {exc}", file=stderr)
        return EXIT_USAGE
    except (ResolutionError, TruncationError) as exc:
        print(f"fracdisk: resolution error: {exc}", file=stderr)
        return EXIT_RESOLUTION
    except OSError as exc:
        print(f"fracdisk: error: {exc}", file=stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
