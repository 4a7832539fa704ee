"""Command-line front end: test, check, simulate-null, power, eta, validate-k.

Conventions: statistical decisions are data (JSON payload), not exit codes.
Exit 0 means the computation ran; exit 2 flags usage errors (bad flags,
k >= n, unparseable specs); exit 3 flags data errors (non-numeric lines,
support violations). Every error path prints a single line starting with
`error:` to stderr.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from pathlib import Path

import numpy as np
import pandas as pd

from . import __version__
from .conditions import DEFAULT_TOL, MonotoneGrid, classify_alternative, grid_evaluations
from .distributions import parse_spec, transform_sample
from .errors import DataError, UsageError
from .simulation import (
    EtaExperiment,
    SimulationConfig,
    eta_q_experiment,
    records_to_csv,
    simulate_null,
    simulate_power,
    validate_k_schedule,
)
from .tail_statistic import run_test


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # single-line `error:` diagnostics, exit 2
        raise UsageError(message)


def _seed_arg(text: str):
    if text == "auto":
        return "auto"
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer or 'auto', got {text!r}")


def read_sample(path: str, endpoint: float | None = None) -> np.ndarray:
    """Read one real per line; `#` comments ignored, first-line header auto-skipped.

    `-` reads stdin. With `endpoint`, applies y = 1/(x* - x) to the data.
    """
    if path == "-":
        raw = sys.stdin.buffer.read()
    else:
        try:
            raw = Path(path).read_bytes()
        except OSError as exc:
            raise UsageError(f"cannot read input {path!r}: {exc}") from None
    values = _parse_values(raw)
    if values.size == 0:
        raise DataError(f"no numeric data in input {path!r}")
    if endpoint is not None:
        values = transform_sample(values, endpoint)
    return values


def _first_data_line(raw: bytes) -> tuple[bytes | None, int]:
    """First non-blank, non-comment line and its physical line index."""
    pos = 0
    index = 0
    size = len(raw)
    while pos < size:
        nl = raw.find(b"\n", pos)
        end = size if nl < 0 else nl
        stripped = raw[pos:end].strip()
        if stripped and not stripped.startswith(b"#"):
            return stripped, index
        pos = end + 1
        index += 1
    return None, index


def _parse_values(raw: bytes) -> np.ndarray:
    first, first_index = _first_data_line(raw)
    if first is None:
        return np.empty(0)
    skiprows = 0
    try:
        float(first.decode("utf-8", errors="replace"))
    except ValueError:
        skiprows = first_index + 1  # single header line
    try:
        frame = pd.read_csv(
            io.BytesIO(raw),
            header=None,
            comment="#",
            skiprows=skiprows,
            dtype=np.float64,
            float_precision="high",
        )
    except Exception:
        _scan_for_offender(raw, skiprows)
        raise DataError("unparseable numeric data") from None
    if frame.shape[1] != 1:
        raise DataError(f"expected one value per line, found {frame.shape[1]} columns")
    return frame.to_numpy().ravel()


def _scan_for_offender(raw: bytes, skiprows: int) -> None:
    """Slow path after a parse failure: name the first offending line."""
    for lineno, line in enumerate(raw.split(b"\n"), start=1):
        if lineno <= skiprows:
            continue
        stripped = line.strip()
        if not stripped or stripped.startswith(b"#"):
            continue
        text = stripped.decode("utf-8", errors="replace")
        try:
            float(text)
        except ValueError:
            raise DataError(f"non-numeric value {text!r} at line {lineno}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _to_json(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _report_text(payload: dict, fmt: str) -> str:
    if fmt == "csv":
        header = ",".join(payload)
        row = ",".join(
            repr(v) if isinstance(v, float) else str(v) for v in payload.values()
        )
        return f"{header}\n{row}\n"
    return _to_json(payload)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_test(args) -> int:
    f0 = parse_spec(args.f0)
    data = read_sample(args.input, args.endpoint)
    report = run_test(data, f0, args.k, level=args.level, sided=args.sided)
    _emit(_report_text(report.to_dict(), args.format), args.out)
    return 0


def _cmd_check(args) -> int:
    f0 = parse_spec(args.f0)
    f1 = parse_spec(args.f1)
    grid = MonotoneGrid.build(f0, x0=args.x0, m=args.grid_points)
    report = classify_alternative(f0, f1, grid, tol=args.tol)
    if args.grid_dump:
        cols = grid_evaluations(f0, f1, grid, epsilon=args.tol)
        lines = [",".join(cols)]
        for row in zip(*cols.values()):
            lines.append(",".join(repr(float(v)) for v in row))
        Path(args.grid_dump).write_text("\n".join(lines) + "\n")
    _emit(_to_json(report.to_dict()), args.out)
    return 0


def _resolve_seed(args) -> int:
    if args.seed is None:
        raise UsageError("--seed is required (pass --seed auto to pick one)")
    if args.seed == "auto":
        seed = int(np.random.SeedSequence().entropy % (2 ** 63))
        print(f"seed: {seed}", file=sys.stderr)
        return seed
    return args.seed


def _load_config_file(path: str) -> dict:
    try:
        payload = json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON in config {path!r}: {exc}") from None
    if not isinstance(payload, dict):
        raise UsageError(f"config {path!r} must hold a JSON object")
    return payload


_CONFIG_KEYS = {
    "f0": "f0", "f1": "f1", "n": "n", "k": "k", "k_rule": "k_rule",
    "level": "level", "sided": "sided", "reps": "reps", "seed": "seed",
    "workers": "workers",
}


def _cmd_simulate(args, power: bool) -> int:
    merged: dict = {}
    if args.config:
        raw = _load_config_file(args.config)
        unknown = set(raw) - set(_CONFIG_KEYS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        merged.update(raw)
    for key in _CONFIG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val

    for required in ("f0", "n", "reps"):
        if merged.get(required) is None:
            raise UsageError(f"missing required parameter --{required.replace('_', '-')}")
    if merged.get("seed") is None:
        raise UsageError("--seed is required (pass --seed auto to pick one)")
    if merged["seed"] == "auto":
        merged["seed"] = int(np.random.SeedSequence().entropy % (2 ** 63))
        print(f"seed: {merged['seed']}", file=sys.stderr)

    config = SimulationConfig(
        f0=parse_spec(merged["f0"]),
        f1=parse_spec(merged["f1"]) if merged.get("f1") else None,
        n=int(merged["n"]),
        reps=int(merged["reps"]),
        master_seed=int(merged["seed"]),
        k=int(merged["k"]) if merged.get("k") is not None else None,
        k_rule=merged.get("k_rule"),
        level=float(merged.get("level", 0.05)),
        sided=merged.get("sided", "two"),
        workers=int(merged.get("workers", 1)),
    )
    result = simulate_power(config) if power else simulate_null(config)
    sys.stdout.write(_to_json(result.to_dict()))
    if args.out:
        if args.format == "csv":
            Path(args.out).write_text(records_to_csv(result.records))
        else:
            Path(args.out).write_text(_to_json(result.to_dict()))
    return 0


def _cmd_eta(args) -> int:
    experiment = EtaExperiment(
        f=parse_spec(args.f0),
        g=parse_spec(args.f1),
        q=args.q,
        reps=args.reps,
        seed=args.seed if isinstance(args.seed, int) else 0,
    )
    result = eta_q_experiment(experiment)
    _emit(_to_json(result.to_dict()), args.out)
    return 0


def _cmd_validate_k(args) -> int:
    n_grid = None
    if args.n_grid:
        try:
            n_grid = [int(float(tok)) for tok in args.n_grid.split(",") if tok.strip()]
        except ValueError:
            raise UsageError(f"cannot parse --n-grid {args.n_grid!r}") from None
    report = validate_k_schedule(
        args.rule, args.alpha, n_grid=n_grid, growth_threshold=args.growth_threshold
    )
    _emit(_to_json(report.to_dict()), args.out)
    return 0


# ---------------------------------------------------------------------------
# parser assembly
# ---------------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="tailtest", description=__doc__)
    parser.add_argument("--version", action="version", version=f"tailtest {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_out(p):
        p.add_argument("--out", help="write the report to this path instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p_test = sub.add_parser("test", help="tail goodness-of-fit test on a sample")
    p_test.add_argument("--f0", required=True, help="hypothesized law, e.g. exp:1")
    p_test.add_argument("--k", required=True, type=int, help="number of upper order statistics")
    p_test.add_argument("--level", type=float, default=0.05)
    p_test.add_argument("--sided", choices=("two", "upper", "lower"), default="two")
    p_test.add_argument("--input", default="-", help="data file (one real per line) or -")
    p_test.add_argument("--endpoint", type=float, default=None,
                        help="finite right endpoint x*; applies y=1/(x*-x) to the data")
    add_out(p_test)

    p_check = sub.add_parser("check", help="tail-ordering condition checks for (f0, f1)")
    p_check.add_argument("--f0", required=True)
    p_check.add_argument("--f1", required=True)
    p_check.add_argument("--x0", type=float, default=None, help="grid start (default: 0.9 quantile of f0)")
    p_check.add_argument("--grid-points", type=int, default=512)
    p_check.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p_check.add_argument("--grid-dump", help="write per-point grid evaluations as CSV")
    p_check.add_argument("--out")
    p_check.set_defaults(format="json")

    def add_sim_flags(p, with_f1: bool):
        p.add_argument("--f0", help="hypothesized law")
        if with_f1:
            p.add_argument("--f1", help="sampling law")
        p.add_argument("--n", type=int)
        p.add_argument("--k", type=int)
        p.add_argument("--k-rule", dest="k_rule", help='k_n rule, e.g. "n^0.6"')
        p.add_argument("--level", type=float, default=None)
        p.add_argument("--sided", choices=("two", "upper", "lower"), default=None)
        p.add_argument("--reps", type=int)
        p.add_argument("--seed", type=_seed_arg, default=None, help="integer or 'auto'")
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--config", help="JSON config file; explicit flags override it")
        add_out(p)

    p_null = sub.add_parser("simulate-null", help="null-calibration Monte Carlo")
    add_sim_flags(p_null, with_f1=False)
    p_power = sub.add_parser("power", help="power Monte Carlo against an alternative")
    add_sim_flags(p_power, with_f1=True)

    p_eta = sub.add_parser("eta", help="threshold-exceedance dominance experiment")
    p_eta.add_argument("--f0", required=True, help="reference law (plays F)")
    p_eta.add_argument("--f1", required=True, help="sampling law (plays G)")
    p_eta.add_argument("--q", required=True, type=float, help="threshold")
    p_eta.add_argument("--reps", required=True, type=int)
    p_eta.add_argument("--seed", type=_seed_arg, default=0)
    add_out(p_eta)

    p_vk = sub.add_parser("validate-k", help="finite-n checks of a k_n schedule")
    p_vk.add_argument("--rule", required=True, help='e.g. "n^0.6" or "ln(n)^2"')
    p_vk.add_argument("--alpha", required=True, type=float)
    p_vk.add_argument("--n-grid", dest="n_grid", help="comma-separated n values")
    p_vk.add_argument("--growth-threshold", type=float, default=1.0)
    add_out(p_vk)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "test":
            return _cmd_test(args)
        if args.command == "check":
            return _cmd_check(args)
        if args.command == "simulate-null":
            return _cmd_simulate(args, power=False)
        if args.command == "power":
            return _cmd_simulate(args, power=True)
        if args.command == "eta":
            return _cmd_eta(args)
        if args.command == "validate-k":
            return _cmd_validate_k(args)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
