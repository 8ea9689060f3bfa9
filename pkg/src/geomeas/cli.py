"""
Command line front-end.

    geomeas compute INPUT   [--policy P] [--format json|csv|table] [--out PATH]
    geomeas sweep FAMILY    [--param NAME=SPEC ...] [--samples N] [--seed S] [--jobs J] ...
    geomeas check INPUT     [--format ...] [--out PATH]

``INPUT`` is a path to a state file ``{"amps": [[re, im] x 8]}`` or a family
literal: ``W``, ``GHZ``, ``Wtilde``, ``wtype(a,b,c)``, ``symmetric(a,b,c,d)`` or
``ww(theta)``. A sweep ``SPEC`` is a single value (``b=1``) or an inclusive
range ``start:stop:steps`` (``theta=0:pi/2:5``); values may use ``pi`` and
basic arithmetic.

JSON layouts, published as JSON Schema files in ``geomeas/schemas``:

* ``state.schema.json``: input state files.
* ``measure_result.schema.json``: ``compute`` output. Keys ``lambda_sq``,
  ``e_g``, ``method``, ``degenerate``, ``family_param`` (``null`` or
  ``{qubits, axis, azimuth_range, samples}``), ``nearest`` (a list of
  ``{q1, q2, q3, bloch}`` with spinors as ``[re, im]`` pairs) and ``flags``.
* ``sweep.schema.json``: ``sweep --format json``. Keys ``family``,
  ``policy``, ``columns`` and ``rows``.
* ``check_report.schema.json``: ``check`` output. Keys ``values``,
  ``deltas``, ``tolerance`` and ``pass``.

Exit codes: 0 ok, 2 bad input, 3 invalid state, 4 failed cross-check.
"""

from __future__ import annotations

import argparse
import ast
import csv
import io
import itertools
import json
import math
import operator
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .nearest import MeasureResult, detect_family, measure
from .oracle import DEFAULT_SEED, OracleConfig
from .states import (
    NotNormalizedError,
    NullStateError,
    PureState3,
    normalize,
    state_from_json,
    symmetric_state,
    wtype_state,
    ww_state,
)

EXIT_OK, EXIT_INPUT, EXIT_STATE, EXIT_CHECK = 0, 2, 3, 4
CHECK_TOL = 1e-6

FAMILY_PARAMS = {
    "wtype": ("a", "b", "c"),
    "symmetric": ("a", "b", "c", "d"),
    "ww": ("theta",),
}
DEFAULT_GRID = {
    "wtype": {"a": "1", "b": "1", "c": "0:2:41"},
    "symmetric": {"a": "1", "b": "0:1:11", "c": "0", "d": "0"},
    "ww": {"theta": "0:pi/2:50"},
}
# sampling bounds used by --samples for parameters left unspecified
DEFAULT_BOUNDS = {
    "wtype": (0.0, 1.0),
    "symmetric": (-1.0, 1.0),
    "ww": (0.0, math.pi / 2),
}
POLICY_NAMES = {"auto": "auto", "analytic": "analytic_only", "stationary": "stationary", "oracle": "oracle"}


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def fmt(x) -> str:
    """Shortest round-trip float text (at most 17 significant digits)."""
    return repr(float(x))


# ---------------------------------------------------------------- parsing

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def parse_number(text: str) -> float:
    """Evaluate a float literal that may use ``pi`` with ``+ - * /``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError(f"unsupported expression {text!r}")

    try:
        value = ev(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ZeroDivisionError) as exc:
        raise ValueError(f"bad number {text!r}") from exc
    if not math.isfinite(value):
        raise ValueError(f"non-finite number {text!r}")
    return value


def _read_state(source: str, strict: bool) -> PureState3:
    from .states import parse_state_literal
    import os

    try:
        if os.path.isfile(source):
            with open(source, encoding="utf-8") as fh:
                raw = state_from_json(fh.read())
            if strict:
                if not raw.is_normalized():
                    raise NotNormalizedError(f"state in {source} is not normalized")
                return raw
            return normalize(raw)
        return parse_state_literal(source, strict=strict)
    except (NullStateError, NotNormalizedError) as exc:
        raise CliError(str(exc), EXIT_STATE) from exc
    except (ValueError, OSError) as exc:
        raise CliError(f"cannot read state {source!r}: {exc}", EXIT_INPUT) from exc


@dataclass
class SweepSpec:
    family: str
    ranges: dict[str, tuple[float, float, int] | float] = field(default_factory=dict)
    policy: str = "auto"
    fmt: str = "csv"
    samples: int | None = None
    seed: int = DEFAULT_SEED
    jobs: int = 1

    def __post_init__(self):
        if self.family not in FAMILY_PARAMS:
            raise CliError(f"unknown family {self.family!r}; expected one of {sorted(FAMILY_PARAMS)}", EXIT_INPUT)
        for name, spec in self.ranges.items():
            if name not in FAMILY_PARAMS[self.family]:
                raise CliError(f"{self.family} has no parameter {name!r}", EXIT_INPUT)
            if isinstance(spec, tuple):
                start, stop, steps = spec
                if steps < 2:
                    raise CliError(f"{name}: steps must be >= 2", EXIT_INPUT)
                lo, hi = min(start, stop), max(start, stop)
            else:
                lo = hi = spec
            if self.family == "wtype" and lo < 0:
                raise CliError(f"{name}: W-type coefficients must be non-negative", EXIT_INPUT)
        if self.samples is not None and self.samples < 1:
            raise CliError("--samples must be >= 1", EXIT_INPUT)
        if self.jobs < 1:
            raise CliError("--jobs must be >= 1", EXIT_INPUT)

    def points(self) -> list[tuple[float, ...]]:
        """Raw (unnormalized) parameter tuples in a fixed order."""
        names = FAMILY_PARAMS[self.family]
        if self.samples is None:
            axes = []
            for name in names:
                spec = self.ranges.get(name)
                if spec is None:
                    spec = _parse_param_spec(DEFAULT_GRID[self.family][name])
                if isinstance(spec, tuple):
                    axes.append(np.linspace(spec[0], spec[1], spec[2]).tolist())
                else:
                    axes.append([spec])
            return [tuple(p) for p in itertools.product(*axes)]
        rng = np.random.default_rng(self.seed)
        lo_d, hi_d = DEFAULT_BOUNDS[self.family]
        cols = []
        for name in names:
            spec = self.ranges.get(name)
            if spec is None:
                cols.append(rng.uniform(lo_d, hi_d, self.samples))
            elif isinstance(spec, tuple):
                cols.append(rng.uniform(spec[0], spec[1], self.samples))
            else:
                cols.append(np.full(self.samples, spec))
        return [tuple(float(v) for v in row) for row in zip(*cols)]


def _parse_param_spec(text: str):
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return parse_number(parts[0])
        if len(parts) == 3:
            steps = parts[2].strip()
            if not steps.lstrip("-").isdigit():
                raise ValueError(f"steps must be an integer, got {steps!r}")
            return parse_number(parts[0]), parse_number(parts[1]), int(steps)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_INPUT) from exc
    raise CliError(f"bad parameter spec {text!r}; use VALUE or START:STOP:STEPS", EXIT_INPUT)


def _parse_params(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise CliError(f"bad --param {item!r}; expected NAME=SPEC", EXIT_INPUT)
        name, spec = item.split("=", 1)
        out[name.strip()] = _parse_param_spec(spec)
    return out


# ---------------------------------------------------------------- rendering


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _table(header, rows) -> str:
    cols = [header] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cols) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cols]
    return "\n".join(lines) + "\n"


def render_result(res: MeasureResult, fmt_name: str) -> str:
    if fmt_name == "json":
        return _json(res.to_dict())
    header = ["lambda_sq", "e_g", "method", "degenerate", "n_nearest"]
    row = [fmt(res.lambda_sq), fmt(res.e_g), res.method, str(res.degenerate).lower(), str(len(res.nearest))]
    if fmt_name == "csv":
        return _csv(header, [row])
    text = _table(header, [row])
    for k, p in enumerate(res.nearest):
        blochs = "  ".join("(" + ", ".join(f"{x:+.6f}" for x in s) + ")" for s in p.bloch())
        text += f"nearest[{k}] bloch A,B,C: {blochs}\n"
    if res.flags:
        text += "flags: " + ", ".join(res.flags) + "\n"
    return text


# ---------------------------------------------------------------- commands


def _oracle_cfg(seed):
    return OracleConfig(seed=seed)


def cmd_compute(args) -> int:
    state = _read_state(args.input, args.strict)
    res = measure(state, POLICY_NAMES[args.policy], family_samples=args.samples or 12, oracle_cfg=_oracle_cfg(args.seed))
    _emit(render_result(res, args.format), args.out)
    return EXIT_OK


def _normalized_params(family, raw):
    if family == "ww":
        return raw
    n = math.sqrt(sum(v * v for v in raw))
    if n == 0.0:
        raise CliError(f"parameters {raw} give a null state", EXIT_STATE)
    return tuple(v / n for v in raw)


_CTORS = {"wtype": wtype_state, "symmetric": symmetric_state, "ww": ww_state}


def _sweep_row(task):
    family, params, policy, seed = task
    res = measure(_CTORS[family](*params), policy, oracle_cfg=_oracle_cfg(seed))
    return [*params, res.lambda_sq, res.e_g, res.method, res.degenerate]


def run_sweep(spec: SweepSpec) -> tuple[list[str], list[list]]:
    """Rows in input order; with ``spec.jobs > 1`` they are computed in worker processes."""
    header = list(FAMILY_PARAMS[spec.family]) + ["lambda_sq", "e_g", "method", "degenerate"]
    tasks = [(spec.family, _normalized_params(spec.family, raw), spec.policy, spec.seed) for raw in spec.points()]
    if spec.jobs == 1 or len(tasks) < 2:
        return header, [_sweep_row(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
        # map yields results in submission order
        rows = list(pool.map(_sweep_row, tasks, chunksize=max(1, len(tasks) // (4 * spec.jobs))))
    return header, rows


def cmd_sweep(args) -> int:
    spec = SweepSpec(
        family=args.family,
        ranges=_parse_params(args.param),
        policy=POLICY_NAMES[args.policy],
        fmt=args.format,
        samples=args.samples,
        seed=args.seed,
        jobs=args.jobs,
    )
    header, rows = run_sweep(spec)
    if spec.fmt == "json":
        text = _json(
            {
                "family": spec.family,
                "policy": spec.policy,
                "columns": header,
                "rows": [dict(zip(header, r)) for r in rows],
            }
        )
    else:
        str_rows = [[fmt(v) if isinstance(v, float) else str(v).lower() if isinstance(v, bool) else v for v in r] for r in rows]
        text = _csv(header, str_rows) if spec.fmt == "csv" else _table(header, str_rows)
    _emit(text, args.out)
    return EXIT_OK


def run_check(state: PureState3, seed: int = DEFAULT_SEED) -> dict:
    cfg = _oracle_cfg(seed)
    values = {}
    if detect_family(state) is not None:
        values["analytic"] = measure(state, "analytic_only").lambda_sq
    values["stationary"] = measure(state, "stationary", oracle_cfg=cfg).lambda_sq
    values["oracle"] = measure(state, "oracle", oracle_cfg=cfg).lambda_sq
    deltas = {f"{a}-{b}": abs(values[a] - values[b]) for a, b in itertools.combinations(values, 2)}
    return {
        "values": values,
        "deltas": deltas,
        "tolerance": CHECK_TOL,
        "pass": all(d <= CHECK_TOL for d in deltas.values()),
    }


def cmd_check(args) -> int:
    state = _read_state(args.input, args.strict)
    report = run_check(state, args.seed)
    if args.format == "json":
        text = _json(report)
    else:
        header = ["method", "lambda_sq"]
        rows = [[k, fmt(v)] for k, v in report["values"].items()]
        rows += [[f"delta {k}", fmt(v)] for k, v in report["deltas"].items()]
        rows.append(["result", "pass" if report["pass"] else "FAIL"])
        text = _csv(header, rows) if args.format == "csv" else _table(header, rows)
    _emit(text, args.out)
    return EXIT_OK if report["pass"] else EXIT_CHECK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--policy", choices=sorted(POLICY_NAMES), default="auto")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="PRNG seed for oracle restarts and sampling")
    common.add_argument("--strict", action="store_true", help="reject inputs that are not normalized")

    parser = argparse.ArgumentParser(prog="geomeas", description="Geometric measure of entanglement for three-qubit pure states.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", parents=[common], help="measure one state")
    p.add_argument("input", help="state JSON file or family literal")
    p.add_argument("--format", choices=("json", "csv", "table"), default="json")
    p.add_argument("--samples", type=int, help="azimuth samples of a degenerate nearest-state family (default 12)")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("sweep", parents=[common], help="tabulate a family over parameters")
    p.add_argument("family", choices=sorted(FAMILY_PARAMS))
    p.add_argument("--param", action="append", metavar="NAME=SPEC", help="VALUE or START:STOP:STEPS")
    p.add_argument("--format", choices=("json", "csv", "table"), default="csv")
    p.add_argument("--samples", type=int, help="draw N random parameter sets instead of a grid")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for the rows (default 1)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("check", parents=[common], help="cross-validate all methods on one state")
    p.add_argument("input", help="state JSON file or family literal")
    p.add_argument("--format", choices=("json", "csv", "table"), default="json")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if getattr(args, "samples", None) is not None and args.samples < 1:
        print("geomeas: error: --samples must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except CliError as exc:
        print(f"geomeas: error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
