"""Batch experiment runner.

Three subcommands, each driven by an optional JSON config (flags override
config fields):

* ``scatter``    -- the dipole scattering benchmark sweep; emits one row
                    per N with columns N, errE, errH, cond, sc_leak, wall_ms.
* ``check``      -- runs a verification suite (algebra, kernels,
                    factorizations, green, inhomog, all); exit code 0 only
                    when every check passes.
* ``green-eval`` -- prints the chiral Green function at one (t, x), eight
                    reals with 15 significant digits; ``--refine`` appends
                    a residual refinement table instead.

Output is CSV (default) or JSON.  CSV starts with ``# key=value`` metadata
lines; everything except the timestamp line is byte-deterministic for a
fixed config and seed.  Exit codes: 0 success, 1 check/solver failure,
2 configuration error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .chiral_time import green_function, green_residual
from .errors import BqemError, ConfigError
from .grids import Lattice, SpaceTimeLattice
from .kernels import ChiralMedium
from .scattering import Ellipsoid, MfsProblem, run_benchmark
from .suites import SUITES, run_suites

_REQUIRED = object()


def _get(cfg: dict, path: str, default=_REQUIRED):
    node = cfg
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            if default is _REQUIRED:
                raise ConfigError(f"missing config field: {path}")
            return default
        node = node[part]
    return node


def _as_float(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"config field {path} must be a number")
    return float(value)


def _as_complex(value, path: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(_as_float(value[0], path), _as_float(value[1], path))
    raise ConfigError(f"config field {path} must be a number or [re, im]")


@dataclass
class Report:
    command: str
    columns: list[str]
    rows: list[dict]
    meta: dict = field(default_factory=dict)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.8e}"
    return str(value)


def render_csv(report: Report) -> str:
    lines = [f"# {k}={v}" for k, v in report.meta.items()]
    lines.append(",".join(report.columns))
    for row in report.rows:
        lines.append(",".join(_fmt(row[c]) for c in report.columns))
    return "\n".join(lines) + "\n"


def render_json(report: Report) -> str:
    def clean(v):
        if isinstance(v, (np.integer,)):
            return int(v)
        if isinstance(v, (np.floating,)):
            return float(v)
        return v

    rows = [{c: clean(row[c]) for c in report.columns} for row in report.rows]
    return json.dumps(rows, indent=2) + "\n"


def _emit(report: Report, fmt: str, out: str | None) -> None:
    text = render_csv(report) if fmt == "csv" else render_json(report)
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)


def _meta(command: str, cfg: dict, seed: int) -> dict:
    digest = hashlib.sha256(
        json.dumps({"config": cfg, "seed": seed}, sort_keys=True).encode()
    ).hexdigest()[:16]
    return {
        "command": command,
        "version": __version__,
        "config_hash": digest,
        "seed": seed,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


def cmd_scatter(cfg: dict, seed: int, threads: int, fmt: str, out: str | None) -> int:
    surface = Ellipsoid(
        a=_as_float(_get(cfg, "ellipsoid.a"), "ellipsoid.a"),
        b=_as_float(_get(cfg, "ellipsoid.b"), "ellipsoid.b"),
        c=_as_float(_get(cfg, "ellipsoid.c"), "ellipsoid.c"),
    )
    alpha = _as_complex(_get(cfg, "alpha", [1.0, 0.3]), "alpha")
    beta = _as_float(_get(cfg, "beta", 0.0), "beta")
    medium = ChiralMedium(beta=beta, alpha=alpha)
    source_scale = _as_float(_get(cfg, "source_scale", 0.15), "source_scale")
    eval_scale = _as_float(_get(cfg, "eval_scale", 5.0), "eval_scale")
    n_values = _get(cfg, "n_values", [10, 15, 20, 25, 30, 35])
    if not isinstance(n_values, list) or not all(isinstance(n, int) and n > 0 for n in n_values):
        raise ConfigError("config field n_values must be a list of positive integers")
    moment = _get(cfg, "moment", None)
    if moment is not None:
        if not isinstance(moment, list) or len(moment) != 3:
            raise ConfigError("config field moment must be a list of three numbers")
        moment = np.array([_as_float(m, "moment") for m in moment])
    impedance = _get(cfg, "impedance", None)
    if impedance is not None:
        impedance = _as_complex(impedance, "impedance")
    oversample = _as_float(_get(cfg, "oversample", 1.0), "oversample")

    problem = MfsProblem(
        surface=surface,
        medium=medium,
        n_sources=int(n_values[0]),
        source_scale=source_scale,
        side="exterior",
        impedance=impedance,
        oversample=oversample,
    )
    report_rows = run_benchmark(
        problem, n_values, moment=moment, eval_scale=eval_scale, threads=threads
    ).rows
    report = Report(
        command="scatter",
        columns=["N", "errE", "errH", "cond", "sc_leak", "wall_ms"],
        rows=report_rows,
        meta=_meta("scatter", cfg, seed),
    )
    _emit(report, fmt, out)
    return 0


def cmd_check(suite: str, cfg: dict, seed: int, fmt: str, out: str | None) -> int:
    names = list(SUITES) if suite == "all" else [suite]
    rows = run_suites(names, seed=seed)
    report = Report(
        command="check",
        columns=["suite", "check", "value", "lo", "hi", "status"],
        rows=[
            {
                "suite": r.suite,
                "check": r.name,
                "value": r.value,
                "lo": r.lo,
                "hi": r.hi,
                "status": "pass" if r.passed else "FAIL",
            }
            for r in rows
        ],
        meta=_meta("check", {"suite": suite, **cfg}, seed),
    )
    _emit(report, fmt, out)
    return 0 if all(r.passed for r in rows) else 1


def cmd_green_eval(args, cfg: dict, seed: int, fmt: str, out: str | None) -> int:
    t = args.t if args.t is not None else _as_float(_get(cfg, "t", 1.0), "t")
    if args.x is not None:
        try:
            x = [float(v) for v in args.x.split(",")]
        except ValueError as exc:
            raise ConfigError(f"--x must be 'x1,x2,x3': {exc}") from exc
    else:
        x = _get(cfg, "x", [1.0, 0.0, 0.0])
    if not isinstance(x, list) or len(x) != 3:
        raise ConfigError("config field x must be a list of three numbers")
    medium = ChiralMedium(
        eps=args.eps if args.eps is not None else _as_float(_get(cfg, "eps", 1.0), "eps"),
        mu=args.mu if args.mu is not None else _as_float(_get(cfg, "mu", 1.0), "mu"),
        beta=args.beta if args.beta is not None else _as_float(_get(cfg, "beta", 1.0), "beta"),
    )

    if args.refine:
        levels = int(_get(cfg, "levels", 3))
        rows = []
        prev = None
        for k in range(levels):
            n = 9 * 2**k - (2**k - 1)  # 9, 17, 33: nested refinement
            st = SpaceTimeLattice(Lattice.cube((0.8, 0.8, 0.8), 0.4, n), 0.5, 1.5 / (n - 1), n)
            res = green_residual(st, medium, margin_t=2 ** (k), margin_s=2 ** (k))
            rows.append(
                {
                    "level": k,
                    "h": st.space.spacing,
                    "ht": st.dt,
                    "residual": res,
                    "ratio": (prev / res) if prev is not None else float("nan"),
                }
            )
            prev = res
        report = Report(
            command="green-eval",
            columns=["level", "h", "ht", "residual", "ratio"],
            rows=rows,
            meta=_meta("green-eval", cfg, seed),
        )
        _emit(report, fmt, out)
        return 0

    value = green_function(t, np.asarray(x, dtype=float), medium)
    names = ("sc", "v1", "v2", "v3")
    for name, comp in zip(names, np.asarray(value.components).reshape(4)):
        sys.stdout.write(f"{name} re={comp.real:.15g} im={comp.imag:.15g}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bqem", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", metavar="PATH", help="JSON config file")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", metavar="PATH", help="output path (default stdout)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=1)

    p_scatter = sub.add_parser("scatter", help="dipole scattering benchmark sweep")
    common(p_scatter)

    p_check = sub.add_parser("check", help="run a verification suite")
    p_check.add_argument("suite", choices=tuple(SUITES) + ("all",))
    common(p_check)

    p_green = sub.add_parser("green-eval", help="evaluate the chiral Green function")
    common(p_green)
    p_green.add_argument("--t", type=float, default=None)
    p_green.add_argument("--x", type=str, default=None, help="'x1,x2,x3'")
    p_green.add_argument("--eps", type=float, default=None)
    p_green.add_argument("--mu", type=float, default=None)
    p_green.add_argument("--beta", type=float, default=None)
    p_green.add_argument("--refine", action="store_true", help="emit a residual refinement table")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except OSError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2
        except json.JSONDecodeError as exc:
            print(f"config error: invalid JSON: {exc}", file=sys.stderr)
            return 2
        if not isinstance(cfg, dict):
            print("config error: top level must be a JSON object", file=sys.stderr)
            return 2

    try:
        if args.command == "scatter":
            return cmd_scatter(cfg, args.seed, args.threads, args.format, args.out)
        if args.command == "check":
            return cmd_check(args.suite, cfg, args.seed, args.format, args.out)
        return cmd_green_eval(args, cfg, args.seed, args.format, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except BqemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
