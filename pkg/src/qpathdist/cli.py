"""Command-line interface.

Subcommands: distance, pair, scan-hbar, selftest.  Exit codes: 0 success,
1 configuration error, 2 numerical-gate refusal (truncation, degeneracy,
convergence), 3 selftest failure.

Records are deterministic for a fixed configuration apart from the
wall_time_s field; all numeric content is bitwise reproducible because the
computations use fixed summation orders and no seeded randomness.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__, records, runner, selftest
from .errors import ConfigError, NumericalGateError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qpathdist",
        description="Distance of Hilbert-space paths from true quantum "
                    "evolution.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, metavar="PATH",
                           help="scenario configuration (JSON)")
        p.add_argument("--output", metavar="PATH",
                       help="write the run record here instead of stdout")
        p.add_argument("--format", choices=["json", "csv"],
                       help="record format (overrides the config)")
        p.add_argument("--dim", metavar="N|auto",
                       help="truncation dimension override")
        p.add_argument("--quiet", action="store_true",
                       help="suppress the summary line")

    add_common(sub.add_parser(
        "distance", help="distance of one scenario's path from true evolution"))
    add_common(sub.add_parser(
        "pair", help="distance between two scenarios' paths"))
    add_common(sub.add_parser(
        "scan-hbar", help="distance of one trajectory across hbar values"))
    add_common(sub.add_parser(
        "selftest", help="run the built-in oracle suite"), needs_config=False)
    return parser


def _load_config(path: str):
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc


def _apply_dim_override(cfg: dict, dim_flag: str | None) -> None:
    if dim_flag is None:
        return
    if dim_flag == "auto":
        override: int | str = "auto"
    else:
        try:
            override = int(dim_flag)
        except ValueError:
            raise ConfigError(f"--dim must be an integer or 'auto', "
                              f"got {dim_flag!r}") from None
    for sub in ("first", "second"):
        if sub in cfg and isinstance(cfg[sub], dict):
            cfg[sub]["dim"] = override
    if "model" in cfg:
        cfg["dim"] = override


def _emit(record: dict, text_payload: str | None, args, summary: str) -> None:
    body = text_payload if text_payload is not None \
        else records.record_to_json(record) + "\n"
    if args.output:
        Path(args.output).write_text(body)
        if not args.quiet:
            print(summary)
    else:
        sys.stdout.write(body)
        if not args.quiet:
            print(summary, file=sys.stderr)


def _make_record(command: str, config_echo, result: dict, wall: float) -> dict:
    diagnostics = result.pop("diagnostics", {})
    return {
        "tool": "qpathdist",
        "version": __version__,
        "command": command,
        "config": config_echo,
        "result": result,
        "diagnostics": diagnostics,
        "wall_time_s": wall,
    }


def _cmd_distance(args) -> int:
    raw = _load_config(args.config)
    _apply_dim_override(raw, args.dim)
    cfg = records.validate_scenario(raw)
    if args.format:
        cfg["format"] = args.format
    start = time.perf_counter()
    result = runner.run_distance(cfg)
    wall = time.perf_counter() - start
    record = _make_record("distance", cfg, dict(result), wall)
    payload = None
    if cfg["format"] == "csv":
        payload = records.trace_csv(
            result["times"],
            {"integrand": result["integrand"],
             "alpha_rate": result["alpha_rate"]},
            {"D": result["value"]},
        )
    _emit(record, payload, args, f"D = {result['value']!r}")
    return 0


def _cmd_pair(args) -> int:
    raw = _load_config(args.config)
    _apply_dim_override(raw, args.dim)
    cfg = records.validate_pair(raw)
    if args.format:
        cfg["format"] = args.format
    start = time.perf_counter()
    result = runner.run_pair(cfg)
    wall = time.perf_counter() - start
    record = _make_record("pair", cfg, dict(result), wall)
    payload = None
    if cfg["format"] == "csv":
        payload = records.trace_csv(
            result["times"],
            {"integrand": result["integrand"],
             "alpha1_rate": result["alpha1_rate"],
             "alpha2_rate": result["alpha2_rate"],
             "gamma": result["gamma"]},
            {"D12": result["value"], "D1": result["d1"], "D2": result["d2"]},
        )
    _emit(record, payload, args,
          f"D12 = {result['value']!r} (D1 = {result['d1']!r}, "
          f"D2 = {result['d2']!r})")
    return 0


def _cmd_scan(args) -> int:
    raw = _load_config(args.config)
    _apply_dim_override(raw, args.dim)
    cfg = records.validate_scan(raw)
    if args.format:
        cfg["format"] = args.format
    start = time.perf_counter()
    result = runner.run_scan(cfg)
    wall = time.perf_counter() - start
    record = _make_record("scan-hbar", cfg, dict(result), wall)
    payload = None
    if cfg["format"] == "csv":
        rows = []
        summary = {"monotone": result["monotone"]}
        nan = float("nan")
        for r in result["rows"]:
            if "error" in r:
                rows.append([r["hbar"], nan, 0, nan, nan, nan])
                summary[f"error_{r['hbar']:g}"] = r["error"]
            else:
                rows.append([r["hbar"], r["value"], r["dim_used"],
                             r["moments"]["2"], r["moments"]["4"],
                             r["moments"]["6"]])
        payload = records.rows_csv(
            ["hbar", "D", "dim_used", "m2", "m4", "m6"], rows, summary)
    values = ", ".join("failed" if "error" in r else repr(r["value"])
                       for r in result["rows"])
    _emit(record, payload, args,
          f"D over hbar: {values} (monotone: {result['monotone']})")
    return 2 if result["failed"] else 0


def _cmd_selftest(args) -> int:
    start = time.perf_counter()
    results = selftest.run_selftest()
    wall = time.perf_counter() - start
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    failures = [name for name, ok, _ in results if not ok]
    record = _make_record(
        "selftest", None,
        {"checks": [{"name": n, "passed": ok, "detail": d}
                    for n, ok, d in results]},
        wall,
    )
    if args.output:
        Path(args.output).write_text(records.record_to_json(record) + "\n")
    if failures:
        print(f"selftest FAILED at: {failures[0]}", file=sys.stderr)
        return 3
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "distance": _cmd_distance,
        "pair": _cmd_pair,
        "scan-hbar": _cmd_scan,
        "selftest": _cmd_selftest,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except NumericalGateError as exc:
        print(f"numerical gate refused: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
