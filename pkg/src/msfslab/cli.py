"""Command-line front end: run experiments, verify results, list models.

The library is the primary interface; this is thin plumbing for
reproducible runs. ``run`` executes the experiment described by a YAML
config and writes a measures CSV plus a manifest, ``verify`` compares
two measures CSVs cell by cell at a numeric tolerance, and ``list``
enumerates the registered case studies and their strategies.

Exit codes: 0 success; 1 verify found mismatching cells; 2 config or
schema violation; 3 the model failed at runtime.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import yaml

from . import __version__
from .kernel import (
    ConfigurationError,
    ExperimentConfig,
    case_studies,
    case_study_strategies,
    run_batch,
)

SCHEMA_TAG = ["schema", "msfslab-measures-1"]
META_COLUMNS = ["case_study", "strategy", "stream", "time"]


class ConfigFileError(ValueError):
    """Config file failed validation; the message names the field."""


def format_cell(value) -> str:
    """Nine significant digits, NA for missing; stable across platforms."""
    if value is None:
        return "NA"
    return "%.9g" % value


def _load_config_file(path: Path) -> dict:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigFileError(f"config: cannot read {path}: {err.strerror}") from err
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as err:
        raise ConfigFileError(f"config: not valid YAML: {err}") from err
    if not isinstance(doc, dict):
        raise ConfigFileError("config: top level must be a mapping")
    return doc


def parse_experiment(doc: dict, seed_override: int | None = None) -> list[ExperimentConfig]:
    """Validate a parsed config document into one config per strategy."""
    known = {
        "case_study", "strategy", "strategies", "seed", "horizon",
        "repetitions", "parameters",
    }
    for key in doc:
        if key not in known:
            raise ConfigFileError(f"{key}: unknown config key")

    case = doc.get("case_study")
    if not isinstance(case, str):
        raise ConfigFileError("case_study: required, must be a string")
    if case not in case_studies():
        raise ConfigFileError(
            f"case_study: unknown {case!r}; registered: {', '.join(case_studies())}"
        )

    if ("strategy" in doc) == ("strategies" in doc):
        raise ConfigFileError("strategy: give exactly one of strategy/strategies")
    strategies = [doc["strategy"]] if "strategy" in doc else doc["strategies"]
    if not isinstance(strategies, list) or not strategies:
        raise ConfigFileError("strategies: must be a non-empty list")
    offered = case_study_strategies(case)
    for strategy in strategies:
        if strategy not in offered:
            raise ConfigFileError(
                f"strategy: unknown {strategy!r} for {case}; offered: {', '.join(offered)}"
            )

    if "horizon" not in doc:
        raise ConfigFileError("horizon: required")
    horizon = doc["horizon"]
    if not isinstance(horizon, (int, float)) or isinstance(horizon, bool) or horizon <= 0:
        raise ConfigFileError("horizon: must be a positive number")

    seed = seed_override if seed_override is not None else doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigFileError("seed: must be an integer")

    repetitions = doc.get("repetitions", 1)
    if not isinstance(repetitions, int) or isinstance(repetitions, bool) or repetitions < 1:
        raise ConfigFileError("repetitions: must be a positive integer")

    parameters = doc.get("parameters", {})
    if parameters is None:
        parameters = {}
    if not isinstance(parameters, dict):
        raise ConfigFileError("parameters: must be a mapping")

    try:
        return [
            ExperimentConfig(case, strategy, parameters, seed, horizon, repetitions)
            for strategy in strategies
        ]
    except ConfigurationError as err:
        raise ConfigFileError(f"parameters: {err}") from err


def measure_rows(traces) -> tuple[list[str], list[list[str]]]:
    """Flatten run traces into a wide CSV table, one row per time point."""
    kinds = sorted({kind for trace in traces for kind in trace.measures})
    header = META_COLUMNS + kinds
    rows = []
    for trace in traces:
        by_kind = {
            kind: dict(zip(series.times, series.values))
            for kind, series in trace.measures.items()
        }
        times = sorted({t for series in by_kind.values() for t in series})
        for t in times:
            cells = [trace.case_study, trace.strategy, str(trace.stream), format_cell(t)]
            cells += [format_cell(by_kind[k].get(t)) for k in kinds]
            rows.append(cells)
    return header, rows


def _write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(SCHEMA_TAG)
        writer.writerow(header)
        writer.writerows(rows)


def cmd_run(args) -> int:
    config_path = Path(args.config)
    try:
        doc = _load_config_file(config_path)
        configs = parse_experiment(doc, args.seed)
    except ConfigFileError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2

    traces = []
    try:
        for cfg in configs:
            traces.extend(run_batch(cfg, jobs=args.jobs, full_trace=args.full_trace))
    except ConfigurationError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except Exception as err:  # model failure, not a usage error
        print(f"model error: {err!r}", file=sys.stderr)
        return 3

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    header, rows = measure_rows(traces)
    _write_csv(out_dir / "measures.csv", header, rows)

    if args.full_trace:
        snapshots = {
            f"{trace.strategy}/{trace.stream}": trace.snapshots for trace in traces
        }
        with (out_dir / "snapshots.json").open("w", encoding="utf-8") as handle:
            json.dump(snapshots, handle)

    canonical = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    manifest = {
        "schema": "msfslab-manifest-1",
        "version": __version__,
        "config_path": str(config_path),
        "config_hash": hashlib.sha256(canonical.encode()).hexdigest(),
        "case_study": configs[0].case_study,
        "strategies": [cfg.strategy for cfg in configs],
        "seed": configs[0].seed,
        "horizon": configs[0].horizon,
        "repetitions": configs[0].repetitions,
        "rows": len(rows),
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    with (out_dir / "manifest.json").open("w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2)
        handle.write("\n")
    print(f"wrote {len(rows)} rows to {out_dir / 'measures.csv'}")
    return 0


def _read_table(path: Path) -> list[list[str]]:
    try:
        with path.open(encoding="utf-8", newline="") as handle:
            table = list(csv.reader(handle))
    except OSError as err:
        raise ConfigFileError(f"{path}: cannot read: {err.strerror}") from err
    if len(table) < 2:
        raise ConfigFileError(f"{path}: empty or missing schema/header rows")
    if table[0] != SCHEMA_TAG:
        raise ConfigFileError(f"{path}: unknown schema tag {table[0]!r}")
    return table


def _cells_match(got: str, want: str, tolerance: float) -> bool:
    if got == want:
        return True
    if "NA" in (got, want):
        return False
    try:
        return abs(float(got) - float(want)) <= tolerance
    except ValueError:
        return False


def cmd_verify(args) -> int:
    try:
        golden = _read_table(Path(args.golden))
        result = _read_table(Path(args.results))
    except ConfigFileError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    if golden[1] != result[1]:
        print("error: header mismatch between files", file=sys.stderr)
        return 2
    if len(golden) != len(result):
        print(
            f"error: row count differs: {len(golden) - 2} golden, "
            f"{len(result) - 2} result",
            file=sys.stderr,
        )
        return 2

    header = golden[1]
    failures = 0
    for index, (want_row, got_row) in enumerate(zip(golden[2:], result[2:]), start=1):
        if len(want_row) != len(header) or len(got_row) != len(header):
            print(f"error: row {index}: wrong cell count", file=sys.stderr)
            return 2
        for name, want, got in zip(header, want_row, got_row):
            if name in META_COLUMNS and name != "time":
                ok = want == got
            else:
                ok = _cells_match(got, want, args.tolerance)
            if not ok:
                failures += 1
                if failures <= 20:
                    print(f"FAIL row {index} {name}: expected {want}, got {got}")
    if failures:
        print(f"verify: {failures} cell(s) outside tolerance {args.tolerance:g}")
        return 1
    print(f"verify: all {len(golden) - 2} rows match at tolerance {args.tolerance:g}")
    return 0


def cmd_list(args) -> int:
    for name in case_studies():
        print(f"{name}: {', '.join(case_study_strategies(name))}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="msfslab",
        description="Run and check multi-scale feedback experiments.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="execute a config and write CSV results")
    run.add_argument("--config", required=True, help="YAML experiment config")
    run.add_argument("--out", default=".", help="output directory (default: .)")
    run.add_argument("--jobs", type=int, default=1, help="parallel workers")
    run.add_argument("--seed", type=int, default=None, help="override the config seed")
    run.add_argument(
        "--full-trace", action="store_true", help="also write per-step snapshots"
    )
    run.set_defaults(handler=cmd_run)

    verify = commands.add_parser("verify", help="compare two measures CSVs")
    verify.add_argument("golden", help="reference CSV")
    verify.add_argument("results", help="CSV to check")
    verify.add_argument(
        "--tolerance", type=float, default=0.0, help="absolute per-cell tolerance"
    )
    verify.set_defaults(handler=cmd_verify)

    lister = commands.add_parser("list", help="show case studies and strategies")
    lister.set_defaults(handler=cmd_list)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
