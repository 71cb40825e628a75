"""Command-line entry point.

Subcommands: ``synth`` (generate a CSV dataset), ``export-finetune`` (JSONL
training pairs), ``evaluate`` (one building, one backend), ``zeroshot``
(cross-building matrix), ``sweep`` (horizon sweep plus plot CSV).

Settings resolve as flags > JSON config file (``--config``) > defaults.
Exit codes: 0 success, 1 usage, 2 data error, 3 backend error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import string
import sys
from dataclasses import dataclass

from .backends import (
    OracleBackend,
    PersistenceBackend,
    RemoteBackend,
    SeasonalNaiveBackend,
    check_health,
)
from .codec import DEFAULT_PATTERN, PromptTemplate
from .data import (
    CSV_HEADER,
    DatasetSplit,
    LoadSeries,
    SynthConfig,
    format_timestamp,
    ingest_csv,
    repair_gaps,
    split_by_months,
    synth_generate,
)
from .errors import BackendError, DataError, LoadcastError
from .evaluation import (
    EvalReport,
    baseline_linear_ar,
    evaluate_building,
    horizon_sweep,
    render_report,
    zeroshot_matrix,
)
from .export import export_pairs
from .rollout import RolloutConfig

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_BACKEND = 3

_CONFIG_KEYS = {
    "template",
    "decimals",
    "n",
    "m",
    "stride",
    "context_mode",
    "backend",
    "seed",
    "days",
    "buildings",
    "train_months",
    "val_months",
    "test_months",
    "max_gap_hours",
}

_DEFAULTS = {
    "template": DEFAULT_PATTERN,
    "decimals": 1,
    "n": 30,
    "m": 24,
    "stride": 24,
    "context_mode": "sliding",
    "backend": "persistence",
    "seed": 0,
    "days": 90,
    "buildings": 6,
    "train_months": 22,
    "val_months": 1,
    "test_months": 1,
    "max_gap_hours": 3,
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved settings for one command invocation."""

    template: str = DEFAULT_PATTERN
    decimals: int = 1
    n: int = 30
    m: int = 24
    stride: int = 24
    context_mode: str = "sliding"
    backend: str = "persistence"
    seed: int = 0
    days: int = 90
    buildings: int = 6
    train_months: int = 22
    val_months: int = 1
    test_months: int = 1
    max_gap_hours: int = 3

    def prompt_template(self) -> PromptTemplate:
        return PromptTemplate(pattern=self.template, decimals=self.decimals)

    def rollout_config(self, m: int | None = None) -> RolloutConfig:
        return RolloutConfig(
            n=self.n,
            m=self.m if m is None else m,
            context_mode=self.context_mode,
        )


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad flags; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        loaded = json.load(fh)
    if not isinstance(loaded, dict):
        raise ValueError(f"config file {path} must hold a JSON object")
    unknown = sorted(set(loaded) - _CONFIG_KEYS)
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")
    return loaded


def _resolve(args: argparse.Namespace) -> ExperimentConfig:
    """Merge flag values over config-file values over defaults."""
    settings = dict(_DEFAULTS)
    settings.update(_load_config_file(getattr(args, "config", None)))
    for key in _DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            settings[key] = flag
    return ExperimentConfig(**settings)


def _build_backend(
    spec: str,
    template: PromptTemplate,
    train: LoadSeries | None = None,
    truth: LoadSeries | None = None,
):
    """Instantiate a backend from its spec string.

    ``train`` feeds specs that fit on history (linear-ar); ``truth`` feeds the
    oracle. Bare ``remote`` takes the endpoint from LM_ENDPOINT.
    """
    if spec == "oracle":
        if truth is None:
            raise ValueError("oracle backend needs ground-truth data")
        return OracleBackend(truth, template)
    if spec == "persistence":
        return PersistenceBackend(template)
    if spec == "seasonal" or spec.startswith("seasonal:"):
        _, _, period = spec.partition(":")
        return SeasonalNaiveBackend(template, int(period) if period else 24)
    if spec.startswith("linear-ar:"):
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"expected linear-ar:ORDER:RIDGE, got {spec!r}")
        if train is None:
            raise ValueError("linear-ar backend needs training data")
        return baseline_linear_ar(train, template, int(parts[1]), float(parts[2]))
    if spec == "remote" or spec.startswith("remote:"):
        _, _, url = spec.partition(":")
        if not url:
            url = os.environ.get("LM_ENDPOINT", "")
        if not url:
            raise ValueError("remote backend needs remote:URL or LM_ENDPOINT set")
        return _checked_remote(url)
    if spec.startswith(("http://", "https://")):
        return _checked_remote(spec)
    raise ValueError(f"unknown backend spec {spec!r}")


def _checked_remote(url: str) -> RemoteBackend:
    # fail fast on a dead endpoint instead of persisting through a full run
    check_health(url)
    return RemoteBackend(url)


def _load_buildings(path: str, max_gap_hours: int) -> dict[str, LoadSeries]:
    with open(path, "rb") as fh:
        raw = ingest_csv(fh)
    return {
        building: repair_gaps(series, max_gap_hours)
        for building, series in raw.items()
    }


def _pick_building(data: dict[str, LoadSeries], building: str) -> LoadSeries:
    if building not in data:
        raise DataError(
            f"building {building!r} not in data; available: {', '.join(sorted(data))}"
        )
    return data[building]


def _split(series: LoadSeries, cfg: ExperimentConfig) -> DatasetSplit:
    return split_by_months(series, cfg.train_months, cfg.val_months, cfg.test_months)


def _write_text(path: str, content: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(content)


def _building_ids(count: int) -> list[str]:
    letters = string.ascii_uppercase
    if count <= len(letters):
        return list(letters[:count])
    return [f"B{i:03d}" for i in range(count)]


def cmd_synth(args: argparse.Namespace) -> int:
    cfg = _resolve(args)
    synth = SynthConfig(seed=cfg.seed, days=cfg.days)
    ids = _building_ids(cfg.buildings)
    rows = 0
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for building in ids:
            series = synth_generate(synth, building)
            for rec in series.records:
                writer.writerow(
                    [
                        format_timestamp(rec.timestamp),
                        building,
                        f"{rec.consumption:.4f}",
                    ]
                )
                rows += 1
    print(f"wrote {rows} rows for {len(ids)} buildings to {args.out}")
    return EXIT_OK


def cmd_export_finetune(args: argparse.Namespace) -> int:
    cfg = _resolve(args)
    template = cfg.prompt_template()
    data = _load_buildings(args.data, cfg.max_gap_hours)
    series = _pick_building(data, args.building)
    split = _split(series, cfg)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        count = export_pairs(split.train, template, cfg.n, fh)
    print(f"wrote {count} pairs to {args.out}")
    return EXIT_OK


def _emit_report(report: EvalReport, report_path: str | None) -> None:
    if report_path:
        _write_text(report_path, render_report(report, "csv"))
    sys.stdout.write(render_report(report, "text-table"))


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = _resolve(args)
    template = cfg.prompt_template()
    data = _load_buildings(args.data, cfg.max_gap_hours)
    series = _pick_building(data, args.building)
    split = _split(series, cfg)
    backend = _build_backend(cfg.backend, template, train=split.train, truth=series)
    row = evaluate_building(
        split, backend, template, cfg.rollout_config(), stride=cfg.stride
    )
    report = EvalReport(
        rows=(row,),
        metadata=(
            "aggregation: pooled over all (window, step) residuals per cell",
            f"stride: {cfg.stride} hours between test windows",
        ),
    )
    _emit_report(report, args.report)
    return EXIT_OK


def cmd_zeroshot(args: argparse.Namespace) -> int:
    cfg = _resolve(args)
    template = cfg.prompt_template()
    data = _load_buildings(args.data, cfg.max_gap_hours)
    splits = {building: _split(series, cfg) for building, series in data.items()}

    with open(args.backends, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    if not isinstance(manifest, list):
        raise ValueError("backends manifest must be a JSON array")
    backends = {}
    for entry in manifest:
        missing = {"model", "source", "backend"} - set(entry)
        if missing:
            raise ValueError(f"manifest entry missing {sorted(missing)}: {entry}")
        source = entry["source"]
        if source not in data:
            raise DataError(
                f"manifest source {source!r} not in data; "
                f"available: {', '.join(sorted(data))}"
            )
        spec = entry["backend"]
        if spec == "oracle":
            # the oracle answers from the building it is evaluated on
            backends[(entry["model"], source)] = (
                lambda target, _data=data, _template=template: OracleBackend(
                    _data[target], _template
                )
            )
        elif spec.startswith(("remote", "http://", "https://")):
            # lazy: an unreachable endpoint becomes error rows, not a dead run
            backends[(entry["model"], source)] = (
                lambda _target, _spec=spec, _template=template: _build_backend(
                    _spec, _template
                )
            )
        else:
            backends[(entry["model"], source)] = _build_backend(
                spec, template, train=splits[source].train
            )
    report = zeroshot_matrix(
        splits, backends, template, cfg.rollout_config(), stride=cfg.stride
    )
    _emit_report(report, args.report)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _resolve(args)
    template = cfg.prompt_template()
    try:
        horizons = [int(h) for h in args.horizons.split(",") if h.strip()]
    except ValueError:
        raise ValueError(f"horizons must be comma-separated integers: {args.horizons!r}")
    if not horizons or min(horizons) < 1:
        raise ValueError("horizons must be positive integers")
    data = _load_buildings(args.data, cfg.max_gap_hours)
    series = _pick_building(data, args.building)
    split = _split(series, cfg)
    backend = _build_backend(cfg.backend, template, train=split.train, truth=series)
    report = horizon_sweep(
        split,
        backend,
        template,
        cfg.rollout_config(),
        horizons=horizons,
        stride=cfg.stride,
    )
    if args.plot_csv:
        lines = ["horizon,rmse,mae"]
        for row in report.sorted_rows():
            lines.append(f"{row.horizon},{row.rmse:.3f},{row.mae:.3f}")
        _write_text(args.plot_csv, "\n".join(lines) + "\n")
    _emit_report(report, args.report)
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser, *names: str) -> None:
    flags = {
        "config": dict(help="JSON config file; flags win over its values"),
        "template": dict(help="sentence pattern with {Time} and {Usage}"),
        "decimals": dict(type=int, help="fraction digits for rendered values"),
        "n": dict(type=int, help="observation length in hours"),
        "m": dict(type=int, help="forecast horizon in hours"),
        "stride": dict(type=int, help="hours between test windows"),
        "context-mode": dict(
            dest="context_mode", choices=["sliding", "growing"], help="context policy"
        ),
        "backend": dict(
            help="oracle | persistence | seasonal:PERIOD | linear-ar:P:LAMBDA | remote:URL"
        ),
        "seed": dict(type=int, help="RNG seed"),
    }
    for name in names:
        parser.add_argument(f"--{name}", **flags[name])


def build_parser() -> _Parser:
    parser = _Parser(prog="loadcast", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[], help="generate a synthetic CSV dataset")
    _add_common(p, "config", "seed")
    p.add_argument("--days", type=int, help="days of hourly data per building")
    p.add_argument("--buildings", type=int, help="number of buildings")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("export-finetune", help="write JSONL fine-tuning pairs")
    _add_common(p, "config", "template", "decimals", "n")
    p.add_argument("--data", required=True, help="input CSV path")
    p.add_argument("--building", required=True, help="building id to export")
    p.add_argument("--out", required=True, help="output JSONL path")
    p.set_defaults(func=cmd_export_finetune)

    p = sub.add_parser("evaluate", help="evaluate one backend on one building")
    _add_common(
        p, "config", "template", "decimals", "n", "m", "stride", "context-mode", "backend"
    )
    p.add_argument("--data", required=True, help="input CSV path")
    p.add_argument("--building", required=True, help="building id to evaluate")
    p.add_argument("--report", help="write the report CSV here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("zeroshot", help="cross-building evaluation matrix")
    _add_common(p, "config", "template", "decimals", "n", "m", "stride", "context-mode")
    p.add_argument("--data", required=True, help="input CSV path")
    p.add_argument(
        "--backends",
        required=True,
        help="JSON manifest: [{model, source, backend}, ...]",
    )
    p.add_argument("--report", help="write the report CSV here")
    p.set_defaults(func=cmd_zeroshot)

    p = sub.add_parser("sweep", help="evaluate one backend across horizons")
    _add_common(
        p, "config", "template", "decimals", "n", "stride", "context-mode", "backend"
    )
    p.add_argument("--data", required=True, help="input CSV path")
    p.add_argument("--building", required=True, help="building id to evaluate")
    p.add_argument("--horizons", default="1,4,12,24", help="comma-separated horizons")
    p.add_argument("--plot-csv", help="write horizon,rmse,mae rows here")
    p.add_argument("--report", help="write the report CSV here")
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except BackendError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except DataError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except LoadcastError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
