"""Error metrics and the three experiment harnesses.

Harnesses: per-building evaluation, the zero-shot cross-building matrix, and
the horizon sweep. All of them pool every (window, step) residual of a cell
into one RMSE and one MAE, so results do not depend on window order.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .codec import (
    ParseError,
    PromptTemplate,
    parse_strict,
    render_value,
    round_half_away_from_zero,
)
from .backends import BackendAnswer, ContextTooShort, ContextUnparseable, GenerationContext
from .data import DatasetSplit, LoadSeries, make_windows
from .errors import DataError, LoadcastError
from .rollout import RolloutConfig, forecast, forecast_horizons


class LengthMismatch(DataError):
    """Prediction and ground-truth vectors differ in length."""


class EmptyInput(DataError):
    """A metric was asked for zero values."""


class NoWindows(DataError):
    """The test series is too short for even one evaluation window."""


class SingularSystem(DataError):
    """The normal equations could not be solved."""


class EmptyReport(DataError):
    """A report with no rows cannot be rendered."""


def _checked(pred, gt) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(pred, dtype=float)
    g = np.asarray(gt, dtype=float)
    if p.ndim != 1 or g.ndim != 1:
        raise LengthMismatch("inputs must be one-dimensional")
    if p.size != g.size:
        raise LengthMismatch(f"lengths differ: {p.size} vs {g.size}")
    if p.size == 0:
        raise EmptyInput("need at least one value")
    if not (np.isfinite(p).all() and np.isfinite(g).all()):
        raise ValueError("inputs must be finite")
    return p, g


def rmse(pred, gt) -> float:
    """Root mean squared error, fsum-accumulated for order independence."""
    p, g = _checked(pred, gt)
    return math.sqrt(math.fsum((a - b) ** 2 for a, b in zip(p, g)) / p.size)


def mae(pred, gt) -> float:
    """Mean absolute error, fsum-accumulated for order independence."""
    p, g = _checked(pred, gt)
    return math.fsum(abs(a - b) for a, b in zip(p, g)) / p.size


@dataclass(frozen=True)
class EvalRow:
    """One report cell. ``error`` set (and metrics None) when the cell failed."""

    model: str
    source_building: str
    target_building: str
    horizon: int
    rmse: float | None
    mae: float | None
    windows: int
    faults: int
    error: str | None = None


@dataclass(frozen=True)
class EvalReport:
    """A bag of rows plus notes about how they were produced."""

    rows: tuple[EvalRow, ...]
    metadata: tuple[str, ...] = field(
        default=(
            "aggregation: pooled over all (window, step) residuals per cell",
        )
    )

    def sorted_rows(self) -> list[EvalRow]:
        return sorted(
            self.rows,
            key=lambda r: (r.model, r.source_building, r.target_building, r.horizon),
        )


def _split_windows(split: DatasetSplit, config: RolloutConfig, stride: int):
    windows = make_windows(split.test, n=config.n, m=config.m, stride=stride)
    if not windows:
        raise NoWindows(
            f"test series of {len(split.test)} records admits no "
            f"(n={config.n}, m={config.m}) window"
        )
    return windows


def _observation_series(window, building_id: str) -> LoadSeries:
    return LoadSeries(building_id, window.observation)


def evaluate_building(
    split: DatasetSplit,
    backend,
    template: PromptTemplate,
    config: RolloutConfig,
    stride: int = 24,
    model: str | None = None,
    source_building: str | None = None,
) -> EvalRow:
    """Pool all test-window residuals of one building into a single row.

    Ground truth is rounded to the template's decimals before differencing,
    because every prediction necessarily carries template precision.
    """
    building = split.test.building_id
    windows = _split_windows(split, config, stride)
    preds: list[float] = []
    truths: list[float] = []
    faults = 0
    for window in windows:
        result = forecast(
            _observation_series(window, building), backend, template, config
        )
        preds.extend(result.predictions)
        truths.extend(
            round_half_away_from_zero(rec.consumption, template.decimals)
            for rec in window.target
        )
        faults += len(result.faults)
    return EvalRow(
        model=model if model is not None else getattr(backend, "name", "backend"),
        source_building=source_building if source_building is not None else building,
        target_building=building,
        horizon=config.m,
        rmse=rmse(preds, truths),
        mae=mae(preds, truths),
        windows=len(windows),
        faults=faults,
    )


def zeroshot_matrix(
    splits,
    backends,
    template: PromptTemplate,
    config: RolloutConfig,
    stride: int = 24,
) -> EvalReport:
    """Evaluate every (model, source) backend on every other building.

    ``splits`` maps building id to its DatasetSplit. ``backends`` maps
    (model name, source building) to either a backend or a callable taking the
    target building id and returning one (for backends that need target data,
    like the oracle). Failed cells become rows with the error message; the
    matrix always completes.
    """
    if len(splits) < 2:
        raise ValueError("zero-shot needs at least two buildings")
    rows: list[EvalRow] = []
    for model, source in sorted(backends):
        entry = backends[(model, source)]
        for target in sorted(splits):
            if target == source:
                continue
            try:
                backend = entry(target) if callable(entry) else entry
                row = evaluate_building(
                    splits[target],
                    backend,
                    template,
                    config,
                    stride=stride,
                    model=model,
                    source_building=source,
                )
            except LoadcastError as exc:
                row = EvalRow(
                    model=model,
                    source_building=source,
                    target_building=target,
                    horizon=config.m,
                    rmse=None,
                    mae=None,
                    windows=0,
                    faults=0,
                    error=f"{type(exc).__name__}: {exc}",
                )
            rows.append(row)
    return EvalReport(
        rows=tuple(rows),
        metadata=(
            "aggregation: pooled over all (window, step) residuals per cell",
            f"stride: {stride} hours between test windows",
            "zero-shot: source model evaluated on every other building",
        ),
    )


def horizon_sweep(
    split: DatasetSplit,
    backend,
    template: PromptTemplate,
    config: RolloutConfig,
    horizons=(1, 4, 12, 24),
    stride: int = 24,
    model: str | None = None,
) -> EvalReport:
    """One row per horizon, all horizons served by a single rollout per window."""
    horizons = sorted(set(int(h) for h in horizons))
    if not horizons or horizons[0] < 1:
        raise ValueError("horizons must be positive integers")
    building = split.test.building_id
    max_config = RolloutConfig(
        n=config.n,
        m=horizons[-1],
        context_mode=config.context_mode,
        retry_limit=config.retry_limit,
        fallback=config.fallback,
    )
    windows = _split_windows(split, max_config, stride)
    pooled: dict[int, tuple[list[float], list[float], int]] = {
        h: ([], [], 0) for h in horizons
    }
    for window in windows:
        results = forecast_horizons(
            _observation_series(window, building),
            backend,
            template,
            max_config,
            horizons,
        )
        for h, result in results.items():
            preds, truths, _ = pooled[h]
            preds.extend(result.predictions)
            truths.extend(
                round_half_away_from_zero(rec.consumption, template.decimals)
                for rec in window.target[:h]
            )
            pooled[h] = (preds, truths, pooled[h][2] + len(result.faults))
    name = model if model is not None else getattr(backend, "name", "backend")
    rows = tuple(
        EvalRow(
            model=name,
            source_building=building,
            target_building=building,
            horizon=h,
            rmse=rmse(preds, truths),
            mae=mae(preds, truths),
            windows=len(windows),
            faults=faults,
        )
        for h, (preds, truths, faults) in pooled.items()
    )
    return EvalReport(
        rows=rows,
        metadata=(
            "aggregation: pooled over all (window, step) residuals per cell",
            f"stride: {stride} hours between test windows",
            "horizons share one rollout per window (prefix property)",
        ),
    )


class LinearARBackend:
    """Ridge autoregression exposed through the sentence interface."""

    def __init__(self, template: PromptTemplate, weights: np.ndarray, order: int, ridge: float):
        self._template = template
        self._weights = weights
        self._order = order
        self._ridge = ridge

    @property
    def name(self) -> str:
        return f"linear_ar[p={self._order},lam={self._ridge:g}]"

    @property
    def weights(self) -> np.ndarray:
        return self._weights.copy()

    def next_sentence(self, ctx: GenerationContext) -> BackendAnswer:
        if len(ctx.sentences) < self._order:
            raise ContextTooShort(
                f"need {self._order} context sentences, have {len(ctx.sentences)}"
            )
        recent = []
        for sentence in ctx.sentences[-self._order :]:
            try:
                _, value = parse_strict(self._template, sentence)
            except ParseError as exc:
                raise ContextUnparseable(str(exc)) from exc
            recent.append(value)
        # weights[j] multiplies the value j+1 hours back
        lags = recent[::-1]
        prediction = max(0.0, float(np.dot(self._weights, lags)))
        return BackendAnswer(
            sentence=render_value(self._template, ctx.next_timestamp_hint, prediction),
            latency=0.0,
        )


def baseline_linear_ar(
    train: LoadSeries, template: PromptTemplate, order: int, ridge: float = 0.0
) -> LinearARBackend:
    """Fit x_t ~ sum_j w_j x_{t-j} by ridge-regularized normal equations.

    Solved with a least-squares routine so rank-deficient designs (constant
    series at ridge 0) take the minimum-norm solution instead of failing.
    """
    if order < 1:
        raise ValueError("order must be positive")
    if ridge < 0:
        raise ValueError("ridge must be non-negative")
    values = train.values()
    if values.size <= order:
        raise ValueError(f"need more than {order} records to fit, have {values.size}")
    rows = values.size - order
    design = np.empty((rows, order))
    for j in range(order):
        # column j holds the value j+1 steps before the target
        design[:, j] = values[order - 1 - j : values.size - 1 - j]
    targets = values[order:]
    gram = design.T @ design + ridge * np.eye(order)
    moment = design.T @ targets
    try:
        weights, *_ = np.linalg.lstsq(gram, moment, rcond=None)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"normal equations unsolvable: {exc}") from None
    if not np.isfinite(weights).all():
        raise SingularSystem("normal equations produced non-finite coefficients")
    return LinearARBackend(template, weights, order, ridge)


def _format_metric(value: float | None, error: str | None) -> str:
    if error is not None:
        return "error"
    return f"{value:.3f}"


def render_report(report: EvalReport, format: str = "text-table") -> str:
    """Render sorted rows as a text table or CSV (3-decimal metrics)."""
    rows = report.sorted_rows()
    if not rows:
        raise EmptyReport("report has no rows")
    header = [
        "model",
        "source_building",
        "target_building",
        "horizon",
        "rmse",
        "mae",
        "windows",
        "faults",
    ]
    cells = [
        [
            row.model,
            row.source_building,
            row.target_building,
            str(row.horizon),
            _format_metric(row.rmse, row.error),
            _format_metric(row.mae, row.error),
            str(row.windows),
            str(row.faults),
        ]
        for row in rows
    ]
    if format == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(cells)
        return out.getvalue()
    if format == "text-table":
        widths = [
            max(len(header[i]), max(len(row[i]) for row in cells))
            for i in range(len(header))
        ]
        lines = [f"# {note}" for note in report.metadata]
        lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)))
        lines.append("  ".join("-" * w for w in widths))
        for row in cells:
            lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)))
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {format!r}")
