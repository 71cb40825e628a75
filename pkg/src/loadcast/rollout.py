"""Autoregressive forecasting loop over sentence backends.

Each step renders the context, asks the backend for the next sentence, parses
it, and re-renders the parsed value canonically at the expected timestamp
before appending. Faults (unparseable output, backend failures) degrade
through lenient parsing down to persisting the last value, and every fault is
recorded.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from datetime import datetime

from .codec import (
    NoNumber,
    ParseError,
    PromptTemplate,
    parse_lenient,
    parse_strict,
    render,
    render_value,
    round_half_away_from_zero,
)
from .backends import BackendError, GenerationContext
from .data import HOUR, LoadSeries, format_timestamp
from .errors import LoadcastError

CONTEXT_MODES = ("sliding", "growing")
FALLBACKS = ("persist_last",)


class BackendExhausted(LoadcastError):
    """Every recovery path failed for one step; cannot happen with a fallback."""


@dataclass(frozen=True)
class RolloutConfig:
    """Shape of one autoregressive run."""

    n: int = 30
    m: int = 24
    context_mode: str = "sliding"
    retry_limit: int = 3
    fallback: str = "persist_last"

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("n and m must be positive")
        if self.context_mode not in CONTEXT_MODES:
            raise ValueError(f"context_mode must be one of {CONTEXT_MODES}")
        if self.retry_limit < 1:
            raise ValueError("retry_limit must be at least 1")
        if self.fallback not in FALLBACKS:
            raise ValueError(f"fallback must be one of {FALLBACKS}")


@dataclass(frozen=True)
class FaultRecord:
    """One recovery event during a rollout, 1-based step index."""

    step: int
    kind: str
    recovery: str


@dataclass(frozen=True)
class ForecastResult:
    """Predictions plus the exact sentences fed forward and any faults."""

    building_id: str
    start_timestamp: datetime
    predictions: tuple[float, ...]
    transcript: tuple[str, ...]
    faults: tuple[FaultRecord, ...]

    def to_json_dict(self) -> dict:
        return {
            "building_id": self.building_id,
            "start_timestamp": format_timestamp(self.start_timestamp),
            "predictions": list(self.predictions),
            "transcript": list(self.transcript),
            "faults": [dataclasses.asdict(f) for f in self.faults],
        }


def forecast(
    history: LoadSeries,
    backend,
    template: PromptTemplate,
    config: RolloutConfig,
) -> ForecastResult:
    """Roll the backend forward ``config.m`` hours from ``config.n`` observations."""
    if len(history) != config.n:
        raise ValueError(f"history has {len(history)} records, config.n is {config.n}")
    if not history.is_hourly():
        raise ValueError("history must be hourly without gaps")

    sentences = [render(template, rec) for rec in history.records]
    last_value = round_half_away_from_zero(
        history.records[-1].consumption, template.decimals
    )
    last_timestamp = history.records[-1].timestamp

    predictions: list[float] = []
    transcript: list[str] = []
    faults: list[FaultRecord] = []

    for step in range(1, config.m + 1):
        hint = last_timestamp + HOUR
        if config.context_mode == "sliding":
            window = tuple(sentences[-config.n :])
        else:
            window = tuple(sentences)
        ctx = GenerationContext(sentences=window, next_timestamp_hint=hint)

        value = None
        fault = None
        for _attempt in range(1, config.retry_limit + 1):
            try:
                answer = backend.next_sentence(ctx)
            except BackendError:
                fault = ("backend_error", None)
                continue
            try:
                _, value = parse_strict(template, answer.sentence)
                fault = None
                break
            except ParseError:
                pass
            try:
                value = parse_lenient(answer.sentence)
                fault = ("strict_parse_failure", "lenient")
                break
            except NoNumber:
                fault = ("parse_failure", None)

        if value is None:
            kind = fault[0] if fault else "backend_error"
            value = last_value
            faults.append(FaultRecord(step=step, kind=kind, recovery="persist_last"))
        elif fault is not None:
            faults.append(FaultRecord(step=step, kind=fault[0], recovery=fault[1]))

        accepted = round_half_away_from_zero(max(0.0, value), template.decimals)
        sentence = render_value(template, hint, accepted)
        sentences.append(sentence)
        predictions.append(accepted)
        transcript.append(sentence)
        last_value = accepted
        last_timestamp = hint

    return ForecastResult(
        building_id=history.building_id,
        start_timestamp=history.records[-1].timestamp + HOUR,
        predictions=tuple(predictions),
        transcript=tuple(transcript),
        faults=tuple(faults),
    )


def forecast_horizons(
    history: LoadSeries,
    backend,
    template: PromptTemplate,
    config: RolloutConfig,
    horizons,
) -> dict[int, ForecastResult]:
    """One rollout to the longest horizon, sliced into prefixes.

    Shorter horizons are exact prefixes of the longest run, so a single pass
    serves every requested horizon.
    """
    horizons = sorted(set(horizons))
    if not horizons:
        raise ValueError("horizons must be non-empty")
    if horizons[0] < 1:
        raise ValueError("horizons must be positive")
    full = forecast(
        history, backend, template, dataclasses.replace(config, m=horizons[-1])
    )
    return {
        h: ForecastResult(
            building_id=full.building_id,
            start_timestamp=full.start_timestamp,
            predictions=full.predictions[:h],
            transcript=full.transcript[:h],
            faults=tuple(f for f in full.faults if f.step <= h),
        )
        for h in horizons
    }
