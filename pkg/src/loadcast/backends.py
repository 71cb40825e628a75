"""Sentence-generation backends behind a single call shape.

Every backend answers ``next_sentence(ctx)`` with one sentence continuing the
context. Local backends (oracle, persistence, seasonal naive, scripted) are
deterministic; the remote backend speaks a small HTTP protocol with retries.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from datetime import datetime, timedelta

import requests

from .codec import ParseError, PromptTemplate, parse_strict, render_value
from .data import LoadSeries
from .errors import BackendError


class HintOutsideTruth(BackendError):
    """The oracle has no record at the requested timestamp."""


class ContextUnparseable(BackendError):
    """A backend needed a context sentence it could not parse."""


class ContextTooShort(BackendError):
    """The context holds fewer sentences than the backend needs."""


class PeriodNotCovered(BackendError):
    """The context does not reach back one full seasonal period."""


class ScriptExhausted(BackendError):
    """A scripted backend ran out of prepared answers."""


class Timeout(BackendError):
    """The remote endpoint did not answer within the deadline."""


class TransportError(BackendError):
    """The remote endpoint was unreachable or returned a failure status."""


class BadResponse(BackendError):
    """The remote endpoint answered 200 with an invalid payload."""


@dataclass(frozen=True)
class GenerationContext:
    """The prompt handed to a backend: sentences plus the expected next hour."""

    sentences: tuple[str, ...]
    next_timestamp_hint: datetime

    def __post_init__(self):
        if not self.sentences:
            raise ValueError("context must hold at least one sentence")
        for sentence in self.sentences:
            if "\n" in sentence:
                raise ValueError(f"context sentence contains a newline: {sentence!r}")

    def joined(self) -> str:
        return "\n".join(self.sentences)


@dataclass(frozen=True)
class BackendAnswer:
    """One generated sentence plus bookkeeping about how it was obtained."""

    sentence: str
    latency: float
    attempt: int = 1

    def __post_init__(self):
        if self.latency < 0:
            raise ValueError("latency must be non-negative")
        if self.attempt < 1:
            raise ValueError("attempt counts from 1")


class OracleBackend:
    """Answers from ground truth; the ceiling every other backend chases."""

    def __init__(self, truth: LoadSeries, template: PromptTemplate):
        self._values = {rec.timestamp: rec.consumption for rec in truth.records}
        self._template = template

    @property
    def name(self) -> str:
        return "oracle"

    def next_sentence(self, ctx: GenerationContext) -> BackendAnswer:
        hint = ctx.next_timestamp_hint
        if hint not in self._values:
            raise HintOutsideTruth(f"no ground truth at {hint}")
        return BackendAnswer(
            sentence=render_value(self._template, hint, self._values[hint]),
            latency=0.0,
        )


class PersistenceBackend:
    """Repeats the last observed value at the next hour."""

    def __init__(self, template: PromptTemplate):
        self._template = template

    @property
    def name(self) -> str:
        return "persistence"

    def next_sentence(self, ctx: GenerationContext) -> BackendAnswer:
        try:
            _, value = parse_strict(self._template, ctx.sentences[-1])
        except ParseError as exc:
            raise ContextUnparseable(str(exc)) from exc
        return BackendAnswer(
            sentence=render_value(self._template, ctx.next_timestamp_hint, value),
            latency=0.0,
        )


class SeasonalNaiveBackend:
    """Repeats the value from one seasonal period (default a day) earlier."""

    def __init__(self, template: PromptTemplate, period_hours: int = 24):
        if period_hours < 1:
            raise ValueError("period_hours must be positive")
        self._template = template
        self._period = period_hours

    @property
    def name(self) -> str:
        return f"seasonal_naive[{self._period}]"

    def next_sentence(self, ctx: GenerationContext) -> BackendAnswer:
        if len(ctx.sentences) < self._period:
            raise PeriodNotCovered(
                f"need {self._period} context sentences, have {len(ctx.sentences)}"
            )
        back = ctx.sentences[len(ctx.sentences) - self._period]
        try:
            ts, value = parse_strict(self._template, back)
        except ParseError as exc:
            raise ContextUnparseable(str(exc)) from exc
        expected = ctx.next_timestamp_hint - timedelta(hours=self._period)
        if ts != expected:
            raise PeriodNotCovered(
                f"sentence one period back is for {ts}, expected {expected}"
            )
        return BackendAnswer(
            sentence=render_value(self._template, ctx.next_timestamp_hint, value),
            latency=0.0,
        )


class ScriptedBackend:
    """Replays a fixed list of answers; used to inject faults in tests.

    Each distinct context consumes the next script entry. Repeating a context
    (a caller retry) replays the entry that context got the first time, so a
    single malformed entry stays malformed under retries.
    """

    def __init__(self, script):
        self._script = list(script)
        self._cursor = 0
        self._seen: dict[tuple[tuple[str, ...], datetime], str] = {}

    @property
    def name(self) -> str:
        return "scripted"

    def next_sentence(self, ctx: GenerationContext) -> BackendAnswer:
        key = (ctx.sentences, ctx.next_timestamp_hint)
        if key not in self._seen:
            if self._cursor >= len(self._script):
                raise ScriptExhausted(
                    f"script of {len(self._script)} answers used up"
                )
            self._seen[key] = self._script[self._cursor]
            self._cursor += 1
        return BackendAnswer(sentence=self._seen[key], latency=0.0)


@dataclass
class RemoteBackend:
    """Client for an HTTP generation endpoint.

    POST {endpoint}/generate with ``{"context": ..., "max_new_tokens": ...}``
    must yield 200 and ``{"generated": "<one sentence>"}``. Timeouts, transport
    failures and 5xx answers are retried with doubling backoff; any other
    non-200 fails fast, and a 200 with a bad payload is never retried.
    """

    endpoint: str
    timeout: float = 10.0
    retries: int = 3
    max_new_tokens: int = 32
    backoff: float = 0.25
    _sleep: object = field(default=time.sleep, repr=False)

    def __post_init__(self):
        if self.retries < 1:
            raise ValueError("retries must be at least 1")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        self.endpoint = self.endpoint.rstrip("/")

    @property
    def name(self) -> str:
        return f"remote[{self.endpoint}]"

    def next_sentence(self, ctx: GenerationContext) -> BackendAnswer:
        payload = {"context": ctx.joined(), "max_new_tokens": self.max_new_tokens}
        last_error: BackendError | None = None
        for attempt in range(1, self.retries + 1):
            if attempt > 1:
                self._sleep(self.backoff * 2 ** (attempt - 2))
            started = time.monotonic()
            try:
                response = requests.post(
                    f"{self.endpoint}/generate", json=payload, timeout=self.timeout
                )
            except requests.exceptions.Timeout:
                last_error = Timeout(
                    f"no answer from {self.endpoint} within {self.timeout}s"
                )
                continue
            except requests.exceptions.RequestException as exc:
                last_error = TransportError(f"{self.endpoint}: {exc}")
                continue
            latency = time.monotonic() - started
            if response.status_code >= 500:
                last_error = TransportError(
                    f"{self.endpoint} answered {response.status_code}"
                )
                continue
            if response.status_code != 200:
                raise TransportError(
                    f"{self.endpoint} answered {response.status_code}: "
                    f"{_error_detail(response)}"
                )
            return BackendAnswer(
                sentence=_extract_sentence(response),
                latency=latency,
                attempt=attempt,
            )
        assert last_error is not None
        raise last_error


def _error_detail(response) -> str:
    try:
        body = response.json()
    except ValueError:
        return response.text[:200]
    if isinstance(body, dict) and isinstance(body.get("error"), str):
        return body["error"]
    return json.dumps(body)[:200]


def _extract_sentence(response) -> str:
    try:
        body = response.json()
    except ValueError as exc:
        raise BadResponse(f"200 with non-JSON body: {exc}") from None
    if not isinstance(body, dict) or "generated" not in body:
        raise BadResponse(f"200 without a 'generated' field: {body!r}")
    sentence = body["generated"]
    if not isinstance(sentence, str):
        raise BadResponse(f"'generated' is not a string: {sentence!r}")
    if "\n" in sentence.strip():
        raise BadResponse(f"'generated' spans multiple lines: {sentence!r}")
    return sentence.strip()


def check_health(endpoint: str, timeout: float = 10.0) -> dict:
    """GET {endpoint}/health and validate the announced shape."""
    endpoint = endpoint.rstrip("/")
    try:
        response = requests.get(f"{endpoint}/health", timeout=timeout)
    except requests.exceptions.Timeout:
        raise Timeout(f"no health answer from {endpoint} within {timeout}s") from None
    except requests.exceptions.RequestException as exc:
        raise TransportError(f"{endpoint}: {exc}") from None
    if response.status_code != 200:
        raise TransportError(f"{endpoint}/health answered {response.status_code}")
    try:
        body = response.json()
    except ValueError as exc:
        raise BadResponse(f"health endpoint sent non-JSON: {exc}") from None
    if (
        not isinstance(body, dict)
        or body.get("status") != "ok"
        or not isinstance(body.get("model"), str)
    ):
        raise BadResponse(f"unexpected health payload: {body!r}")
    return body
