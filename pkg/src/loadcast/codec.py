"""Sentence template codec: load records to text and back.

The default template renders a record as

    The electric load at 2018-01-01 13:00 is 132.4.

Strict parsing inverts exactly that shape; lenient parsing salvages the last
numeric token from arbitrary model output.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime
from decimal import ROUND_HALF_UP, Decimal
from functools import lru_cache

from .data import LoadRecord, format_timestamp, parse_timestamp
from .errors import LoadcastError

DEFAULT_PATTERN = "The electric load at {Time} is {Usage}."

_TIME_RE = r"(\d{4}-\d{2}-\d{2} \d{2}:\d{2})"
_USAGE_RE = r"([-+]?\d+(?:\.\d+)?)"
# Unsigned here: consumption is non-negative and a leading sign would let the
# year fragment of "2019-12-01" read as a negative number.
_NUMBER_TOKEN_RE = re.compile(r"\d+(?:\.\d+)?")
_PLACEHOLDER_RE = re.compile(r"\{[^{}]*\}")


class ParseError(LoadcastError):
    """Model output could not be decoded into (timestamp, value)."""


class NoMatch(ParseError):
    """The sentence does not have the template's shape."""


class BadTimestamp(ParseError):
    """The time slot matched but is not a valid timestamp."""


class BadNumber(ParseError):
    """The usage slot matched but is not a valid number."""


class NoNumber(ParseError):
    """Lenient parsing found no numeric token at all."""


class NotChronological(LoadcastError):
    """Records handed to the context renderer are out of order."""


@dataclass(frozen=True)
class PromptTemplate:
    """A sentence pattern with {Time} and {Usage} slots, and a rounding width."""

    pattern: str = DEFAULT_PATTERN
    decimals: int = 1

    def __post_init__(self):
        if self.decimals < 0:
            raise ValueError("decimals must be non-negative")
        slots = _PLACEHOLDER_RE.findall(self.pattern)
        if sorted(slots) != ["{Time}", "{Usage}"]:
            raise ValueError(
                "pattern must contain exactly one {Time} and one {Usage} "
                f"placeholder, found {slots}"
            )


def round_half_away_from_zero(value: float, decimals: int) -> float:
    """Round with ties away from zero (so 0.25 -> 0.3 at one decimal)."""
    quantum = Decimal(1).scaleb(-decimals)
    return float(Decimal(repr(float(value))).quantize(quantum, rounding=ROUND_HALF_UP))


def format_value(value: float, decimals: int) -> str:
    """Render a value with exactly ``decimals`` fraction digits."""
    quantum = Decimal(1).scaleb(-decimals)
    return str(Decimal(repr(float(value))).quantize(quantum, rounding=ROUND_HALF_UP))


def render_value(template: PromptTemplate, timestamp: datetime, value: float) -> str:
    """Render one (timestamp, value) pair as a template sentence."""
    return template.pattern.replace("{Time}", format_timestamp(timestamp)).replace(
        "{Usage}", format_value(value, template.decimals)
    )


def render(template: PromptTemplate, record: LoadRecord) -> str:
    return render_value(template, record.timestamp, record.consumption)


def _normalize(text: str) -> str:
    return re.sub(r"\s+", " ", text.strip())


@lru_cache(maxsize=64)
def _strict_regex(pattern: str) -> re.Pattern:
    normalized = _normalize(pattern)
    time_at = normalized.index("{Time}")
    usage_at = normalized.index("{Usage}")
    pieces = []
    cursor = 0
    for at, token, group in sorted(
        [(time_at, "{Time}", _TIME_RE), (usage_at, "{Usage}", _USAGE_RE)]
    ):
        pieces.append(re.escape(normalized[cursor:at]))
        pieces.append(group)
        cursor = at + len(token)
    pieces.append(re.escape(normalized[cursor:]))
    return re.compile("".join(pieces))


def parse_strict(template: PromptTemplate, sentence: str) -> tuple[datetime, float]:
    """Invert the template exactly, tolerating only whitespace variation."""
    normalized = _normalize(sentence)
    match = _strict_regex(template.pattern).fullmatch(normalized)
    if match is None:
        raise NoMatch(f"sentence does not match template: {sentence!r}")
    time_first = _normalize(template.pattern).index("{Time}") < _normalize(
        template.pattern
    ).index("{Usage}")
    time_text = match.group(1) if time_first else match.group(2)
    usage_text = match.group(2) if time_first else match.group(1)
    try:
        ts = parse_timestamp(time_text)
    except ValueError:
        raise BadTimestamp(f"not a valid timestamp: {time_text!r}") from None
    try:
        value = float(usage_text)
    except ValueError:
        raise BadNumber(f"not a valid number: {usage_text!r}") from None
    return ts, value


def parse_lenient(sentence: str) -> float:
    """Take the last unsigned numeric token in the sentence as the value."""
    tokens = _NUMBER_TOKEN_RE.findall(sentence)
    if not tokens:
        raise NoNumber(f"no numeric token in {sentence!r}")
    return float(tokens[-1])


def render_context(template: PromptTemplate, records) -> list[str]:
    """Render a chronological run of records, one sentence per record."""
    records = list(records)
    for a, b in zip(records, records[1:]):
        if b.timestamp <= a.timestamp:
            raise NotChronological(
                f"records out of order: {a.timestamp} then {b.timestamp}"
            )
    return [render(template, rec) for rec in records]
