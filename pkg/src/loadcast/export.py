"""JSONL exports consumed by the fine-tuning and serving side.

Two formats, both UTF-8 with one JSON object per ``\\n``-terminated line:

* fine-tuning pairs: ``{"input": "<n sentences>", "target": "<next sentence>"}``
* evaluation windows: ``{"observation": [sentences], "targets": [values],
  "start": "<first target timestamp>"}``
"""

from __future__ import annotations

import json

from .codec import PromptTemplate, render, round_half_away_from_zero
from .data import LoadSeries, format_timestamp, make_windows
from .errors import DataError


class SeriesTooShort(DataError):
    """Not enough records to cut a single training pair."""


def export_pairs(train: LoadSeries, template: PromptTemplate, n: int, sink) -> int:
    """Write sliding (n sentences -> next sentence) pairs, stride 1.

    Returns the number of pairs, always len(train) - n.
    """
    if n < 1:
        raise ValueError("n must be positive")
    records = train.records
    if len(records) <= n:
        raise SeriesTooShort(
            f"need more than {n} records to export pairs, have {len(records)}"
        )
    sentences = [render(template, rec) for rec in records]
    count = 0
    for start in range(len(records) - n):
        pair = {
            "input": "\n".join(sentences[start : start + n]),
            "target": sentences[start + n],
        }
        sink.write(json.dumps(pair, ensure_ascii=False) + "\n")
        count += 1
    return count


def export_eval_windows(
    test: LoadSeries, template: PromptTemplate, n: int, m: int, stride: int, sink
) -> int:
    """Write evaluation windows; targets are rounded to the template's decimals.

    Rounding the targets keeps them comparable with predictions, which pass
    through the codec and therefore always carry template precision.
    """
    windows = make_windows(test, n=n, m=m, stride=stride)
    for window in windows:
        doc = {
            "observation": [render(template, rec) for rec in window.observation],
            "targets": [
                round_half_away_from_zero(rec.consumption, template.decimals)
                for rec in window.target
            ],
            "start": format_timestamp(window.target[0].timestamp),
        }
        sink.write(json.dumps(doc, ensure_ascii=False) + "\n")
    return len(windows)
