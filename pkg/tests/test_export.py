"""JSONL exports: fine-tuning pairs and evaluation windows."""

from __future__ import annotations

import io
import json
from datetime import datetime

import pytest

from loadcast.codec import parse_strict, round_half_away_from_zero
from loadcast.data import HOUR, LoadRecord, LoadSeries, parse_timestamp
from loadcast.export import SeriesTooShort, export_eval_windows, export_pairs

T0 = datetime(2018, 1, 1, 0, 0)


def series(values, building="A"):
    return LoadSeries(
        building,
        tuple(
            LoadRecord(building, T0 + i * HOUR, float(v))
            for i, v in enumerate(values)
        ),
    )


class TestExportPairs:
    @pytest.mark.parametrize("length,n,expected", [(31, 30, 1), (100, 30, 70), (5, 2, 3)])
    def test_count_is_length_minus_n(self, template, length, n, expected):
        sink = io.StringIO()
        count = export_pairs(series(range(length)), template, n, sink)
        assert count == expected
        assert len(sink.getvalue().splitlines()) == expected

    def test_exact_length_is_too_short(self, template):
        with pytest.raises(SeriesTooShort):
            export_pairs(series(range(30)), template, 30, io.StringIO())

    def test_pairs_reparse_and_chain(self, template):
        sink = io.StringIO()
        export_pairs(series(range(40)), template, 30, sink)
        for line in sink.getvalue().splitlines():
            pair = json.loads(line)
            inputs = pair["input"].split("\n")
            assert len(inputs) == 30
            parsed = [parse_strict(template, s) for s in inputs]
            target_ts, _ = parse_strict(template, pair["target"])
            assert target_ts == parsed[-1][0] + HOUR

    def test_lines_are_newline_terminated(self, template):
        sink = io.StringIO()
        export_pairs(series(range(32)), template, 30, sink)
        assert sink.getvalue().endswith("\n")
        assert "\r" not in sink.getvalue()

    def test_reexport_is_byte_identical(self, template):
        first = io.StringIO()
        export_pairs(series(range(40)), template, 30, first)
        second = io.StringIO()
        export_pairs(series(range(40)), template, 30, second)
        assert first.getvalue() == second.getvalue()


class TestExportEvalWindows:
    def test_window_counts_for_a_744_hour_month(self, template, month_split):
        test = month_split().test
        assert export_eval_windows(test, template, 30, 24, 24, io.StringIO()) == 29
        assert export_eval_windows(test, template, 30, 24, 1, io.StringIO()) == 691

    def test_document_shape(self, template):
        sink = io.StringIO()
        count = export_eval_windows(series(range(60)), template, 30, 24, 24, sink)
        assert count == 1
        doc = json.loads(sink.getvalue().splitlines()[0])
        assert set(doc) == {"observation", "targets", "start"}
        assert len(doc["observation"]) == 30
        assert len(doc["targets"]) == 24
        start = parse_timestamp(doc["start"])
        last_obs_ts, _ = parse_strict(template, doc["observation"][-1])
        assert start == last_obs_ts + HOUR

    def test_targets_carry_template_precision(self, template):
        values = [v + 0.1234 for v in range(60)]
        sink = io.StringIO()
        export_eval_windows(series(values), template, 30, 24, 24, sink)
        doc = json.loads(sink.getvalue().splitlines()[0])
        expected = [
            round_half_away_from_zero(v, template.decimals) for v in values[30:54]
        ]
        assert doc["targets"] == expected

    def test_short_series_writes_nothing(self, template):
        sink = io.StringIO()
        assert export_eval_windows(series(range(10)), template, 30, 24, 1, sink) == 0
        assert sink.getvalue() == ""

    def test_rejects_zero_horizon(self, template):
        with pytest.raises(ValueError):
            export_eval_windows(series(range(60)), template, 30, 0, 24, io.StringIO())
