"""Template rendering and the two parsing modes."""

from __future__ import annotations

from datetime import datetime

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loadcast.codec import (
    BadTimestamp,
    NoMatch,
    NoNumber,
    NotChronological,
    PromptTemplate,
    format_value,
    parse_lenient,
    parse_strict,
    render,
    render_context,
    render_value,
    round_half_away_from_zero,
)
from loadcast.data import HOUR, LoadRecord

T0 = datetime(2018, 1, 1, 13, 0)

hour_timestamps = st.datetimes(
    min_value=datetime(1900, 1, 1), max_value=datetime(2099, 12, 31)
).map(lambda d: d.replace(minute=0, second=0, microsecond=0))


class TestRounding:
    @pytest.mark.parametrize(
        "value,decimals,expected",
        [
            (0.25, 1, 0.3),
            (0.35, 1, 0.4),
            (2.5, 0, 3.0),
            (132.44, 1, 132.4),
            (132.45, 1, 132.5),
            (-0.25, 1, -0.3),
            (99.999, 2, 100.0),
        ],
    )
    def test_ties_go_away_from_zero(self, value, decimals, expected):
        assert round_half_away_from_zero(value, decimals) == expected

    @pytest.mark.parametrize(
        "value,decimals,expected",
        [(132.44, 1, "132.4"), (7, 1, "7.0"), (7.5, 0, "8"), (0.049, 2, "0.05")],
    )
    def test_format_has_fixed_width(self, value, decimals, expected):
        assert format_value(value, decimals) == expected

    @given(st.floats(0, 1e9), st.integers(0, 4))
    def test_rounding_is_idempotent(self, value, decimals):
        once = round_half_away_from_zero(value, decimals)
        assert round_half_away_from_zero(once, decimals) == once


class TestTemplate:
    def test_default_pattern_renders_verbatim(self):
        rec = LoadRecord("A", T0, 132.44)
        assert render(PromptTemplate(), rec) == (
            "The electric load at 2018-01-01 13:00 is 132.4."
        )

    @pytest.mark.parametrize(
        "pattern",
        [
            "no slots at all",
            "only {Time} here",
            "only {Usage} here",
            "{Time} {Time} {Usage}",
            "{Time} {Usage} {Extra}",
        ],
    )
    def test_rejects_bad_patterns(self, pattern):
        with pytest.raises(ValueError):
            PromptTemplate(pattern=pattern)

    def test_rejects_negative_decimals(self):
        with pytest.raises(ValueError):
            PromptTemplate(decimals=-1)

    def test_custom_pattern_and_slot_order(self):
        template = PromptTemplate(pattern="{Usage} kWh used at {Time}", decimals=2)
        sentence = render_value(template, T0, 5.125)
        assert sentence == "5.13 kWh used at 2018-01-01 13:00"
        assert parse_strict(template, sentence) == (T0, 5.13)


class TestParseStrict:
    def test_inverts_render(self, template):
        sentence = render_value(template, T0, 99.96)
        assert parse_strict(template, sentence) == (T0, 100.0)

    def test_tolerates_whitespace_variation(self, template):
        sentence = "  The  electric load at 2018-01-01 13:00   is 7.0. "
        assert parse_strict(template, sentence) == (T0, 7.0)

    @pytest.mark.parametrize(
        "sentence",
        [
            "something else entirely",
            "The electric load at 2018-01-01 13:00 is high.",
            "electric load at 2018-01-01 13:00 is 7.0.",
            "The electric load at 2018-01-01 13:00 is 7.0",  # missing final period
            "The electric load at Jan 1 is 7.0.",
        ],
    )
    def test_wrong_shape_is_no_match(self, template, sentence):
        with pytest.raises(NoMatch):
            parse_strict(template, sentence)

    @pytest.mark.parametrize(
        "time_text", ["2018-13-01 05:00", "2018-01-01 25:00", "2018-02-30 05:00"]
    )
    def test_impossible_dates_are_bad_timestamps(self, template, time_text):
        sentence = f"The electric load at {time_text} is 7.0."
        with pytest.raises(BadTimestamp):
            parse_strict(template, sentence)

    @given(ts=hour_timestamps, value=st.floats(0, 1e6), decimals=st.integers(0, 3))
    @settings(max_examples=300)
    def test_round_trip_property(self, ts, value, decimals):
        template = PromptTemplate(decimals=decimals)
        parsed = parse_strict(template, render_value(template, ts, value))
        assert parsed == (ts, round_half_away_from_zero(value, decimals))


class TestParseLenient:
    @pytest.mark.parametrize(
        "sentence,expected",
        [
            ("The electric load at 2018-01-01 13:00 is 132.4.", 132.4),
            ("probably 7 then 9 at the end", 9.0),
            ("value: 55", 55.0),
            ("55.5!!!", 55.5),
        ],
    )
    def test_takes_the_last_number(self, sentence, expected):
        assert parse_lenient(sentence) == expected

    @pytest.mark.parametrize("sentence", ["no numerals here", "", "NaN none null"])
    def test_no_number_raises(self, sentence):
        with pytest.raises(NoNumber):
            parse_lenient(sentence)

    @given(value=st.floats(0, 1e6), decimals=st.integers(0, 3))
    def test_lenient_agrees_with_strict_on_clean_sentences(self, value, decimals):
        template = PromptTemplate(decimals=decimals)
        sentence = render_value(template, T0, value)
        _, strict_value = parse_strict(template, sentence)
        assert parse_lenient(sentence) == strict_value


class TestRenderContext:
    def test_renders_one_sentence_per_record(self, template):
        records = [LoadRecord("A", T0 + i * HOUR, float(i)) for i in range(3)]
        sentences = render_context(template, records)
        assert len(sentences) == 3
        assert all(parse_strict(template, s) for s in sentences)

    def test_rejects_out_of_order_records(self, template):
        records = [LoadRecord("A", T0 + HOUR, 1.0), LoadRecord("A", T0, 2.0)]
        with pytest.raises(NotChronological):
            render_context(template, records)
