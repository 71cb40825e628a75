"""Shared fixtures: templates, synthetic series, splits."""

from __future__ import annotations

import pytest

from loadcast.codec import PromptTemplate
from loadcast.data import SynthConfig, split_by_months, synth_generate


@pytest.fixture
def template() -> PromptTemplate:
    return PromptTemplate()


@pytest.fixture
def synth_building():
    """Factory for a seeded synthetic building series."""

    def make(building_id="A", seed=7, days=90, **kwargs):
        return synth_generate(SynthConfig(seed=seed, days=days, **kwargs), building_id)

    return make


@pytest.fixture
def month_split(synth_building):
    """A 90-day series split into three calendar months."""

    def make(building_id="A", seed=7, **kwargs):
        series = synth_building(building_id, seed=seed, days=90, **kwargs)
        return split_by_months(series, 1, 1, 1)

    return make
