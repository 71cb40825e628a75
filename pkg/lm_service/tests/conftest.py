"""Shared fixtures: toy base model, exported pairs, fine-tune, live server.

The fixtures produce training data through the sibling forecasting
package's public API and talk to the service over real HTTP, so the suite
exercises exactly the surfaces a deployment would.
"""

from __future__ import annotations

import json
import socket
import sys
import threading
import time
from contextlib import contextmanager
from pathlib import Path

import pytest
import uvicorn

from lm_service import FinetuneJobSpec, build_toy_base, create_app, finetune

# the wire-protocol contract checks live with the forecasting package
PRIMARY_TESTS = Path(__file__).resolve().parents[2] / "tests"
if str(PRIMARY_TESTS) not in sys.path:
    sys.path.insert(0, str(PRIMARY_TESTS))

PAIR_COUNT = 200
CONTEXT_SENTENCES = 8


@pytest.fixture(scope="session")
def toy_base_dir(tmp_path_factory) -> Path:
    return build_toy_base(tmp_path_factory.mktemp("toy") / "base", seed=0)


@pytest.fixture(scope="session")
def pairs_path(tmp_path_factory) -> Path:
    from loadcast import PromptTemplate, SynthConfig, synth_generate
    from loadcast.data import LoadSeries
    from loadcast.export import export_pairs

    template = PromptTemplate()
    series = synth_generate(SynthConfig(seed=7, days=30), "A")
    # exactly PAIR_COUNT pairs needs n + PAIR_COUNT records
    trimmed = LoadSeries(
        building_id="A",
        records=series.records[: CONTEXT_SENTENCES + PAIR_COUNT],
    )
    path = tmp_path_factory.mktemp("pairs") / "pairs.jsonl"
    with path.open("w", encoding="utf-8") as sink:
        count = export_pairs(trimmed, template, CONTEXT_SENTENCES, sink)
    assert count == PAIR_COUNT
    return path


@pytest.fixture(scope="session")
def training_contexts(pairs_path) -> list[str]:
    with pairs_path.open(encoding="utf-8") as handle:
        return [json.loads(line)["input"] for line in handle]


@pytest.fixture(scope="session")
def tuned(toy_base_dir, pairs_path, tmp_path_factory):
    spec = FinetuneJobSpec(
        base_model=str(toy_base_dir),
        pairs_path=pairs_path,
        out_dir=tmp_path_factory.mktemp("model") / "tuned",
    )
    return finetune(spec)


@contextmanager
def serving(model_dir):
    """Run the app under uvicorn in a thread; yields the base URL."""
    app = create_app(model_dir)
    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
    config = uvicorn.Config(app, host="127.0.0.1", port=port, log_level="warning")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.monotonic() + 30
    while not server.started:
        if not thread.is_alive():
            raise RuntimeError("server thread died during startup")
        if time.monotonic() > deadline:
            raise RuntimeError("server did not start within 30 s")
        time.sleep(0.05)
    try:
        yield f"http://127.0.0.1:{port}"
    finally:
        server.should_exit = True
        thread.join(timeout=10)


@pytest.fixture(scope="session")
def base_server(toy_base_dir):
    with serving(toy_base_dir) as url:
        yield url


@pytest.fixture(scope="session")
def tuned_server(tuned):
    with serving(tuned.model_dir) as url:
        yield url
