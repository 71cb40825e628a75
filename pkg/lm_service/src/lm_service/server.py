"""HTTP next-sentence generation service.

Wire protocol:
    POST /generate  {"context": "<sentences joined by \\n>", "max_new_tokens": n}
        -> 200 {"generated": "<one sentence>"}
        -> 400 {"error": msg} on a malformed body
        -> 500 {"error": msg} when generation itself fails
    GET /health -> 200 {"status": "ok", "model": "<identifier>"}

Decoding is greedy by default, which makes identical requests answer
identically; sampling is available through optional request fields.
"""

from __future__ import annotations

import argparse
import threading
from dataclasses import dataclass, field
from pathlib import Path

import torch
import uvicorn
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .errors import ModelLoadFailure


class GenerateRequest(BaseModel):
    context: str = Field(min_length=1)
    max_new_tokens: int = Field(default=32, ge=1)
    # sampling knobs, all inert unless do_sample is set
    do_sample: bool = False
    temperature: float | None = Field(default=None, gt=0)
    top_k: int | None = Field(default=None, ge=1)
    top_p: float | None = Field(default=None, gt=0, le=1)


@dataclass
class Generator:
    """Loaded model plus the lock that serializes generation.

    The lock matters: concurrent requests share one model, and a forward
    pass is not safe to interleave on shared tensors.
    """

    model_id: str
    tokenizer: object
    model: object
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def input_limit(self) -> int:
        limit = int(getattr(self.tokenizer, "model_max_length", 1024))
        # unset model_max_length is a huge sentinel, not a real limit
        return limit if 0 < limit <= 100_000 else 1024

    def generate(self, request: GenerateRequest) -> str:
        self.tokenizer.truncation_side = "left"
        encoded = self.tokenizer(
            request.context,
            truncation=True,
            max_length=self.input_limit,
            return_tensors="pt",
        )
        kwargs = {"max_new_tokens": request.max_new_tokens, "num_beams": 1}
        if request.do_sample:
            kwargs["do_sample"] = True
            for name in ("temperature", "top_k", "top_p"):
                value = getattr(request, name)
                if value is not None:
                    kwargs[name] = value
        else:
            kwargs["do_sample"] = False
        with self.lock, torch.inference_mode():
            output = self.model.generate(**encoded, **kwargs)
        text = self.tokenizer.decode(output[0], skip_special_tokens=True)
        # one sentence on the wire: cut at the first line break
        return text.strip().split("\n", 1)[0].strip()


def load_generator(model_dir: Path | str) -> Generator:
    from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

    try:
        tokenizer = AutoTokenizer.from_pretrained(model_dir)
        model = AutoModelForSeq2SeqLM.from_pretrained(model_dir)
    except Exception as exc:
        raise ModelLoadFailure(f"cannot load model from {model_dir!r}: {exc}") from exc
    model.eval()
    return Generator(model_id=str(model_dir), tokenizer=tokenizer, model=model)


def create_app(model_dir: Path | str) -> FastAPI:
    app = FastAPI(title="lm-service", docs_url=None, redoc_url=None)
    app.state.generator = load_generator(model_dir)

    @app.exception_handler(RequestValidationError)
    async def _malformed(request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        where = ".".join(str(part) for part in first.get("loc", ()) if part != "body")
        message = first.get("msg", "invalid request")
        detail = f"{where}: {message}" if where else message
        return JSONResponse(status_code=400, content={"error": detail})

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "model": app.state.generator.model_id}

    @app.post("/generate")
    def generate(request: GenerateRequest):
        try:
            sentence = app.state.generator.generate(request)
        except Exception as exc:
            return JSONResponse(
                status_code=500, content={"error": f"generation failed: {exc}"}
            )
        return {"generated": sentence}

    return app


def serve(model_dir: Path | str, host: str = "127.0.0.1", port: int = 8080) -> None:
    """Blocking; builds the app and runs it under uvicorn."""
    uvicorn.run(create_app(model_dir), host=host, port=port, log_level="warning")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="lm-serve", description="serve next-sentence generation over HTTP"
    )
    parser.add_argument("--model-dir", required=True, type=Path)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8080)
    args = parser.parse_args(argv)
    try:
        serve(args.model_dir, args.host, args.port)
    except ModelLoadFailure as exc:
        import sys

        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
