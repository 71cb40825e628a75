"""Fine-tune an encoder-decoder model on next-sentence pairs.

Input is JSONL with one ``{"input": "<n sentences>", "target": "<next
sentence>"}`` object per line, as produced by the forecasting package's
export command. Training minimizes the usual sequence-to-sequence
cross-entropy of the target given the input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import torch
from torch.utils.data import DataLoader

from .errors import BadPairsFile, ModelLoadFailure


@dataclass(frozen=True)
class FinetuneJobSpec:
    """Everything one fine-tuning run needs.

    base_model is a hub identifier or a local model directory; the two are
    interchangeable to the loader.
    """

    base_model: str
    pairs_path: Path
    out_dir: Path
    epochs: int = 3
    learning_rate: float = 5e-4
    max_input_tokens: int = 512
    max_output_tokens: int = 64
    batch_size: int = 8
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.base_model:
            raise ValueError("base_model must be non-empty")
        if self.epochs < 1:
            raise ValueError("epochs must be at least 1")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if self.max_input_tokens < 1 or self.max_output_tokens < 1:
            raise ValueError("token limits must be at least 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")


@dataclass(frozen=True)
class FinetuneResult:
    model_dir: Path
    losses: tuple[float, ...]
    log_path: Path


def load_pairs(path: Path | str) -> list[tuple[str, str]]:
    """Read and validate a pairs file; blank lines are skipped."""
    path = Path(path)
    if not path.is_file():
        raise BadPairsFile(f"pairs file not found: {path}")
    pairs: list[tuple[str, str]] = []
    with path.open(encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise BadPairsFile(f"{path}:{lineno}: not JSON: {exc}") from exc
            if not isinstance(obj, dict):
                raise BadPairsFile(f"{path}:{lineno}: expected an object")
            source, target = obj.get("input"), obj.get("target")
            if not (isinstance(source, str) and source):
                raise BadPairsFile(f"{path}:{lineno}: missing or empty 'input'")
            if not (isinstance(target, str) and target):
                raise BadPairsFile(f"{path}:{lineno}: missing or empty 'target'")
            pairs.append((source, target))
    if not pairs:
        raise BadPairsFile(f"pairs file has no pairs: {path}")
    return pairs


def load_base(base_model: str):
    """Resolve a base model identifier to (tokenizer, model)."""
    from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

    try:
        tokenizer = AutoTokenizer.from_pretrained(base_model)
        model = AutoModelForSeq2SeqLM.from_pretrained(base_model)
    except Exception as exc:
        raise ModelLoadFailure(f"cannot load base model {base_model!r}: {exc}") from exc
    return tokenizer, model


def _encode(pairs, tokenizer, spec: FinetuneJobSpec) -> list[dict]:
    # inputs truncate from the left so the most recent sentences survive
    tokenizer.truncation_side = "left"
    inputs = tokenizer(
        [source for source, _ in pairs],
        truncation=True,
        max_length=spec.max_input_tokens,
    )["input_ids"]
    tokenizer.truncation_side = "right"
    targets = tokenizer(
        [target for _, target in pairs],
        truncation=True,
        max_length=spec.max_output_tokens,
    )["input_ids"]
    return [
        {"input_ids": src, "labels": tgt} for src, tgt in zip(inputs, targets)
    ]


def _collate(batch: list[dict], pad_id: int) -> dict:
    in_width = max(len(ex["input_ids"]) for ex in batch)
    out_width = max(len(ex["labels"]) for ex in batch)
    input_ids, attention, labels = [], [], []
    for ex in batch:
        src, tgt = ex["input_ids"], ex["labels"]
        input_ids.append(src + [pad_id] * (in_width - len(src)))
        attention.append([1] * len(src) + [0] * (in_width - len(src)))
        # -100 masks padding out of the loss
        labels.append(tgt + [-100] * (out_width - len(tgt)))
    return {
        "input_ids": torch.tensor(input_ids),
        "attention_mask": torch.tensor(attention),
        "labels": torch.tensor(labels),
    }


def _log_header(spec: FinetuneJobSpec, pair_count: int) -> str:
    lines = [
        f"# base_model {spec.base_model}",
        f"# pairs {pair_count} from {spec.pairs_path}",
        f"# epochs {spec.epochs} learning_rate {spec.learning_rate}",
        f"# max_input_tokens {spec.max_input_tokens}"
        f" max_output_tokens {spec.max_output_tokens}",
        f"# batch_size {spec.batch_size} seed {spec.seed}",
    ]
    return "\n".join(lines) + "\n"


def finetune(spec: FinetuneJobSpec) -> FinetuneResult:
    """Train, save model + tokenizer to out_dir, log per-epoch loss."""
    pairs = load_pairs(spec.pairs_path)
    tokenizer, model = load_base(spec.base_model)

    torch.manual_seed(spec.seed)
    examples = _encode(pairs, tokenizer, spec)
    generator = torch.Generator().manual_seed(spec.seed)
    loader = DataLoader(
        examples,
        batch_size=spec.batch_size,
        shuffle=True,
        generator=generator,
        collate_fn=lambda batch: _collate(batch, tokenizer.pad_token_id),
    )
    optimizer = torch.optim.AdamW(model.parameters(), lr=spec.learning_rate)

    out = Path(spec.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    log_path = out / "loss_log.txt"
    log_path.write_text(_log_header(spec, len(pairs)), encoding="utf-8")

    model.train()
    losses: list[float] = []
    for epoch in range(1, spec.epochs + 1):
        total, batches = 0.0, 0
        for batch in loader:
            optimizer.zero_grad()
            loss = model(**batch).loss
            loss.backward()
            optimizer.step()
            total += loss.item()
            batches += 1
        mean = total / batches
        losses.append(mean)
        with log_path.open("a", encoding="utf-8") as handle:
            handle.write(f"epoch {epoch} loss {mean:.6f}\n")

    model.eval()
    model.save_pretrained(out)
    tokenizer.save_pretrained(out)
    return FinetuneResult(model_dir=out, losses=tuple(losses), log_path=log_path)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="lm-finetune",
        description="fine-tune an encoder-decoder model on JSONL sentence pairs",
    )
    parser.add_argument("--base-model", required=True, help="hub id or local model directory")
    parser.add_argument("--pairs", required=True, type=Path, help="JSONL pairs file")
    parser.add_argument("--out", required=True, type=Path, help="output model directory")
    parser.add_argument("--epochs", type=int, default=3)
    parser.add_argument("--learning-rate", type=float, default=5e-4)
    parser.add_argument("--max-input-tokens", type=int, default=512)
    parser.add_argument("--max-output-tokens", type=int, default=64)
    parser.add_argument("--batch-size", type=int, default=8)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    try:
        spec = FinetuneJobSpec(
            base_model=args.base_model,
            pairs_path=args.pairs,
            out_dir=args.out,
            epochs=args.epochs,
            learning_rate=args.learning_rate,
            max_input_tokens=args.max_input_tokens,
            max_output_tokens=args.max_output_tokens,
            batch_size=args.batch_size,
            seed=args.seed,
        )
        result = finetune(spec)
    except (BadPairsFile, ModelLoadFailure, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"saved fine-tuned model to {result.model_dir}")
    for epoch, loss in enumerate(result.losses, start=1):
        print(f"epoch {epoch} loss {loss:.6f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
