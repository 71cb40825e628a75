"""Desk-scale stand-in for a hub checkpoint.

Builds a randomly initialized Bart-family encoder-decoder with a
character-level tokenizer and saves it like any pretrained model, so the
resulting directory works wherever a base model identifier is expected.
Useful where the model hub is unreachable and for fast tests; real
deployments point the fine-tune script at an actual pretrained checkpoint
instead.
"""

from __future__ import annotations

from pathlib import Path

import torch
from tokenizers import Tokenizer, decoders, models, processors
from transformers import BartConfig, BartForConditionalGeneration, PreTrainedTokenizerFast

# covers the sentence template's letters, timestamps, values, and the
# newline that joins context sentences; everything else becomes <unk>
ALPHABET = (
    "abcdefghijklmnopqrstuvwxyz"
    "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    "0123456789"
    " .,:-()\n"
)

PAD, BOS, EOS, UNK = "<pad>", "<s>", "</s>", "<unk>"


def char_tokenizer(max_length: int = 1024) -> PreTrainedTokenizerFast:
    """One token per character, bos/eos wrapped, fused back on decode."""
    vocab = {tok: i for i, tok in enumerate([PAD, BOS, EOS, UNK, *ALPHABET])}
    backend = Tokenizer(models.BPE(vocab=vocab, merges=[], unk_token=UNK))
    backend.post_processor = processors.TemplateProcessing(
        single=f"{BOS} $A {EOS}",
        special_tokens=[(BOS, vocab[BOS]), (EOS, vocab[EOS])],
    )
    backend.decoder = decoders.Fuse()
    return PreTrainedTokenizerFast(
        tokenizer_object=backend,
        bos_token=BOS,
        eos_token=EOS,
        pad_token=PAD,
        unk_token=UNK,
        model_max_length=max_length,
    )


def build_toy_base(
    out_dir: Path | str,
    seed: int = 0,
    d_model: int = 64,
    layers: int = 2,
    heads: int = 2,
    ffn_dim: int = 128,
    max_positions: int = 1024,
) -> Path:
    """Save a tiny random model + tokenizer; returns the directory."""
    out = Path(out_dir)
    tokenizer = char_tokenizer(max_length=max_positions)
    config = BartConfig(
        vocab_size=len(tokenizer),
        d_model=d_model,
        encoder_layers=layers,
        decoder_layers=layers,
        encoder_attention_heads=heads,
        decoder_attention_heads=heads,
        encoder_ffn_dim=ffn_dim,
        decoder_ffn_dim=ffn_dim,
        max_position_embeddings=max_positions,
        pad_token_id=tokenizer.pad_token_id,
        bos_token_id=tokenizer.bos_token_id,
        eos_token_id=tokenizer.eos_token_id,
        decoder_start_token_id=tokenizer.eos_token_id,
        forced_bos_token_id=None,
        forced_eos_token_id=None,
    )
    torch.manual_seed(seed)
    model = BartForConditionalGeneration(config)
    model.save_pretrained(out)
    tokenizer.save_pretrained(out)
    return out
