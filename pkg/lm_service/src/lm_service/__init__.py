"""Fine-tuning and HTTP serving for next-sentence load forecasting models."""

from .errors import BadPairsFile, ModelLoadFailure, ServiceError
from .finetune import FinetuneJobSpec, FinetuneResult, finetune, load_base, load_pairs
from .server import GenerateRequest, Generator, create_app, load_generator, serve
from .toy_base import ALPHABET, build_toy_base, char_tokenizer

__all__ = [
    "ALPHABET",
    "BadPairsFile",
    "FinetuneJobSpec",
    "FinetuneResult",
    "GenerateRequest",
    "Generator",
    "ModelLoadFailure",
    "ServiceError",
    "build_toy_base",
    "char_tokenizer",
    "create_app",
    "finetune",
    "load_base",
    "load_generator",
    "load_pairs",
    "serve",
]

__version__ = "0.1.0"
