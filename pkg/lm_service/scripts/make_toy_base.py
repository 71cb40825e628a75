#!/usr/bin/env python3
"""Save a tiny random encoder-decoder usable as a base model directory."""

import argparse
from pathlib import Path

from lm_service.toy_base import build_toy_base


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True, type=Path)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--d-model", type=int, default=64)
    parser.add_argument("--layers", type=int, default=2)
    parser.add_argument("--heads", type=int, default=2)
    parser.add_argument("--ffn-dim", type=int, default=128)
    args = parser.parse_args()
    out = build_toy_base(
        args.out,
        seed=args.seed,
        d_model=args.d_model,
        layers=args.layers,
        heads=args.heads,
        ffn_dim=args.ffn_dim,
    )
    print(f"wrote toy base model to {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
