"""CLI entry point for training.

Usage:
    python scripts/train.py --config configs/experiments/desk_synth.yaml --base configs/base.yaml
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.cli import main

if __name__ == "__main__":
    sys.exit(main(["train", *sys.argv[1:]]))
