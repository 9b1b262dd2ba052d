"""CLI entry point for model evaluation.

Usage:
    python scripts/evaluate.py --model-dir outputs/desk_synth --groups
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.cli import main

if __name__ == "__main__":
    sys.exit(main(["eval", *sys.argv[1:]]))
