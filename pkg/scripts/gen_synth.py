"""CLI entry point for synthetic dataset generation.

Usage:
    python scripts/gen_synth.py --out-dir data/synth --entities 100 --relations 10 --seed 7
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.cli import main

if __name__ == "__main__":
    sys.exit(main(["gen-synth", *sys.argv[1:]]))
