#!/usr/bin/env python3
"""Directly runnable entry point for the feature extractor CLI."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent / "src"))

from convnet_extractor.cli import main

if __name__ == "__main__":
    sys.exit(main())
