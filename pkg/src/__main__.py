"""Entry point for running additive-scores as a module.

Usage: python -m src
"""
import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
