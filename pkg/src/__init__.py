"""Additive Score Recovery.

Rasch-style additive fits, rectangle-curl integrability diagnostics and
sparse sampling designs for bounded evaluation-score matrices.
"""

__version__ = "0.1.0"

from .cli import main  # noqa: E402

__all__ = ["__version__", "main"]
