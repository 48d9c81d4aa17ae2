"""Summability methods, averages of operators, and maximal inequalities, computed on finite models."""

__version__ = "0.1.0"

from . import errors, report  # noqa: E402,F401
from .report import Report  # noqa: E402,F401
