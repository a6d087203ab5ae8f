"""Processors package initialization."""

from .serializer import sanitize
from .shape import argmax_param, is_unimodal, max_abs_deviation, summarize_sweep
from .writer import write_csv, write_json

__all__ = [
    "sanitize",
    "argmax_param",
    "is_unimodal",
    "max_abs_deviation",
    "summarize_sweep",
    "write_csv",
    "write_json",
]
