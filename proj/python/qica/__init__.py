"""Covering arrays, qualitative independence graphs and meet-table spectra."""

from ._core import *  # noqa: F401,F403
from ._core import ParameterError, ResourceError, StructureError, ParseError, run_cli

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
