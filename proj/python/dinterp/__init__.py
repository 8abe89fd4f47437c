"""Displacement interpolation of densities, signed functions and images."""

from ._core import *  # noqa: F401,F403
from ._core import DinterpError

__version__ = "1.0.0"


def error_code(exc: DinterpError) -> str:
    """Error code carried at the start of a DinterpError message."""
    return str(exc).split(":", 1)[0]
