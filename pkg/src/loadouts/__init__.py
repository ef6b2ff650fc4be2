"""Exact enumeration and certification of LP loadouts."""

from . import bounds, cells, cyclic, designs, exactmath, lpsolver
from .designs import Design

__all__ = ["Design", "bounds", "cells", "cyclic", "designs", "exactmath", "lpsolver"]
__version__ = "0.1.0"
