"""Extreme learning machine for hydrocarbon solubility in brines."""

from ._elmsol import *  # noqa: F401,F403
from ._elmsol import __doc__  # noqa: F401

__version__ = "0.1.0"
