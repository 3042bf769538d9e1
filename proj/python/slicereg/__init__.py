"""Slice regular functions on quaternionic slice domains."""

from ._slicereg import *  # noqa: F401,F403
from ._slicereg import __doc__  # noqa: F401

__version__ = "0.1.0"
