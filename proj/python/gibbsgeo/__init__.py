"""Gibbs measures, KL calculus and geodesics on binary and d-ary symbolic spaces."""

from ._core import *  # noqa: F401,F403
from ._core import NumericalError, UnsupportedDerivative  # noqa: F401

__version__ = "0.1.0"
