"""Commuting unitary pairs near almost-commuting gapped unitaries."""

from ._core import *  # noqa: F401,F403
from ._core import __version__, InvalidInput, NumericalError, PreconditionError  # noqa: F401
