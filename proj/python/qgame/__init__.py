"""Quantum decision-game toolkit: weight maps, canonical forms, measurement
branching, value-function audits, and the staged derivation verifier."""

from ._qgame import *  # noqa: F401,F403
from ._qgame import __all__  # noqa: F401
