"""Reaction network adaptation analysis: structure, detailed balance, dynamics, adaptation tests."""

from fractions import Fraction

from ._core import *  # noqa: F401,F403
from ._core import _conservation_space, _cycle_space

__version__ = "0.1.0"


def conservation_space(system):
    """Exact basis of the conservation laws, as lists of Fraction."""
    return [[Fraction(x) for x in row] for row in _conservation_space(system)]


def cycle_space(system):
    """Exact basis of the cycle space over the canonical reactions, as lists of Fraction."""
    return [[Fraction(x) for x in row] for row in _cycle_space(system)]
