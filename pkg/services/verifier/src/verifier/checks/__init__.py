"""Randomized checks; importing this package registers every check with ``registry``."""

from verifier.checks import atoms, bidisc, discretization, fejer, independent, multipliers, shift
from verifier.checks.registry import registry

__all__ = ["atoms", "bidisc", "discretization", "fejer", "independent", "multipliers", "registry", "shift"]
