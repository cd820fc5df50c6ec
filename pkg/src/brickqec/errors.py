"""Exception hierarchy shared by every brickqec module."""

from __future__ import annotations


class BrickQECError(Exception):
    """Base class for all library errors."""


class DimensionError(BrickQECError, ValueError):
    """Operands have mismatched qubit counts or vector lengths."""


class CodeParamsError(BrickQECError, ValueError):
    """Invalid (n, r, d, variant) combination."""


class NoiseModelError(BrickQECError, ValueError):
    """Probabilities outside [0, 1] or not summing to one."""


class InconsistentSyndromeError(BrickQECError):
    """The GF(2) system for a pure error has no solution."""


class ResourceLimitError(BrickQECError):
    """A contraction or enumeration would exceed its configured cap."""


class FitError(BrickQECError):
    """Degenerate data for a fit (too few points, empty bulk region, ...)."""
