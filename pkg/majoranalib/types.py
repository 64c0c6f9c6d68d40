"""
Shared type definitions used throughout the majoranalib package.

This module defines type aliases and small records that are used across
multiple modules to ensure consistency and readability.
"""
from typing import Literal, NamedTuple, Union

Real = Union[float, int]
Scalar = Union[complex, float, int]

# A SiteSet is stored as a bitmask: bit (i - 1) set <=> site i present.
SiteMask = int

Parity = Literal['even', 'odd', 'mixed']


class SweepPoint(NamedTuple):
    """
    one row of a gap sweep.
    """
    g: float
    splitting: float
    gap: float
    ground_energy: float


class ScalingPoint(NamedTuple):
    """
    truncated-series residual at one coupling.
    """
    g: float
    total_residual: float


class LadderPoint(NamedTuple):
    """
    ground-state bookkeeping of a ladder at one coupling.
    """
    g: float
    degeneracy: int
    n_left: int
    index: int
    edge_splitting: float
