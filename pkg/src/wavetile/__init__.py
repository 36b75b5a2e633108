"""Numerical toolkit for bilinear time-frequency analysis at desk scale.

Core pieces: sampled periodic signals with exact integer-frequency spectra,
dyadic tile geometry and wave packets, the triangular symbol decomposition,
variation-norm bilinear operators with dual certificates, and finite outer
measure spaces on tile collections.
"""

from .constants import DEFAULT_CONSTANTS, ToolkitConstants
from .grid import SampledSignal, chi_tilde, frequencies, from_spectrum, maximal_avg, to_spectrum
from .intervals import DyadicInterval, Interval, ShiftedDyadicInterval

__all__ = [
    "DEFAULT_CONSTANTS",
    "ToolkitConstants",
    "SampledSignal",
    "chi_tilde",
    "frequencies",
    "from_spectrum",
    "maximal_avg",
    "to_spectrum",
    "DyadicInterval",
    "Interval",
    "ShiftedDyadicInterval",
]

__version__ = "0.1.0"
