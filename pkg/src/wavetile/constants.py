"""Global constant registry for the toolkit."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .intervals import as_fraction


@dataclass(frozen=True)
class ToolkitConstants:
    """Knobs shared by the partition, Whitney, tile and packet machinery.

    margin:          interval-partition margin (the gap-to-size ratio of the
                     endpoint partition), a positive integer.
    whitney_margin:  Whitney margin, fixed at margin/40.
    bump_radius:     support radius of the partition bumps, in (1/2, 5/8).
    sparse_const:    sparseness constant for tile collections (>= 1).
    rank1_const:     rank-1 constant for tri-tile collections (>= 1).
    smooth_order:    smoothness order of packet tapers (>= 2).
    decay_power:     weight power used in tile maximal averages (>= 2).
    min_scale:       power-of-two lower cutoff for interval partitions.
    series_radius:   truncation radius of the bilinear Fourier series (>= 1).
    """

    margin: int = 2
    bump_radius: Fraction = Fraction(3, 5)
    sparse_const: float = 8.0
    rank1_const: float = 8.0
    smooth_order: int = 4
    decay_power: int = 2
    min_scale: Fraction = Fraction(1, 256)
    series_radius: int = 6
    whitney_margin: Fraction = field(init=False)

    def __post_init__(self):
        if self.margin < 1:
            raise ValueError("margin must be a positive integer")
        c = as_fraction(self.bump_radius)
        if not (Fraction(1, 2) < c < Fraction(5, 8)):
            raise ValueError(f"bump_radius {c} outside (1/2, 5/8)")
        object.__setattr__(self, "bump_radius", c)
        if self.sparse_const < 1 or self.rank1_const < 1:
            raise ValueError("sparse_const and rank1_const must be >= 1")
        if self.smooth_order < 2:
            raise ValueError("smooth_order must be >= 2")
        if self.decay_power < 2:
            raise ValueError("decay_power must be >= 2")
        ms = as_fraction(self.min_scale)
        def _pow2(n):
            return n >= 1 and (n & (n - 1)) == 0
        if ms <= 0 or not _pow2(ms.numerator) or not _pow2(ms.denominator) \
                or (ms.numerator != 1 and ms.denominator != 1):
            raise ValueError("min_scale must be a positive power of two")
        object.__setattr__(self, "min_scale", ms)
        if self.series_radius < 1:
            raise ValueError("series_radius must be >= 1")
        object.__setattr__(self, "whitney_margin", Fraction(self.margin, 40))


DEFAULT_CONSTANTS = ToolkitConstants()
