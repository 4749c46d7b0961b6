from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

# float sums of many parts drift from 1 by a few ulps per term
FLOAT_TOL = 1e-12


@dataclass(frozen=True)
class MassPartition:
    """A decreasing sequence of masses plus explicit dust.

    ``dust`` is the unlisted remainder ``1 - sum(parts)``.  A partition is
    proper when the dust vanishes; truncated samples carry positive dust
    instead of being renormalised.  Parts may be Fractions (exact path) or
    floats.
    """

    parts: tuple
    dust: object = field(default=None)

    def __post_init__(self):
        parts = tuple(self.parts)
        object.__setattr__(self, "parts", parts)
        if any(p < 0 for p in parts):
            raise ValueError("mass partition has a negative part")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError("parts must be sorted in decreasing order")
        exact = all(isinstance(p, (Fraction, int)) for p in parts)
        if self.dust is None:
            dust = 1 - sum(parts, Fraction(0) if exact else 0.0)
            if not exact and abs(dust) <= FLOAT_TOL:
                dust = 0.0
            object.__setattr__(self, "dust", dust)
        tol = 0 if exact else FLOAT_TOL
        if not -tol <= self.dust <= 1 + tol:
            raise ValueError(f"dust {self.dust} outside [0, 1]")

    @classmethod
    def from_sequence(cls, seq: Sequence, dust=None) -> "MassPartition":
        return cls(tuple(sorted(seq, reverse=True)), dust)

    @property
    def exact(self) -> bool:
        return all(isinstance(p, (Fraction, int)) for p in self.parts)

    @property
    def proper(self) -> bool:
        if self.exact:
            return self.dust == 0
        return abs(self.dust) <= FLOAT_TOL

    def support(self) -> tuple:
        return tuple(p for p in self.parts if p > 0)

    def __len__(self) -> int:
        return len(self.parts)
