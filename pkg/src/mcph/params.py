from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, replace

from .errors import DomainError


class Process(str, enum.Enum):
    MCP = "mcp"
    MCPH = "mcph"


class SamplerMode(str, enum.Enum):
    MCP = "mcp"
    MCPH_EXACT = "mcph_exact"
    MCPH_SELFHOLE = "mcph_selfhole"


@dataclass(frozen=True)
class ProcessParams:
    """Model constants, lengths in metres.

    lambda_p : parent intensity per m^3 (zero is allowed and gives an empty process)
    R        : cluster radius
    r0       : hole radius, ``0 <= r0 < R``
    M1       : mean offspring per cluster before any hole thinning
    M2       : mean retained offspring per cluster for the holed process
    """

    lambda_p: float
    R: float
    r0: float = 0.0
    M1: float = 1.0
    M2: float = 1.0

    def __post_init__(self):
        for name, val in asdict(self).items():
            if not math.isfinite(val):
                raise DomainError(f"{name} must be finite, got {val!r}")
        if self.lambda_p < 0:
            raise DomainError(f"lambda_p must be >= 0, got {self.lambda_p}")
        if self.R <= 0:
            raise DomainError(f"R must be positive, got {self.R}")
        if not 0 <= self.r0 < self.R:
            raise DomainError(f"need 0 <= r0 < R, got r0={self.r0}, R={self.R}")
        if self.M1 <= 0 or self.M2 <= 0:
            raise DomainError(f"M1 and M2 must be positive, got {self.M1}, {self.M2}")

    @classmethod
    def from_m2(cls, lambda_p, R, r0, M2, linkage="self_hole"):
        """Holed-process parameters with M1 derived from M2.

        ``linkage="self_hole"`` sets ``M1 = M2 / (1 - r0**3/R**3)`` so that
        removing only the own hole leaves M2 points on average.
        ``linkage="exact_mean"`` additionally divides by the probability
        ``exp(-lambda_p * (4/3) pi r0**3)`` of escaping every other hole, so that
        exact thinning leaves M2 points on average.
        """
        M1 = M2 / (1.0 - r0**3 / R**3)
        if linkage == "exact_mean":
            M1 *= math.exp(lambda_p * 4.0 / 3.0 * math.pi * r0**3)
        elif linkage != "self_hole":
            raise DomainError(f"unknown linkage {linkage!r}")
        return cls(lambda_p, R, r0, M1=M1, M2=M2)

    def replace(self, **changes):
        return replace(self, **changes)

    def mean_count(self, process):
        return self.M1 if Process(process) is Process.MCP else self.M2

    def as_dict(self):
        return asdict(self)
