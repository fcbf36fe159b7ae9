"""Shared result records."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class SpeedEstimate:
    """A spreading-speed value with its method tag and error bar.

    ``optimizer`` is the minimizing p* (eigen method) or gamma* (Lyapunov
    method); it is None for the direct PDE method.  ``provenance`` carries
    realization id, window, grid and tolerance plus method-specific extras.
    """

    value: float
    method: str
    err: float
    optimizer: float | None = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError("speed must be positive")
        if self.err < 0:
            raise ValueError("error bar must be nonnegative")

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "method": self.method,
            "optimizer": self.optimizer,
            "err": self.err,
            "provenance": self.provenance,
        }
