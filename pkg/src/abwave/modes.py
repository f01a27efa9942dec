"""Flux parameter and the per-mode Bessel orders it induces."""

import math
from dataclasses import dataclass

from .errors import InvalidArgumentError, PreconditionError


@dataclass(frozen=True)
class FluxParameter:
    """Aharonov-Bohm flux ``alpha`` and its distance ``epsilon`` to the integers."""

    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not math.isfinite(a):
            raise InvalidArgumentError(f"flux alpha must be finite, got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)

    @property
    def epsilon(self) -> float:
        return abs(self.alpha - round(self.alpha))

    def require_nonintegral(self, what="this estimate"):
        """Raise unless epsilon > 0, the hypothesis every estimate check relies on."""
        if self.epsilon == 0.0:
            raise PreconditionError(
                f"{what} requires a non-integral flux: epsilon = dist(alpha, Z) > 0, "
                f"but alpha = {self.alpha} gives epsilon = 0"
            )

    def mode(self, m: int) -> "Mode":
        return Mode(int(m), self.alpha)


@dataclass(frozen=True)
class Mode:
    """Angular mode m under flux alpha.

    ``nu = |m+alpha|`` is the scalar (and upper spinor) Bessel order.
    ``nu_next = |m+1+alpha|``.  ``eps_m`` is +1 when m+alpha >= 0, else -1.
    ``lower_order = eps_m * (m+1+alpha)`` is the order that actually solves the
    lower Dirac equation; it equals ``nu_next`` except for the single mode with
    -1 < m+alpha < 0, where it is negative.
    """

    m: int
    alpha: float

    @property
    def nu(self) -> float:
        return abs(self.m + self.alpha)

    @property
    def nu_next(self) -> float:
        return abs(self.m + 1 + self.alpha)

    @property
    def eps_m(self) -> int:
        return 1 if self.m + self.alpha >= 0 else -1

    @property
    def lower_order(self) -> float:
        return self.eps_m * (self.m + 1 + self.alpha)

    @property
    def upper_sign(self) -> int:
        # eps_m ** m
        return 1 if self.eps_m == 1 or self.m % 2 == 0 else -1

    @property
    def lower_sign(self) -> int:
        # eps_m ** (m + 1)
        return 1 if self.eps_m == 1 or (self.m + 1) % 2 == 0 else -1
