"""Sampled space-time fields in the angular-L^2 representation."""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidArgumentError
from .hankel import RadialGrid


def uniform_times(T: float, dt: float) -> np.ndarray:
    """Uniform samples of [-T, T] with step dt (2T/dt must be an integer)."""
    if not (T > 0.0 and dt > 0.0):
        raise InvalidArgumentError("need T > 0 and dt > 0")
    steps = 2.0 * T / dt
    n = int(round(steps))
    if abs(steps - n) > 1e-9 * max(1.0, steps):
        raise InvalidArgumentError(f"2T/dt = {steps} is not an integer")
    return np.linspace(-T, T, n + 1)


@dataclass(frozen=True, eq=False)
class SpaceTimeField:
    """Angular-L^2 density of a field on a uniform time grid times a radial grid.

    ``density[n, i] = sum_c |kappa_c(t_n, r_i)|^2`` summed over all mode
    channels c (spinor channels count both components), i.e. the squared
    L^2_theta norm at (t_n, r_i) by Parseval.  ``orders`` lists the signed
    Bessel order of every populated channel, which fixes the small-r
    behaviour r^order.  ``evaluate(n_idx, r)`` (optional) returns the density
    at arbitrary radii for the times ``times[n_idx]``.
    """

    times: np.ndarray
    grid: RadialGrid
    density: np.ndarray
    orders: tuple = ()
    evaluate: Callable | None = None

    def __post_init__(self):
        t = np.array(self.times, dtype=float)
        d = np.array(self.density, dtype=float)
        if t.ndim != 1 or t.size < 1:
            raise InvalidArgumentError("times must be a non-empty 1-d array")
        if d.shape != (t.size, self.grid.size):
            raise InvalidArgumentError(f"density must have shape {(t.size, self.grid.size)}")
        if t.size > 1:
            step = np.diff(t)
            if np.any(step <= 0.0) or np.max(np.abs(step - step[0])) > 1e-9 * abs(step[0]) + 1e-12:
                raise InvalidArgumentError("time grid must be uniform and increasing")
        if np.any(d < 0.0) or not np.all(np.isfinite(d)):
            raise InvalidArgumentError("density must be finite and non-negative")
        t.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "density", d)
        object.__setattr__(self, "orders", tuple(float(o) for o in self.orders))

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0]) if self.times.size > 1 else 1.0

    def window(self, T: float) -> "SpaceTimeField":
        """Restriction to |t| <= T (plus round-off)."""
        keep = np.abs(self.times) <= T * (1.0 + 1e-12) + 1e-12
        idx = np.nonzero(keep)[0]
        if idx.size == 0:
            raise InvalidArgumentError(f"no time samples within |t| <= {T}")
        ev = None
        if self.evaluate is not None:
            base = self.evaluate
            ev = lambda n, r: base(idx[np.asarray(n)], r)  # noqa: E731
        return SpaceTimeField(self.times[idx], self.grid, self.density[idx], self.orders, ev)

    @classmethod
    def from_channels(cls, times, grid, channels, orders=()):
        """Build from complex samples of shape (n_t, C, N)."""
        c = np.asarray(channels)
        if c.ndim != 3:
            raise InvalidArgumentError("channels must have shape (n_t, C, N)")
        return cls(times, grid, np.sum(np.abs(c) ** 2, axis=1), orders)
