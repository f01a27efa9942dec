"""Discrete order-nu Hankel transform and the two-component relativistic transform.

The scalar transform is

    (H_nu f)(rho) = int_0^inf J_nu(r rho) f(r) r dr,

an isometric involution of L^2(r dr).  It is discretised by dense summation
against a quadrature rule for r dr, with kernel matrices cached per
(order, output grid, input grid).
"""

import hashlib
import math
import threading
from collections import OrderedDict
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from .bessel import bessel_j
from .errors import InvalidArgumentError
from .modes import FluxParameter, Mode

_SQRT_HALF = math.sqrt(0.5)


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Quadrature nodes on [r_min, r_max] with weights for the measure r dr."""

    nodes: np.ndarray
    weights: np.ndarray
    r_max: float
    r_min: float = 0.0

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        weights = np.array(self.weights, dtype=float)
        if nodes.ndim != 1 or nodes.shape != weights.shape or nodes.size == 0:
            raise InvalidArgumentError("grid nodes and weights must be equal-length 1-d arrays")
        if not (np.all(np.isfinite(nodes)) and np.all(np.isfinite(weights))):
            raise InvalidArgumentError("grid nodes and weights must be finite")
        if np.any(nodes <= 0.0) or np.any(np.diff(nodes) <= 0.0):
            raise InvalidArgumentError("grid nodes must be positive and strictly increasing")
        if np.any(weights <= 0.0):
            raise InvalidArgumentError("grid weights must be positive")
        r_min, r_max = float(self.r_min), float(self.r_max)
        if not (0.0 <= r_min < nodes[0] and nodes[-1] < r_max):
            raise InvalidArgumentError("grid nodes must lie strictly inside (r_min, r_max)")
        exact = 0.5 * (r_max * r_max - r_min * r_min)
        if abs(weights.sum() - exact) > 1e-8 * exact:
            raise InvalidArgumentError(
                f"grid weights sum to {weights.sum():.12g}, expected {exact:.12g} for r dr"
            )
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "r_min", r_min)
        object.__setattr__(self, "r_max", r_max)

    @property
    def size(self) -> int:
        return self.nodes.size

    @cached_property
    def key(self) -> str:
        h = hashlib.sha1(self.nodes.tobytes())
        h.update(self.weights.tobytes())
        return h.hexdigest()

    @cached_property
    def is_uniform(self) -> bool:
        d = np.diff(self.nodes)
        return bool(np.all(np.abs(d - d[0]) <= 1e-12 * self.r_max))

    def same_as(self, other) -> bool:
        return other is self or (isinstance(other, RadialGrid) and other.key == self.key)

    def scaled(self, factor: float):
        """Grid for r -> factor * r; weights pick up factor^2."""
        factor = float(factor)
        if not factor > 0.0:
            raise InvalidArgumentError("scale factor must be positive")
        return type(self)(self.nodes * factor, self.weights * factor * factor,
                          self.r_max * factor, self.r_min * factor)

    def as_spectral(self) -> "SpectralGrid":
        return SpectralGrid(self.nodes, self.weights, self.r_max, self.r_min)

    def as_radial(self) -> "RadialGrid":
        return RadialGrid(self.nodes, self.weights, self.r_max, self.r_min)

    def integrate(self, values) -> complex:
        """Quadrature of values(r) r dr."""
        return np.sum(np.asarray(values) * self.weights, axis=-1)

    def norm(self, values) -> float:
        """L^2(r dr) norm of sampled values (last axis)."""
        v = np.asarray(values)
        return float(np.sqrt(np.sum(np.abs(v) ** 2 * self.weights)))

    # constructors

    @classmethod
    def gauss_legendre(cls, n: int = 2048, r_max: float = 20.0, panel: int = 32, r_min: float = 0.0):
        """Composite Gauss-Legendre rule with n // panel equal panels."""
        if n <= 0 or panel <= 0 or n % panel:
            raise InvalidArgumentError(f"n={n} must be a positive multiple of panel={panel}")
        if not (0.0 <= r_min < r_max):
            raise InvalidArgumentError("need 0 <= r_min < r_max")
        x, w = np.polynomial.legendre.leggauss(panel)
        edges = np.linspace(r_min, r_max, n // panel + 1)
        return cls._from_panels(edges, x, w, r_max, r_min)

    @classmethod
    def graded(cls, n: int = 1024, r_max: float = 20.0, panel: int = 16, levels: int = 24,
               ratio: float = 0.5, r_min: float = 0.0):
        """Gauss-Legendre panels refined geometrically towards r_min.

        ``levels`` panels shrink by ``ratio`` towards the left end of the first
        uniform panel; this resolves r^a-type behaviour at the origin, which the
        weighted smoothing norms need.
        """
        if n <= 0 or panel <= 0 or n % panel:
            raise InvalidArgumentError(f"n={n} must be a positive multiple of panel={panel}")
        count = n // panel - levels
        if count < 1:
            raise InvalidArgumentError("too few nodes for the requested grading levels")
        x, w = np.polynomial.legendre.leggauss(panel)
        uniform = np.linspace(r_min, r_max, count + 1)
        first = uniform[1] - r_min
        graded = r_min + first * ratio ** np.arange(levels, 0, -1)
        edges = np.concatenate([[r_min], graded, uniform[1:]])
        return cls._from_panels(edges, x, w, r_max, r_min)

    @classmethod
    def uniform(cls, n: int, r_max: float):
        """Midpoint nodes r_i = (i + 1/2) h with weights r_i h (exact for r dr)."""
        if n < 2:
            raise InvalidArgumentError("uniform grid needs n >= 2")
        h = r_max / n
        nodes = (np.arange(n) + 0.5) * h
        return cls(nodes, nodes * h, r_max, 0.0)

    @classmethod
    def _from_panels(cls, edges, x, w, r_max, r_min):
        lo, hi = edges[:-1], edges[1:]
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        nodes = (mid[:, None] + half[:, None] * x).ravel()
        weights = (half[:, None] * w * (mid[:, None] + half[:, None] * x)).ravel()
        return cls(nodes, weights, r_max, r_min)


class SpectralGrid(RadialGrid):
    """A RadialGrid read as frequency rho (weights for rho d rho)."""

    @property
    def rho_min(self) -> float:
        return self.r_min

    @property
    def rho_max(self) -> float:
        return self.r_max


@dataclass(frozen=True, eq=False)
class RadialFunction:
    """Complex samples on a grid."""

    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.shape != (self.grid.size,):
            raise InvalidArgumentError(
                f"values have shape {v.shape}, grid has {self.grid.size} nodes"
            )
        if not np.all(np.isfinite(v)):
            raise InvalidArgumentError("radial function values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def norm(self) -> float:
        return self.grid.norm(self.values)

    @classmethod
    def sample(cls, grid: RadialGrid, fn: Callable):
        return cls(grid, fn(grid.nodes))


# kernel cache


class _KernelCache:
    def __init__(self, maxsize=24, block=256):
        self.maxsize = maxsize
        self.block = block
        self._lock = threading.Lock()
        self._store = OrderedDict()

    def get(self, nu: float, out_nodes: np.ndarray, out_key: str, in_grid: RadialGrid):
        """Matrix K[j, i] = J_nu(out_j * r_i) * w_i (read-only)."""
        key = (float(nu), out_key, in_grid.key)
        with self._lock:
            hit = self._store.get(key)
            if hit is not None:
                self._store.move_to_end(key)
                return hit
        mat = np.empty((out_nodes.size, in_grid.size))
        for start in range(0, out_nodes.size, self.block):
            stop = min(start + self.block, out_nodes.size)
            mat[start:stop] = bessel_j(nu, np.multiply.outer(out_nodes[start:stop], in_grid.nodes))
        mat *= in_grid.weights
        mat.setflags(write=False)
        with self._lock:
            self._store[key] = mat
            self._store.move_to_end(key)
            while len(self._store) > self.maxsize:
                self._store.popitem(last=False)
        return mat

    def clear(self):
        with self._lock:
            self._store.clear()


KERNELS = _KernelCache()


def kernel(nu: float, out: RadialGrid, grid: RadialGrid) -> np.ndarray:
    """Cached transform matrix from ``grid`` to ``out`` for order nu."""
    return KERNELS.get(nu, out.nodes, out.key, grid)


def kernel_at(nu: float, points, grid: RadialGrid) -> np.ndarray:
    """Uncached transform rows evaluated at arbitrary points."""
    pts = np.atleast_1d(np.asarray(points, dtype=float))
    return bessel_j(nu, np.multiply.outer(pts, grid.nodes)) * grid.weights


def _as_values(f, grid=None):
    if isinstance(f, RadialFunction):
        if grid is not None and not grid.same_as(f.grid):
            raise InvalidArgumentError("radial function lives on a different grid")
        return f.grid, f.values
    if grid is None:
        raise InvalidArgumentError("raw samples need an explicit grid")
    v = np.asarray(f)
    if v.shape[-1] != grid.size:
        raise InvalidArgumentError("sample length does not match the grid")
    return grid, v


def hankel_forward(nu: float, f: RadialFunction, out: RadialGrid | None = None) -> RadialFunction:
    """g(rho_j) = sum_i J_nu(r_i rho_j) f(r_i) w_i on the output grid.

    The output grid defaults to the input grid read as a spectral grid; since
    the transform is its own inverse this function is also the inverse.
    """
    grid, values = _as_values(f)
    if out is None:
        out = grid.as_spectral()
    elif not isinstance(out, RadialGrid):
        raise InvalidArgumentError("output must be a grid")
    k = kernel(nu, out, grid)
    return RadialFunction(out, k @ values)


def hankel_multiplier(nu: float, f: RadialFunction, symbol: Callable,
                      spectral: RadialGrid | None = None) -> RadialFunction:
    """H_nu[ symbol(rho) * H_nu f ], returned on the input grid."""
    grid, values = _as_values(f)
    spec = grid.as_spectral() if spectral is None else spectral
    sym = np.asarray(symbol(spec.nodes), dtype=complex)
    if sym.shape != (spec.size,):
        sym = np.broadcast_to(sym, (spec.size,))
    if not np.all(np.isfinite(sym)):
        raise InvalidArgumentError("symbol is not finite on the spectral grid")
    g = kernel(nu, spec, grid) @ values
    return RadialFunction(grid, kernel(nu, grid, spec) @ (sym * g))


def relativistic_hankel(m: int, flux: FluxParameter, phi1: RadialFunction, phi2: RadialFunction,
                        out: RadialGrid | None = None):
    """Positive- and negative-energy components of a radial spinor block.

    With A = H_nu, B = H_{nu'} (nu = |m+alpha|, nu' the signed lower order),
    a = eps_m^m and b = eps_m^(m+1):

        P+ = (a A phi1 - i b B phi2) / sqrt 2
        P- = (-a A phi1 - i b B phi2) / sqrt 2

    i.e. the pairing of phi against the conjugated generalized eigenfunctions
    at +E and -E.  The map is an isometry onto pairs of L^2(E dE) functions.
    """
    if not phi1.grid.same_as(phi2.grid):
        raise InvalidArgumentError("spinor components must share one grid")
    mode = flux.mode(m)
    grid = phi1.grid
    if out is None:
        out = grid.as_spectral()
    a_phi = mode.upper_sign * (kernel(mode.nu, out, grid) @ phi1.values)
    b_phi = 1j * mode.lower_sign * (kernel(mode.lower_order, out, grid) @ phi2.values)
    plus = _SQRT_HALF * (a_phi - b_phi)
    minus = _SQRT_HALF * (-a_phi - b_phi)
    return RadialFunction(out, plus), RadialFunction(out, minus)


def relativistic_inverse(m: int, flux: FluxParameter, plus: RadialFunction, minus: RadialFunction,
                         out: RadialGrid | None = None):
    """Inverse (= adjoint) of ``relativistic_hankel``."""
    if not plus.grid.same_as(minus.grid):
        raise InvalidArgumentError("energy components must share one grid")
    mode = flux.mode(m)
    spec = plus.grid
    if out is None:
        out = spec.as_radial()
    diff = plus.values - minus.values
    summ = plus.values + minus.values
    phi1 = _SQRT_HALF * mode.upper_sign * (kernel(mode.nu, out, spec) @ diff)
    phi2 = 1j * _SQRT_HALF * mode.lower_sign * (kernel(mode.lower_order, out, spec) @ summ)
    return RadialFunction(out, phi1), RadialFunction(out, phi2)


def tail_fraction(spectrum: np.ndarray, grid: RadialGrid, cut: float) -> float:
    """Fraction of L^2 mass of ``spectrum`` (last axis on ``grid``) at nodes >= cut."""
    mass = np.abs(np.asarray(spectrum)) ** 2 * grid.weights
    total = float(mass.sum())
    if total == 0.0:
        return 0.0
    return float(mass[..., grid.nodes >= cut].sum() / total)


__all__ = [
    "RadialGrid", "SpectralGrid", "RadialFunction", "hankel_forward", "hankel_multiplier",
    "relativistic_hankel", "relativistic_inverse", "kernel", "kernel_at", "tail_fraction",
    "KERNELS",
]
