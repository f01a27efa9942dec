"""Angular-mode decomposition, radial operators, eigenfunctions and Sobolev norms.

A scalar field is Psi(r, theta) = sum_m kappa_m(r) e^{i m theta} / sqrt(2 pi); a
spinor is Phi = sum_m (f_m e^{i m theta}, g_m e^{i (m+1) theta}) / sqrt(2 pi).
On each mode the magnetic Hamiltonian acts as

    H_{alpha,m} = -d^2/dr^2 - (1/r) d/dr + (m+alpha)^2 / r^2

and the Dirac operator as the 2x2 block
[[0, -i(d/dr + (m+alpha+1)/r)], [-i(d/dr - (m+alpha)/r), 0]].
"""

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .bessel import bessel_j
from .errors import AccuracyError, InvalidArgumentError
from .hankel import RadialFunction, RadialGrid, kernel, relativistic_hankel, tail_fraction
from .modes import FluxParameter, Mode

DEFAULT_TAIL_TOL = 1e-8
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _frozen_array(v, dtype=complex):
    a = np.array(v, dtype=dtype)
    a.setflags(write=False)
    return a


def _freeze_map(d, shape, pair=False):
    out = {}
    for m, v in d.items():
        if pair:
            f, g = v
            f, g = _frozen_array(f), _frozen_array(g)
            if f.shape != shape or g.shape != shape:
                raise InvalidArgumentError(f"mode {m}: components must have shape {shape}")
            if not (np.all(np.isfinite(f)) and np.all(np.isfinite(g))):
                raise InvalidArgumentError(f"mode {m}: non-finite samples")
            out[int(m)] = (f, g)
        else:
            a = _frozen_array(v)
            if a.shape != shape:
                raise InvalidArgumentError(f"mode {m}: samples must have shape {shape}")
            if not np.all(np.isfinite(a)):
                raise InvalidArgumentError(f"mode {m}: non-finite samples")
            out[int(m)] = a
    return MappingProxyType(dict(sorted(out.items())))


@dataclass(frozen=True, eq=False)
class ModeStack:
    """Radial coefficients kappa_m of a scalar field, one array per populated mode.

    ``spectra`` optionally holds the exact Hankel transforms H_{nu(m)} kappa_m on
    ``spectral_grid``; stacks built from a prescribed spectrum keep it, so norms
    and flows never pay a round-trip error for it.
    """

    flux: FluxParameter
    grid: RadialGrid
    modes: Mapping[int, np.ndarray]
    spectral_grid: RadialGrid | None = None
    spectra: Mapping[int, np.ndarray] | None = None
    tail_tol: float = DEFAULT_TAIL_TOL

    def __post_init__(self):
        object.__setattr__(self, "modes", _freeze_map(self.modes, (self.grid.size,)))
        if (self.spectra is None) != (self.spectral_grid is None):
            raise InvalidArgumentError("spectra and spectral_grid must be given together")
        if self.spectra is not None:
            sp = _freeze_map(self.spectra, (self.spectral_grid.size,))
            if set(sp) != set(self.modes):
                raise InvalidArgumentError("spectra must cover exactly the populated modes")
            object.__setattr__(self, "spectra", sp)

    @classmethod
    def from_spectrum(cls, flux: FluxParameter, spectral_grid: RadialGrid, spectra: Mapping,
                      grid: RadialGrid, **kw):
        """Stack whose radial samples are H_nu g_m on ``grid``."""
        modes = {m: kernel(flux.mode(m).nu, grid, spectral_grid) @ np.asarray(g, dtype=complex)
                 for m, g in spectra.items()}
        return cls(flux, grid, modes, spectral_grid, spectra, **kw)

    @property
    def m_values(self):
        return tuple(self.modes)

    @property
    def m_max(self) -> int:
        return max((abs(m) for m in self.modes), default=0)

    def radial(self, m: int) -> RadialFunction:
        return RadialFunction(self.grid, self.modes[m])

    def l2_norm(self) -> float:
        total = sum(float(np.sum(np.abs(v) ** 2 * self.grid.weights)) for v in self.modes.values())
        return math.sqrt(total)

    def is_zero(self) -> bool:
        return all(not np.any(v) for v in self.modes.values())

    def spectrum(self, m: int, out: RadialGrid | None = None, check_tail=True):
        """(grid, H_nu kappa_m); the cached exact spectrum when available."""
        if self.spectra is not None and (out is None or out.same_as(self.spectral_grid)):
            return self.spectral_grid, self.spectra[m]
        out = self.grid.as_spectral() if out is None else out
        g = kernel(self.flux.mode(m).nu, out, self.grid) @ self.modes[m]
        if check_tail:
            _check_tail(g, out, self.tail_tol, f"mode {m}", self.l2_norm() ** 2)
        return out, g

    def without_spectrum(self) -> "ModeStack":
        return ModeStack(self.flux, self.grid, self.modes, tail_tol=self.tail_tol)

    def scaled_values(self, c: complex) -> "ModeStack":
        spectra = None if self.spectra is None else {m: c * g for m, g in self.spectra.items()}
        return ModeStack(self.flux, self.grid, {m: c * v for m, v in self.modes.items()},
                         self.spectral_grid, spectra, self.tail_tol)

    def dilate(self, lam: float) -> "ModeStack":
        """u(lam x), carried exactly by rescaling the grids (r -> r / lam, rho -> lam rho)."""
        grid = self.grid.scaled(1.0 / lam)
        if self.spectra is None:
            return ModeStack(self.flux, grid, self.modes, tail_tol=self.tail_tol)
        spec = self.spectral_grid.scaled(lam)
        return ModeStack(self.flux, grid, self.modes, spec,
                         {m: g / lam**2 for m, g in self.spectra.items()}, self.tail_tol)


@dataclass(frozen=True, eq=False)
class SpinorModeStack:
    """Radial pairs (f_m, g_m) of a two-component field.

    ``spectra`` optionally holds the exact relativistic transforms
    (P+_m, P-_m) on ``spectral_grid``.
    """

    flux: FluxParameter
    grid: RadialGrid
    modes: Mapping[int, tuple]
    spectral_grid: RadialGrid | None = None
    spectra: Mapping[int, tuple] | None = None
    tail_tol: float = DEFAULT_TAIL_TOL

    def __post_init__(self):
        object.__setattr__(self, "modes", _freeze_map(self.modes, (self.grid.size,), pair=True))
        if (self.spectra is None) != (self.spectral_grid is None):
            raise InvalidArgumentError("spectra and spectral_grid must be given together")
        if self.spectra is not None:
            sp = _freeze_map(self.spectra, (self.spectral_grid.size,), pair=True)
            if set(sp) != set(self.modes):
                raise InvalidArgumentError("spectra must cover exactly the populated modes")
            object.__setattr__(self, "spectra", sp)

    @classmethod
    def from_spectrum(cls, flux: FluxParameter, spectral_grid: RadialGrid, spectra: Mapping,
                      grid: RadialGrid, **kw):
        """Stack whose radial samples are the inverse relativistic transform of (P+, P-)."""
        from .hankel import relativistic_inverse

        modes = {}
        for m, (p, q) in spectra.items():
            f, g = relativistic_inverse(m, flux, RadialFunction(spectral_grid, p),
                                        RadialFunction(spectral_grid, q), out=grid)
            modes[m] = (f.values, g.values)
        return cls(flux, grid, modes, spectral_grid, spectra, **kw)

    @property
    def m_values(self):
        return tuple(self.modes)

    @property
    def m_max(self) -> int:
        return max((abs(m) for m in self.modes), default=0)

    def l2_norm(self) -> float:
        w = self.grid.weights
        total = sum(float(np.sum((np.abs(f) ** 2 + np.abs(g) ** 2) * w))
                    for f, g in self.modes.values())
        return math.sqrt(total)

    def is_zero(self) -> bool:
        return all(not (np.any(f) or np.any(g)) for f, g in self.modes.values())

    def spectrum(self, m: int, out: RadialGrid | None = None, check_tail=True):
        """(grid, P+, P-) for mode m."""
        if self.spectra is not None and (out is None or out.same_as(self.spectral_grid)):
            p, q = self.spectra[m]
            return self.spectral_grid, p, q
        out = self.grid.as_spectral() if out is None else out
        f, g = self.modes[m]
        p, q = relativistic_hankel(m, self.flux, RadialFunction(self.grid, f),
                                   RadialFunction(self.grid, g), out=out)
        if check_tail:
            _check_tail(np.stack([p.values, q.values]), out, self.tail_tol, f"mode {m}",
                        self.l2_norm() ** 2)
        return out, p.values, q.values

    def without_spectrum(self) -> "SpinorModeStack":
        return SpinorModeStack(self.flux, self.grid, self.modes, tail_tol=self.tail_tol)

    def scaled_values(self, c: complex) -> "SpinorModeStack":
        spectra = None
        if self.spectra is not None:
            spectra = {m: (c * p, c * q) for m, (p, q) in self.spectra.items()}
        return SpinorModeStack(self.flux, self.grid,
                               {m: (c * f, c * g) for m, (f, g) in self.modes.items()},
                               self.spectral_grid, spectra, self.tail_tol)

    def dilate(self, lam: float) -> "SpinorModeStack":
        """Phi(lam x) by grid rescaling, as for ``ModeStack.dilate``."""
        grid = self.grid.scaled(1.0 / lam)
        if self.spectra is None:
            return SpinorModeStack(self.flux, grid, self.modes, tail_tol=self.tail_tol)
        spec = self.spectral_grid.scaled(lam)
        return SpinorModeStack(self.flux, grid, self.modes, spec,
                               {m: (p / lam**2, q / lam**2) for m, (p, q) in self.spectra.items()},
                               self.tail_tol)


def _check_tail(spectrum, grid, tol, what, reference=None):
    """Tail mass beyond rho_max/2, relative to ``reference`` (the whole stack) if given.

    Measuring against the stack keeps round-off-level modes from tripping the check.
    """
    frac = tail_fraction(spectrum, grid, 0.5 * grid.r_max)
    if reference:
        own = float(np.sum(np.abs(np.asarray(spectrum)) ** 2 * grid.weights))
        frac *= own / reference
    if frac > tol:
        raise AccuracyError(
            f"{what}: spectral mass fraction {frac:.2e} beyond rho_max/2 = {0.5 * grid.r_max:g} "
            f"exceeds {tol:.0e}; enlarge rho_max or smooth the data",
            achieved=frac,
        )


# angular decomposition


def _angular_check(samples, thetas, m_max, n_r):
    samples = np.asarray(samples, dtype=complex)
    if samples.ndim != 2 or samples.shape[0] != n_r:
        raise InvalidArgumentError(f"samples must have shape ({n_r}, K)")
    k = samples.shape[1]
    if m_max < 0 or k < 2 * m_max + 2:
        raise InvalidArgumentError(f"K = {k} angles cannot resolve m_max = {m_max}; need K >= {2 * m_max + 2}")
    if thetas is not None:
        thetas = np.asarray(thetas, dtype=float)
        expected = 2.0 * np.pi * np.arange(k) / k
        if thetas.shape != (k,) or np.max(np.abs(thetas - thetas[0] - expected)) > 1e-9:
            raise InvalidArgumentError("theta grid must be uniform with spacing 2 pi / K")
        offset = float(thetas[0])
    else:
        offset = 0.0
    return samples, k, offset


def polar_angles(k: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(k) / k


def _coefficients(samples, k, offset):
    # c_n = sqrt(2 pi)/K sum_j Psi(theta_j) e^{-i n theta_j}
    c = np.fft.fft(samples, axis=1) * (_SQRT_2PI / k)
    freqs = np.fft.fftfreq(k, 1.0 / k).astype(int)
    if offset:
        c = c * np.exp(-1j * freqs * offset)
    return c, freqs


def _split_modes(c, freqs, keep, grid, tail_tol, what):
    w = grid.weights
    mass = np.sum(np.abs(c) ** 2 * w[:, None], axis=0)
    total = float(mass.sum())
    kept = {}
    dropped = 0.0
    for col, n in enumerate(freqs):
        if n in keep:
            kept[int(n)] = c[:, col]
        else:
            dropped += float(mass[col])
    if total > 0.0 and dropped > tail_tol * total:
        raise AccuracyError(
            f"{what}: {dropped / total:.2e} of the mass lies in dropped modes (tolerance {tail_tol:.0e})",
            achieved=dropped / total,
        )
    return kept


def decompose_scalar(samples, grid: RadialGrid, flux: FluxParameter, m_max: int = 16,
                     thetas=None, tail_tol: float = DEFAULT_TAIL_TOL) -> ModeStack:
    """Mode stack of a field sampled as samples[i, k] = Psi(r_i, theta_k)."""
    samples, k, offset = _angular_check(samples, thetas, m_max, grid.size)
    c, freqs = _coefficients(samples, k, offset)
    kept = _split_modes(c, freqs, set(range(-m_max, m_max + 1)), grid, tail_tol, "decompose_scalar")
    return ModeStack(flux, grid, kept, tail_tol=tail_tol)


def decompose_spinor(samples, grid: RadialGrid, flux: FluxParameter, m_max: int = 16,
                     thetas=None, tail_tol: float = DEFAULT_TAIL_TOL) -> SpinorModeStack:
    """Spinor stack of samples[c, i, k] = Phi_c(r_i, theta_k), c = 0, 1.

    The upper component of block m is the e^{i m theta} coefficient, the lower
    one the e^{i (m+1) theta} coefficient.
    """
    samples = np.asarray(samples, dtype=complex)
    if samples.ndim != 3 or samples.shape[0] != 2:
        raise InvalidArgumentError("spinor samples must have shape (2, N, K)")
    up, k, offset = _angular_check(samples[0], thetas, m_max + 1, grid.size)
    lo, _, _ = _angular_check(samples[1], thetas, m_max + 1, grid.size)
    cu, freqs = _coefficients(up, k, offset)
    cl, _ = _coefficients(lo, k, offset)
    ms = range(-m_max, m_max + 1)
    fu = _split_modes(cu, freqs, set(ms), grid, tail_tol, "decompose_spinor (upper)")
    fl = _split_modes(cl, freqs, {m + 1 for m in ms}, grid, tail_tol, "decompose_spinor (lower)")
    modes = {m: (fu[m], fl[m + 1]) for m in ms}
    return SpinorModeStack(flux, grid, modes, tail_tol=tail_tol)


def recompose_scalar(stack: ModeStack, thetas) -> np.ndarray:
    """Psi(r_i, theta_k) from a mode stack."""
    thetas = np.asarray(thetas, dtype=float)
    out = np.zeros((stack.grid.size, thetas.size), dtype=complex)
    for m, v in stack.modes.items():
        out += np.outer(v, np.exp(1j * m * thetas))
    return out / _SQRT_2PI


def recompose_spinor(stack: SpinorModeStack, thetas) -> np.ndarray:
    thetas = np.asarray(thetas, dtype=float)
    out = np.zeros((2, stack.grid.size, thetas.size), dtype=complex)
    for m, (f, g) in stack.modes.items():
        out[0] += np.outer(f, np.exp(1j * m * thetas))
        out[1] += np.outer(g, np.exp(1j * (m + 1) * thetas))
    return out / _SQRT_2PI


# finite-difference radial operators (residual testing only)


def _fd_setup(grid: RadialGrid):
    if grid.size < 64:
        raise InvalidArgumentError(f"finite differences need at least 64 nodes, got {grid.size}")
    if not grid.is_uniform:
        raise InvalidArgumentError("finite-difference operators need a uniform grid")
    return grid.nodes[1] - grid.nodes[0]


def _d1(v, h):
    out = np.zeros_like(v)
    out[2:-2] = (v[:-4] - 8.0 * v[1:-3] + 8.0 * v[3:-1] - v[4:]) / (12.0 * h)
    return out


def _d2(v, h):
    out = np.zeros_like(v)
    out[2:-2] = (-v[:-4] + 16.0 * v[1:-3] - 30.0 * v[2:-2] + 16.0 * v[3:-1] - v[4:]) / (12.0 * h * h)
    return out


def _interior(v):
    v[:2] = 0.0
    v[-2:] = 0.0
    return v


def apply_H_radial(mode: Mode, k: RadialFunction) -> RadialFunction:
    """Fourth-order centred H_{alpha,m} k; the two nodes at each end are set to 0."""
    h = _fd_setup(k.grid)
    r = k.grid.nodes
    v = np.asarray(k.values)
    c = (mode.m + mode.alpha) ** 2
    out = -_d2(v, h) - _d1(v, h) / r + c / (r * r) * v
    return RadialFunction(k.grid, _interior(out))


def apply_D_radial(mode: Mode, fg) -> tuple:
    """Fourth-order centred Dirac block applied to (f, g); end nodes set to 0."""
    f, g = fg
    if not f.grid.same_as(g.grid):
        raise InvalidArgumentError("spinor components must share one grid")
    h = _fd_setup(f.grid)
    r = f.grid.nodes
    a = mode.m + mode.alpha
    top = -1j * (_d1(g.values, h) + (a + 1.0) / r * g.values)
    bottom = -1j * (_d1(f.values, h) - a / r * f.values)
    return RadialFunction(f.grid, _interior(top)), RadialFunction(f.grid, _interior(bottom))


# generalized eigenfunctions


def schr_eigenfunction(mode: Mode, E: float, r):
    """J_nu(E r), the mode-m generalized eigenfunction of H_{alpha,m} with eigenvalue E^2."""
    if not E > 0.0:
        raise InvalidArgumentError(f"energy must be positive, got {E!r}")
    return bessel_j(mode.nu, E * np.asarray(r, dtype=float))


def dirac_eigenfunction(mode: Mode, E: float, r):
    """Generalized eigenfunction chi_{m,E} of the Dirac block, E != 0.

    chi_{m,E} = (eps_m^m J_nu(E r), i eps_m^(m+1) J_{nu'}(E r)) with nu' the
    signed lower order; negative energies use chi_{m,-E} = conj(chi_{m,E}).
    """
    E = float(E)
    if E == 0.0 or not math.isfinite(E):
        raise InvalidArgumentError(f"energy must be finite and non-zero, got {E!r}")
    x = abs(E) * np.asarray(r, dtype=float)
    f = mode.upper_sign * bessel_j(mode.nu, x)
    g = 1j * mode.lower_sign * bessel_j(mode.lower_order, x)
    if E < 0:
        g = np.conj(g)
    return f + 0j, g


# Sobolev norms


def sobolev_norm_scalar(s: float, u: ModeStack) -> float:
    """(sum_m int rho^{2s} |H_nu kappa_m|^2 rho d rho)^{1/2}."""
    total = 0.0
    for m in u.modes:
        grid, g = u.spectrum(m)
        total += float(np.sum(grid.nodes ** (2.0 * s) * np.abs(g) ** 2 * grid.weights))
    return math.sqrt(total)


def sobolev_norm_spinor(s: float, u: SpinorModeStack) -> float:
    """(sum_m int |E|^{2s} (|P+ u|^2 + |P- u|^2) E dE)^{1/2}."""
    total = 0.0
    for m in u.modes:
        grid, p, q = u.spectrum(m)
        total += float(np.sum(grid.nodes ** (2.0 * s) * (np.abs(p) ** 2 + np.abs(q) ** 2) * grid.weights))
    return math.sqrt(total)


def spectral_norm_scalar(u: ModeStack, symbol) -> float:
    """(sum_m int |symbol(rho)|^2 |H_nu kappa_m|^2 rho d rho)^{1/2} for a general multiplier."""
    total = 0.0
    for m in u.modes:
        grid, g = u.spectrum(m)
        total += float(np.sum(np.abs(symbol(grid.nodes)) ** 2 * np.abs(g) ** 2 * grid.weights))
    return math.sqrt(total)
