"""Spectrally exact flows: half-wave, wave, Klein-Gordon and massless Dirac.

Every flow is a Hankel multiplier mode by mode, so time enters only through
bounded symbols and evolution is exact in t.  Stacks that carry an exact
spectrum keep it through the flow; stacks given only by radial samples are
transformed on their own grid (with a spectral-tail check) and the result is
returned as radial samples.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bessel import bessel_j, cutoff_chi
from .errors import InvalidArgumentError
from .fields import SpaceTimeField
from .hankel import RadialFunction, RadialGrid, kernel, relativistic_inverse
from .operators import ModeStack, SpinorModeStack, sobolev_norm_scalar, spectral_norm_scalar

_SQRT_HALF = math.sqrt(0.5)


# symbols


def sinc_symbol(t: float, rho):
    """sin(t rho) / rho, with the removable singularity at rho = 0 filled in."""
    rho = np.asarray(rho, dtype=float)
    small = np.abs(rho) < 1e-6
    safe = np.where(small, 1.0, rho)
    return np.where(small, t - t**3 * rho * rho / 6.0, np.sin(t * safe) / safe)


def kg_frequency(rho):
    rho = np.asarray(rho, dtype=float)
    return np.sqrt(rho * rho + 1.0)


def lp_piece(lam):
    """Littlewood-Paley profile phi(lam) = chi(lam/2) - chi(lam), supported in [1/2, 2]."""
    lam = np.asarray(lam, dtype=float)
    return cutoff_chi(0.5 * lam) - cutoff_chi(lam)


def lp_low(lam):
    """Low-pass phi_0(lam) = sum_{j <= 0} phi(2^{-j} lam) = chi(lam/2)."""
    return cutoff_chi(0.5 * np.asarray(lam, dtype=float))


@dataclass(frozen=True)
class FrequencyWindow:
    """Dyadic piece phi(lambda/N) or low-pass phi_0(lambda/N).

    ``argument`` selects lambda = rho (the wave/Dirac frequency) or
    lambda = sqrt(rho^2 + 1) (the Klein-Gordon frequency).
    """

    kind: str = "dyadic"
    N: float = 1.0
    argument: str = "rho"

    def __post_init__(self):
        if self.kind not in ("dyadic", "lowpass", "highpass"):
            raise InvalidArgumentError(f"unknown window kind {self.kind!r}")
        if self.argument not in ("rho", "kg"):
            raise InvalidArgumentError(f"unknown window argument {self.argument!r}")
        n = float(self.N)
        if not n > 0.0:
            raise InvalidArgumentError("window scale N must be positive")
        if self.kind == "dyadic":
            j = math.log2(n)
            if abs(j - round(j)) > 1e-12:
                raise InvalidArgumentError(f"dyadic scale N must be a power of 2, got {n}")
        object.__setattr__(self, "N", n)

    def __call__(self, rho):
        lam = kg_frequency(rho) if self.argument == "kg" else np.asarray(rho, dtype=float)
        x = lam / self.N
        if self.kind == "dyadic":
            return lp_piece(x)
        if self.kind == "lowpass":
            return lp_low(x)
        return 1.0 - lp_low(x)


# spectral plumbing


def _scalar_spectra(*stacks):
    """Common spectral grid and per-mode spectra for stacks on one radial grid."""
    first = stacks[0]
    for s in stacks[1:]:
        if s.flux != first.flux or not s.grid.same_as(first.grid):
            raise InvalidArgumentError("states must share flux and radial grid")
        if set(s.modes) != set(first.modes):
            raise InvalidArgumentError("states must populate the same modes")
    cached = all(s.spectra is not None for s in stacks) and all(
        s.spectral_grid.same_as(first.spectral_grid) for s in stacks)
    grid = first.spectral_grid if cached else first.grid.as_spectral()
    out = []
    for s in stacks:
        out.append({m: s.spectrum(m, grid)[1] for m in s.modes})
    return grid, out, cached


def _rebuild(template: ModeStack, spec_grid, spectra, cached) -> ModeStack:
    if cached:
        return ModeStack.from_spectrum(template.flux, spec_grid, spectra, template.grid,
                                       tail_tol=template.tail_tol)
    modes = {m: kernel(template.flux.mode(m).nu, template.grid, spec_grid) @ g
             for m, g in spectra.items()}
    return ModeStack(template.flux, template.grid, modes, tail_tol=template.tail_tol)


def apply_symbol(u: ModeStack, symbol: Callable) -> ModeStack:
    """Multiply every mode's spectrum by symbol(rho)."""
    grid, (spectra,), cached = _scalar_spectra(u)
    sym = np.asarray(symbol(grid.nodes), dtype=complex)
    if not np.all(np.isfinite(sym)):
        raise InvalidArgumentError("symbol is not finite on the spectral grid")
    return _rebuild(u, grid, {m: sym * g for m, g in spectra.items()}, cached)


@dataclass(frozen=True)
class WaveState:
    """Position and velocity data (v0, v1) of a second-order flow."""

    u0: ModeStack
    u1: ModeStack

    def __post_init__(self):
        if self.u0.flux != self.u1.flux or not self.u0.grid.same_as(self.u1.grid):
            raise InvalidArgumentError("v0 and v1 must share flux and radial grid")

    @classmethod
    def at_rest(cls, u0: ModeStack):
        zero = u0.scaled_values(0.0)
        return cls(u0, zero)


# flows


def half_wave_evolve(u: ModeStack, t: float) -> ModeStack:
    """e^{i t sqrt(H)} u."""
    return apply_symbol(u, lambda rho: np.exp(1j * t * rho))


def _second_order(state: WaveState, t: float, omega: Callable, derivative: bool):
    grid, (g0, g1), cached = _scalar_spectra(state.u0, state.u1)
    w = omega(grid.nodes)
    c, s = np.cos(t * w), np.sin(t * w)
    # w >= 1 for Klein-Gordon; the wave symbol needs the series near rho = 0
    s_over = s / w if omega is kg_frequency else sinc_symbol(t, w)
    pos = {m: c * g0[m] + s_over * g1[m] for m in g0}
    v = _rebuild(state.u0, grid, pos, cached)
    if not derivative:
        return v
    vel = {m: -w * s * g0[m] + c * g1[m] for m in g0}
    return WaveState(v, _rebuild(state.u0, grid, vel, cached))


def _rho(rho):
    return np.asarray(rho, dtype=float)


def wave_evolve(state: WaveState, t: float) -> ModeStack:
    """cos(t sqrt H) v0 + sin(t sqrt H)/sqrt H v1."""
    return _second_order(state, t, _rho, False)


def wave_evolve_state(state: WaveState, t: float) -> WaveState:
    """(v(t), d/dt v(t)) for the wave flow."""
    return _second_order(state, t, _rho, True)


def klein_gordon_evolve(state: WaveState, t: float) -> ModeStack:
    """cos(t sqrt(H+1)) v0 + sin(t sqrt(H+1))/sqrt(H+1) v1."""
    return _second_order(state, t, kg_frequency, False)


def klein_gordon_evolve_state(state: WaveState, t: float) -> WaveState:
    return _second_order(state, t, kg_frequency, True)


def wave_energy(state: WaveState) -> float:
    """||v||^2 in the H^1 seminorm plus ||d_t v||^2."""
    return sobolev_norm_scalar(1.0, state.u0) ** 2 + state.u1.l2_norm() ** 2


def klein_gordon_energy(state: WaveState) -> float:
    """||(H+1)^{1/2} v||^2 + ||d_t v||^2."""
    return spectral_norm_scalar(state.u0, kg_frequency) ** 2 + state.u1.l2_norm() ** 2


def _spinor_spectra(u: SpinorModeStack):
    cached = u.spectra is not None
    grid = u.spectral_grid if cached else u.grid.as_spectral()
    return grid, {m: u.spectrum(m, grid)[1:] for m in u.modes}, cached


def dirac_evolve(u: SpinorModeStack, t: float) -> SpinorModeStack:
    """e^{-i t D} u: the + branch picks up e^{-i t E}, the - branch e^{+i t E}."""
    grid, spectra, cached = _spinor_spectra(u)
    ph = np.exp(-1j * t * grid.nodes)
    new = {m: (ph * p, np.conj(ph) * q) for m, (p, q) in spectra.items()}
    if cached:
        return SpinorModeStack.from_spectrum(u.flux, grid, new, u.grid, tail_tol=u.tail_tol)
    modes = {}
    for m, (p, q) in new.items():
        f, g = relativistic_inverse(m, u.flux, RadialFunction(grid, p), RadialFunction(grid, q),
                                    out=u.grid)
        modes[m] = (f.values, g.values)
    return SpinorModeStack(u.flux, u.grid, modes, tail_tol=u.tail_tol)


def frequency_window(u: ModeStack, w: FrequencyWindow) -> ModeStack:
    """Multiplier w(rho) (or w(sqrt(rho^2+1)) for Klein-Gordon windows)."""
    return apply_symbol(u, w)


def dyadic_scales(rho_lo: float, rho_hi: float, argument="rho"):
    """Dyadic N whose pieces can be non-zero on [rho_lo, rho_hi]."""
    if argument == "kg":
        rho_lo, rho_hi = math.sqrt(rho_lo**2 + 1), math.sqrt(rho_hi**2 + 1)
    j0 = math.floor(math.log2(max(rho_lo, 1e-300))) - 1
    j1 = math.ceil(math.log2(rho_hi)) + 1
    return [2.0**j for j in range(j0, j1 + 1)]


# batch trajectories


def _channels_density(times, obs: RadialGrid, spec: RadialGrid, channels, chunk=512):
    """Density sum_c |kappa_c(t, r)|^2 and an evaluator at arbitrary radii.

    Each channel is (order, coeff) with coeff of shape (n_t, N_spec) such that
    kappa_c(t_n, r) = sum_j J_order(r rho_j) coeff[n, j] w_j.
    """
    n_t = len(times)
    # identically zero channels contribute nothing and carry no small-r constraint
    channels = [(o, c) for o, c in channels if np.any(c)]
    density = np.zeros((n_t, obs.size))
    for order, coeff in channels:
        k = kernel(order, obs, spec)
        for a in range(0, n_t, chunk):
            b = min(n_t, a + chunk)
            vals = coeff[a:b] @ k.T
            density[a:b] += vals.real ** 2 + vals.imag ** 2

    rho, w = spec.nodes, spec.weights

    def evaluate(n_idx, r):
        n_idx = np.atleast_1d(np.asarray(n_idx))
        r = np.asarray(r, dtype=float)
        r = r.reshape(n_idx.size, -1)
        out = np.zeros(r.shape)
        for order, coeff in channels:
            kern = bessel_j(order, r[..., None] * rho) * w
            vals = np.einsum("npj,nj->np", kern, coeff[n_idx])
            out += vals.real ** 2 + vals.imag ** 2
        return out

    return density, evaluate, tuple(o for o, _ in channels)


def _scalar_orders(u: ModeStack, spectra):
    return [(u.flux.mode(m).nu, spectra[m]) for m in u.modes]


def half_wave_trajectory(u: ModeStack, times, obs: RadialGrid) -> SpaceTimeField:
    """e^{i t sqrt H} u sampled at all ``times`` on ``obs`` (one shared forward transform)."""
    times = np.asarray(times, dtype=float)
    grid, (spectra,), _ = _scalar_spectra(u)
    ph = np.exp(1j * np.multiply.outer(times, grid.nodes))
    # skip empty modes before forming the (n_t, N) coefficient blocks
    chans = [(order, ph * g) for order, g in _scalar_orders(u, spectra) if np.any(g)]
    density, ev, orders = _channels_density(times, obs, grid, chans)
    return SpaceTimeField(times, obs, density, orders, ev)


def _second_order_trajectory(state, times, obs, omega, window=None):
    times = np.asarray(times, dtype=float)
    grid, (g0, g1), _ = _scalar_spectra(state.u0, state.u1)
    w = omega(grid.nodes)
    tw = np.multiply.outer(times, w)
    c = np.cos(tw)
    s = np.sin(tw) / w if omega is kg_frequency else sinc_symbol(times[:, None], w[None, :])
    filt = 1.0 if window is None else np.asarray(window(grid.nodes))
    chans = []
    for m in state.u0.modes:
        if not (np.any(g0[m]) or np.any(g1[m])):
            continue
        coeff = (c * g0[m] + s * g1[m]) * filt
        chans.append((state.u0.flux.mode(m).nu, coeff))
    density, ev, orders = _channels_density(times, obs, grid, chans)
    return SpaceTimeField(times, obs, density, orders, ev)


def wave_trajectory(state: WaveState, times, obs: RadialGrid, window=None) -> SpaceTimeField:
    return _second_order_trajectory(state, times, obs, _rho, window)


def klein_gordon_trajectory(state: WaveState, times, obs: RadialGrid, window=None) -> SpaceTimeField:
    """Klein-Gordon evolution sampled in time; ``window`` is an optional spectral filter."""
    return _second_order_trajectory(state, times, obs, kg_frequency, window)


def dirac_trajectory(u: SpinorModeStack, times, obs: RadialGrid) -> SpaceTimeField:
    times = np.asarray(times, dtype=float)
    grid, spectra, _ = _spinor_spectra(u)
    ph = np.exp(-1j * np.multiply.outer(times, grid.nodes))
    chans = []
    for m, (p, q) in spectra.items():
        if not (np.any(p) or np.any(q)):
            continue
        mode = u.flux.mode(m)
        plus, minus = ph * p, np.conj(ph) * q
        chans.append((mode.nu, _SQRT_HALF * mode.upper_sign * (plus - minus)))
        chans.append((mode.lower_order, 1j * _SQRT_HALF * mode.lower_sign * (plus + minus)))
    density, ev, orders = _channels_density(times, obs, grid, chans)
    return SpaceTimeField(times, obs, density, orders, ev)
