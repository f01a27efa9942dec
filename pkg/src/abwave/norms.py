"""Mixed space-time norms, weighted smoothing norms and Strichartz ratios."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidArgumentError, ZeroDataError
from .fields import SpaceTimeField, uniform_times
from .hankel import RadialGrid
from .operators import ModeStack, SpinorModeStack, sobolev_norm_scalar, sobolev_norm_spinor
from .propagators import dirac_trajectory, half_wave_trajectory

DEFAULT_T = 32.0
DEFAULT_DT = 1.0 / 16.0


@dataclass(frozen=True)
class MixedNormSpec:
    """Exponents (p, q) of L^p_t L^q_{r dr} L^2_theta; either may be inf."""

    p: float
    q: float

    def __post_init__(self):
        p, q = float(self.p), float(self.q)
        for name, v in (("p", p), ("q", q)):
            if math.isnan(v) or v < 1.0:
                raise InvalidArgumentError(f"{name} must be >= 1 (or inf), got {v}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def admissible(self) -> bool:
        """1/p + 1/q < 1/2, or the energy endpoint (inf, 2)."""
        if self.p == math.inf and self.q == 2.0:
            return True
        return self.p >= 2.0 and self.q >= 2.0 and 1.0 / self.p + 1.0 / self.q < 0.5

    def label(self) -> str:
        f = lambda v: "inf" if v == math.inf else f"{v:g}"  # noqa: E731
        return f"({f(self.p)},{f(self.q)})"


def strichartz_exponent(spec: MixedNormSpec) -> float:
    """Scaling-critical regularity s = 1 - 1/p - 2/q."""
    return 1.0 - 1.0 / spec.p - 2.0 / spec.q


def _radial_sup(F: SpaceTimeField, sub=None):
    """sup_r of the density per time: node maximum plus one bisection pass."""
    dens = F.density
    k = np.argmax(dens, axis=1)
    best = dens[np.arange(dens.shape[0]), k]
    if F.evaluate is None:
        return best
    r = F.grid.nodes
    left = np.where(k > 0, r[np.maximum(k - 1, 0)], F.grid.r_min)
    right = np.where(k < r.size - 1, r[np.minimum(k + 1, r.size - 1)], F.grid.r_max)
    pts = np.stack([0.5 * (left + r[k]), 0.5 * (r[k] + right)], axis=1)
    if F.grid.r_min == 0.0:
        pts = np.where(pts <= 0.0, r[k][:, None], pts)
    extra = F.evaluate(np.arange(dens.shape[0]), pts)
    return np.maximum(best, extra.max(axis=1))


def _radial_norm(F: SpaceTimeField, q: float):
    if q == math.inf:
        return np.sqrt(_radial_sup(F))
    return np.sum(F.density ** (0.5 * q) * F.grid.weights, axis=1) ** (1.0 / q)


def mixed_norm(F: SpaceTimeField, spec: MixedNormSpec) -> float:
    """||F||_{L^p_t L^q_{r dr} L^2_theta} over the sampled window.

    The angular layer is the stored Parseval density, the radial layer the
    grid quadrature (sup with one bisection pass when q = inf), and the time
    layer a Riemann sum dt * sum (max when p = inf).
    """
    inner = _radial_norm(F, spec.q)
    if spec.p == math.inf:
        return float(inner.max())
    return float((F.dt * np.sum(inner ** spec.p)) ** (1.0 / spec.p))


def weighted_smoothing_norm(F: SpaceTimeField, beta: float) -> float:
    """(sum_n dt sum_m int r^{-2 beta} |kappa_m(t_n, r)|^2 r dr)^{1/2}."""
    beta = float(beta)
    if F.orders:
        low = min(F.orders)
        if beta >= 1.0 + low:
            raise DomainError(
                f"|x|^(-beta) weight with beta = {beta} is not square integrable against a mode "
                f"of Bessel order {low:g} (needs beta < 1 + {low:g})"
            )
    w = F.grid.weights * F.grid.nodes ** (-2.0 * beta)
    return float(math.sqrt(F.dt * np.sum(F.density @ w)))


# Strichartz ratios


@dataclass(frozen=True)
class RatioResult:
    """One Strichartz ratio with its time-truncation diagnostic."""

    ratio: float
    ratio_2T: float
    lhs: float
    rhs: float
    s: float
    T: float
    spec: MixedNormSpec

    @property
    def t_delta(self) -> float:
        return abs(self.ratio_2T - self.ratio) / abs(self.ratio) if self.ratio else 0.0

    def __float__(self):
        return float(self.ratio)


def _check_spec(spec: MixedNormSpec):
    if not spec.admissible:
        raise InvalidArgumentError(
            f"{spec.label()} is not admissible: need 1/p + 1/q < 1/2 or (p, q) = (inf, 2)"
        )


def default_observation_grid(spectral: RadialGrid, T: float, r_data: float = 0.0,
                             panel: int = 32, refine: int = 1) -> RadialGrid:
    """Radial window reaching past everything a unit-speed wave can cover in time 2T."""
    rho_lo = max(spectral.nodes[0], 1e-3)
    rho_hi = spectral.nodes[-1]
    r_obs = r_data + 2.0 * T + 40.0 / rho_lo
    n = panel * max(8, math.ceil(6.0 * refine * rho_hi * r_obs / panel))
    return RadialGrid.gauss_legendre(n, r_obs, panel)


def _ratios(traj_fn, data, norm_fn, specs, T, dt, obs):
    flux = data.flux
    flux.require_nonintegral("a Strichartz estimate check")
    for spec in specs:
        _check_spec(spec)
    if data.is_zero():
        raise ZeroDataError("Strichartz ratio of zero data: 0/0")
    if obs is None:
        spec_grid = data.spectral_grid if data.spectra is not None else data.grid.as_spectral()
        obs = default_observation_grid(spec_grid, T, data.grid.r_max)
    # one trajectory on [-2T, 2T] serves every spec and both windows
    F2 = traj_fn(data, uniform_times(2.0 * T, dt), obs)
    F1 = F2.window(T)
    out = []
    for spec in specs:
        s = strichartz_exponent(spec)
        rhs = norm_fn(s, data)
        if rhs == 0.0:
            raise ZeroDataError("Strichartz ratio of data with vanishing Sobolev norm")
        lhs2 = mixed_norm(F2, spec)
        lhs = mixed_norm(F1, spec)
        out.append(RatioResult(lhs / rhs, lhs2 / rhs, lhs, rhs, s, T, spec))
    return out


_FLOWS = {
    "wave": (half_wave_trajectory, sobolev_norm_scalar),
    "dirac": (dirac_trajectory, sobolev_norm_spinor),
}


def strichartz_ratios(flow: str, data, specs, T: float = DEFAULT_T, dt: float = DEFAULT_DT,
                      obs: RadialGrid | None = None) -> list:
    """Ratios for several specs from one sampled trajectory (flow 'wave' or 'dirac')."""
    if flow not in _FLOWS:
        raise InvalidArgumentError(f"flow must be 'wave' or 'dirac', got {flow!r}")
    traj_fn, norm_fn = _FLOWS[flow]
    return _ratios(traj_fn, data, norm_fn, list(specs), T, dt, obs)


def strichartz_ratio_wave(u0: ModeStack, spec: MixedNormSpec, T: float = DEFAULT_T,
                          dt: float = DEFAULT_DT, obs: RadialGrid | None = None) -> RatioResult:
    """||e^{it sqrt H} u0||_{L^p([-T,T]) L^q L^2} / ||u0||_{H^s}, with s = 1 - 1/p - 2/q.

    The trajectory is sampled on [-2T, 2T] once; ``ratio_2T`` is the same
    quotient over the doubled window.
    """
    return strichartz_ratios("wave", u0, [spec], T, dt, obs)[0]


def strichartz_ratio_dirac(f: SpinorModeStack, spec: MixedNormSpec, T: float = DEFAULT_T,
                           dt: float = DEFAULT_DT, obs: RadialGrid | None = None) -> RatioResult:
    """Dirac analogue of ``strichartz_ratio_wave`` (flow e^{-itD}, spinor Sobolev norm)."""
    return strichartz_ratios("dirac", f, [spec], T, dt, obs)[0]
