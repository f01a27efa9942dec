"""Bessel functions of the first kind for real order, and the Schläfli split.

``bessel_j`` evaluates J_nu(x) for real nu > -1 and x >= 0 with four
regimes:

* x <= 8: the ascending power series (cancellation is at most e^x, so the
  relative error stays near 1e-12);
* 8 < x < 25: Schläfli's integral for the two base orders mu, mu + 1 with
  mu = frac(nu), by fixed Gauss-Legendre rules;
* x >= 25: the Hankel large-argument expansion for the base orders, summed
  until the terms drop below 1e-17 or start to grow;
* the base pair is carried to order nu by forward recurrence when nu <= x
  and by Miller's backward recurrence (normalised against the pair) when
  nu > x.

Everything is vectorised over the argument for a fixed order, which is how
the Hankel kernels use it.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import AccuracyError, AccuracyWarning, DomainError, InvalidArgumentError

SERIES_LIMIT = 8.0
ASYMPTOTIC_LIMIT = 25.0

_THETA_X, _THETA_W = np.polynomial.legendre.leggauss(96)
_S_X, _S_W = np.polynomial.legendre.leggauss(48)
_GL16 = np.polynomial.legendre.leggauss(16)
_GL32 = np.polynomial.legendre.leggauss(32)


def _check_order(nu):
    nu = float(nu)
    if not math.isfinite(nu):
        raise InvalidArgumentError(f"Bessel order must be finite, got {nu!r}")
    if nu <= -1.0:
        raise InvalidArgumentError(f"Bessel order must exceed -1, got {nu!r}")
    return nu


def _is_integer(nu):
    return float(nu).is_integer()


def _series(nu, x):
    # sum_k (-x^2/4)^k / (k! (nu+1)_k), times (x/2)^nu / Gamma(nu+1)
    q = -0.25 * x * x
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, 400):
        term = term * q / (k * (k + nu))
        total = total + term
        if k > 3 and np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    if nu == 0.0:
        return total
    with np.errstate(divide="ignore"):
        log_pre = nu * np.log(0.5 * x) - gammaln(nu + 1.0)
    return np.exp(log_pre) * total


def _hankel_asymptotic(mu, x):
    four_mu2 = 4.0 * mu * mu
    inv = 1.0 / (8.0 * x)
    p = np.ones_like(x)
    q = np.zeros_like(x)
    a = np.ones_like(x)
    prev = np.full_like(x, np.inf)
    done = np.zeros(x.shape, dtype=bool)
    for k in range(1, 80):
        a = a * (four_mu2 - (2 * k - 1) ** 2) * inv / k
        mag = np.abs(a)
        # optimal truncation: stop a lane once its terms grow
        stop = done | (mag > prev)
        a = np.where(stop, 0.0, a)
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2:
            q += sign * a
        else:
            p += sign * a
        prev = np.where(stop, prev, mag)
        done = stop | (mag < 1e-17)
        if done.all():
            break
    phase = x - (0.5 * mu + 0.25) * np.pi
    return np.sqrt(2.0 / (np.pi * x)) * (p * np.cos(phase) - q * np.sin(phase))


def _schlafli_real(mu, x):
    # J_mu(x) = (1/pi) int_0^pi cos(x sin t - mu t) dt
    #           - sin(mu pi)/pi int_0^inf exp(-x sinh s - mu s) ds,   x > 0
    theta = 0.5 * np.pi * (_THETA_X + 1.0)
    tw = 0.5 * np.pi * _THETA_W
    main = np.cos(np.multiply.outer(x, np.sin(theta)) - mu * theta) @ tw / np.pi
    if _is_integer(mu):
        return main
    s_max = np.arcsinh(45.0 / x)
    s = 0.5 * np.multiply.outer(s_max, _S_X + 1.0)
    sw = 0.5 * np.multiply.outer(s_max, _S_W)
    tail = np.sum(np.exp(-x[:, None] * np.sinh(s) - mu * s) * sw, axis=1)
    return main - math.sin(mu * math.pi) / math.pi * tail


def _base_pair(mu, x):
    j0 = np.empty_like(x)
    j1 = np.empty_like(x)
    far = x >= ASYMPTOTIC_LIMIT
    if far.any():
        j0[far] = _hankel_asymptotic(mu, x[far])
        j1[far] = _hankel_asymptotic(mu + 1.0, x[far])
    near = ~far
    if near.any():
        j0[near] = _schlafli_real(mu, x[near])
        j1[near] = _schlafli_real(mu + 1.0, x[near])
    return j0, j1


def _forward(mu, n, x, j0, j1):
    if n == 0:
        return j0
    a, b = j0, j1
    for k in range(1, n):
        a, b = b, (2.0 * (mu + k) / x) * b - a
    return b


def _miller(mu, n, x, j0, j1):
    top = n + 30 + int(4.0 * math.sqrt(max(mu + n, 1.0)))
    y_up = np.zeros_like(x)
    y = np.full_like(x, 1e-30)
    target = y if n == top else None
    y_one = None
    for k in range(top, 0, -1):
        y_up, y = y, (2.0 * (mu + k) / x) * y - y_up
        order = k - 1
        if order == n:
            target = y.copy()
        if order == 1:
            y_one = y.copy()
        big = np.abs(y) > 1e200
        if big.any():
            s = np.where(big, 1e-200, 1.0)
            y = y * s
            y_up = y_up * s
            if target is not None:
                target = target * s
            if y_one is not None:
                y_one = y_one * s
    if n == 0:
        target = y
    norm = np.maximum(np.abs(y), np.abs(y_one))
    y0 = y / norm
    y1 = y_one / norm
    scale = (j0 * y0 + j1 * y1) / (y0 * y0 + y1 * y1)
    return target / norm * scale


def _jv(nu, x):
    """J_nu on a float array of non-negative arguments (order already checked)."""
    out = np.empty_like(x)
    small = x <= SERIES_LIMIT
    if small.any():
        out[small] = _series(nu, x[small])
    rest = ~small
    if rest.any():
        n = int(math.floor(nu)) if nu >= 0.0 else 0
        mu = nu - n
        xr = x[rest]
        j0, j1 = _base_pair(mu, xr)
        vals = np.empty_like(xr)
        fwd = nu <= xr
        if fwd.any():
            vals[fwd] = _forward(mu, n, xr[fwd], j0[fwd], j1[fwd])
        back = ~fwd
        if back.any():
            vals[back] = _miller(mu, n, xr[back], j0[back], j1[back])
        out[rest] = vals
    return out


def estimated_accuracy(nu, r):
    """A-priori relative accuracy (with respect to the local envelope) of ``bessel_j``."""
    r = np.asarray(r, dtype=float)
    return 2e-14 + 1.1e-16 * (np.abs(r) + abs(nu)) * 8.0


def _prepare(nu, r):
    nu = _check_order(nu)
    x = np.asarray(r, dtype=float)
    if not np.all(np.isfinite(x)):
        raise InvalidArgumentError("Bessel argument must be finite")
    if np.any(x < 0.0):
        raise InvalidArgumentError("Bessel argument must be non-negative")
    return nu, x


def bessel_j(nu, r):
    """Bessel function of the first kind J_nu(r).

    Parameters
    ----------
    nu : float
        Real order, nu > -1 (the package only needs nu >= 0 except for the
        single Dirac mode with a negative lower order).
    r : float or array_like
        Non-negative argument(s).

    Returns
    -------
    float or ndarray
        Same shape as ``r``.  Accuracy is about 1e-12 relative to the local
        envelope for r, nu <= 1e3; beyond that an ``AccuracyWarning`` reports
        the estimated loss (phase reduction costs ~eps * r).
    """
    nu, x = _prepare(nu, r)
    if nu < 0.0 and np.any(x == 0.0):
        raise DomainError(f"J_{nu} is unbounded at r = 0")
    flat = np.ascontiguousarray(x, dtype=float).ravel()
    vals = _jv(nu, flat).reshape(x.shape)
    if flat.size:
        est = float(np.max(estimated_accuracy(nu, flat)))
        if est > 1e-10:
            warnings.warn(
                f"J_{nu}: estimated relative accuracy {est:.1e} (large order/argument)",
                AccuracyWarning,
                stacklevel=2,
            )
    if vals.ndim == 0:
        return float(vals)
    return vals


def bessel_j_prime(nu, r):
    """Derivative d/dr J_nu(r) = (nu/r) J_nu(r) - J_{nu+1}(r)."""
    nu, x = _prepare(nu, r)
    if np.any(x == 0.0):
        if nu < 1.0:
            raise DomainError(
                f"J'_{nu} at r = 0 is excluded for nu < 1 (singular or at the domain edge)"
            )
    flat = np.ascontiguousarray(x, dtype=float).ravel()
    out = np.empty_like(flat)
    zero = flat == 0.0
    out[zero] = 0.5 if nu == 1.0 else 0.0
    pos = ~zero
    if pos.any():
        xp = flat[pos]
        out[pos] = (nu / xp) * _jv(nu, xp) - _jv(nu + 1.0, xp)
    out = out.reshape(x.shape)
    if out.ndim == 0:
        return float(out)
    return out


def envelope_bound(nu, r, constant=1.0):
    """Small-argument envelope C r^nu (1 + 1/(nu+1/2)) / (2^nu Gamma(nu+1/2) Gamma(1/2))."""
    r = np.asarray(r, dtype=float)
    log_den = nu * math.log(2.0) + gammaln(nu + 0.5) + 0.5 * math.log(math.pi)
    with np.errstate(divide="ignore"):
        val = np.exp(nu * np.log(r) - log_den)
    return constant * val * (1.0 + 1.0 / (nu + 0.5))


def envelope_bound_prime(nu, r, constant=1.0):
    """Envelope C (nu r^(nu-1) + r^nu)(1 + 1/(nu+1/2)) / (2^nu Gamma(nu+1/2) Gamma(1/2))."""
    r = np.asarray(r, dtype=float)
    log_den = nu * math.log(2.0) + gammaln(nu + 0.5) + 0.5 * math.log(math.pi)
    with np.errstate(divide="ignore"):
        val = (nu * np.exp((nu - 1.0) * np.log(r) - log_den) + np.exp(nu * np.log(r) - log_den))
    return constant * val * (1.0 + 1.0 / (nu + 0.5))


def _smooth_step(t):
    # 0 for t <= 0, 1 for t >= 1, C-infinity in between
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(t > 0.0, np.exp(-1.0 / np.where(t > 0.0, t, 1.0)), 0.0)
        u = 1.0 - t
        b = np.where(u > 0.0, np.exp(-1.0 / np.where(u > 0.0, u, 1.0)), 0.0)
    return a / (a + b)


def cutoff_chi(x):
    """Smooth even cutoff: 1 on |x| <= 1/2, 0 on |x| >= 1, monotone between."""
    x = np.asarray(x, dtype=float)
    out = _smooth_step(2.0 * (1.0 - np.abs(x)))
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class SchlafliSplit:
    """J_nu(r) = j1 + j2 + e, plus the r-derivatives of each piece."""

    nu: float
    r: float
    delta: float
    j1: complex
    j2: complex
    e: float
    j1_prime: complex
    j2_prime: complex
    e_prime: float
    residual: float

    @property
    def total(self):
        return self.j1 + self.j2 + self.e


def _panels(a, b, count):
    edges = np.linspace(a, b, count + 1)
    return edges[:-1], edges[1:]


def _composite(lo, hi, rule):
    x, w = rule
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _theta_rule(nu, r, delta, refine):
    # breakpoints where the cutoff switches on/off; panel count follows the phase
    breaks = [-math.pi, -delta, -0.5 * delta, 0.5 * delta, delta, math.pi]
    rate = r + nu + 1.0
    los, his = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        count = max(8, int(math.ceil(rate * (b - a) / math.pi))) * refine
        lo, hi = _panels(a, b, count)
        los.append(lo)
        his.append(hi)
    return _composite(np.concatenate(los), np.concatenate(his), _GL16)


def _s_rule(nu, r, order_rule):
    rate = r + nu
    s_end = 1.0
    while r * math.sinh(s_end) + nu * s_end < 60.0:
        s_end *= 2.0
    h = min(s_end, 1.0 / (rate + 1.0))
    edges = [0.0]
    while edges[-1] < s_end:
        edges.append(min(s_end, edges[-1] + h))
        h *= 1.5
    edges = np.asarray(edges)
    return _composite(edges[:-1], edges[1:], order_rule)


def _schlafli_pieces(nu, r, delta, refine):
    theta, tw = _theta_rule(nu, r, delta, refine)
    phase = np.exp(1j * (r * np.sin(theta) - nu * theta))
    chi = cutoff_chi(theta / delta)
    f1 = phase * chi * tw / (2.0 * math.pi)
    f2 = phase * (1.0 - chi) * tw / (2.0 * math.pi)
    ds = 1j * np.sin(theta)
    j1 = complex(np.sum(f1))
    j2 = complex(np.sum(f2))
    j1p = complex(np.sum(f1 * ds))
    j2p = complex(np.sum(f2 * ds))
    if _is_integer(nu):
        e = ep = 0.0
    else:
        rule = _GL16 if refine == 1 else _GL32
        s, sw = _s_rule(nu, r, rule)
        decay = np.exp(-(r * np.sinh(s) + nu * s)) * sw
        c = math.sin(nu * math.pi) / math.pi
        e = -c * float(np.sum(decay))
        ep = c * float(np.sum(decay * np.sinh(s)))
    return np.array([j1, j2, e, j1p, j2p, ep], dtype=complex)


def schlafli_decompose(nu, r, delta=0.1, tol=1e-12, max_refine=8):
    """Split J_nu(r) into the near-stationary piece, the rest of the theta-integral,
    and the exponential remainder.

    The theta-integrals over [-pi, pi] (with cutoff chi(theta/delta) and its
    complement) and the s-integral over [0, inf) are computed by composite
    Gauss-Legendre rules whose panel counts follow the phase speed r + nu;
    the panel count is doubled until two successive results agree to
    ``tol``.  Integer orders give ``e == 0.0`` exactly.
    """
    nu = _check_order(nu)
    r = float(r)
    if not math.isfinite(r) or r <= 0.0:
        raise InvalidArgumentError(f"schlafli_decompose needs finite r > 0, got {r!r}")
    delta = float(delta)
    if not (0.0 < delta <= 0.25):
        raise InvalidArgumentError(f"delta must lie in (0, 0.25], got {delta!r}")
    prev = _schlafli_pieces(nu, r, delta, 1)
    refine = 2
    residual = math.inf
    while refine <= max_refine:
        cur = _schlafli_pieces(nu, r, delta, refine)
        residual = float(np.max(np.abs(cur - prev)))
        if residual <= tol:
            j1, j2, e, j1p, j2p, ep = cur
            return SchlafliSplit(
                nu=nu, r=r, delta=delta,
                j1=complex(j1), j2=complex(j2), e=float(e.real),
                j1_prime=complex(j1p), j2_prime=complex(j2p), e_prime=float(ep.real),
                residual=residual,
            )
        prev = cur
        refine *= 2
    raise AccuracyError(
        f"Schläfli quadrature for nu={nu}, r={r} did not converge (residual {residual:.2e})",
        achieved=residual,
    )
