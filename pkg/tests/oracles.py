"""Reference values computed independently of the package.

Bessel values come from mpmath arithmetic at a working precision chosen to
absorb the cancellation of the alternating power series, with the Hankel
large-argument expansion as a second route.  Everything else is a closed
form.
"""

import math

import mpmath as mp
import numpy as np


def jv_series(nu, x, guard=30):
    """J_nu(x) from the ascending series, summed in high precision."""
    x = mp.mpf(x)
    # the largest term is about e^x / sqrt(x); carry that many extra digits
    dps = int(0.45 * float(x)) + guard
    with mp.workdps(dps):
        nu = mp.mpf(nu)
        h = x / 2
        term = h**nu / mp.gamma(nu + 1)
        total = term
        k = 0
        tiny = mp.mpf(10) ** (-dps + 5)
        while True:
            k += 1
            term *= -h * h / (k * (k + nu))
            total += term
            if k > h and abs(term) <= tiny * abs(total):
                break
        return float(total)


def jv_asymptotic(nu, x):
    """J_nu(x) from the Hankel expansion, truncated at its smallest term (x >> nu)."""
    with mp.workdps(40):
        x = mp.mpf(x)
        nu = mp.mpf(nu)
        mu = 4 * nu * nu
        a = mp.mpf(1)
        P, Q = mp.mpf(1), mp.mpf(0)
        k = 0
        prev = mp.inf
        while True:
            k += 1
            a = a * (mu - (2 * k - 1) ** 2) / (k * 8 * x)
            if abs(a) >= prev or abs(a) < mp.mpf(10) ** -38:
                break
            prev = abs(a)
            if k % 2:
                Q += (-1) ** ((k - 1) // 2) * a
            else:
                P += (-1) ** (k // 2) * a
        w = x - nu * mp.pi / 2 - mp.pi / 4
        return float(mp.sqrt(2 / (mp.pi * x)) * (P * mp.cos(w) - Q * mp.sin(w)))


def j_half(x):
    x = np.asarray(x, dtype=float)
    return np.sqrt(2.0 / (np.pi * x)) * np.sin(x)


def j_half_prime(x):
    x = np.asarray(x, dtype=float)
    return np.sqrt(2.0 / (np.pi * x)) * (np.cos(x) - np.sin(x) / (2.0 * x))


def j_minus_half(x):
    x = np.asarray(x, dtype=float)
    return np.sqrt(2.0 / (np.pi * x)) * np.cos(x)


def j_three_halves(x):
    x = np.asarray(x, dtype=float)
    return np.sqrt(2.0 / (np.pi * x)) * (np.sin(x) / x - np.cos(x))


def gaussian_power(nu, r):
    """r^nu exp(-r^2/2): its order-nu Hankel transform is itself."""
    r = np.asarray(r, dtype=float)
    return r**nu * np.exp(-0.5 * r * r)


def magnetic_laplacian_polar(samples, r, thetas, alpha):
    """-Delta_A on a polar grid by finite differences in both variables.

    -Delta_A = -d_r^2 - (1/r) d_r - (1/r^2)(d_theta + i alpha)^2, with fourth-order
    centred differences in r (uniform r grid) and spectral differentiation
    in theta.  Returns NaN on the two outermost radial rows at each end.
    """
    samples = np.asarray(samples, dtype=complex)
    h = r[1] - r[0]
    d1 = np.full_like(samples, np.nan)
    d2 = np.full_like(samples, np.nan)
    v = samples
    d1[2:-2] = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * h)
    d2[2:-2] = (-v[:-4] + 16 * v[1:-3] - 30 * v[2:-2] + 16 * v[3:-1] - v[4:]) / (12 * h * h)
    k = thetas.size
    n = np.fft.fftfreq(k, 1.0 / k)
    ang = np.fft.ifft(-((n + alpha) ** 2) * np.fft.fft(v, axis=1), axis=1)
    return -d2 - d1 / r[:, None] - ang / (r[:, None] ** 2)


def lp_sum_exact(rho, scales, piece):
    return sum(piece(rho / N) for N in scales)


def sqrt_2pi():
    return math.sqrt(2.0 * math.pi)
