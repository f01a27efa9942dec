"""
Angular modes, radial operators and Sobolev norms
=================================================

A field on the plane splits into angular modes e^{i m theta}.  Each mode feels
the radial operator with centrifugal term (m + alpha)^2 / r^2.  Here we
decompose a field, check an eigenfunction residual, and compute Sobolev norms.
"""

import numpy as np

from abwave.hankel import RadialFunction, RadialGrid
from abwave.modes import FluxParameter
from abwave.operators import (
    apply_H_radial,
    decompose_scalar,
    polar_angles,
    recompose_scalar,
    schr_eigenfunction,
    sobolev_norm_scalar,
)

flux = FluxParameter(0.3)
print(f"alpha = {flux.alpha}, epsilon = {flux.epsilon}")
for m in (-2, -1, 0, 1):
    mode = flux.mode(m)
    print(f"  m={m:+d}: nu = {mode.nu:.1f}, lower Dirac order = {mode.lower_order:+.1f}")

# a two-mode field sampled on a polar grid
grid = RadialGrid.gauss_legendre(512, 40.0)
th = polar_angles(16)
prof = np.exp(-0.5 * ((grid.nodes - 5.0) / 0.8) ** 2)
samples = np.outer(prof, np.exp(1j * th)) + 0.5 * np.outer(prof, np.exp(-2j * th))
u = decompose_scalar(samples / np.sqrt(2 * np.pi), grid, flux, m_max=4)
print("populated modes:", [m for m, v in u.modes.items() if np.any(np.abs(v) > 1e-12)])
print("round trip error:", np.max(np.abs(recompose_scalar(u, th) - samples / np.sqrt(2 * np.pi))))

# J_nu(E r) solves H_m k = E^2 k; the finite-difference residual is small in the interior
ugrid = RadialGrid.uniform(2048, 20.0)
mode = flux.mode(-1)
k = RadialFunction(ugrid, schr_eigenfunction(mode, 2.0, ugrid.nodes))
res = apply_H_radial(mode, k).values - 4.0 * k.values
mid = (ugrid.nodes > 4) & (ugrid.nodes < 16)
print("interior eigen residual:", np.linalg.norm(res[mid]) / np.linalg.norm(k.values[mid]))

# Sobolev norms of the same field; s = 0 is its L2 norm
for s in (0.0, 0.5, 1.0):
    print(f"||u||_(H^{s}) = {sobolev_norm_scalar(s, u):.6f}")
