"""
Amplitude on dyadic annuli
==========================

For frequency-localized data, the L^p_t L^inf norm of the flow on the annulus
[R/2, R] grows like R^(eps/2) or faster for small R, and decays like
R^(1/p - 1/2) or faster for large R.  The fits below show both regimes.
"""

from abwave.verify import DataFamily, check_localized_dichotomy

for alpha in (0.1, 0.5):
    rep = check_localized_dichotomy(
        4.0, DataFamily(alpha=alpha, ms=(0, 1)),
        R_small=[1 / 64, 1 / 32, 1 / 16, 1 / 8, 1 / 4], R_large=[4, 8, 16, 32, 64])
    ref = rep.summary["reference"]
    print(f"alpha={alpha}: reference slopes small >= {ref['small']:.3f}, large <= {ref['large']:.3f}")
    for member, sl in rep.summary["slopes"].items():
        print(f"  {member}: small {sl['small']:.3f}, large {sl['large']:.3f}")
    print("  verdict:", rep.verdict)
