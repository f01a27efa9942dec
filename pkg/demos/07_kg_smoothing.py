"""
Weighted local smoothing for Klein-Gordon
=========================================

The |x|^(-beta) weighted space-time norm of the Klein-Gordon flow, split into
low and high frequencies, is compared with the matching data norms.  The weight
must stay square integrable against the lowest mode, so beta < 1 + eps.
"""

from abwave.errors import InvalidArgumentError
from abwave.verify import SmoothingFamily, check_local_smoothing

rep = check_local_smoothing([1.0, 1.2], SmoothingFamily(alpha=0.5), T=10.0, branches=("low", "high"))
for s in rep.samples:
    print(f"{s['member']:12s} beta={s['beta']:.1f} {s['branch']:4s} ratio={s['ratio']:.4f} "
          f"refined={s['ratio_refined']:.4f}")
print("verdict:", rep.verdict, "drift", rep.deltas)

try:
    check_local_smoothing([1.7], SmoothingFamily(alpha=0.5))
except InvalidArgumentError as exc:
    print("beta = 1.7 refused:", exc)
