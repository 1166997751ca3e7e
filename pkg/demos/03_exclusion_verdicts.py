"""Non-existence verdicts across the pinching landscape.

For a surface with curvature below K1 inside an ambient space pinched
between K2 and K3, a strict inequality on (K1, K2, K3) excludes complete
immersions.  This script prints the verdict margins along the boundary
family coming from the slab metric, where the inequality closes up as the
pinching parameter grows.
"""

import json

from efimov_lab.connection import check_hypothesis

print("Efimov configuration (-1, 0, 0):")
v = check_hypothesis(-1.0, 0.0, 0.0)
print(json.dumps(v.to_json_dict(), indent=2, sort_keys=True))

print("\nslab boundary family: (K1,K2,K3) = (-1, l^2-1-2l, l^2-1+2l)")
print(f"{'l':>5} {'lhs':>10} {'rhs':>10} {'margin':>10}  excluded  4K4>tau0^2")
for lam in (1.0, 2.0, 3.0, 5.0, 10.0):
    v = check_hypothesis(-1.0, lam * lam - 1 - 2 * lam, lam * lam - 1 + 2 * lam)
    print(f"{lam:5.1f} {v.lhs:10.1f} {v.rhs:10.1f} {v.margin:10.1f}  "
          f"{str(v.excluded):>8}  {str(v.sit_check):>9}")

print("\nshrinking the gap: (-1, K2, K2 + g) as g -> 0 with K2 = 0")
for g in (8.0, 4.0, 3.999, 1.0, 0.0):
    v = check_hypothesis(-1.0, 0.0, g)
    print(f"  gap {g:6.3f}: margin = {v.margin:+10.4f}  excluded = {v.excluded}")
