"""Asymptotic directions, their traces, and the coordinate net.

At points of negative extrinsic curvature the inverse shape operator singles
out two unit directions U and V.  Their integral curves carry the closure
diagnostics delta (angle oscillation) and sigma (sine integral), and the
net they span expands at a rate controlled by the torsion constants.
"""

import numpy as np

from efimov_lab import gallery
from efimov_lab.asymptotics import (
    asymptotic_frame,
    covariant_rate_check,
    net_expansion_check,
    trace_asymptotic,
)

saddle = gallery.build_example("saddle").data
fr = asymptotic_frame(saddle, [0.0, 0.0])
print(f"saddle at the origin: U = {fr.u}, V = {fr.v}, "
      f"theta = {fr.theta:.6f}, k = {fr.k}")

r1, r2 = covariant_rate_check(saddle, [0.2, 0.1])
print(f"covariant-rate residuals at (0.2, 0.1): {r1:.2e}, {r2:.2e}")

tr = trace_asymptotic(saddle, [0.0, 0.0], "U", 0.2, 5e-3)
print(f"U-trace of length 0.2: delta = {tr.delta:.6f} (close to pi), "
      f"sigma = {tr.sigma:.6f}, quasi-geodesic defect = {tr.quasi_defect:.2e}")

ps = gallery.build_example("pseudosphere").data
tr = trace_asymptotic(ps, [1.0, 0.0], "U", 0.5, 5e-3)
print(f"pseudosphere U-trace: theta in [{tr.thetas.min():.4f}, "
      f"{tr.thetas.max():.4f}], sigma = {tr.sigma:.6f}")

rep = net_expansion_check(saddle, [0.0, 0.0], (0.12, 0.12), n_u=4, n_v=4)
print("\nasymptotic net on the saddle (4 x 4 cells):")
print("  alpha (V-speeds):")
print(np.array2string(rep["alpha"], precision=5))
print(f"  sup |d_u alpha|/(alpha beta) = {rep['sup_dua_over_ab']:.4f} "
      f"<= tau0 + 2 tau1 = {rep['bound']:.4f}")
print(f"  row-length growth |dL/dv| max = {np.max(np.abs(rep['dL_dv'])):.4f} "
      f"within bound {np.max(rep['dL_dv_bound']):.4f}")
