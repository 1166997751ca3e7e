"""Variation fields along geodesics and normal deformations of curves.

With curvature pinched in [K4, K5] and torsion below tau0, the transverse
component y of a variation field obeys a sandwich bound for small times and
the tangential component x stays quadratically small.  The script also
checks the first-variation formula for geodesic curvature under a normal
deformation against a finite-difference oracle.
"""

import numpy as np

from efimov_lab import gallery
from efimov_lab.curves import CurveTrace, deformation_rate_check, integrate_jacobi

print("unit-curvature, zero-torsion variation: y(t) = sin t")
jt = integrate_jacobi(lambda t: 1.0, lambda t: 0.0, lambda t: 0.0,
                      (0.0, 0.0, 0.0, 1.0), 1.8, 1e-3)
print(f"  sup |y - sin t| = {np.max(np.abs(jt.y - np.sin(jt.t))):.2e}")
mask = jt.t > 0
print(f"  sandwich t/2 <= y <= 2t on (0, 1.8]: "
      f"{bool(np.all((jt.y[mask] >= jt.t[mask]/2) & (jt.y[mask] <= 2*jt.t[mask])))}")

tau0 = 0.35
jx = integrate_jacobi(lambda t: 1.0, lambda t: tau0, lambda t: 0.0,
                      (0.0, 0.0, 0.0, 1.0), 1.8, 1e-3)
print(f"  with tau_x = {tau0}: sup |x|/t^2 = "
      f"{np.max(np.abs(jx.x[mask])/jx.t[mask]**2):.4f} <= tau0 = {tau0}")

print("\nnormal deformation of a latitude circle on the round sphere:")
sphere = gallery.abstract_sphere()
psi = np.pi / 3
rho = np.tan(psi / 2)
lam = 2.0 / (1.0 + rho * rho)
total = 2 * np.pi * rho * lam
circle = CurveTrace.from_path(
    lambda s: rho * np.array([np.cos(s / (rho * lam)), np.sin(s / (rho * lam))]),
    (0.0, total), 1e-3,
    velocity=lambda s: np.array([-np.sin(s / (rho * lam)),
                                 np.cos(s / (rho * lam))]) / lam,
    acceleration=lambda s: -np.array([np.cos(s / (rho * lam)),
                                      np.sin(s / (rho * lam))]) / (rho * lam * lam),
    closed=True)
resid = deformation_rate_check(sphere, circle, lambda s: 1.0, 1.0)
print(f"  |closed-form rate - finite-difference rate| = {resid:.2e}"
      f"   (rate itself is csc^2(psi) = {1/np.sin(psi)**2:.4f})")
