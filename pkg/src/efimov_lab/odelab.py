"""Scalar ODE constructions used by the curve-deformation machinery: the
single-bump solution, its piecewise concatenation with distributional-
inequality control, and the 2x2 spiral eigenvalue analysis.

The bump equation is ``y'' = (y u)' - (eps + u^2/4) y`` integrated as the
first-order system ``y' = y u + z``, ``z' = -(eps + u^2/4) y`` from
``(y, z)(0) = (1, 4)``, so ``y'(0) = u(0) + 4``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import brentq

from .errors import BoundViolated, NoCrossing

__all__ = [
    "EdoSolution",
    "SpiralSpectrum",
    "PiecewiseBump",
    "integrate_bump_system",
    "solve_prop_edo",
    "spiral_eigenvalues",
    "construct_edo7",
    "weak_inequality_residual",
]


def _as_profile(u):
    if callable(u):
        return u
    c = float(u)
    return lambda s: c


def _check_bound(u, eps, lo, hi, n=512):
    bound = 1.0 / eps
    ss = np.linspace(lo, hi, n)
    vals = np.array([u(s) for s in ss])
    worst = float(np.max(np.abs(vals)))
    if worst > bound * (1 + 1e-12):
        raise BoundViolated(f"sup|u| = {worst:.6g} exceeds 1/eps = {bound:.6g}")


def integrate_bump_system(u, eps, s_max, step, y0=1.0, z0=4.0, s_start=0.0, direction=1.0):
    """RK4 samples of ``y' = yu + z, z' = -(eps + u^2/4) y``.

    ``direction=-1`` integrates backward in s (used for the left closing
    segment of the piecewise construction).  Returns (s, y, z) arrays with s
    measured from ``s_start``.
    """
    u = _as_profile(u)

    def rhs(s, st):
        yy, zz = st
        uu = u(s)
        return np.array([yy * uu + zz, -(eps + uu * uu / 4.0) * yy])

    n = int(np.ceil(s_max / step - 1e-12))
    s = np.empty(n + 1)
    ys = np.empty(n + 1)
    zs = np.empty(n + 1)
    s[0], ys[0], zs[0] = s_start, y0, z0
    state = np.array([y0, z0])
    cur = s_start
    for i in range(n):
        h = direction * min(step, s_max - i * step)
        k1 = rhs(cur, state)
        k2 = rhs(cur + h / 2, state + h / 2 * k1)
        k3 = rhs(cur + h / 2, state + h / 2 * k2)
        k4 = rhs(cur + h, state + h * k3)
        state = state + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        cur += h
        s[i + 1] = cur
        ys[i + 1] = state[0]
        zs[i + 1] = state[1]
    return s, ys, zs


def _hermite_root(sa, sb, ya, yb, da, db, target):
    """Root of the cubic Hermite interpolant of y - target on [sa, sb]."""
    h = sb - sa

    def f(t):
        tt = (t - sa) / h
        h00 = 2 * tt ** 3 - 3 * tt ** 2 + 1
        h10 = tt ** 3 - 2 * tt ** 2 + tt
        h01 = -2 * tt ** 3 + 3 * tt ** 2
        h11 = tt ** 3 - tt ** 2
        return h00 * ya + h10 * h * da + h01 * yb + h11 * h * db - target

    fa, fb = f(sa), f(sb)
    if fa == 0.0:
        return sa
    if fa * fb > 0:
        # fall back to the endpoint closer to the target
        return sa if abs(fa) < abs(fb) else sb
    return brentq(f, sa, sb, xtol=1e-12)


@dataclass
class EdoSolution:
    """One bump: y rises from 1, returns to 1 at s0, dies at s1."""

    eps: float
    s0: float
    s1: float
    s: np.ndarray
    y: np.ndarray
    z: np.ndarray
    m0: float          # envelope: max of |y|, |y'| on [0, s0]
    lipschitz: float   # max |y'| on [0, s1]
    u: object = None

    @property
    def yprime(self):
        uu = np.array([_as_profile(self.u)(t) for t in self.s])
        return self.y * uu + self.z

    def to_csv(self, path):
        from .cli import write_csv
        write_csv(path, ["s", "y", "z"], np.column_stack([self.s, self.y, self.z]))

    def header(self):
        return {"epsilon": self.eps, "s0": self.s0, "s1": self.s1, "M0": self.m0}


def solve_prop_edo(u, eps, step=1e-4):
    """Integrate the bump system from (1, 4) and locate the first return of y
    to 1 (s0) and the first zero of y (s1) by Hermite-interpolated bisection.

    Raises NoCrossing if the zero does not appear before pi/sqrt(eps) plus a
    safety margin, which the spiral analysis guarantees.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    u = _as_profile(u)
    s_cap = np.pi / np.sqrt(eps) * 1.05 + 5 * step
    _check_bound(u, eps, 0.0, s_cap)
    s, y, z = integrate_bump_system(u, eps, s_cap, step)
    uu = np.array([u(t) for t in s])
    yp = y * uu + z

    s0 = None
    s1 = None
    for i in range(1, len(s)):
        if s1 is None and y[i] <= 0.0 < y[i - 1]:
            s1 = _hermite_root(s[i - 1], s[i], y[i - 1], y[i], yp[i - 1], yp[i], 0.0)
            break
        if s0 is None and i > 1 and (y[i] - 1.0) * (y[i - 1] - 1.0) <= 0.0 and y[i - 1] > 1.0:
            s0 = _hermite_root(s[i - 1], s[i], y[i - 1], y[i], yp[i - 1], yp[i], 1.0)
    if s1 is None:
        raise NoCrossing(f"y did not reach 0 before s = {s_cap:.6g}; numerical fault")
    if s0 is None:
        s0 = s1

    mask0 = s <= s0 + 1e-12
    m0 = float(max(np.max(np.abs(y[mask0])), np.max(np.abs(yp[mask0]))))
    mask1 = s <= s1 + 1e-12
    lip = float(np.max(np.abs(yp[mask1])))
    keep = s <= s1 + step
    return EdoSolution(eps=eps, s0=float(s0), s1=float(s1), s=s[keep], y=y[keep],
                       z=z[keep], m0=m0, lipschitz=lip, u=u)


@dataclass
class SpiralSpectrum:
    """Eigenvalue data of the mean matrix [[T, Lambda], [-K, 0]]."""

    t: float
    lam: float
    k: float
    alpha: float
    beta: float
    oscillatory: bool

    @property
    def matrix(self):
        return np.array([[self.t, self.lam], [-self.k, 0.0]])


def spiral_eigenvalues(t, lam, k):
    """Roots of ``X(X - T) + Lambda K = 0`` written as alpha +/- i beta.

    Oscillatory (complex pair) iff ``4 Lambda K > T^2``; otherwise beta holds
    the real root gap.
    """
    alpha = t / 2.0
    disc = lam * k - t * t / 4.0
    if disc > 0:
        return SpiralSpectrum(t=t, lam=lam, k=k, alpha=alpha,
                              beta=float(np.sqrt(disc)), oscillatory=True)
    return SpiralSpectrum(t=t, lam=lam, k=k, alpha=alpha,
                          beta=float(2.0 * np.sqrt(-disc)), oscillatory=False)


@dataclass
class PiecewiseBump:
    """Concatenated bumps: >= 1 on the core interval, 0 outside the support."""

    eps: float
    n1: float
    breakpoints: np.ndarray            # x_{-1} < x_0 < ... < x_N < x_{N+1}
    segments: list                     # per segment: (s_grid, y values)
    m1_prime: float                    # support/Lipschitz constant 2 pi / sqrt(eps)
    lipschitz: float                   # measured max |y'|

    @property
    def support(self):
        return float(self.breakpoints[0]), float(self.breakpoints[-1])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        out = np.zeros_like(x)
        for (lo, hi, grid, vals) in self.segments:
            mask = (x >= lo) & (x <= hi)
            if np.any(mask):
                out[mask] = np.interp(x[mask], grid, vals)
        out[(x < self.breakpoints[0]) | (x > self.breakpoints[-1])] = 0.0
        return float(out[0]) if scalar else out


def construct_edo7(u, eps, n1, step=1e-3):
    """Piecewise bump profile per the recursive construction: interior bumps
    tile [-N1, N1] with y >= 1, and two closing segments drive y to 0.

    The result satisfies the bump inequality in the distributional sense
    (positive velocity jumps at the junctions).
    """
    if eps <= 0 or n1 <= 0:
        raise ValueError("eps and n1 must be positive")
    u = _as_profile(u)
    m1p = 2.0 * np.pi / np.sqrt(eps)
    _check_bound(u, eps, -n1 - 2 * m1p, n1 + 2 * m1p)

    segments = []
    breaks = []

    # left closing segment: from (y, y') = (1, 0) at -N1 backward to y = 0
    def u_left(t):  # backward time
        return u(-n1 - t)

    z0_left = 0.0 - 1.0 * u(-n1)  # z = y' - y u with y' = 0
    s_cap = np.pi / np.sqrt(eps) * 1.05 + 5 * step

    # integrate backward in the curve parameter: t = -(x + n1) >= 0
    def rhs_rev(t, st):
        yy, zz = st
        uu = u(-n1 - t)
        return -np.array([yy * uu + zz, -(eps + uu * uu / 4.0) * yy])

    state = np.array([1.0, z0_left])
    ts = [0.0]
    ys = [1.0]
    zs = [z0_left]
    n = int(np.ceil(s_cap / step))
    for i in range(n):
        h = step
        t0 = ts[-1]
        k1 = rhs_rev(t0, state)
        k2 = rhs_rev(t0 + h / 2, state + h / 2 * k1)
        k3 = rhs_rev(t0 + h / 2, state + h / 2 * k2)
        k4 = rhs_rev(t0 + h, state + h * k3)
        state = state + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        ts.append(t0 + h)
        ys.append(state[0])
        zs.append(state[1])
        if state[0] <= 0.0:
            break
    ys = np.array(ys)
    ts = np.array(ts)
    if ys[-1] > 0:
        raise NoCrossing("left closing segment did not reach zero")
    ypl = ys * np.array([u(-n1 - t) for t in ts]) + np.array(zs)
    t_zero = _hermite_root(ts[-2], ts[-1], ys[-2], ys[-1], -ypl[-2], -ypl[-1], 0.0)
    x_left = -n1 - t_zero
    grid = -n1 - ts[ts <= t_zero + step]
    vals = ys[: len(grid)]
    order = np.argsort(grid)
    segments.append((x_left, -n1, grid[order], np.maximum(vals[order], 0.0)))
    breaks.append(x_left)
    breaks.append(-n1)

    # interior bumps from -N1 rightward until the junction passes +N1
    lip = float(np.max(np.abs(ypl)))
    x_k = -n1
    while x_k <= n1:
        sol = solve_prop_edo(lambda t, x0=x_k: u(x0 + t), eps, step=step)
        lip = max(lip, sol.lipschitz)
        is_last = x_k + sol.s0 > n1
        if is_last:
            # final bump: keep it through its zero s1
            grid = x_k + sol.s[sol.s <= sol.s1 + step]
            vals = np.maximum(sol.y[: len(grid)], 0.0)
            segments.append((x_k, x_k + sol.s1, grid, vals))
            breaks.append(x_k + sol.s0)
            breaks.append(x_k + sol.s1)
            x_k = x_k + sol.s1
            break
        grid = x_k + sol.s[sol.s <= sol.s0 + step]
        vals = sol.y[: len(grid)]
        segments.append((x_k, x_k + sol.s0, grid, vals))
        x_k = x_k + sol.s0
        breaks.append(x_k)

    breaks = np.unique(np.array(breaks))
    return PiecewiseBump(eps=eps, n1=n1, breakpoints=breaks, segments=segments,
                         m1_prime=m1p, lipschitz=lip)


def _bspline_bump(x):
    """C^2 cubic B-spline bump supported on [-2, 2], max 1 at 0."""
    ax = np.abs(x)
    out = np.zeros_like(ax)
    m1 = ax < 1
    m2 = (ax >= 1) & (ax < 2)
    out[m1] = 1.0 - 1.5 * ax[m1] ** 2 + 0.75 * ax[m1] ** 3
    out[m2] = 0.25 * (2.0 - ax[m2]) ** 3
    return out


def _bspline_bump_d1(x):
    ax = np.abs(x)
    sgn = np.sign(x)
    out = np.zeros_like(ax)
    m1 = ax < 1
    m2 = (ax >= 1) & (ax < 2)
    out[m1] = sgn[m1] * (-3.0 * ax[m1] + 2.25 * ax[m1] ** 2)
    out[m2] = sgn[m2] * (-0.75) * (2.0 - ax[m2]) ** 2
    return out


def _bspline_bump_d2(x):
    ax = np.abs(x)
    out = np.zeros_like(ax)
    m1 = ax < 1
    m2 = (ax >= 1) & (ax < 2)
    out[m1] = -3.0 + 4.5 * ax[m1]
    out[m2] = 1.5 * (2.0 - ax[m2])
    return out


def weak_inequality_residual(bump, u, n_tests=50, seed=20240):
    """Minimum over a family of nonnegative C^2 bump test functions phi of

        integral y (phi'' + u phi' + (eps + u^2/4) phi) ds,

    which is >= 0 exactly when the profile satisfies the bump inequality as a
    distribution.  Quadrature runs segment by segment on the solver's own
    sample grids, so the kinks of y at the junctions never cross a panel.
    Test centers and widths come from a seeded generator; widths stay well
    above the solver step.
    """
    u = _as_profile(u)
    lo, hi = bump.support
    rng = np.random.default_rng(seed)

    seg_grids = []
    for (a, b, grid, vals) in bump.segments:
        mask = (grid >= a - 1e-12) & (grid <= b + 1e-12)
        seg_grids.append((float(a), float(b), grid[mask], vals[mask]))

    def piece_integral(gg, yy, center, width):
        tt = (gg - center) / width
        phi = _bspline_bump(tt)
        d1 = _bspline_bump_d1(tt) / width
        d2 = _bspline_bump_d2(tt) / width ** 2
        uu = np.array([u(x) for x in gg])
        integrand = yy * (d2 + uu * d1 + (bump.eps + uu ** 2 / 4.0) * phi)
        return float(simpson(integrand, x=gg))

    worst = np.inf
    for _ in range(n_tests):
        center = rng.uniform(lo, hi)
        width = rng.uniform(0.3, max(0.4, (hi - lo) / 2.0))
        knots = center + width * np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
        total = 0.0
        for a, b, grid, vals in seg_grids:
            # split at the spline knots: the integrand is smooth on each piece
            cuts = np.concatenate([[a], knots[(knots > a) & (knots < b)], [b]])
            for p, q in zip(cuts[:-1], cuts[1:]):
                inner = (grid > p + 1e-12) & (grid < q - 1e-12)
                gg = np.concatenate([[p], grid[inner], [q]])
                yy = np.concatenate([[np.interp(p, grid, vals)], vals[inner],
                                     [np.interp(q, grid, vals)]])
                if len(gg) < 3:
                    gg = np.array([p, 0.5 * (p + q), q])
                    yy = np.interp(gg, grid, vals)
                total += piece_integral(gg, yy, center, width)
        worst = min(worst, total)
    return worst
