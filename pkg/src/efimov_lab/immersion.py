"""Immersed surface patches: fundamental forms, shape operator, Gauss and
Codazzi residuals.

The shape operator is ``B: x -> D^M_x N`` for the chosen unit normal N (no
sign flip), so on the unit sphere with outward normal B is the identity.  The
second fundamental form is ``II(x, y) = I(Bx, y)`` and the third is
``III(x, y) = I(Bx, By)``.

Evaluators are pure; patches are safe for concurrent reads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _fd
from .ambient import ChartBox, MetricField, as_point, christoffel, riemann_operator, riemann_sectional
from .errors import DegenerateImmersion, PointOutsideChart

RANK_FLOOR = 1e-10


class SurfacePatch:
    """A parametrized surface patch ``phi: (u, v) -> chart point``.

    Parameters
    ----------
    chart_map : callable, (2,) -> (3,) chart coordinates of the image point.
    box : ChartBox of the (u, v) parameter domain.
    jacobian : optional callable, (2,) -> (3, 2) array ``d phi^i / d q^a``.
    hessian : optional callable, (2,) -> (3, 2, 2) array of second partials.
    orientation : +1 or -1; flips the unit normal.
    fd_step : step for finite-difference fallbacks.
    """

    def __init__(self, chart_map, box, jacobian=None, hessian=None, orientation=1,
                 fd_step=1e-4, name=""):
        self._map = chart_map
        self.box = box
        self._jacobian = jacobian
        self._hessian = hessian
        self.orientation = int(orientation)
        self.fd_step = float(fd_step)
        self.name = name

    @property
    def has_analytic_partials(self):
        return self._jacobian is not None

    def fd_margin(self):
        if self._jacobian is not None and self._hessian is not None:
            return 0.0
        return 2.0 * self.fd_step

    def require_inside(self, q, margin=0.0):
        if not self.box.contains(q, margin=margin):
            raise PointOutsideChart(
                f"parameter point {np.asarray(q)} outside patch box of {self.name or 'patch'}"
            )

    def point(self, q):
        q = as_point(q, 2)
        return np.asarray(self._map(q), dtype=float)

    def jacobian(self, q):
        q = as_point(q, 2)
        if self._jacobian is not None:
            return np.asarray(self._jacobian(q), dtype=float)
        return np.stack([_fd.central(self._map, q, a, self.fd_step) for a in range(2)], axis=1)

    def hessian(self, q):
        q = as_point(q, 2)
        if self._hessian is not None:
            return np.asarray(self._hessian(q), dtype=float)
        if self._jacobian is not None:
            grad = np.stack([_fd.central(self._jacobian, q, a, self.fd_step) for a in range(2)])
            h = np.einsum("aib->iab", grad)
        else:
            h = np.empty((3, 2, 2))
            for a in range(2):
                for b in range(a, 2):
                    h[:, a, b] = _fd.second(self._map, q, a, b, self.fd_step)
                    h[:, b, a] = h[:, a, b]
        return 0.5 * (h + np.swapaxes(h, 1, 2))

    def flipped(self):
        return SurfacePatch(self._map, self.box, self._jacobian, self._hessian,
                            orientation=-self.orientation, fd_step=self.fd_step,
                            name=self.name)


@dataclass
class FundamentalData:
    """First/second/third fundamental forms and friends at one parameter point."""

    q: np.ndarray
    point: np.ndarray
    jacobian: np.ndarray
    first: np.ndarray        # I, 2x2
    second: np.ndarray       # II, 2x2
    third: np.ndarray        # III, 2x2
    shape_operator: np.ndarray  # B, 2x2
    normal: np.ndarray       # N, 3 components, g-unit
    k_intrinsic: float       # curvature of I
    k_ambient_tangent: float  # ambient sectional curvature on the tangent plane
    k_extrinsic: float       # K_e = K_I - K_M(T Sigma)


def unit_normal(patch, ambient, q):
    """The g-unit normal with the patch's orientation sign.

    Chosen so that (d1 phi, d2 phi, N) is positively oriented with respect to
    the ambient chart orientation times the orientation sign.
    """
    q = as_point(q, 2)
    p = patch.point(q)
    ambient.require_inside(p)
    g = ambient.matrix(p)
    jac = patch.jacobian(q)
    cov = np.cross(jac[:, 0], jac[:, 1])  # annihilates the tangent plane
    n = np.linalg.solve(g, cov)
    norm2 = n @ g @ n
    gram = np.linalg.det(jac.T @ g @ jac)
    if norm2 <= 0 or gram < RANK_FLOOR:
        raise DegenerateImmersion(f"rank of d phi < 2 at q={q} (gram={gram:.3e})")
    return patch.orientation * n / np.sqrt(norm2)


def induced_metric_field(patch, ambient, fd_step=None):
    """The first fundamental form as a 2D MetricField on the parameter box.

    Carries analytic first partials whenever both the patch and the ambient
    metric do, so intrinsic curvature goes through the same pipeline as
    ambient curvature with one less coordinate.
    """
    step = fd_step if fd_step is not None else patch.fd_step

    def first(q):
        jac = patch.jacobian(q)
        g = ambient.matrix(patch.point(q))
        return jac.T @ g @ jac

    partials = None
    if patch.has_analytic_partials and ambient.has_analytic_partials:
        def partials(q):
            p = patch.point(q)
            jac = patch.jacobian(q)
            hess = patch.hessian(q)
            g = ambient.matrix(p)
            dg = ambient.partials(p)
            dg_along = np.einsum("kij,ka->aij", dg, jac)  # d(g o phi)/dq^a
            term = np.einsum("ica,ij,jb->cab", hess, g, jac)
            out = term + np.swapaxes(term, 1, 2) + np.einsum("ia,cij,jb->cab", jac, dg_along, jac)
            return out

    return MetricField(2, first, patch.box, partials=partials, fd_step=step,
                       name=f"I[{patch.name}]")


def fundamental_forms(patch, ambient, q):
    """All fundamental data of the immersion at parameter point q."""
    q = as_point(q, 2)
    patch.require_inside(q, margin=patch.fd_margin())
    p = patch.point(q)
    g = ambient.matrix(p)
    jac = patch.jacobian(q)
    first = jac.T @ g @ jac
    gram = np.linalg.det(first)
    if gram < RANK_FLOOR:
        raise DegenerateImmersion(f"rank of d phi < 2 at q={q} (gram={gram:.3e})")
    n = unit_normal(patch, ambient, q)

    gam = christoffel(ambient, p)
    hess = patch.hessian(q)
    # covariant second derivative of phi: S^i_ab = phi^i_{,ab} + Gamma^i_jk phi^j_a phi^k_b
    s = hess + np.einsum("ijk,ja,kb->iab", gam, jac, jac)
    # II(x, y) = I(Bx, y) with B = grad N, so II = -g(S, N)
    second = -np.einsum("iab,ij,j->ab", s, g, n)
    shape = np.linalg.solve(first, second)
    third = shape.T @ first @ shape

    ifield = induced_metric_field(patch, ambient)
    from .ambient import riemann_covariant as _rc
    rm2 = _rc(ifield, q)
    k_intr = float(rm2[0, 1, 1, 0] / gram)
    k_amb = riemann_sectional(ambient, p, jac[:, 0], jac[:, 1])
    return FundamentalData(
        q=q, point=p, jacobian=jac, first=first, second=second, third=third,
        shape_operator=shape, normal=n, k_intrinsic=k_intr,
        k_ambient_tangent=k_amb, k_extrinsic=k_intr - k_amb,
    )


def gauss_residual(patch, ambient, q):
    """|det B - (K_I - K_M(T Sigma))| at q."""
    data = fundamental_forms(patch, ambient, q)
    return abs(float(np.linalg.det(data.shape_operator)) - data.k_extrinsic)


def shape_operator_field(patch, ambient):
    """q -> B(q); used for finite differences of the shape operator."""

    def field(q):
        return fundamental_forms(patch, ambient, q).shape_operator

    return field


def surface_from_expressions(fields, box, fd_step=1e-4, name="custom-surface"):
    """Build a SurfacePatch from expressions for the map components.

    ``fields`` maps ``phi1``, ``phi2``, ``phi3`` to Expression objects in the
    variables (u, v); derivatives fall back to central differences.
    """
    for key in ("phi1", "phi2", "phi3"):
        if key not in fields:
            raise ValueError(f"surface file must define {key}")

    def chart_map(q):
        values = {"u": q[0], "v": q[1]}
        return np.array([fields["phi1"](**values), fields["phi2"](**values),
                         fields["phi3"](**values)])

    return SurfacePatch(chart_map, box, fd_step=fd_step, name=name)


def dnabla_b(patch, ambient, q, x, y, fd_step=1e-4):
    """``(d^nabla B)(x, y)`` for constant-coefficient tangent vectors x, y,
    where ``nabla`` is the Levi-Civita connection of I.  Returns surface
    components."""
    q = as_point(q, 2)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    data = fundamental_forms(patch, ambient, q)
    ifield = induced_metric_field(patch, ambient)
    gam_i = christoffel(ifield, q)
    bfield = shape_operator_field(patch, ambient)
    db = np.stack([_fd.central(bfield, q, a, fd_step) for a in range(2)])  # db[a] = d_a B

    def nabla(direction, w):
        """(nabla_direction B)(w) = nabla_x(B w) - B nabla_x(w)."""
        dbw = np.einsum("a,acb,b->c", direction, db, w)
        g_bw = np.einsum("cab,a,b->c", gam_i, direction, data.shape_operator @ w)
        g_w = np.einsum("cab,a,b->c", gam_i, direction, w)
        return dbw + g_bw - data.shape_operator @ g_w

    return nabla(x, y) - nabla(y, x)


def codazzi_residual(patch, ambient, q, x, y, fd_step=1e-4):
    """Norm of ``(d^nabla B)(x, y) + R_{x,y} n`` for tangent vectors x, y.

    ``d^nabla`` uses the Levi-Civita connection of I; the ambient curvature
    term is evaluated through the same tensor pipeline, so the residual is a
    genuine two-sided check of the Codazzi-Mainardi identity.
    """
    q = as_point(q, 2)
    data = fundamental_forms(patch, ambient, q)
    dnb = dnabla_b(patch, ambient, q, x, y, fd_step=fd_step)
    lhs = data.jacobian @ dnb

    r_op = riemann_operator(ambient, data.point)
    xa = data.jacobian @ np.asarray(x, dtype=float)
    ya = data.jacobian @ np.asarray(y, dtype=float)
    rn = np.einsum("mijk,i,j,k->m", r_op, xa, ya, data.normal)
    g = ambient.matrix(data.point)
    diff = lhs - rn
    return float(np.sqrt(max(diff @ g @ diff, 0.0)))
