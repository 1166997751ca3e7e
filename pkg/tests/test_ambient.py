import numpy as np
import pytest

from efimov_lab import gallery
from efimov_lab.ambient import (
    ChartBox,
    MetricField,
    christoffel,
    curvature_sample,
    riemann_covariant,
    riemann_sectional,
    sectional_range,
)
from efimov_lab.errors import DegeneratePlane, NonInvertibleMetric, PointOutsideChart


def polar_flat():
    return MetricField(3, lambda p: np.diag([1.0, p[0] ** 2, 1.0]),
                       ChartBox((0.5, -3.0, -1.0), (3.0, 3.0, 1.0)), name="polar")


def test_christoffel_flat_is_zero(euclid):
    gam = christoffel(euclid, [0.3, -0.8, 2.0])
    assert np.max(np.abs(gam)) == 0.0


def test_christoffel_polar_classical():
    gam = christoffel(polar_flat(), [2.0, 0.3, 0.0])
    assert abs(gam[0, 1, 1] + 2.0) < 1e-9
    assert abs(gam[1, 0, 1] - 0.5) < 1e-9
    assert np.max(np.abs(gam - np.swapaxes(gam, 1, 2))) < 1e-12


def test_christoffel_g_lambda_analytic_vs_fd():
    analytic = gallery.g_lambda(1.0)
    fd = gallery.g_lambda(1.0, analytic=False)
    p = np.array([0.0, 0.0, 0.0])
    assert np.max(np.abs(christoffel(analytic, p) - christoffel(fd, p))) < 1e-6
    p = np.array([0.3, -0.5, 0.05])
    assert np.max(np.abs(christoffel(analytic, p) - christoffel(fd, p))) < 1e-6


@pytest.mark.parametrize("name,expected", [("sphere3", 1.0), ("hyperbolic3", -1.0)])
def test_constant_sectional(name, expected):
    m = gallery.build_example(name).metric
    p = np.array([0.12, -0.2, 0.25])
    k = riemann_sectional(m, p, [1.0, 0.2, 0.0], [0.0, 1.0, -0.3])
    assert abs(k - expected) < 1e-6
    lo, hi = sectional_range(m, p)
    assert abs(lo - expected) < 1e-6 and abs(hi - expected) < 1e-6


def test_g_lambda_diagonal_entry():
    m = gallery.g_lambda(1.0)
    p = np.array([0.0, 1.0, 0.0])
    g = m.matrix(p)
    e1 = np.array([1.0, 0, 0]) / np.sqrt(g[0, 0])
    e2 = np.array([0, 1.0, 0]) / np.sqrt(g[1, 1])
    assert abs(riemann_sectional(m, p, e1, e2) - 0.0) < 1e-4  # lambda^2 - 1 = 0


def test_g_lambda_sectional_range_interval():
    m = gallery.g_lambda(1.0)
    lo, hi = sectional_range(m, [0.0, 1.0, 0.0])
    b = 2.0 * np.tanh(1.0)
    assert abs(lo + b) < 1e-3 and abs(hi - b) < 1e-3
    lo, hi = sectional_range(m, [0.4, 0.0, 0.0])
    assert abs(lo) < 1e-4 and abs(hi) < 1e-4


def test_riemann_symmetries():
    for name, tol in (("sphere3", 1e-8), ("hyperbolic3", 1e-8)):
        m = gallery.build_example(name).metric
        s = curvature_sample(m, [0.2, 0.1, -0.3])
        assert max(s.symmetry_residuals.values()) < tol
    s = curvature_sample(gallery.g_lambda(1.0, analytic=False), [0.3, 0.4, 0.0])
    assert max(s.symmetry_residuals.values()) < 1e-4


def test_sectional_range_brackets_random_planes():
    m = gallery.g_lambda(2.0)
    p = np.array([0.5, 0.7, 0.02])
    lo, hi = sectional_range(m, p)
    rng = np.random.default_rng(42)
    for _ in range(100):
        x = rng.standard_normal(3)
        y = rng.standard_normal(3)
        k = riemann_sectional(m, p, x, y)
        assert lo - 1e-8 <= k <= hi + 1e-8


def test_fd_convergence_order():
    """Halving h should shrink the curvature error at order >= 1.8."""
    truth = gallery.g_lambda(1.0)
    p = np.array([0.3, 0.6, 0.0])
    ref = riemann_covariant(truth, p)

    def err(h):
        m = gallery.g_lambda(1.0, analytic=False, fd_step=h)
        return np.max(np.abs(riemann_covariant(m, p) - ref))

    e1, e2 = err(2e-2), err(1e-2)
    order = np.log2(e1 / e2)
    assert order >= 1.8


def test_point_outside_chart():
    m = gallery.g_lambda(1.0)
    with pytest.raises(PointOutsideChart):
        christoffel(m, [0.0, 0.0, 5.0])


def test_non_invertible_metric():
    m = MetricField(3, lambda p: np.diag([p[0] ** 2, 1.0, 1.0]),
                    ChartBox((-1.0, -1.0, -1.0), (1.0, 1.0, 1.0)))
    with pytest.raises(NonInvertibleMetric):
        m.inverse([0.0, 0.0, 0.0])


def test_degenerate_plane():
    m = gallery.build_example("sphere3").metric
    with pytest.raises(DegeneratePlane):
        riemann_sectional(m, [0.1, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0])


def test_metric_symmetry_and_positivity_sampled():
    for name in ("sphere3", "hyperbolic3"):
        m = gallery.build_example(name).metric
        rng = np.random.default_rng(3)
        for _ in range(10):
            p = 0.4 * (2 * rng.random(3) - 1)
            g = m.matrix(p)
            assert np.max(np.abs(g - g.T)) < 1e-12
            assert np.all(np.linalg.eigvalsh(g) > 0)
