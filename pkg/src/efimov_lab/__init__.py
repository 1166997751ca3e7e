"""efimov_lab: numerical geometry of surfaces carrying a third-fundamental-form
compatible connection with torsion, inside pinched-curvature 3-spaces."""

from .ambient import (
    ChartBox,
    ChartPoint,
    CurvatureSample,
    MetricField,
    christoffel,
    curvature_sample,
    riemann_covariant,
    riemann_sectional,
    sectional_range,
)
from .asymptotics import (
    AsymptoticFrame,
    AsymptoticTrace,
    asymptotic_frame,
    covariant_rate_check,
    measured_tau1,
    net_expansion_check,
    trace_asymptotic,
)
from .connection import (
    BoundSet,
    HypothesisVerdict,
    SurfaceConnectionData,
    check_hypothesis,
    curvature_bounds_k4k5,
    dual_codazzi_residual,
    dual_connection_at,
    ktilde_at,
    torsion_bound_bruteforce,
    torsion_bound_tau0,
)
from .curves import (
    CurveTrace,
    JacobiTrace,
    RegionSpec,
    deformation_rate_check,
    gauss_bonnet_residual,
    geodesic_curvature,
    integrate_geodesic,
    integrate_jacobi,
    jacobi_field,
    parallel_transport,
)
from .gallery import build_example, verify_example, virtual_third_form
from .immersion import (
    FundamentalData,
    SurfacePatch,
    codazzi_residual,
    fundamental_forms,
    gauss_residual,
)
from .odelab import (
    EdoSolution,
    SpiralSpectrum,
    construct_edo7,
    solve_prop_edo,
    spiral_eigenvalues,
)

__all__ = [
    "AsymptoticFrame",
    "AsymptoticTrace",
    "BoundSet",
    "ChartBox",
    "ChartPoint",
    "CurvatureSample",
    "CurveTrace",
    "EdoSolution",
    "FundamentalData",
    "HypothesisVerdict",
    "JacobiTrace",
    "MetricField",
    "RegionSpec",
    "SpiralSpectrum",
    "SurfaceConnectionData",
    "SurfacePatch",
    "asymptotic_frame",
    "build_example",
    "check_hypothesis",
    "christoffel",
    "codazzi_residual",
    "construct_edo7",
    "covariant_rate_check",
    "curvature_bounds_k4k5",
    "curvature_sample",
    "deformation_rate_check",
    "dual_codazzi_residual",
    "dual_connection_at",
    "fundamental_forms",
    "gauss_bonnet_residual",
    "gauss_residual",
    "geodesic_curvature",
    "integrate_geodesic",
    "integrate_jacobi",
    "jacobi_field",
    "ktilde_at",
    "measured_tau1",
    "net_expansion_check",
    "parallel_transport",
    "riemann_covariant",
    "riemann_sectional",
    "sectional_range",
    "solve_prop_edo",
    "spiral_eigenvalues",
    "torsion_bound_bruteforce",
    "torsion_bound_tau0",
    "trace_asymptotic",
    "verify_example",
    "virtual_third_form",
]

__version__ = "0.1.0"
