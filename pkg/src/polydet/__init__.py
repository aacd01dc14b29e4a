"""Determinants of Laplacians on genus-zero polyhedral surfaces.

Closed-form zeta-regularized determinants for flat conical metrics on the
sphere, their gradients in vertex positions, cone angles and overall
scale, and the numerical oracles (cone heat kernels, Hadamard finite
parts, elliptic-curve identities, finite differences) that cross-validate
every formula.
"""

from .cone import (
    ConeKernelConfig,
    ConePoint,
    a_mu,
    a_mu_disk_integral,
    heat_kernel_cone,
    heat_kernel_images,
    heat_trace_correction,
    resolvent_cone,
    resolvent_images,
)
from .detlap import (
    DetReport,
    GradientReport,
    chs_compare_same_angles,
    f_function,
    grad_angle,
    grad_position,
    grad_scale,
    log_det_as,
    log_det_over_area,
    w_function,
)
from .elliptic import (
    EllipticData,
    PeriodConfig,
    dedekind_eta,
    det_tetrahedron,
    det_torus,
    eta_distance_identity,
    jacobi_residual,
    periods,
    theta_constants,
    thomae_check,
)
from .errors import PolydetError
from .metric import (
    Angle,
    ConicalVertex,
    MetricDensity,
    PolyhedralMetric,
    Position,
    Scale,
    density,
    dump_metric,
    load_metric,
    log_density,
    make_metric,
    metric_from_json_dict,
    metric_to_json_dict,
    tetrahedron_metric,
    variation_field,
)
from .quad import QuadratureConfig, QuadResult, area, integrate
from .regint import (
    ContourConfig,
    HadamardConfig,
    HadamardResult,
    hadamard_coth_coth_over_theta,
    hadamard_coth_over_sinh_sq,
    q_of_beta,
    q_of_beta_contour,
    q_tilde,
    q_tilde_prime,
)
from .verify import FDConfig, fd_gradient, run_suite

__version__ = "0.1.0"
