"""Numerical lab for inverse mean curvature flow in warped products.

Axisymmetric leaves, the IMCF solver, Hawking mass identities and Sobolev
distances between the induced annulus metrics and their model annuli.
"""

from .ambient import WarpedProfile, ambient_curvatures, profile_eval, round_sphere_data
from .chain import (AnnulusMetric, ChainReport, chain_metric, chain_report,
                    convergence_study, metric_sandwich_margin, prototype_metric,
                    sobolev_distance)
from .flow import (FlowRecord, class_membership_report, exact_round_flow, imcf_gauge,
                   imcf_step, off_center_sphere, perturbed_sphere, run_imcf)
from .masses import (IdentityResidualTable, average_evolution_residuals,
                     corollary_integral_table, geroch_diagnostics, hawking_mass,
                     interpolation_ratio, ricci_inequality_margin, second_ff_gradient_decay,
                     weak_ricci_residual)
from .scenario import Scenario, emit, parse_scenario
from .surface import AxisymGrid, SurfaceState, diameter, surface_geometry, surface_integral

__version__ = "0.1.0"

__all__ = [
    "AnnulusMetric", "AxisymGrid", "ChainReport", "FlowRecord", "IdentityResidualTable",
    "Scenario", "SurfaceState", "WarpedProfile", "ambient_curvatures",
    "average_evolution_residuals", "chain_metric", "chain_report", "class_membership_report",
    "convergence_study", "corollary_integral_table", "diameter", "emit", "exact_round_flow",
    "geroch_diagnostics", "hawking_mass", "imcf_gauge", "imcf_step", "interpolation_ratio",
    "metric_sandwich_margin", "off_center_sphere", "parse_scenario", "perturbed_sphere",
    "profile_eval", "prototype_metric", "ricci_inequality_margin", "round_sphere_data",
    "run_imcf", "second_ff_gradient_decay", "sobolev_distance", "surface_geometry",
    "surface_integral", "weak_ricci_residual",
]
