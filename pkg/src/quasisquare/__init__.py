"""Quasi-square operators on model subspaces of Hardy spaces.

Finite Blaschke products, model spaces ``K_theta``, the quasi-square maps
``S`` and ``S_theta``, real-part characterizations, endpoint witnesses and
embedding norms, all at desk scale.
"""

__version__ = "0.1.0"

from .blaschke import BlaschkeProduct, RationalFn, frostman_shift, g_theta, mt_basis
from .embedding import (
    DiskMeasure,
    SolidOperatorSpec,
    check_solid,
    embedding_norm,
    extrapolation_doubling_check,
    littlewood_paley_energy,
    lp_counterexample_sweep,
    maximal_operator,
)
from .endpoint import (
    EndpointSample,
    check_4_10,
    endpoint_blowup_sweep,
    fa_norms,
    hardy_lower_bound,
    sup_norm_square,
)
from .fourier import (
    AnalyticPoly,
    BoundarySamples,
    CircleGrid,
    GridTooSmallError,
    TrigCoeffs,
    b_constant,
    conjugate_function,
    lp_norm,
    pichorides_A,
    riesz_projection,
    weak_l1_quasinorm,
)
from .model_space import ModelSpace, membership_residual, p_theta_project
from .quasi_square import quasi_square, quasi_square_shifted, verify_superquadratic, verify_theorem31
from .real_parts import RealPartWitness, check_real_part, complete_to_model, uniqueness_probe

__all__ = [
    "AnalyticPoly", "BlaschkeProduct", "BoundarySamples", "CircleGrid", "DiskMeasure",
    "EndpointSample", "GridTooSmallError", "ModelSpace", "RationalFn", "RealPartWitness",
    "SolidOperatorSpec", "TrigCoeffs", "b_constant", "check_4_10", "check_real_part",
    "check_solid", "complete_to_model", "conjugate_function", "embedding_norm",
    "endpoint_blowup_sweep", "extrapolation_doubling_check", "fa_norms", "frostman_shift",
    "g_theta", "hardy_lower_bound", "littlewood_paley_energy", "lp_counterexample_sweep",
    "lp_norm", "maximal_operator", "membership_residual", "mt_basis", "p_theta_project",
    "pichorides_A", "quasi_square", "quasi_square_shifted", "riesz_projection",
    "sup_norm_square", "uniqueness_probe", "verify_superquadratic", "verify_theorem31",
    "weak_l1_quasinorm",
]
