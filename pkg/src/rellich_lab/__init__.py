"""rellich_lab: numerical verification of Rellich-type inequalities by
reduction to weighted half-line integrals and eigenproblems."""

from .errors import InputError, NumericsError
from .quadrature import Interval, QuadratureRule, make_log_rule, make_rule, \
    weighted_inner, weighted_norm_sq
from .profiles import (BumpProfile, CombinationProfile, RadialProfile,
                       SampledProfile, StarProfile, WindowedPolyProfile, bump,
                       linear_combination, profile_from_dict, profile_from_json,
                       random_profile, star, windowed_poly)
from .radial_ops import (ModeContext, mode_eigenvalue, mode_laplacian,
                         radial_laplacian, rellich_constant,
                         shifted_radial_laplacian)
from .harmonics import (ZonalPolynomial, sphere_area, weighted_pair_integral,
                        zonal, zonal_ode_residual, zonal_sphere_norm_sq)
from .verify import (DissipativityReport, IdentityReport, cross_term,
                     cross_term_closed_form, decomposition_check,
                     dissipativity_first, dissipativity_second, identity_report,
                     multimode_check, rellich_check)
from .sharp import (ConstantEstimate, angle_estimate, eigen_constant,
                    spherical_constant_check, symbol_constant)
from .oracle_nd import (ReductionReport, TensorField, certify_reduction,
                        dump_field, fd_angular_derivative, fd_laplacian,
                        fd_radial_derivative, fd_spherical_laplacian, load_field,
                        origin_mask, sample_mode_function)

__version__ = "0.1.0"
