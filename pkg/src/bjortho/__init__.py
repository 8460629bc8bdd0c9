"""Birkhoff-James orthogonality for vectors, functionals and operators on finite-dimensional l_p spaces."""

from .operators import (ApproxSpectrum, AttainmentWitnessSet, NormCertificate, OperatorSpec,
                        TruncationDefect, attainment_set, op_bj_direct, op_norm, op_strong_bj,
                        power_iteration, truncation_defect, zero_in_approx_spectrum)
from .spaces import (INF, SpaceSpec, best_approximation_coefficient, dual_norm,
                     is_rotund_point, is_smooth_point, modulus_of_convexity_estimate, norm,
                     norm_derivative_minus, norm_derivative_plus, norming_witnesses,
                     sample_unit_sphere)
from .vec_ortho import (Verdict, convex_min_1d, in_negative_part, in_negative_part_eps,
                        in_positive_part, in_positive_part_eps, is_bj_orthogonal,
                        is_eps_orthogonal, is_strongly_bj_orthogonal, minimal_eps_minus,
                        minimal_eps_plus)

__version__ = "0.1.0"
