"""Theta numerics, Moore matrix factorizations and block presentations
of bundles on the Hesse cubic."""

from .bundles import (SectionVector, UlrichSpec, automorphy_block,
                      automorphy_cocycle_residual, automorphy_transport_residual,
                      build_algebraic, build_analytic, calibrate_scalars,
                      curve_sample_points, derivative_elimination_fit,
                      elimination_consequence_residual, jet_kernel_residual,
                      offcurve_sample_triples, relation_annihilation_residual,
                      relation_matrix, section_basis, tangent_rep,
                      verify_factorization, verify_presentation)
from .curve import (CurveConfig, ProjectivePoint, double_neg, embed,
                    is_three_torsion, iterate_double_neg, negate, on_curve,
                    proj_distance)
from .errors import (AllIndicesDegenerate, AllZero, CalibrationFailed,
                     DegenerateProbe, DenominatorZero, HesseCubicError,
                     IllConditioned, InconsistentFactor, InconsistentPsi,
                     NonconvergentSeries, NotSquare, OrderTooHigh, SizeMismatch,
                     ZeroReference)
from .moore import (MoorePair, l_derivative, l_matrix, moore_derivative,
                    moore_from_coords, moore_matrix, moore_pair,
                    theta_relation_residuals)
from .poly import (MultiPoly, PolyMatrix, det, equal_up_to_scalar, eval_matrix,
                   hesse_form, numeric_rank, scalar_fit_residual)
from .report import CheckReport, all_passed, check, to_json_lines
from .theta import (ThetaContext, ThetaValue, automorphy_factor,
                    basis_provenance, hesse_psi, theta_eval, theta_vector)

__version__ = "0.1.0"
