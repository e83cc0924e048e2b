"""Jacobi forms, vector-valued modular forms and their Eichler cohomology."""
from .cohomology import (Cocycle, CohomologyClassReport, JacobiContext, JacobiPolyVector,
                         PolyVector, alpha_cocycle, beta_cocycle, coboundary_solve,
                         cocycle_extend, eta_map, lift_vv_cocycle, parabolic_check,
                         pe_membership)
from .group import (I, MINUS_I, S, T, GroupElement, JacobiElement, Word, coset_reps,
                    jacobi_act, jacobi_compose, reduce_to_fundamental, word_decompose)
from .multiplier import (KappaDiagonal, MultiplierSystem, RelationError, UnitaryRep, eta_eval,
                         eta_multiplier, kappa_diag, weil_rep)
from .numeric import (FourierSeries, GaussianRational, RationalPolynomial, contour_integrate,
                      fourier_extract, mobius_substitute)
from .periods import (EichlerIntegralSeries, PeriodPolynomial, eichler_holo,
                      eichler_holo_integral, eichler_nonholo, gen_poincare_eval, period_cocycle,
                      period_hol, period_hol_from_eichler, period_nonhol)
from .theta import (JacobiFormData, ThetaSeries, heat_apply_fd, jacobi_slash_eval,
                    skew_slash_eval, theta_decompose, theta_eval, theta_expand_eval)
from .vvforms import (PoincareSpec, VVForm, VVType, cf_constant, cusp_spec, poincare_eval,
                      poincare_fourier, supplementary_data)

__version__ = "0.1.0"
