"""Numerical s-numbers of operators between finite l^p spaces and finite-section experiments."""
from .operators import (FiniteOperator, SequenceOperator, adjoint, apply, compose, diagonal,
                        finite_section, identity, scale)
from .opnorm import NormEstimate, operator_norm, oracle_operator_norm
from .snumbers import (SNumberKind, SNumberResult, approximation_number, chang_number,
                       gelfand_number, gelfand_via_ak, kolmogorov_number, kolmogorov_via_ak,
                       s_number, s_sequence, weyl_number)
from .spaces import NormedSpace, dist_to_subspace, dual_exponent, vector_norm

__version__ = "0.1.0"
