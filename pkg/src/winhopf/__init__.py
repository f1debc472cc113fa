"""Wiener-Hopf plus Hankel operators ``W(a) + H(b)`` for matching symbol pairs.

Symbols are exponential-rational functions ``exp(i delta t) r(t)``.  The
package factors them, realizes ``W`` and ``H`` on a Nystrom grid and on a
Laguerre basis, builds one-sided, two-sided and generalized inverses,
classifies invertibility from the subordinated indices and checks every
construction against an independent numerical path.
"""
from .classify import ClassificationReport, Indices, check_thm32_heuristic, classify
from .discretization import Grid, LaguerreBasis
from .errors import (
    BackendMismatchError,
    BackendUnsupportedError,
    NotInvertibleError,
    NotMatchingError,
    PreconditionError,
    RankAmbiguousError,
    SchemaError,
    ShiftOffGridError,
    WinHopfError,
)
from .factorization import Factorization, matching_factor, verify_factorization, wiener_hopf_factor
from .harness import TestVectorSet, cross_backend, identity_suite, rank_gap, residual, solve
from .inverses import (
    InverseRecipe,
    KernelBasis,
    cokernel_of_whh,
    kernel_basis,
    kernel_of_whh,
    phi_plus,
    wh_one_sided_inverse,
    whh_generalized_inverse,
    whh_left_inverse,
    whh_operator,
    whh_right_inverse,
    whh_two_sided_inverse,
)
from .operators import DiscreteOperator, build_H, build_W, op_P, op_U, op_V
from .symbols import (
    MatchingPair,
    Rational,
    Symbol,
    adjoint_pair,
    make_matching_pair,
    pair_from_json,
    reflect,
    symbol_from_json,
    symbol_to_json,
)

__version__ = "0.1.0"
