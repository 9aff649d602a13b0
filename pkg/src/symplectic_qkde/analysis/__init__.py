"""Reference solutions, the oracle integrator, error metrics and operation counts."""

from .errors import (
    AlignmentError,
    ErrorReport,
    InsufficientDataError,
    abs_error,
    convergence_order,
    lti_error,
    max_error,
    max_error_blocks,
    oracle_error,
    special_ltv_error,
)
from .oracle import ORACLE_BUDGET, reference_oracle
from .reference import (
    LTI_OMEGA,
    LTI_Q0,
    DecayingLtvProfile,
    SpecialLtvProfile,
    analytic_lti_grid,
    analytic_lti_solution,
    special_ltv_profile,
)
from .tcvc import ALGORITHMS, TcvcModel, count_lti, count_ltv, measure_counts, tcvc_predict
