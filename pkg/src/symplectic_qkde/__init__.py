"""Even-order explicit symplectic integrators for the quaternion kinematics equation."""

from .core import (
    J_TILDE,
    InvalidArgumentError,
    OmegaMatrix,
    as_quat,
    as_rate,
    build_omega,
    omega_hat,
    orthogonality_residual,
    symplectic_residual,
)
from .pade import (
    BetaValue,
    DomainWarning,
    OrderParam,
    PadeCoefficients,
    SingularDenominatorError,
    beta,
    eta,
    gen_coeffs_alternative,
    gen_coeffs_parallel,
    horner,
)
from .propagator import (
    ConstantRate,
    PropagationConfig,
    PropagationError,
    Trajectory,
    TrajectorySample,
    propagate,
    propagate_lti,
    propagate_ltv,
)
from .transition import (
    TransitionMatrix,
    analytic_transition,
    inverse_transition,
    transition_error_norm,
    transition_error_terms,
    transition_matrix,
)

__version__ = "0.1.0"
