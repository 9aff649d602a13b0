"""
Quaternion kinematics primitives.

The attitude quaternion ``q = [e0, e1, e2, e3]`` obeys ``dq/dt = 0.5 * Omega(w) q``
where ``Omega(w)`` is the 4x4 skew-symmetric matrix built from the body
angular velocity ``w`` (rad/s).  Quaternion states and angular velocities
are plain float64 numpy arrays of shape (4,) and (3,).
"""

from dataclasses import dataclass

import numpy as np


class InvalidArgumentError(ValueError):
    """Raised for non-finite or out-of-range inputs."""


# Left multiplication by the unit quaternion i: (e0, e1, e2, e3) -> (-e1, e0, -e3, e2).
# Skew, squares to -I and commutes with every Omega(w).
J_TILDE = np.array(
    [
        [0.0, -1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
    ]
)
J_TILDE.setflags(write=False)


def as_rate(omega):
    """Validate an angular velocity and return it as a float64 array of shape (3,)."""
    w = np.asarray(omega, dtype=float)
    if w.shape != (3,):
        raise InvalidArgumentError(f"angular velocity must have 3 components, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise InvalidArgumentError(f"angular velocity must be finite, got {w}")
    return w


def as_quat(q, normalize=False):
    """Validate a quaternion and return it as a float64 array of shape (4,).

    With ``normalize=True`` the result is scaled to unit norm; a zero
    quaternion is rejected.
    """
    v = np.array(q, dtype=float)
    if v.shape != (4,):
        raise InvalidArgumentError(f"quaternion must have 4 components, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidArgumentError(f"quaternion must be finite, got {v}")
    if normalize:
        n = np.linalg.norm(v)
        if n == 0.0:
            raise InvalidArgumentError("cannot normalize the zero quaternion")
        v = v / n
    return v


@dataclass(frozen=True)
class OmegaMatrix:
    """The matrix ``Omega(w)`` together with the cached rate magnitude ``gamma = |w|``."""

    M: np.ndarray
    gamma: float

    @property
    def omega(self):
        return self.M[1:, 0].copy()


def omega_entries(omega):
    w1, w2, w3 = omega
    return np.array(
        [
            [0.0, -w1, -w2, -w3],
            [w1, 0.0, w3, -w2],
            [w2, -w3, 0.0, w1],
            [w3, w2, -w1, 0.0],
        ]
    )


def build_omega(omega):
    """Build ``Omega(w)``.

    Entries are copied (and negated) from ``w`` rather than recomputed, so
    the result is exactly skew-symmetric.

    Examples
    --------
    >>> build_omega([1.0, 0.0, 0.0]).M[0]
    array([ 0., -1., -0., -0.])
    """
    w = as_rate(omega)
    M = omega_entries(w)
    M.setflags(write=False)
    return OmegaMatrix(M=M, gamma=float(np.sqrt(w @ w)))


def omega_hat(om):
    """Return the unit generator ``Omega / |w|``, which squares to ``-I``."""
    if om.gamma == 0.0:
        raise ZeroDivisionError("omega_hat is undefined for zero angular velocity")
    return om.M / om.gamma


def symplectic_residual(G):
    """Frobenius norm of ``G^T J G - J`` for the quaternion symplectic structure."""
    G = np.asarray(G, dtype=float)
    return float(np.linalg.norm(G.T @ J_TILDE @ G - J_TILDE))


def orthogonality_residual(G):
    """Frobenius norm of ``G^T G - I``."""
    G = np.asarray(G, dtype=float)
    return float(np.linalg.norm(G.T @ G - np.eye(G.shape[0])))
