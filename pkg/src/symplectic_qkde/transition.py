"""
Single-step transition matrices for the quaternion kinematics.

For a rate ``w`` held over a step ``tau`` the order-2l map is

    c = tau^2 |w|^2 / 4,   alpha = c beta(l, c)^2,
    G = ((1 - alpha) I + tau beta Omega(w)) / (1 + alpha),

which equals ``cos(delta) I + sin(delta) Omega_hat`` with
``delta = 2 atan(beta |w| tau / 2)``; the exact map has ``delta = |w| tau / 2``.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernels
from .core import InvalidArgumentError, as_rate, omega_entries
from .pade import (
    SingularDenominatorError,
    beta,
    check_order,
    coefficient_arrays,
    gen_coeffs_alternative,
    rational_beta,
)


@dataclass(frozen=True)
class TransitionMatrix:
    """An orthogonal, symplectic single-step map.

    ``gm1`` and ``k`` hold ``G - I = gm1 * I + Omega(k)``, the form the
    propagators apply, and ``corr`` the scale that cancels the rounding
    defect of that representation; ``G`` is the materialised 4x4 matrix.  ``ell`` is
    ``None`` for the exact (analytic) map.
    """

    G: np.ndarray
    gm1: float
    k: np.ndarray
    tau: float
    omega: np.ndarray
    ell: int = None
    c: float = 0.0
    beta: float = math.nan
    alpha: float = 0.0
    corr: float = 0.0
    _delta: float = field(default=None, repr=False)

    @cached_property
    def delta(self):
        if self._delta is not None:
            return self._delta
        gamma = math.sqrt(float(self.omega @ self.omega))
        if gamma == 0.0:
            return 0.0
        return 2.0 * math.atan(self.beta * gamma * self.tau / 2.0)

    def apply(self, q):
        q = np.array(q, dtype=float)
        _kernels.apply_step(q, self.gm1, *self.k, self.corr)
        return q


def _materialise(diag, k):
    G = omega_entries(k)
    G[np.diag_indices(4)] = diag
    G.setflags(write=False)
    return G


def _check_tau(tau):
    tau = float(tau)
    if not math.isfinite(tau) or tau == 0.0:
        raise InvalidArgumentError(f"time step must be finite and non-zero, got {tau}")
    return tau


def transition_matrix(ell, tau, omega):
    """Order-2l Cayley transition for rate ``omega`` held over ``tau`` seconds.

    Negative ``tau`` yields the backward step.  Zero rate gives exactly ``I``.
    """
    ell = check_order(ell)
    tau = _check_tau(tau)
    w = as_rate(omega)
    a, b = coefficient_arrays(ell)
    out = np.empty(9)
    status = _kernels.cayley_step(a, b, tau, w[0], w[1], w[2], out)
    if status == _kernels.SINGULAR:
        # re-run through the checked path for the diagnostic message
        beta(ell, tau * tau * float(w @ w) / 4.0)
        raise SingularDenominatorError(f"singular beta for l={ell}, tau={tau}, omega={w}")
    c, bt, alpha, diag, gm1 = out[:5]
    k = out[5:8].copy()
    k.setflags(write=False)
    w.setflags(write=False)
    extra = {"_delta": 0.0} if c == 0.0 else {}
    return TransitionMatrix(
        G=_materialise(diag, k), gm1=float(gm1), k=k, tau=tau, omega=w,
        ell=ell, c=float(c), beta=float(bt), alpha=float(alpha), corr=float(out[8]), **extra,
    )


def analytic_transition(tau, omega):
    """Exact step ``exp(tau Omega / 2) = cos(|w| tau/2) I + sin(|w| tau/2) Omega_hat``."""
    tau = float(tau)
    w = as_rate(omega)
    w.setflags(write=False)
    gamma = math.sqrt(float(w @ w))
    delta = gamma * tau / 2.0
    if gamma == 0.0:
        k = np.zeros(3)
        k.setflags(write=False)
        return TransitionMatrix(G=_materialise(1.0, k), gm1=0.0, k=k, tau=tau, omega=w, _delta=0.0)
    s = math.sin(delta) / gamma
    k = s * w
    k.setflags(write=False)
    gm1 = -2.0 * math.sin(delta / 2.0) ** 2
    corr = -0.5 * _kernels.gain_defect(gm1, k[0], k[1], k[2])
    return TransitionMatrix(
        G=_materialise(math.cos(delta), k), gm1=gm1, k=k, tau=tau, omega=w, corr=corr, _delta=delta,
    )


def inverse_transition(T):
    """Inverse step, i.e. the transpose of ``G``.

    For a constant rate this is the same map as ``transition_matrix(l, -tau, w)``;
    it is *not* the backward step of a time-varying rate.
    """
    k = -T.k
    k.setflags(write=False)
    G = T.G.T.copy()
    G.setflags(write=False)
    return TransitionMatrix(
        G=G, gm1=T.gm1, k=k, tau=-T.tau, omega=T.omega, ell=T.ell,
        c=T.c, beta=T.beta, alpha=T.alpha, corr=T.corr, _delta=-T.delta,
    )


def transition_error_terms(ell, x, dps=None):
    """Scalar error functions of the LTI step for ``x = |w| tau``.

    ``G_exact - G = f1 I + f2 Omega_hat``; returns ``(f1, f2, 2(|f1| + |f2|))``.
    With ``dps`` the evaluation runs in mpmath at that many digits (the
    float result cancels catastrophically once ``f2`` drops below ~1e-17).
    """
    ell = check_order(ell)
    if dps is None:
        x = float(x)
        if x < 0.0:
            raise InvalidArgumentError(f"x must be non-negative, got {x}")
        c = x * x / 4.0
        bt = beta(ell, c).beta
        alpha = c * bt * bt
        f1 = math.cos(x / 2.0) - (1.0 - alpha) / (1.0 + alpha)
        f2 = math.sin(x / 2.0) - x * bt / (1.0 + alpha)
        return f1, f2, 2.0 * (abs(f1) + abs(f2))
    import mpmath

    with mpmath.workdps(dps):
        x = mpmath.mpf(x)
        if x < 0:
            raise InvalidArgumentError(f"x must be non-negative, got {x}")
        co = gen_coeffs_alternative(ell, exact=True)
        a = [mpmath.mpf(v.numerator) / v.denominator for v in co.a]
        b = [mpmath.mpf(v.numerator) / v.denominator for v in co.b]
        c = x * x / 4
        bt = rational_beta(a, b, c)
        alpha = c * bt * bt
        f1 = mpmath.cos(x / 2) - (1 - alpha) / (1 + alpha)
        f2 = mpmath.sin(x / 2) - x * bt / (1 + alpha)
        return float(f1), float(f2), float(2 * (abs(f1) + abs(f2)))


def transition_error_norm(ell, tau, omega, dps=50):
    """Frobenius norm of ``G_exact - G`` computed entrywise at ``dps`` digits.

    ``G`` is rebuilt from the same coefficient chain, Horner evaluation and
    Cayley formula as the float path, but in extended precision, so the
    result measures truncation error rather than float64 rounding.
    """
    import mpmath

    ell = check_order(ell)
    w = as_rate(omega)
    with mpmath.workdps(dps):
        co = gen_coeffs_alternative(ell, exact=True)
        a = [mpmath.mpf(v.numerator) / v.denominator for v in co.a]
        b = [mpmath.mpf(v.numerator) / v.denominator for v in co.b]
        t = mpmath.mpf(tau)
        wm = [mpmath.mpf(float(v)) for v in w]
        sq = sum(v * v for v in wm)
        gamma = mpmath.sqrt(sq)
        c = t * t * sq / 4
        bt = rational_beta(a, b, c)
        alpha = c * bt * bt
        num = _mp_omega(wm) * (t * bt)
        for i in range(4):
            num[i, i] = 1 - alpha
        G = num / (1 + alpha)
        if gamma == 0:
            exact = mpmath.eye(4)
        else:
            d = gamma * t / 2
            exact = mpmath.eye(4) * mpmath.cos(d) + _mp_omega(wm) * (mpmath.sin(d) / gamma)
        return float(mpmath.mnorm(exact - G, "f"))


def _mp_omega(w):
    import mpmath

    w1, w2, w3 = w
    return mpmath.matrix(
        [
            [0, -w1, -w2, -w3],
            [w1, 0, w3, -w2],
            [w2, -w3, 0, w1],
            [w3, w2, -w1, 0],
        ]
    )
