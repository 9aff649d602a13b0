"""Closed-form solutions and the rate profiles used in the accuracy studies."""

import math

import numpy as np

from ..core import InvalidArgumentError, as_quat, as_rate, omega_entries

# Constant-rate scenario: span [0, 2000] s, q0 = (1, 0, 0, 0).
LTI_OMEGA = np.array(
    [
        math.pi * math.sin(math.pi / 8),
        -(math.pi / 3) * math.cos(math.pi / 8),
        -2.0 * math.sin(math.pi / 3),
    ]
)
LTI_OMEGA.setflags(write=False)
LTI_Q0 = np.array([1.0, 0.0, 0.0, 0.0])
LTI_Q0.setflags(write=False)


def analytic_lti_solution(t, omega, q0):
    """Exact state at time offset ``t`` under a constant rate.

    ``q(t) = cos(|w| t / 2) q0 + sin(|w| t / 2) Omega_hat q0``.  ``t`` may be
    a scalar (returns shape (4,)) or an array (returns shape (m, 4)).
    """
    w = as_rate(omega)
    q0 = as_quat(q0)
    t = np.asarray(t, dtype=float)
    gamma = math.sqrt(float(w @ w))
    if gamma == 0.0:
        return np.broadcast_to(q0, t.shape + (4,)).copy()
    half = 0.5 * gamma * t
    u = omega_entries(w) @ q0 / gamma
    return np.cos(half)[..., None] * q0 + np.sin(half)[..., None] * u


def analytic_lti_grid(k, tau, omega, q0):
    """Exact states at ``t = k * tau`` with the phase ``k * |w| tau / 2`` carried in double-double.

    Removes the ``~eps * phase`` error of evaluating ``cos(|w| t / 2)`` naively,
    which otherwise dominates long-span error floors.
    """
    import mpmath

    w = as_rate(omega)
    q0 = as_quat(q0)
    k = np.asarray(k, dtype=float)
    with mpmath.workdps(40):
        wm = [mpmath.mpf(float(v)) for v in w]
        gamma_mp = mpmath.sqrt(sum(v * v for v in wm))
        if gamma_mp == 0:
            return np.broadcast_to(q0, k.shape + (4,)).copy()
        theta = gamma_mp * mpmath.mpf(float(tau)) / 2
        th_hi = float(theta)
        th_lo = float(theta - th_hi)
        u = [float(x) for x in (mpmath.matrix(omega_entries(wm).tolist()) * mpmath.matrix(q0.tolist())) / gamma_mp]
    p, e = _two_product(k, th_hi)
    delta = e + k * th_lo
    cp, sp = np.cos(p), np.sin(p)
    cos_phase = cp - delta * sp
    sin_phase = sp + delta * cp
    return cos_phase[..., None] * q0 + sin_phase[..., None] * np.asarray(u)


def _split(a):
    c = 134217729.0 * a  # 2**27 + 1
    hi = c - (c - a)
    return hi, a - hi


def _two_product(a, b):
    """Error-free product ``a * b = p + e`` (Dekker)."""
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


class SpecialLtvProfile:
    """Time-varying rate with a known closed-form attitude.

    ``w(t) = [-w0 (1 - cos xi), -w0 sin xi sin(w0 t), w0 sin xi cos(w0 t)]``
    drives ``q(t) = [cos(xi/2), 0, sin(xi/2) cos(w0 t), sin(xi/2) sin(w0 t)]``.
    """

    def __init__(self, omega0=2 * math.pi, xi=math.pi / 80):
        if omega0 == 0 or not math.isfinite(omega0) or not math.isfinite(xi):
            raise InvalidArgumentError(f"need finite non-zero omega0 and finite xi, got {omega0}, {xi}")
        self.omega0 = float(omega0)
        self.xi = float(xi)

    def __repr__(self):
        return f"SpecialLtvProfile(omega0={self.omega0!r}, xi={self.xi!r})"

    def sample(self, times):
        t = np.asarray(times, dtype=float)
        w0, xi = self.omega0, self.xi
        out = np.empty(t.shape + (3,))
        out[..., 0] = -w0 * (1.0 - math.cos(xi))
        out[..., 1] = -w0 * math.sin(xi) * np.sin(w0 * t)
        out[..., 2] = w0 * math.sin(xi) * np.cos(w0 * t)
        return out

    def __call__(self, t):
        return self.sample(np.asarray(t, dtype=float))

    def q_as(self, t):
        t = np.asarray(t, dtype=float)
        h = self.xi / 2
        out = np.empty(t.shape + (4,))
        out[..., 0] = math.cos(h)
        out[..., 1] = 0.0
        out[..., 2] = math.sin(h) * np.cos(self.omega0 * t)
        out[..., 3] = math.sin(h) * np.sin(self.omega0 * t)
        return out

    @property
    def q0(self):
        return self.q_as(0.0)


def special_ltv_profile(omega0, xi):
    return SpecialLtvProfile(omega0, xi)


class DecayingLtvProfile:
    """The general time-varying rate used for the oracle comparison.

    ``w(t) = [-w0 cos(xi t) exp(-w0 t), -w0 sin(w0 t), w0 cos(xi t) cos(w0 t)]``,
    taken literally as published; no closed-form attitude exists.
    """

    def __init__(self, omega0=2 * math.pi, xi=math.pi / 80):
        self.omega0 = float(omega0)
        self.xi = float(xi)

    def __repr__(self):
        return f"DecayingLtvProfile(omega0={self.omega0!r}, xi={self.xi!r})"

    def sample(self, times):
        t = np.asarray(times, dtype=float)
        w0, xi = self.omega0, self.xi
        out = np.empty(t.shape + (3,))
        cx = np.cos(xi * t)
        out[..., 0] = -w0 * cx * np.exp(-w0 * t)
        out[..., 1] = -w0 * np.sin(w0 * t)
        out[..., 2] = w0 * cx * np.cos(w0 * t)
        return out

    def __call__(self, t):
        return self.sample(np.asarray(t, dtype=float))

    @property
    def q0(self):
        h = self.xi / 2
        return np.array([math.cos(h), 0.0, math.sin(h), 0.0])
