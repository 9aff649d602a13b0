"""
Compiled inner loops.

A single step map ``G = I + D`` is carried as ``gm1`` (the diagonal of
``D``) and ``k1, k2, k3`` (so that the skew part of ``D`` is ``Omega(k)``),
plus a scale correction ``corr``.

Once rounded to doubles, ``gm1`` and ``k`` describe a map whose squared gain
``(1 + gm1)^2 + |k|^2`` is ``1 + eps`` with ``|eps|`` up to ~2e-16 for large
step angles.  For a constant rate that defect is the same every step, so the
norm drifts by ``n * eps / 2``.  ``corr = -eps / 2`` (eps evaluated exactly)
scales it away, and each row of ``G q`` is summed with error-free products
and sums and rounded once, so the correction is not lost to rounding.  The
state itself is never renormalised.
"""

import math

import numpy as np
from numba import njit

# status codes returned by the block kernels
OK = 0
SINGULAR = 1
NONFINITE = 2


@njit(cache=True)
def horner(coeffs, x):
    acc = coeffs[coeffs.shape[0] - 1]
    for i in range(coeffs.shape[0] - 2, -1, -1):
        acc = acc * x + coeffs[i]
    return acc


@njit(cache=True)
def two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


@njit(cache=True)
def _split(a):
    c = 134217729.0 * a  # 2**27 + 1
    hi = c - (c - a)
    return hi, a - hi


@njit(cache=True)
def two_prod(a, b):
    """``a * b = p + e`` exactly (Dekker)."""
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


@njit(cache=True)
def gain_defect(gm1, k1, k2, k3):
    """``(1 + gm1)^2 + k1^2 + k2^2 + k3^2 - 1`` evaluated in double-double."""
    s = 2.0 * gm1
    lo = 0.0
    for v in (gm1, k1, k2, k3):
        p, e = two_prod(v, v)
        s, t = two_sum(s, p)
        lo += t + e
    return s + lo


@njit(cache=True)
def cayley_step(a, b, tau, w1, w2, w3, out):
    """Fill ``out = [c, beta, alpha, diag, gm1, k1, k2, k3, corr]``; return a status code."""
    sq = w1 * w1 + w2 * w2 + w3 * w3
    c = tau * tau * sq / 4.0
    x = -c
    n = horner(a, x)
    d = horner(b, x)
    if sq == 0.0:
        out[0] = 0.0
        out[1] = n / d
        out[2] = 0.0
        out[3] = 1.0
        out[4] = 0.0
        out[5] = 0.0
        out[6] = 0.0
        out[7] = 0.0
        out[8] = 0.0
        return OK
    scale = 0.0
    for i in range(b.shape[0] - 1, -1, -1):
        scale = scale * c + abs(b[i])
    if abs(d) < 1e-12 * max(1.0, scale):
        return SINGULAR
    beta = n / d
    alpha = c * beta * beta
    den = 1.0 + alpha
    s = tau * beta / den
    out[0] = c
    out[1] = beta
    out[2] = alpha
    out[3] = (1.0 - alpha) / den
    out[4] = -2.0 * alpha / den
    out[5] = s * w1
    out[6] = s * w2
    out[7] = s * w3
    out[8] = -0.5 * gain_defect(out[4], out[5], out[6], out[7])
    return OK


@njit(cache=True)
def _acc(s, lo, a, x):
    p, pe = two_prod(a, x)
    s, se = two_sum(s, p)
    return s, lo + (pe + se)


@njit(cache=True)
def apply_step(q, gm1, k1, k2, k3, corr):
    """``q <- (1 + corr) (I + gm1 I + Omega(k)) q``, each row rounded once."""
    e0 = q[0]
    e1 = q[1]
    e2 = q[2]
    e3 = q[3]
    s, lo = _acc(e0, 0.0, gm1, e0)
    s, lo = _acc(s, lo, -k1, e1)
    s, lo = _acc(s, lo, -k2, e2)
    s, lo = _acc(s, lo, -k3, e3)
    n0 = s + (lo + corr * s)
    s, lo = _acc(e1, 0.0, k1, e0)
    s, lo = _acc(s, lo, gm1, e1)
    s, lo = _acc(s, lo, k3, e2)
    s, lo = _acc(s, lo, -k2, e3)
    n1 = s + (lo + corr * s)
    s, lo = _acc(e2, 0.0, k2, e0)
    s, lo = _acc(s, lo, -k3, e1)
    s, lo = _acc(s, lo, gm1, e2)
    s, lo = _acc(s, lo, k1, e3)
    n2 = s + (lo + corr * s)
    s, lo = _acc(e3, 0.0, k3, e0)
    s, lo = _acc(s, lo, k2, e1)
    s, lo = _acc(s, lo, -k1, e2)
    s, lo = _acc(s, lo, gm1, e3)
    n3 = s + (lo + corr * s)
    q[0] = n0
    q[1] = n1
    q[2] = n2
    q[3] = n3


@njit(cache=True)
def lti_block(q, gm1, k1, k2, k3, corr, out):
    """Advance ``q`` in place ``out.shape[0]`` times, recording each new state."""
    for i in range(out.shape[0]):
        apply_step(q, gm1, k1, k2, k3, corr)
        out[i, 0] = q[0]
        out[i, 1] = q[1]
        out[i, 2] = q[2]
        out[i, 3] = q[3]


@njit(cache=True)
def ltv_block(q, a, b, tau, rates, out, scratch):
    """One step per row of ``rates`` (the rate sampled at the start of the step).

    Returns ``(status, i)``: on failure ``i`` is the offending row.
    """
    for i in range(rates.shape[0]):
        w1 = rates[i, 0]
        w2 = rates[i, 1]
        w3 = rates[i, 2]
        if not (math.isfinite(w1) and math.isfinite(w2) and math.isfinite(w3)):
            return NONFINITE, i
        status = cayley_step(a, b, tau, w1, w2, w3, scratch)
        if status != OK:
            return status, i
        apply_step(q, scratch[4], scratch[5], scratch[6], scratch[7], scratch[8])
        out[i, 0] = q[0]
        out[i, 1] = q[1]
        out[i, 2] = q[2]
        out[i, 3] = q[3]
    return OK, rates.shape[0]


@njit(cache=True)
def exact_step(q, v1, v2, v3):
    """Apply ``exp(Omega(v) / 2)`` exactly (Euler formula) in increment form."""
    nv = math.sqrt(v1 * v1 + v2 * v2 + v3 * v3)
    if nv == 0.0:
        return
    half = 0.5 * nv
    sh = math.sin(0.5 * half)
    gm1 = -2.0 * sh * sh
    s = math.sin(half) / nv
    k1 = s * v1
    k2 = s * v2
    k3 = s * v3
    apply_step(q, gm1, k1, k2, k3, -0.5 * gain_defect(gm1, k1, k2, k3))


SQRT3_12 = math.sqrt(3.0) / 12.0


@njit(cache=True)
def magnus4_block(q, h, nodes, substeps, out):
    """Fourth-order Magnus stepping with exact exponentials.

    ``nodes`` has shape (m * substeps, 2, 3): the rate at the two Gauss
    points of every substep.  Emits the state after each group of
    ``substeps`` substeps into ``out`` (shape (m, 4)).
    """
    m = out.shape[0]
    for i in range(m):
        for j in range(substeps):
            r = i * substeps + j
            a1 = nodes[r, 0, 0]
            a2 = nodes[r, 0, 1]
            a3 = nodes[r, 0, 2]
            b1 = nodes[r, 1, 0]
            b2 = nodes[r, 1, 1]
            b3 = nodes[r, 1, 2]
            # [Omega(x), Omega(y)] = Omega(-2 x cross y)
            cx = a2 * b3 - a3 * b2
            cy = a3 * b1 - a1 * b3
            cz = a1 * b2 - a2 * b1
            f = SQRT3_12 * h * h
            v1 = 0.5 * h * (a1 + b1) + f * cx
            v2 = 0.5 * h * (a2 + b2) + f * cy
            v3 = 0.5 * h * (a3 + b3) + f * cz
            exact_step(q, v1, v2, v3)
        out[i, 0] = q[0]
        out[i, 1] = q[1]
        out[i, 2] = q[2]
        out[i, 3] = q[3]


@njit(cache=True)
def max_abs_error(qns, qas):
    """Return ``(max_k |qns[k] - qas[k]|, argmax)`` over the rows."""
    best = -1.0
    arg = 0
    for i in range(qns.shape[0]):
        s = 0.0
        for j in range(4):
            d = qns[i, j] - qas[i, j]
            s += d * d
        e = math.sqrt(s)
        if e > best:
            best = e
            arg = i
    return best, arg


def warmup():
    """Compile every kernel once (cheap with the on-disk cache)."""
    a = np.array([0.5])
    b = np.array([1.0])
    q = np.array([1.0, 0.0, 0.0, 0.0])
    out = np.empty((1, 4))
    scratch = np.empty(9)
    cayley_step(a, b, 0.1, 1.0, 0.0, 0.0, scratch)
    lti_block(q, 0.0, 0.0, 0.0, 0.0, 0.0, out)
    ltv_block(q, a, b, 0.1, np.zeros((1, 3)), out, scratch)
    magnus4_block(q, 0.1, np.zeros((1, 2, 3)), 1, out)
    max_abs_error(out, out)
