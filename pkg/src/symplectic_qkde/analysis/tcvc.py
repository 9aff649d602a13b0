"""
Operation-count model: predicted and measured (multiplications, additions).

Predicted counts are the published closed forms.  Measured counts come
from a literal transcription of the coefficient, transition and stepping
algorithms executed on :class:`Counted` numbers, under these conventions:

* ``*``, ``/``, ``//`` and ``%`` count as multiplications; ``+`` and ``-`` as additions;
* integer index arithmetic written in the algorithms (``2j + 1``, ``(l - 1) // 2``) counts;
* negation, comparisons, loop control and sampling the rate are free;
* ``tau beta Omega`` multiplies only the 12 structurally non-zero entries of
  ``Omega``; ``(1 - alpha) I`` is added onto its diagonal (4 additions);
  the division by ``1 + alpha`` touches all 16 entries;
* the state update is a dense 4x4 matrix-vector product.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..core import InvalidArgumentError, as_quat, as_rate
from ..pade import check_order
from ..propagator import ConstantRate, sample_rates, step_count


class OpCounter:
    def __init__(self):
        self.mul = 0
        self.add = 0

    def as_tuple(self):
        return (self.mul, self.add)


class Counted:
    """A number that charges its arithmetic to an :class:`OpCounter`."""

    __slots__ = ("v", "ctr")

    def __init__(self, v, ctr):
        self.v = v
        self.ctr = ctr

    def _val(self, o):
        return o.v if isinstance(o, Counted) else o

    def _mul(self, r):
        self.ctr.mul += 1
        return Counted(r, self.ctr)

    def _add(self, r):
        self.ctr.add += 1
        return Counted(r, self.ctr)

    def __add__(self, o):
        return self._add(self.v + self._val(o))

    def __radd__(self, o):
        return self._add(self._val(o) + self.v)

    def __sub__(self, o):
        return self._add(self.v - self._val(o))

    def __rsub__(self, o):
        return self._add(self._val(o) - self.v)

    def __mul__(self, o):
        return self._mul(self.v * self._val(o))

    def __rmul__(self, o):
        return self._mul(self._val(o) * self.v)

    def __truediv__(self, o):
        return self._mul(self.v / self._val(o))

    def __rtruediv__(self, o):
        return self._mul(self._val(o) / self.v)

    def __floordiv__(self, o):
        return self._mul(self.v // self._val(o))

    def __mod__(self, o):
        return self._mul(self.v % self._val(o))

    def __neg__(self):
        return Counted(-self.v, self.ctr)

    def __eq__(self, o):
        return self.v == self._val(o)

    def __lt__(self, o):
        return self.v < self._val(o)

    def __int__(self):
        return int(self.v)

    def __float__(self):
        return float(self.v)

    __hash__ = None


def _eta(ell, k):
    return (ell - k) / ((2 * ell - k) * (k + 1))


def _horner(coeffs, x):
    acc = coeffs[-1]
    for ci in coeffs[-2::-1]:
        acc = acc * x + ci
    return acc


def _afsia_beta(ell, c, ctr):
    L = Counted(ell, ctr)
    s1 = (L - 1) // 2
    s2 = L // 2
    a = [Counted(0.5, ctr)]
    b = [Counted(1.0, ctr)]
    for jj in range(int(s1)):
        j = Counted(jj, ctr)
        b.append(a[jj] * _eta(L, 2 * j + 1))
        a.append(b[jj + 1] * _eta(L, 2 * j + 2))
    if L % 2 == 0:
        b.append(a[int(s1)] * _eta(L, 2 * s1 + 1))
    return _horner(a, -c) / _horner(b, -c)


def _pfsia_beta(ell, c, ctr):
    L = Counted(ell, ctr)
    s1 = (L - 1) // 2
    s2 = L // 2
    a = [Counted(0.5, ctr)]
    for jj in range(int(s1)):
        j = Counted(jj, ctr)
        a.append(a[jj] * _eta(L, 2 * j + 1) * _eta(L, 2 * j + 2))
    b = [Counted(1.0, ctr)]
    for jj in range(int(s2)):
        j = Counted(jj, ctr)
        b.append(b[jj] * _eta(L, 2 * j) * _eta(L, 2 * j + 1))
    return _horner(a, -c) / _horner(b, -c)


def _transition(ell, tau, w, ctr):
    w1, w2, w3 = (Counted(float(v), ctr) for v in w)
    Om = [
        [0.0, -w1, -w2, -w3],
        [w1, 0.0, w3, -w2],
        [w2, -w3, 0.0, w1],
        [w3, w2, -w1, 0.0],
    ]
    c = tau * tau * (w1 * w1 + w2 * w2 + w3 * w3) / 4
    beta = _afsia_beta(ell, c, ctr)
    alpha = c * beta * beta
    tb = tau * beta
    M = [[tb * e if isinstance(e, Counted) else 0.0 for e in row] for row in Om]
    one_minus = 1 - alpha
    for i in range(4):
        M[i][i] = M[i][i] + one_minus
    den = 1 + alpha
    return [[e / den for e in row] for row in M]


def _matvec(G, q):
    out = []
    for row in G:
        acc = row[0] * q[0]
        for j in range(1, 4):
            acc = acc + row[j] * q[j]
        out.append(acc)
    return out


def count_ltv(ell, tau, rate, q0, t0, n):
    """Run ``n`` literal time-varying steps on counted numbers.

    Returns ``((mul, add), q_final)`` with ``q_final`` as floats.
    """
    ctr = OpCounter()
    T = Counted(float(tau), ctr)
    t = Counted(float(t0), ctr)
    q = [Counted(float(v), ctr) for v in as_quat(q0)]
    for _ in range(n):
        w = sample_rates(rate, [t.v])[0]
        G = _transition(ell, T, w, ctr)
        q = _matvec(G, q)
        t = t + T
    return ctr.as_tuple(), np.array([float(v) for v in q])


def count_lti(ell, tau, omega, q0, t0, tf):
    """Literal constant-rate propagation on counted numbers; returns ``((mul, add), q_final)``."""
    ctr = OpCounter()
    T = Counted(float(tau), ctr)
    t = Counted(float(t0), ctr)
    # the floor((tf - t0) / tau) of the algorithm is charged; the snapped count drives the loop
    _ = (Counted(float(tf), ctr) - t) // T
    n = step_count(t0, tf, tau)
    G = _transition(ell, T, as_rate(omega), ctr)
    q = [Counted(float(v), ctr) for v in as_quat(q0)]
    for _ in range(n):
        q = _matvec(G, q)
        t = t + T
    return ctr.as_tuple(), np.array([float(v) for v in q])


@dataclass(frozen=True)
class TcvcModel:
    algorithm: str
    mul: int
    add: int
    measured_mul: int = None
    measured_add: int = None

    @property
    def predicted(self):
        return (self.mul, self.add)

    @property
    def measured(self):
        if self.measured_mul is None:
            return None
        return (self.measured_mul, self.measured_add)

    def relative_deviation(self):
        """``(measured - predicted) / predicted`` for both components."""
        if self.measured is None:
            return None
        return ((self.measured_mul - self.mul) / self.mul, (self.measured_add - self.add) / self.add)


def _predict(alg, ell, n, s):
    if alg == "Eta":
        return 3, 3
    if alg == "Polynomial":
        return s, s
    if alg == "PFsiaGenBeta":
        return 11 * ell - 6, (17 * ell - 12 + ell % 2) // 2
    if alg == "AFsiaGenBeta":
        return 6 * ell - 1, 5 * ell - 3
    if alg == "SpTranMatQkde":
        return 6 * ell + 29, 5 * ell + 6
    if alg == "EoEsgaQkdeLTV":
        return 6 * ell * n + 45 * n, 5 * ell * n + 19 * n
    if alg == "EoEsgaQkdeLTI":
        return 16 * n + 6 * ell + 29, 13 * n + 5 * ell + 6
    raise InvalidArgumentError(f"unknown algorithm id {alg!r}")


ALGORITHMS = ("Eta", "Polynomial", "PFsiaGenBeta", "AFsiaGenBeta", "SpTranMatQkde", "EoEsgaQkdeLTV", "EoEsgaQkdeLTI")


def tcvc_predict(algorithm, ell=None, n=None, s=None, measure=False):
    """Predicted (and optionally measured) operation counts.

    ``ell`` is needed by the coefficient, transition and propagation
    algorithms, ``n`` (steps) by the propagators, ``s`` (degree) by
    ``Polynomial``.  Measurement runs the counted transcription on the
    constant-rate study scenario.
    """
    if algorithm not in ALGORITHMS:
        raise InvalidArgumentError(f"unknown algorithm id {algorithm!r}")
    if algorithm in ALGORITHMS[2:]:
        ell = check_order(ell)
    if algorithm in ("EoEsgaQkdeLTV", "EoEsgaQkdeLTI") and (n is None or n < 0):
        raise InvalidArgumentError(f"{algorithm} needs a step count n >= 0")
    if algorithm == "Polynomial" and (s is None or s < 0):
        raise InvalidArgumentError("Polynomial needs a degree s >= 0")
    mul, add = _predict(algorithm, ell, n, s)
    if not measure:
        return TcvcModel(algorithm, mul, add)
    mm, ma = measure_counts(algorithm, ell=ell, n=n, s=s)
    return TcvcModel(algorithm, mul, add, mm, ma)


def measure_counts(algorithm, ell=None, n=None, s=None, c=0.5, tau=0.1):
    from .reference import LTI_OMEGA, LTI_Q0

    ctr = OpCounter()
    if algorithm == "Eta":
        _eta(Counted(max(ell or 2, 2), ctr), Counted(1, ctr))
        return ctr.as_tuple()
    if algorithm == "Polynomial":
        _horner([Counted(1.0, ctr)] * (s + 1), Counted(c, ctr))
        return ctr.as_tuple()
    if algorithm == "AFsiaGenBeta":
        _afsia_beta(ell, Counted(c, ctr), ctr)
        return ctr.as_tuple()
    if algorithm == "PFsiaGenBeta":
        _pfsia_beta(ell, Counted(c, ctr), ctr)
        return ctr.as_tuple()
    if algorithm == "SpTranMatQkde":
        _transition(ell, Counted(tau, ctr), LTI_OMEGA, ctr)
        return ctr.as_tuple()
    if algorithm == "EoEsgaQkdeLTV":
        counts, _ = count_ltv(ell, tau, ConstantRate(LTI_OMEGA), LTI_Q0, 0.0, n)
        return counts
    if algorithm == "EoEsgaQkdeLTI":
        counts, _ = count_lti(ell, tau, LTI_OMEGA, LTI_Q0, 0.0, n * tau)
        return counts
    raise InvalidArgumentError(f"unknown algorithm id {algorithm!r}")
