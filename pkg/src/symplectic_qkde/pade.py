"""
Diagonal Pade machinery for the order-2l Cayley step.

The diagonal Pade approximant of ``exp(x)`` is ``P_l(x) / P_l(-x)`` with

    P_l(x) = 1 + sum_{k=0}^{l-1} x^{k+1} prod_{r=0}^{k} eta(l, r),
    eta(l, r) = (l - r) / ((2l - r)(r + 1)).

Splitting ``P_l`` into even and odd parts, ``P_l(x) = d(x^2) + x n(x^2)``,
and substituting ``x^2 = -c`` collapses the approximant to a Cayley
transform ``(1 + beta x) / (1 - beta x)`` with

    beta(l, c) = n(-c) / d(-c).

``a`` holds the coefficients of ``n`` (odd powers of ``P_l``) and ``b``
those of ``d`` (even powers).  Everything here is written against plain
arithmetic so it runs on floats, ``fractions.Fraction`` or ``mpmath.mpf``.
"""

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .core import InvalidArgumentError

MAX_ORDER = 32

# Upper end of the convergence domain of the Taylor series of beta(l, c) at
# c = 0, for l = 1..6.  Beyond l = 6 the domain tends to pi**2 (the pole of
# tan(sqrt(c)/2) / sqrt(c)).
TAYLOR_DOMAIN = {
    1: math.inf,
    2: 12.0,
    3: 10.0,
    4: 12650 / 1281,
    5: 2349 / 238,
    6: 10294 / 1043,
}

DENOMINATOR_RTOL = 1e-12


class SingularDenominatorError(ArithmeticError):
    """The even-part polynomial vanishes: ``c`` sits on a pole of beta(l, c)."""


class DomainWarning(RuntimeWarning):
    """``c`` lies outside the convergence domain of beta's Taylor series."""


@dataclass(frozen=True)
class OrderParam:
    """Order parameter ``l`` (accuracy order ``2l``) and its polynomial split sizes."""

    ell: int

    def __post_init__(self):
        check_order(self.ell)

    @property
    def s1(self):
        return (self.ell - 1) // 2

    @property
    def s2(self):
        return self.ell // 2


def check_order(ell):
    if isinstance(ell, bool) or not isinstance(ell, (int, np.integer)):
        raise InvalidArgumentError(f"order parameter must be an integer, got {ell!r}")
    if not 1 <= ell <= MAX_ORDER:
        raise InvalidArgumentError(f"order parameter must lie in [1, {MAX_ORDER}], got {ell}")
    return int(ell)


def taylor_domain(ell):
    """Right end of the convergence domain of beta's Taylor series at ``c = 0``."""
    return TAYLOR_DOMAIN.get(ell, math.pi**2)


def eta(ell, k, exact=False):
    """Ratio of consecutive Pade coefficients, ``(l - k) / ((2l - k)(k + 1))``.

    ``exact=True`` returns a ``Fraction``.
    """
    ell = check_order(ell)
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or not 0 <= k <= ell - 1:
        raise InvalidArgumentError(f"eta index must be an integer in [0, {ell - 1}], got {k!r}")
    k = int(k)
    if exact:
        return Fraction(ell - k, (2 * ell - k) * (k + 1))
    return (ell - k) / ((2 * ell - k) * (k + 1))


def horner(coeffs, x):
    """Evaluate ``sum_i coeffs[i] * x**i`` with one multiply and one add per degree."""
    if len(coeffs) == 0:
        raise InvalidArgumentError("horner needs at least one coefficient")
    acc = coeffs[-1]
    for ci in coeffs[-2::-1]:
        acc = acc * x + ci
    return acc


@dataclass(frozen=True)
class PadeCoefficients:
    """Split-polynomial coefficients: ``a`` (odd part, ``s1 + 1`` terms), ``b`` (even part, ``s2 + 1``)."""

    ell: int
    a: tuple
    b: tuple

    def polynomial(self):
        """Coefficients of ``P_l`` in increasing powers, interleaving ``b`` and ``a``."""
        p = []
        for j in range(self.ell + 1):
            p.append(self.b[j // 2] if j % 2 == 0 else self.a[j // 2])
        return p

    def arrays(self):
        return np.array(self.a, dtype=float), np.array(self.b, dtype=float)


def _half(exact):
    return Fraction(1, 2) if exact else 0.5


def _one(exact):
    return Fraction(1) if exact else 1.0


def gen_coeffs_parallel(ell, exact=False):
    """Generate ``a`` and ``b`` along two independent product chains.

    a[j+1] = a[j] * eta(2j+1) * eta(2j+2),   b[j+1] = b[j] * eta(2j) * eta(2j+1).
    """
    p = OrderParam(ell)
    a = [_half(exact)]
    for j in range(p.s1):
        a.append(a[j] * eta(ell, 2 * j + 1, exact) * eta(ell, 2 * j + 2, exact))
    b = [_one(exact)]
    for j in range(p.s2):
        b.append(b[j] * eta(ell, 2 * j, exact) * eta(ell, 2 * j + 1, exact))
    return PadeCoefficients(ell, tuple(a), tuple(b))


def gen_coeffs_alternative(ell, exact=False):
    """Generate ``a`` and ``b`` along a single alternating chain.

    b[j+1] = a[j] * eta(2j+1),  a[j+1] = b[j+1] * eta(2j+2), plus a closing
    b[s2] = a[s1] * eta(2 s1 + 1) when ``l`` is even.
    """
    p = OrderParam(ell)
    a = [_half(exact)]
    b = [_one(exact)]
    for j in range(p.s1):
        b.append(a[j] * eta(ell, 2 * j + 1, exact))
        a.append(b[j + 1] * eta(ell, 2 * j + 2, exact))
    if ell % 2 == 0:
        b.append(a[p.s1] * eta(ell, 2 * p.s1 + 1, exact))
    return PadeCoefficients(ell, tuple(a), tuple(b))


@lru_cache(maxsize=None)
def coefficient_arrays(ell):
    """Cached float64 ``(a, b)`` arrays for order ``l`` (alternating scheme), read-only."""
    a, b = gen_coeffs_alternative(ell).arrays()
    a.setflags(write=False)
    b.setflags(write=False)
    return a, b


def rational_beta(a, b, c):
    """``horner(a, -c) / horner(b, -c)`` without any checking; works on any number type."""
    x = -c
    return horner(a, x) / horner(b, x)


@dataclass(frozen=True)
class BetaValue:
    beta: float
    ell: int
    c: float


def beta(ell, c, scheme="alternative"):
    """Evaluate beta(l, c) for ``c >= 0``.

    Raises ``SingularDenominatorError`` on a pole of the rational form and
    emits a ``DomainWarning`` when ``c`` exceeds the Taylor convergence
    domain of the given order.
    """
    ell = check_order(ell)
    c = float(c)
    if not (math.isfinite(c) and c >= 0.0):
        raise InvalidArgumentError(f"c must be finite and non-negative, got {c}")
    if scheme == "alternative":
        a, b = coefficient_arrays(ell)
    elif scheme == "parallel":
        a, b = gen_coeffs_parallel(ell).arrays()
    else:
        raise InvalidArgumentError(f"unknown coefficient scheme {scheme!r}")
    if c >= taylor_domain(ell):
        warnings.warn(
            f"c = {c:g} is outside the convergence domain [0, {taylor_domain(ell):.5g}) for l = {ell}",
            DomainWarning,
            stacklevel=2,
        )
    x = -c
    n = horner(a, x)
    d = horner(b, x)
    if abs(d) < DENOMINATOR_RTOL * max(1.0, horner(np.abs(b), c)):
        raise SingularDenominatorError(f"beta({ell}, {c}) has a vanishing denominator ({d:.3e})")
    return BetaValue(beta=float(n / d), ell=ell, c=c)
