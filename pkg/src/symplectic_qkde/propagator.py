"""
Fixed-step symplectic propagation of the quaternion kinematics.

Propagation is streamed: a :class:`Trajectory` yields the states on the
uniform grid ``t[k] = t0 + k tau`` (``k = 0..n``, ``n = floor((tf - t0)/tau)``)
in fixed-size blocks, so memory use does not depend on ``n``.  States are
never renormalised; ``Trajectory.max_norm_drift`` records ``max |1 - |q||``
over everything emitted so far.
"""

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Union

import numpy as np

from . import _kernels
from .core import InvalidArgumentError, as_quat, as_rate
from .pade import SingularDenominatorError, check_order, coefficient_arrays
from .transition import transition_matrix

DEFAULT_BLOCK = 8192


class PropagationError(RuntimeError):
    """A step could not be taken; ``step`` is the index ``k`` of the failing step."""

    def __init__(self, message, step):
        super().__init__(f"{message} (step {step})")
        self.step = step


class ConstantRate:
    """A time-independent angular velocity usable wherever a rate function is expected."""

    def __init__(self, omega):
        self.omega = as_rate(omega)

    def __call__(self, t):
        return self.omega.copy()

    def sample(self, times):
        return np.broadcast_to(self.omega, (len(times), 3)).copy()


def sample_rates(rate, times):
    """Evaluate a rate source at ``times``; returns an (m, 3) array.

    Objects with a ``sample(times)`` method are called once per block;
    plain callables are evaluated point by point.
    """
    times = np.asarray(times, dtype=float)
    if hasattr(rate, "sample"):
        out = np.asarray(rate.sample(times), dtype=float)
    else:
        out = np.array([np.asarray(rate(t), dtype=float) for t in times], dtype=float)
        if out.size == 0:
            out = out.reshape(0, 3)
    if out.shape != (times.shape[0], 3):
        raise InvalidArgumentError(f"rate source returned shape {out.shape}, expected ({times.shape[0]}, 3)")
    return out


def step_count(t0, tf, tau):
    """``floor((tf - t0) / tau)``, snapping ratios within 1e-9 of an integer."""
    ratio = (tf - t0) / tau
    nearest = round(ratio)
    if abs(ratio - nearest) <= 1e-9 * max(1.0, abs(ratio)):
        return int(nearest)
    return math.floor(ratio)


@dataclass(frozen=True)
class PropagationConfig:
    ell: int
    tau: float
    t0: float
    tf: float
    q0: np.ndarray
    rate: Union[np.ndarray, Callable, ConstantRate]

    def __post_init__(self):
        check_order(self.ell)
        tau = float(self.tau)
        if not (math.isfinite(tau) and tau > 0.0):
            raise InvalidArgumentError(f"tau must be positive, got {self.tau}")
        if not (math.isfinite(self.t0) and math.isfinite(self.tf) and self.tf > self.t0):
            raise InvalidArgumentError(f"need finite t0 < tf, got [{self.t0}, {self.tf}]")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "tf", float(self.tf))
        if self.n < 1:
            raise InvalidArgumentError(f"span [{self.t0}, {self.tf}] holds no full step of {tau}")
        q0 = as_quat(self.q0, normalize=True)
        q0.setflags(write=False)
        object.__setattr__(self, "q0", q0)
        if not (callable(self.rate) or hasattr(self.rate, "sample")):
            object.__setattr__(self, "rate", ConstantRate(self.rate))

    @property
    def n(self):
        return step_count(self.t0, self.tf, self.tau)

    @property
    def constant_rate(self):
        """The rate vector when the source is constant, else ``None``."""
        if isinstance(self.rate, ConstantRate):
            return self.rate.omega
        return None

    def times(self, k):
        return self.t0 + np.asarray(k, dtype=float) * self.tau


class TrajectorySample(NamedTuple):
    k: int
    t: float
    q: np.ndarray


class TrajectoryBlock(NamedTuple):
    """Consecutive samples ``k0 .. k0 + len(t) - 1``."""

    k0: int
    t: np.ndarray
    q: np.ndarray


class Trajectory:
    """Lazily evaluated trajectory; iterating yields :class:`TrajectorySample`.

    Each iteration re-runs the propagation from ``q0``.
    """

    def __init__(self, cfg, stepper, block_size=DEFAULT_BLOCK):
        self.cfg = cfg
        self._stepper = stepper
        self.block_size = int(block_size)
        self.max_norm_drift = 0.0

    def __len__(self):
        return self.cfg.n + 1

    def blocks(self):
        cfg = self.cfg
        q = cfg.q0.copy()
        first = cfg.q0.reshape(1, 4).copy()
        self.max_norm_drift = abs(1.0 - float(np.linalg.norm(first[0])))
        yield TrajectoryBlock(0, cfg.times([0]), first)
        k = 0
        while k < cfg.n:
            m = min(self.block_size, cfg.n - k)
            out = np.empty((m, 4))
            self._stepper(q, k, out)
            drift = float(np.max(np.abs(1.0 - np.sqrt(np.einsum("ij,ij->i", out, out)))))
            self.max_norm_drift = max(self.max_norm_drift, drift)
            yield TrajectoryBlock(k + 1, cfg.times(np.arange(k + 1, k + m + 1)), out)
            k += m

    def __iter__(self):
        for blk in self.blocks():
            for i in range(blk.t.shape[0]):
                yield TrajectorySample(blk.k0 + i, float(blk.t[i]), blk.q[i].copy())

    def collect(self):
        """Materialise the whole trajectory as ``(t, q)`` arrays."""
        ts, qs = [], []
        for blk in self.blocks():
            ts.append(blk.t)
            qs.append(blk.q)
        return np.concatenate(ts), np.concatenate(qs)

    def final(self):
        """Last sample, streaming through the trajectory without keeping it."""
        last = None
        for blk in self.blocks():
            last = blk
        return TrajectorySample(last.k0 + len(last.t) - 1, float(last.t[-1]), last.q[-1].copy())


def propagate_lti(cfg, block_size=DEFAULT_BLOCK):
    """Order-2l propagation for a constant rate: ``G`` is built once, then ``q[k+1] = G q[k]``."""
    omega = cfg.constant_rate
    if omega is None:
        raise InvalidArgumentError("propagate_lti needs a constant rate; use propagate_ltv")
    T = transition_matrix(cfg.ell, cfg.tau, omega)
    gm1, (k1, k2, k3), corr = T.gm1, T.k, T.corr

    def stepper(q, k, out):
        _kernels.lti_block(q, gm1, k1, k2, k3, corr, out)

    return Trajectory(cfg, stepper, block_size)


def propagate_ltv(cfg, block_size=DEFAULT_BLOCK):
    """Order-2l propagation for a time-varying rate.

    Step ``k`` samples the rate at the grid point ``t[k]`` (left end of the
    step), rebuilds the transition from it and applies it.
    """
    a, b = coefficient_arrays(cfg.ell)
    scratch = np.empty(9)

    def stepper(q, k, out):
        rates = sample_rates(cfg.rate, cfg.times(np.arange(k, k + out.shape[0])))
        status, i = _kernels.ltv_block(q, a, b, cfg.tau, rates, out, scratch)
        if status == _kernels.NONFINITE:
            raise PropagationError(f"non-finite angular velocity {rates[i]}", k + i)
        if status == _kernels.SINGULAR:
            raise SingularDenominatorError(f"singular beta at step {k + i} (rate {rates[i]})")

    return Trajectory(cfg, stepper, block_size)


def propagate(cfg, block_size=DEFAULT_BLOCK):
    """Dispatch to :func:`propagate_lti` or :func:`propagate_ltv` by rate source."""
    if cfg.constant_rate is not None:
        return propagate_lti(cfg, block_size)
    return propagate_ltv(cfg, block_size)
