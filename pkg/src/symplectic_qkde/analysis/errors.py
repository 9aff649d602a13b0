"""Error metrics comparing a numerical trajectory with a reference one."""

import math
from dataclasses import dataclass

import numpy as np

from .. import _kernels
from ..propagator import PropagationConfig, propagate
from .oracle import reference_oracle
from .reference import LTI_OMEGA, LTI_Q0, SpecialLtvProfile, analytic_lti_grid

ROUNDING_FLOOR = 1e-14
ANTIPODAL_WARN = 1.0


class AlignmentError(ValueError):
    """The numerical and reference streams have different lengths."""


class InsufficientDataError(ValueError):
    """Too few usable samples for a convergence-order fit."""


def abs_error(q_ns, q_as):
    """Euclidean distance between two states; ``q`` and ``-q`` are *not* identified."""
    d = np.asarray(q_ns, dtype=float) - np.asarray(q_as, dtype=float)
    return float(math.sqrt(d @ d))


@dataclass
class ErrorReport:
    e_max: float = 0.0
    k_argmax: int = 0
    count: int = 0
    ell: int = None
    tau: float = None
    span: tuple = None
    near_antipodal: bool = False
    norm_drift: float = None

    def update(self, errs, k0):
        """Fold in the errors of samples ``k0 ..``; keeps only the running maximum."""
        if len(errs) == 0:
            return
        i = int(np.argmax(errs))
        if errs[i] > self.e_max or self.count == 0:
            self.e_max = float(errs[i])
            self.k_argmax = k0 + i
        self.count += len(errs)
        # |q_ns - q_as| > 1 means the two unit states are more than 60 degrees apart
        if self.e_max > ANTIPODAL_WARN:
            self.near_antipodal = True


def max_error(pairs, **echo):
    """Single-pass maximum of ``abs_error`` over a stream of ``(q_ns, q_as)`` pairs.

    A pair containing ``None`` (from ``itertools.zip_longest``) signals
    streams of unequal length.
    """
    report = ErrorReport(**echo)
    for k, (q_ns, q_as) in enumerate(pairs):
        if q_ns is None or q_as is None:
            raise AlignmentError(f"streams end at different lengths (index {k})")
        report.update([abs_error(q_ns, q_as)], k)
    return report


class _Rechunker:
    """Serves consecutive rows of a block stream in arbitrary slice sizes."""

    def __init__(self, blocks):
        self._it = iter(blocks)
        self._buf = np.empty((0, 4))
        self._k = 0

    def take(self, k0, m):
        if k0 != self._k:
            raise AlignmentError(f"reference stream misaligned at sample {k0}")
        while self._buf.shape[0] < m:
            blk = next(self._it, None)
            if blk is None:
                raise AlignmentError(f"reference stream ends before sample {k0 + m - 1}")
            if blk.k0 != self._k + self._buf.shape[0]:
                raise AlignmentError(f"reference stream misaligned at sample {blk.k0}")
            self._buf = np.concatenate([self._buf, blk.q])
        out, self._buf = self._buf[:m], self._buf[m:]
        self._k += m
        return out

    def exhausted(self):
        return self._buf.shape[0] == 0 and next(self._it, None) is None


def max_error_blocks(numerical, reference, **echo):
    """Maximum error between two block streams (e.g. ``Trajectory.blocks()``).

    ``reference`` may be a block stream or a function mapping sample
    indices ``k`` to an (m, 4) array of reference states.
    """
    report = ErrorReport(**echo)
    ref = None if callable(reference) else _Rechunker(reference)
    for blk in numerical:
        m = blk.q.shape[0]
        if ref is None:
            ref_q = reference(np.arange(blk.k0, blk.k0 + m))
        else:
            ref_q = ref.take(blk.k0, m)
        e, i = _kernels.max_abs_error(blk.q, np.ascontiguousarray(ref_q))
        if e > report.e_max or report.count == 0:
            report.e_max = float(e)
            report.k_argmax = blk.k0 + int(i)
        report.count += m
    if ref is not None and not ref.exhausted():
        raise AlignmentError("reference stream is longer than the numerical one")
    report.near_antipodal = report.e_max > ANTIPODAL_WARN
    return report


def convergence_order(samples, floor=ROUNDING_FLOOR):
    """Least-squares slope of ``log E_max`` against ``log tau``.

    ``samples`` is a sequence of ``(tau, e_max)``; points with
    ``e_max < floor`` are treated as rounding-dominated and dropped.
    """
    pts = [(float(t), float(e)) for t, e in samples if e >= floor]
    taus = {t for t, _ in pts}
    if len(pts) < 3 or len(taus) < 3:
        raise InsufficientDataError(f"need >= 3 distinct usable samples above {floor:g}, got {len(pts)}")
    x = np.log([t for t, _ in pts])
    y = np.log([e for _, e in pts])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def lti_error(ell, tau, omega=LTI_OMEGA, q0=LTI_Q0, t0=0.0, tf=2000.0):
    """E_max of the constant-rate propagator against the exact solution on ``[t0, tf]``."""
    cfg = PropagationConfig(ell=ell, tau=tau, t0=t0, tf=tf, q0=q0, rate=np.asarray(omega, dtype=float))
    traj = propagate(cfg)
    report = max_error_blocks(
        traj.blocks(),
        lambda k: analytic_lti_grid(k, cfg.tau, omega, cfg.q0),
        ell=ell, tau=cfg.tau, span=(cfg.t0, cfg.tf),
    )
    report.norm_drift = traj.max_norm_drift
    return report


def special_ltv_error(ell, tau, profile=None, t0=0.0, tf=2000.0):
    """E_max of the time-varying propagator against the closed-form special solution."""
    profile = profile or SpecialLtvProfile()
    cfg = PropagationConfig(ell=ell, tau=tau, t0=t0, tf=tf, q0=profile.q_as(t0), rate=profile)
    traj = propagate(cfg)
    report = max_error_blocks(
        traj.blocks(), lambda k: profile.q_as(cfg.times(k)),
        ell=ell, tau=cfg.tau, span=(cfg.t0, cfg.tf),
    )
    report.norm_drift = traj.max_norm_drift
    return report


def oracle_error(ell, tau, rate, q0, t0, tf, substeps=256):
    """E_max of the time-varying propagator against :func:`reference_oracle`."""
    cfg = PropagationConfig(ell=ell, tau=tau, t0=t0, tf=tf, q0=q0, rate=rate)
    oracle = reference_oracle(rate, cfg.q0, cfg.t0, cfg.tf, cfg.tau, substeps=substeps, block_size=1024)
    traj = propagate(cfg, block_size=1024)
    report = max_error_blocks(traj.blocks(), oracle.blocks(), ell=ell, tau=cfg.tau, span=(cfg.t0, cfg.tf))
    report.norm_drift = traj.max_norm_drift
    return report
