import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symplectic_qkde import InvalidArgumentError, PropagationConfig, build_omega, propagate
from symplectic_qkde.analysis import (
    ALGORITHMS,
    LTI_OMEGA,
    LTI_Q0,
    ORACLE_BUDGET,
    AlignmentError,
    DecayingLtvProfile,
    InsufficientDataError,
    SpecialLtvProfile,
    abs_error,
    analytic_lti_grid,
    analytic_lti_solution,
    convergence_order,
    count_lti,
    count_ltv,
    lti_error,
    max_error,
    max_error_blocks,
    oracle_error,
    reference_oracle,
    special_ltv_error,
    special_ltv_profile,
    tcvc_predict,
)
from symplectic_qkde.propagator import ConstantRate


def _ode_residual(q_of_t, w_of_t, t, h=1e-6):
    dq = (q_of_t(t + h) - q_of_t(t - h)) / (2 * h)
    return np.linalg.norm(dq - 0.5 * build_omega(w_of_t(t)).M @ q_of_t(t))


def test_lti_scenario_constants():
    np.testing.assert_allclose(
        LTI_OMEGA,
        [math.pi * math.sin(math.pi / 8), -(math.pi / 3) * math.cos(math.pi / 8), -2 * math.sin(math.pi / 3)],
    )
    np.testing.assert_array_equal(LTI_Q0, [1, 0, 0, 0])


def test_analytic_lti_examples():
    np.testing.assert_array_equal(analytic_lti_solution(0.0, LTI_OMEGA, LTI_Q0), LTI_Q0)
    # half-angle |w| t / 2 = pi: a full sign flip
    q = analytic_lti_solution(math.pi, [2.0, 0.0, 0.0], LTI_Q0)
    np.testing.assert_allclose(q, [-1.0, 0.0, 0.0, 0.0], atol=1e-15)
    q = analytic_lti_solution(math.pi / 2, [2.0, 0.0, 0.0], LTI_Q0)
    np.testing.assert_allclose(q, [0.0, 1.0, 0.0, 0.0], atol=1e-15)
    res = _ode_residual(lambda s: analytic_lti_solution(s, [2.0, 0, 0], LTI_Q0), lambda s: [2.0, 0, 0], math.pi)
    assert res <= 1e-8
    np.testing.assert_array_equal(analytic_lti_solution([0.0, 3.0], [0, 0, 0], [0, 1, 0, 0]), [[0, 1, 0, 0]] * 2)


@settings(max_examples=50, deadline=None)
@given(st.tuples(*[st.floats(-5, 5)] * 3), st.floats(0.0, 50.0))
def test_analytic_lti_solves_ode(w, t):
    w = np.array(w)
    q0 = np.array([0.5, -0.5, 0.5, 0.5])
    res = _ode_residual(lambda s: analytic_lti_solution(s, w, q0), lambda s: w, t)
    assert res <= 1e-8 * max(1.0, np.linalg.norm(w))


def test_analytic_grid_matches_direct_form():
    k = np.arange(0, 1000)
    a = analytic_lti_grid(k, 0.01, LTI_OMEGA, LTI_Q0)
    b = analytic_lti_solution(k * 0.01, LTI_OMEGA, LTI_Q0)
    assert np.max(np.abs(a - b)) <= 1e-14
    np.testing.assert_array_equal(analytic_lti_grid(k[:3], 0.1, [0, 0, 0], LTI_Q0), [LTI_Q0] * 3)


def test_analytic_grid_phase_is_exact_at_long_spans():
    import mpmath

    k = np.array([2_000_000])
    tau = 1e-3
    got = analytic_lti_grid(k, tau, LTI_OMEGA, LTI_Q0)[0]
    with mpmath.workdps(40):
        g = mpmath.sqrt(sum(mpmath.mpf(float(v)) ** 2 for v in LTI_OMEGA))
        ph = g * mpmath.mpf(tau) * 2_000_000 / 2
        assert abs(got[0] - float(mpmath.cos(ph))) <= 2e-16


def test_special_profile_examples():
    p = special_ltv_profile(2 * math.pi, math.pi / 80)
    xi = math.pi / 80
    np.testing.assert_allclose(p.q_as(0.0), [math.cos(xi / 2), 0, math.sin(xi / 2), 0])
    np.testing.assert_array_equal(p.q0, p.q_as(0.0))
    t = np.linspace(0, 10, 1000)
    assert np.max(np.abs(np.linalg.norm(p.q_as(t), axis=1) - 1.0)) <= 2e-16
    w = p.sample(np.array([0.3]))[0]
    np.testing.assert_allclose(
        w, [-2 * math.pi * (1 - math.cos(xi)), -2 * math.pi * math.sin(xi) * math.sin(0.6 * math.pi),
            2 * math.pi * math.sin(xi) * math.cos(0.6 * math.pi)],
    )
    with pytest.raises(InvalidArgumentError):
        SpecialLtvProfile(0.0, 0.1)


def test_special_profile_solves_ode(rng):
    p = SpecialLtvProfile()
    for t in rng.uniform(0, 10, 100):
        assert _ode_residual(p.q_as, lambda s: p(s), t) <= 1e-8


def test_decaying_profile_taken_literally():
    p = DecayingLtvProfile()
    w0, xi = 2 * math.pi, math.pi / 80
    t = 0.37
    np.testing.assert_allclose(
        p(t),
        [-w0 * math.cos(xi * t) * math.exp(-w0 * t), -w0 * math.sin(w0 * t), w0 * math.cos(xi * t) * math.cos(w0 * t)],
    )
    np.testing.assert_allclose(p.q0, [math.cos(xi / 2), 0, math.sin(xi / 2), 0])


def test_abs_error_examples():
    q = np.array([0.5, 0.5, 0.5, 0.5])
    assert abs_error(q, q) == 0.0
    assert abs_error(q, -q) == 2.0
    assert abs_error([1, 0, 0, 0], [0, 1, 0, 0]) == pytest.approx(math.sqrt(2))


def test_max_error_stream():
    qs = [np.array([1.0, 0, 0, 0])] * 5
    rep = max_error(zip(qs, qs), ell=2, tau=0.1)
    assert rep.e_max == 0.0 and rep.count == 5 and rep.ell == 2
    other = qs[:2] + [np.array([0, 1.0, 0, 0])] + qs[3:]
    rep = max_error(zip(qs, other))
    assert rep.k_argmax == 2 and rep.e_max == pytest.approx(math.sqrt(2))
    assert rep.near_antipodal
    with pytest.raises(AlignmentError):
        max_error(itertools.zip_longest(qs, qs[:3]))


def test_max_error_blocks_alignment():
    cfg = PropagationConfig(2, 0.1, 0.0, 5.0, LTI_Q0, LTI_OMEGA)
    a = propagate(cfg, block_size=7)
    b = propagate(cfg, block_size=11)
    assert max_error_blocks(a.blocks(), b.blocks()).e_max == 0.0
    short = propagate(PropagationConfig(2, 0.1, 0.0, 4.0, LTI_Q0, LTI_OMEGA))
    with pytest.raises(AlignmentError):
        max_error_blocks(a.blocks(), short.blocks())
    with pytest.raises(AlignmentError):
        max_error_blocks(short.blocks(), a.blocks())


def test_error_report_starts_at_zero():
    rep = lti_error(2, 0.1, tf=10.0)
    assert rep.count == 101
    assert rep.span == (0.0, 10.0)
    assert rep.e_max > 0.0 and rep.k_argmax > 0


def test_convergence_order_synthetic():
    taus = [0.2, 0.1, 0.05, 0.025]
    assert convergence_order([(t, t**2) for t in taus]) == pytest.approx(2.0)
    # floor-contaminated points are dropped
    assert convergence_order([(t, t**6) for t in taus] + [(0.001, 1e-18)]) == pytest.approx(6.0)
    with pytest.raises(InsufficientDataError):
        convergence_order([(0.1, 1e-3), (0.05, 1e-20), (0.025, 1e-22)])
    with pytest.raises(InsufficientDataError):
        convergence_order([(0.1, 1e-3), (0.1, 1e-3), (0.05, 1e-4)])


def test_convergence_order_scenario_order_two():
    s = [(t, lti_error(2, t, tf=100.0).e_max) for t in (0.2, 0.1, 0.05, 0.025)]
    assert convergence_order(s) == pytest.approx(4.0, abs=0.3)


@pytest.mark.parametrize("ell,tau", [(1, 0.05), (2, 0.05), (3, 0.1)])
def test_error_roughly_linear_in_span(ell, tau):
    a = lti_error(ell, tau, tf=200.0).e_max
    b = lti_error(ell, tau, tf=400.0).e_max
    assert b <= 2.5 * a


def test_error_floor_for_high_orders():
    for ell in (4, 6):
        assert lti_error(ell, 1e-2, tf=2000.0).e_max <= 1e-11


def test_oracle_against_lti_solution():
    oracle = reference_oracle(ConstantRate(LTI_OMEGA), LTI_Q0, 0.0, 100.0, 0.01, substeps=16)
    rep = max_error_blocks(oracle.blocks(), lambda k: analytic_lti_grid(k, 0.01, LTI_OMEGA, LTI_Q0))
    assert rep.count == 10001
    assert rep.e_max <= ORACLE_BUDGET


def test_oracle_against_special_solution():
    p = SpecialLtvProfile()
    oracle = reference_oracle(p, p.q0, 0.0, 20.0, 0.01)
    rep = max_error_blocks(oracle.blocks(), lambda k: p.q_as(k * 0.01))
    assert rep.e_max <= 1e-11


def test_oracle_fourth_order():
    p = SpecialLtvProfile()
    errs = []
    for sub in (1, 2, 4, 8):
        o = reference_oracle(p, p.q0, 0.0, 10.0, 0.1, substeps=sub)
        errs.append(max_error_blocks(o.blocks(), lambda k: p.q_as(k * 0.1)).e_max)
    slopes = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    assert all(abs(s - 4.0) < 0.2 for s in slopes)


def test_oracle_self_consistency():
    p = DecayingLtvProfile()
    a = reference_oracle(p, p.q0, 0.0, 20.0, 0.01, substeps=256)
    b = reference_oracle(p, p.q0, 0.0, 20.0, 0.01, substeps=512)
    assert max_error_blocks(a.blocks(), b.blocks()).e_max <= 1e-13


def test_oracle_rejects_bad_arguments():
    with pytest.raises(InvalidArgumentError):
        reference_oracle(ConstantRate(LTI_OMEGA), LTI_Q0, 0.0, 1.0, 0.1, substeps=0)
    with pytest.raises(InvalidArgumentError):
        reference_oracle(ConstantRate(LTI_OMEGA), LTI_Q0, 0.0, 1.0, -0.1)


def test_special_ltv_error_small_span():
    rep = special_ltv_error(3, 1e-3, tf=10.0)
    assert rep.count == 10001
    assert rep.e_max < 1e-3
    assert rep.norm_drift <= 1e-12


def test_oracle_error_decaying_profile():
    p = DecayingLtvProfile()
    rep = oracle_error(2, 1e-3, p, p.q0, 0.0, 5.0, substeps=8)
    assert rep.count == 5001
    assert 0.0 < rep.e_max < 1e-2


@pytest.mark.parametrize(
    "alg,kw,expected",
    [
        ("AFsiaGenBeta", {"ell": 4}, (23, 17)),
        ("EoEsgaQkdeLTV", {"ell": 1, "n": 1000}, (51000, 24000)),
        ("Eta", {}, (3, 3)),
        ("PFsiaGenBeta", {"ell": 3}, (27, 20)),
        ("PFsiaGenBeta", {"ell": 4}, (38, 28)),
        ("Polynomial", {"s": 5}, (5, 5)),
        ("SpTranMatQkde", {"ell": 2}, (41, 16)),
        ("EoEsgaQkdeLTI", {"ell": 2, "n": 10}, (201, 146)),
    ],
)
def test_tcvc_closed_forms(alg, kw, expected):
    assert tcvc_predict(alg, **kw).predicted == expected


def test_tcvc_errors():
    with pytest.raises(InvalidArgumentError):
        tcvc_predict("Bogus", ell=2)
    with pytest.raises(InvalidArgumentError):
        tcvc_predict("EoEsgaQkdeLTV", ell=2)
    with pytest.raises(InvalidArgumentError):
        tcvc_predict("AFsiaGenBeta", ell=0)
    assert set(ALGORITHMS) >= {"Eta", "EoEsgaQkdeLTV"}


def test_measured_counts_small_algorithms():
    assert tcvc_predict("Eta", measure=True).measured == (3, 3)
    assert tcvc_predict("Polynomial", s=4, measure=True).measured == (4, 4)
    for ell in (1, 2, 3, 4, 7):
        m = tcvc_predict("AFsiaGenBeta", ell=ell, measure=True)
        assert m.measured == (m.mul - 1, m.add - 1)


@pytest.mark.parametrize("ell", [1, 2, 4])
def test_measured_ltv_counts_affine_and_close(ell):
    counts = [np.array(tcvc_predict("EoEsgaQkdeLTV", ell=ell, n=n, measure=True).measured) for n in (10, 20, 30)]
    assert np.array_equal(counts[1] - counts[0], counts[2] - counts[1])
    m = tcvc_predict("EoEsgaQkdeLTV", ell=ell, n=50, measure=True)
    dm, da = m.relative_deviation()
    assert abs(dm) <= 0.2 and abs(da) <= 0.2


def test_counted_runs_reproduce_propagation():
    rate = ConstantRate(LTI_OMEGA)
    _, q = count_ltv(3, 0.1, rate, LTI_Q0, 0.0, 20)
    ref = propagate(PropagationConfig(3, 0.1, 0.0, 2.0, LTI_Q0, lambda t: LTI_OMEGA)).final().q
    np.testing.assert_allclose(q, ref, atol=1e-14)
    _, q2 = count_lti(3, 0.1, LTI_OMEGA, LTI_Q0, 0.0, 2.0)
    np.testing.assert_allclose(q2, ref, atol=1e-14)
