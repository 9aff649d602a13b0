import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symplectic_qkde import (
    J_TILDE,
    InvalidArgumentError,
    as_quat,
    as_rate,
    build_omega,
    omega_hat,
    orthogonality_residual,
    symplectic_residual,
)

from .conftest import rates


def test_zero_rate_gives_zero_matrix():
    om = build_omega((0.0, 0.0, 0.0))
    assert np.all(om.M == 0.0)
    assert om.gamma == 0.0


def test_unit_x_rate_rows():
    M = build_omega((1.0, 0.0, 0.0)).M
    expected = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]], dtype=float)
    np.testing.assert_array_equal(M, expected)


def test_square_is_minus_gamma_squared(rng):
    w = rng.normal(size=3)
    w *= 2.0 / np.linalg.norm(w)
    M = build_omega(w).M
    np.testing.assert_allclose(M @ M, -4.0 * np.eye(4), atol=1e-13)


def test_matrix_is_read_only_and_carries_omega():
    om = build_omega([0.1, 0.2, 0.3])
    with pytest.raises(ValueError):
        om.M[0, 0] = 1.0
    np.testing.assert_array_equal(om.omega, [0.1, 0.2, 0.3])


@pytest.mark.parametrize("bad", [(np.nan, 0, 0), (0, np.inf, 0), (1.0, 2.0)])
def test_invalid_rates_rejected(bad):
    with pytest.raises(InvalidArgumentError):
        build_omega(bad)


def test_omega_hat_scaling():
    np.testing.assert_array_equal(omega_hat(build_omega((2.0, 0.0, 0.0))), build_omega((1.0, 0.0, 0.0)).M)


def test_omega_hat_squares_to_minus_identity():
    H = omega_hat(build_omega((1.0, 1.0, 1.0)))
    np.testing.assert_allclose(H @ H, -np.eye(4), atol=1e-13)


def test_omega_hat_zero_rate_raises():
    with pytest.raises(ZeroDivisionError):
        omega_hat(build_omega((0.0, 0.0, 0.0)))


def test_symplectic_structure_constants():
    np.testing.assert_array_equal(J_TILDE.T, -J_TILDE)
    np.testing.assert_array_equal(J_TILDE @ J_TILDE, -np.eye(4))
    # rows map (e0, e1, e2, e3) to (-e1, e0, -e3, e2)
    np.testing.assert_array_equal(J_TILDE @ np.array([1.0, 2.0, 3.0, 4.0]), [-2.0, 1.0, -4.0, 3.0])


@settings(max_examples=300, deadline=None)
@given(rates())
def test_exact_skew_symmetry(w):
    M = build_omega(w).M
    assert np.array_equal(M.T, -M)


@settings(max_examples=300, deadline=None)
@given(rates())
def test_square_identity(w):
    M = build_omega(w).M
    g2 = float(w @ w)
    assert np.max(np.abs(M @ M + g2 * np.eye(4))) <= 1e-13 * max(g2, 1e-300) + 1e-300


@settings(max_examples=300, deadline=None)
@given(rates())
def test_commutes_with_symplectic_structure(w):
    M = build_omega(w).M
    assert np.max(np.abs(J_TILDE @ M - M @ J_TILDE)) <= 1e-15 * np.linalg.norm(w)


@settings(max_examples=200, deadline=None)
@given(rates(), rates(), st.sampled_from([-2.0, -0.5, 0.0, 1.0, 3.0]), st.sampled_from([0.25, 1.0, 4.0]))
def test_linearity(w1, w2, a, b):
    # powers of two and small integers keep the combination exact only when
    # the sums themselves are exact, so compare with a rounding-level bound
    lhs = build_omega(a * w1 + b * w2).M
    rhs = a * build_omega(w1).M + b * build_omega(w2).M
    assert np.max(np.abs(lhs - rhs)) <= 4 * np.finfo(float).eps * (np.abs(a * w1).max() + np.abs(b * w2).max() + 1e-300)


def test_linearity_exact_on_representable_values():
    w1 = np.array([0.5, -1.25, 2.0])
    w2 = np.array([3.0, 0.75, -0.125])
    np.testing.assert_array_equal(build_omega(2 * w1 - w2).M, 2 * build_omega(w1).M - build_omega(w2).M)


def test_as_quat_normalises_and_validates():
    np.testing.assert_allclose(as_quat([2, 0, 0, 0], normalize=True), [1, 0, 0, 0])
    with pytest.raises(InvalidArgumentError):
        as_quat([0, 0, 0, 0], normalize=True)
    with pytest.raises(InvalidArgumentError):
        as_quat([1, 0, 0])
    with pytest.raises(InvalidArgumentError):
        as_quat([1, np.nan, 0, 0])
    with pytest.raises(InvalidArgumentError):
        as_rate([1, 2, 3, 4])


def test_residual_helpers():
    assert orthogonality_residual(np.eye(4)) == 0.0
    assert symplectic_residual(np.eye(4)) == 0.0
    assert orthogonality_residual(2 * np.eye(4)) == pytest.approx(6.0)
