import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wandering.errors import NotContraction, NotHermitian, NotPSD
from wandering.instances import haar_unitary, random_contraction, random_matrix
from wandering.matcore import (as_cmatrix, defect_pair, hermitian_sqrt, operator_class, range_basis,
                               resolve_tol, solve_sandwich)


def test_operator_class_examples():
    assert all(operator_class(np.eye(3)))
    c = operator_class(np.array([[1.0], [0.0]]))
    assert c.isometry and not c.coisometry and not c.unitary and c.contraction
    c = operator_class(np.array([[0.5]]))
    assert c.contraction and not c.isometry
    assert not operator_class(np.array([[1.5]])).contraction


def test_default_tolerance_scales_with_shape():
    assert resolve_tol(None, 3, 5) == pytest.approx(5e-10)
    assert resolve_tol(1e-3, 3, 5) == 1e-3


def test_as_cmatrix_rejects_nonfinite():
    with pytest.raises(ValueError):
        as_cmatrix([[np.nan]])


def test_hermitian_sqrt_examples():
    assert np.allclose(hermitian_sqrt(np.eye(3)), np.eye(3))
    assert np.allclose(hermitian_sqrt(np.diag([4.0, 0.0])), np.diag([2.0, 0.0]))
    with pytest.raises(NotHermitian):
        hermitian_sqrt(np.array([[0, 1], [0, 0]]))
    with pytest.raises(NotPSD):
        hermitian_sqrt(np.diag([1.0, -1e-3]))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**31))
def test_hermitian_sqrt_squares_back(n, seed):
    A = random_matrix(n, n, seed)
    M = A.conj().T @ A
    R = hermitian_sqrt(M)
    assert np.allclose(R, R.conj().T)
    assert np.max(np.abs(R @ R - M)) <= 1e-9 * max(1, np.abs(M).max())


def test_defect_pair_examples():
    D_T, D_Ts, rT, rTs = defect_pair(np.zeros((1, 1)))
    assert np.allclose(D_T, 1) and np.allclose(D_Ts, 1) and rT.shape == (1, 1) and rTs.shape == (1, 1)
    U = haar_unitary(3, 1)
    D_T, D_Ts, rT, rTs = defect_pair(U)
    assert np.allclose(D_T, 0, atol=1e-7) and rT.shape == (3, 0) and rTs.shape == (3, 0)
    D_T, *_ = defect_pair(np.array([[0.5]]))
    assert np.allclose(D_T, np.sqrt(0.75))
    with pytest.raises(NotContraction):
        defect_pair(np.array([[1.1]]))


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**31))
def test_defect_identities(m, n, seed):
    T = random_contraction(m, n, seed=seed)
    D_T, D_Ts, rT, rTs = defect_pair(T)
    assert np.allclose(D_T @ D_T, np.eye(n) - T.conj().T @ T, atol=1e-10)
    # intertwining T D_T = D_T* T
    assert np.allclose(T @ D_T, D_Ts @ T, atol=1e-9)
    assert np.allclose(rT.conj().T @ rT, np.eye(rT.shape[1]))


def test_range_basis_is_orthonormal_and_deterministic(rng):
    X = random_matrix(5, 2, rng) @ random_matrix(2, 4, rng)
    B = range_basis(X)
    assert B.shape == (5, 2)
    assert np.allclose(B.conj().T @ B, np.eye(2))
    assert np.allclose(range_basis(X), B)
    assert np.allclose(B @ B.conj().T @ X, X)


def test_solve_sandwich_examples(rng):
    R = random_matrix(3, 2, rng)
    X, res = solve_sandwich(np.eye(3), R, np.eye(2))
    assert np.allclose(X, R) and res < 1e-12
    X, res = solve_sandwich(np.diag([2.0]), np.diag([8.0]), np.diag([4.0]))
    assert np.allclose(X, 1)
    L, X0, Rt = random_matrix(4, 3, rng), random_matrix(3, 2, rng), random_matrix(2, 5, rng)
    X, res = solve_sandwich(L, L @ X0 @ Rt, Rt)
    assert res <= 1e-10 and np.allclose(X, X0)


def test_solve_sandwich_reports_inconsistency():
    L = np.array([[1.0], [0.0]])
    _, res = solve_sandwich(L, np.array([[0.0], [1.0]]), np.eye(1))
    assert res > 0.5
