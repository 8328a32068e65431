import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wandering.characteristic import (RowContraction, characteristic_series, nagy_foias_dilation,
                                      pair_geometry_residual, rotation_system)
from wandering.errors import NotContraction
from wandering.instances import haar_unitary, random_row_contraction
from wandering.kernel import ToeplitzKernel, analyticity_battery
from wandering.transfer import series_coefficient, system_matrix, verify_realization
from wandering.words import EMPTY, Word, words_up_to


def test_zero_scalar_is_swap():
    assert np.allclose(rotation_system([np.zeros((1, 1))]).sigma(), [[0, 1], [1, 0]])


def test_half_rotation():
    r = np.sqrt(0.75)
    sig = rotation_system([np.array([[0.5]])]).sigma()
    assert np.allclose(sig, [[0.5, r], [r, -0.5]])
    assert np.allclose(sig @ sig.conj().T, np.eye(2))


def test_unitary_has_empty_defects():
    U = haar_unitary(3, 4)
    S = rotation_system([U])
    assert S.dims == (3, 0, 0)
    assert np.allclose(S.A[0], U.conj().T)
    assert series_coefficient(S, EMPTY).shape == (0, 0)


def test_not_contraction():
    with pytest.raises(NotContraction):
        RowContraction([np.eye(2), 0.5 * np.eye(2)])


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(1, 3), st.integers(0, 2**31))
def test_rotation_is_unitary(n, d, seed):
    sig = rotation_system(random_row_contraction(n, d, seed=seed)).sigma()
    assert np.max(np.abs(sig @ sig.conj().T - np.eye(sig.shape[0]))) <= 1e-10
    assert np.max(np.abs(sig.conj().T @ sig - np.eye(sig.shape[1]))) <= 1e-10


def test_scalar_series():
    t = 0.5
    F = characteristic_series([np.array([[t]])], 4)
    assert F[EMPTY][0, 0] == pytest.approx(-t)
    for n in range(1, 5):
        assert F[Word((1,) * n)][0, 0] == pytest.approx((1 - t * t) * t ** (n - 1))


def test_row_shift_symbol():
    # T = (0, 0) on C: coefficient of letter k is the k-th unit row
    F = characteristic_series([np.zeros((1, 1)), np.zeros((1, 1))], 2)
    assert np.allclose(F[EMPTY], 0)
    C1, C2 = F[Word((1,))], F[Word((2,))]
    assert C1.shape == (1, 2)
    assert np.allclose(np.vstack([C1, C2]) @ np.vstack([C1, C2]).conj().T, np.eye(2))
    assert np.allclose(C1 @ C2.conj().T, 0)
    for w in words_up_to(2, 2)[3:]:
        assert np.allclose(F[w], 0)


@pytest.mark.parametrize("n,d", [(1, 1), (2, 2), (3, 1), (1, 3)])
def test_dilation_end_to_end(n, d, rng):
    T = RowContraction(random_row_contraction(n, d, seed=rng))
    V, i0, j0 = nagy_foias_dilation(T, 4)
    S = system_matrix(V, i0, j0)
    for k in range(d):
        assert np.allclose(S.A[k], T.T[k].conj().T)
    assert verify_realization(V, i0, j0, 3).max_dev <= 1e-10
    F = characteristic_series(T, 3)
    for w in words_up_to(d, 3):
        assert np.allclose(series_coefficient(S, w), F[w], atol=1e-12)
    assert all(r.passed for r in analyticity_battery(ToeplitzKernel(V, i0, j0), 3).values())
    assert pair_geometry_residual(V, j0) <= 1e-10
