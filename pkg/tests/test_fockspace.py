import numpy as np
import pytest
import scipy.sparse as sp

from wandering.characteristic import nagy_foias_dilation, rotation_system
from wandering.errors import DepthTooSmall, NotCoisometry, TruncationOverflow
from wandering.fockspace import (Embedding, GradedSpace, RowIsometryTrunc, apply_word,
                                 check_internal_decomposition, check_row_isometry,
                                 dilation_row_isometry, internal_complement, is_wandering)
from wandering.instances import random_row_contraction
from wandering.transfer import SystemMatrix, system_matrix
from wandering.words import EMPTY, Word, words_up_to


def scalar_dilation(t, N=4):
    return dilation_row_isometry(rotation_system([np.array([[t]])]), N)


def test_graded_space_blocks_tile():
    G = GradedSpace(2, 3, 2, 2)
    starts = sorted((G.block(w).start, G.block(w).stop) for w in G.words)
    assert starts[0][0] == 2 and starts[-1][1] == G.total_dim
    assert all(a[1] == b[0] for a, b in zip(starts, starts[1:]))
    assert list(G.words) == words_up_to(2, 2)
    assert G.level_dim(0) == 2 and G.level_dim(1) == 5 and G.level_dim(3) == G.total_dim


def test_zero_contraction_gives_truncated_shift():
    V, i0 = scalar_dilation(0.0, N=3)
    M = V.mats[0].toarray()
    # H is decoupled (A = 0, B = 0 so V h = i0(1 h) moves H into the first block)
    shift = np.zeros((5, 5))
    shift[1, 0] = 1
    for j in range(1, 4):
        shift[j + 1, j] = 1
    assert np.allclose(M, shift)
    assert check_row_isometry(V).max_dev <= 1e-12


def test_half_recovers_T_star_block():
    V, i0 = scalar_dilation(0.5)
    H = V.internal
    A = H.conj().T @ V.apply_adjoint(1, H)
    assert np.allclose(A, 0.5)


def test_not_coisometry_and_depth():
    bad = SystemMatrix([np.array([[0.5]])], [np.array([[0.5]])], np.array([[0.5]]), np.array([[0.5]]))
    with pytest.raises(NotCoisometry):
        dilation_row_isometry(bad, 2)
    with pytest.raises(DepthTooSmall):
        dilation_row_isometry(rotation_system([np.array([[0.5]])]), 0)


@pytest.mark.parametrize("n,d", [(1, 2), (2, 2), (2, 3), (3, 1)])
def test_dilations_are_row_isometries(n, d, rng):
    T = random_row_contraction(n, d, seed=rng)
    V, i0, j0 = nagy_foias_dilation(T, 3)
    assert check_row_isometry(V).max_dev <= 1e-10
    assert all(check_internal_decomposition(V, i0))
    assert is_wandering(V, i0, 3)
    C = internal_complement(V, i0)
    assert np.allclose(C @ C.conj().T, V.internal @ V.internal.conj().T, atol=1e-8)


def test_scaled_isometry_is_detected():
    V, i0 = scalar_dilation(0.5)
    bad = RowIsometryTrunc((V.mats[0] * 0.9,), V.levels, V.internal, V.space)
    r = check_row_isometry(bad)
    assert not r and r.max_dev == pytest.approx(0.19, abs=1e-12)


def test_apply_word_moves_blocks_and_preserves_norm(rng):
    T = random_row_contraction(2, 2, seed=rng)
    V, i0, _ = nagy_foias_dilation(T, 4)
    sp_ = V.space
    beta = Word((2,))
    x = np.zeros(V.dim, dtype=complex)
    x[sp_.block(beta)] = rng.normal(size=sp_.dimU)
    y = apply_word(V, Word((1,)), x)
    assert np.allclose(y[sp_.block(Word((1, 2)))], x[sp_.block(beta)])
    assert np.isclose(np.linalg.norm(y), np.linalg.norm(x))
    assert np.allclose(apply_word(V, EMPTY, x), x)
    z = rng.normal(size=V.dim)
    assert np.isclose(np.linalg.norm(apply_word(V, Word((1, 2)), V.levels[2] @ (V.levels[2].T @ z))),
                      np.linalg.norm(V.levels[2] @ (V.levels[2].T @ z)))


def test_apply_word_overflow():
    V, i0 = scalar_dilation(0.5, N=2)
    with pytest.raises(TruncationOverflow):
        apply_word(V, Word((1, 1, 1)), i0.J[:, 0])


def test_internal_space_is_not_wandering():
    V, _ = scalar_dilation(0.5)
    r = is_wandering(V, V.internal, 2)
    assert not r and r.witness is not None


def test_embedding_rejects_non_isometry():
    with pytest.raises(ValueError):
        Embedding(np.array([[1.0], [1.0]]))


def test_levels_are_sparse_and_orthonormal():
    V, _ = scalar_dilation(0.3)
    for L in V.levels:
        L = L.toarray() if sp.issparse(L) else L
        assert np.allclose(L.conj().T @ L, np.eye(L.shape[1]))


def test_system_matrix_of_empty_output(rng):
    T = random_row_contraction(2, 1, seed=rng)
    V, i0, _ = nagy_foias_dilation(T, 2)
    empty = Embedding(np.zeros((V.dim, 0)))
    S = system_matrix(V, i0, empty)
    assert S.C.shape == (0, 2) and S.D.shape == (0, i0.dim)
