import numpy as np
import pytest

from wandering.characteristic import characteristic_series, nagy_foias_dilation
from wandering.errors import TruncationOverflow, YNotWandering
from wandering.fockspace import Embedding
from wandering.instances import block_output, random_row_contraction
from wandering.kernel import (ToeplitzKernel, analyticity_battery, battery_to_dict, check_intertwining,
                              kernel_contractivity, kernel_entry, toeplitz_matrix,
                              verify_toeplitz_structure)
from wandering.transfer import system_matrix
from wandering.words import EMPTY, Word, words_up_to


@pytest.fixture
def pair(rng):
    return nagy_foias_dilation(random_row_contraction(2, 2, seed=rng), 4)


def test_empty_entry_is_D(pair):
    V, i0, j0 = pair
    ker = ToeplitzKernel(V, i0, j0)
    assert np.allclose(kernel_entry(ker, EMPTY, EMPTY), system_matrix(V, i0, j0).D)
    assert ker.entry(EMPTY, EMPTY).shape == (j0.dim, i0.dim)


def test_incomparable_and_prefix_entries(pair):
    ker = ToeplitzKernel(*pair)
    assert np.allclose(ker.entry(Word((1,)), Word((2,))), 0, atol=1e-12)
    w, a = Word((2,)), Word((1, 2))
    assert np.allclose(ker.entry(w + a, w), ker.entry(a, EMPTY), atol=1e-12)
    assert np.allclose(ker.entry(w, w + a), ker.entry(EMPTY, a), atol=1e-12)


def test_structure_on_dilations(rng):
    for n, d in [(1, 1), (2, 2), (1, 3)]:
        ker = ToeplitzKernel(*nagy_foias_dilation(random_row_contraction(n, d, seed=rng), 3))
        assert verify_toeplitz_structure(ker, 3).max_dev <= 1e-10
    half = ToeplitzKernel(*nagy_foias_dilation([np.array([[0.5]])], 3))
    assert verify_toeplitz_structure(half, 3)


def test_budget_overflow(pair):
    ker = ToeplitzKernel(*pair)
    with pytest.raises(TruncationOverflow):
        verify_toeplitz_structure(ker, 5)
    with pytest.raises(TruncationOverflow):
        ker.i_translate(Word((1,) * 5))


def test_battery_passes_on_dilation(pair):
    bat = analyticity_battery(ToeplitzKernel(*pair), 3)
    assert all(r.passed for r in bat.values())
    js = battery_to_dict(bat)
    assert set(js) == {"c1", "c2", "c3", "c4", "c5", "c6"}
    assert js["c1"]["pass"] is True


def test_length_two_block_breaks_c1(pair):
    V, i0, _ = pair
    alpha = Word((2, 1))
    ker = ToeplitzKernel(V, i0, block_output(V, alpha, [0]))
    bat = analyticity_battery(ker, 2, 1e-8)
    assert not bat["c1"] and bat["c1"].witness == alpha
    assert not bat["c3"]
    assert not bat["c6"]


def test_whole_space_as_output():
    # Y0 = everything: not wandering, c1 fails, and c6 holds trivially (P = I)
    V, i0, _ = nagy_foias_dilation([np.array([[0.5]])], 4)
    ker = ToeplitzKernel(V, i0, Embedding(np.eye(V.dim)))
    bat = analyticity_battery(ker, 2)
    assert not bat["c1"]
    assert bat["c6"].passed is not False


def test_internal_space_as_output():
    # Y0 = H sees no U-translates, so c1 holds, yet H is not wandering
    V, i0, _ = nagy_foias_dilation([np.array([[0.5]])], 4)
    ker = ToeplitzKernel(V, i0, Embedding(V.internal))
    assert analyticity_battery(ker, 2)["c1"]


def test_toeplitz_matrix_contractive_and_intertwines(pair):
    ker = ToeplitzKernel(*pair)
    M = toeplitz_matrix(ker, 2)
    assert np.linalg.norm(M, 2) <= 1 + 1e-10
    assert check_intertwining(ker, 2).max_dev <= 1e-10
    assert kernel_contractivity(ker, 2)


def test_toeplitz_matrix_needs_wandering_output():
    V, i0, _ = nagy_foias_dilation([np.array([[0.5]])], 4)
    ker = ToeplitzKernel(V, i0, Embedding(V.internal))
    with pytest.raises(YNotWandering):
        toeplitz_matrix(ker, 2)


def test_scalar_symbol_matches_series():
    ker = ToeplitzKernel(*nagy_foias_dilation([np.array([[0.5]])], 4))
    M = toeplitz_matrix(ker, 3)
    F = characteristic_series([np.array([[0.5]])], 3)
    words = words_up_to(1, 3)
    # lower-triangular Toeplitz: entry (s, w) = theta_{|s| - |w|}
    for i, s in enumerate(words):
        for j, w in enumerate(words):
            expected = F[Word((1,) * (i - j))][0, 0] if i >= j else 0
            assert M[i, j] == pytest.approx(expected, abs=1e-12)
