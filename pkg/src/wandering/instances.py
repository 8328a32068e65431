"""Random and hand-built instances used by the tests and the CLI examples."""

from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group

from .fockspace import Embedding
from .lifting import LiftingSplit
from .markov import Interaction, householder_complement
from .matcore import spectral_norm
from .words import Word


def rng_of(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def haar_unitary(n: int, seed=None) -> np.ndarray:
    if n == 1:
        return np.exp(2j * np.pi * rng_of(seed).random()) * np.ones((1, 1))
    return unitary_group.rvs(n, random_state=rng_of(seed))


def random_matrix(rows: int, cols: int, seed=None) -> np.ndarray:
    rng = rng_of(seed)
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


def random_contraction(rows: int, cols: int | None = None, norm: float | None = None,
                       seed=None) -> np.ndarray:
    """Gaussian matrix rescaled to spectral norm ``norm`` (uniform in [0.2, 0.95] if omitted)."""
    rng = rng_of(seed)
    cols = rows if cols is None else cols
    G = random_matrix(rows, cols, rng)
    if norm is None:
        norm = rng.uniform(0.2, 0.95)
    s = spectral_norm(G)
    return G * (norm / s) if s > 0 else G


def random_row_contraction(n: int, d: int, norm: float | None = None, seed=None) -> tuple:
    row = random_contraction(n, n * d, norm, seed)
    return tuple(row[:, k * n:(k + 1) * n] for k in range(d))


def random_lifting(dimS: int, dimR: int, d: int = 1, seed=None):
    """Lifting built from strict row contractions ``S``, ``R`` and a random contraction ``g0``.

    Returns:
        ``(L, g0)`` with ``Q = D_{R*} g0* D_S`` in defect-range coordinates.
    """
    rng = rng_of(seed)
    S = random_row_contraction(dimS, d, seed=rng)
    R = random_row_contraction(dimR, d, seed=rng)
    probe = LiftingSplit.from_blocks(S, tuple(np.zeros((dimR, dimS)) for _ in range(d)), R)
    D_S, RS, D_Rs, RRs, _ = probe.defects
    g0 = random_contraction(RS.shape[1], RRs.shape[1], seed=rng)
    Q = D_Rs @ RRs @ g0.conj().T @ RS.conj().T @ D_S
    blocks = tuple(Q[:, k * dimS:(k + 1) * dimS] for k in range(d))
    return LiftingSplit.from_blocks(S, blocks, R), g0


def _completed(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.column_stack([v, householder_complement(v)])


def vacuum_interaction(dimH: int = 2, dimK: int = 2, seed=None, random_vacuum: bool = False):
    """Random unitary fixing ``Omega_H (x) Omega_K``: ``Q_out (1 + W) Q_in*``.

    With ``random_vacuum`` the reference vectors are random unit vectors,
    otherwise the first basis vectors.
    """
    rng = rng_of(seed)

    def unit(n):
        if not random_vacuum:
            return np.eye(n, dtype=complex)[0]
        v = random_matrix(n, 1, rng).ravel()
        return v / np.linalg.norm(v)

    oH, oK, oP = unit(dimH), unit(dimK), unit(dimK)
    n = dimH * dimK
    W = haar_unitary(n - 1, rng) if n > 1 else np.zeros((0, 0))
    core = np.eye(n, dtype=complex)
    core[1:, 1:] = W
    U = _completed(np.kron(oH, oP)) @ core @ _completed(np.kron(oH, oK)).conj().T
    return Interaction(U, dimH, dimK, dimK, oH, oK, oP)


def swap_interaction() -> Interaction:
    """Swap on ``C^2 (x) C^2`` with every reference vector equal to ``e_1``."""
    S = np.zeros((4, 4))
    for a in range(2):
        for b in range(2):
            S[b * 2 + a, a * 2 + b] = 1
    e = np.array([1.0, 0.0])
    return Interaction(S, 2, 2, 2, e, e, e)


def identity_interaction(dimH: int = 2, d: int = 2) -> Interaction:
    eH, eK = np.eye(dimH)[0], np.eye(d)[0]
    return Interaction(np.eye(dimH * d), dimH, d, d, eH, eK, eK)


def violating_interaction(angle: float = 0.7) -> Interaction:
    """Rotation moving ``e_1 (x) Omega_K`` into ``e_2 (x) P``; breaks the hypothesis for ``H_S = C e_1``.

    Only ``Omega_K`` is set, since the rotation fixes no vacuum.
    """
    U = np.eye(4, dtype=complex)
    c, s = np.cos(angle), np.sin(angle)
    # kron index of (h, k) is 2h + k; rotate (0, 0) with (1, 0)
    U[np.ix_([0, 2], [0, 2])] = [[c, -s], [s, c]]
    return Interaction(U, 2, 2, 2, omegaK=np.array([1.0, 0.0]))


def block_output(V, alpha, cols=None) -> Embedding:
    """Columns of the fiber block ``U_alpha`` of a dilation space as an output embedding.

    Translates land in distinct blocks so the subspace is wandering, and
    for nonempty ``alpha`` it sits outside ``H + U_0``.
    """
    J = V.space.block_embedding(Word(alpha))
    if cols is not None:
        J = J[:, list(cols)]
    return Embedding(J, V.space)
