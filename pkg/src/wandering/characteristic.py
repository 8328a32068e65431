"""Characteristic functions of (row) contractions and the dilation that realizes them.

For a row contraction ``T = [T_1 ... T_d]: H^d -> H`` the rotation system is

    [[T*,        D_T ],
     [D_{T*},    -T  ]]  : H + D_T  ->  H^d + D_{T*}

with the defect spaces represented by orthonormal bases of the numerical
ranges of ``D_T = sqrt(I - T*T)`` and ``D_{T*} = sqrt(I - TT*)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotContraction
from .fockspace import DEFAULT_DEPTH, Embedding, dilation_output_embedding, dilation_row_isometry
from .matcore import as_cmatrix, defect_pair, spectral_norm
from .transfer import FormalSeries, SystemMatrix, formal_series


@dataclass(frozen=True, eq=False)
class RowContraction:
    """``d`` square blocks ``T_k`` on ``H`` whose row ``[T_1 ... T_d]`` is a contraction."""

    T: tuple
    tol: float = 1e-10

    def __post_init__(self):
        blocks = self.T
        if isinstance(blocks, np.ndarray) and blocks.ndim == 2:
            blocks = (blocks,)
        blocks = tuple(as_cmatrix(t) for t in blocks)
        if not blocks:
            raise ValueError("need at least one block")
        n = blocks[0].shape[0]
        for t in blocks:
            if t.shape != (n, n):
                raise ValueError(f"blocks must all be {n}x{n}, got {t.shape}")
        object.__setattr__(self, "T", blocks)
        norm = spectral_norm(self.row)
        if norm > 1 + self.tol * max(1, n * len(blocks)):
            raise NotContraction(f"row norm {norm:.12g} exceeds 1")

    @property
    def d(self) -> int:
        return len(self.T)

    @property
    def dimH(self) -> int:
        return self.T[0].shape[0]

    @property
    def row(self) -> np.ndarray:
        return np.hstack(self.T)

    def defects(self):
        return defect_pair(self.row, self.tol * max(1, self.dimH * self.d))


def _as_row(T) -> RowContraction:
    return T if isinstance(T, RowContraction) else RowContraction(T)


def rotation_system(T) -> SystemMatrix:
    """Rotation system of ``T`` on the defect-range coordinates.

    ``A_k = T_k*``, ``B_k`` is the ``k``-th block row of ``D_T`` restricted
    to its range, ``C = D_{T*}`` and ``D = -T`` compressed to the ranges.
    """
    T = _as_row(T)
    n = T.dimH
    D_T, D_Ts, RU, RY = T.defects()
    DTU = D_T @ RU
    A = tuple(t.conj().T for t in T.T)
    B = tuple(DTU[k * n:(k + 1) * n, :] for k in range(T.d))
    C = RY.conj().T @ D_Ts
    D = -RY.conj().T @ T.row @ RU
    return SystemMatrix(A, B, C, D)


def characteristic_series(T, degree: int) -> FormalSeries:
    """Coefficients of ``-T + D_{T*} (I - Z T*)^{-1} Z D_T`` up to ``degree``."""
    return formal_series(rotation_system(T), degree)


def nagy_foias_dilation(T, N: int = DEFAULT_DEPTH):
    """Minimal isometric dilation of ``T`` truncated at depth ``N`` with its input/output pair.

    Returns:
        ``(V, i0, j0)`` where ``i0`` embeds the defect space of ``T`` as the
        first fiber block and ``j0 = (I_H + i0) Sigma*|_Y``.
    """
    S = rotation_system(T)
    V, i0 = dilation_row_isometry(S, N)
    j0 = dilation_output_embedding(V, i0, S)
    return V, i0, j0


def pair_geometry_residual(V, j0: Embedding) -> float:
    """Size of the overlap between ``V_k H`` and ``j0(Y)``; zero for coisometric systems."""
    worst = 0.0
    for k in range(1, V.d + 1):
        img = V.apply(k, V.internal)
        G = j0.J.conj().T @ img
        if G.size:
            worst = max(worst, float(np.max(np.abs(G))))
    return worst
