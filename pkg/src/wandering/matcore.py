"""Dense complex matrix utilities.

Operator class checks, Hermitian square roots, defect operators, numerically
ranked ranges and pseudoinverse solves.  A ``tol`` of ``None`` means the
default absolute slack ``1e-10 * max(rows, cols)``.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import NotContraction, NotHermitian, NotPSD

DEFAULT_ATOL = 1e-10


def resolve_tol(tol: float | None, *shape: int) -> float:
    if tol is not None:
        if tol < 0:
            raise ValueError("tolerance must be nonnegative")
        return float(tol)
    return DEFAULT_ATOL * max((1,) + tuple(shape))


def as_cmatrix(M) -> np.ndarray:
    """Coerce to a 2-D complex array, rejecting NaN/Inf."""
    M = np.asarray(M, dtype=complex)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    elif M.ndim == 1:
        M = M.reshape(-1, 1)
    elif M.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def max_abs(M) -> float:
    M = np.asarray(M)
    return float(np.max(np.abs(M))) if M.size else 0.0


def argmax_entry(M):
    """``(row, col)`` of the largest-modulus entry, or ``None`` for an empty matrix."""
    M = np.atleast_2d(np.asarray(M))
    if not M.size:
        return None
    i, j = np.unravel_index(int(np.argmax(np.abs(M))), M.shape)
    return int(i), int(j)


def spectral_norm(M) -> float:
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def adjoint(M) -> np.ndarray:
    return np.asarray(M).conj().T


class OperatorClass(NamedTuple):
    isometry: bool
    coisometry: bool
    unitary: bool
    contraction: bool


def operator_class(M, tol: float | None = None) -> OperatorClass:
    M = as_cmatrix(M)
    atol = resolve_tol(tol, *M.shape)
    m, n = M.shape
    iso = max_abs(M.conj().T @ M - np.eye(n)) <= atol
    coiso = max_abs(M @ M.conj().T - np.eye(m)) <= atol
    contr = spectral_norm(M) <= 1 + atol
    return OperatorClass(iso, coiso, iso and coiso, contr)


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    # make the largest-magnitude entry of each column real positive
    if vecs.size == 0:
        return vecs
    idx = np.argmax(np.abs(vecs), axis=0)
    pivots = vecs[idx, np.arange(vecs.shape[1])]
    phases = np.where(np.abs(pivots) > 0, pivots / np.abs(pivots), 1.0)
    return vecs / phases


def _hermitian_eig(M, atol):
    M = as_cmatrix(M)
    if M.shape[0] != M.shape[1]:
        raise NotHermitian(f"matrix is not square: {M.shape}")
    dev = max_abs(M - M.conj().T)
    if dev > atol:
        raise NotHermitian(f"max |M - M*| = {dev:.3e} exceeds {atol:.3e}")
    w, v = np.linalg.eigh((M + M.conj().T) / 2)
    return w, _fix_phases(v)


def hermitian_sqrt(M, tol: float | None = None) -> np.ndarray:
    """Positive semidefinite square root of a Hermitian PSD matrix.

    Eigenvalues in ``[-atol, atol]`` are clamped to zero, so a numerically
    zero defect gets an exactly zero root instead of a ``1e-8`` haze.

    Raises:
        NotHermitian: ``M`` is not square or not Hermitian within atol.
        NotPSD: an eigenvalue lies below ``-atol``.
    """
    M = as_cmatrix(M)
    atol = resolve_tol(tol, *M.shape)
    w, v = _hermitian_eig(M, atol)
    if w.size and w.min() < -atol:
        raise NotPSD(f"eigenvalue {w.min():.3e} below -{atol:.3e}")
    w = np.where(w <= atol, 0.0, w)
    return (v * np.sqrt(w)) @ v.conj().T


def range_basis(M, tol: float | None = None) -> np.ndarray:
    """Orthonormal column basis of the numerical range of ``M``.

    Keeps left singular vectors with singular value ``> atol * s_max``; the
    result may have zero columns.
    """
    M = as_cmatrix(M)
    atol = resolve_tol(tol, *M.shape)
    if M.size == 0:
        return np.zeros((M.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(M, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((M.shape[0], 0), dtype=complex)
    rank = int(np.sum(s > atol * s[0]))
    return _fix_phases(u[:, :rank])


def orthogonal_complement(B) -> np.ndarray:
    """Orthonormal basis of the complement of the span of the orthonormal columns ``B``."""
    B = np.asarray(B, dtype=complex)
    P = np.eye(B.shape[0]) - B @ B.conj().T
    return range_basis(P, 1e-8)


class DefectPair(NamedTuple):
    D_T: np.ndarray
    D_Tstar: np.ndarray
    ran_T: np.ndarray
    ran_Tstar: np.ndarray


def defect_pair(T, tol: float | None = None) -> DefectPair:
    """Defect operators ``sqrt(I - T*T)``, ``sqrt(I - TT*)`` and bases of their ranges.

    ``T`` may be rectangular (a row contraction ``H^d -> H``), in which case
    the first defect acts on the domain and the second on the codomain.
    """
    T = as_cmatrix(T)
    atol = resolve_tol(tol, *T.shape)
    m, n = T.shape
    norm = spectral_norm(T)
    if norm > 1 + atol:
        raise NotContraction(f"largest singular value {norm:.12g} exceeds 1")
    D_T = hermitian_sqrt(np.eye(n) - T.conj().T @ T, atol)
    D_Ts = hermitian_sqrt(np.eye(m) - T @ T.conj().T, atol)
    return DefectPair(D_T, D_Ts, range_basis(D_T, atol), range_basis(D_Ts, atol))


def pinv(M, tol: float | None = None) -> np.ndarray:
    M = as_cmatrix(M)
    atol = resolve_tol(tol, *M.shape)
    if M.size == 0:
        return np.zeros((M.shape[1], M.shape[0]), dtype=complex)
    return np.linalg.pinv(M, rtol=atol)


def solve_sandwich(L, Rhs, Rt, tol: float | None = None) -> tuple[np.ndarray, float]:
    """Least-norm ``X`` with ``L @ X @ Rt ~= Rhs``, plus the max-entry residual."""
    L, Rhs, Rt = as_cmatrix(L), as_cmatrix(Rhs), as_cmatrix(Rt)
    if L.shape[0] != Rhs.shape[0] or Rt.shape[1] != Rhs.shape[1]:
        raise ValueError(f"shape mismatch: L{L.shape} X Rt{Rt.shape} vs Rhs{Rhs.shape}")
    X = pinv(L, tol) @ Rhs @ pinv(Rt, tol)
    return X, max_abs(L @ X @ Rt - Rhs)


def project_out(basis, X) -> np.ndarray:
    """Component of ``X`` orthogonal to the span of the orthonormal columns ``basis``."""
    return X - basis @ (basis.conj().T @ X)
