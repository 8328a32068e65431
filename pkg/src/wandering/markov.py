"""Row isometries and transfer functions of repeated interactions.

An interaction is a unitary ``U: H (x) K -> H (x) P`` with ``d = dim P``.
The chain space is ``H (x) K_1 (x) ... (x) K_N`` truncated at ``N`` slots,
where a vector is at level ``n`` when slots ``n+1 .. N`` hold the reference
unit vector ``Omega_K``.  The row isometry is

    V_k (xi (x) eta) = U_1* (xi (x) e_k (x) eta),

with ``eta`` pushed one slot to the right.  Tensor order is ``H`` first,
then slots ``1..N``, matching ``numpy.kron``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.sparse as sp

from .errors import DepthTooSmall, NoVacuum, ValidationError
from .fockspace import DEFAULT_DEPTH, Embedding, RowIsometryTrunc, is_wandering
from .matcore import as_cmatrix, max_abs, operator_class, range_basis
from .report import CheckResult
from .transfer import SystemMatrix

MAX_CHAIN_DIM = 4096


def householder_complement(v) -> np.ndarray:
    """Orthonormal basis of ``v``-perp from the Householder reflection sending ``v`` to ``e_1``."""
    v = np.asarray(v, dtype=complex).ravel()
    v = v / np.linalg.norm(v)
    pivot = v[0]
    phase = pivot / abs(pivot) if abs(pivot) > 0 else 1.0
    w = v.copy()
    w[0] += phase
    Hh = np.eye(v.size, dtype=complex) - 2 * np.outer(w, w.conj()) / np.vdot(w, w).real
    return Hh[:, 1:]


def _unit(v, name, tol):
    if v is None:
        return None
    v = np.asarray(v, dtype=complex).ravel()
    if abs(np.linalg.norm(v) - 1) > tol:
        raise ValidationError(f"{name} is not a unit vector (norm {np.linalg.norm(v):.12g})")
    return v


def _kron_all(factors):
    return reduce(np.kron, factors, np.ones(1, dtype=complex))


@dataclass(frozen=True, eq=False)
class Interaction:
    """Unitary ``U`` from ``H (x) K`` to ``H (x) P`` plus optional reference vectors.

    ``basisP`` holds the orthonormal basis ``e_1 .. e_d`` of ``P`` as columns
    (identity by default).  Finite-dimensional unitarity forces ``dim K = dim P``.
    """

    U: np.ndarray
    dimH: int
    dimK: int
    dimP: int
    omegaH: np.ndarray | None = None
    omegaK: np.ndarray | None = None
    omegaP: np.ndarray | None = None
    basisP: np.ndarray | None = None
    tol: float = 1e-10

    def __post_init__(self):
        U = as_cmatrix(self.U)
        if self.dimK != self.dimP:
            raise ValidationError(f"a unitary needs dim K == dim P, got {self.dimK} and {self.dimP}")
        n = self.dimH * self.dimK
        if U.shape != (n, n):
            raise ValidationError(f"U must be {n}x{n} for dimH={self.dimH}, dimK={self.dimK}, got {U.shape}")
        if not operator_class(U, self.tol * max(1, n)).unitary:
            raise ValidationError("U is not unitary")
        object.__setattr__(self, "U", U)
        for name, dim in (("omegaH", self.dimH), ("omegaK", self.dimK), ("omegaP", self.dimP)):
            v = _unit(getattr(self, name), name, 1e-8)
            if v is not None and v.size != dim:
                raise ValidationError(f"{name} has length {v.size}, expected {dim}")
            object.__setattr__(self, name, v)
        basis = np.eye(self.dimP, dtype=complex) if self.basisP is None else as_cmatrix(self.basisP)
        if basis.shape != (self.dimP, self.dimP) or not operator_class(basis, 1e-8).unitary:
            raise ValidationError("basisP must be an orthonormal basis of P")
        object.__setattr__(self, "basisP", basis)

    @property
    def d(self) -> int:
        return self.dimP

    def vacuum_defect(self) -> float:
        """``||U(Omega_H (x) Omega_K) - Omega_H (x) Omega_P||``; inf when a vector is missing."""
        if self.omegaH is None or self.omegaK is None or self.omegaP is None:
            return float("inf")
        lhs = self.U @ np.kron(self.omegaH, self.omegaK)
        return float(np.linalg.norm(lhs - np.kron(self.omegaH, self.omegaP)))

    def require_vacuum(self, tol: float = 1e-8) -> None:
        dev = self.vacuum_defect()
        if dev > tol:
            raise NoVacuum("vacuum vectors missing" if dev == float("inf")
                           else f"U does not fix the vacuum (defect {dev:.3e})")

    def require_omegaK(self) -> np.ndarray:
        if self.omegaK is None:
            raise NoVacuum("omegaK is required to build the chain space")
        return self.omegaK

    def input_fiber(self) -> np.ndarray:
        """Basis of ``Omega_K``-perp in ``K`` (Householder completion)."""
        return householder_complement(self.require_omegaK())

    def output_fiber(self) -> np.ndarray:
        """Basis of ``Y = Omega_P``-perp in ``P``."""
        if self.omegaP is None:
            raise NoVacuum("omegaP is required for the output space")
        return householder_complement(self.omegaP)


def chain_dim(I: Interaction, N: int) -> int:
    return I.dimH * I.dimK ** N


def _check_depth(I, N, max_dim):
    if N < 1:
        raise DepthTooSmall(f"chain depth must be >= 1, got {N}")
    if chain_dim(I, N) > max_dim:
        raise ValidationError(f"chain space dimension {chain_dim(I, N)} exceeds cap {max_dim}")


def vacuum_tail(I: Interaction, m: int) -> np.ndarray:
    """``Omega_K`` tensored ``m`` times, as a vector."""
    return _kron_all([I.require_omegaK()] * m)


def chain_row_isometry(I: Interaction, N: int = DEFAULT_DEPTH, max_dim: int = MAX_CHAIN_DIM):
    """The truncated row isometry on ``H (x) K^N``; needs only ``Omega_K``."""
    _check_depth(I, N, max_dim)
    omega = I.require_omegaK()
    d, dimH = I.d, I.dimH
    rest = d ** (N - 1)
    drop = sp.kron(sp.identity(dimH * rest, dtype=complex, format="csr"),
                   sp.csr_array(omega.conj()[None, :]), format="csr")
    Ustar = sp.kron(sp.csr_array(I.U.conj().T), sp.identity(rest, dtype=complex, format="csr"),
                    format="csr")
    mats = []
    for k in range(d):
        ek = I.basisP[:, k]
        insert = sp.kron(sp.kron(sp.identity(dimH, dtype=complex), sp.csr_array(ek[:, None])),
                         sp.identity(rest, dtype=complex), format="csr")
        mats.append(sp.csr_array(Ustar @ insert @ drop))
    levels = []
    for n in range(N + 1):
        tail = vacuum_tail(I, N - n)
        levels.append(sp.kron(sp.identity(dimH * d ** n, dtype=complex),
                              sp.csr_array(tail[:, None]), format="csr"))
    internal = levels[0].toarray()
    return RowIsometryTrunc(tuple(mats), tuple(levels), internal, None)


def markov_input_embedding(I: Interaction, N: int) -> Embedding:
    """``U_0 = H (x) Omega_K-perp`` in slot 1, vacuum in slots ``2..N``."""
    J = np.kron(np.kron(np.eye(I.dimH), I.input_fiber()), vacuum_tail(I, N - 1)[:, None])
    return Embedding(J)


def markov_output_embedding(I: Interaction, N: int) -> Embedding:
    """``Y_0 = U_1* (Omega_H (x) Omega_P-perp)`` in slots ``0..1``, vacuum after."""
    if I.omegaH is None:
        raise NoVacuum("omegaH is required for the output embedding")
    first = I.U.conj().T @ np.kron(I.omegaH[:, None], I.output_fiber())
    return Embedding(np.kron(first, vacuum_tail(I, N - 1)[:, None]))


def markov_row_isometry(I: Interaction, N: int = DEFAULT_DEPTH, max_dim: int = MAX_CHAIN_DIM):
    """``(V, i0, j0)`` for an interaction with vacuum vectors.

    Raises:
        NoVacuum: a reference vector is missing or ``U`` does not fix the vacuum.
    """
    I.require_vacuum()
    V = chain_row_isometry(I, N, max_dim)
    return V, markov_input_embedding(I, N), markov_output_embedding(I, N)


def markov_system(I: Interaction) -> SystemMatrix:
    """System matrix read straight off ``U``.

    With ``H (x) K = H + U`` via ``h -> h (x) Omega_K`` and the input fiber,
    ``U(h + u) = sum_k (A_k h + B_k u) (x) e_k`` and the ``Omega_H (x) Y``
    component of ``U(h + u)`` is ``C h + D u``.
    """
    I.require_vacuum()
    IH = np.eye(I.dimH)
    from_h = I.U @ np.kron(IH, I.omegaK[:, None])
    from_u = I.U @ np.kron(IH, I.input_fiber())
    A, B = [], []
    for k in range(I.d):
        read = np.kron(IH, I.basisP[:, k].conj()[None, :])
        A.append(read @ from_h)
        B.append(read @ from_u)
    out = np.kron(I.omegaH.conj()[None, :], I.output_fiber().conj().T)
    return SystemMatrix(tuple(A), tuple(B), out @ from_h, out @ from_u)


def repeated_interaction(I: Interaction, r: int, slots: int) -> np.ndarray:
    """``U(r) = U_r ... U_1`` on ``H (x) K^slots``, with ``U_l`` acting on ``H`` and slot ``l``."""
    if not 0 <= r <= slots:
        raise ValueError("need 0 <= r <= slots")
    dimH, d = I.dimH, I.dimK
    total = dimH * d ** slots
    out = np.eye(total, dtype=complex)
    shape = (dimH,) + (d,) * slots
    Ut = I.U.reshape(dimH, d, dimH, d)
    for ell in range(1, r + 1):
        # contract U over (H, slot ell) of every column
        X = out.reshape(shape + (total,))
        X = np.moveaxis(X, ell, 1)
        X = np.einsum("abce,ce...->ab...", Ut, X)
        X = np.moveaxis(X, 1, ell)
        out = X.reshape(total, total)
    return out


def prop_output_space(I: Interaction, HS_basis, N: int) -> np.ndarray:
    """Basis of ``U_1*(H_S (x) P_1)`` minus ``H_S (x) Omega_K``, padded with vacuum."""
    HS = as_cmatrix(HS_basis)
    G = np.kron(I.U.conj().T @ np.kron(HS, np.eye(I.dimP)), vacuum_tail(I, N - 1)[:, None])
    base = np.kron(HS, vacuum_tail(I, N)[:, None])
    X = G - base @ (base.conj().T @ G)
    return range_basis(X, 1e-10) if X.shape[1] else X


def prop_wandering_check(I: Interaction, HS_basis, Y0_basis, N: int = DEFAULT_DEPTH,
                         tol: float = 1e-10) -> list:
    """Sub-checks of the wandering criterion, reported separately.

    (i)   ``U(H_S (x) Omega_K)`` inside ``H_S (x) P`` (witness: column of ``H_S``);
    (ii)  ``Y_0`` inside ``U_1*(H_S (x) P_1)`` and orthogonal to ``H_S (x) Omega_K``;
    (iii) ``Y_0`` wandering for words up to length ``N - 1``.
    """
    HS = as_cmatrix(HS_basis)
    Y0 = Y0_basis.J if isinstance(Y0_basis, Embedding) else as_cmatrix(Y0_basis)
    omega = I.require_omegaK()
    img = I.U @ np.kron(HS, omega[:, None])
    target = np.kron(HS, np.eye(I.dimP))
    res = img - target @ (target.conj().T @ img)
    col = int(np.argmax(np.linalg.norm(res, axis=0))) if res.size else None
    hyp = CheckResult.from_dev("hypothesis", max_abs(res), tol, col)

    G = np.kron(I.U.conj().T @ target, vacuum_tail(I, N - 1)[:, None])
    base = np.kron(HS, vacuum_tail(I, N)[:, None])
    outside = max_abs(Y0 - G @ (G.conj().T @ Y0))
    overlap = max_abs(base.conj().T @ Y0)
    contain = CheckResult.from_dev("containment", max(outside, overlap), tol,
                                   "outside" if outside >= overlap else "overlap",
                                   outside=outside, overlap=overlap)
    V = chain_row_isometry(I, N)
    wand = is_wandering(V, Y0, N - 1, tol)
    wand.name = "wandering"
    return [hyp, contain, wand]
