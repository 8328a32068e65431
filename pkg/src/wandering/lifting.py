"""Transfer functions of contractive liftings.

A lifting is a row contraction with blocks ``T_k = [[S_k, 0], [Q_k, R_k]]``
on ``H = H_S + H_R``.  Contractivity forces ``Q = D_{R*} g* D_S`` for a
contraction ``g`` from the defect space of ``R*`` to that of ``S``; this
module extracts ``g``, builds the lifting system matrix, evaluates it for
``d = 1`` and realizes the output embedding ``j0(D_S h) = (V - S) h``
inside the minimal isometric dilation of ``T``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .characteristic import RowContraction, nagy_foias_dilation
from .errors import InconsistentLifting, NotContraction, SingularResolvent
from .fockspace import DEFAULT_DEPTH, Embedding
from .matcore import argmax_entry, defect_pair, max_abs, pinv, range_basis, solve_sandwich, spectral_norm
from .report import CheckResult, Worst
from .transfer import SystemMatrix


def _blocks(x) -> tuple:
    if isinstance(x, np.ndarray) and x.ndim == 2:
        x = (x,)
    return tuple(np.atleast_2d(np.asarray(b, dtype=complex)) for b in x)


@dataclass(frozen=True, eq=False)
class LiftingSplit:
    """Blocks ``S_k`` (on ``H_S``), ``Q_k`` (``H_S -> H_R``), ``R_k`` (on ``H_R``) per letter ``k``."""

    S: tuple
    Q: tuple
    R: tuple
    dimS: int
    dimR: int
    tol: float = 1e-10

    @classmethod
    def from_blocks(cls, S, Q, R, tol: float = 1e-10) -> "LiftingSplit":
        S, Q, R = _blocks(S), _blocks(Q), _blocks(R)
        if not (len(S) == len(Q) == len(R)) or not S:
            raise ValueError("S, Q, R need the same positive number of blocks")
        nR, nS = Q[0].shape
        for s_, q, r in zip(S, Q, R):
            if s_.shape != (nS, nS) or q.shape != (nR, nS) or r.shape != (nR, nR):
                raise ValueError(f"inconsistent lifting blocks S{s_.shape} Q{q.shape} R{r.shape}")
        return cls(S, Q, R, nS, nR, tol)

    @classmethod
    def from_assembled(cls, T, dimS: int, tol: float = 1e-10) -> "LiftingSplit":
        """Split assembled blocks ``T_k``; the upper-right corner must vanish."""
        T = _blocks(T)
        S, Q, R = [], [], []
        for t in T:
            n = t.shape[0]
            if t.shape != (n, n) or not 0 <= dimS <= n:
                raise ValueError(f"bad block shape {t.shape} for dimS={dimS}")
            corner = max_abs(t[:dimS, dimS:])
            if corner > 0:
                raise ValueError(f"upper-right block is not zero (max {corner:.3e}); H_S is not T*-invariant")
            S.append(t[:dimS, :dimS])
            Q.append(t[dimS:, :dimS])
            R.append(t[dimS:, dimS:])
        return cls(tuple(S), tuple(Q), tuple(R), dimS, T[0].shape[0] - dimS, tol)

    def __post_init__(self):
        norm = spectral_norm(np.hstack(self.assembled()))
        if norm > 1 + self.tol * max(1, self.n * self.d):
            raise NotContraction(f"assembled row norm {norm:.12g} exceeds 1")

    @property
    def d(self) -> int:
        return len(self.S)

    @property
    def n(self) -> int:
        return self.dimS + self.dimR

    def assembled(self) -> tuple:
        out = []
        for s, q, r in zip(self.S, self.Q, self.R):
            t = np.zeros((self.n, self.n), dtype=complex)
            t[:self.dimS, :self.dimS] = s
            t[self.dimS:, :self.dimS] = q
            t[self.dimS:, self.dimS:] = r
            out.append(t)
        return tuple(out)

    @cached_property
    def row_contraction(self) -> RowContraction:
        return RowContraction(self.assembled(), self.tol)

    @property
    def S_row(self):
        return np.hstack(self.S)

    @property
    def Q_row(self):
        return np.hstack(self.Q)

    @property
    def R_row(self):
        return np.hstack(self.R)

    def embed_S(self) -> np.ndarray:
        """``H_S^d -> H^d`` placing the ``k``-th component in the ``S`` part of copy ``k``."""
        E = np.zeros((self.d * self.n, self.d * self.dimS), dtype=complex)
        for k in range(self.d):
            E[k * self.n:k * self.n + self.dimS, k * self.dimS:(k + 1) * self.dimS] = np.eye(self.dimS)
        return E

    def embed_R(self) -> np.ndarray:
        E = np.zeros((self.d * self.n, self.d * self.dimR), dtype=complex)
        for k in range(self.d):
            E[k * self.n + self.dimS:(k + 1) * self.n, k * self.dimR:(k + 1) * self.dimR] = np.eye(self.dimR)
        return E

    def P_R(self) -> np.ndarray:
        """Coordinate projection ``H -> H_R``."""
        return np.eye(self.n, dtype=complex)[self.dimS:, :]

    @cached_property
    def defects(self):
        """``(D_S, ran D_S, D_{R*}, ran D_{R*}, D_R)`` for the row blocks."""
        atol = self.tol * max(1, self.n * self.d)
        dS = defect_pair(self.S_row, atol)
        dR = defect_pair(self.R_row, atol)
        return dS.D_T, dS.ran_T, dR.D_Tstar, dR.ran_Tstar, dR.D_T


def extract_gamma(L: LiftingSplit, tol: float = 1e-8):
    """Solve ``D_{R*} g* D_S = Q`` for ``g`` on the defect-range coordinates.

    Returns:
        ``(gamma, residual)``; ``gamma`` maps ``ran D_{R*}`` coordinates to
        ``ran D_S`` coordinates and is zero off those ranges by construction.

    Raises:
        InconsistentLifting: residual above ``tol`` or ``||gamma|| > 1 + tol``.
    """
    D_S, RS, D_Rs, RRs, _ = L.defects
    X, residual = solve_sandwich(D_Rs @ RRs, L.Q_row, RS.conj().T @ D_S, 1e-10)
    gamma = X.conj().T
    if residual > tol:
        raise InconsistentLifting(f"Q is not of the form D_R* g* D_S (residual {residual:.3e})")
    norm = spectral_norm(gamma)
    if norm > 1 + tol:
        raise InconsistentLifting(f"extracted gamma has norm {norm:.12g} > 1")
    return gamma, residual


def gamma_operator(L: LiftingSplit, gamma=None) -> np.ndarray:
    """``gamma`` as an operator ``H_R -> H_S^d`` (zero off the defect ranges)."""
    if gamma is None:
        gamma, _ = extract_gamma(L)
    _, RS, _, RRs, _ = L.defects
    return RS @ gamma @ RRs.conj().T


def lifting_system(L: LiftingSplit, tol: float = 1e-8) -> SystemMatrix:
    """System matrix of the lifting pair, assembled from ``S, Q, R`` and ``gamma``.

    ``A_k = T_k*`` and ``B_k`` are those of the rotation system of ``T``;
    ``C = gamma D_{R*} P_{H_R}``; ``D`` is fixed on ``D_T h`` (``h`` in ``H^d``) by
    ``D_S h_S - gamma D_{R*} (Q h_S + R h_R)``.
    """
    gamma, _ = extract_gamma(L, tol)
    D_S, RS, D_Rs, RRs, _ = L.defects
    T = L.row_contraction
    n = L.n
    D_T, _, RU, _ = T.defects()
    DTU = D_T @ RU
    A = tuple(t.conj().T for t in T.T)
    B = tuple(DTU[k * n:(k + 1) * n, :] for k in range(T.d))
    gD = gamma @ RRs.conj().T @ D_Rs
    C = gD @ L.P_R()
    ES, ER = L.embed_S(), L.embed_R()
    F = RS.conj().T @ D_S @ ES.conj().T - gD @ (L.Q_row @ ES.conj().T + L.R_row @ ER.conj().T)
    D, residual = solve_sandwich(np.eye(F.shape[0]), F, RU.conj().T @ D_T, 1e-10)
    if residual > tol:
        raise InconsistentLifting(f"D is not well defined on the defect range (residual {residual:.3e})")
    return SystemMatrix(A, B, C, D)


def _resolvent_solve(M, rhs, tol):
    if M.shape[0] == 0:
        return np.zeros((0,) + rhs.shape[1:], dtype=complex)
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > 1 / tol:
        raise SingularResolvent(f"resolvent condition number {cond:.3e}")
    return np.linalg.solve(M, rhs)


def lifting_eval(L: LiftingSplit, z: complex, system: SystemMatrix | None = None,
                 tol: float = 1e-10) -> np.ndarray:
    """``D + gamma D_{R*} (I - z R*)^{-1} P_{H_R} z D_T`` with the solve on ``H_R`` only (``d = 1``)."""
    if L.d != 1:
        raise ValueError("numeric evaluation is only defined for d = 1")
    S = system if system is not None else lifting_system(L)
    gamma, _ = extract_gamma(L)
    _, _, D_Rs, RRs, _ = L.defects
    D_T, _, RU, _ = L.row_contraction.defects()
    R = L.R[0]
    rhs = z * (L.P_R() @ D_T @ RU)
    sol = _resolvent_solve(np.eye(L.dimR) - z * R.conj().T, rhs, tol)
    return S.D + gamma @ RRs.conj().T @ D_Rs @ sol


def verify_restrictions(L: LiftingSplit, z_samples, tol: float = 1e-8) -> list:
    """Check both restriction identities of ``Theta(z)`` at each sample ``z`` (``d = 1``).

    (i)  on ``D_T h_R``: ``gamma [-R + D_{R*} (I - zR*)^{-1} z D_R] (D_R h_R)``;
    (ii) on ``D_T h_S``: ``[I - gamma D_{R*} (I - zR*)^{-1} D_{R*} gamma*] D_S h_S``.

    Both right-hand sides are computed straight from ``S, Q, R`` and ``gamma``;
    the left side uses :func:`lifting_eval`.  Witness: ``(z, part, basis index)``.
    """
    if L.d != 1:
        raise ValueError("restriction identities are checked for d = 1 only")
    system = lifting_system(L)
    gamma, _ = extract_gamma(L)
    G = gamma_operator(L, gamma)
    D_S, RS, D_Rs, RRs, D_R = L.defects
    D_T, _, RU, _ = L.row_contraction.defects()
    R = L.R[0]
    ES, ER = L.embed_S(), L.embed_R()
    uR = RU.conj().T @ D_T @ ER
    uS = RU.conj().T @ D_T @ ES
    wR, wS = Worst(), Worst()
    for z in z_samples:
        theta = lifting_eval(L, z, system)
        res = np.eye(L.dimR) - z * R.conj().T
        rhsR = gamma @ RRs.conj().T @ (
            -R @ D_R + D_Rs @ _resolvent_solve(res, z * D_R @ D_R, 1e-10))
        for j, dev in enumerate(np.max(np.abs(theta @ uR - rhsR), axis=0, initial=0.0)):
            wR.update(dev, (complex(z), "R", j))
        inner = G @ D_Rs @ _resolvent_solve(res, D_Rs @ G.conj().T, 1e-10)
        rhsS = RS.conj().T @ (np.eye(inner.shape[0]) - inner) @ D_S
        for j, dev in enumerate(np.max(np.abs(theta @ uS - rhsS), axis=0, initial=0.0)):
            wS.update(dev, (complex(z), "S", j))
    return [wR.result("restriction_R", tol), wS.result("restriction_S", tol)]


def lifting_geometry(L: LiftingSplit, N: int = DEFAULT_DEPTH, tol: float = 1e-8):
    """Dilate ``T`` and embed ``Y = ran D_S`` by ``j0(D_S h) = (V - S) h``.

    ``(V - S) h`` is evaluated geometrically as ``sum_k V_k h_k - S h`` in the
    dilation space, for ``h = D_S^+ y`` in ``H_S^d``.

    Raises:
        InconsistentLifting: ``j0`` is not isometric, or its range leaves
            ``span{H_S, V_k H_S} - H_S``.
    """
    V, i0, _ = nagy_foias_dilation(L.row_contraction, N)
    D_S, RS, _, _, _ = L.defects
    H = V.internal
    hS = pinv(D_S, 1e-10) @ RS
    J = np.zeros((V.dim, RS.shape[1]), dtype=complex)
    for k in range(L.d):
        x = np.zeros((L.n, RS.shape[1]), dtype=complex)
        x[:L.dimS] = hS[k * L.dimS:(k + 1) * L.dimS]
        J += V.apply(k + 1, H @ x)
    J[:L.n] -= np.vstack([L.S_row @ hS, np.zeros((L.dimR, RS.shape[1]))])
    iso = max_abs(J.conj().T @ J - np.eye(J.shape[1]))
    if iso > tol:
        raise InconsistentLifting(f"(V - S) D_S^+ is not isometric on ran D_S (dev {iso:.3e})")
    j0 = Embedding(J, V.space, tol)
    for r in lifting_geometry_checks(L, V, j0, tol):
        if not r:
            raise InconsistentLifting(f"{r.name} fails with deviation {r.max_dev:.3e}")
    return V, i0, j0


def lifting_geometry_checks(L: LiftingSplit, V, j0: Embedding, tol: float = 1e-8) -> list:
    """``Y_0`` orthogonal to ``H_S`` and contained in ``span{H_S, V_k H_S}``."""
    HS = V.internal[:, :L.dimS]
    gens = [HS] + [V.apply(k, HS) for k in range(1, L.d + 1)]
    X = np.hstack(gens)
    B = range_basis(X, 1e-10) if X.shape[1] else X
    outside = j0.J - B @ (B.conj().T @ j0.J)
    overlap = HS.conj().T @ j0.J
    # witnesses are column indices of Y_0
    return [CheckResult.from_dev("Y0_in_span_HS_VHS", max_abs(outside), tol, _worst_col(outside)),
            CheckResult.from_dev("Y0_perp_HS", max_abs(overlap), tol, _worst_col(overlap))]


def _worst_col(M):
    entry = argmax_entry(M)
    return None if entry is None else entry[1]
