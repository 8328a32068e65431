"""System matrices, transfer-function coefficients and their evaluation.

Coefficients are indexed by words: the coefficient of ``a = a1 ... ar`` is
``D`` for the empty word, ``C B_{a1}`` for one letter and
``C A_{ar} ... A_{a2} B_{a1}`` otherwise.  As a noncommutative series it
multiplies the monomial ``z_{ar} ... z_{a1}``; storage is always by the word
itself so no reversal leaks into the API.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotMultiAnalytic, SingularResolvent, UNotWandering
from .matcore import as_cmatrix, max_abs, spectral_norm
from .report import CheckResult, Worst
from .words import EMPTY, Word, words_up_to


@dataclass(frozen=True, eq=False)
class SystemMatrix:
    """Blocks ``A_k: H -> H``, ``B_k: U -> H``, ``C: H -> Y``, ``D: U -> Y``."""

    A: tuple
    B: tuple
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        A = tuple(as_cmatrix(a) for a in self.A)
        B = tuple(as_cmatrix(b) for b in self.B)
        if not A or len(A) != len(B):
            raise ValueError("need d >= 1 blocks A_k and the same number of B_k")
        C, D = np.asarray(self.C, dtype=complex), np.asarray(self.D, dtype=complex)
        if C.ndim != 2 or D.ndim != 2:
            raise ValueError("C and D must be 2-D arrays")
        n = A[0].shape[0]
        r = B[0].shape[1]
        for a, b in zip(A, B):
            if a.shape != (n, n) or b.shape != (n, r):
                raise ValueError(f"inconsistent block shapes A{a.shape} B{b.shape}")
        if C.shape != (D.shape[0], n) or D.shape[1] != r:
            raise ValueError(f"inconsistent block shapes C{C.shape} D{D.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", D)

    @property
    def d(self) -> int:
        return len(self.A)

    @property
    def dims(self) -> tuple[int, int, int]:
        """``(dim H, dim U, dim Y)``."""
        return self.A[0].shape[0], self.B[0].shape[1], self.C.shape[0]

    def sigma(self) -> np.ndarray:
        """The block matrix ``[[A_1, B_1], ..., [A_d, B_d], [C, D]]`` from ``H + U`` to ``H^d + Y``."""
        rows = [np.hstack([a, b]) for a, b in zip(self.A, self.B)]
        rows.append(np.hstack([self.C, self.D]))
        return np.vstack(rows)

    def to_dict(self) -> dict:
        from .io import matrix_to_dict

        return {"A": [matrix_to_dict(a) for a in self.A], "B": [matrix_to_dict(b) for b in self.B],
                "C": matrix_to_dict(self.C), "D": matrix_to_dict(self.D)}


@dataclass(frozen=True, eq=False)
class FormalSeries:
    d: int
    degree: int
    coeffs: dict = field(repr=False)

    def __getitem__(self, w) -> np.ndarray:
        return self.coeffs[Word(w)]

    def to_dict(self) -> dict:
        from .io import matrix_to_dict

        return {"d": self.d, "degree": self.degree,
                "entries": [{"word": str(w), "matrix": matrix_to_dict(c)}
                            for w, c in self.coeffs.items()]}


def system_matrix(V, i0, j0, tol: float = 1e-9) -> SystemMatrix:
    """Compress ``V*`` and the embeddings against the internal space ``H``.

    Raises:
        UNotWandering: some ``V_k* i0`` leaves ``H`` by more than ``tol``.
    """
    H = V.internal
    A, B = [], []
    for k in range(1, V.d + 1):
        A.append(H.conj().T @ V.apply_adjoint(k, H))
        img = V.apply_adjoint(k, i0.J)
        Bk = H.conj().T @ img
        leak = max_abs(img - H @ Bk)
        if leak > tol:
            raise UNotWandering(f"V_{k}* i0 has a component of size {leak:.3e} outside H")
        B.append(Bk)
    return SystemMatrix(tuple(A), tuple(B), j0.J.conj().T @ H, j0.J.conj().T @ i0.J)


def series_coefficient(S: SystemMatrix, alpha) -> np.ndarray:
    alpha = Word(alpha)
    alpha.check_alphabet(S.d)
    if not alpha:
        return S.D.copy()
    X = S.B[alpha[0] - 1]
    for a in alpha[1:]:
        X = S.A[a - 1] @ X
    return S.C @ X


def formal_series(S: SystemMatrix, degree: int) -> FormalSeries:
    """All coefficients up to ``degree``, sharing the partial products ``A... B``."""
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    inner = {}
    coeffs = {EMPTY: S.D.copy()}
    for w in words_up_to(S.d, degree)[1:]:
        if len(w) == 1:
            inner[w] = S.B[w[0] - 1]
        else:
            inner[w] = S.A[w[-1] - 1] @ inner[Word(w[:-1])]
        coeffs[w] = S.C @ inner[w]
    return FormalSeries(S.d, degree, coeffs)


def eval_theta(S: SystemMatrix, z: complex, tol: float = 1e-10) -> np.ndarray:
    """``D + C (I - zA)^{-1} z B`` for ``d = 1``, via a linear solve."""
    if S.d != 1:
        raise ValueError("numeric evaluation is only defined for d = 1")
    n = S.dims[0]
    if n == 0:
        return S.D.copy()
    R = np.eye(n) - z * S.A[0]
    cond = np.linalg.cond(R)
    if not np.isfinite(cond) or cond > 1 / tol:
        raise SingularResolvent(f"I - zA has condition number {cond:.3e} at z = {z}")
    return S.D + S.C @ np.linalg.solve(R, z * S.B[0])


def truncation_tail_bound(S: SystemMatrix, z: complex, degree: int) -> float:
    """Bound on the tail beyond ``degree`` of the d = 1 series at ``z``; inf if ``|z| ||A|| >= 1``."""
    q = abs(z) * spectral_norm(S.A[0])
    if q >= 1:
        return float("inf")
    return spectral_norm(S.C) * spectral_norm(S.B[0]) * abs(z) ** (degree + 1) / (1 - q)


def sample_circle(S: SystemMatrix, radius: float = 0.99, samples: int = 64, tol: float = 1e-10):
    """Rows ``(index, z, singular values descending)`` at ``z = r e^{2 pi i k / samples}``."""
    rows = []
    for k in range(samples):
        z = radius * np.exp(2j * np.pi * k / samples)
        sv = np.linalg.svd(eval_theta(S, z, tol), compute_uv=False)
        rows.append((k, complex(z), np.sort(sv)[::-1]))
    return rows


def verify_realization(V, i0, j0, degree: int, tol: float = 1e-10) -> CheckResult:
    """Compare ``series_coefficient(system_matrix(...), a)`` with the geometric ``K(a, 0)``.

    Raises:
        NotMultiAnalytic: the kernel fails ``K(0, a) = 0`` for some ``|a| <= degree``
            that fits the truncation.
    """
    from .kernel import ToeplitzKernel

    ker = ToeplitzKernel(V, i0, j0)
    c1 = ker.check_multi_analytic(min(degree, ker.max_omega()), tol)
    if not c1:
        raise NotMultiAnalytic(f"K(0, {c1.witness}) has size {c1.max_dev:.3e}")
    S = system_matrix(V, i0, j0)
    worst = Worst()
    for w in words_up_to(V.d, degree):
        worst.update(max_abs(series_coefficient(S, w) - ker.entry(w, EMPTY)), w)
    return worst.result("realization", tol)
