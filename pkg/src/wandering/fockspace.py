"""Truncated ambient spaces, isometric embeddings and truncated row isometries.

A truncated row isometry lives on a finite ambient space carrying a
filtration by *levels* ``L_0 = H  c  L_1  c ... c  L_top``.  Each ``V_k`` is
only defined on ``L_{top-1}`` and maps ``L_n`` into ``L_{n+1}``.  Applying a
word of length ``r`` therefore needs input supported on ``L_{top-r}``, and
anything else raises :class:`TruncationOverflow` instead of silently losing
mass.

Adjoints are exact: for every construction in this package ``V_k`` maps the
complement of its domain out of the ambient space, so the stored matrix
(``V_k`` times the domain projection) has the true ``V_k*`` restricted to
the ambient space as its adjoint.

For the graded space ``H + sum_{|a| <= N} U_a`` the levels are
``L_0 = H`` and ``L_n = H + sum_{|a| <= n-1} U_a``, so ``top = N + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import DepthTooSmall, NotCoisometry, TruncationOverflow
from .matcore import argmax_entry, as_cmatrix, max_abs, operator_class, range_basis
from .report import CheckResult, Worst
from .words import EMPTY, Word, count_words_up_to, words_up_to

DEFAULT_DEPTH = 4


@dataclass(frozen=True, eq=False)
class GradedSpace:
    """``H`` followed by one copy ``U_a`` of the fiber per word ``|a| <= N``, in length-lex order."""

    dimH: int
    dimU: int
    d: int
    N: int
    words: tuple = field(init=False, repr=False)
    block_index: dict = field(init=False, repr=False)

    def __post_init__(self):
        if self.d < 1 or self.N < 0 or self.dimH < 0 or self.dimU < 0:
            raise ValueError(f"invalid graded space {self}")
        words = tuple(words_up_to(self.d, self.N))
        offsets = {w: self.dimH + i * self.dimU for i, w in enumerate(words)}
        object.__setattr__(self, "words", words)
        object.__setattr__(self, "block_index", offsets)

    @property
    def total_dim(self) -> int:
        return self.dimH + self.dimU * len(self.words)

    def block(self, w: Word) -> slice:
        start = self.block_index[Word(w)]
        return slice(start, start + self.dimU)

    def level_dim(self, n: int) -> int:
        if n == 0:
            return self.dimH
        return self.dimH + self.dimU * count_words_up_to(self.d, n - 1)

    def coords(self, start: int, stop: int) -> sp.csr_array:
        """Sparse ambient x (stop - start) matrix selecting a coordinate range."""
        k = stop - start
        return sp.csr_array(
            (np.ones(k, dtype=complex), (np.arange(start, stop), np.arange(k))),
            shape=(self.total_dim, k))

    def block_embedding(self, w: Word) -> np.ndarray:
        J = np.zeros((self.total_dim, self.dimU), dtype=complex)
        J[self.block(w), :] = np.eye(self.dimU)
        return J


@dataclass(frozen=True, eq=False)
class Embedding:
    """Isometric embedding of a fiber into the ambient space, stored as ``J`` with ``J*J = I``."""

    J: np.ndarray
    space: object = None
    tol: float = 1e-8

    def __post_init__(self):
        J = as_cmatrix(self.J)
        object.__setattr__(self, "J", J)
        if J.shape[1] and not operator_class(J, self.tol).isometry:
            dev = max_abs(J.conj().T @ J - np.eye(J.shape[1]))
            raise ValueError(f"embedding columns are not orthonormal (max dev {dev:.3e})")

    @property
    def dim(self) -> int:
        return self.J.shape[1]

    @property
    def ambient_dim(self) -> int:
        return self.J.shape[0]

    def projector(self) -> np.ndarray:
        return self.J @ self.J.conj().T


@dataclass(frozen=True, eq=False)
class RowIsometryTrunc:
    """``d`` isometries with orthogonal ranges, truncated to a finite filtration.

    Attributes:
        mats: sparse ambient x ambient matrices, ``V_k`` composed with the
            projection onto the domain ``levels[top - 1]``.
        levels: orthonormal bases of ``L_0 .. L_top`` (sparse or dense).
        internal: basis of the internal space ``H`` (usually ``levels[0]``).
    """

    mats: tuple
    levels: tuple
    internal: np.ndarray
    space: object = None

    @property
    def d(self) -> int:
        return len(self.mats)

    @property
    def top(self) -> int:
        return len(self.levels) - 1

    @property
    def dim(self) -> int:
        return self.mats[0].shape[0]

    @property
    def domain(self):
        return self.levels[self.top - 1]

    def apply(self, k: int, X) -> np.ndarray:
        """``V_k X`` without truncation checks (``k`` is 1-based)."""
        return np.asarray(self.mats[k - 1] @ X)

    def apply_adjoint(self, k: int, X) -> np.ndarray:
        return np.asarray(self.mats[k - 1].conj().T @ X)

    def adjoint_word(self, alpha: Word, X) -> np.ndarray:
        """``V_alpha* X = V_{a_r}* ... V_{a_1}* X``; exact, never overflows."""
        X = np.asarray(X, dtype=complex)
        for a in Word(alpha):
            X = self.apply_adjoint(a, X)
        return X

    def level_residual(self, n: int, X) -> float:
        L = self.levels[n]
        return max_abs(X - L @ (L.conj().T @ X))

    def level_of(self, X, tol: float = 1e-9) -> int:
        """Smallest ``n`` with ``X`` inside ``L_n`` up to ``tol`` (``top + 1`` if none)."""
        X = np.asarray(X, dtype=complex)
        if X.ndim == 1:
            X = X[:, None]
        for n in range(self.top + 1):
            if self.level_residual(n, X) <= tol:
                return n
        return self.top + 1


def apply_word(V: RowIsometryTrunc, alpha: Word, x, tol: float = 1e-9) -> np.ndarray:
    """``V_alpha x = V_{a_1}( ... V_{a_r} x)``; the empty word is the identity.

    Raises:
        TruncationOverflow: ``x`` reaches above level ``top - |alpha|``.
    """
    alpha = Word(alpha)
    alpha.check_alphabet(V.d)
    x = np.asarray(x, dtype=complex)
    if not alpha:
        return x
    level = V.level_of(x, tol)
    if level + len(alpha) > V.top:
        raise TruncationOverflow(
            f"word {alpha} (length {len(alpha)}) applied to level-{level} input, "
            f"but truncation top is {V.top}")
    for a in reversed(alpha):
        x = V.apply(a, x)
    return x


def translates(V: RowIsometryTrunc, X, maxlen: int, tol: float = 1e-9) -> dict:
    """``{w: V_w X}`` for every ``|w| <= maxlen``, built by prepending letters."""
    X = np.asarray(X, dtype=complex)
    level = V.level_of(X, tol) if X.shape[1] else 0
    if level + maxlen > V.top:
        raise TruncationOverflow(
            f"translates up to length {maxlen} of a level-{level} subspace exceed top {V.top}")
    out = {EMPTY: X}
    for w in words_up_to(V.d, maxlen)[1:]:
        out[w] = V.apply(w[0], out[Word(w[1:])])
    return out


def _csr(M, shape=None):
    return sp.csr_array(M, shape=shape, dtype=complex)


def dilation_row_isometry(system, N: int = DEFAULT_DEPTH, tol: float | None = None):
    """Row isometry on ``H + sum_{|a| <= N} U_a`` generated by a coisometric system matrix.

    ``V_k h = A_k* h + i0(B_k* h)`` on ``H`` and ``V_k`` moves block ``U_a`` to
    block ``U_{ka}``.  ``system`` needs attributes ``A``, ``B`` (lists of ``d``
    blocks), ``C`` and ``D``.

    Returns:
        ``(V, i0)`` with ``i0`` embedding ``U`` as the block of the empty word.

    Raises:
        DepthTooSmall: ``N < 1``.
        NotCoisometry: the assembled block matrix is not a coisometry.
    """
    if N < 1:
        raise DepthTooSmall(f"truncation depth must be >= 1, got {N}")
    sigma = system.sigma()
    atol = tol if tol is not None else 1e-10 * max(sigma.shape + (1,))
    if sigma.shape[0] and not operator_class(sigma, atol).coisometry:
        dev = max_abs(sigma @ sigma.conj().T - np.eye(sigma.shape[0]))
        raise NotCoisometry(f"system matrix is not a coisometry (max dev {dev:.3e})")
    d = len(system.A)
    dimH = system.A[0].shape[0]
    dimU = system.B[0].shape[1]
    space = GradedSpace(dimH, dimU, d, N)
    n = space.total_dim
    u0 = space.block(EMPTY)
    mats = []
    for k in range(1, d + 1):
        M = sp.lil_array((n, n), dtype=complex)
        M[:dimH, :dimH] = np.asarray(system.A[k - 1]).conj().T
        M[u0, :dimH] = np.asarray(system.B[k - 1]).conj().T
        for w in space.words:
            if len(w) <= N - 1:
                src, dst = space.block(w), space.block(Word((k,)) + w)
                for j in range(dimU):
                    M[dst.start + j, src.start + j] = 1.0
        mats.append(_csr(M))
    levels = tuple(space.coords(0, space.level_dim(m)) for m in range(N + 2))
    internal = space.coords(0, dimH).toarray()
    V = RowIsometryTrunc(tuple(mats), levels, internal, space)
    return V, Embedding(space.block_embedding(EMPTY), space)


def dilation_output_embedding(V: RowIsometryTrunc, i0: Embedding, system) -> Embedding:
    """``j0 = (I_H + i0) Sigma*|_Y``, i.e. ``y -> C* y + i0(D* y)``."""
    C = np.asarray(system.C)
    D = np.asarray(system.D)
    J = V.internal @ C.conj().T + i0.J @ D.conj().T
    return Embedding(J, V.space)


def check_row_isometry(V: RowIsometryTrunc, tol: float = 1e-10) -> CheckResult:
    """Max deviation of ``V_i* V_j`` from ``delta_ij I`` on the truncated domain."""
    P = V.domain
    imgs = [np.asarray((V.mats[k] @ P).toarray() if sp.issparse(P) else V.mats[k] @ P)
            for k in range(V.d)]
    m = P.shape[1]
    worst = Worst()
    for i in range(V.d):
        for j in range(i, V.d):
            G = imgs[i].conj().T @ imgs[j]
            if i == j:
                G = G - np.eye(m)
            worst.update(max_abs(G), (i + 1, j + 1))
    return worst.result("row_isometry", tol)


def is_wandering(V: RowIsometryTrunc, W, maxlen: int, tol: float = 1e-10) -> CheckResult:
    """Check ``V_a W`` orthogonal to ``V_b W`` for all ``a != b`` with ``|a|, |b| <= maxlen``.

    ``witness`` is the worst word pair.  Raises :class:`TruncationOverflow`
    when ``maxlen`` exceeds what the truncation supports for ``W``.
    """
    J = W.J if isinstance(W, Embedding) else as_cmatrix(W)
    fam = translates(V, J, maxlen)
    words = list(fam)
    k = J.shape[1]
    if k == 0:
        return CheckResult("wandering", True, 0.0, None)
    stacked = np.hstack([fam[w] for w in words])
    G = stacked.conj().T @ stacked
    worst = Worst()
    for a, wa in enumerate(words):
        for b in range(a + 1, len(words)):
            worst.update(max_abs(G[a * k:(a + 1) * k, b * k:(b + 1) * k]), (wa, words[b]))
    return worst.result("wandering", tol)


def check_internal_decomposition(V: RowIsometryTrunc, i0: Embedding, tol: float = 1e-10):
    """Geometry forced by a wandering ``U_0`` on the truncated space.

    Checks that ``H`` plus the translated blocks ``V_a i0`` (all that fit)
    exhaust the ambient space, that ``V_k H`` stays in ``H + U_0`` and that
    ``V_a* U_0`` lies in ``H`` for nonempty ``a``.
    """
    level = V.level_of(i0.J)
    maxlen = V.top - level
    fam = translates(V, i0.J, maxlen)
    H = V.internal
    basis = np.hstack([H] + [fam[w] for w in fam])
    gram = basis.conj().T @ basis - np.eye(basis.shape[1])
    fill = V.dim - basis.shape[1]
    results = [CheckResult.from_dev("internal_plus_blocks_orthonormal", max_abs(gram), tol,
                                    argmax_entry(gram)),
               CheckResult("internal_plus_blocks_exhaust", fill == 0, float(abs(fill)),
                           witness=None if fill == 0 else {"missing_dims": fill},
                           reason=None if fill == 0 else f"{fill} ambient dimensions unaccounted")]
    HU = np.hstack([H, i0.J])
    w_shift, w_back = Worst(), Worst()
    for k in range(1, V.d + 1):
        img = V.apply(k, H)
        w_shift.update(max_abs(img - HU @ (HU.conj().T @ img)), k)
    for w in words_up_to(V.d, maxlen)[1:]:
        img = V.adjoint_word(w, i0.J)
        w_back.update(max_abs(img - H @ (H.conj().T @ img)), w)
    results.append(w_shift.result("shift_of_internal_in_H_plus_U0", tol))
    results.append(w_back.result("adjoint_translates_of_U0_in_H", tol))
    return results


def internal_complement(V: RowIsometryTrunc, i0: Embedding) -> np.ndarray:
    """Ambient complement of the truncated span of ``V_a i0``; equals ``H`` when ``U_0`` is wandering."""
    fam = translates(V, i0.J, V.top - V.level_of(i0.J))
    B = range_basis(np.hstack(list(fam.values())), 1e-10)
    P = np.eye(V.dim) - B @ B.conj().T
    return range_basis(P, 1e-8)
