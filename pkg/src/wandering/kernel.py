"""The two-word kernel ``K(s, w) = (V_s j0)* (V_w i0)`` and the checks built on it.

Besides single entries this module verifies the multi-Toeplitz case law,
runs the six analyticity conditions (orthogonal output past) and assembles
the truncated Toeplitz operator ``M`` between the translated families.
"""

from __future__ import annotations

import numpy as np

from .errors import TruncationOverflow, UNotWandering, YNotWandering
from .fockspace import Embedding, RowIsometryTrunc
from .matcore import max_abs, range_basis, spectral_norm
from .report import CheckResult, Worst
from .words import EMPTY, Prefix, Word, prefix_relation, words_up_to

CONDITIONS = ("c1", "c2", "c3", "c4", "c5", "c6")


class ToeplitzKernel:
    """Kernel of a pair of embeddings under a truncated row isometry.

    Translated embeddings ``V_w i0`` and ``V_s j0`` are built on demand and
    cached; entries are cached by ``(s, w)``.
    """

    def __init__(self, V: RowIsometryTrunc, i0: Embedding, j0: Embedding, level_tol: float = 1e-9):
        self.V, self.i0, self.j0 = V, i0, j0
        self.level_i = V.level_of(i0.J, level_tol) if i0.dim else 0
        self.level_j = V.level_of(j0.J, level_tol) if j0.dim else 0
        self._i = {EMPTY: i0.J}
        self._j = {EMPTY: j0.J}
        self.cache = {}

    @property
    def d(self) -> int:
        return self.V.d

    def max_omega(self) -> int:
        """Longest word that can translate ``i0`` inside the truncation."""
        return self.V.top - self.level_i

    def max_sigma(self) -> int:
        return self.V.top - self.level_j

    def _translate(self, store, w, limit, what):
        w = Word(w)
        if w in store:
            return store[w]
        w.check_alphabet(self.d)
        if len(w) > limit:
            raise TruncationOverflow(f"V_{w} {what} needs depth {len(w)} but only {limit} fits")
        X = self.V.apply(w[0], self._translate(store, Word(w[1:]), limit, what))
        store[w] = X
        return X

    def i_translate(self, w) -> np.ndarray:
        return self._translate(self._i, w, self.max_omega(), "i0")

    def j_translate(self, w) -> np.ndarray:
        return self._translate(self._j, w, self.max_sigma(), "j0")

    def entry(self, sigma, omega) -> np.ndarray:
        key = (Word(sigma), Word(omega))
        if key not in self.cache:
            self.cache[key] = self.j_translate(key[0]).conj().T @ self.i_translate(key[1])
        return self.cache[key]

    def fill(self, maxlen: int) -> None:
        """Populate the entry cache for all ``|s|, |w| <= maxlen`` from one Gram product."""
        words = words_up_to(self.d, maxlen)
        JY = np.hstack([self.j_translate(w) for w in words])
        JU = np.hstack([self.i_translate(w) for w in words])
        G = JY.conj().T @ JU
        r, c = self.j0.dim, self.i0.dim
        for a, s in enumerate(words):
            for b, w in enumerate(words):
                self.cache.setdefault((s, w), G[a * r:(a + 1) * r, b * c:(b + 1) * c])

    def check_multi_analytic(self, maxlen: int, tol: float = 1e-10) -> CheckResult:
        """Condition c1: ``K(0, a) = 0`` for ``0 < |a| <= maxlen``."""
        if maxlen > self.max_omega():
            raise TruncationOverflow(f"c1 up to length {maxlen} exceeds budget {self.max_omega()}")
        worst = Worst()
        for w in words_up_to(self.d, maxlen)[1:]:
            worst.update(max_abs(self.entry(EMPTY, w)), w)
        return worst.result("c1", tol)


def kernel_entry(ker: ToeplitzKernel, sigma, omega) -> np.ndarray:
    return ker.entry(sigma, omega)


def _budget(ker, maxlen):
    budget = min(ker.max_omega(), ker.max_sigma())
    if maxlen > budget:
        raise TruncationOverflow(f"maxlen {maxlen} exceeds truncation budget {budget}")


def verify_toeplitz_structure(ker: ToeplitzKernel, maxlen: int, tol: float = 1e-10) -> CheckResult:
    """Check the prefix case law over all pairs of words of length ``<= maxlen``.

    ``witness`` is the worst ``(sigma, omega)`` pair.
    """
    _budget(ker, maxlen)
    ker.fill(maxlen)
    words = words_up_to(ker.d, maxlen)
    worst = Worst()
    for s in words:
        for w in words:
            rel = prefix_relation(s, w)
            if rel.kind is Prefix.EQUAL:
                expected = ker.entry(EMPTY, EMPTY)
            elif rel.kind is Prefix.SIGMA_EXTENDS:
                expected = ker.entry(rel.rest, EMPTY)
            elif rel.kind is Prefix.OMEGA_EXTENDS:
                expected = ker.entry(EMPTY, rel.rest)
            else:
                expected = 0.0
            worst.update(max_abs(ker.entry(s, w) - expected), (s, w))
    return worst.result("toeplitz_structure", tol)


def _outside(basis, X):
    return max_abs(X - basis @ (basis.conj().T @ X))


def _span_basis(blocks):
    X = np.hstack(blocks)
    if X.shape[1] == 0:
        return X
    return range_basis(X, 1e-10)


def analyticity_battery(ker: ToeplitzKernel, maxlen: int, tol: float = 1e-10) -> dict:
    """Evaluate the six orthogonal-past conditions as max-deviation scores.

    c1  ``K(0, a) = 0``;  c2  ``i0* V_a* j0 = 0``;  c3  ``Y_0`` inside ``H + U_0``;
    c4  ``V_k* Y_0`` inside ``H``;  c5  ``V_a* Y_0`` inside ``H``;
    c6  ``P V_a x = V_a P x`` on the truncation-safe part, where ``P``
    projects onto the span of the translates ``V_b j0``.  All ``a`` are
    nonempty with ``|a| <= maxlen``.

    c6 compares ``P_m V_a x`` with ``P_m V_a P_m x`` for ``P_m`` the projection
    onto translates of length ``<= m``; both equal the compression of the
    untruncated identity, and ``m`` shrinks with ``|a|`` so nothing overflows.
    """
    V, i0, j0 = ker.V, ker.i0, ker.j0
    H = V.internal
    nonempty = words_up_to(ker.d, maxlen)[1:]
    out = {"c1": ker.check_multi_analytic(maxlen, tol)}

    w2 = Worst()
    w5 = Worst()
    for w in nonempty:
        img = V.adjoint_word(w, j0.J)
        w2.update(max_abs(i0.J.conj().T @ img), w)
        w5.update(_outside(H, img), w)
    out["c2"] = w2.result("c2", tol)

    HU = np.hstack([H, i0.J])
    res = j0.J - HU @ (HU.conj().T @ j0.J)
    col = int(np.argmax(np.max(np.abs(res), axis=0))) if res.size else None
    out["c3"] = CheckResult.from_dev("c3", max_abs(res), tol, col)

    w4 = Worst()
    for k in range(1, ker.d + 1):
        w4.update(_outside(H, V.apply_adjoint(k, j0.J)), Word((k,)))
    out["c4"] = w4.result("c4", tol)
    out["c5"] = w5.result("c5", tol)
    out["c6"] = _intertwining_condition(ker, maxlen, tol)
    return out


def _intertwining_condition(ker, maxlen, tol):
    V = ker.V
    bases = {}
    worst = Worst()
    skipped = 0
    for a in words_up_to(ker.d, maxlen)[1:]:
        m = min(maxlen, ker.max_sigma() - len(a))
        wmax = min(maxlen, ker.max_omega() - len(a))
        if m < 0 or wmax < 0:
            skipped += 1
            continue
        if m not in bases:
            bases[m] = _span_basis([ker.j_translate(b) for b in words_up_to(ker.d, m)])
        Yb = bases[m]
        X = np.hstack([ker.i_translate(w) for w in words_up_to(ker.d, wmax)])
        lhs = V.apply(a[-1], X)
        rhs = Yb @ (Yb.conj().T @ X)
        for letter in reversed(a[:-1]):
            lhs = V.apply(letter, lhs)
        for letter in reversed(a):
            rhs = V.apply(letter, rhs)
        dev = max_abs(Yb.conj().T @ (lhs - rhs))
        worst.update(dev, a)
    res = worst.result("c6", tol, skipped_words=skipped)
    if worst.where is None:
        return CheckResult.skip("c6", "no word fits the truncation")
    return res


def battery_to_dict(battery: dict) -> dict:
    return {name: {"pass": r.passed, "max_dev": r.max_dev,
                   "witness_word": None if r.witness is None else str(r.witness)}
            for name, r in battery.items()}


def _family(ker, maxlen, which):
    words = words_up_to(ker.d, maxlen)
    get = ker.i_translate if which == "U" else ker.j_translate
    return words, np.hstack([get(w) for w in words])


def toeplitz_matrix(ker: ToeplitzKernel, maxlen: int, tol: float = 1e-10) -> np.ndarray:
    """Matrix of ``P_{Y+}`` restricted to ``U+`` in the word-ordered block bases.

    Block ``(s, w)`` is ``K(s, w)``.  Requires both families to be orthonormal.

    Raises:
        YNotWandering, UNotWandering: the Gram matrix of a family is not ``I``.
    """
    _budget(ker, maxlen)
    _, JU = _family(ker, maxlen, "U")
    _, JY = _family(ker, maxlen, "Y")
    devU = max_abs(JU.conj().T @ JU - np.eye(JU.shape[1]))
    if devU > tol:
        raise UNotWandering(f"translates of U_0 are not orthonormal (dev {devU:.3e})")
    devY = max_abs(JY.conj().T @ JY - np.eye(JY.shape[1]))
    if devY > tol:
        raise YNotWandering(f"translates of Y_0 are not orthonormal (dev {devY:.3e})")
    return JY.conj().T @ JU


def check_intertwining(ker: ToeplitzKernel, maxlen: int, tol: float = 1e-10) -> CheckResult:
    """``M S^U_a = S^Y_a M`` on blocks where both sides stay inside length ``maxlen``.

    Column ``w`` of ``M S^U_a`` is column ``aw`` of ``M``; row ``s`` of
    ``S^Y_a M`` is row ``s'`` of ``M`` when ``s = a s'`` and zero otherwise.
    """
    M = toeplitz_matrix(ker, maxlen, tol)
    words = words_up_to(ker.d, maxlen)
    pos = {w: i for i, w in enumerate(words)}
    r, c = ker.j0.dim, ker.i0.dim

    def block(s, w):
        return M[pos[s] * r:(pos[s] + 1) * r, pos[w] * c:(pos[w] + 1) * c]

    worst = Worst()
    for a in words[1:]:
        for w in words:
            aw = a + w
            if len(aw) > maxlen:
                continue
            for s in words:
                lhs = block(s, aw)
                if s[:len(a)] == tuple(a):
                    rhs = block(Word(s[len(a):]), w)
                else:
                    rhs = 0.0
                worst.update(max_abs(lhs - rhs), (a, s, w))
    return worst.result("toeplitz_intertwining", tol)


def kernel_contractivity(ker: ToeplitzKernel, maxlen: int, tol: float = 1e-8) -> CheckResult:
    """Largest singular value over every entry ``K(s, w)`` with ``|s|, |w| <= maxlen``."""
    _budget(ker, maxlen)
    ker.fill(maxlen)
    words = words_up_to(ker.d, maxlen)
    worst = Worst()
    for s in words:
        for w in words:
            worst.update(spectral_norm(ker.entry(s, w)), (s, w))
    return CheckResult.from_dev("kernel_contractive", worst.dev - 1.0, tol, worst.where,
                                largest_singular_value=worst.dev)
