"""JSON forms for matrices, vectors and scenarios.

A matrix is ``{"rows", "cols", "re", "im"}`` with row-major real and
imaginary parts; a vector is ``{"re", "im"}``.  A scenario is

    {"kind": "dilation" | "lifting" | "markov" | "raw",
     "depth": 4, "tol": 1e-10, "degree": <depth>,
     "payload": {...}}

with the payload keys listed in ``PAYLOAD_KEYS``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError
from .fockspace import DEFAULT_DEPTH

KINDS = ("dilation", "lifting", "markov", "raw")
DEFAULT_TOL = 1e-10

PAYLOAD_KEYS = {
    "dilation": "T: matrix or list of d matrices (row contraction blocks)",
    "lifting": "S, Q, R: matrices or lists of d matrices; or T (list) with dimS",
    "markov": "dimH, dimK, dimP, U; optional omegaH, omegaK, omegaP, basisP, HS, Y0",
    "raw": "A, B: lists of d matrices; C, D: matrices (coisometric system matrix)",
}


def matrix_to_dict(M) -> dict:
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    flat = M.ravel()
    return {"rows": M.shape[0], "cols": M.shape[1],
            "re": [float(x) for x in flat.real], "im": [float(x) for x in flat.imag]}


def _number_list(obj, key, where):
    vals = obj.get(key, None)
    if vals is None:
        return None
    if not isinstance(vals, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                                             for v in vals):
        raise ParseError(f"{where}.{key} must be a list of numbers")
    return vals


def matrix_from_dict(obj, where: str = "matrix") -> np.ndarray:
    """Parse a matrix object; ``where`` names the field in error messages."""
    if not isinstance(obj, dict):
        raise ParseError(f"{where} must be an object with rows, cols, re, im")
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
    except (KeyError, TypeError, ValueError):
        raise ParseError(f"{where} needs integer rows and cols") from None
    if rows < 0 or cols < 0:
        raise ParseError(f"{where} has negative dimensions")
    re = _number_list(obj, "re", where)
    if re is None:
        raise ParseError(f"{where}.re is missing")
    im = _number_list(obj, "im", where)
    if im is None:
        im = [0.0] * len(re)
    n = rows * cols
    for key, vals in (("re", re), ("im", im)):
        if len(vals) != n:
            raise ParseError(f"{where}.{key} has {len(vals)} entries, expected rows*cols = {n}")
    M = (np.array(re, dtype=float) + 1j * np.array(im, dtype=float)).reshape(rows, cols)
    if not np.all(np.isfinite(M)):
        raise ParseError(f"{where} has non-finite entries")
    return M


def vector_to_dict(v) -> dict:
    v = np.asarray(v, dtype=complex).ravel()
    return {"re": [float(x) for x in v.real], "im": [float(x) for x in v.imag]}


def vector_from_dict(obj, where: str = "vector") -> np.ndarray:
    if not isinstance(obj, dict):
        raise ParseError(f"{where} must be an object with re, im")
    re = _number_list(obj, "re", where)
    if re is None:
        raise ParseError(f"{where}.re is missing")
    im = _number_list(obj, "im", where)
    if im is None:
        im = [0.0] * len(re)
    if len(im) != len(re):
        raise ParseError(f"{where}.im has {len(im)} entries, expected {len(re)}")
    return np.array(re, dtype=float) + 1j * np.array(im, dtype=float)


def _blocks_from(obj, where):
    if isinstance(obj, list):
        if not obj:
            raise ParseError(f"{where} is an empty list")
        return tuple(matrix_from_dict(m, f"{where}[{i}]") for i, m in enumerate(obj))
    return (matrix_from_dict(obj, where),)


def _require(payload, key, kind):
    if key not in payload:
        raise ParseError(f"{kind} payload is missing '{key}'")
    return payload[key]


@dataclass
class Scenario:
    kind: str
    payload: dict
    depth: int = DEFAULT_DEPTH
    tol: float = DEFAULT_TOL
    degree: int | None = None
    source: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.degree is None:
            self.degree = self.depth

    def echo(self) -> dict:
        return {"kind": self.kind, "depth": self.depth, "tol": self.tol, "degree": self.degree}

    # builders: each validates dimensions before anything is computed

    def row_contraction(self):
        from .characteristic import RowContraction

        T = _blocks_from(_require(self.payload, "T", self.kind), "payload.T")
        try:
            return RowContraction(T)
        except ValueError as e:
            raise ValidationError(f"payload.T: {e}") from None

    def lifting_split(self):
        from .lifting import LiftingSplit

        p = self.payload
        try:
            if "T" in p:
                dimS = _require(p, "dimS", self.kind)
                if not isinstance(dimS, int) or isinstance(dimS, bool):
                    raise ParseError("payload.dimS must be an integer")
                return LiftingSplit.from_assembled(_blocks_from(p["T"], "payload.T"), dimS)
            S, Q, R = (_blocks_from(_require(p, k, self.kind), f"payload.{k}") for k in "SQR")
            return LiftingSplit.from_blocks(S, Q, R)
        except ValueError as e:
            raise ValidationError(f"lifting payload: {e}") from None

    def interaction(self):
        from .markov import Interaction

        p = self.payload
        dims = {}
        for key in ("dimH", "dimK", "dimP"):
            v = _require(p, key, self.kind)
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ParseError(f"payload.{key} must be a positive integer")
            dims[key] = v
        vecs = {k: vector_from_dict(p[k], f"payload.{k}")
                for k in ("omegaH", "omegaK", "omegaP") if k in p}
        basis = matrix_from_dict(p["basisP"], "payload.basisP") if "basisP" in p else None
        return Interaction(matrix_from_dict(_require(p, "U", self.kind), "payload.U"),
                           basisP=basis, **dims, **vecs)

    def optional_matrix(self, key):
        return matrix_from_dict(self.payload[key], f"payload.{key}") if key in self.payload else None

    def system(self):
        from .transfer import SystemMatrix

        p = self.payload
        A = _blocks_from(_require(p, "A", self.kind), "payload.A")
        B = _blocks_from(_require(p, "B", self.kind), "payload.B")
        C = matrix_from_dict(_require(p, "C", self.kind), "payload.C")
        D = matrix_from_dict(_require(p, "D", self.kind), "payload.D")
        try:
            return SystemMatrix(A, B, C, D)
        except ValueError as e:
            raise ValidationError(f"raw payload: {e}") from None

    def validate(self) -> None:
        """Parse the payload for this kind so dimension errors surface up front."""
        build = {"dilation": self.row_contraction, "lifting": self.lifting_split,
                 "markov": self.interaction, "raw": self.system}[self.kind]
        build()


def _int_field(obj, key, default, minimum):
    v = obj.get(key, default)
    if v is None:
        return None
    if not isinstance(v, int) or isinstance(v, bool) or v < minimum:
        raise ParseError(f"{key} must be an integer >= {minimum}")
    return v


def scenario_from_dict(obj) -> Scenario:
    if not isinstance(obj, dict):
        raise ParseError("scenario must be a JSON object")
    kind = obj.get("kind")
    if kind not in KINDS:
        raise ParseError(f"kind must be one of {', '.join(KINDS)}; got {kind!r}")
    payload = obj.get("payload")
    if not isinstance(payload, dict):
        raise ParseError("payload must be an object")
    depth = _int_field(obj, "depth", DEFAULT_DEPTH, 1)
    degree = _int_field(obj, "degree", None, 0)
    tol = obj.get("tol", DEFAULT_TOL)
    if not isinstance(tol, (int, float)) or isinstance(tol, bool) or not tol > 0:
        raise ParseError("tol must be a positive number")
    sc = Scenario(kind, payload, depth, float(tol), degree, obj)
    sc.validate()
    return sc


def load_scenario(path) -> Scenario:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ParseError(f"cannot read scenario {path}: {e.strerror}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"scenario {path} is not valid JSON: {e.msg} at line {e.lineno}") from None
    return scenario_from_dict(obj)


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


__all__ = ["KINDS", "Scenario", "matrix_to_dict", "matrix_from_dict", "vector_to_dict",
           "vector_from_dict", "scenario_from_dict", "load_scenario", "dump_json"]
