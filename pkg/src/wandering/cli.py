"""Command-line front end: load a scenario, build its geometry, run checks, emit JSON or CSV.

Exit status is 0 when every non-skipped check passes, 1 when some check
fails and 2 when the scenario cannot be parsed, validated or built.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .characteristic import RowContraction, nagy_foias_dilation, rotation_system
from .errors import UNotWandering, WanderingError
from .fockspace import (Embedding, check_internal_decomposition, check_row_isometry,
                        dilation_output_embedding, dilation_row_isometry, is_wandering)
from .io import dump_json, load_scenario, matrix_to_dict
from .kernel import (ToeplitzKernel, analyticity_battery, check_intertwining, kernel_contractivity,
                     toeplitz_matrix, verify_toeplitz_structure)
from .lifting import (extract_gamma, lifting_geometry, lifting_geometry_checks, lifting_system,
                      verify_restrictions)
from .markov import markov_row_isometry, markov_system, prop_output_space, prop_wandering_check
from .matcore import argmax_entry, max_abs, spectral_norm
from .report import CheckResult, Worst
from .transfer import (eval_theta, formal_series, sample_circle, series_coefficient,
                       system_matrix)
from .words import EMPTY, words_up_to

COMMANDS = ("verify", "kernel", "series", "eval", "characteristic", "lifting", "markov")
PIPELINE_KIND = {"characteristic": "dilation", "lifting": "lifting", "markov": "markov"}


@dataclass
class Built:
    """Geometry and system matrix derived from a scenario."""

    V: object
    i0: Embedding
    j0: Embedding
    system: object
    obj: object = None


def build(sc) -> Built:
    """Construct ``(V, i0, j0)`` and the kind's own system matrix."""
    N = sc.depth
    if sc.kind == "dilation":
        T = sc.row_contraction()
        V, i0, j0 = nagy_foias_dilation(T, N)
        return Built(V, i0, j0, rotation_system(T), obj=T)
    if sc.kind == "lifting":
        L = sc.lifting_split()
        V, i0, j0 = lifting_geometry(L, N)
        return Built(V, i0, j0, lifting_system(L), obj=L)
    if sc.kind == "markov":
        I = sc.interaction()
        V, i0, j0 = markov_row_isometry(I, N)
        return Built(V, i0, j0, markov_system(I), obj=I)
    S = sc.system()
    V, i0 = dilation_row_isometry(S, N)
    return Built(V, i0, dilation_output_embedding(V, i0, S), S, obj=S)


def kind_system(sc):
    """The kind's system matrix without building the dilation space."""
    if sc.kind == "dilation":
        return rotation_system(sc.row_contraction())
    if sc.kind == "lifting":
        return lifting_system(sc.lifting_split())
    if sc.kind == "markov":
        return markov_system(sc.interaction())
    return sc.system()


def _effective(ker, degree):
    return max(0, min(degree, ker.max_omega(), ker.max_sigma()))


def _circle(radius, samples):
    return [radius * np.exp(2j * np.pi * k / samples) for k in range(samples)]


def verify_checks(b: Built, degree: int, tol: float, samples: int = 64,
                  radius: float = 0.99) -> list:
    """The generic battery on a pair ``(i0, j0)`` under ``V``.

    Checks needing a precondition that failed are listed as skipped.
    """
    V, i0, j0 = b.V, b.i0, b.j0
    ker = ToeplitzKernel(V, i0, j0)
    m = _effective(ker, degree)
    out = [check_row_isometry(V, tol)]
    out += check_internal_decomposition(V, i0, tol)
    wu = _renamed(is_wandering(V, i0, ker.max_omega(), tol), "U0_wandering")
    wy = _renamed(is_wandering(V, j0, ker.max_sigma(), tol), "Y0_wandering")
    out += [wu, wy]
    out.append(verify_toeplitz_structure(ker, m, tol))
    battery = analyticity_battery(ker, m, tol)
    out += battery.values()

    S = None
    if battery["c1"]:
        try:
            S = system_matrix(V, i0, j0)
        except UNotWandering as e:
            out.append(CheckResult.skip("realization", str(e)))
    if S is not None:
        worst = Worst()
        for w in words_up_to(V.d, m):
            worst.update(max_abs(series_coefficient(S, w) - ker.entry(w, EMPTY)), w)
        out.append(worst.result("realization", tol, degree=m))
        worst = Worst()
        for w in words_up_to(V.d, degree):
            worst.update(max_abs(series_coefficient(S, w) - series_coefficient(b.system, w)), w)
        out.append(worst.result("system_consistency", tol, degree=degree))
    elif battery["c1"].passed is False:
        out.append(CheckResult.skip("realization", f"c1 fails at {battery['c1'].witness}"))

    if wu and wy:
        out.append(check_intertwining(ker, m, tol))
        M = toeplitz_matrix(ker, m, tol)
        _, s, Vh = np.linalg.svd(M)
        sv = float(s[0]) if s.size else 0.0
        # witness: input basis index carrying most of the top right singular vector
        col = int(np.argmax(np.abs(Vh[0]))) if s.size else None
        out.append(CheckResult.from_dev("toeplitz_contractive", sv - 1.0, tol, col,
                                        largest_singular_value=sv))
    else:
        reason = "U0 or Y0 is not wandering"
        out += [CheckResult.skip("toeplitz_intertwining", reason),
                CheckResult.skip("toeplitz_contractive", reason)]
    out.append(kernel_contractivity(ker, m, tol))

    if V.d == 1 and S is not None:
        worst = Worst()
        for z in _circle(radius, samples):
            worst.update(spectral_norm(eval_theta(S, z)), complex(z))
        out.append(CheckResult.from_dev("theta_contractive", worst.dev - 1.0, tol, worst.where,
                                        largest_singular_value=worst.dev, radius=radius,
                                        samples=samples))
    else:
        out.append(CheckResult.skip("theta_contractive",
                                    "numeric evaluation needs d = 1" if V.d != 1
                                    else "no system matrix"))
    return out


def characteristic_checks(T: RowContraction, tol: float) -> list:
    sig = rotation_system(T).sigma()
    co = sig @ sig.conj().T - np.eye(sig.shape[0])
    iso = sig.conj().T @ sig - np.eye(sig.shape[1])
    return [CheckResult.from_dev("rotation_coisometry", max_abs(co), tol, argmax_entry(co)),
            CheckResult.from_dev("rotation_isometry", max_abs(iso), tol, argmax_entry(iso))]


def lifting_checks(b: Built, tol: float, samples: int, radius: float) -> list:
    L = b.obj
    _, residual = extract_gamma(L)
    out = [CheckResult.from_dev("gamma_extraction", residual, tol, "Q")]
    out += lifting_geometry_checks(L, b.V, b.j0, tol)
    if L.d == 1:
        out += verify_restrictions(L, _circle(radius, samples), max(tol, 1e-8))
    else:
        out += [CheckResult.skip("restriction_R", "restrictions are sampled for d = 1 only"),
                CheckResult.skip("restriction_S", "restrictions are sampled for d = 1 only")]
    return out


def markov_checks(sc, b: Built, tol: float) -> list:
    I = b.obj
    HS = sc.optional_matrix("HS")
    if HS is None:
        HS = I.omegaH[:, None]
    Y0 = sc.optional_matrix("Y0")
    if Y0 is None:
        Y0 = prop_output_space(I, HS, sc.depth)
    return [CheckResult.from_dev("vacuum", I.vacuum_defect(), tol, "omegaH(x)omegaK")] + \
        [_renamed(r, "prop_" + r.name) for r in prop_wandering_check(I, HS, Y0, sc.depth, tol)]


def _renamed(r, name):
    r.name = name
    return r


def kernel_table(b: Built, degree: int) -> dict:
    ker = ToeplitzKernel(b.V, b.i0, b.j0)
    m = _effective(ker, degree)
    ker.fill(m)
    words = words_up_to(b.V.d, m)
    return {"maxlen": m, "entries": [{"sigma": str(s), "omega": str(w),
                                      "matrix": matrix_to_dict(ker.entry(s, w))}
                                     for s in words for w in words]}


def series_summary(S, degree: int) -> dict:
    F = formal_series(S, degree)
    norms = [spectral_norm(c) for c in F.coeffs.values()]
    return {"d": S.d, "degree": degree, "dims": list(S.dims), "coefficients": len(norms),
            "max_coefficient_norm": max(norms) if norms else 0.0}


def eval_csv(S, samples: int, radius: float) -> str:
    rows = sample_circle(S, radius, samples)
    width = max((len(r[2]) for r in rows), default=0)
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["theta_index", "z_re", "z_im"] + [f"sv_{i + 1}" for i in range(width)])
    for k, z, sv in rows:
        w.writerow([k, repr(z.real), repr(z.imag)] + [repr(float(s)) for s in sv])
    return buf.getvalue()


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wandering", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("scenario", help="scenario JSON file")
    p.add_argument("--depth", type=int, help="truncation depth N (overrides the scenario)")
    p.add_argument("--degree", type=int, help="maximal word length for series and checks")
    p.add_argument("--tol", type=float, help="absolute tolerance for checks")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--no-meta", action="store_true", help="omit timing and version (byte-stable)")
    p.add_argument("--samples", type=int, default=64, help="boundary samples for d = 1")
    p.add_argument("--radius", type=float, default=0.99, help="sampling radius, < 1")
    return p


def _apply_flags(sc, args):
    if args.depth is not None:
        if args.depth < 1:
            raise WanderingError("--depth must be >= 1")
        if "degree" not in sc.source:
            sc.degree = args.depth
        sc.depth = args.depth
    if args.degree is not None:
        if args.degree < 0:
            raise WanderingError("--degree must be >= 0")
        sc.degree = args.degree
    if args.tol is not None:
        if not args.tol > 0:
            raise WanderingError("--tol must be positive")
        sc.tol = args.tol
    if not 0 < args.radius < 1:
        raise WanderingError("--radius must lie in (0, 1)")
    if args.samples < 1:
        raise WanderingError("--samples must be >= 1")


def _emit(text: str, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    args = _parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        sc = load_scenario(args.scenario)
        _apply_flags(sc, args)
        want = PIPELINE_KIND.get(args.command)
        if want and sc.kind != want and not (want == "dilation" and sc.kind == "raw"):
            raise WanderingError(f"command '{args.command}' needs a {want} scenario, got {sc.kind}")
        if args.command == "eval":
            S = kind_system(sc)
            if S.d != 1:
                raise WanderingError("eval samples the disc and needs d = 1")
            _emit(eval_csv(S, args.samples, args.radius), args.out)
            return 0
        b = build(sc)
        report = {"command": args.command, "scenario": sc.echo()}
        checks = []
        if args.command == "kernel":
            report["kernel"] = kernel_table(b, sc.degree)
        elif args.command == "series":
            report["series"] = formal_series(b.system, sc.degree).to_dict()
        else:
            if args.command == "characteristic" and sc.kind == "dilation":
                checks += characteristic_checks(b.obj, sc.tol)
            elif args.command == "lifting":
                checks += lifting_checks(b, sc.tol, min(args.samples, 5), args.radius)
            elif args.command == "markov":
                checks += markov_checks(sc, b, sc.tol)
            checks += verify_checks(b, sc.degree, sc.tol, args.samples, args.radius)
            report["series"] = series_summary(b.system, sc.degree)
        report["checks"] = [c.to_dict() for c in checks]
        failed = [c.name for c in checks if c.passed is False]
        report["pass"] = not failed
        report["failed"] = failed
        if not args.no_meta:
            report["meta"] = {"version": __version__, "seconds": time.perf_counter() - t0}
        _emit(dump_json(report), args.out)
        return 0 if not failed else 1
    except (WanderingError, ValueError) as e:
        print(f"wandering {args.command}: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())
