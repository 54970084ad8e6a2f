"""Command line interface: JSON in, JSON out.

Commands (one per module capability):

    classify        Fuchsian verdicts at 0, 1, infinity
    reduce          local gauge series + residual flag + radius estimate
    connect         connection matrices at sample points + cocycle residuals
    generators      the density generator family + checks
    factor          elementary/regular factorization certificate
    check-morphism  residual table for a candidate morphism triple

Exit codes: 0 success, 2 validation error (malformed input), 3 analytic
failure (resonance, singular orbits, insufficient depth, ...).  Errors
are also reported as a machine-readable {"error": {...}} object.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import errors
from .cover import (ConnectionBundle, CoverPoint, build_bundle, connection_M0,
                    connection_Minf, verify_connection_equation)
from .exact import GMat, RatFun, RatMatrix, parse_ratfun
from .factorization import factor_regular_at_0, factor_regular_at_1
from .groupoid import (Character, LaurentLogPoly, MorphismTriple,
                       density_generators, verify_naturality)
from .reduction import reduce_at_0, reduce_at_1, reduce_at_inf, residual
from .systems import (MahlerEquation, MahlerSystem, classify_fuchsian,
                      companion_system)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_ANALYTIC = 3


# ----------------------------------------------------------------------
# JSON codecs
# ----------------------------------------------------------------------

def _c2j(x: complex):
    x = complex(x)
    return [x.real, x.imag]


def _mat2j(m):
    return [[_c2j(e) for e in row] for row in np.asarray(m, dtype=complex)]


def _j2mat(obj):
    return np.array([[complex(e[0], e[1]) for e in row] for row in obj],
                    dtype=complex)


def _gmat2j(m: GMat):
    return [[e.literal() for e in row] for row in m.a]


def parse_input(obj) -> MahlerSystem:
    """Decode the JSON system format into a validated system.

    {"p": int, "kind": "equation", "coeffs": [literals]}  or
    {"p": int, "kind": "system", "matrix": [[literals]]}.
    Equations are converted to their companion system.
    """
    if not isinstance(obj, dict):
        raise errors.ParseError("top-level JSON object expected")
    p = obj.get("p")
    if not isinstance(p, int) or p < 2:
        raise errors.ValidationError("p must be an integer >= 2")
    kind = obj.get("kind")
    if kind == "equation":
        coeffs = obj.get("coeffs")
        if not isinstance(coeffs, list) or len(coeffs) < 2:
            raise errors.ParseError("'coeffs' must list at least two literals")
        eq = MahlerEquation(p, [parse_ratfun(c) for c in coeffs])
        return companion_system(eq)
    if kind == "system":
        rows = obj.get("matrix")
        if not isinstance(rows, list) or not rows:
            raise errors.ParseError("'matrix' must be a nested list of literals")
        A = RatMatrix([[parse_ratfun(e) for e in row] for row in rows])
        return MahlerSystem(p, A)
    raise errors.ParseError("kind must be 'equation' or 'system'")


def serialize_system(S: MahlerSystem) -> dict:
    return {"p": S.p, "kind": "system",
            "matrix": [[e.literal() for e in row] for row in S.A.a]}


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise errors.ParseError(f"invalid JSON in {path}: {exc}") from exc
    except OSError as exc:
        raise errors.ValidationError(f"cannot read {path}: {exc}") from exc


def _load_system(path: str) -> MahlerSystem:
    return parse_input(_load_json(path))


def _load_samples(path: str):
    data = _load_json(path)
    if not isinstance(data, list):
        raise errors.ParseError("samples file must be a JSON list")
    pts = []
    for i, obj in enumerate(data):
        try:
            pts.append(CoverPoint(float(obj["r"]), float(obj["b"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise errors.ParseError(f"bad cover point at index {i}") from exc
    return pts


def _load_twists(path: str):
    data = _load_json(path)
    if not isinstance(data, list):
        raise errors.ParseError("twists file must be a JSON list")
    out = []
    for i, obj in enumerate(data):
        try:
            tag = obj["character"]
            lam = obj["lambda"]
            lam = complex(lam[0], lam[1]) if isinstance(lam, list) else complex(lam)
        except (KeyError, TypeError, IndexError) as exc:
            raise errors.ParseError(f"bad twist at index {i}") from exc
        if tag not in ("gamma1", "gamma2", "id"):
            raise errors.ParseError(f"unknown character tag {tag!r} at index {i}")
        out.append((tag, lam))
    return out


def _series_json(L):
    if L.f_hat.exact:
        coeffs = [_gmat2j(c) for c in L.f_hat.coeffs]
    else:
        coeffs = [_mat2j(c) for c in L.f_hat.coeffs]
    return coeffs


def _residual_json(rep):
    return "exact-zero" if rep.exact else rep.value


def _tag_json(tag):
    if tag.kind == "omega1":
        return {"kind": "omega1", "point": {"r": tag.point.r, "b": tag.point.b}}
    return {"kind": tag.kind}


def _prov_json(prov):
    out = {"kind": prov.kind}
    if prov.character is not None:
        out["character"] = prov.character.label or prov.character.kind
    if prov.lam is not None:
        out["lambda"] = _c2j(prov.lam)
    if prov.side is not None:
        out["side"] = prov.side
    if prov.point is not None:
        out["point"] = {"r": prov.point.r, "b": prov.point.b}
    return out


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------

def _cmd_classify(args) -> dict:
    S = _load_system(args.input)
    out = {}
    for place in ("0", "1", "inf"):
        rep = classify_fuchsian(S, place)
        out[place] = {"fuchsian": rep.fuchsian}
        if not rep.fuchsian:
            out[place]["reason"] = rep.reason
        else:
            out[place]["value"] = _gmat2j(rep.value)
    return {"command": "classify", "system": serialize_system(S),
            "fuchsian": out}


def _cmd_reduce(args) -> dict:
    S = _load_system(args.input)
    place = args.place
    if place == "0":
        L = reduce_at_0(S, args.order)
    elif place == "1":
        L = reduce_at_1(S, args.order, tol_res=args.tol_res)
    elif place == "inf":
        L = reduce_at_inf(S, args.order)
    else:
        raise errors.ValidationError("--place must be 0, 1 or inf")
    rep = residual(S, L)
    a_const = (_gmat2j(L.a_const) if isinstance(L.a_const, GMat)
               else _mat2j(L.a_const))
    return {"command": "reduce", "place": place, "order": args.order,
            "a_const": a_const,
            "coefficients": _series_json(L),
            "residual": _residual_json(rep),
            "radius_estimate": L.radius_estimate}


def _split_samples(samples):
    s0 = [z for z in samples if z.r < 1.0]
    si = [z for z in samples if z.r > 1.0]
    return s0, si


def _cmd_connect(args) -> dict:
    S = _load_system(args.input)
    samples = _load_samples(args.samples)
    B = build_bundle(S, order=args.order, depth_cap=args.depth_cap,
                     tol_res=args.tol_res)
    pts = []
    for zt in samples:
        if zt.r < 1.0:
            res = connection_M0(B, zt)
            side = "0"
        elif zt.r > 1.0:
            res = connection_Minf(B, zt)
            side = "inf"
        else:
            raise errors.InSingularLocus("sample on the unit circle")
        coc = verify_connection_equation(B, zt, side)
        pts.append({"point": {"r": zt.r, "b": zt.b}, "side": side,
                    "matrix": _mat2j(res.value), "depth": res.depth,
                    "estimate": res.estimate, "cocycle_residual": coc})
    return {"command": "connect", "order": args.order,
            "a_const": {"0": _mat2j(B.A0), "1": _mat2j(B.A1),
                        "inf": _mat2j(B.Ainf)},
            "points": pts}


def _cmd_generators(args) -> dict:
    S = _load_system(args.input)
    samples = _load_samples(args.samples)
    twists = _load_twists(args.twists) if args.twists else []
    s0, si = _split_samples(samples)
    B = build_bundle(S, order=args.order, depth_cap=args.depth_cap,
                     tol_res=args.tol_res)
    gens = density_generators(B, s0, si, twists)
    out = []
    for g in gens:
        item = {"source": _tag_json(g.source), "target": _tag_json(g.target),
                "matrix": _mat2j(g.matrix), "provenance": _prov_json(g.provenance)}
        if g.provenance.kind == "gamma0":
            item["cocycle_residual"] = verify_connection_equation(
                B, g.provenance.point, "0")
        elif g.provenance.kind == "gammaInf":
            item["cocycle_residual"] = verify_connection_equation(
                B, g.provenance.point, "inf")
        out.append(item)
    return {"command": "generators", "count": len(out), "elements": out}


def _cmd_factor(args) -> dict:
    data = _load_json(args.input)
    rows = data.get("matrix") if isinstance(data, dict) else None
    if not isinstance(rows, list):
        raise errors.ParseError("factor input needs a 'matrix' field")
    M = RatMatrix([[parse_ratfun(e) for e in row] for row in rows])
    place = args.place
    if place == "1":
        F = factor_regular_at_1(M)
    elif place == "0":
        F = factor_regular_at_0(M)
    else:
        raise errors.ValidationError("--place must be 0 or 1 for factor")
    elementary = []
    for T, D in F.elementary:
        elementary.append({
            "T": {"row_index": T.i, "row": [c.literal() for c in T.row]},
            "D": {"row_index": D.i, "u": D.u.literal()},
        })
    ok = F.reassemble() == M
    return {"command": "factor", "place": place,
            "prefactor_valuation": F.prefactor_valuation,
            "steps": F.steps,
            "elementary": elementary,
            "regular_part": [[e.literal() for e in row]
                             for row in F.regular_part.a],
            "reassembly_exact": ok}


def _cmd_check_morphism(args) -> dict:
    job = _load_json(args.input)
    try:
        Xs = parse_input(job["source"])
        Ys = parse_input(job["target"])
        s0 = _j2mat(job["morphism"]["s0"])
        sinf = _j2mat(job["morphism"]["sinf"])
        s1 = LaurentLogPoly.from_dict(
            {int(k): _j2mat(v) for k, v in job["morphism"]["s1"].items()})
    except (KeyError, TypeError, ValueError) as exc:
        raise errors.ParseError(f"bad morphism job: {exc}") from exc
    order = job.get("order", args.order)
    X = build_bundle(Xs, order=order, tol_res=args.tol_res)
    Y = build_bundle(Ys, order=order, tol_res=args.tol_res)
    morph = MorphismTriple(s0, s1, sinf)

    table = {}
    table["s0_intertwines"] = float(np.linalg.norm(s0 @ X.A0 - Y.A0 @ s0))
    table["sinf_intertwines"] = float(np.linalg.norm(sinf @ X.Ainf - Y.Ainf @ sinf))
    graded = []
    for k, Sk in s1.terms:
        graded.append({"degree": k, "residual": float(np.linalg.norm(
            (X.p ** float(k)) * Sk @ X.A1 - Y.A1 @ Sk))})
    table["s1_graded"] = graded
    conn = []
    samples = _load_samples(args.samples) if args.samples else []
    for zt in samples:
        if zt.r < 1.0:
            mx = connection_M0(X, zt).value
            my = connection_M0(Y, zt).value
            lhs = s1.eval_at(zt) @ mx
            rhs = my @ s0
            conn.append({"point": {"r": zt.r, "b": zt.b}, "side": "0",
                         "residual": float(np.linalg.norm(lhs - rhs))})
        elif zt.r > 1.0:
            mx = connection_Minf(X, zt).value
            my = connection_Minf(Y, zt).value
            lhs = s1.eval_at(zt) @ mx
            rhs = my @ sinf
            conn.append({"point": {"r": zt.r, "b": zt.b}, "side": "inf",
                         "residual": float(np.linalg.norm(lhs - rhs))})
    table["connection"] = conn
    return {"command": "check-morphism", "residuals": table}


# ----------------------------------------------------------------------
# entry point
# ----------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mahler",
        description="Local reductions, connection matrices and Galois "
                    "groupoid generators for regular singular Mahler systems.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, samples=False, twists=False, place=None):
        p.add_argument("--input", required=True, help="input JSON file")
        p.add_argument("--order", type=int, default=32, help="series order N")
        p.add_argument("--depth-cap", type=int, default=64, dest="depth_cap")
        p.add_argument("--tol-res", type=float, default=1e-9, dest="tol_res")
        p.add_argument("--out", help="output JSON file (default stdout)")
        if samples:
            p.add_argument("--samples", help="cover-point sample JSON file")
        if twists:
            p.add_argument("--twists", help="twists JSON file")
        if place:
            p.add_argument("--place", required=True, choices=place)

    common(sub.add_parser("classify", help="Fuchsian verdicts at 0, 1, inf"))
    common(sub.add_parser("reduce", help="local reduction to a constant system"),
           place=("0", "1", "inf"))
    pc = sub.add_parser("connect", help="connection matrices at sample points")
    common(pc, samples=True)
    pg = sub.add_parser("generators", help="density generator family")
    common(pg, samples=True, twists=True)
    common(sub.add_parser("factor", help="regular/elementary factorization"),
           place=("0", "1"))
    pm = sub.add_parser("check-morphism", help="verify a morphism triple")
    common(pm, samples=True)
    return ap


_HANDLERS = {
    "classify": _cmd_classify,
    "reduce": _cmd_reduce,
    "connect": _cmd_connect,
    "generators": _cmd_generators,
    "factor": _cmd_factor,
    "check-morphism": _cmd_check_morphism,
}

_VALIDATION = (errors.ValidationError, errors.DegenerateEquation,
               errors.SingularMatrix, errors.SingularGauge)


def _emit(obj: dict, out_path):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    handler = _HANDLERS[args.command]
    if getattr(args, "command", "") in ("connect",) and not args.samples:
        _emit({"error": {"kind": "ValidationError",
                         "detail": "connect requires --samples"}}, args.out)
        return EXIT_VALIDATION
    try:
        report = handler(args)
    except _VALIDATION as exc:
        _emit({"error": {"kind": type(exc).__name__, "detail": str(exc)}},
              args.out)
        return EXIT_VALIDATION
    except errors.AnalyticError as exc:
        payload = {"kind": type(exc).__name__, "detail": str(exc)}
        if isinstance(exc, errors.Resonant):
            payload["k"] = exc.k
            payload["eigenvalues"] = [_c2j(exc.lam), _c2j(exc.mu)]
        if isinstance(exc, errors.SampleInSingularLocus):
            payload["index"] = exc.index
            payload["side"] = exc.side
        _emit({"error": payload}, args.out)
        return EXIT_ANALYTIC
    _emit(report, args.out)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
