"""Command-line front end: ``jetgroups VERB [options] INPUT...``.

Exit codes: 0 success, 1 domain error, 2 parse error, 3 failed verification.
Results go to stdout and errors to stderr; with ``--json`` a single object
carrying either is printed to stdout.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import examples, linalg, matgroup
from .coeff import CycRational
from .diffeo import JetDiffeo
from .errors import JetError, ParseError, VerificationError
from .jetrep import check_dk_membership, represent_diffeo, represent_field
from .parsing import parse_value
from .render import render, render_matrix, render_series
from .series import TruncSeries
from .vfield import (
    JetVectorField,
    bch_dynkin,
    exp_nilpotent,
    lie_bracket,
    log_unipotent,
    one_parameter,
    pullback_field,
)

VERBS = (
    "exp", "log", "compose", "invert", "bracket", "bch", "pullback", "represent",
    "derived-finite", "kolchin", "verify-g2", "verify-gn", "delta",
)

# verb -> library operations it exposes (used by the coverage test)
OPERATIONS = {
    "exp": ("vfield.exp_nilpotent", "vfield.one_parameter"),
    "log": ("vfield.log_unipotent",),
    "compose": ("diffeo.compose",),
    "invert": ("diffeo.invert",),
    "bracket": ("vfield.lie_bracket",),
    "bch": ("vfield.bch_dynkin",),
    "pullback": ("diffeo.pullback_function", "vfield.pullback_field"),
    "represent": ("jetrep.represent_diffeo", "jetrep.represent_field", "jetrep.check_dk_membership"),
    "derived-finite": ("matgroup.enumerate_closure", "matgroup.derived_series_finite"),
    "kolchin": ("matgroup.kolchin_flag",),
    "verify-g2": ("examples.verify_g2",),
    "verify-gn": ("examples.verify_gn",),
    "delta": ("examples.delta_op", "examples.delta_power_expand"),
}


def _read_input(arg: str) -> str:
    """An argument naming an existing file is replaced by the file's text."""
    if os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            return fh.read().strip()
    return arg


def _load(arg: str, kind: str, n: int, K: int):
    text = _read_input(arg)
    if text.startswith("{"):
        data = json.loads(text)
        if kind == "diffeo":
            return JetDiffeo.from_json(data)
        if kind == "field":
            return JetVectorField.from_json(data)
        if kind == "series":
            return TruncSeries.from_json(data)
    return parse_value(text, kind, n, K)


def _parse_t(text: str) -> CycRational:
    return parse_value(text, "scalar")


def _need(inputs, count, verb):
    if len(inputs) != count:
        raise ParseError(f"'{verb}' takes {count} input(s), got {len(inputs)}", 1, 1, ("input expression",))


def _json_value(v):
    if hasattr(v, "to_json"):
        return v.to_json()
    if isinstance(v, tuple) and v and isinstance(v[0], tuple):
        return [[c.to_json() for c in row] for row in v]
    return v


def run(argv) -> tuple[int, str, str]:
    """Execute one command; returns (exit code, stdout text, stderr text)."""
    p = argparse.ArgumentParser(prog="jetgroups", description="Exact jets of formal diffeomorphisms.")
    p.add_argument("verb", choices=VERBS)
    p.add_argument("inputs", nargs="*", help="expressions, or paths of files holding them")
    p.add_argument("--n", type=int, default=None, help="number of variables")
    p.add_argument("--K", type=int, default=None, help="truncation order (default 4; verify-gn picks its own)")
    p.add_argument("--t", default=None, help="time parameter (exp, rational or field constant)")
    p.add_argument("--power", type=int, default=None, help="delta: print the coefficient table of Delta^k(fg)")
    p.add_argument("--max-K", type=int, default=24, help="verify-gn: largest order tried")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--json", dest="json", action="store_true")
    mode.add_argument("--text", dest="json", action="store_false")
    try:
        args = p.parse_intermixed_args(argv)
    except SystemExit as exc:
        return (0 if exc.code == 0 else 2), "", ""
    try:
        code, result, text = _dispatch(args)
    except ParseError as exc:
        return _fail(args, 2, "parse", str(exc))
    except VerificationError as exc:
        return _fail(args, 3, "verification", str(exc))
    except (JetError, ValueError, ZeroDivisionError, ArithmeticError) as exc:
        return _fail(args, 1, type(exc).__name__, str(exc))
    if args.json:
        body = {"verb": args.verb, "ok": code == 0, "result": result, "text": text}
        return code, json.dumps(body, sort_keys=True) + "\n", ""
    return code, text + "\n", ""


def _fail(args, code, kind, msg):
    if args.json:
        body = {"verb": args.verb, "ok": False, "error": {"kind": kind, "message": msg}}
        return code, json.dumps(body, sort_keys=True) + "\n", ""
    return code, "", f"jetgroups {args.verb}: {msg}\n"


def _dispatch(args):
    verb, ins = args.verb, args.inputs
    K = args.K if args.K is not None else 4
    n = args.n if args.n is not None else 1

    def one(kind):
        _need(ins, 1, verb)
        return _load(ins[0], kind, n, K)

    def two(k1, k2):
        _need(ins, 2, verb)
        return _load(ins[0], k1, n, K), _load(ins[1], k2, n, K)

    if verb == "exp":
        _need(ins, 1, verb)
        v = _load(ins[0], "any", n, K)
        if isinstance(v, TruncSeries):
            v = _load(ins[0], "diffeo", n, K)
        t = _parse_t(args.t) if args.t is not None else CycRational(1)
        if isinstance(v, JetVectorField):
            out = exp_nilpotent(v, t)
        elif isinstance(v, JetDiffeo):
            out = one_parameter(v, t)
        else:
            raise ParseError("exp expects a vector field or a unipotent jet", 1, 1, ("vector field",))
        return 0, out.to_json(), render(out)
    if verb == "log":
        out = log_unipotent(one("diffeo"))
        return 0, out.to_json(), render(out)
    if verb == "compose":
        a, b = two("diffeo", "diffeo")
        out = a.compose(b)
        return 0, out.to_json(), render(out)
    if verb == "invert":
        out = one("diffeo").inverse()
        return 0, out.to_json(), render(out)
    if verb == "bracket":
        X, Y = two("field", "field")
        out = lie_bracket(X, Y)
        return 0, out.to_json(), render(out)
    if verb == "bch":
        X, Y = two("field", "field")
        out = bch_dynkin(X, Y)
        return 0, out.to_json(), render(out)
    if verb == "pullback":
        _need(ins, 2, verb)
        phi = _load(ins[0], "diffeo", n, K)
        v = _load(ins[1], "any", n, K)
        if isinstance(v, JetVectorField):
            out = pullback_field(phi, v)
        else:
            out = phi.pullback(_load(ins[1], "series", n, K))
        return 0, out.to_json(), render(out)
    if verb == "represent":
        v = one("any")
        if isinstance(v, TruncSeries):
            v = _load(ins[0], "diffeo", n, K)
        if isinstance(v, JetVectorField):
            op = represent_field(v)
            extra = {}
        elif isinstance(v, JetDiffeo):
            op = represent_diffeo(v)
            extra = {"in_D_K": check_dk_membership(op)}
        else:
            raise ParseError("represent expects a jet or a vector field", 1, 1, ("tuple", "vector field"))
        basis = [render_series(TruncSeries.monomial(n, K, e)) for e in op.basis]
        text = "basis: " + ", ".join(basis) + "\n" + render_matrix(op.matrix)
        if extra:
            text += f"\nin D_K: {str(extra['in_D_K']).lower()}"
        result = op.to_json()
        result.update(extra)
        return 0, result, text
    if verb == "derived-finite":
        if not ins:
            raise ParseError("derived-finite needs generator matrices", 1, 1, ("matrix",))
        gens = [_load(a, "matrix", 1, K) for a in ins]
        G = matgroup.MatGroupDesc(len(gens[0]), tuple(gens))
        chain = matgroup.derived_series_finite(G)
        orders = [len(matgroup.enumerate_closure(H)) for H in chain]
        result = {"orders": orders, "derived_length": len(chain) - 1}
        text = f"orders: {' > '.join(map(str, orders))}\nderived length: {len(chain) - 1}"
        return 0, result, text
    if verb == "kolchin":
        if not ins:
            raise ParseError("kolchin needs unipotent matrices", 1, 1, ("matrix",))
        mats = [_load(a, "matrix", 1, K) for a in ins]
        P = matgroup.kolchin_flag(mats)
        Pinv = linalg.inverse(P)
        conj = [linalg.mul(linalg.mul(Pinv, U), P) for U in mats]
        text = "P = " + render_matrix(P) + "".join(f"\nP^-1 U{j + 1} P = {render_matrix(c)}" for j, c in enumerate(conj))
        return 0, {"P": _json_value(P), "conjugated": [_json_value(c) for c in conj]}, text
    if verb == "verify-g2":
        rep = examples.verify_g2(K)
        return _report(rep)
    if verb == "verify-gn":
        if args.n is None:
            raise ParseError("verify-gn needs --n", 1, 1, ("--n",))
        rep = examples.verify_gn(args.n, args.K, max_K=args.max_K)
        return _report(rep)
    if verb == "delta":
        if args.power is not None:
            table = examples.delta_power_expand(args.power)
            rows = sorted(table.items())
            text = "\n".join(f"c[{args.power},{m},{l}] = {c}" for (m, l), c in rows)
            return 0, [[m, l, c] for (m, l), c in rows], text
        f, phi0 = two("series", "diffeo")
        out = examples.delta_op(f, phi0)
        return 0, out.to_json(), render(out)
    raise AssertionError(verb)


def _clean(obj):
    """Report values made JSON friendly (TowerElements and the like are dropped)."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items() if not k.startswith("witness_")}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float) and obj == float("inf"):
        return "inf"
    return obj


def _report(rep: dict):
    rep = _clean(rep)
    lines = [
        f"claim: {rep['claim']}",
        f"expected: {rep['expected']}",
        f"computed: {rep['computed']}",
        f"status: {rep['status']}",
    ]
    if "K" in rep:
        lines.append(f"K: {rep['K']}")
    for w in rep.get("witnesses", []):
        lines.append("witness: " + ", ".join(f"{k}={v}" for k, v in w.items()))
    for f in rep.get("failures", []):
        lines.append(f"failure: {f}")
    return (0 if rep["status"] == "pass" else 3), rep, "\n".join(lines)


def main(argv=None) -> int:
    code, out, err = run(sys.argv[1:] if argv is None else argv)
    if out:
        sys.stdout.write(out)
    if err:
        sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
