"""``qabkit`` command line.

Exit status: 0 success, 1 usage or input error, 2 a violation was found.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction

from . import __version__, divkit, fpmod, normtool, torsion, universality
from .fpmod import FpMorphism, FpObject, IllDefined
from .linalg import ExactMatrix, RingError
from .universality import NotRepresentable, UnsupportedContext

FORMAT_TAG = f"qabkit-report/{__version__}"
OK, INPUT_ERROR, VIOLATION = 0, 1, 2
VERBS = ("obj", "mor", "op", "classify", "axiom-check", "prop32", "norm-demo")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


# -- input loading --------------------------------------------------------------------


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def load_morphism(path: str):
    """FpMorphism, or StdMorphism when the endpoints are given as text."""
    d = _read_json(path)
    body = d.get("morphism", d) if isinstance(d, dict) else None
    if not isinstance(body, dict) or "src" not in body:
        raise UsageError(f"{path}: expected a morphism object")
    if isinstance(body["src"], str):
        return divkit.StdMorphism.from_json(body)
    return FpMorphism.from_json(d)


def load_object(args):
    if args.text:
        return divkit.StdObject.parse(args.text)
    if args.input:
        d = _read_json(args.input)
        if isinstance(d, dict) and isinstance(d.get("object", d), str):
            return divkit.StdObject.parse(d.get("object", d))
        return FpObject.from_json(d)
    if args.relations is not None:
        rows = json.loads(args.relations)
        return fpmod.make_object(
            ExactMatrix([[Fraction(str(x)) for x in r] for r in rows], ncols=len(rows[0]) if rows else 0)
            if rows
            else ExactMatrix.zeros(args.generators or 0, 0)
        )
    raise UsageError("obj needs --text, --in or --relations")


# -- rendering --------------------------------------------------------------------------


def _describe_fp(M: FpObject) -> dict:
    return {"normal_form": str(M), "rank": M.rank, "factors": list(M.factors)}


def _describe_map(f) -> dict:
    if isinstance(f, FpMorphism):
        return {"src": str(f.src), "dst": str(f.dst), "std_matrix": [[str(x) for x in r] for r in f.std_matrix().tolist()]}
    return f.to_json()


def _render_text(report: dict) -> str:
    lines = []

    def walk(prefix, v):
        if isinstance(v, dict):
            for k, x in v.items():
                walk(f"{prefix}.{k}" if prefix else str(k), x)
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            for i, x in enumerate(v):
                walk(f"{prefix}[{i}]", x)
        else:
            lines.append(f"{prefix}: {v if not isinstance(v, (list, bool)) else json.dumps(v)}")

    walk("", report)
    return "\n".join(lines)


# -- verbs ----------------------------------------------------------------------------------


def cmd_obj(args):
    M = load_object(args)
    if isinstance(M, divkit.StdObject):
        D, _ = divkit.divisible_part(M)
        return {"object": str(M), "divisible_part": str(D), "reduced_part": str(divkit.reduced_part(M))}, {}
    return {"object": _describe_fp(M), "torsion": str(torsion.radical(M)[0])}, {}


def cmd_mor(args):
    f = load_morphism(args.mor)
    out = {"morphism": _describe_map(f)}
    if isinstance(f, FpMorphism):
        out.update(is_mono=f.is_mono(), is_epi=f.is_epi(), is_iso=f.is_iso())
    return out, {}


def _fp_view(token):
    return universality.get_context(token).view if token != "div" else None


def cmd_op(args):
    name = args.operation
    if name in ("pushout", "pullback"):
        if not (args.f and args.g):
            raise UsageError(f"op {name} needs --f and --g")
        f, g = load_morphism(args.f), load_morphism(args.g)
    else:
        if not args.mor:
            raise UsageError(f"op {name} needs --mor")
        f = load_morphism(args.mor)
    if isinstance(f, divkit.StdMorphism):
        return _std_op(name, f, g if name in ("pushout", "pullback") else None, args.context), {}
    view = _fp_view(args.context or "ab")
    if name == "kernel":
        K, k = view.kernel(f)
        return {"kernel": _describe_fp(K), "inclusion": _describe_map(k)}, {}
    if name == "cokernel":
        C, c = view.cokernel(f)
        return {"cokernel": _describe_fp(C), "projection": _describe_map(c)}, {}
    if name == "decompose":
        d = torsion.decompose_in(view, f)
        return {
            "kernel": str(d.kernel_obj), "cokernel": str(d.cokernel_obj),
            "coimage": str(d.coim_obj), "image": str(d.im_obj),
            "fbar": _describe_map(d.fbar), "is_strict": d.is_strict, "composite_ok": d.check(),
        }, {}
    if name == "pushout":
        sq = view.pushout(f, g)
        return {
            "object": _describe_fp(sq.obj), "f_prime": _describe_map(sq.f_prime), "g_prime": _describe_map(sq.g_prime),
            "ker_f": str(sq.ker_f[0]), "ker_f_prime": str(sq.ker_f_prime[0]),
            "psi_is_epi": sq.psi_is_epi(), "commutes": sq.commutes(),
        }, {}
    if name == "pullback":
        sq = view.pullback(f, g)
        return {
            "object": _describe_fp(sq.obj), "f_prime": _describe_map(sq.f_prime), "g_prime": _describe_map(sq.g_prime),
            "commutes": sq.commutes(),
        }, {}
    raise UsageError(f"unknown operation {name!r}")


def _std_op(name, f, g, context):
    if name == "kernel":
        K, k = divkit.std_kernel(f)
        return {"kernel": str(K), "inclusion": k.to_json()}
    if name == "cokernel":
        C, c = divkit.std_cokernel(f)
        return {"cokernel": str(C), "projection": c.to_json()}
    if name == "pushout":
        sq = divkit.std_pushout(f, g)
        return {
            "object": str(sq.obj), "f_prime": sq.f_prime.to_json(), "g_prime": sq.g_prime.to_json(),
            "ker_f_prime": None if sq.ker_f_prime is None else str(sq.ker_f_prime[0]),
            "psi": None if sq.psi is None else sq.psi.to_json(), "commutes": sq.commutes(),
        }
    if name == "pullback":
        sq = divkit.div_pullback(f, g) if context == "div" else divkit.std_pullback(f, g)
        return {
            "object": str(sq.obj), "ambient_object": str(sq.ambient_obj),
            "f_prime": sq.f_prime.to_json(), "g_prime": sq.g_prime.to_json(), "commutes": sq.commutes(),
        }
    raise UsageError(f"operation {name!r} is not available for divisible-group morphisms")


def cmd_classify(args):
    f = load_morphism(args.mor)
    ctx = args.context or ("div" if isinstance(f, divkit.StdMorphism) else "ab")
    if (ctx == "div") != isinstance(f, divkit.StdMorphism):
        raise UsageError(f"context {ctx!r} does not match the morphism type")
    rep = universality.classify(f, ctx)
    violations = 0 if rep.chain_holds() else 1
    return rep.to_json(), {"violations": violations}


def cmd_axiom_check(args):
    if args.context not in ("fin-tors", "lat", "p-local", "div"):
        raise UsageError("axiom-check --context must be one of fin-tors, lat, p-local, div")
    if args.trials < 0:
        raise UsageError("--trials must be non-negative")
    rep = universality.axiom_stability_trial(args.context, args.seed, args.trials, p=args.prime, workers=args.workers)
    body = rep.to_json()
    body.pop("elapsed_ms")
    counts = {
        "trials": args.trials,
        "violations": len(rep.violations),
        "not_representable": rep.not_representable,
    }
    return body, counts


EXPECTED_QUOTIENT_FLAGS = {
    "is_mono": True, "is_epi": True, "is_strict_mono": False, "is_strict_epi": False,
    "is_universal_mono": True, "is_universal_epi": False,
}


def cmd_prop32(args):
    out = divkit.quotient_map_report(args.prime)
    flags = out["classification"]["flags"]
    mism = {k: flags[k] for k, v in EXPECTED_QUOTIENT_FLAGS.items() if flags[k] != v}
    if out["ambient_pullback"] != f"Z[1/{args.prime}]" or out["div_pullback"] != "0":
        mism["pullback"] = [out["ambient_pullback"], out["div_pullback"]]
    out["mismatches"] = mism
    return out, {"violations": int(bool(mism))}


def cmd_norm_demo(args):
    if args.family not in normtool.FAMILIES:
        raise UsageError(f"unknown family {args.family!r}; choose from {', '.join(normtool.FAMILIES)}")
    if args.max_n < 1:
        raise UsageError("--max-n must be positive")
    rep = normtool.witness_collapse(normtool.FAMILIES[args.family](), args.max_n)
    bad = sum(not w.satisfies_bounds(args.tol) for w in rep.witnesses)
    return rep.to_json(), {"violations": bad}


HANDLERS = {
    "obj": cmd_obj, "mor": cmd_mor, "op": cmd_op, "classify": cmd_classify,
    "axiom-check": cmd_axiom_check, "prop32": cmd_prop32, "norm-demo": cmd_norm_demo,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--seed", type=int, default=None, help="defaults to $QABKIT_SEED, then 0")
    common.add_argument("--out", help="write the report here instead of stdout")

    p = _Parser(prog="qabkit", description="Quasi-abelian constructions on finitely presented and divisible groups.")
    p.add_argument("--version", action="version", version=FORMAT_TAG)
    sub = p.add_subparsers(dest="verb", parser_class=_Parser)

    s = sub.add_parser("obj", parents=[common], help="normal form of an object")
    s.add_argument("--in", dest="input")
    s.add_argument("--text", help='divisible-group text, e.g. "Q + Z/4 + Prufer(3)"')
    s.add_argument("--relations", help="JSON relation matrix, one row per generator")
    s.add_argument("--generators", type=int)

    s = sub.add_parser("mor", parents=[common], help="validate a morphism")
    s.add_argument("--mor", required=True)

    s = sub.add_parser("op", parents=[common], help="kernel, cokernel, decompose, pushout, pullback")
    s.add_argument("operation", choices=("kernel", "cokernel", "decompose", "pushout", "pullback"))
    s.add_argument("--mor")
    s.add_argument("--f")
    s.add_argument("--g")
    s.add_argument("--context", choices=universality.CONTEXTS)

    s = sub.add_parser("classify", parents=[common], help="mono/epi/strict/universal flags")
    s.add_argument("--mor", required=True)
    s.add_argument("--context", choices=universality.CONTEXTS)

    s = sub.add_parser("axiom-check", parents=[common], help="pullback/pushout stability trials")
    s.add_argument("--context", required=True)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--prime", type=int, default=universality.DEFAULT_PRIME)

    s = sub.add_parser("prop32", parents=[common], help="replay the Q -> Q/Z example")
    s.add_argument("--prime", type=int, default=3)

    s = sub.add_parser("norm-demo", parents=[common], help="collapse witnesses for an operator family")
    s.add_argument("--family", default="trunc-diag")
    s.add_argument("--max-n", type=int, default=100)
    s.add_argument("--tol", type=float, default=normtool.DEFAULT_TOL)
    return p


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("QABKIT_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError as exc:
        raise UsageError(f"QABKIT_SEED must be an integer, got {env!r}") from exc


def run(argv=None) -> tuple[int, dict | None, str]:
    """Parse and dispatch.  Returns (status, report, error message)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.verb is None:
            raise UsageError(parser.format_help())
        args.seed = _seed(args)
        t0 = time.perf_counter()
        payload, counts = HANDLERS[args.verb](args)
    except UsageError as exc:
        return INPUT_ERROR, None, str(exc)
    except (IllDefined, divkit.IllDefined) as exc:
        return INPUT_ERROR, None, f"IllDefined: {exc}"
    except (RingError, UnsupportedContext, NotRepresentable, ValueError, KeyError, TypeError) as exc:
        return INPUT_ERROR, None, f"{type(exc).__name__}: {exc}"
    status = VIOLATION if counts.get("violations") else OK
    echo = {k: v for k, v in vars(args).items() if k not in ("format", "out")}
    report = {
        "format": FORMAT_TAG,
        "command": echo,
        "seed": args.seed,
        "result": payload,
        "counts": counts,
        "status": status,
        "timing": {"elapsed_ms": round((time.perf_counter() - t0) * 1000, 3)},
    }
    report["_render"] = (args.format, args.out)
    return status, report, ""


def main(argv=None) -> int:
    status, report, err = run(argv)
    if report is None:
        print(err, file=sys.stderr)
        return status
    fmt, out = report.pop("_render")
    text = _render_text(report) if fmt == "text" else json.dumps(report, indent=2, sort_keys=True)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if status == VIOLATION:
        for v in report["result"].get("violations", []) if isinstance(report["result"], dict) else []:
            print(json.dumps(v, sort_keys=True), file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
