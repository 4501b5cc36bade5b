"""Command-line front end.

Exit codes: 0 success, 1 usage or parse error, 2 domain or hypothesis error,
3 a check ran to completion and failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import finquiver, torquiver
from .numt import DomainError, IntMatrix
from .starcalc import verify as V
from .starcalc.algebra import StarAlgebra
from .starcalc.words import ParseError, element_to_json, format_element, normalize


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit 2, which is reserved for domain errors
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _pair(text: str) -> tuple[int, int]:
    try:
        n, m = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected n,m but got {text!r}")
    return n, m


def _matrix(text: str) -> IntMatrix:
    try:
        return IntMatrix.parse(text)
    except (ValueError, DomainError) as e:
        raise argparse.ArgumentTypeError(f"bad matrix {text!r}: {e}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True, ensure_ascii=False))
    else:
        print(text)


# -- finite quivers ----------------------------------------------------------


def cmd_decompose(args) -> int:
    rep = finquiver.algebra_decomposition(args.p, args.n, args.m)
    payload = {"p": args.p, "n": args.n, "m": args.m, "rendered": rep.render(), **rep.as_dict()}
    _emit(args, payload, rep.render())
    return 0


def cmd_census(args) -> int:
    classes = finquiver.census(args.p)
    payload = {
        "p": args.p,
        "class_count": len(classes),
        "classes": [{"representative": list(c.representative), "members": [list(m) for m in c.members]} for c in classes],
    }
    lines = [f"{len(classes)} classes"]
    for c in classes:
        members = " ".join(f"Q_{n},{m}" for n, m in c.members)
        lines.append(f"  Q_{c.representative[0]},{c.representative[1]}: {members}")
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_iso(args) -> int:
    q1 = finquiver.build(args.p, *args.q1)
    q2 = finquiver.build(args.p, *args.q2)
    found = finquiver.isomorphic(q1, q2)
    payload: dict = {"p": args.p, "q1": list(args.q1), "q2": list(args.q2), "isomorphic": found is not None}
    lines = [f"isomorphic: {'yes' if found else 'no'}"]
    if found:
        vmap, emap = found
        payload["vertex_map"] = [[v, vmap[v]] for v in sorted(vmap)]
        payload["edge_map"] = [[list(e), list(emap[e])] for e in sorted(emap)]
        lines.append("vertex map: " + " ".join(f"{v}->{vmap[v]}" for v in sorted(vmap)))
        lines.append("edge map: " + " ".join(f"{e}->{emap[e]}" for e in sorted(emap)))
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_build(args) -> int:
    q = finquiver.build(args.p, args.n, args.m)
    text = q.to_json()
    print(text)
    return 0


# -- torus quivers -----------------------------------------------------------


def cmd_reduce(args) -> int:
    spec, U, V_ = torquiver.reduce(args.F, args.G)
    payload = {"F": spec.F.tolist(), "G": spec.G.tolist(), "U": U.tolist(), "V": V_.tolist()}
    text = "\n".join(
        [
            f"F' = diag({', '.join(map(str, spec.a))})",
            f"G' = {spec.G.format()}",
            f"U = {U.format()}",
            f"V = {V_.format()}",
        ]
    )
    _emit(args, payload, text)
    return 0


def _spec(args) -> torquiver.TorusQuiverSpec:
    if args.F.d != args.G.d:
        raise DomainError("F and G must have the same size")
    spec, _, _ = torquiver.reduce(args.F, args.G)
    return spec


def cmd_onb(args) -> int:
    spec = _spec(args)
    rep = torquiver.verify_onb(spec, samples=args.samples, seed=args.seed)
    ok = rep.passed(args.tol)
    payload = {**json.loads(rep.to_json()), "tol": args.tol, "passed": ok}
    text = "\n".join(
        [
            f"max orthonormality defect: {rep.orth_defect:.3e}",
            f"max reconstruction defect: {rep.recon_defect:.3e}",
            f"samples: {rep.samples} seed: {rep.seed}",
            "pass" if ok else "FAIL",
        ]
    )
    _emit(args, payload, text)
    return 0 if ok else 3


# -- symbolic ---------------------------------------------------------------


def cmd_normalize(args) -> int:
    alg = StarAlgebra(_spec(args))
    x = normalize(alg, args.word)
    payload = {"text": format_element(x), **json.loads(element_to_json(x))}
    _emit(args, payload, format_element(x))
    return 0


def cmd_verify(args) -> int:
    alg = StarAlgebra(_spec(args))
    check = args.check
    if check == "presentation":
        rep = V.verify_presentation(alg)
    elif check == "matrix-units":
        rep = V.verify_matrix_units(alg, args.k)
    elif check == "power-quotient":
        rep = V.verify_power_quotient(alg, args.k)
    elif check in ("subalg-gens", "twisted"):
        ks = args.kk if args.kk is not None else [1] * alg.d
        fn = V.verify_subalgebra_generators if check == "subalg-gens" else V.verify_twisted_family
        rep = fn(alg, ks)
    elif check == "diagram":
        rep = V.verify_colimit_diagram(alg, args.k)
    else:
        rep = V.verify_crossed_product(alg, args.k, trials=args.trials, seed=args.seed)
    text = rep.summary()
    if "witnesses" in rep.notes:
        text += "\n" + "\n".join(f"  {k} = {w}" for k, w in rep.notes["witnesses"].items())
    _emit(args, rep.as_dict(), text)
    if rep.passed:
        return 0
    return 2 if not all(rep.hypotheses.values()) else 3


CHECKS = ["presentation", "power-quotient", "subalg-gens", "twisted", "matrix-units", "diagram", "crossed-product"]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tgquiver", description="Group quivers over Z_p and T^d, and their Cuntz-Pimsner algebras.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, func, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.set_defaults(func=func)
        return p

    p = add("decompose", cmd_decompose, "block decomposition of O_{n,m}(Z_p)")
    for flag in ("--p", "--n", "--m"):
        p.add_argument(flag, type=int, required=True)
    p = add("census", cmd_census, "isomorphism classes of all Q_{n,m}(Z_p)")
    p.add_argument("--p", type=int, required=True)
    p = add("iso", cmd_iso, "decide Q_{n1,m1}(Z_p) ~ Q_{n2,m2}(Z_p)")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q1", type=_pair, required=True, metavar="N,M")
    p.add_argument("--q2", type=_pair, required=True, metavar="N,M")
    p = add("build", cmd_build, "edge list of Q_{n,m}(Z_p) as JSON")
    for flag in ("--p", "--n", "--m"):
        p.add_argument(flag, type=int, required=True)

    def torus(p: argparse.ArgumentParser) -> None:
        p.add_argument("--F", type=_matrix, required=True, help='rows separated by ";", e.g. "2,0;0,3"')
        p.add_argument("--G", type=_matrix, required=True)

    p = add("reduce", cmd_reduce, "Smith reduction of (F, G) to diagonal F")
    torus(p)
    p = add("onb", cmd_onb, "numeric check of the orthonormal basis y^nu")
    torus(p)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=torquiver.VERIFY_TOL)
    p = add("normalize", cmd_normalize, "normal form of a word in U_j, S, S*")
    torus(p)
    p.add_argument("--word", required=True)
    p = add("verify", cmd_verify, "run a relation suite")
    torus(p)
    p.add_argument("--check", choices=CHECKS, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--kk", type=_int_list, default=None, help="per-coordinate exponents k_1,...,k_d")
    p.add_argument("--trials", type=int, default=25)
    p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 1
    except DomainError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
