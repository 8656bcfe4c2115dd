"""Command-line driver: ``reflcat <command> ...``.

Exit codes: 0 success, 1 a verification failed, 2 usage or input error,
3 resource budget exceeded.
"""
import argparse
import json
import sys
import time

import numpy as np

from . import __version__
from .cohomology import (DEFAULT_BUDGET, FiniteGroup, GModule, bar_h_n, cyclic_h_n, h2_natural,
                         h2_stable_elements, sylow_cup_squares)
from .errors import DomainError, ResourceError, StructuralError, UnsupportedError
from .families import build, classify_rank2_bruteforce, verify_family
from .fusion import MetricGroup, fusion_axioms, fusion_ring, is_irreducible_skeleton, is_reflection_skeleton, skeleton
from .linalg import FpMatrix
from .quadspace import QuadraticSpace, discriminant, standard_space, witt_decompose
from .report import SCHEMA_VERSION, TABLES, TIERS, emit_tables, parse_primes, to_markdown

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise StructuralError(message)


def _common(sp):
    sp.add_argument("--format", choices=("json", "md"), default="json")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--memory-budget", type=int, default=DEFAULT_BUDGET, metavar="BYTES")
    sp.add_argument("--timing", action="store_true", help="include wall-clock time (breaks byte determinism)")


def make_parser():
    ap = _Parser(prog="reflcat", description="Reflection groups over F_p, their cohomology and fusion rings.")
    ap.add_argument("--version", action="version", version=f"reflcat {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("qspace", help="invariants of a quadratic space")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--dim", type=int)
    sp.add_argument("--disc", choices=("+", "-"), default="+")
    sp.add_argument("--gram", help="Gram matrix as JSON, e.g. '[[1,0],[0,2]]'")
    _common(sp)

    for name, helptext in (("build", "construct a family and report its order"),
                           ("verify", "construct a family and run its checks")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("spec", help="family spec, e.g. 'H3:p=11,zeta=4' or 'O2:dim=3,p=5'")
        _common(sp)

    sp = sub.add_parser("rank2", help="brute-force reflection subgroups of O(2)")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--sign", choices=("+", "-"), required=True)
    _common(sp)

    sp = sub.add_parser("cohomology", help="H^n(G, V) for the natural module")
    sp.add_argument("spec")
    sp.add_argument("--degree", type=int, default=2)
    sp.add_argument("--method", choices=("auto", "bar", "cyclic", "stable"), default="auto")
    _common(sp)

    sp = sub.add_parser("obstruction", help="H^2 and the squaring obstruction")
    sp.add_argument("spec")
    _common(sp)

    sp = sub.add_parser("fusion", help="fusion ring of the reflection skeleton")
    sp.add_argument("spec")
    sp.add_argument("--generalized", action="store_true", help="allow a non-faithful action")
    sp.add_argument("--constants", action="store_true", help="include the full ring in the output")
    _common(sp)

    sp = sub.add_parser("tables", help="classification tables")
    sp.add_argument("--table", choices=TABLES, required=True)
    sp.add_argument("--p", required=True, help="prime, comma list or range a-b")
    sp.add_argument("--max-dim", type=int, default=3)
    sp.add_argument("--tier", choices=TIERS, default="fast")
    _common(sp)
    return ap


def _envelope(command, inputs, results, ok=True):
    return {"schema_version": SCHEMA_VERSION, "command": command, "inputs": inputs,
            "ok": ok, "results": results}


def _md_dict(title, obj):
    lines = [f"# {title}", ""]
    for k in sorted(obj):
        v = obj[k]
        if isinstance(v, (dict, list)):
            v = json.dumps(v, sort_keys=True)
        lines.append(f"- **{k}**: {v}")
    return "\n".join(lines) + "\n"


def cmd_qspace(args):
    if args.gram:
        space = QuadraticSpace(json.loads(args.gram), args.p)
    elif args.dim:
        space = standard_space(args.dim, args.p, "plus" if args.disc == "+" else "minus")
    else:
        raise StructuralError("qspace needs --dim or --gram")
    wd = witt_decompose(space)
    res = {"dim": space.dim, "gram": space.gram.tolist(), "discriminant": discriminant(space).value,
           "witt_index": len(wd.hyperbolic_pairs), "anisotropic_dim": len(wd.anisotropic),
           "witt_sign": wd.sign}
    return _envelope("qspace", {"p": args.p, "dim": args.dim, "disc": args.disc, "gram": args.gram}, res), True


def _group_summary(C):
    G = C.group
    return {"label": C.spec.label(), "spec": str(C.spec), "dim": G.dim, "order": G.order(),
            "order_source": "chain", "expected_order": C.expected_order,
            "discriminant": discriminant(C.space).value, "contains_minus_identity": G.contains_minus_identity(),
            "generators": [g.tolist() for g in G.generators], "gram": C.space.gram.tolist(),
            "notes": {k: v for k, v in C.notes.items() if k != "root_gram"}}


def cmd_build(args):
    C = build(args.spec)
    return _envelope("build", {"spec": args.spec}, _group_summary(C)), True


def cmd_verify(args):
    C = build(args.spec)
    rep = verify_family(C, seed=args.seed)
    res = rep.to_json()
    res["order"] = C.group.order()
    return _envelope("verify", {"spec": args.spec}, res, rep.passed), rep.passed


def cmd_rank2(args):
    rows = classify_rank2_bruteforce(args.p, args.sign)
    target = args.p - 1 if args.sign == "+" else args.p + 1
    res = {"subgroups": [{"order": o, "irreducible": i, "d": d} for o, i, d in rows],
           "bound": 2 * target,
           "irreducible_orders": sorted({o for o, i, _ in rows if i})}
    ok = all(target % d == 0 for o, i, d in rows if i)
    return _envelope("rank2", {"p": args.p, "sign": args.sign}, res, ok), ok


def cmd_cohomology(args):
    C = build(args.spec)
    G = C.group
    n, method = args.degree, args.method
    if method == "auto":
        if n == 2:
            dim, how = h2_natural(G, args.memory_budget)
        else:
            FG = FiniteGroup.from_matgroup(G)
            dim, how = bar_h_n(GModule.natural(FG), n, args.memory_budget).dim, "bar"
    elif method == "bar":
        FG = FiniteGroup.from_matgroup(G)
        dim, how = bar_h_n(GModule.natural(FG), n, args.memory_budget).dim, "bar"
    elif method == "cyclic":
        FG = FiniteGroup.from_matgroup(G)
        gen = next((x for x in range(FG.order) if FG.element_order(x) == FG.order), None)
        if gen is None:
            raise DomainError("group is not cyclic")
        dim, how = cyclic_h_n(FG.elements[gen], n, FG.order).dim, "cyclic"
    else:
        if n != 2:
            raise UnsupportedError("stable elements are implemented for degree 2")
        FG = FiniteGroup.from_matgroup(G)
        dim, how = h2_stable_elements(GModule.natural(FG)).dim, "stable"
    res = {"label": C.spec.label(), "order": G.order(), "degree": n,
           "dim": dim, "method": how, "resolved": dim is not None}
    return _envelope("cohomology", {"spec": args.spec, "degree": n, "method": method}, res), True


def cmd_obstruction(args):
    C = build(args.spec)
    G = C.group
    dim, how = h2_natural(G, args.memory_budget)
    res = {"label": C.spec.label(), "order": G.order(), "h2_dim": dim, "h2_method": how}
    if dim == 0:
        res["squaring_map"] = "zero (H^2 = 0)"
        res["extensions"] = "unique up to twisting"
    elif dim is None:
        res["squaring_map"] = "unresolved"
        res["extensions"] = "unresolved"
    else:
        res["extensions"] = f"torsor over F_{G.p}" + (f"^{dim}" if dim > 1 else "")
    try:
        sq = sylow_cup_squares(G, C.space, args.memory_budget)
        res["sylow"] = {"order": G.p, "h2_dim": sq.h2_sylow_dim, "cup_squares": sq.verdicts,
                        "form_zero_on_fixed_points": sq.form_on_fixed_zero}
    except UnsupportedError as exc:
        res["sylow"] = {"skipped": str(exc)}
    return _envelope("obstruction", {"spec": args.spec}, res), True


def cmd_fusion(args):
    C = build(args.spec)
    metric = MetricGroup(C.space)
    sk = skeleton(metric, C.group)
    ring = fusion_ring(sk)
    refl = is_reflection_skeleton(sk, generalized=args.generalized)
    axioms = fusion_axioms(ring, sk)
    res = {"label": C.spec.label(), "labels": ring.size, "group_order": sk.group.order,
           "reflection_category": refl.ok, "failed_condition": refl.condition,
           "witness": None if refl.witness is None else sk.group.elements[refl.witness].tolist(),
           "image_group_order": refl.image_order, "irreducible": is_irreducible_skeleton(sk, args.seed),
           "axioms": axioms,
           "simples_per_component": {str(k): v for k, v in sorted(
               {int(sk.d[g]): sk.simple_count(g) for g in range(sk.group.order)}.items())}}
    if args.constants:
        res["ring"] = ring.to_json()
    ok = all(axioms.values())
    return _envelope("fusion", {"spec": args.spec, "generalized": args.generalized}, res, ok), ok


def cmd_tables(args):
    primes = parse_primes(args.p)
    rep = emit_tables(args.table, primes, args.max_dim, args.tier, args.seed, args.memory_budget)
    ok = all(r.get("status") != "failed" for r in rep["rows"])
    return rep, ok


COMMANDS = {"qspace": cmd_qspace, "build": cmd_build, "verify": cmd_verify, "rank2": cmd_rank2,
            "cohomology": cmd_cohomology, "obstruction": cmd_obstruction, "fusion": cmd_fusion,
            "tables": cmd_tables}


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, FpMatrix):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def render(report, fmt):
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2, default=_default) + "\n"
    if "table" in report:
        return to_markdown(report)
    return _md_dict(report["command"], json.loads(json.dumps(report["results"], default=_default)))


def run(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = make_parser().parse_args(argv)
    except StructuralError as exc:
        print(f"reflcat: {exc}", file=stderr)
        return EXIT_USAGE
    start = time.perf_counter()
    try:
        report, ok = COMMANDS[args.command](args)
    except ResourceError as exc:
        print(f"reflcat: resource budget exceeded: {exc}", file=stderr)
        return EXIT_RESOURCE
    except (DomainError, StructuralError, UnsupportedError, ValueError) as exc:
        print(f"reflcat: {exc}", file=stderr)
        return EXIT_USAGE
    if args.timing:
        report["timing_seconds"] = round(time.perf_counter() - start, 3)
    stdout.write(render(report, args.format))
    return EXIT_OK if ok else EXIT_FAILED


def main():
    sys.exit(run())
