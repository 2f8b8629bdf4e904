"""Batch front-end: JSON instances in, JSON verdicts and certificates out.

Subcommands: check (feasibility), solve (fair flow, optionally min-cost),
orient (fair k-edge-connected orientation), verify (oracle cross-checks).
Exit codes: 0 ok, 2 input or budget error, 3 infeasible, 4 no fair flow
exists, 5 verification mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Dict, List, Optional, Tuple

from .core import (
    Bounds,
    Chain,
    Digraph,
    NEG_INF,
    POS_INF,
    is_finite,
    mask_nodes,
)
from .baseflow import CertificateError, Infeasible, Instance, check_feasible
from .decmin import solve_decmin, solve_min_cost_decmin
from .existence import build_jump_structure, finitize_bounds, has_blocking_dicircuit
from .lupmin import lupmin_solve
from .oracle import (
    BudgetExceeded,
    brute_chain_max,
    brute_decmin,
    brute_lupmin,
    convex_cost_min,
    enumerate_Q,
    window_from_bounds,
)
from .orient import MixedGraph, OrientationInfeasible, decmin_orientation
from .setfn import BaseOracle

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_NO_DECMIN = 4
EXIT_MISMATCH = 5


class ParseError(Exception):
    pass


def _expect_keys(obj: dict, required, optional=(), where: str = "object") -> None:
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    for key in required:
        if key not in obj:
            raise ParseError(f"{where}: missing key {key!r}")
    allowed = set(required) | set(optional)
    for key in obj:
        if key not in allowed:
            raise ParseError(f"{where}: unknown key {key!r}")


def _parse_extint(v, where: str):
    if isinstance(v, bool):
        raise ParseError(f"{where}: expected integer or infinity string")
    if isinstance(v, int):
        return v
    if v == "-inf":
        return NEG_INF
    if v == "+inf":
        return POS_INF
    raise ParseError(f"{where}: expected integer, '-inf' or '+inf', got {v!r}")


def _dump_extint(v):
    if is_finite(v):
        return v
    return "+inf" if v is POS_INF else "-inf"


class ParsedInstance:
    """Instance plus the naming needed to read and write JSON documents."""

    def __init__(self, instance: Instance, node_names: List[str],
                 arc_names: List[str], base_doc: dict):
        self.instance = instance
        self.node_names = node_names
        self.arc_names = arc_names
        self.base_doc = base_doc
        self.node_index = {name: i for i, name in enumerate(node_names)}
        self.arc_index = {name: i for i, name in enumerate(arc_names)}

    def mask_names(self, mask: int) -> List[str]:
        return [self.node_names[v] for v in mask_nodes(mask)]

    def chain_doc(self, chain: Chain) -> List[List[str]]:
        return [self.mask_names(m) for m in chain]

    def flow_doc(self, x) -> Dict[str, int]:
        return {self.arc_names[e]: int(x[e]) for e in range(len(x))}


def parse_instance(doc: dict) -> ParsedInstance:
    _expect_keys(doc, ("nodes", "arcs", "F", "base"),
                 ("mixed_graph", "k"), "instance")
    names = doc["nodes"]
    if (not isinstance(names, list) or not names
            or any(not isinstance(s, str) for s in names)
            or len(set(names)) != len(names)):
        raise ParseError("nodes: expected a list of distinct names")
    node_index = {s: i for i, s in enumerate(names)}
    if not isinstance(doc["arcs"], list):
        raise ParseError("arcs: expected a list")
    arcs = []
    arc_names = []
    lower = []
    upper = []
    costs = []
    any_cost = False
    for pos, arc in enumerate(doc["arcs"]):
        _expect_keys(arc, ("id", "tail", "head", "f", "g"), ("cost",), f"arc #{pos}")
        if not isinstance(arc["id"], str):
            raise ParseError(f"arc #{pos}: id must be a string")
        if arc["id"] in arc_names:
            raise ParseError(f"arc #{pos}: duplicate id {arc['id']!r}")
        if arc["tail"] not in node_index or arc["head"] not in node_index:
            raise ParseError(f"arc {arc['id']!r}: unknown endpoint")
        arc_names.append(arc["id"])
        arcs.append((node_index[arc["tail"]], node_index[arc["head"]]))
        lower.append(_parse_extint(arc["f"], f"arc {arc['id']!r} f"))
        upper.append(_parse_extint(arc["g"], f"arc {arc['id']!r} g"))
        if "cost" in arc:
            any_cost = True
            if not isinstance(arc["cost"], int) or isinstance(arc["cost"], bool):
                raise ParseError(f"arc {arc['id']!r}: cost must be an integer")
            costs.append(arc["cost"])
        else:
            costs.append(0)
    arc_index = {s: i for i, s in enumerate(arc_names)}
    if not isinstance(doc["F"], list):
        raise ParseError("F: expected a list of arc ids")
    focus = set()
    for name in doc["F"]:
        if name not in arc_index:
            raise ParseError(f"F: unknown arc id {name!r}")
        focus.add(arc_index[name])
    try:
        digraph = Digraph(len(names), tuple(arcs))
        bounds = Bounds(tuple(lower), tuple(upper))
        base = _parse_base(doc["base"], names, node_index)
        inst = Instance(digraph, bounds, base, frozenset(focus),
                        tuple(costs) if any_cost else None)
    except (ValueError, ArithmeticError) as exc:
        raise ParseError(str(exc)) from exc
    return ParsedInstance(inst, list(names), arc_names, doc["base"])


def _parse_base(doc: dict, names: List[str], node_index: Dict[str, int]) -> BaseOracle:
    _expect_keys(doc, ("type",), ("p", "points"), "base")
    n = len(names)
    kind = doc["type"]
    if kind == "zero":
        _expect_keys(doc, ("type",), (), "base")
        return BaseOracle.zero(n)
    if kind == "table":
        _expect_keys(doc, ("type", "p"), (), "base")
        table = [NEG_INF] * (1 << n)
        if not isinstance(doc["p"], dict):
            raise ParseError("base.p: expected an object")
        for key, raw in doc["p"].items():
            members = [] if key == "" else key.split(",")
            mask = 0
            for name in members:
                if name not in node_index:
                    raise ParseError(f"base.p: unknown node {name!r} in key {key!r}")
                if (mask >> node_index[name]) & 1:
                    raise ParseError(f"base.p: repeated node in key {key!r}")
                mask |= 1 << node_index[name]
            if sorted(members) != members:
                raise ParseError(f"base.p: key {key!r} must list sorted names")
            v = _parse_extint(raw, f"base.p[{key!r}]")
            if v is POS_INF:
                raise ParseError("base.p: +inf values not allowed")
            table[mask] = v
        if table[0] != 0:
            raise ParseError("base.p: empty set must map to 0")
        if table[(1 << n) - 1] != 0:
            raise ParseError("base.p: full set must map to 0")
        return BaseOracle.from_table(n, table)
    if kind == "points":
        _expect_keys(doc, ("type", "points"), (), "base")
        pts = doc["points"]
        if (not isinstance(pts, list) or not pts
                or any(not isinstance(p, list) or len(p) != n
                       or any(not isinstance(v, int) or isinstance(v, bool) for v in p)
                       for p in pts)):
            raise ParseError("base.points: expected a nonempty list of node vectors")
        for p in pts:
            if sum(p) != 0:
                raise ParseError("base.points: every point must sum to zero")
        return BaseOracle.from_points([tuple(p) for p in pts], n)
    raise ParseError(f"base.type: unknown kind {kind!r}")


def instance_to_doc(parsed: ParsedInstance) -> dict:
    inst = parsed.instance
    arcs = []
    for e in range(inst.digraph.arc_count):
        t, h = inst.digraph.arcs[e]
        entry = {
            "id": parsed.arc_names[e],
            "tail": parsed.node_names[t],
            "head": parsed.node_names[h],
            "f": _dump_extint(inst.bounds.lower[e]),
            "g": _dump_extint(inst.bounds.upper[e]),
        }
        if inst.cost is not None:
            entry["cost"] = inst.cost[e]
        arcs.append(entry)
    return {
        "nodes": parsed.node_names,
        "arcs": arcs,
        "F": sorted(parsed.arc_names[e] for e in inst.focus),
        "base": parsed.base_doc,
    }


def _parse_mixed(doc: dict) -> Tuple[MixedGraph, List[str], Optional[dict]]:
    _expect_keys(doc, ("mixed_graph",), ("k", "nodes", "arcs", "F", "base"), "orient input")
    mg_doc = doc["mixed_graph"]
    _expect_keys(mg_doc, ("nodes", "edges"), ("arcs", "degree_bounds"), "mixed_graph")
    names = mg_doc["nodes"]
    if not isinstance(names, list) or any(not isinstance(s, str) for s in names):
        raise ParseError("mixed_graph.nodes: expected a list of names")
    index = {s: i for i, s in enumerate(names)}

    def pairs(key):
        out = []
        for pair in mg_doc.get(key, []):
            if (not isinstance(pair, list) or len(pair) != 2
                    or pair[0] not in index or pair[1] not in index):
                raise ParseError(f"mixed_graph.{key}: expected [node, node] pairs")
            out.append((index[pair[0]], index[pair[1]]))
        return tuple(out)

    k = doc.get("k", 1)
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise ParseError("k: expected a positive integer")
    degree_bounds = None
    if "degree_bounds" in mg_doc:
        degree_bounds = {}
        if not isinstance(mg_doc["degree_bounds"], dict):
            raise ParseError("degree_bounds: expected an object")
        for name, pair in mg_doc["degree_bounds"].items():
            if name not in index:
                raise ParseError(f"degree_bounds: unknown node {name!r}")
            if (not isinstance(pair, list) or len(pair) != 2
                    or any(not isinstance(v, int) or isinstance(v, bool) for v in pair)):
                raise ParseError(f"degree_bounds[{name!r}]: expected [lo, hi]")
            degree_bounds[index[name]] = (pair[0], pair[1])
    try:
        mg = MixedGraph(len(names), pairs("arcs"), pairs("edges"), k)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    return mg, list(names), degree_bounds


def _emit(doc: dict) -> None:
    json.dump(doc, sys.stdout, sort_keys=True, indent=2)
    sys.stdout.write("\n")


def _load(path: str) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    return doc


def cmd_check(args) -> int:
    parsed = parse_instance(_load(args.path))
    cert = check_feasible(parsed.instance)
    if cert.feasible:
        _emit({"witness": parsed.flow_doc(cert.witness)})
        return EXIT_OK
    _emit({"violator": parsed.mask_names(cert.violator),
           "deficit": _dump_extint(cert.deficit)})
    return EXIT_INFEASIBLE


def cmd_solve(args) -> int:
    parsed = parse_instance(_load(args.path))
    inst = parsed.instance
    cert = check_feasible(inst)
    if not cert.feasible:
        _emit({"violator": parsed.mask_names(cert.violator),
               "deficit": _dump_extint(cert.deficit)})
        return EXIT_INFEASIBLE
    js = build_jump_structure(inst)
    circuit = has_blocking_dicircuit(js, inst.focus)
    if circuit is not None:
        _emit({"blocking_circuit": [
            {"tail": parsed.node_names[a.tail],
             "head": parsed.node_names[a.head],
             "kind": a.kind,
             "arc": None if a.arc_id is None else parsed.arc_names[a.arc_id]}
            for a in circuit]})
        return EXIT_NO_DECMIN
    finite = finitize_bounds(inst)
    result = solve_decmin(finite)
    out = {
        "f_star": {parsed.arc_names[e]: _dump_extint(result.lower[e])
                   for e in range(len(result.lower))},
        "g_star": {parsed.arc_names[e]: _dump_extint(result.upper[e])
                   for e in range(len(result.upper))},
        "face_chains": [parsed.chain_doc(c) for c in result.face_chains],
        "witness": parsed.flow_doc(result.witness),
    }
    if args.min_cost:
        if inst.cost is None:
            raise ParseError("--min-cost requires per-arc costs in the input")
        x = solve_min_cost_decmin(finite, inst.cost)
        out["min_cost_witness"] = parsed.flow_doc(x)
        out["cost"] = sum(inst.cost[e] * x[e] for e in range(len(x)))
    if args.trace:
        out["phases"] = [
            {"beta": t.beta,
             "L_beta": sorted(parsed.arc_names[e] for e in t.l_beta),
             "chain": parsed.chain_doc(t.chain),
             "L_prime": sorted(parsed.arc_names[e] for e in t.l_prime),
             "f_after": {parsed.arc_names[e]: _dump_extint(t.bounds_after.lower[e])
                         for e in range(len(t.bounds_after.lower))},
             "g_after": {parsed.arc_names[e]: _dump_extint(t.bounds_after.upper[e])
                         for e in range(len(t.bounds_after.upper))}}
            for t in result.traces]
    _emit(out)
    return EXIT_OK


def cmd_orient(args) -> int:
    doc = _load(args.path)
    if args.k is not None:
        doc = dict(doc)
        doc["k"] = args.k
    mg, names, degree_bounds = _parse_mixed(doc)
    try:
        oriented, indeg = decmin_orientation(mg, degree_bounds)
    except OrientationInfeasible as exc:
        out = {"error": str(exc)}
        if exc.cut_mask is not None:
            out["certificate"] = [names[v] for v in mask_nodes(exc.cut_mask)]
        _emit(out)
        return EXIT_INFEASIBLE
    except Infeasible as exc:
        _emit({"error": "degree bounds admit no orientation"})
        return EXIT_INFEASIBLE
    _emit({
        "orientation": [[names[u], names[v]] for u, v in oriented],
        "in_degrees": {names[v]: indeg[v] for v in range(mg.node_count)},
    })
    return EXIT_OK


def cmd_verify(args) -> int:
    parsed = parse_instance(_load(args.path))
    inst = parsed.instance
    checks: List[Tuple[str, bool]] = []

    def record(name: str, ok: bool):
        checks.append((name, ok))
        print(f"{'PASS' if ok else 'FAIL'} {name}")

    points = enumerate_Q(inst, window_from_bounds(inst), budget=args.budget)
    cert = check_feasible(inst)
    record("feasibility-equivalence", cert.feasible == bool(points))
    if points:
        finite_focus = all(
            is_finite(inst.bounds.lower[e]) and is_finite(inst.bounds.upper[e])
            for e in inst.focus)
        candidates = []
        if all(is_finite(inst.bounds.lower[e]) and is_finite(inst.bounds.upper[e])
               and inst.bounds.lower[e] < inst.bounds.upper[e]
               for e in inst.focus) and inst.focus:
            candidates.append(frozenset(inst.focus))
        for e in range(inst.digraph.arc_count):
            lo, hi = inst.bounds.lower[e], inst.bounds.upper[e]
            if is_finite(lo) and is_finite(hi) and lo < hi:
                candidates.append(frozenset([e]))
        seen = set()
        for L in candidates:
            if L in seen:
                continue
            seen.add(L)
            label = ",".join(sorted(parsed.arc_names[e] for e in L))
            res = lupmin_solve(inst, L)
            brute = brute_lupmin(points, inst.bounds, L)
            ok = res.min_saturated == brute
            if inst.digraph.node_count <= 5:
                value, _ = brute_chain_max(inst, L)
                ok = ok and value == res.min_saturated
            record(f"strong-duality[{label}]", ok)
        if finite_focus and inst.focus:
            result = solve_decmin(inst)
            # one shared window keeps the two enumerations comparable when
            # non-focus bounds are infinite
            window = window_from_bounds(inst, center=result.witness)
            local = enumerate_Q(inst, window, budget=args.budget)
            narrowed = enumerate_Q(result.final, window, budget=args.budget)
            fair = brute_decmin(local, inst.focus)
            record("decmin-set-equality", sorted(narrowed) == sorted(fair))
            surrogate = convex_cost_min(local, inst.focus)
            focus = sorted(inst.focus)
            prof = lambda pt: tuple(sorted((pt[e] for e in focus), reverse=True))
            record("convex-cost-profiles",
                   {prof(pt) for pt in surrogate} == {prof(pt) for pt in fair})
    ok_all = all(ok for _, ok in checks)
    return EXIT_OK if ok_all else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairflow",
        description="Fair (decreasingly-minimal) integral base-flow solver")
    sub = parser.add_subparsers(dest="command", required=True)
    p_check = sub.add_parser("check", help="feasibility check with certificate")
    p_check.add_argument("path")
    p_check.set_defaults(func=cmd_check)
    p_solve = sub.add_parser("solve", help="compute the fair flow description")
    p_solve.add_argument("path")
    p_solve.add_argument("--min-cost", action="store_true")
    p_solve.add_argument("--trace", action="store_true")
    p_solve.set_defaults(func=cmd_solve)
    p_orient = sub.add_parser("orient", help="fair k-edge-connected orientation")
    p_orient.add_argument("path")
    p_orient.add_argument("--k", type=int, default=None)
    p_orient.set_defaults(func=cmd_orient)
    p_verify = sub.add_parser("verify", help="cross-check the engine against oracles")
    p_verify.add_argument("path")
    p_verify.add_argument("--budget", type=int, default=10 ** 7)
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, BudgetExceeded, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Infeasible as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except CertificateError as exc:
        print(f"internal certificate failure: {exc}", file=sys.stderr)
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
