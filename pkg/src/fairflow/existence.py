"""Existence of decreasingly-minimal flows under infinite bounds.

With infinite bounds the minimal profile can run away to minus infinity.
The witness structure is an auxiliary digraph: jump arcs encode directions
the base polyhedron never blocks (pairs u -> v with v inside the smallest
finite-valued set containing u), plus the arcs with no lower bound and the
reversals of non-focus arcs with no upper bound.  A dicircuit through a
focus arc yields an endless improvement; absence of such circuits makes
every focus bound finitizable without changing the optimal set.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import List, Optional, Sequence

from .core import (
    NEG_INF,
    POS_INF,
    all_subsets,
    cut_in_sum,
    cut_out_sum,
    is_finite,
)
from .baseflow import Instance, find_feasible, membership


@dataclass(frozen=True)
class DStarArc:
    tail: int
    head: int
    kind: str  # "jump" | "lower-inf" | "upper-inf"
    arc_id: Optional[int]  # original arc for the two bound kinds


@dataclass(frozen=True)
class JumpStructure:
    node_count: int
    principal: tuple  # per node: smallest finite-valued set containing it
    jumping: tuple  # (u, v) pairs
    a1: frozenset  # arcs with lower bound -inf
    a2: frozenset  # non-focus arcs with upper bound +inf (stored by origin id)
    arcs: tuple  # DStarArc list


def build_jump_structure(inst: Instance) -> JumpStructure:
    n = inst.digraph.node_count
    p = inst.base.p
    finite_masks = [m for m in all_subsets(n) if is_finite(p(m))]
    principal = []
    for u in range(n):
        acc = (1 << n) - 1
        for m in finite_masks:
            if (m >> u) & 1:
                acc &= m
        principal.append(acc)
    jumping = []
    arcs: List[DStarArc] = []
    for u in range(n):
        for v in range(n):
            if v != u and (principal[u] >> v) & 1:
                jumping.append((u, v))
                arcs.append(DStarArc(u, v, "jump", None))
    a1 = frozenset(e for e in inst.digraph.arc_ids()
                   if inst.bounds.lower[e] is NEG_INF)
    a2 = frozenset(e for e in inst.digraph.arc_ids()
                   if e not in inst.focus and inst.bounds.upper[e] is POS_INF)
    for e in sorted(a1):
        t, h = inst.digraph.arcs[e]
        arcs.append(DStarArc(t, h, "lower-inf", e))
    for e in sorted(a2):
        t, h = inst.digraph.arcs[e]
        arcs.append(DStarArc(h, t, "upper-inf", e))
    return JumpStructure(n, tuple(principal), tuple(jumping), a1, a2, tuple(arcs))


def _reachable(js: JumpStructure, start: int) -> int:
    seen = 1 << start
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for arc in js.arcs:
            if arc.tail == u and not (seen >> arc.head) & 1:
                seen |= 1 << arc.head
                queue.append(arc.head)
    return seen


def has_blocking_dicircuit(js: JumpStructure, focus) -> Optional[tuple]:
    """A dicircuit through a focus arc with no lower bound, or None.

    Only lower-unbounded arcs can put a focus coordinate on a circuit (the
    reversed upper-unbounded arcs exclude the focus by construction).  The
    first circuit found in scan order is returned as a tuple of arcs.
    """
    focus = frozenset(focus)
    for seed in js.arcs:
        if seed.kind != "lower-inf" or seed.arc_id not in focus:
            continue
        target = seed.tail
        start = seed.head
        if start == target:
            continue
        parent = {start: None}
        queue = deque([start])
        found = False
        while queue and not found:
            u = queue.popleft()
            for arc in js.arcs:
                if arc.tail == u and arc.head not in parent:
                    parent[arc.head] = arc
                    if arc.head == target:
                        found = True
                        break
                    queue.append(arc.head)
        if not found:
            continue
        path = []
        node = target
        while parent[node] is not None:
            arc = parent[node]
            path.append(arc)
            node = arc.tail
        path.reverse()
        return (seed,) + tuple(path)
    return None


def improve_along_circuit(inst: Instance, z: Sequence, circuit, step=1):
    """Shift a flow one step along a blocking circuit.

    Lower-unbounded circuit arcs decrease, origins of reversed
    upper-unbounded arcs increase, jump arcs leave the flow untouched (the
    base absorbs their net change).  The result is feasible and
    decreasingly smaller on the focus set; feasibility is re-checked.
    """
    if not any(a.kind == "lower-inf" and a.arc_id in inst.focus for a in circuit):
        raise ValueError("circuit does not touch the focus set")
    z2 = list(z)
    for arc in circuit:
        if arc.kind == "lower-inf":
            z2[arc.arc_id] -= step
        elif arc.kind == "upper-inf":
            z2[arc.arc_id] += step
    z2 = tuple(z2)
    if not membership(inst, z2):
        raise ValueError("improved flow escaped the polyhedron")
    return z2


def finitize_bounds(inst: Instance) -> Instance:
    """Replace infinite focus bounds by finite ones with the same optimum.

    Upper bounds on focus arcs are truncated at the largest component of
    one feasible witness.  A lower-unbounded focus arc is then bounded from
    below through the set reachable from its head in the auxiliary digraph:
    no auxiliary arc leaves that set, so its cut inequality pins the arc's
    value from below with finite data.  Requires that no blocking dicircuit
    exists.
    """
    js0 = build_jump_structure(inst)
    if has_blocking_dicircuit(js0, inst.focus) is not None:
        raise ValueError("blocking dicircuit present: no finite reduction exists")
    witness = find_feasible(inst)
    bounds = inst.bounds
    if witness:
        cap = max(witness)
        updates = {}
        for e in inst.focus:
            hi = bounds.upper[e]
            if not is_finite(hi) or hi > cap:
                updates[e] = cap
        if updates:
            bounds = bounds.with_upper(updates)
    work = inst.with_bounds(bounds)
    js = build_jump_structure(work)
    d = inst.digraph
    p = inst.base.p
    lower_updates = {}
    for e in sorted(inst.focus):
        if bounds.lower[e] is not NEG_INF:
            continue
        tail, head = d.arcs[e]
        smask = _reachable(js, head)
        if (smask >> tail) & 1:
            raise ValueError("blocking dicircuit present: no finite reduction exists")
        pz = p(smask)
        rho = cut_in_sum(d, bounds.upper, smask)
        delta = cut_out_sum(d, bounds.lower, smask)
        if not (is_finite(pz) and is_finite(rho) and is_finite(delta)):
            raise ValueError("reachable-set bound is not finite; structure broken")
        lower_updates[e] = pz - (rho - bounds.upper[e]) + delta
    if lower_updates:
        bounds = bounds.with_lower(lower_updates)
    return inst.with_bounds(bounds)
