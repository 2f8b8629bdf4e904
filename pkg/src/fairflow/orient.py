"""Decreasingly-minimal in-degree orientations of mixed graphs.

An orientation instance is encoded as a bounded base-flow problem: one
[0,1] flip arc per undirected edge (value 1 reverses the reference
direction) and one in-degree arc per original node from a private
auxiliary node, whose value the base polyhedron pins to the oriented
in-degree.  Cut connectivity of an orientation depends only on its
in-degree vector (arcs inside a node set are direction-blind), so the
polyhedron built from the enumerated in-degree vectors of k-edge-connected
orientations captures connectivity exactly; the focus set is the in-degree
arcs.  Desk scale: the envelope enumeration is exponential by design.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .core import Bounds, Digraph, all_subsets
from .baseflow import Instance
from .decmin import solve_decmin, solve_min_cost_decmin
from .setfn import BaseOracle


class OrientationInfeasible(Exception):
    """No k-edge-connected orientation exists; may carry a cut certificate."""

    def __init__(self, message: str, cut_mask: Optional[int] = None):
        super().__init__(message)
        self.cut_mask = cut_mask


@dataclass(frozen=True)
class MixedGraph:
    node_count: int
    arcs: tuple  # fixed directed arcs (tail, head)
    edges: tuple  # undirected edges as (u, v) pairs; order fixes the reference
    k: int = 1

    def __post_init__(self):
        object.__setattr__(self, "arcs", tuple((int(u), int(v)) for u, v in self.arcs))
        object.__setattr__(self, "edges", tuple((int(u), int(v)) for u, v in self.edges))
        if self.k < 1:
            raise ValueError("connectivity target must be at least 1")
        for u, v in self.arcs + self.edges:
            if u == v:
                raise ValueError("loops not allowed")
            if not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise ValueError("endpoint out of range")


@dataclass(frozen=True)
class OrientEncoding:
    mixed: MixedGraph
    instance: Instance
    flip_arcs: tuple  # arc id per undirected edge
    indeg_arcs: tuple  # arc id per original node


def _inside_counts(mg: MixedGraph) -> list:
    """Arcs plus edges with both endpoints inside each node subset."""
    n = mg.node_count
    counts = [0] * (1 << n)
    for u, v in mg.arcs + mg.edges:
        pair = (1 << u) | (1 << v)
        for m in all_subsets(n):
            if m & pair == pair:
                counts[m] += 1
    return counts


def _ref_indegrees(mg: MixedGraph) -> list:
    d = [0] * mg.node_count
    for _, v in mg.arcs:
        d[v] += 1
    for _, v in mg.edges:
        d[v] += 1
    return d


def _orientation_indegrees(mg: MixedGraph, flips: int) -> tuple:
    d = [0] * mg.node_count
    for _, v in mg.arcs:
        d[v] += 1
    for j, (u, v) in enumerate(mg.edges):
        d[v if not (flips >> j) & 1 else u] += 1
    return tuple(d)


def cut_certificate(mg: MixedGraph) -> Optional[int]:
    """A node set whose crossing capacity rules out any k-ec orientation.

    Both sides of a k-ec cut need k entering arcs, and an undirected edge
    can serve only one side, so a set violating
    undirected_crossing >= (k - in_fixed)+ + (k - out_fixed)+ certifies
    infeasibility.  Necessary condition only; None does not imply a
    feasible orientation exists.
    """
    n = mg.node_count
    full = (1 << n) - 1
    for m in range(1, full):
        rho = sum(1 for u, v in mg.arcs if (m >> v) & 1 and not (m >> u) & 1)
        delta = sum(1 for u, v in mg.arcs if (m >> u) & 1 and not (m >> v) & 1)
        cross = sum(1 for u, v in mg.edges if ((m >> u) & 1) != ((m >> v) & 1))
        if cross < max(0, mg.k - rho) + max(0, mg.k - delta):
            return m
    return None


def encode(mg: MixedGraph, degree_bounds: Optional[Dict[int, Tuple[int, int]]] = None
           ) -> OrientEncoding:
    """Build the base-flow instance whose integral flows are the k-ec
    orientations, with in-degrees exposed on the focus arcs."""
    n = mg.node_count
    if 2 * n > 14:
        raise ValueError("orientation encoding limited to 7 nodes")
    inside = _inside_counts(mg)
    dref = _ref_indegrees(mg)
    feasible_indegs = set()
    full = (1 << n) - 1
    for flips in range(1 << len(mg.edges)):
        h = _orientation_indegrees(mg, flips)
        hsum = [0] * (1 << n)
        for m in range(1, 1 << n):
            low = m & (-m)
            hsum[m] = hsum[m ^ low] + h[low.bit_length() - 1]
        if all(hsum[m] - inside[m] >= mg.k for m in range(1, full)):
            feasible_indegs.add(h)
    if not feasible_indegs:
        raise OrientationInfeasible(
            f"no {mg.k}-edge-connected orientation exists", cut_certificate(mg))
    points = [tuple(dref) + tuple(-hv for hv in h) for h in sorted(feasible_indegs)]
    base = BaseOracle.from_points(points, 2 * n)
    arcs = []
    flip_ids = []
    for u, v in mg.edges:
        flip_ids.append(len(arcs))
        arcs.append((u, v))
    indeg_ids = []
    total_deg = [0] * n
    for _, v in mg.arcs:
        total_deg[v] += 1
    for u, v in mg.edges:
        total_deg[u] += 1
        total_deg[v] += 1
    lower = [0] * len(mg.edges)
    upper = [1] * len(mg.edges)
    for v in range(n):
        indeg_ids.append(len(arcs))
        arcs.append((n + v, v))
        lo, hi = 0, total_deg[v]
        if degree_bounds and v in degree_bounds:
            ulo, uhi = degree_bounds[v]
            lo, hi = max(lo, ulo), min(hi, uhi)
        if lo > hi:
            raise OrientationInfeasible(f"empty degree interval at node {v}")
        lower.append(lo)
        upper.append(hi)
    digraph = Digraph(2 * n, tuple(arcs))
    inst = Instance(digraph, Bounds(tuple(lower), tuple(upper)), base,
                    frozenset(indeg_ids))
    return OrientEncoding(mg, inst, tuple(flip_ids), tuple(indeg_ids))


def decode(enc: OrientEncoding, x: Sequence[int]) -> Tuple[tuple, tuple]:
    """Recover (oriented arc list, in-degree vector) from a flow vector."""
    mg = enc.mixed
    oriented = list(mg.arcs)
    for j, (u, v) in enumerate(mg.edges):
        flipped = x[enc.flip_arcs[j]]
        oriented.append((v, u) if flipped else (u, v))
    indeg = tuple(x[enc.indeg_arcs[v]] for v in range(mg.node_count))
    check = [0] * mg.node_count
    for _, v in oriented:
        check[v] += 1
    if tuple(check) != indeg:
        raise ValueError("in-degree arcs disagree with the decoded orientation")
    return tuple(oriented), indeg


def brute_orientations(mg: MixedGraph) -> List[Tuple[int, tuple]]:
    """All k-ec orientations as (flip bitmask, in-degree vector) pairs.

    Independent of the encoding path: connectivity is checked by counting
    entering arcs of every proper node subset on the oriented digraph.
    """
    if len(mg.edges) > 20:
        raise ValueError("too many undirected edges to enumerate")
    n = mg.node_count
    full = (1 << n) - 1
    out = []
    for flips in range(1 << len(mg.edges)):
        oriented = list(mg.arcs)
        for j, (u, v) in enumerate(mg.edges):
            oriented.append((v, u) if (flips >> j) & 1 else (u, v))
        ok = True
        for m in range(1, full):
            entering = sum(1 for u, v in oriented
                           if (m >> v) & 1 and not (m >> u) & 1)
            if entering < mg.k:
                ok = False
                break
        if ok:
            indeg = [0] * n
            for _, v in oriented:
                indeg[v] += 1
            out.append((flips, tuple(indeg)))
    return out


def decmin_orientation(mg: MixedGraph,
                       degree_bounds: Optional[Dict[int, Tuple[int, int]]] = None,
                       edge_costs: Optional[Sequence[Tuple[int, int]]] = None
                       ) -> Tuple[tuple, tuple]:
    """Fairest k-ec orientation: encode, narrow, optionally pick the
    cheapest flow under per-edge direction costs, decode."""
    enc = encode(mg, degree_bounds)
    result = solve_decmin(enc.instance)
    if edge_costs is not None:
        if len(edge_costs) != len(mg.edges):
            raise ValueError("one (forward, reverse) cost pair per edge required")
        cost = [0] * enc.instance.digraph.arc_count
        for j, (fwd, rev) in enumerate(edge_costs):
            cost[enc.flip_arcs[j]] = rev - fwd
        x = solve_min_cost_decmin(enc.instance, tuple(cost))
    else:
        x = result.witness
    return decode(enc, x)
