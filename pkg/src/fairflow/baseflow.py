"""Feasibility and min-cost optimization over bounded base-flow polyhedra.

An Instance couples a digraph, integer bounds, a zero-base oracle, a focus
arc set, and an optional linear cost.  Feasibility follows the cut criterion
(the in-cut of the upper bounds minus the out-cut of the lower bounds must
dominate the base function on every node subset); a feasible integral flow
is built by exact coordinate fixing; minimum-cost flows are computed by
canceling negative cycles in the exchange auxiliary digraph, and integer
dual node potentials are read off shortest-path distances at optimality.
The binding contract of the solver is the certificate it returns, not the
method: complementary slackness and tightness of every potential level set
are verified before returning.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .core import (
    Bounds,
    Digraph,
    ExtInt,
    NEG_INF,
    POS_INF,
    all_subsets,
    cut_in_sum,
    cut_net,
    cut_out_sum,
    is_finite,
    node_net_inflow,
)
from .setfn import BaseOracle, separating_masks


class Infeasible(Exception):
    """Raised when the bounded base-flow polyhedron is empty."""

    def __init__(self, violator: int, deficit: ExtInt):
        self.violator = violator
        self.deficit = deficit
        super().__init__(f"infeasible: violating set mask {violator:b}, deficit {deficit}")


class CertificateError(Exception):
    """An internal optimality certificate failed to verify; engine bug."""


@dataclass(frozen=True)
class Instance:
    digraph: Digraph
    bounds: Bounds
    base: BaseOracle
    focus: frozenset = frozenset()
    cost: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "focus", frozenset(self.focus))
        if self.cost is not None:
            object.__setattr__(self, "cost", tuple(self.cost))
        if len(self.bounds) != self.digraph.arc_count:
            raise ValueError("bounds length must match arc count")
        if self.base.n != self.digraph.node_count:
            raise ValueError("base oracle ground size must match node count")
        for e in self.focus:
            if not 0 <= e < self.digraph.arc_count:
                raise ValueError(f"focus arc id {e} out of range")
        if self.cost is not None and len(self.cost) != self.digraph.arc_count:
            raise ValueError("cost length must match arc count")

    def with_bounds(self, bounds: Bounds) -> "Instance":
        return Instance(self.digraph, bounds, self.base, self.focus, self.cost)

    def with_base(self, base: BaseOracle) -> "Instance":
        return Instance(self.digraph, self.bounds, base, self.focus, self.cost)

    def with_focus(self, focus) -> "Instance":
        return Instance(self.digraph, self.bounds, self.base, frozenset(focus), self.cost)


@dataclass(frozen=True)
class FeasCert:
    """Either an integral feasible flow or a violating subset with deficit."""

    witness: Optional[tuple] = None
    violator: Optional[int] = None
    deficit: Optional[ExtInt] = None

    @property
    def feasible(self) -> bool:
        return self.witness is not None


@dataclass(frozen=True)
class DualPotential:
    """Nonnegative integer node potentials normalized to minimum zero."""

    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        if any(v < 0 for v in self.values):
            raise ValueError("potentials must be nonnegative")
        if self.values and min(self.values) != 0:
            raise ValueError("potentials must be normalized to minimum 0")

    def __getitem__(self, v: int) -> int:
        return self.values[v]


def cut_slack(inst: Instance, zmask: int) -> ExtInt:
    """Feasibility slack of one subset: upper in-cut - lower out-cut - p."""
    d, b = inst.digraph, inst.bounds
    return (cut_in_sum(d, b.upper, zmask)
            - cut_out_sum(d, b.lower, zmask)
            - inst.base.p(zmask))


def find_violator(inst: Instance) -> Optional[Tuple[int, ExtInt]]:
    """First (lowest-mask) subset with negative feasibility slack, if any."""
    for zmask in all_subsets(inst.digraph.node_count):
        s = cut_slack(inst, zmask)
        if s < 0:
            return zmask, s
    return None


def check_feasible(inst: Instance) -> FeasCert:
    """Cut-criterion feasibility check with a constructive witness."""
    hit = find_violator(inst)
    if hit is not None:
        return FeasCert(violator=hit[0], deficit=hit[1])
    return FeasCert(witness=find_feasible(inst))


def membership(inst: Instance, x: Sequence[int]) -> bool:
    """Is x an integral feasible base-flow of the instance?"""
    b = inst.bounds
    for e in range(inst.digraph.arc_count):
        if not (b.lower[e] <= x[e] <= b.upper[e]):
            return False
    p = inst.base.p
    d = inst.digraph
    return all(cut_net(d, x, z) >= p(z) for z in all_subsets(d.node_count))


def find_feasible(inst: Instance) -> tuple:
    """Build an integral feasible flow by exact coordinate fixing.

    Arcs are fixed in id order.  For arc e the set of values t that keep the
    residual instance feasible is an integer interval obtained from the cut
    criterion with e's contribution separated out; we pick 0 clamped into
    that interval, then freeze the arc and continue.  Exactness of the
    interval makes the procedure never backtrack.
    """
    hit = find_violator(inst)
    if hit is not None:
        raise Infeasible(*hit)
    d = inst.digraph
    n = d.node_count
    lower = list(inst.bounds.lower)
    upper = list(inst.bounds.upper)
    p = inst.base.p
    for e in range(d.arc_count):
        if lower[e] == upper[e]:
            continue
        t_arc, h_arc = d.arcs[e]
        lo: ExtInt = lower[e]
        hi: ExtInt = upper[e]
        for z in all_subsets(n):
            zin_h = (z >> h_arc) & 1
            zin_t = (z >> t_arc) & 1
            if zin_h == zin_t:
                continue
            pz = p(z)
            if pz is NEG_INF:
                continue
            rest = 0
            for e2, (t2, h2) in enumerate(d.arcs):
                if e2 == e:
                    continue
                if (z >> h2) & 1 and not (z >> t2) & 1:
                    rest = rest + upper[e2]
                elif (z >> t2) & 1 and not (z >> h2) & 1:
                    rest = rest - lower[e2]
            if zin_h:  # e enters z: t >= p(z) - rest
                cand = pz - rest
                if cand > lo:
                    lo = cand
            else:  # e leaves z: t <= rest - p(z)
                cand = rest - pz
                if cand < hi:
                    hi = cand
        if not lo <= hi:
            raise CertificateError("coordinate-fixing interval collapsed on a feasible instance")
        if lo is NEG_INF and hi is POS_INF:
            val = 0
        elif lo is NEG_INF:
            val = min(0, hi)
        elif hi is POS_INF:
            val = max(0, lo)
        else:
            val = min(max(0, lo), hi)
        lower[e] = upper[e] = val
    x = tuple(lower)
    if not membership(inst, x):
        raise CertificateError("constructed flow failed membership check")
    return x


def exchange_capacity(base: BaseOracle, y: Sequence[int], s: int, t: int) -> ExtInt:
    """Largest step a for which y - a*chi_s + a*chi_t stays in the base.

    Equals the minimum slack (subset sum minus bounding value) over subsets
    containing s and avoiding t; +inf when no finite constraint separates.
    """
    if s == t:
        raise ValueError("exchange endpoints must differ")
    best: ExtInt = POS_INF
    sums = _prefix_sums(y)
    p = base.p
    for m in separating_masks(base.n, s, t):
        pz = p(m)
        if not is_finite(pz):
            continue
        slack = sums[m] - pz
        if slack < best:
            best = slack
    return best


def _prefix_sums(vec: Sequence[int]) -> list:
    n = len(vec)
    sums = [0] * (1 << n)
    for m in range(1, 1 << n):
        low = m & (-m)
        sums[m] = sums[m ^ low] + vec[low.bit_length() - 1]
    return sums


# --- minimum-cost flow -----------------------------------------------------

def _blocked_exchange_pairs(base: BaseOracle, psi: Sequence[int]) -> set:
    """Pairs (s, t) for which psi + chi_s - chi_t leaves the base.

    Moving a unit from t to s hurts exactly the subsets containing t and
    avoiding s, so the move is blocked iff one of them is tight.
    """
    blocked = set()
    sums = _prefix_sums(psi)
    p = base.p
    n = base.n
    nodes = range(n)
    for m in all_subsets(n):
        pz = p(m)
        if is_finite(pz) and sums[m] == pz and 0 < m < (1 << n) - 1:
            inside = [v for v in nodes if (m >> v) & 1]
            outside = [v for v in nodes if not (m >> v) & 1]
            for t in inside:
                for s in outside:
                    blocked.add((s, t))
    return blocked


def _aux_arcs(inst: Instance, x: Sequence[int], cost: Sequence[int]) -> list:
    """Arcs of the exchange auxiliary digraph at the current flow.

    Entries are (tail, head, cost, tag); tags are ('up', e) for a unit
    increase on arc e, ('down', e) for a unit decrease, and ('exch', s, t)
    for moving a unit of net in-flow from t to s inside the base.
    """
    arcs = []
    b = inst.bounds
    for e, (u, v) in enumerate(inst.digraph.arcs):
        if x[e] < b.upper[e]:
            arcs.append((u, v, cost[e], ("up", e)))
        if x[e] > b.lower[e]:
            arcs.append((v, u, -cost[e], ("down", e)))
    psi = node_net_inflow(inst.digraph, x)
    blocked = _blocked_exchange_pairs(inst.base, psi)
    n = inst.digraph.node_count
    for s in range(n):
        for t in range(n):
            if s != t and (s, t) not in blocked:
                arcs.append((s, t, 0, ("exch", s, t)))
    return arcs


def _min_arc_negative_cycle(n: int, arcs: list) -> Optional[list]:
    """Negative-cost dicycle with the fewest arcs, as a list of aux arcs.

    Layered relaxation: dist[k][u][v] is the cheapest walk with exactly k
    arcs.  The first layer producing a negative closed walk yields a simple
    cycle (a shorter negative sub-walk would contradict minimality).
    """
    dist = [[None] * n for _ in range(n)]
    for u in range(n):
        dist[u][u] = 0
    parent = {}
    for k in range(1, n + 1):
        ndist = [[None] * n for _ in range(n)]
        improved = False
        for (a, bb, c, tag) in arcs:
            for u in range(n):
                du = dist[u][a]
                if du is None:
                    continue
                cand = du + c
                if ndist[u][bb] is None or cand < ndist[u][bb]:
                    ndist[u][bb] = cand
                    parent[(k, u, bb)] = (a, (a, bb, c, tag))
                    improved = True
        dist = ndist
        if not improved:
            return None
        for u in range(n):
            if dist[u][u] is not None and dist[u][u] < 0:
                cycle = []
                node = u
                for kk in range(k, 0, -1):
                    prev, arc = parent[(kk, u, node)]
                    cycle.append(arc)
                    node = prev
                cycle.reverse()
                return cycle
    return None


def _apply_cycle(x: list, cycle: list) -> None:
    for (_, _, _, tag) in cycle:
        if tag[0] == "up":
            x[tag[1]] += 1
        elif tag[0] == "down":
            x[tag[1]] -= 1


def _potentials(n: int, arcs: list) -> list:
    """Shortest-walk distances from an implicit all-zero source."""
    d = [0] * n
    for _ in range(n + 1):
        changed = False
        for (a, b, c, _) in arcs:
            if d[a] + c < d[b]:
                d[b] = d[a] + c
                changed = True
        if not changed:
            break
    else:
        raise CertificateError("negative cycle survived cancellation")
    base = min(d) if d else 0
    return [v - base for v in d]


def verify_optimality(inst: Instance, cost: Sequence[int], x: Sequence[int],
                      pi: DualPotential) -> None:
    """Check complementary slackness and level-set tightness; raise on failure.

    For every arc uv with potential rise above its cost the flow must sit at
    the upper bound, with rise below cost at the lower bound; every upper
    level set of the potentials must be tight for the base function.
    """
    b = inst.bounds
    for e, (u, v) in enumerate(inst.digraph.arcs):
        delta = pi[v] - pi[u]
        if x[e] < b.upper[e] and not delta <= cost[e]:
            raise CertificateError(f"arc {e}: rise {delta} exceeds cost with slack above")
        if x[e] > b.lower[e] and not delta >= cost[e]:
            raise CertificateError(f"arc {e}: rise {delta} below cost with slack below")
    if not pi.values:
        return
    d = inst.digraph
    p = inst.base.p
    top = max(pi.values)
    for level in range(1, top + 1):
        zmask = 0
        for v, val in enumerate(pi.values):
            if val >= level:
                zmask |= 1 << v
        if cut_net(d, x, zmask) != p(zmask):
            raise CertificateError(f"potential level set {zmask:b} not tight")


def min_cost_flow(inst: Instance, cost: Sequence[int]) -> Tuple[tuple, DualPotential]:
    """Integral minimum-cost feasible base-flow with certifying potentials.

    Unit augmentations along fewest-arc negative cycles of the exchange
    auxiliary digraph; feasibility is re-asserted after every augmentation.
    Arcs carrying nonzero cost must have finite bounds (otherwise the
    optimum may be unbounded).
    """
    cost = tuple(cost)
    if len(cost) != inst.digraph.arc_count:
        raise ValueError("cost length must match arc count")
    b = inst.bounds
    for e, c in enumerate(cost):
        if c != 0 and not (is_finite(b.lower[e]) and is_finite(b.upper[e])):
            raise ValueError(f"arc {e}: nonzero cost requires finite bounds")
    x = list(find_feasible(inst))
    if all(b.lower[e] == b.upper[e] for e in range(len(b))):
        pi = DualPotential((0,) * inst.digraph.node_count)
        return tuple(x), pi
    n = inst.digraph.node_count
    while True:
        arcs = _aux_arcs(inst, x, cost)
        cycle = _min_arc_negative_cycle(n, arcs)
        if cycle is None:
            break
        _apply_cycle(x, cycle)
        if not membership(inst, x):
            raise CertificateError("augmentation left the feasible region")
    pi = DualPotential(tuple(_potentials(n, arcs)))
    xt = tuple(x)
    verify_optimality(inst, cost, xt, pi)
    return xt, pi
