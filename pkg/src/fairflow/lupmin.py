"""Saturation minimizers: the fewest upper-bound-tight arcs within a set L.

The pipeline mirrors the min-max theory: clone every L-arc with a unit-cost
parallel copy while lowering the original's upper bound by one, solve the
0/1-cost minimum-cost base-flow, read the dual chain off the upper level
sets of the node potentials, and translate the chain into a narrowed
bounding pair plus a face of the base polyhedron.  The recomputed dual
value must equal the primal optimum exactly; any mismatch raises instead of
being papered over.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .core import (
    Bounds,
    Chain,
    Digraph,
    chain_classify,
    chain_entering_count,
    cut_in_sum,
    cut_net,
    cut_out_sum,
    is_finite,
)
from .baseflow import (
    CertificateError,
    DualPotential,
    Instance,
    membership,
    min_cost_flow,
)
from .setfn import BaseOracle


@dataclass(frozen=True)
class AugmentedInstance:
    instance: Instance
    cost: tuple
    copy_of: tuple  # pairs (original arc id, copy arc id)


@dataclass(frozen=True)
class LupminResult:
    min_saturated: int
    chain: Chain
    bounds: Bounds  # narrowed pair (f_L, g_L) on the original digraph
    face_base: BaseOracle
    witness: tuple


def _require_ldef(inst: Instance, L) -> None:
    b = inst.bounds
    for e in L:
        lo, hi = b.lower[e], b.upper[e]
        if not (is_finite(lo) and is_finite(hi)):
            raise ValueError(f"arc {e}: L requires finite bounds")
        if lo == hi:
            raise ValueError(f"arc {e}: L must contain no tight arcs")


def augment_instance(inst: Instance, L) -> AugmentedInstance:
    """Clone each L-arc with a [0,1] unit-cost copy; drop the original's
    upper bound by one.  Decoding adds the copy back onto the original."""
    L = sorted(L)
    _require_ldef(inst, L)
    d = inst.digraph
    arcs = list(d.arcs)
    lower = list(inst.bounds.lower)
    upper = list(inst.bounds.upper)
    cost = [0] * d.arc_count
    copy_of = []
    for e in L:
        upper[e] = upper[e] - 1
        copy_id = len(arcs)
        arcs.append(d.arcs[e])
        lower.append(0)
        upper.append(1)
        cost.append(1)
        copy_of.append((e, copy_id))
    d1 = Digraph(d.node_count, tuple(arcs))
    inst1 = Instance(d1, Bounds(tuple(lower), tuple(upper)), inst.base)
    return AugmentedInstance(inst1, tuple(cost), tuple(copy_of))


def extract_chain(pi: DualPotential, node_count: int) -> Chain:
    """Distinct upper level sets of the potentials, largest level innermost.

    Collapsing repeated level sets keeps dual optimality (lowering a
    multiplicity never decreases the dual value on a feasible instance),
    so the chain is recorded with 0/1 weights.
    """
    values = pi.values
    if len(values) != node_count:
        raise ValueError("potential length mismatch")
    top = max(values) if values else 0
    members = []
    for level in range(top, 0, -1):  # innermost (highest level) first
        zmask = 0
        for v, val in enumerate(values):
            if val >= level:
                zmask |= 1 << v
        if members and members[-1] == zmask:
            continue
        members.append(zmask)
    return Chain(node_count, tuple(members))


def derive_bounds(inst: Instance, L, chain: Chain) -> Bounds:
    """Narrowed bounding pair read off a feasible chain.

    L-arcs: tight at the upper bound when entering two or more members,
    pinched to width one when entering exactly one, tight at the lower
    bound when leaving, and capped one below the upper bound when neutral.
    Other arcs: tight at upper when entering, at lower when leaving,
    untouched when neutral.
    """
    L = frozenset(L)
    d = inst.digraph
    b = inst.bounds
    lower = list(b.lower)
    upper = list(b.upper)
    for e in range(d.arc_count):
        role = chain_classify(d, chain, e)
        if role.kind == "mixed":
            raise ValueError("arc enters and leaves a nested chain; invalid chain")
        lo, hi = b.lower[e], b.upper[e]
        if e in L:
            if role.kind == "entering":
                if role.enters >= 2:
                    lower[e], upper[e] = hi, hi
                else:
                    lower[e], upper[e] = hi - 1, hi
            elif role.kind == "leaving":
                lower[e], upper[e] = lo, lo
            else:
                lower[e], upper[e] = lo, hi - 1
        else:
            if role.kind == "entering":
                if not is_finite(hi):
                    raise ValueError(f"arc {e}: entering a feasible chain needs finite upper")
                lower[e], upper[e] = hi, hi
            elif role.kind == "leaving":
                if not is_finite(lo):
                    raise ValueError(f"arc {e}: leaving a feasible chain needs finite lower")
                lower[e], upper[e] = lo, lo
    return Bounds(tuple(lower), tuple(upper))


def chain_value(inst: Instance, L, chain: Chain) -> int:
    """Dual value of a feasible chain: entering L-arcs minus total slack."""
    d = inst.digraph
    b = inst.bounds
    p = inst.base.p
    total = chain_entering_count(d, chain, sorted(L))
    for c in chain:
        slack = cut_in_sum(d, b.upper, c) - cut_out_sum(d, b.lower, c) - p(c)
        if not is_finite(slack):
            raise ValueError("chain is not feasible: infinite slack term")
        total -= slack
    return total


def saturated_count(bounds: Bounds, L, x: Sequence[int]) -> int:
    return sum(1 for e in L if x[e] == bounds.upper[e])


def lupmin_solve(inst: Instance, L) -> LupminResult:
    """Minimum number of upper-tight L-arcs, with the describing face chain
    and narrowed bounds.  L must have finite, non-tight bounds; strip tight
    arcs before calling."""
    L = frozenset(L)
    aug = augment_instance(inst, L)
    x1, pi = min_cost_flow(aug.instance, aug.cost)
    primal = sum(aug.cost[e] * x1[e] for e in range(len(x1)))
    x = list(x1[: inst.digraph.arc_count])
    for orig, copy_id in aug.copy_of:
        x[orig] += x1[copy_id]
    x = tuple(x)
    chain = extract_chain(pi, inst.digraph.node_count)
    value = chain_value(inst, L, chain)
    if value != primal:
        raise CertificateError(
            f"dual chain value {value} differs from primal optimum {primal}")
    nsat = saturated_count(inst.bounds, L, x)
    if nsat != primal:
        raise CertificateError(
            f"decoded flow saturates {nsat} arcs, expected {primal}")
    bounds_l = derive_bounds(inst, L, chain)
    face = inst.base.face_contract(chain)
    if not membership(Instance(inst.digraph, bounds_l, face), x):
        raise CertificateError("witness escaped the narrowed polyhedron")
    return LupminResult(primal, chain, bounds_l, face, x)


_CRITERIA = ("O1", "O2", "O3", "O4", "O5", "O6")


def check_optimality_criteria(inst: Instance, L, chain: Chain,
                              x: Sequence[int]) -> Tuple[bool, Optional[str]]:
    """Evaluate the six tightness criteria of a chain against a flow.

    The conjunction must coincide with membership of x in the narrowed
    polyhedron; both predicates are computed and compared, and a mismatch
    raises (it would mean the case table and the criteria drifted apart).
    """
    L = frozenset(L)
    d = inst.digraph
    b = inst.bounds
    failed = None
    for e in range(d.arc_count):
        role = chain_classify(d, chain, e)
        lo, hi = b.lower[e], b.upper[e]
        if role.kind == "leaving" and x[e] != lo:
            failed = "O1"
            break
        if e not in L and role.kind == "entering" and x[e] != hi:
            failed = "O2"
            break
        if e in L and role.kind == "entering":
            if role.enters == 1 and not hi - 1 <= x[e] <= hi:
                failed = "O3"
                break
            if role.enters >= 2 and x[e] != hi:
                failed = "O4"
                break
        if e in L and role.kind == "neutral" and not lo <= x[e] <= hi - 1:
            failed = "O5"
            break
    if failed is None:
        p = inst.base.p
        for c in chain:
            if cut_net(d, x, c) != p(c):
                failed = "O6"
                break
    ok = failed is None
    bounds_l = derive_bounds(inst, L, chain)
    face = inst.base.face_contract(chain)
    member = membership(Instance(d, bounds_l, face), x)
    if member != ok:
        raise CertificateError(
            f"criteria verdict {ok} disagrees with membership {member}")
    return ok, failed
