"""Set-function oracles over the node set.

A SetFn is an evaluation oracle over bitmask subsets, optionally backed by a
dense table.  This module provides the supermodularity checks, complements,
the cut-difference function of a bounded digraph, exhaustive extremization
(the swap-ready stand-in for a submodular-function-minimization routine),
the pointwise-minimum envelope of an enumerated base polyhedron, and face
contraction of a base oracle along a chain.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .core import (
    MAX_NODES,
    Bounds,
    Chain,
    Digraph,
    ExtInt,
    all_subsets,
    cut_in_sum,
    cut_out_sum,
    is_finite,
    mask_nodes,
)


class SetFn:
    """Subset -> extended-integer oracle with value 0 on the empty set."""

    __slots__ = ("n", "table", "_fn")

    def __init__(self, n: int, table: Optional[Sequence[ExtInt]] = None,
                 fn: Optional[Callable[[int], ExtInt]] = None):
        if not (0 < n <= MAX_NODES):
            raise ValueError(f"ground set size must be in 1..{MAX_NODES}")
        if (table is None) == (fn is None):
            raise ValueError("exactly one of table/fn required")
        self.n = n
        self.table = tuple(table) if table is not None else None
        self._fn = fn
        if self.table is not None and len(self.table) != 1 << n:
            raise ValueError("dense table must have 2^n entries")
        if self(0) != 0:
            raise ValueError("set function must vanish on the empty set")

    def __call__(self, mask: int) -> ExtInt:
        if self.table is not None:
            return self.table[mask]
        return self._fn(mask)

    @property
    def has_table(self) -> bool:
        return self.table is not None

    def densify(self) -> "SetFn":
        if self.has_table:
            return self
        return SetFn(self.n, table=[self._fn(m) for m in all_subsets(self.n)])

    @classmethod
    def zero(cls, n: int) -> "SetFn":
        return cls(n, table=[0] * (1 << n))

    @classmethod
    def modular(cls, vec: Sequence[int]) -> "SetFn":
        n = len(vec)
        table = [0] * (1 << n)
        for m in range(1, 1 << n):
            low = m & (-m)
            table[m] = table[m ^ low] + vec[low.bit_length() - 1]
        return cls(n, table=table)


def _check_pairwise(fn: SetFn, supermodular: bool):
    """Exhaustive modularity check; returns (ok, witness pair or None)."""
    if not fn.has_table:
        raise ValueError("dense table required for exhaustive check")
    t = fn.table
    size = 1 << fn.n
    for x in range(size):
        for y in range(x + 1, size):
            meet = x & y
            if meet == x or meet == y:
                continue  # nested pairs hold trivially
            lhs = t[x] + t[y]
            rhs = t[meet] + t[x | y]
            if supermodular:
                if not lhs <= rhs:
                    return False, (x, y)
            else:
                if not lhs >= rhs:
                    return False, (x, y)
    return True, None


def check_fully_supermodular(fn: SetFn):
    return _check_pairwise(fn, supermodular=True)


def check_fully_submodular(fn: SetFn):
    return _check_pairwise(fn, supermodular=False)


def _check_restricted(fn: SetFn, supermodular: bool, crossing: bool):
    if not fn.has_table:
        raise ValueError("dense table required for exhaustive check")
    t = fn.table
    size = 1 << fn.n
    full = size - 1
    for x in range(size):
        for y in range(x + 1, size):
            meet = x & y
            if meet == 0 or meet == x or meet == y:
                continue  # not properly intersecting
            if crossing and (x | y) == full:
                continue
            lhs = t[x] + t[y]
            rhs = t[meet] + t[x | y]
            if supermodular:
                if not lhs <= rhs:
                    return False, (x, y)
            else:
                if not lhs >= rhs:
                    return False, (x, y)
    return True, None


def check_intersecting_supermodular(fn: SetFn):
    return _check_restricted(fn, supermodular=True, crossing=False)


def check_crossing_supermodular(fn: SetFn):
    return _check_restricted(fn, supermodular=True, crossing=True)


def complement(fn: SetFn) -> SetFn:
    """Complementary set function X -> f(S) - f(S-X); an involution that
    swaps super- and submodularity.  Requires f(S) finite."""
    full = (1 << fn.n) - 1
    top = fn(full)
    if not is_finite(top):
        raise ValueError("complement requires a finite value on the full set")
    dense = fn.densify()
    return SetFn(fn.n, table=[top - dense(full ^ m) for m in all_subsets(fn.n)])


def cut_difference(digraph: Digraph, bounds: Bounds) -> SetFn:
    """The fully submodular function Z -> (upper in-cut) - (lower out-cut)."""
    n = digraph.node_count
    table = [cut_in_sum(digraph, bounds.upper, m) - cut_out_sum(digraph, bounds.lower, m)
             for m in all_subsets(n)]
    return SetFn(n, table=table)


def brute_extremize(fn: SetFn, mode: str = "max",
                    masks: Optional[Iterable[int]] = None):
    """Exhaustive scan for the extreme value of a set function.

    Ties break to the smallest bitmask.  `masks` restricts the scanned
    family (defaults to all subsets); pass e.g. `proper_nonempty_masks(n)`
    or `separating_masks(n, s, t)` for constrained queries.
    """
    if mode not in ("max", "min"):
        raise ValueError("mode must be 'max' or 'min'")
    best_val = None
    best_mask = None
    scan = masks if masks is not None else all_subsets(fn.n)
    for m in scan:
        v = fn(m)
        if best_val is None or (v > best_val if mode == "max" else v < best_val):
            best_val, best_mask = v, m
    if best_mask is None:
        raise ValueError("empty scan family")
    return best_val, best_mask


def proper_nonempty_masks(n: int):
    full = (1 << n) - 1
    return range(1, full)


def separating_masks(n: int, inside: int, outside: int):
    """All subsets containing `inside` and avoiding `outside`."""
    for m in all_subsets(n):
        if (m >> inside) & 1 and not (m >> outside) & 1:
            yield m


def envelope_value(points: Sequence[Sequence[int]], mask: int) -> ExtInt:
    """Minimum of the coordinate sum over a subset, over the given points."""
    if not points:
        raise ValueError("empty point list")
    best = None
    for pt in points:
        s = 0
        for v in mask_nodes(mask):
            s += pt[v]
        if best is None or s < best:
            best = s
    return best


def envelope_setfn(points: Sequence[Sequence[int]], n: int) -> SetFn:
    """Dense envelope; the unique fully supermodular function of the integral
    base polyhedron whose integral points are exactly the ones given."""
    if not points:
        raise ValueError("empty point list")
    return SetFn(n, table=[envelope_value(points, m) for m in all_subsets(n)])


@dataclass(frozen=True)
class BaseOracle:
    """A zero-base polyhedron given by a fully supermodular function with
    value 0 on the full node set, plus the stack of face chains applied so
    far.  Supermodularity is asserted exhaustively in tests, not here."""

    n: int
    p: SetFn
    face_chains: tuple = ()

    def __post_init__(self):
        full = (1 << self.n) - 1
        if self.p.n != self.n:
            raise ValueError("set function ground size mismatch")
        if self.p(full) != 0:
            raise ValueError("base oracle requires value 0 on the full set")

    @classmethod
    def zero(cls, n: int) -> "BaseOracle":
        return cls(n, SetFn.zero(n))

    @classmethod
    def from_table(cls, n: int, table: Sequence[ExtInt]) -> "BaseOracle":
        return cls(n, SetFn(n, table=table))

    @classmethod
    def from_points(cls, points: Sequence[Sequence[int]], n: int) -> "BaseOracle":
        return cls(n, envelope_setfn(points, n))

    def contains(self, vec: Sequence[int]) -> bool:
        """Integral membership: zero total and every subset sum at or above
        the bounding function."""
        if sum(vec) != 0:
            return False
        prefix = _subset_sums(vec)
        p = self.p
        return all(prefix[m] >= p(m) for m in all_subsets(self.n))

    def face_contract(self, chain: Chain) -> "BaseOracle":
        """Restrict to the face where every chain member is tight.

        The face of a base polyhedron along a chain decomposes as a direct
        sum over the difference blocks: with C_0 = empty and C_{r+1} = V,
        the new function is
            sum_i [ p(C_{i-1} | (Z & S_i)) - p(C_{i-1}) ],  S_i = C_i - C_{i-1}.
        Every chain member must have a finite value.
        """
        if chain.node_count != self.n:
            raise ValueError("chain ground size mismatch")
        if len(chain) == 0:
            return self
        full = (1 << self.n) - 1
        p = self.p
        cuts = list(chain.members) + [full]
        for c in chain.members:
            if not is_finite(p(c)):
                raise ValueError("face chain member has infinite value")
        table = []
        for z in all_subsets(self.n):
            total: ExtInt = 0
            prev = 0
            for c in cuts:
                block = c & ~prev
                total = total + (p(prev | (z & block)) - p(prev))
                if not is_finite(total):
                    break
                prev = c
            table.append(total)
        face = SetFn(self.n, table=table)
        return BaseOracle(self.n, face, self.face_chains + (chain,))


def _subset_sums(vec: Sequence[int]) -> list:
    n = len(vec)
    sums = [0] * (1 << n)
    for m in range(1, 1 << n):
        low = m & (-m)
        sums[m] = sums[m ^ low] + vec[low.bit_length() - 1]
    return sums
