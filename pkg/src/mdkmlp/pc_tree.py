"""Prize-collecting trees via LP scaling + arborescence packing, and
partial-cover (bipoint) trees via parametric binary search.

The construction: solve the bidirected prize-collecting LP exactly, scale
the arc values to integers, pack weighted arborescences with the required
coverage guarantee, and keep the family member with the cheapest
prize-collecting objective. A convexity argument then turns a binary
search over uniform penalties into trees (or convex combinations of two
trees) hitting an exact coverage or budget target.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, Optional, Tuple

from . import arb_packing, lp_toolkit
from .instance import MetricInstance

log = logging.getLogger("mdkmlp.pc_tree")

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class RootedTree:
    """An out-tree of directed arcs rooted at `root`.

    `cost` is the sum of arc costs under whichever arc-cost function built
    the tree (with the directed service metric this is edge cost plus the
    service times of all non-root tree nodes, since every node has exactly
    one in-arc).
    """

    root: object
    arcs: FrozenSet[Tuple[object, object]]
    cost: Fraction

    def __post_init__(self):
        parents: Dict[object, object] = {}
        for (u, v) in self.arcs:
            if v == self.root or v in parents:
                raise ValueError("arcs do not form a rooted out-tree")
            parents[v] = u
        for v in parents:
            seen = set()
            cur = v
            while cur != self.root:
                if cur in seen or cur not in parents:
                    raise ValueError("arcs do not form a rooted out-tree")
                seen.add(cur)
                cur = parents[cur]

    @property
    def nodes(self) -> FrozenSet[object]:
        out = {self.root}
        for (u, v) in self.arcs:
            out.add(u)
            out.add(v)
        return frozenset(out)

    @property
    def coverage(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class BipointTree:
    """Convex combination a*T1 + b*T2 of two trees with a shared root."""

    a: Fraction
    b: Fraction
    T1: RootedTree
    T2: RootedTree

    def __post_init__(self):
        if self.a < 0 or self.b < 0 or self.a + self.b != 1:
            raise ValueError("coefficients must be nonnegative and sum to 1")
        if self.T1.root != self.T2.root:
            raise ValueError("constituent trees must share the root")

    @property
    def root(self):
        return self.T1.root

    @property
    def cost(self) -> Fraction:
        return self.a * self.T1.cost + self.b * self.T2.cost

    @property
    def expected_coverage(self) -> Fraction:
        return self.a * len(self.T1.nodes) + self.b * len(self.T2.nodes)

    def expected_weight(self, w: Callable[[object], Fraction]) -> Fraction:
        w1 = sum((Fraction(w(v)) for v in self.T1.nodes), ZERO)
        w2 = sum((Fraction(w(v)) for v in self.T2.nodes), ZERO)
        return self.a * w1 + self.b * w2


def _tree_from_member(
    root, member: FrozenSet, cost_fn: Callable
) -> RootedTree:
    cost = sum((Fraction(cost_fn(u, v)) for (u, v) in member), ZERO)
    return RootedTree(root=root, arcs=frozenset(member), cost=cost)


def pc_tree(
    inst: MetricInstance,
    root,
    penalties: Dict[object, Fraction],
    arc_cost: Optional[Callable] = None,
) -> Tuple[RootedTree, Fraction]:
    """A rooted tree whose cost plus uncovered penalties is at most the
    prize-collecting LP optimum.

    Returns (tree, objective). Nothing here needs symmetric costs, so the
    directed service metric is a legal `arc_cost`.
    """
    tree, obj, _ = _pc_tree_probe(inst, root, penalties, arc_cost)
    return tree, obj


def _pc_tree_probe(
    inst: MetricInstance,
    root,
    penalties: Dict[object, Fraction],
    arc_cost: Optional[Callable] = None,
) -> Tuple[RootedTree, Fraction, int]:
    """pc_tree plus the max denominator of the LP vertex encountered."""
    cost_fn = arc_cost or (lambda u, v: Fraction(inst.dist(u, v)))
    pen = {
        v: Fraction(penalties.get(v, 0)) for v in inst.nodes if v != root
    }
    sol = lp_toolkit.build_and_solve_pclp(inst, root, pen, arc_cost=arc_cost)
    max_denom = 1
    for val in sol.values.values():
        max_denom = max(max_denom, val.denominator)
    xvals = {
        a: sol.value(("x", a)) for a in sol.meta["arcs"] if sol.value(("x", a)) > 0
    }
    K = 1
    for val in xvals.values():
        K = math.lcm(K, val.denominator)
    if not xvals or K == 0:
        # LP pays every penalty: the trivial tree achieves the optimum
        obj = sum(pen.values(), ZERO)
        return RootedTree(root=root, arcs=frozenset(), cost=ZERO), obj, max_denom
    D = arb_packing.WeightedDigraph(
        nodes=inst.nodes, arcs={a: int(v * K) for a, v in xvals.items()}
    )
    family = arb_packing.pack_arborescences(D, root, K)
    node_pos = {v: i for i, v in enumerate(inst.nodes)}

    def member_key(item):
        gamma, F = item
        nodes = {root}
        for (u, v) in F:
            nodes.add(u)
            nodes.add(v)
        obj = sum((Fraction(cost_fn(u, v)) for (u, v) in F), ZERO)
        obj += sum(p for v, p in pen.items() if v not in nodes)
        arcs_key = tuple(
            sorted((node_pos[u], node_pos[v]) for (u, v) in F)
        )
        return (obj, len(nodes), arcs_key)

    best = min(family.members, key=member_key)
    obj, _, _ = member_key(best)
    tree = _tree_from_member(root, best[1], cost_fn)
    if obj > sol.objective_value:
        raise arb_packing.PackingError(
            "prize-collecting guarantee violated: best member exceeds LP optimum"
        )
    return tree, obj, max_denom


def uniform_pc_tree(
    inst: MetricInstance,
    root,
    lam: Fraction,
    arc_cost: Optional[Callable] = None,
) -> Tuple[RootedTree, Fraction]:
    """pc_tree with every penalty equal to lam."""
    lam = Fraction(lam)
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    pen = {v: lam for v in inst.nodes if v != root}
    return pc_tree(inst, root, pen, arc_cost=arc_cost)


ProbeCache = Dict[Fraction, Tuple[RootedTree, Fraction, int]]


def _probe(
    inst, root, lam: Fraction, weights, arc_cost, cache: ProbeCache
) -> Tuple[RootedTree, Fraction, int]:
    if lam not in cache:
        pen = {v: lam * Fraction(weights(v)) for v in inst.nodes if v != root}
        cache[lam] = _pc_tree_probe(inst, root, pen, arc_cost)
    return cache[lam]


def coverage_tree(
    inst: MetricInstance,
    root,
    B: int,
    arc_cost: Optional[Callable] = None,
    cache: Optional[ProbeCache] = None,
):
    """A tree (or bipoint tree) of cost at most the cheapest rooted-path
    collection spanning >= B nodes, with (expected) node count exactly B.

    Binary search on the uniform penalty: coverage is nondecreasing in the
    penalty, so the search keeps a bracket [lo, hi] with coverage below and
    above B and stops either at an exact hit or once the interval is too
    narrow to contain two parametric breakpoints, at which point the convex
    combination of the bracket trees hits B exactly in expectation.
    """
    if not 1 <= B <= inst.n:
        raise ValueError(f"coverage target {B} out of range 1..{inst.n}")
    cache = {} if cache is None else cache
    weights = lambda v: ONE

    def coverage(tree: RootedTree) -> int:
        return len(tree.nodes)

    cost_fn = arc_cost or (lambda u, v: Fraction(inst.dist(u, v)))
    cmax = max(
        (Fraction(cost_fn(u, v)) for u in inst.nodes for v in inst.nodes if u != v),
        default=ZERO,
    )
    lo = ZERO
    hi = inst.n * cmax + 1
    tree_lo, _, m1 = _probe(inst, root, lo, weights, arc_cost, cache)
    max_denom = m1
    if coverage(tree_lo) >= B:
        return tree_lo
    tree_hi, _, m2 = _probe(inst, root, hi, weights, arc_cost, cache)
    max_denom = max(max_denom, m2)
    if coverage(tree_hi) == B:
        return tree_hi
    if coverage(tree_hi) < B:
        raise ValueError(f"instance cannot span {B} nodes from {root!r}")
    while hi - lo >= Fraction(1, 2 * inst.n * inst.n * max_denom):
        mid = (lo + hi) / 2
        tree_mid, _, md = _probe(inst, root, mid, weights, arc_cost, cache)
        max_denom = max(max_denom, md)
        cov = coverage(tree_mid)
        if cov == B:
            return tree_mid
        if cov < B:
            lo, tree_lo = mid, tree_mid
        else:
            hi, tree_hi = mid, tree_mid
    n1, n2 = coverage(tree_lo), coverage(tree_hi)
    a = Fraction(n2 - B, n2 - n1)
    return BipointTree(a=a, b=1 - a, T1=tree_lo, T2=tree_hi)


def budget_tree(
    inst: MetricInstance,
    root,
    weights: Dict[object, Fraction],
    C: Fraction,
    arc_cost: Optional[Callable] = None,
    cache: Optional[ProbeCache] = None,
):
    """A tree (or bipoint tree) of cost exactly C whose (expected) covered
    node weight is at least that of any rooted-path collection of cost <= C.

    Degenerate case: if C is at least the cost of the everything-covering
    tree, that tree is returned as-is (cost below C), with a warning.
    """
    C = Fraction(C)
    if C < 0:
        raise ValueError("budget must be nonnegative")
    wmap = {v: Fraction(weights.get(v, 1)) for v in inst.nodes if v != root}
    if any(w < 0 for w in wmap.values()):
        raise ValueError("negative weight")
    wfun = lambda v: wmap.get(v, ZERO)
    cache = {} if cache is None else cache
    cost_fn = arc_cost or (lambda u, v: Fraction(inst.dist(u, v)))
    cmax = max(
        (Fraction(cost_fn(u, v)) for u in inst.nodes for v in inst.nodes if u != v),
        default=ZERO,
    )
    W = sum(wmap.values(), ZERO)
    lo = ZERO
    hi = inst.n * cmax * max(W, 1) + 1
    tree_lo, _, m1 = _probe(inst, root, lo, wfun, arc_cost, cache)
    max_denom = m1
    if tree_lo.cost == C:
        return tree_lo
    if tree_lo.cost > C:
        raise ValueError("zero-penalty tree already exceeds the budget")
    tree_hi, _, m2 = _probe(inst, root, hi, wfun, arc_cost, cache)
    max_denom = max(max_denom, m2)
    if tree_hi.cost == C:
        return tree_hi
    if tree_hi.cost < C:
        log.warning(
            "budget %s exceeds the full-coverage tree cost %s; returning it",
            C, tree_hi.cost,
        )
        return tree_hi
    Wd = max(int(math.lcm(*[w.denominator for w in wmap.values()])) if wmap else 1, 1)
    width_denom = max(W * W * Wd, 1)
    while hi - lo >= Fraction(1, 2) / width_denom / max_denom:
        mid = (lo + hi) / 2
        tree_mid, _, md = _probe(inst, root, mid, wfun, arc_cost, cache)
        max_denom = max(max_denom, md)
        if tree_mid.cost == C:
            return tree_mid
        if tree_mid.cost < C:
            lo, tree_lo = mid, tree_mid
        else:
            hi, tree_hi = mid, tree_mid
    c1, c2 = tree_lo.cost, tree_hi.cost
    a = (c2 - C) / (c2 - c1)
    return BipointTree(a=a, b=1 - a, T1=tree_lo, T2=tree_hi)
