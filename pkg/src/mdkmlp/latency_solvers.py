"""The latency solvers: geometric-sampling rounding for the multi-depot
configuration LP, envelope/concatenation rounding of the bidirected LP
(with and without k-way tree splitting), the combinatorial single-depot
algorithm driven by partial-cover trees, configuration-LP rounding over
joint columns, and the bottleneck-stroll-table construction.

Shared machinery: tours are node cycles through a depot; per-vehicle tours
are concatenated into routes; the clockwise/counterclockwise choice per
cycle contributes additively and independently to the latency accounting,
so taking the cheaper direction per cycle ("derandomized") is at most the
expectation the randomized analyses bound. Tour-splitting keeps each
segment's internal length within 2c(tree)/k by a greedy cut, and the
service-time variant uses the two-case snipping loop that controls mixed
length instead.
"""

import logging
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple

from . import concat_graph, lp_toolkit
from .arb_packing import WeightedDigraph, pack_arborescences
from .exact_oracles import BnsTable
from .instance import MetricInstance, RoutePlan, time_horizon
from .pc_tree import BipointTree, RootedTree, coverage_tree

log = logging.getLogger("mdkmlp.solvers")

ZERO = Fraction(0)
ONE = Fraction(1)

MU_TOL = Fraction(1, 10**9)


class SolverError(Exception):
    pass


@dataclass(frozen=True)
class SolverConfig:
    """Knobs shared by the randomized solvers.

    growth=None means "algorithm default": 1.616 for the multi-depot
    rounding, and the mu* constant for the joint-configuration rounding
    (whose guarantee needs the growth rate minimizing (c+1)/ln c).
    """

    seed: int = 0
    growth: Optional[Fraction] = None
    epsilon: Fraction = Fraction(1, 100)
    kappa: Fraction = Fraction(1)
    derandomize_directions: bool = True

    def __post_init__(self):
        if self.growth is not None:
            g = Fraction(self.growth)
            if not 1 < g < Fraction(math.e):
                raise ValueError("growth must lie strictly between 1 and e")
            object.__setattr__(self, "growth", g)
        if Fraction(self.epsilon) <= 0:
            raise ValueError("epsilon must be positive")
        if Fraction(self.kappa) < 1:
            raise ValueError("kappa must be at least 1")


DEFAULT_GROWTH = Fraction(1616, 1000)


# ---------------------------------------------------------------------------
# tour plumbing


def _preorder(tree: RootedTree, node_pos: Dict) -> List:
    children: Dict[object, List] = {}
    for (u, v) in tree.arcs:
        children.setdefault(u, []).append(v)
    for u in children:
        children[u].sort(key=lambda v: node_pos[v])
    out: List = []
    stack = [tree.root]
    while stack:
        u = stack.pop()
        out.append(u)
        for v in reversed(children.get(u, [])):
            stack.append(v)
    return out


def _orient_tour(
    interior: Sequence,
    root,
    new_nodes: Set,
    metric: Callable,
    weight: Callable,
    rng: random.Random,
    derandomize: bool,
) -> Tuple:
    """Pick a traversal direction for the cycle root -> interior -> root.

    Derandomized: the direction whose weighted distance-along-cycle sum
    over the newly covered nodes is smaller (at most the 50/50 average the
    analyses use). Randomized: a fair coin.
    """
    fwd = tuple(interior)
    rev = tuple(reversed(interior))
    if len(fwd) <= 1:
        return fwd
    if not derandomize:
        return fwd if rng.random() < 0.5 else rev

    def acct(seq) -> Fraction:
        total = ZERO
        pos = root
        elapsed = ZERO
        for v in seq:
            elapsed += Fraction(metric(pos, v))
            if v in new_nodes:
                total += Fraction(weight(v)) * elapsed
            pos = v
        return total

    return fwd if acct(fwd) <= acct(rev) else rev


def _finalize_plan(
    inst: MetricInstance, tours: List[List[Tuple]], variant: str
) -> RoutePlan:
    routes = []
    for i, r in enumerate(inst.roots):
        route: List = [r]
        for tour in tours[i]:
            route.extend(tour)
        routes.append(tuple(route))
    return RoutePlan(routes=tuple(routes), objective_variant=variant)


def _require_single_depot(inst: MetricInstance, what: str) -> None:
    if len(inst.root_set) != 1:
        raise SolverError(f"single-depot algorithm on multi-depot instance: {what}")


def _require_plain(inst: MetricInstance, what: str) -> None:
    if inst.has_weights or inst.has_service:
        raise SolverError(
            f"{what} supports only the unweighted, service-free objective"
        )


# ---------------------------------------------------------------------------
# tree -> k tours


def split_tree_into_k_tours(
    inst: MetricInstance, tree: RootedTree, k: int, keep: Optional[Set] = None
) -> List[Tuple]:
    """Double/shortcut the tree into a cycle over `keep`, greedily cut it
    into at most k segments of internal length <= 2c(tree)/k, and close
    each through the root.

    Returns exactly k cycles as node tuples starting at the root (trivial
    cycles pad the list). The greedy cut count is at most k because each
    completed segment plus its following bridge edge exceeds the limit,
    and those pieces are disjoint parts of a walk of length <= 2c(tree).
    """
    if k < 1:
        raise ValueError("k must be positive")
    keep_set = set(keep) if keep is not None else set(tree.nodes)
    if tree.root not in keep_set:
        raise ValueError("root must be kept")
    node_pos = {v: i for i, v in enumerate(inst.nodes)}
    seq = [
        v for v in _preorder(tree, node_pos) if v in keep_set and v != tree.root
    ]
    if not seq:
        return [(tree.root,)] * k
    limit = 2 * Fraction(tree.cost) / k
    segments: List[List] = [[seq[0]]]
    internal = ZERO
    for prev, v in zip(seq, seq[1:]):
        step = Fraction(inst.dist(prev, v))
        if internal + step > limit:
            segments.append([v])
            internal = ZERO
        else:
            segments[-1].append(v)
            internal += step
    if len(segments) > k:
        raise SolverError("tour splitting produced more than k segments")
    cycles = [(tree.root,) + tuple(seg) for seg in segments]
    cycles.extend([(tree.root,)] * (k - len(cycles)))
    return cycles


def break_cycle_with_service(
    inst: MetricInstance,
    tree: RootedTree,
    S: Set,
    k: int,
    d: Optional[Dict] = None,
) -> List[Tuple]:
    """Split a tree into <= k root cycles covering S, controlling mixed
    length: each cycle Z satisfies c(Z) + 2d(V(Z)) <= 2(c(Q)+d(V(Q)))/k + 2L
    with L = max over S of (root distance + service time).

    The doubled-and-shortcut root-to-w path is snipped by a two-case scan:
    a prefix is closed just before its interior charge exceeds 2M (type i),
    or exactly at a node whose own service time straddles the threshold
    (type ii). Returns exactly k cycles (padded with trivial ones).
    """
    if k < 1:
        raise ValueError("k must be positive")
    S = set(S)
    if not S <= tree.nodes:
        raise ValueError("S must be a subset of the tree's nodes")
    dfun = (lambda v: Fraction(d.get(v, 0))) if d is not None else (
        lambda v: Fraction(inst.service_time(v))
    )
    root = tree.root
    node_pos = {v: i for i, v in enumerate(inst.nodes)}
    # c-cost of the tree (tree.cost may be a c'-cost if built that way)
    c_tree = sum((Fraction(inst.dist(u, v)) for (u, v) in tree.arcs), ZERO)
    d_tree = sum((dfun(v) for v in tree.nodes), ZERO)
    M = (c_tree + d_tree) / k
    P = [root] + [
        v for v in _preorder(tree, node_pos) if v in S and v != root
    ]
    if len(P) == 1:
        return [(root,)] * k
    m = len(P) - 1  # P[m] is w, the final node of the shortcut path
    cycles: List[Tuple] = []
    start = 0
    while True:
        u = P[start]
        cum_c = ZERO
        cum_d = dfun(u)
        cut = None  # (kind, position)
        for pos in range(start + 1, m + 1):
            v = P[pos]
            cum_c += Fraction(inst.dist(P[pos - 1], v))
            cum_d += dfun(v)
            A = cum_c + 2 * cum_d - dfun(u) - dfun(v)
            if A > 2 * M:
                cut = ("i", pos)
                break
            if A <= 2 * M < A + dfun(v):
                cut = ("ii", pos)
                break
        if cut is None:
            seg = P[start : m + 1]
            cycles.append(_as_cycle(root, seg))
            break
        kind, pos = cut
        if kind == "i":
            seg = P[start:pos]  # up to the node before v
            cycles.append(_as_cycle(root, seg))
            start = pos
        else:
            seg = P[start : pos + 1]
            cycles.append(_as_cycle(root, seg))
            if pos == m:
                break
            start = pos + 1
    if len(cycles) > k:
        raise SolverError("service-aware splitting produced more than k cycles")
    cycles.extend([(root,)] * (k - len(cycles)))
    return cycles


def _as_cycle(root, seg: Sequence) -> Tuple:
    interior = tuple(v for v in seg if v != root)
    return (root,) + interior


# ---------------------------------------------------------------------------
# envelope / concatenation-graph core shared by the single-depot algorithms


def _stitch_by_concat_graph(
    inst: MetricInstance,
    points: List[Tuple[int, Fraction, object]],
    cycles_for: Callable[[object, int], List[Tuple]],
    rng: random.Random,
    derandomize: bool,
) -> Tuple[List[List[Tuple]], Tuple[Fraction, ...], concat_graph.ConcatPath]:
    """Envelope -> concatenation-graph shortest path -> stitched tours.

    `points` holds (coverage, cost-bound, witness); `cycles_for(witness,
    coverage)` turns a witness into k cycles each of length at most the
    point's cost bound. Returns (per-vehicle tour lists, s-values, path).
    """
    n = inst.n
    env = concat_graph.lower_envelope([(cov, y) for cov, y, _ in points])
    witness_by_point: Dict[Tuple[Fraction, Fraction], object] = {}
    for cov, y, wit in points:
        key = (Fraction(cov), Fraction(y))
        witness_by_point.setdefault(key, wit)
    s_values = tuple(env.value(ell) for ell in range(1, n + 1))
    path = concat_graph.shortest_concat_path(s_values)
    tours: List[List[Tuple]] = [[] for _ in range(inst.k)]
    covered: Set = set(inst.root_set)
    metric = inst.dist
    for ell in path.node_indices:
        if ell == 1:
            continue
        key = (Fraction(ell), s_values[ell - 1])
        if key not in witness_by_point:
            raise SolverError(
                f"no witness for concatenation-path corner {key}"
            )
        cycles = cycles_for(witness_by_point[key], ell)
        for i, cyc in enumerate(cycles):
            root, interior = cyc[0], list(cyc[1:])
            new = set(interior) - covered
            oriented = _orient_tour(
                interior, root, new, metric, inst.weight, rng, derandomize
            )
            tours[i].append(oriented)
            covered.update(interior)
    missing = [v for v in inst.clients if v not in covered]
    if missing:
        raise SolverError(f"stitched solution left nodes uncovered: {missing!r}")
    return tours, s_values, path


# ---------------------------------------------------------------------------
# bidirected-LP rounding (single depot)


def _aggregate_lp3(inst: MetricInstance, sol) -> Tuple[Dict, Dict]:
    """x'_{v,t} and z'_{a,t} summed over vehicles."""
    groups = sol.meta["groups"]
    xprime: Dict[Tuple[object, int], Fraction] = {}
    zprime: Dict[Tuple[Tuple, int], Fraction] = {}
    for name, val in sol.values.items():
        if name[0] == "x":
            _, gi, v, t = name
            mult = groups[gi][1]
            key = (v, t)
            xprime[key] = xprime.get(key, ZERO) + mult * val
        elif name[0] == "z":
            _, gi, a, t = name
            mult = groups[gi][1]
            key = (a, t)
            zprime[key] = zprime.get(key, ZERO) + mult * val
    return xprime, zprime


def _family_for_time(
    inst: MetricInstance, zprime: Dict, t: int, root, cache: Dict
):
    weights_t = {
        a: val for (a, tt), val in zprime.items() if tt == t and val > 0
    }
    cache_key = frozenset(weights_t.items())
    if cache_key in cache:
        return cache[cache_key]
    if not weights_t:
        fam_members = ((1, frozenset()),)
        K = 1
    else:
        K = 1
        for val in weights_t.values():
            K = math.lcm(K, val.denominator)
        D = WeightedDigraph(
            nodes=inst.nodes,
            arcs={a: int(v * K) for a, v in weights_t.items()},
        )
        fam = pack_arborescences(D, root, K)
        fam_members = fam.members
    cache[cache_key] = (fam_members, K)
    return fam_members, K


def _member_nodes(root, member) -> Set:
    nodes = {root}
    for (u, v) in member:
        nodes.add(u)
        nodes.add(v)
    return nodes


def _solve_lp3_rounding(
    inst: MetricInstance, cfg: SolverConfig, split: bool
) -> RoutePlan:
    what = "kmlp-lp" if split else "mlp-lp"
    _require_single_depot(inst, what)
    _require_plain(inst, what)
    root = inst.roots[0]
    k = inst.k
    rng = random.Random(cfg.seed)
    if not inst.clients:
        return _finalize_plan(inst, [[] for _ in range(k)], "plain")
    T = time_horizon(inst).T
    sol3 = lp_toolkit.build_and_solve_lp3(inst, T)
    xprime, zprime = _aggregate_lp3(inst, sol3)

    def in_S(v, t) -> bool:
        if v == root:
            return True
        return any(
            xprime.get((v, tp), ZERO) > 0 for tp in range(1, t + 1)
        )

    points: List[Tuple[int, Fraction, object]] = [(1, ZERO, None)]
    fam_cache: Dict = {}
    for t in range(1, T + 1):
        members, K = _family_for_time(inst, zprime, t, root, fam_cache)
        S_t = {v for v in inst.nodes if in_S(v, t)}
        for gamma, member in members:
            nodes = _member_nodes(root, member)
            cov = len(nodes & S_t)
            cost = sum((Fraction(inst.dist(u, v)) for (u, v) in member), ZERO)
            if split:
                y = 2 * cost / k + 2 * t
            else:
                y = 2 * cost
            points.append((cov, y, (member, t, frozenset(S_t))))

    def cycles_for(wit, ell) -> List[Tuple]:
        member, t, S_t = wit
        cost = sum((Fraction(inst.dist(u, v)) for (u, v) in member), ZERO)
        tree = RootedTree(root=root, arcs=frozenset(member), cost=cost)
        keep = tree.nodes & S_t
        if split:
            return split_tree_into_k_tours(inst, tree, k, keep)
        node_pos = {v: i for i, v in enumerate(inst.nodes)}
        interior = tuple(
            v for v in _preorder(tree, node_pos) if v in keep and v != root
        )
        return [(root,) + interior] + [(root,)] * (k - 1)

    tours, s_values, path = _stitch_by_concat_graph(
        inst, points, cycles_for, rng, cfg.derandomize_directions
    )
    plan = _finalize_plan(inst, tours, "plain")
    fn = solve_kmlp_lp if split else solve_mlp_lp
    fn.last_diagnostics = {
        "s_values": s_values,
        "path": path,
        "lp_objective": sol3.objective_value,
        "T": T,
    }
    return plan


def solve_kmlp_lp(inst: MetricInstance, cfg: Optional[SolverConfig] = None) -> RoutePlan:
    """Single-depot rounding of the bidirected LP with k-way tree splits;
    total latency at most 2*mu* times the LP optimum (derandomized)."""
    return _solve_lp3_rounding(inst, cfg or SolverConfig(), split=True)


def solve_mlp_lp(inst: MetricInstance, cfg: Optional[SolverConfig] = None) -> RoutePlan:
    """Single-vehicle specialization: no splitting, factor mu*."""
    if inst.k != 1:
        raise SolverError("mlp-lp requires exactly one vehicle")
    return _solve_lp3_rounding(inst, cfg or SolverConfig(), split=False)


# ---------------------------------------------------------------------------
# combinatorial single-depot algorithm


def solve_kmlp_combinatorial(
    inst: MetricInstance, cfg: Optional[SolverConfig] = None
) -> RoutePlan:
    """Single-depot algorithm driven by partial-cover trees on distance
    prefixes; total latency at most 2*mu* times the bottleneck-stroll
    lower bound (derandomized)."""
    cfg = cfg or SolverConfig()
    _require_single_depot(inst, "kmlp-comb")
    _require_plain(inst, "kmlp-comb")
    root = inst.roots[0]
    k = inst.k
    rng = random.Random(cfg.seed)
    if not inst.clients:
        return _finalize_plan(inst, [[] for _ in range(k)], "plain")

    node_pos = {v: i for i, v in enumerate(inst.nodes)}
    order = sorted(
        inst.nodes, key=lambda v: (inst.dist(root, v), node_pos[v])
    )
    points: List[Tuple[int, Fraction, object]] = [(1, ZERO, None)]
    for j in range(2, inst.n + 1):
        Vj = order[:j]
        keep_idx = [node_pos[v] for v in Vj]
        sub = MetricInstance(
            nodes=tuple(Vj),
            roots=(root,),
            cost=tuple(
                tuple(inst.cost[a][b] for b in keep_idx) for a in keep_idx
            ),
        )
        reach = 2 * Fraction(inst.dist(root, order[j - 1]))
        probe_cache: Dict = {}
        for ell in range(1, j + 1):
            Q = coverage_tree(sub, root, ell, cache=probe_cache)
            parts = [Q] if isinstance(Q, RootedTree) else [Q.T1, Q.T2]
            for tree in parts:
                y = 2 * Fraction(tree.cost) / k + reach
                points.append((len(tree.nodes), y, tree))

    def cycles_for(tree: RootedTree, ell) -> List[Tuple]:
        return split_tree_into_k_tours(inst, tree, k)

    tours, s_values, path = _stitch_by_concat_graph(
        inst, points, cycles_for, rng, cfg.derandomize_directions
    )
    plan = _finalize_plan(inst, tours, "plain")
    solve_kmlp_combinatorial.last_diagnostics = {
        "s_values": s_values,
        "path": path,
    }
    return plan


# ---------------------------------------------------------------------------
# geometric-sampling rounding of the configuration LPs


def _lp_metric(inst: MetricInstance) -> Callable:
    if inst.has_service:
        return inst.service_symmetric
    return lambda u, v: Fraction(inst.dist(u, v))


def _slot_groups(inst: MetricInstance, groups) -> List[int]:
    """Group index for each of the k vehicle slots, in roots order."""
    gi_of_root = {r: gi for gi, (r, mult) in enumerate(groups)}
    return [gi_of_root[r] for r in inst.roots]


def _geometric_schedule(
    cfg: SolverConfig, growth: Fraction, n: int, T: int, rng: random.Random
) -> List[float]:
    c = float(growth)
    h = c ** rng.random()
    D = 0
    while h * c**D < T:
        D += 1
    extra = math.ceil(
        float(cfg.kappa) * math.log(max(n * T / float(cfg.epsilon), math.e))
    )
    N = D + extra
    return [h * c**j for j in range(N + 1)]


def _sample_from(
    dist: List[Tuple[object, Fraction]], rng: random.Random
) -> Optional[object]:
    """One draw from a sub-distribution (residual mass -> None)."""
    u = rng.random()
    acc = ZERO
    for item, p in dist:
        acc += p
        if u < acc:
            return item
    return None


def _append_leftovers(
    inst: MetricInstance, tours: List[List[Tuple]], covered: Set
) -> None:
    leftovers = [v for v in inst.clients if v not in covered]
    leftovers.sort(
        key=lambda v: (
            min(inst.dist(r, v) for r in inst.depots_for(v)),
            inst.nodes.index(v),
        )
    )
    for v in leftovers:
        depots = inst.depots_for(v)
        best = min(
            depots, key=lambda r: (inst.dist(r, v), inst.roots.index(r))
        )
        slot = inst.roots.index(best)
        tours[slot].append((v,))
        covered.add(v)


def solve_multidepot(
    inst: MetricInstance,
    cfg: Optional[SolverConfig] = None,
    lp1sol: Optional[lp_toolkit.LpSolution] = None,
) -> RoutePlan:
    """Randomized rounding of the per-vehicle configuration LP: geometric
    time points, one independent column draw per vehicle per time point,
    doubled columns as tours, truncation plus direct-visit cleanup.

    Expected cost at most ~8.4965 times the LP optimum (plus the
    truncation slack); supports weights, allowed depots, and service times
    (via the symmetrized service metric). `lp1sol` lets many seeds reuse
    one solved LP."""
    cfg = cfg or SolverConfig()
    rng = random.Random(cfg.seed)
    variant = inst.default_variant
    if not inst.clients:
        return _finalize_plan(inst, [[] for _ in range(inst.k)], variant)
    if lp1sol is not None:
        if lp1sol.which != "LP1":
            raise SolverError("solve_multidepot needs a per-vehicle LP solution")
        T = lp1sol.T
        sol1 = lp1sol
    else:
        T = time_horizon(inst).T
        sol1 = lp_toolkit.build_and_solve_lp1(inst, T)
    groups = sol1.meta["groups"]
    columns = sol1.meta["columns"]
    slot_gi = _slot_groups(inst, groups)
    metric = _lp_metric(inst)
    node_pos = {v: i for i, v in enumerate(inst.nodes)}

    # per (group, time): deterministic column distribution
    by_gt: Dict[Tuple[int, int], List[Tuple[object, Fraction]]] = {}
    for (gi, C, t), order in columns.items():
        val = sol1.value(("z", gi, C, t))
        if val > 0:
            by_gt.setdefault((gi, t), []).append((order, val / cfg.kappa))
    for key in by_gt:
        by_gt[key].sort(key=lambda item: tuple(node_pos[v] for v in item[0]))

    growth = cfg.growth or DEFAULT_GROWTH
    schedule = _geometric_schedule(cfg, growth, inst.n, T, rng)
    tours: List[List[Tuple]] = [[] for _ in range(inst.k)]
    covered: Set = set()
    clients = set(inst.clients)
    for tj in schedule:
        tt = min(T, int(tj))
        for slot in range(inst.k):
            gi = slot_gi[slot]
            order = _sample_from(by_gt.get((gi, tt), []), rng)
            if not order:
                continue
            root = inst.roots[slot]
            new = set(order) - covered
            oriented = _orient_tour(
                order, root, new, metric, inst.weight, rng,
                cfg.derandomize_directions,
            )
            tours[slot].append(oriented)
            covered.update(order)
        if clients <= covered:
            break
    _append_leftovers(inst, tours, covered)
    plan = _finalize_plan(inst, tours, variant)
    solve_multidepot.last_diagnostics = {
        "lp_objective": sol1.objective_value,
        "T": T,
        "iterations": len(schedule),
    }
    return plan


def round_lp2(
    inst: MetricInstance,
    lp2sol: lp_toolkit.LpSolution,
    cfg: Optional[SolverConfig] = None,
) -> RoutePlan:
    """Rounding of the joint-configuration LP: geometric time points with a
    single configuration draw per point covering all k vehicles at once.

    The single joint draw avoids the independent-sampling loss, giving an
    expected factor of about mu* < 3.5912 (plus truncation slack); the
    default growth rate is therefore mu* itself, the minimizer of
    (c+1)/ln c."""
    cfg = cfg or SolverConfig()
    if lp2sol.which != "LP2":
        raise SolverError("round_lp2 needs a joint-configuration LP solution")
    _require_plain(inst, "lp2-round")
    rng = random.Random(cfg.seed)
    variant = inst.default_variant
    if not inst.clients:
        return _finalize_plan(inst, [[] for _ in range(inst.k)], variant)
    T = lp2sol.T
    configs = lp2sol.meta["configs"]
    groups = lp2sol.meta["groups"]
    node_pos = {v: i for i, v in enumerate(inst.nodes)}

    by_t: Dict[int, List[Tuple[object, Fraction]]] = {}
    for name, val in lp2sol.values.items():
        if name[0] != "z" or val <= 0:
            continue
        _, U, t = name
        by_t.setdefault(t, []).append((U, val / cfg.kappa))
    for t in by_t:
        by_t[t].sort(key=lambda item: tuple(sorted(node_pos[v] for v in item[0])))

    # align each group's witness paths with the instance's root slots
    slot_of: List[int] = []
    for r, mult in groups:
        slot_of.extend(i for i, rr in enumerate(inst.roots) if rr == r)
    metric = _lp_metric(inst)

    growth = cfg.growth or concat_graph.mu_star(MU_TOL)
    schedule = _geometric_schedule(cfg, growth, inst.n, T, rng)
    tours: List[List[Tuple]] = [[] for _ in range(inst.k)]
    covered: Set = set()
    clients = set(inst.clients)
    for tj in schedule:
        tt = min(T, int(tj))
        U = _sample_from(by_t.get(tt, []), rng)
        if U is None:
            continue
        routes = configs[U]
        for w_idx, route in enumerate(routes):
            slot = slot_of[w_idx]
            root, order = route[0], route[1:]
            if not order:
                continue
            new = set(order) - covered
            oriented = _orient_tour(
                order, root, new, metric, inst.weight, rng,
                cfg.derandomize_directions,
            )
            tours[slot].append(oriented)
            covered.update(order)
        if clients <= covered:
            break
    _append_leftovers(inst, tours, covered)
    return _finalize_plan(inst, tours, variant)


# ---------------------------------------------------------------------------
# construction from the bottleneck-stroll table


def bnslb_construction(
    inst: MetricInstance, table: BnsTable, cfg: Optional[SolverConfig] = None
) -> RoutePlan:
    """Stitch doubled bottleneck-stroll witness paths along the shortest
    concatenation path over twice the table values; total latency at most
    mu* times the table sum (derandomized)."""
    cfg = cfg or SolverConfig()
    _require_plain(inst, "bnslb-construct")
    if len(table.values) != inst.n:
        raise SolverError("table size does not match the instance")
    if not table.witnesses:
        raise SolverError("table has no witnesses")
    rng = random.Random(cfg.seed)
    if not inst.clients:
        return _finalize_plan(inst, [[] for _ in range(inst.k)], "plain")
    s = tuple(2 * Fraction(b) for b in table.values)
    path = concat_graph.shortest_concat_path(s)
    tours: List[List[Tuple]] = [[] for _ in range(inst.k)]
    covered: Set = set(inst.root_set)
    for ell in path.node_indices:
        if ell == 1:
            continue
        witness = table.witnesses[ell - 1]
        for slot, route in enumerate(witness):
            root, order = route[0], route[1:]
            if not order:
                continue
            new = set(order) - covered
            oriented = _orient_tour(
                order, root, new, inst.dist, inst.weight, rng,
                cfg.derandomize_directions,
            )
            tours[slot].append(oriented)
            covered.update(order)
    missing = [v for v in inst.clients if v not in covered]
    if missing:
        raise SolverError(f"witnesses left nodes uncovered: {missing!r}")
    plan = _finalize_plan(inst, tours, "plain")
    bnslb_construction.last_diagnostics = {"s_values": s, "path": path}
    return plan
