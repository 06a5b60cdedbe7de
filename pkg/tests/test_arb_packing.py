import random

import pytest

from mdkmlp.arb_packing import (
    ArbFamily,
    PackingError,
    WeightedDigraph,
    connectivity,
    eulerianize,
    max_splittable,
    pack_arborescences,
    verify_packing,
)


def random_digraph(rng, max_nodes=6, max_w=5):
    """Random digraph with in-weight >= out-weight enforced by topping up."""
    n = rng.randint(2, max_nodes)
    nodes = tuple(f"n{i}" for i in range(n))
    r = nodes[0]
    arcs = {}
    for u in nodes:
        for v in nodes:
            if u != v and rng.random() < 0.45:
                arcs[(u, v)] = rng.randint(1, max_w)
    D = WeightedDigraph(nodes=nodes, arcs=arcs)
    for u in nodes:
        if u == r:
            continue
        deficit = D.out_weight(u) - D.in_weight(u)
        if deficit > 0:
            arcs[(r, u)] = arcs.get((r, u), 0) + deficit
    return WeightedDigraph(nodes=nodes, arcs=arcs), r


class TestConnectivity:
    def test_single_arc(self):
        D = WeightedDigraph(nodes=("r", "u"), arcs={("r", "u"): 2, ("u", "r"): 2})
        assert connectivity(D, "r", "u") == 2

    def test_two_disjoint_paths(self):
        D = WeightedDigraph(
            nodes=("r", "u", "v"),
            arcs={("r", "u"): 1, ("u", "v"): 1, ("r", "v"): 1},
        )
        assert connectivity(D, "r", "v") == 2

    def test_disconnected(self):
        D = WeightedDigraph(nodes=("r", "u", "v"), arcs={("r", "u"): 1})
        assert connectivity(D, "r", "v") == 0

    def test_unknown_node(self):
        D = WeightedDigraph(nodes=("r", "u"), arcs={("r", "u"): 1})
        with pytest.raises(ValueError, match="unknown node"):
            connectivity(D, "r", "zz")


class TestEulerianize:
    def test_single_imbalance(self):
        D = WeightedDigraph(nodes=("r", "u"), arcs={("r", "u"): 2})
        out = eulerianize(D, "r")
        assert out.weight(("u", "r")) == 2
        for nd in out.nodes:
            assert out.in_weight(nd) == out.out_weight(nd)

    def test_eulerian_unchanged(self):
        D = WeightedDigraph(
            nodes=("r", "u"), arcs={("r", "u"): 3, ("u", "r"): 3}
        )
        out = eulerianize(D, "r")
        assert out.arcs == D.arcs

    def test_hypothesis_violation_reported(self):
        D = WeightedDigraph(
            nodes=("r", "u", "v"), arcs={("r", "u"): 1, ("u", "v"): 3}
        )
        with pytest.raises(PackingError, match="'u'"):
            eulerianize(D, "r")


class TestMaxSplittable:
    def test_triangle_preserving_connectivity(self):
        D = WeightedDigraph(
            nodes=("r", "u", "v"),
            arcs={("r", "u"): 1, ("u", "v"): 1, ("v", "r"): 1},
        )
        x = max_splittable(D, ("r", "u"), ("u", "v"), {("r", "v"): 1})
        assert x == 1

    def test_empty_protection_takes_all(self):
        D = WeightedDigraph(
            nodes=("r", "u", "v"),
            arcs={("r", "u"): 2, ("u", "v"): 3, ("v", "r"): 2},
        )
        assert max_splittable(D, ("r", "u"), ("u", "v"), {}) == 2

    def test_zero_weight_arc_rejected(self):
        D = WeightedDigraph(
            nodes=("r", "u", "v"), arcs={("r", "u"): 1, ("v", "r"): 1}
        )
        with pytest.raises(ValueError):
            max_splittable(D, ("r", "u"), ("u", "v"), {})

    def test_mismatched_middle_rejected(self):
        D = WeightedDigraph(
            nodes=("r", "u", "v"),
            arcs={("r", "u"): 1, ("v", "r"): 1},
        )
        with pytest.raises(ValueError, match="middle"):
            max_splittable(D, ("r", "u"), ("v", "r"), {})


class TestPackArborescences:
    def test_single_arc(self):
        D = WeightedDigraph(nodes=("r", "u"), arcs={("r", "u"): 2})
        fam = pack_arborescences(D, "r", 2)
        assert verify_packing(D, "r", 2, fam).ok
        assert fam.coverage("u") == 2

    def test_two_path_example(self):
        D = WeightedDigraph(
            nodes=("r", "u", "v"),
            arcs={("r", "u"): 1, ("u", "v"): 1, ("r", "v"): 1},
        )
        fam = pack_arborescences(D, "r", 2)
        assert verify_packing(D, "r", 2, fam).ok
        assert fam.coverage("u") >= 1  # min(2, lambda=1)
        assert fam.coverage("v") == 2  # min(2, lambda=2)

    def test_k_zero(self):
        D = WeightedDigraph(nodes=("r", "u"), arcs={("r", "u"): 2})
        fam = pack_arborescences(D, "r", 0)
        assert fam.members == ()
        assert verify_packing(D, "r", 0, fam).ok


class TestVerifyPacking:
    def test_round_trip_passes(self):
        rng = random.Random(17)
        for _ in range(10):
            D, r = random_digraph(rng)
            K = rng.randint(0, 5)
            fam = pack_arborescences(D, r, K)
            report = verify_packing(D, r, K, fam)
            assert report.ok, report.failures

    def test_capacity_overuse_detected(self):
        D = WeightedDigraph(nodes=("r", "u"), arcs={("r", "u"): 1})
        bad = ArbFamily(
            members=((2, frozenset({("r", "u")})),), K=2, root="r"
        )
        report = verify_packing(D, "r", 2, bad)
        assert not report.ok
        assert any("capacity" in f for f in report.failures)

    def test_weight_total_mismatch_detected(self):
        D = WeightedDigraph(nodes=("r", "u"), arcs={("r", "u"): 2})
        bad = ArbFamily(
            members=((1, frozenset({("r", "u")})),), K=2, root="r"
        )
        report = verify_packing(D, "r", 2, bad)
        assert not report.ok
        assert any("weight total" in f for f in report.failures)


class TestProperties:
    def test_random_packings_satisfy_all_guarantees(self):
        rng = random.Random(99)
        for _ in range(40):
            D, r = random_digraph(rng)
            K = rng.randint(0, 5)
            fam = pack_arborescences(D, r, K)
            report = verify_packing(D, r, K, fam)
            assert report.ok, report.failures
            # coverage guarantee restated independently
            for u in D.nodes:
                if u == r:
                    continue
                assert fam.coverage(u) >= min(K, connectivity(D, r, u))
