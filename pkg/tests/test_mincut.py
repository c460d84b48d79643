import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from subjcut.classifiers import IndividualScores
from subjcut.mincut import (
    AssociationScores,
    CutResult,
    brute_force_min,
    build_network,
    min_cut,
    partition_cost,
    scale_instance,
)

# the three-item worked example: strong pull between items 0 and 1
EXAMPLE_IND = IndividualScores(
    class1=np.array([0.8, 0.5, 0.1]), class2=np.array([0.2, 0.5, 0.9])
)
EXAMPLE_ASSOC = AssociationScores(pairs={(0, 1): 1.0, (0, 2): 0.1, (1, 2): 0.2})
EXAMPLE_TABLE = {
    (0, 1): 1.1,
    (): 1.4,
    (0, 1, 2): 1.6,
    (0,): 1.9,
    (2,): 2.5,
    (1,): 2.6,
    (0, 2): 2.8,
    (1, 2): 3.3,
}


def random_instance(rng, n_max=12, assoc_density=0.4):
    n = int(rng.integers(1, n_max + 1))
    ind = IndividualScores(class1=rng.uniform(0, 1, n), class2=rng.uniform(0, 1, n))
    pairs = {}
    for i in range(n):
        for k in range(i + 1, n):
            if rng.random() < assoc_density:
                pairs[(i, k)] = float(rng.uniform(0, 1))
    return ind, AssociationScores(pairs=pairs)


class TestPartitionCost:
    @pytest.mark.parametrize("side,expected", sorted(EXAMPLE_TABLE.items()))
    def test_worked_example_table(self, side, expected):
        assert partition_cost(EXAMPLE_IND, EXAMPLE_ASSOC, side) == pytest.approx(
            expected, abs=1e-12
        )

    def test_empty_instance(self):
        ind = IndividualScores(class1=np.array([]), class2=np.array([]))
        assert partition_cost(ind, AssociationScores(pairs={}), ()) == 0.0


class TestAssociationScores:
    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            AssociationScores(pairs={(0, 1): -0.5})

    def test_rejects_bad_ordering(self):
        with pytest.raises(ValueError):
            AssociationScores(pairs={(1, 0): 0.5})

    def test_symmetric_lookup(self):
        a = AssociationScores(pairs={(0, 2): 0.3})
        assert a.get(0, 2) == a.get(2, 0) == 0.3
        assert a.get(0, 1) == 0.0


class TestBuildNetwork:
    def test_worked_example_structure(self):
        net = build_network(EXAMPLE_IND, EXAMPLE_ASSOC)
        # 3 source arcs + 3 sink arcs + 3 association edges
        assert net.n == 3
        assert net.arc_count == 9

    def test_minimal_graph(self):
        ind = IndividualScores(class1=np.array([0.7]), class2=np.array([0.3]))
        net = build_network(ind, AssociationScores(pairs={}))
        assert net.arc_count == 2

    def test_zero_associations_omitted(self):
        ind = IndividualScores(class1=np.array([0.7, 0.2]), class2=np.array([0.3, 0.8]))
        net = build_network(ind, AssociationScores(pairs={(0, 1): 0.0}))
        assert net.arc_count == 4

    def test_negative_scores_rejected(self):
        with pytest.raises(ValueError):
            IndividualScores(class1=np.array([-0.1]), class2=np.array([0.3]))

    def test_out_of_range_pair_rejected(self):
        ind = IndividualScores(class1=np.array([0.7]), class2=np.array([0.3]))
        with pytest.raises(ValueError):
            build_network(ind, AssociationScores(pairs={(0, 5): 0.2}))

    def test_capacities_are_scaled_integers(self):
        net = build_network(EXAMPLE_IND, EXAMPLE_ASSOC, scale_factor=10)
        caps = sorted(cap for _, _, cap in net.arcs())
        assert caps == [1, 1, 2, 2, 5, 5, 8, 9, 10]

    def test_dump_format(self):
        ind = IndividualScores(class1=np.array([0.75]), class2=np.array([0.25]))
        net = build_network(ind, AssociationScores(pairs={}), scale_factor=100)
        buf = io.StringIO()
        net.dump(buf)
        assert buf.getvalue() == "s 0 75\n0 t 25\n"


class TestMinCut:
    def test_worked_example(self):
        result = min_cut(build_network(EXAMPLE_IND, EXAMPLE_ASSOC))
        assert result.source_side == (0, 1)
        assert result.cost == pytest.approx(1.1, abs=1e-12)
        assert result.max_flow_value == 1_100_000

    def test_zero_association_reduces_to_argmax(self):
        ind = IndividualScores(
            class1=np.array([0.9, 0.2, 0.6, 0.5]), class2=np.array([0.1, 0.8, 0.4, 0.5])
        )
        result = min_cut(build_network(ind, AssociationScores(pairs={})))
        # item 3 is tied and resolves to the sink side
        assert result.source_side == (0, 2)

    def test_all_items_source_when_class1_dominates(self):
        ind = IndividualScores(class1=np.array([0.9, 0.8]), class2=np.array([0.1, 0.2]))
        result = min_cut(build_network(ind, AssociationScores(pairs={})))
        assert result.source_side == (0, 1)

    def test_agrees_with_brute_force_on_random_instances(self):
        rng = np.random.default_rng(7)
        for _ in range(60):
            ind, assoc = random_instance(rng)
            got = min_cut(build_network(ind, assoc))
            want = brute_force_min(*scale_instance(ind, assoc))
            assert got.max_flow_value == int(want.cost)

    def test_flow_value_tracks_cost_within_rounding(self):
        rng = np.random.default_rng(8)
        for _ in range(40):
            ind, assoc = random_instance(rng)
            net = build_network(ind, assoc)
            result = min_cut(net)
            assert abs(result.cost * net.scale_factor - result.max_flow_value) <= len(ind)

    def test_cost_matches_recomputed_partition_cost(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            ind, assoc = random_instance(rng)
            result = min_cut(build_network(ind, assoc))
            recomputed = partition_cost(ind, assoc, result.source_side)
            assert result.cost == pytest.approx(recomputed, abs=1e-6)

    def test_no_partition_beats_the_cut(self):
        rng = np.random.default_rng(10)
        ind, assoc = random_instance(rng, n_max=10)
        best = min_cut(build_network(ind, assoc)).cost
        for _ in range(200):
            n = len(ind)
            side = [i for i in range(n) if rng.random() < 0.5]
            assert partition_cost(ind, assoc, side) >= best - 1e-6

    def test_same_side_edge_does_not_change_cost(self):
        rng = np.random.default_rng(11)
        for _ in range(30):
            ind, assoc = random_instance(rng, n_max=8)
            result = min_cut(build_network(ind, assoc))
            side = set(result.source_side)
            same = [
                (i, k)
                for i in range(len(ind))
                for k in range(i + 1, len(ind))
                if (i in side) == (k in side) and (i, k) not in assoc.pairs
            ]
            if not same:
                continue
            pair = same[0]
            bigger = AssociationScores(pairs={**dict(assoc.pairs), pair: 0.7})
            again = min_cut(build_network(ind, bigger))
            assert again.cost == pytest.approx(result.cost, abs=1e-9)

    def test_positive_scaling_preserves_argmin(self):
        rng = np.random.default_rng(12)
        for factor in (0.5, 2.0, 3.7):
            for _ in range(15):
                ind, assoc = random_instance(rng, n_max=8)
                base = min_cut(build_network(ind, assoc))
                scaled_ind = IndividualScores(
                    class1=ind.class1 * factor, class2=ind.class2 * factor
                )
                scaled_assoc = AssociationScores(
                    pairs={k: v * factor for k, v in assoc.pairs.items()}
                )
                scaled = min_cut(build_network(scaled_ind, scaled_assoc))
                assert scaled.source_side == base.source_side
                assert scaled.cost == pytest.approx(base.cost * factor, rel=1e-9)

    def test_repeated_solves_are_stable(self):
        net = build_network(EXAMPLE_IND, EXAMPLE_ASSOC)
        assert min_cut(net) == min_cut(net)

    @settings(max_examples=60, deadline=None)
    @given(
        st.integers(1, 6).flatmap(
            lambda n: st.tuples(
                st.lists(st.floats(0, 1, allow_nan=False), min_size=n, max_size=n),
                st.lists(st.floats(0, 1, allow_nan=False), min_size=n, max_size=n),
                st.dictionaries(
                    st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(
                        lambda p: p[0] < p[1]
                    ),
                    st.floats(0, 1, allow_nan=False),
                    max_size=6,
                ),
            )
        )
    )
    def test_matches_brute_force_for_arbitrary_weights(self, instance):
        c1, c2, pairs = instance
        ind = IndividualScores(class1=np.array(c1), class2=np.array(c2))
        assoc = AssociationScores(pairs=pairs)
        got = min_cut(build_network(ind, assoc))
        want = brute_force_min(*scale_instance(ind, assoc))
        assert got.max_flow_value == int(want.cost)


class TestBruteForce:
    def test_worked_example(self):
        result = brute_force_min(EXAMPLE_IND, EXAMPLE_ASSOC)
        assert result.source_side == (0, 1)
        assert result.cost == pytest.approx(1.1, abs=1e-12)

    def test_empty_instance(self):
        ind = IndividualScores(class1=np.array([]), class2=np.array([]))
        assert brute_force_min(ind, AssociationScores(pairs={})) == CutResult(
            source_side=(), cost=0.0
        )

    def test_forced_optimum(self):
        ind = IndividualScores(class1=np.array([1.0, 0.0]), class2=np.array([0.0, 1.0]))
        result = brute_force_min(ind, AssociationScores(pairs={}))
        assert result.source_side == (0,)
        assert result.cost == 0.0

    def test_lexicographic_tie_break(self):
        # every partition costs 1.0; the empty side is lexicographically least
        ind = IndividualScores(class1=np.array([0.5, 0.5]), class2=np.array([0.5, 0.5]))
        result = brute_force_min(ind, AssociationScores(pairs={}))
        assert result.source_side == ()

    def test_refuses_large_instances(self):
        n = 21
        ind = IndividualScores(class1=np.ones(n), class2=np.zeros(n))
        with pytest.raises(ValueError):
            brute_force_min(ind, AssociationScores(pairs={}))
