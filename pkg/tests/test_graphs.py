import random

import pytest

from beliefnet.beliefs import BeliefNetwork
from beliefnet.graphs import (
    CommunityLayout,
    SocialGraph,
    make_star,
    make_two_community,
    round_half_up,
    seed_population,
)


class TestSocialGraph:
    def test_rejects_self_loop(self):
        with pytest.raises(ValueError):
            SocialGraph(3, [(0, 0)])

    def test_rejects_duplicate_edge_either_orientation(self):
        with pytest.raises(ValueError):
            SocialGraph(3, [(0, 1), (1, 0)])

    def test_adjacency_consistent(self):
        g = SocialGraph(4, [(0, 1), (1, 2), (2, 3)])
        assert g.neighbors(1) == (0, 2)
        assert g.degree(0) == 1
        assert g.edge_count == 3

    def test_edge_list_round_trip(self):
        g = SocialGraph(5, [(0, 3), (2, 4), (1, 3)])
        text = g.to_edge_list_text()
        back = SocialGraph.from_edge_list_text(text, node_count=5)
        assert back.edges == g.edges
        assert text == "0 3\n2 4\n1 3\n"


class TestMakeStar:
    def test_headline_size(self):
        g = make_star(40)
        assert g.edge_count == 39
        assert g.degree(0) == 39

    def test_minimal(self):
        assert make_star(2).edges == ((0, 1),)

    def test_degree_sequence(self):
        g = make_star(5)
        assert [g.degree(i) for i in range(5)] == [4, 1, 1, 1, 1]

    def test_too_small(self):
        with pytest.raises(ValueError):
            make_star(1)

    def test_deterministic_without_rng(self):
        assert make_star(7).edges == make_star(7).edges


def _split_counts(graph, layout):
    intra = inter = 0
    for a, b in graph.edges:
        if layout.community_of[a] == layout.community_of[b]:
            intra += 1
        else:
            inter += 1
    return intra, inter


class TestMakeTwoCommunity:
    def test_fully_separated(self):
        g, layout = make_two_community(100, 1500, 0.0, random.Random(1))
        assert _split_counts(g, layout) == (1500, 0)

    def test_fully_bridged(self):
        g, layout = make_two_community(100, 1500, 1.0, random.Random(2))
        assert _split_counts(g, layout) == (0, 1500)

    def test_mixed_split_arithmetic(self):
        # round((1 - 0.4) * 1500) = 900 intra, 600 inter
        g, layout = make_two_community(100, 1500, 0.4, random.Random(3))
        assert _split_counts(g, layout) == (900, 600)
        assert layout.intra_edges == 900
        assert layout.inter_edges == 600

    def test_equal_halves(self):
        _, layout = make_two_community(101, 50, 0.5, random.Random(4))
        sizes = [len(layout.members(0)), len(layout.members(1))]
        assert sorted(sizes) == [50, 51]

    def test_exact_counts_over_many_seeds(self):
        for seed in range(100):
            omega = (seed % 11) / 10
            g, layout = make_two_community(30, 150, omega, random.Random(seed))
            intra, inter = _split_counts(g, layout)
            assert intra == round_half_up((1 - omega) * 150)
            assert intra + inter == 150
            assert len(set(g.edges)) == g.edge_count  # simple graph

    def test_capacity_error(self):
        # community 0 of 5 nodes holds at most 10 intra pairs
        with pytest.raises(ValueError):
            make_two_community(10, 60, 0.0, random.Random(0))

    def test_bad_omega(self):
        with pytest.raises(ValueError):
            make_two_community(10, 5, 1.5, random.Random(0))

    def test_reproducible_given_seed(self):
        a, _ = make_two_community(40, 200, 0.3, random.Random(99))
        b, _ = make_two_community(40, 200, 0.3, random.Random(99))
        assert a.edges == b.edges


class TestSeedPopulation:
    def test_star_scenario_layout(self):
        g = make_star(40)
        m = 10
        pop = seed_population(g, [
            ([0], (-1.0, 1.0, 1.0), False),
            (range(1, 1 + m), (1.0, 1.0, 1.0), True),
            (range(1 + m, 40), (-1.0, 1.0, 1.0), True),
        ])
        assert pop.beliefs[0].weights == (-1.0, 1.0, 1.0)
        assert not pop.zealot[0]
        assert pop.beliefs[5].weights == (1.0, 1.0, 1.0)
        assert all(pop.zealot[i] for i in range(1, 40))

    def test_round_trip_exact_weights(self):
        g = make_star(4)
        weights = (0.123456789, -0.5, 1.0)
        pop = seed_population(g, [(range(4), weights, False)])
        for i in range(4):
            assert pop.beliefs[i].weights == weights

    def test_accepts_prebuilt_network(self):
        g = make_star(3)
        b = BeliefNetwork((1.0, -1.0, 1.0))
        pop = seed_population(g, [(range(3), b, True)])
        assert pop.beliefs[2] is b

    def test_coverage_gap(self):
        with pytest.raises(ValueError, match="without an assignment"):
            seed_population(make_star(3), [([0, 1], (1, 1, 1), False)])

    def test_overlap(self):
        with pytest.raises(ValueError, match="assigned twice"):
            seed_population(make_star(3), [
                ([0, 1], (1, 1, 1), False),
                ([1, 2], (1, 1, 1), False),
            ])

    def test_unknown_node(self):
        with pytest.raises(ValueError):
            seed_population(make_star(3), [([0, 1, 2, 3], (1, 1, 1), False)])


class TestCommunityLayout:
    def test_counts_derive_from_omega(self):
        layout = CommunityLayout(omega=0.4, total_edges=1500, community_of=(0,) * 50 + (1,) * 50)
        assert layout.intra_edges == 900
        assert layout.inter_edges == 600

    def test_members(self):
        layout = CommunityLayout(omega=0.0, total_edges=0, community_of=(0, 1, 0, 1))
        assert layout.members(0) == (0, 2)
        assert layout.members(1) == (1, 3)
