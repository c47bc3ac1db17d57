"""Social network generators and agent populations.

Two topologies are shipped: the star (one hub, everyone else a leaf) and a
two-community network whose mixing parameter sets the fraction of edges
placed between the communities. Populations attach a belief network and a
zealot flag to every node; zealots broadcast but never update.
"""

import math
from dataclasses import dataclass

from .beliefs import BeliefNetwork


def round_half_up(x):
    return math.floor(x + 0.5)


class SocialGraph:
    """Undirected, unweighted simple graph with a fixed node count."""

    __slots__ = ("node_count", "edges", "adjacency")

    def __init__(self, node_count, edges):
        normalized = []
        seen = set()
        for a, b in edges:
            if a == b:
                raise ValueError(f"self-loop at node {a}")
            if not (0 <= a < node_count and 0 <= b < node_count):
                raise ValueError(f"edge ({a}, {b}) outside 0..{node_count - 1}")
            pair = (a, b) if a < b else (b, a)
            if pair in seen:
                raise ValueError(f"duplicate edge {pair}")
            seen.add(pair)
            normalized.append(pair)
        adjacency = [[] for _ in range(node_count)]
        for a, b in normalized:
            adjacency[a].append(b)
            adjacency[b].append(a)
        object.__setattr__(self, "node_count", node_count)
        object.__setattr__(self, "edges", tuple(normalized))
        object.__setattr__(self, "adjacency", tuple(tuple(nb) for nb in adjacency))

    def __setattr__(self, name, value):
        raise AttributeError("SocialGraph is immutable")

    def __getstate__(self):
        return self.node_count, self.edges, self.adjacency

    def __setstate__(self, state):
        for name, value in zip(self.__slots__, state):
            object.__setattr__(self, name, value)

    @property
    def edge_count(self):
        return len(self.edges)

    def neighbors(self, node):
        return self.adjacency[node]

    def degree(self, node):
        return len(self.adjacency[node])

    def to_edge_list_text(self):
        """Plain 'u v' lines, 0-indexed, one edge per line."""
        return "".join(f"{a} {b}\n" for a, b in self.edges)

    @classmethod
    def from_edge_list_text(cls, text, node_count=None):
        edges = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            a, b = line.split()
            edges.append((int(a), int(b)))
        if node_count is None:
            node_count = 1 + max(max(e) for e in edges) if edges else 0
        return cls(node_count, edges)


@dataclass(frozen=True)
class CommunityLayout:
    """Community assignment and the edge-count split behind a mixed network."""

    omega: float
    total_edges: int
    community_of: tuple

    @property
    def intra_edges(self):
        return round_half_up((1.0 - self.omega) * self.total_edges)

    @property
    def inter_edges(self):
        return self.total_edges - self.intra_edges

    def members(self, community):
        return tuple(i for i, c in enumerate(self.community_of) if c == community)


def make_star(n):
    """Star graph: node 0 is the hub, nodes 1..n-1 are leaves."""
    if n < 2:
        raise ValueError(f"a star needs at least 2 nodes, got {n}")
    return SocialGraph(n, [(0, i) for i in range(1, n)])


def make_two_community(n, m, omega, rng):
    """Random two-community graph with a prescribed inter-community edge share.

    Nodes split into two near-equal communities. Of the m edges,
    round((1 - omega) * m) land inside communities (split evenly, remainder
    to community 0) and the rest bridge them. Edges are sampled uniformly
    without replacement among eligible pairs, so the graph is simple;
    connectivity is not enforced.
    """
    if n < 2:
        raise ValueError(f"need at least 2 nodes, got {n}")
    if not 0.0 <= omega <= 1.0:
        raise ValueError(f"omega must lie in [0, 1], got {omega}")
    half = n // 2
    community_of = tuple(0 if i < n - half else 1 for i in range(n))
    comm0 = [i for i in range(n) if community_of[i] == 0]
    comm1 = [i for i in range(n) if community_of[i] == 1]

    intra_total = round_half_up((1.0 - omega) * m)
    inter_total = m - intra_total
    intra0 = intra_total - intra_total // 2  # remainder goes to community 0
    intra1 = intra_total // 2

    def all_pairs(nodes):
        return [(nodes[i], nodes[j]) for i in range(len(nodes)) for j in range(i + 1, len(nodes))]

    pools = [
        ("community 0", all_pairs(comm0), intra0),
        ("community 1", all_pairs(comm1), intra1),
        ("inter-community", [(a, b) for a in comm0 for b in comm1], inter_total),
    ]
    edges = []
    for label, pool, count in pools:
        if count > len(pool):
            raise ValueError(
                f"{label} needs {count} edges but only {len(pool)} distinct pairs exist"
            )
        edges.extend(rng.sample(pool, count))
    graph = SocialGraph(n, edges)
    layout = CommunityLayout(omega=omega, total_edges=m, community_of=community_of)
    return graph, layout


class Population:
    """A social graph plus per-node belief networks and zealot flags."""

    __slots__ = ("graph", "beliefs", "zealot")

    def __init__(self, graph, beliefs, zealot):
        if len(beliefs) != graph.node_count or len(zealot) != graph.node_count:
            raise ValueError("beliefs and zealot flags must cover every node")
        object.__setattr__(self, "graph", graph)
        object.__setattr__(self, "beliefs", tuple(beliefs))
        object.__setattr__(self, "zealot", tuple(bool(z) for z in zealot))

    def __setattr__(self, name, value):
        raise AttributeError("Population is immutable; simulations return new ones")

    def __getstate__(self):
        return self.graph, self.beliefs, self.zealot

    def __setstate__(self, state):
        for name, value in zip(self.__slots__, state):
            object.__setattr__(self, name, value)

    @property
    def node_count(self):
        return self.graph.node_count


def seed_population(graph, assignments):
    """Build a Population from (node-set, belief weights, zealot flag) groups.

    The node sets must partition the graph's nodes exactly. Belief weights
    may be given as a BeliefNetwork or as a raw weight sequence; nodes in
    one group share the same (immutable) network instance.
    """
    beliefs = [None] * graph.node_count
    zealot = [None] * graph.node_count
    for nodes, weights, flag in assignments:
        network = weights if isinstance(weights, BeliefNetwork) else BeliefNetwork(weights)
        for node in nodes:
            if not 0 <= node < graph.node_count:
                raise ValueError(f"node {node} outside 0..{graph.node_count - 1}")
            if beliefs[node] is not None:
                raise ValueError(f"node {node} assigned twice")
            beliefs[node] = network
            zealot[node] = flag
    uncovered = [i for i, b in enumerate(beliefs) if b is None]
    if uncovered:
        raise ValueError(f"nodes without an assignment: {uncovered}")
    return Population(graph, beliefs, zealot)
