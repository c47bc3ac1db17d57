"""Single-agent belief networks: coherence energy, its gradient, and update rules.

An agent's belief system is a complete graph over a handful of concepts.
Each edge carries a signed weight in [-1, 1]: the sign is the belief's
polarity, the magnitude its strength. Coherence is measured by a triangle
energy; the lower the energy, the more internally consistent the system.
"""

import enum
import math
from dataclasses import dataclass
from functools import lru_cache


@lru_cache(maxsize=None)
def canonical_edges(concept_count):
    """Edge list of the complete concept graph, in canonical (lexicographic) order."""
    return tuple(
        (a, b)
        for a in range(concept_count)
        for b in range(a + 1, concept_count)
    )


@lru_cache(maxsize=None)
def triad_partner_indices(concept_count):
    """For each edge, the index pairs of the two companion edges in every triangle.

    Entry e is a tuple of (i, j) pairs, one per triangle through edge e,
    where i and j index canonical_edges(concept_count). Used by the energy
    gradient and by the simulation hot loop, so it is cached per size.
    """
    edges = canonical_edges(concept_count)
    index = {pair: i for i, pair in enumerate(edges)}
    partners = []
    for a, b in edges:
        pairs = []
        for c in range(concept_count):
            if c == a or c == b:
                continue
            i = index[(min(a, c), max(a, c))]
            j = index[(min(b, c), max(b, c))]
            pairs.append((i, j))
        partners.append(tuple(pairs))
    return tuple(partners)


def triad_count(concept_count):
    return concept_count * (concept_count - 1) * (concept_count - 2) // 6


def concept_count_for_edges(edge_count):
    """Invert edge_count = n(n-1)/2; rejects counts that fit no complete graph."""
    n = round((1 + math.isqrt(1 + 8 * edge_count)) / 2)
    if n * (n - 1) // 2 != edge_count or n < 3:
        raise ValueError(f"{edge_count} edges do not form a complete graph over >= 3 concepts")
    return n


def clip_weight(w):
    """Project a weight back into [-1, 1]."""
    return 1.0 if w > 1.0 else (-1.0 if w < -1.0 else w)


class TriadStability(enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"


@dataclass(frozen=True)
class ModelParams:
    """Update-rule parameters: social-influence strength, coherence drive, noise scale.

    sigma is the standard deviation of the Gaussian perturbation; sigma = 0
    selects the deterministic rule.
    """

    alpha: float
    beta: float
    sigma: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "beta", "sigma"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and non-negative, got {v!r}")


class BeliefNetwork:
    """Immutable complete graph of concepts with signed edge weights in [-1, 1].

    Weights are stored in canonical edge order; updates go through
    apply_update, which returns a new network.
    """

    __slots__ = ("concept_count", "weights")

    def __init__(self, weights, concept_count=None):
        if isinstance(weights, dict):
            pairs = {(min(a, b), max(a, b)): float(w) for (a, b), w in weights.items()}
            if concept_count is None:
                concept_count = 1 + max(max(p) for p in pairs)
            edges = canonical_edges(concept_count)
            missing = [p for p in edges if p not in pairs]
            if missing or len(pairs) != len(edges):
                raise ValueError(f"weights must cover every concept pair exactly once (missing {missing})")
            weights = tuple(pairs[p] for p in edges)
        else:
            weights = tuple(float(w) for w in weights)
            if concept_count is None:
                concept_count = concept_count_for_edges(len(weights))
        if concept_count < 3:
            raise ValueError(f"belief network needs at least 3 concepts, got {concept_count}")
        if len(weights) != len(canonical_edges(concept_count)):
            raise ValueError(
                f"expected {len(canonical_edges(concept_count))} weights for "
                f"{concept_count} concepts, got {len(weights)}"
            )
        for w in weights:
            if not (math.isfinite(w) and -1.0 <= w <= 1.0):
                raise ValueError(f"belief weight out of [-1, 1]: {w!r}")
        object.__setattr__(self, "concept_count", concept_count)
        object.__setattr__(self, "weights", weights)

    def __setattr__(self, name, value):
        raise AttributeError("BeliefNetwork is immutable; use apply_update")

    def __getstate__(self):
        return self.concept_count, self.weights

    def __setstate__(self, state):
        object.__setattr__(self, "concept_count", state[0])
        object.__setattr__(self, "weights", state[1])

    def __eq__(self, other):
        return (
            isinstance(other, BeliefNetwork)
            and self.concept_count == other.concept_count
            and self.weights == other.weights
        )

    def __hash__(self):
        return hash((self.concept_count, self.weights))

    def __repr__(self):
        inner = ",".join(f"{w:g}" for w in self.weights)
        return f"BeliefNetwork({{{inner}}})"

    @property
    def edges(self):
        return canonical_edges(self.concept_count)

    def edge_index(self, edge):
        """Canonical index of a concept pair; raises on unknown pairs."""
        a, b = edge
        pair = (min(a, b), max(a, b))
        try:
            return canonical_edges(self.concept_count).index(pair)
        except ValueError:
            raise ValueError(f"no belief edge {edge!r} in a {self.concept_count}-concept network") from None

    def weight(self, edge):
        return self.weights[self.edge_index(edge)]

    def internal_energy(self):
        """Triangle-averaged coherence energy, in [-1, 1].

        Each triangle contributes minus the product of its three weights;
        balanced (positive-product) triangles lower the energy.
        """
        n = self.concept_count
        w = self.weights
        total = 0.0
        for e, partner_list in enumerate(triad_partner_indices(n)):
            for i, j in partner_list:
                if i > e or j > e:
                    continue  # count each triangle once, at its largest edge index
                total += w[e] * w[i] * w[j]
        return -total / triad_count(n)

    def energy_gradient(self, edge):
        """Derivative of internal_energy with respect to one edge weight.

        The energy is affine in every single weight, so this is exact:
        minus the triangle-averaged product of the two companion weights.
        """
        e = self.edge_index(edge)
        w = self.weights
        total = 0.0
        for i, j in triad_partner_indices(self.concept_count)[e]:
            total += w[i] * w[j]
        return -total / triad_count(self.concept_count)

    def apply_update(self, edge, delta):
        """Return a new network with one weight shifted by delta and clipped to [-1, 1]."""
        e = self.edge_index(edge)
        w = list(self.weights)
        w[e] = clip_weight(w[e] + delta)
        return BeliefNetwork(tuple(w), self.concept_count)

    def classify_triads(self):
        """Stability label per triangle, in canonical triangle order.

        A triangle is stable when the product of its three weights is
        positive. A zero product is labeled unstable (its energy
        contribution is zero, not a minimum); callers that care should
        avoid zero weights.
        """
        n = self.concept_count
        w = self.weights
        index = {pair: i for i, pair in enumerate(canonical_edges(n))}
        labels = []
        for a in range(n):
            for b in range(a + 1, n):
                for c in range(b + 1, n):
                    prod = w[index[(a, b)]] * w[index[(a, c)]] * w[index[(b, c)]]
                    labels.append(TriadStability.STABLE if prod > 0 else TriadStability.UNSTABLE)
        return labels

    def sign_pattern(self):
        """Signs (+1, -1, 0) of each weight, in canonical edge order."""
        return tuple((w > 0) - (w < 0) for w in self.weights)


def increment(sender_belief, network, edge, params, rng=None):
    """Belief change the receiver applies after hearing sender_belief on edge.

    The mean pulls toward the sender (alpha term) and down the receiver's
    own energy gradient (beta term). With sigma = 0 the mean is returned
    exactly and rng is untouched; otherwise one Gaussian draw is taken.
    """
    if not -1.0 <= sender_belief <= 1.0:
        raise ValueError(f"sender belief out of [-1, 1]: {sender_belief!r}")
    mean = params.alpha * sender_belief - params.beta * network.energy_gradient(edge)
    if params.sigma == 0.0:
        return mean
    if rng is None:
        raise ValueError("a random source is required when sigma > 0")
    return rng.gauss(mean, params.sigma)


def sign_of(values):
    """Sign tuple of an arbitrary weight vector (helper for target patterns)."""
    return tuple((v > 0) - (v < 0) for v in values)
