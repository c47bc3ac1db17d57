"""Exact analysis of the deterministic hub dynamics on a star with zealots.

With zero noise and fixed leaves, the hub's belief vector walks a finite
state space: every reachable state is an exact rational vector, so the
whole process is a finite Markov chain. This module enumerates that chain,
builds its transition matrix symbolically in the two per-interaction
probabilities (receiving a given belief from a dissimilar or from a
similar neighbor), and evaluates stationary flip probabilities.
"""

import csv
import io
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .beliefs import (
    concept_count_for_edges,
    sign_of,
    triad_count,
    triad_partner_indices,
)

_ONE = Fraction(1)


def exact_state(values):
    """Belief vector as a tuple of Fractions, validated to [-1, 1].

    Accepts ints, Fractions, strings like "1/2", and floats. Floats convert
    exactly (they are binary rationals): 0.5 is fine, but 0.1 becomes its
    binary neighbor, so prefer strings or Fractions for non-dyadic values.
    """
    state = tuple(Fraction(v) for v in values)
    for v in state:
        if not -_ONE <= v <= _ONE:
            raise ValueError(f"belief component out of [-1, 1]: {v}")
    return state


def state_label(state):
    """Compact display form, e.g. {-1,1/2,1}."""
    return "{" + ",".join(str(v) for v in state) + "}"


def deterministic_transition(state, sender, edge, alpha, beta):
    """Apply one noiseless update exactly: receive sender[edge], clip to [-1, 1]."""
    cc = concept_count_for_edges(len(state))
    acc = Fraction(0)
    for i, j in triad_partner_indices(cc)[edge]:
        acc += state[i] * state[j]
    delta = Fraction(alpha) * sender[edge] + Fraction(beta) * acc / triad_count(cc)
    new = state[edge] + delta
    new = _ONE if new > _ONE else (-_ONE if new < -_ONE else new)
    return state[:edge] + (new,) + state[edge + 1:]


def enumerate_states(initial, sender_repertoires, alpha, beta, max_states=10_000):
    """Breadth-first closure of the initial state under every (sender, edge) update.

    Returns the reachable states in discovery order. Raises if the closure
    exceeds max_states, which signals parameters whose dynamics do not stay
    on a small lattice.
    """
    initial = exact_state(initial)
    repertoires = [exact_state(r) for r in sender_repertoires]
    edge_count = len(initial)
    seen = {initial}
    order = [initial]
    queue = deque([initial])
    while queue:
        state = queue.popleft()
        for sender in repertoires:
            for e in range(edge_count):
                nxt = deterministic_transition(state, sender, e, alpha, beta)
                if nxt not in seen:
                    if len(seen) >= max_states:
                        raise RuntimeError(
                            f"state space exceeded {max_states} states without closing; "
                            "check that alpha/beta keep updates on a finite lattice"
                        )
                    seen.add(nxt)
                    order.append(nxt)
                    queue.append(nxt)
    return order


@dataclass(frozen=True)
class TransitionMatrix:
    """Column-stochastic transition structure over an enumerated state set.

    coeffs[dest, src, 0] counts the (dissimilar sender, edge) pairs mapping
    src to dest, coeffs[dest, src, 1] the (similar sender, edge) pairs.
    Columns index the source state; with per-pair probabilities (u, v) the
    numeric matrix is coeffs[...,0]*u + coeffs[...,1]*v and every column
    sums to edge_count*(u+v) = 1.
    """

    states: tuple
    coeffs: np.ndarray

    @property
    def size(self):
        return len(self.states)

    @property
    def edge_count(self):
        return len(self.states[0])

    def index(self, state):
        state = exact_state(state)
        try:
            return self.states.index(state)
        except ValueError:
            raise ValueError(f"state {state_label(state)} is not in the enumerated set") from None

    def numeric(self, dissimilar_prob, similar_prob):
        """Float matrix at given per-(sender, edge) probabilities."""
        return self.coeffs[..., 0] * dissimilar_prob + self.coeffs[..., 1] * similar_prob

    def symbolic_table(self):
        """Text table of the u/v coefficients, one row per destination state."""

        def term(a, b):
            parts = []
            if a:
                parts.append("u" if a == 1 else f"{a}u")
            if b:
                parts.append("v" if b == 1 else f"{b}v")
            return "+".join(parts) if parts else "0"

        labels = [state_label(s) for s in self.states]
        width = max(len(x) for x in labels)
        cell = max(
            len(term(int(self.coeffs[i, j, 0]), int(self.coeffs[i, j, 1])))
            for i in range(self.size)
            for j in range(self.size)
        )
        lines = [" " * (width + 2) + "  ".join(x.rjust(max(cell, len(x))) for x in labels)]
        for i in range(self.size):
            cells = [
                term(int(self.coeffs[i, j, 0]), int(self.coeffs[i, j, 1])).rjust(max(cell, len(labels[j])))
                for j in range(self.size)
            ]
            lines.append(labels[i].ljust(width + 2) + "  ".join(cells))
        return "\n".join(lines) + "\n"

    def numeric_csv(self, dissimilar_prob, similar_prob):
        """CSV of the numeric matrix; first column holds destination labels."""
        numeric = self.numeric(dissimilar_prob, similar_prob)
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["state"] + [state_label(s) for s in self.states])
        for i, state in enumerate(self.states):
            writer.writerow([state_label(state)] + [f"{x:.6g}" for x in numeric[i]])
        return buffer.getvalue()


def build_transition_matrix(states, sender_repertoires, alpha, beta):
    """Accumulate per-(sender, edge) transition counts over a closed state set.

    sender_repertoires is (dissimilar, similar): updates driven by the first
    repertoire accumulate into the u slot, the second into the v slot.
    Raises if any update leaves the given state set (non-closure).
    """
    states = [exact_state(s) for s in states]
    repertoires = [exact_state(r) for r in sender_repertoires]
    if len(repertoires) != 2:
        raise ValueError("expected exactly two sender repertoires: (dissimilar, similar)")
    index = {s: i for i, s in enumerate(states)}
    n = len(states)
    edge_count = len(states[0])
    coeffs = np.zeros((n, n, 2), dtype=np.int64)
    for j, state in enumerate(states):
        for slot, sender in enumerate(repertoires):
            for e in range(edge_count):
                nxt = deterministic_transition(state, sender, e, alpha, beta)
                if nxt not in index:
                    raise ValueError(
                        f"update {state_label(state)} -> {state_label(nxt)} leaves the state set; "
                        "pass the closure from enumerate_states"
                    )
                coeffs[index[nxt], j, slot] += 1
    matrix = TransitionMatrix(states=tuple(states), coeffs=coeffs)
    expected = np.full((n, 2), edge_count, dtype=np.int64)
    if not np.array_equal(coeffs.sum(axis=0), expected):
        raise AssertionError("column coefficient sums must equal the edge count in each slot")
    return matrix


def stationary_from(matrix, dissimilar_prob, similar_prob, initial,
                    tol=1e-12, max_squarings=200):
    """Stationary distribution reached from an initial state.

    Computed by repeated squaring of the numeric matrix until successive
    iterates agree to tol in max-norm, then reading the initial state's
    column. This picks the correct limit even when the chain is reducible
    (e.g. with no dissimilar or no similar neighbors).
    """
    if dissimilar_prob < 0 or similar_prob < 0:
        raise ValueError("probabilities must be non-negative")
    total = matrix.edge_count * (dissimilar_prob + similar_prob)
    if abs(total - 1.0) > 1e-12:
        raise ValueError(
            f"per-pair probabilities must satisfy edge_count*(u+v) = 1, got {total!r}"
        )
    start = matrix.index(initial)
    P = matrix.numeric(dissimilar_prob, similar_prob)
    power = P
    for _ in range(max_squarings):
        squared = power @ power
        if np.max(np.abs(squared - power)) < tol:
            pi = squared[:, start]
            # squaring a periodic chain stabilizes on a non-stationary
            # power (e.g. P^(2^k) = I for a two-state swap), so verify
            # the limit actually is a fixed point
            if np.max(np.abs(P @ pi - pi)) >= 1e-10:
                raise RuntimeError(
                    "matrix powers did not converge to a stationary vector (periodic chain)"
                )
            return pi
        power = squared
    raise RuntimeError(f"matrix powers did not converge within {max_squarings} squarings")


def flip_probability(pi, states, target_states):
    """Total stationary mass on the target states."""
    index = {exact_state(s): i for i, s in enumerate(states)}
    total = 0.0
    for s in target_states:
        s = exact_state(s)
        if s not in index:
            raise ValueError(f"target state {state_label(s)} is not in the state set")
        total += pi[index[s]]
    return float(total)


def target_states_by_sign(states, pattern):
    """States whose sign pattern equals the given one (the adoption set)."""
    pattern = tuple(pattern)
    return [s for s in states if sign_of(s) == pattern]


def scenario_setup(scenario):
    """Initial hub state and (dissimilar, similar) zealot vectors per scenario.

    Scenario 1: unstable hub pulled toward the dissimilar stable system
    (stabilizing influence). Scenario 2: stable hub pushed toward a
    competing stable system (destabilizing influence). In both, the similar
    zealots share the hub's initial beliefs.
    """
    if scenario == 1:
        initial = exact_state((-1, 1, 1))
    elif scenario == 2:
        initial = exact_state((-1, -1, 1))
    else:
        raise ValueError(f"unknown scenario {scenario!r} (expected 1 or 2)")
    dissimilar = exact_state((1, 1, 1))
    return initial, dissimilar, initial


def analytical_curve(scenario, k, alpha=1.5, beta=1.0):
    """Exact flip probability for every dissimilar-neighbor count m = 0..k.

    For each m, the per-(sender, edge) probabilities are u = m/(E*k) and
    v = (k-m)/(E*k) with E belief edges. The adoption set is derived by
    sign: every reachable state whose signs match the dissimilar zealots.
    Returns a list of (m, probability) pairs.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    initial, dissimilar, similar = scenario_setup(scenario)
    states = enumerate_states(initial, [dissimilar, similar], alpha, beta)
    matrix = build_transition_matrix(states, [dissimilar, similar], alpha, beta)
    targets = target_states_by_sign(states, sign_of(dissimilar))
    edge_count = len(initial)
    curve = []
    for m in range(k + 1):
        u = m / (edge_count * k)
        v = (k - m) / (edge_count * k)
        pi = stationary_from(matrix, u, v, initial)
        curve.append((m, flip_probability(pi, states, targets)))
    return curve
