"""Asynchronous interaction dynamics over a population.

One event = one directed communication: a uniformly random sender picks one
of its belief edges uniformly, a uniformly random neighbor receives it, and
the receiver (unless it is a zealot) shifts its own weight on that edge.
Runs are strictly sequential; ensembles replicate runs with independently
derived seeds and may execute in parallel processes.
"""

import hashlib
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

from .beliefs import (
    BeliefNetwork,
    ModelParams,
    canonical_edges,
    clip_weight,
    triad_count,
    triad_partner_indices,
)
from .graphs import Population


def derive_seed(master, *path):
    """Stable 63-bit seed derived from a master seed and an index path.

    Hash-based so that replica/task streams are decorrelated and the result
    does not depend on worker scheduling, platform, or process count.
    """
    digest = hashlib.sha256(repr((master,) + path).encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


class InteractionEvent(NamedTuple):
    sender: int
    receiver: Optional[int]       # None when the sender had no neighbors
    edge: Optional[tuple]         # concept pair communicated
    delta: float                  # effective change applied (0 for zealots/no-ops)


@dataclass(frozen=True)
class SimulationConfig:
    """Run controls: parameters, event budget, stopping rule, seed.

    The run stops early once the adoption fraction moves by at most
    stationarity_tol between consecutive window boundaries; leave
    stationarity_tol = None to always exhaust the budget (metastable
    dynamics have long flat stretches that fool any such detector, so
    sweeps default to the full budget). The window also sets the averaging
    span for the reported stationary adoption. target is the sign pattern
    (one of -1/0/+1 per belief edge) that counts as adoption.
    snapshot_every = 0 disables periodic snapshots.
    """

    params: ModelParams
    max_steps: int
    target: tuple
    stationarity_window: int = 10_000
    stationarity_tol: Optional[float] = None
    seed: int = 0
    snapshot_every: int = 0
    record_node: Optional[int] = None

    def __post_init__(self):
        if self.max_steps < 0:
            raise ValueError("max_steps must be >= 0")
        if self.stationarity_window < 1:
            raise ValueError("stationarity_window must be >= 1")
        if self.stationarity_tol is not None and self.stationarity_tol < 0:
            raise ValueError("stationarity_tol must be >= 0")
        if not all(s in (-1, 0, 1) for s in self.target):
            raise ValueError("target must be a tuple of -1/0/+1 signs")


@dataclass
class Trajectory:
    """What a single run produced.

    snapshots holds (step, adoption_fraction, recorded_weights_or_None)
    rows at the configured cadence; stationary_adoption is the adoption
    fraction averaged over the last completed window (the quantity swept
    in the modularity experiments).
    """

    snapshots: list
    final: Population
    terminated_by: str            # "budget" or "stationarity"
    steps_run: int
    stationary_adoption: float


def adoption_fraction(pop, target):
    """Fraction of nodes (zealots included) whose sign pattern equals target."""
    target = tuple(target)
    edge_count = len(pop.beliefs[0].weights)
    if len(target) != edge_count:
        raise ValueError(f"target needs {edge_count} signs, got {len(target)}")
    hits = sum(1 for b in pop.beliefs if b.sign_pattern() == target)
    return hits / pop.node_count


def _interact(W, zealot, adjacency, rng, alpha, beta, sigma, partners, inv_triads, n, edge_count):
    """Execute one interaction event in place; returns (sender, receiver, edge, applied).

    receiver is -1 when the sender has no neighbors. Draw order is fixed
    (sender, edge, receiver, then the Gaussian only when the receiver
    actually updates), which pins down reproducibility.
    """
    rnd = rng.random
    s = int(rnd() * n)
    neighbors = adjacency[s]
    if not neighbors:
        return s, -1, -1, 0.0
    e = int(rnd() * edge_count)
    r = neighbors[int(rnd() * len(neighbors))]
    if zealot[r]:
        return s, r, e, 0.0
    w = W[r]
    acc = 0.0
    for i, j in partners[e]:
        acc += w[i] * w[j]
    mean = alpha * W[s][e] + beta * acc * inv_triads
    delta = rng.gauss(mean, sigma) if sigma > 0.0 else mean
    old = w[e]
    new = old + delta
    new = 1.0 if new > 1.0 else (-1.0 if new < -1.0 else new)
    w[e] = new
    return s, r, e, new - old


def _engine_arrays(pop):
    concept_count = pop.beliefs[0].concept_count
    if any(b.concept_count != concept_count for b in pop.beliefs):
        raise ValueError("all agents must share the same concept count")
    W = [list(b.weights) for b in pop.beliefs]
    return W, concept_count


def step(pop, params, rng):
    """Run a single interaction event and return (event, new population).

    Functional counterpart of the loop inside run(): the input population
    is untouched and a new one is returned (agents other than the receiver
    keep their identical belief instances).
    """
    if pop.graph.edge_count < 1:
        raise ValueError("the social graph has no edges")
    W, cc = _engine_arrays(pop)
    edges = canonical_edges(cc)
    s, r, e, applied = _interact(
        W, pop.zealot, pop.graph.adjacency, rng,
        params.alpha, params.beta, params.sigma,
        triad_partner_indices(cc), 1.0 / triad_count(cc),
        pop.node_count, len(edges),
    )
    if r < 0:
        return InteractionEvent(s, None, None, 0.0), pop
    if applied == 0.0:
        return InteractionEvent(s, r, edges[e], 0.0), pop
    beliefs = list(pop.beliefs)
    beliefs[r] = BeliefNetwork(tuple(W[r]), cc)
    return InteractionEvent(s, r, edges[e], applied), Population(pop.graph, beliefs, pop.zealot)


def run(pop, cfg):
    """Run the interaction dynamics until the budget or stationarity stops it.

    Fully reproducible from cfg.seed. Zealots are never modified; the final
    population reuses their original belief instances.
    """
    params = cfg.params
    W, cc = _engine_arrays(pop)
    edges = canonical_edges(cc)
    edge_count = len(edges)
    target = tuple(cfg.target)
    if len(target) != edge_count:
        raise ValueError(f"target needs {edge_count} signs, got {len(target)}")

    n = pop.node_count
    zealot = pop.zealot
    adjacency = pop.graph.adjacency
    partners = triad_partner_indices(cc)
    inv_triads = 1.0 / triad_count(cc)
    alpha, beta, sigma = params.alpha, params.beta, params.sigma
    rng = random.Random(cfg.seed)

    # adoption bookkeeping: per-node count of sign-matching edges
    match = [
        [((w > 0) - (w < 0)) == target[e] for e, w in enumerate(row)]
        for row in W
    ]
    match_count = [sum(row) for row in match]
    adopted = sum(1 for c in match_count if c == edge_count)

    window = cfg.stationarity_window
    snapshots = []
    record_node = cfg.record_node

    def snap(step_no):
        recorded = tuple(W[record_node]) if record_node is not None else None
        snapshots.append((step_no, adopted / n, recorded))

    if cfg.snapshot_every > 0:
        snap(0)

    prev_rho = adopted / n
    window_sum = 0
    last_window_avg = None
    terminated_by = "budget"
    steps_run = 0

    for t in range(1, cfg.max_steps + 1):
        s, r, e, applied = _interact(
            W, zealot, adjacency, rng, alpha, beta, sigma,
            partners, inv_triads, n, edge_count,
        )
        if applied != 0.0:
            w = W[r][e]
            now = ((w > 0) - (w < 0)) == target[e]
            if now != match[r][e]:
                match[r][e] = now
                before_full = match_count[r] == edge_count
                match_count[r] += 1 if now else -1
                after_full = match_count[r] == edge_count
                if after_full and not before_full:
                    adopted += 1
                elif before_full and not after_full:
                    adopted -= 1
        window_sum += adopted
        steps_run = t
        if cfg.snapshot_every > 0 and t % cfg.snapshot_every == 0:
            snap(t)
        if t % window == 0:
            last_window_avg = window_sum / (window * n)
            rho = adopted / n
            if cfg.stationarity_tol is not None and abs(rho - prev_rho) <= cfg.stationarity_tol:
                terminated_by = "stationarity"
                break
            prev_rho = rho
            window_sum = 0

    if cfg.snapshot_every > 0 and (not snapshots or snapshots[-1][0] != steps_run):
        snap(steps_run)

    if last_window_avg is None:
        last_window_avg = window_sum / (steps_run * n) if steps_run else adopted / n

    beliefs = [
        pop.beliefs[i] if zealot[i] else BeliefNetwork(tuple(W[i]), cc)
        for i in range(n)
    ]
    final = Population(pop.graph, beliefs, zealot)
    return Trajectory(
        snapshots=snapshots,
        final=final,
        terminated_by=terminated_by,
        steps_run=steps_run,
        stationary_adoption=last_window_avg,
    )


class FinalSignMatchMetric:
    """Metric: 1.0 when a node's final sign pattern equals the target, else 0.0.

    A class rather than a closure so it survives pickling into worker
    processes.
    """

    def __init__(self, target, node=0):
        self.target = tuple(target)
        self.node = node

    def __call__(self, trajectory):
        return 1.0 if trajectory.final.beliefs[self.node].sign_pattern() == self.target else 0.0


def stationary_adoption_metric(trajectory):
    return trajectory.stationary_adoption


@dataclass(frozen=True)
class EnsembleResult:
    values: tuple
    mean: float
    std: float                    # population standard deviation across replicas
    runs: int


def _replica(args):
    pop, cfg, index, metric = args
    trajectory = run(pop, replace(cfg, seed=derive_seed(cfg.seed, index)))
    return metric(trajectory)


def run_ensemble(pop, cfg, runs, metric=stationary_adoption_metric, workers=1):
    """Replicate a run `runs` times with derived seeds and summarize a metric.

    Replicas are independent; with workers > 1 they execute in separate
    processes. Results do not depend on the worker count.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    tasks = [(pop, cfg, i, metric) for i in range(runs)]
    if workers > 1 and runs > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = tuple(pool.map(_replica, tasks))
    else:
        values = tuple(_replica(t) for t in tasks)
    mean = sum(values) / runs
    variance = sum((v - mean) ** 2 for v in values) / runs
    return EnsembleResult(values=values, mean=mean, std=variance ** 0.5, runs=runs)


def trajectory_csv(trajectory, include_weights=False):
    """Render snapshots as CSV text: step, adoption_fraction[, w0, w1, ...]."""
    lines = []
    header = "step,adoption_fraction"
    if include_weights:
        width = len(trajectory.final.beliefs[0].weights)
        header += "," + ",".join(f"w{i}" for i in range(width))
    lines.append(header)
    for step_no, rho, weights in trajectory.snapshots:
        row = f"{step_no},{rho:.6g}"
        if include_weights:
            if weights is None:
                raise ValueError("snapshots carry no recorded weights; set record_node")
            row += "," + ",".join(f"{w:.6g}" for w in weights)
        lines.append(row)
    return "\n".join(lines) + "\n"
