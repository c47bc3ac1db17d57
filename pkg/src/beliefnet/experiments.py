"""The two shipped campaigns: star flip-probability curves and the
two-community modularity sweep.

Both campaigns are embarrassingly parallel; tasks carry their own derived
seeds, so the emitted tables are byte-identical for any worker count.
"""

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .beliefs import ModelParams, sign_of
from .dynamics import FinalSignMatchMetric, SimulationConfig, derive_seed, run
from .graphs import round_half_up, make_star, make_two_community, seed_population
from .markov import analytical_curve, scenario_setup

DEFAULT_SEED = 20250810

VARIANT_ZEALOT_SIMILAR = "zealot-similar"   # main panel: every leaf is a zealot
VARIANT_FREE_SIMILAR = "free-similar"       # inset: hub-like leaves may update

CROSS_SECTION_RHO0 = (0.03, 0.06, 0.09)


def _fmt(x):
    return f"{x:.6g}"


def scenario_beliefs(scenario):
    """Float belief vectors (hub/similar, dissimilar) for a star scenario."""
    initial, dissimilar, _ = scenario_setup(scenario)
    return tuple(float(x) for x in initial), tuple(float(x) for x in dissimilar)


def star_population(scenario, variant, n, m):
    """Star population for a flip experiment: hub plus m dissimilar leaves.

    Returns (population, target sign pattern). The hub always starts at the
    scenario's initial beliefs and is free; dissimilar leaves are zealots;
    the remaining leaves share the hub's beliefs and are zealots in the
    zealot-similar variant, free in the free-similar variant.
    """
    if not 0 <= m <= n - 1:
        raise ValueError(f"m must lie in 0..{n - 1}, got {m}")
    if variant not in (VARIANT_ZEALOT_SIMILAR, VARIANT_FREE_SIMILAR):
        raise ValueError(f"unknown variant {variant!r}")
    hub_w, dis_w = scenario_beliefs(scenario)
    graph = make_star(n)
    similar_zealot = variant == VARIANT_ZEALOT_SIMILAR
    assignments = [
        ([0], hub_w, False),
        (range(1, 1 + m), dis_w, True),
        (range(1 + m, n), hub_w, similar_zealot),
    ]
    return seed_population(graph, assignments), sign_of(dis_w)


@dataclass(frozen=True)
class Fig2Config:
    """Flip-curve campaign parameters (defaults are the headline star setup)."""

    n: int = 40
    sigma: float = 0.2
    alpha: float = 1.5
    beta: float = 1.0
    runs_per_point: int = 50
    repeats: int = 10
    variant: str = VARIANT_ZEALOT_SIMILAR
    scenario: int = 1
    max_steps: int = 10_000
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if self.scenario not in (1, 2):
            raise ValueError("scenario must be 1 or 2")
        if self.variant not in (VARIANT_ZEALOT_SIMILAR, VARIANT_FREE_SIMILAR):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.runs_per_point < 1 or self.repeats < 1:
            raise ValueError("runs_per_point and repeats must be >= 1")


@dataclass(frozen=True)
class Fig2Row:
    m: int
    mean_flip: float
    std_flip: float
    analytical: float = None


def _flip_block(args):
    """One (m, repeat) block: the flipped proportion over runs_per_point runs."""
    cfg, m, repeat = args
    pop, target = star_population(cfg.scenario, cfg.variant, cfg.n, m)
    params = ModelParams(cfg.alpha, cfg.beta, cfg.sigma)
    metric = FinalSignMatchMetric(target, node=0)
    flips = 0.0
    for run_index in range(cfg.runs_per_point):
        seed = derive_seed(cfg.seed, "flip", cfg.scenario, cfg.variant, m, repeat, run_index)
        sim = SimulationConfig(
            params=params,
            max_steps=cfg.max_steps,
            target=target,
            stationarity_window=cfg.max_steps + 1,
            seed=seed,
        )
        flips += metric(run(pop, sim))
    return flips / cfg.runs_per_point


def _map_tasks(fn, tasks, workers):
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, tasks, chunksize=1))
    return [fn(t) for t in tasks]


def flip_curve(cfg, workers=1):
    """Flip proportion vs dissimilar-neighbor count, with the exact curve attached.

    For each m = 0..n-1 the stochastic run is repeated `repeats` times in
    blocks of runs_per_point; the row carries the mean and the sample
    standard deviation of the block proportions. The analytical column is
    filled from the deterministic chain for the zealot-similar variant
    (the exact analysis assumes fixed leaves) and left None otherwise.
    """
    ms = list(range(cfg.n))
    tasks = [(cfg, m, rep) for m in ms for rep in range(cfg.repeats)]
    fractions = _map_tasks(_flip_block, tasks, workers)
    exact = None
    if cfg.variant == VARIANT_ZEALOT_SIMILAR:
        exact = dict(analytical_curve(cfg.scenario, cfg.n - 1, cfg.alpha, cfg.beta))
    rows = []
    for i, m in enumerate(ms):
        block = fractions[i * cfg.repeats:(i + 1) * cfg.repeats]
        mean = sum(block) / len(block)
        if len(block) > 1:
            std = math.sqrt(sum((b - mean) ** 2 for b in block) / (len(block) - 1))
        else:
            std = 0.0
        rows.append(Fig2Row(m=m, mean_flip=mean, std_flip=std,
                            analytical=None if exact is None else exact[m]))
    return rows


def write_fig2_csv(rows, cfg, path):
    """fig2.csv: scenario, variant, m, mean_flip, std_flip, analytical."""
    with open(path, "w", newline="") as fh:
        fh.write("scenario,variant,m,mean_flip,std_flip,analytical\n")
        for row in rows:
            analytical = "" if row.analytical is None else _fmt(row.analytical)
            fh.write(
                f"{cfg.scenario},{cfg.variant},{row.m},"
                f"{_fmt(row.mean_flip)},{_fmt(row.std_flip)},{analytical}\n"
            )


def _default_rho0_grid():
    return tuple(round(0.01 * i, 2) for i in range(1, 16))


def _default_omega_grid():
    return tuple(round(0.05 * i, 2) for i in range(1, 20))


@dataclass(frozen=True)
class Fig4Config:
    """Modularity-sweep parameters (defaults are the headline two-community setup).

    Every run exhausts a budget of 5000 events per node and reports the
    adoption fraction averaged over the final 50-events-per-node window.
    The cascades here pass through long metastable plateaus before igniting,
    so plateau detectors misfire; stationarity_tol stays None (full budget)
    unless a caller explicitly opts in to early stopping.
    """

    n: int = 100
    m_edges: int = 1500
    sigma: float = 0.2
    alpha: float = 2.0
    beta: float = 1.0
    ensembles: int = 40
    rho0_grid: tuple = field(default_factory=_default_rho0_grid)
    omega_grid: tuple = field(default_factory=_default_omega_grid)
    stationarity_tol: float = None
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        object.__setattr__(self, "rho0_grid", tuple(self.rho0_grid))
        object.__setattr__(self, "omega_grid", tuple(self.omega_grid))
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if self.ensembles < 1:
            raise ValueError("ensembles must be >= 1")
        community0 = self.n - self.n // 2
        for rho0 in self.rho0_grid:
            if round_half_up(rho0 * self.n) > community0:
                raise ValueError(
                    f"rho0 = {rho0} needs more zealots than community 0 holds ({community0})"
                )

    @property
    def stationarity_window(self):
        return 50 * self.n

    @property
    def max_steps(self):
        return 5000 * self.n


@dataclass(frozen=True)
class PhasePoint:
    rho0: float
    omega: float
    rho_inf_mean: float
    rho_inf_stderr: float
    phase: str


@dataclass(frozen=True)
class PhaseThresholds:
    """Cutoffs for labeling a sweep point; overridable artifact conventions."""

    global_min: float = 0.9
    local_low: float = 0.35
    local_high: float = 0.65
    none_margin: float = 0.05


def classify_phase(rho0, rho_inf, thresholds=PhaseThresholds()):
    """Label an outcome as none/local/global diffusion.

    Exact bands first (global wins over local over none when they overlap);
    values falling between bands map to the nearest band, ties to the
    lower phase.
    """
    if not (0.0 <= rho0 <= 1.0 and 0.0 <= rho_inf <= 1.0):
        raise ValueError("rho0 and rho_inf must lie in [0, 1]")
    t = thresholds
    if rho_inf >= t.global_min:
        return "global"
    if t.local_low <= rho_inf <= t.local_high:
        return "local"
    if rho_inf <= rho0 + t.none_margin:
        return "none"
    gaps = (
        ("none", rho_inf - (rho0 + t.none_margin)),
        ("local", max(t.local_low - rho_inf, rho_inf - t.local_high)),
        ("global", t.global_min - rho_inf),
    )
    best = None
    for phase, dist in gaps:
        if dist < 0:
            continue
        if best is None or dist < best[1]:
            best = (phase, dist)
    return best[0]


def two_community_population(cfg, rho0, omega, rng):
    """One sweep replica's graph and initial beliefs.

    round(rho0 * n) zealots with the incoming stable system are placed
    uniformly at random inside community 0; everyone else starts on the
    competing stable system and is free.
    """
    graph, layout = make_two_community(cfg.n, cfg.m_edges, omega, rng)
    zealot_count = round_half_up(rho0 * cfg.n)
    community0 = list(layout.members(0))
    zealots = set(rng.sample(community0, zealot_count))
    others = [i for i in range(cfg.n) if i not in zealots]
    pop = seed_population(graph, [
        (sorted(zealots), (1.0, 1.0, 1.0), True),
        (others, (1.0, -1.0, -1.0), False),
    ])
    return pop, sign_of((1, 1, 1))


def _sweep_task(args):
    """One (rho0, omega, replica): adoption fraction at stationarity."""
    cfg, rho0, omega, replica = args
    rng = random.Random(derive_seed(cfg.seed, "sweep-graph", rho0, omega, replica))
    pop, target = two_community_population(cfg, rho0, omega, rng)
    sim = SimulationConfig(
        params=ModelParams(cfg.alpha, cfg.beta, cfg.sigma),
        max_steps=cfg.max_steps,
        target=target,
        stationarity_window=cfg.stationarity_window,
        stationarity_tol=cfg.stationarity_tol,
        seed=derive_seed(cfg.seed, "sweep-run", rho0, omega, replica),
    )
    return run(pop, sim).stationary_adoption


def modularity_sweep(cfg, workers=1):
    """Mean stationary adoption over the (rho0, omega) grid, with phases.

    Every grid point runs cfg.ensembles independent replicas, each with its
    own random graph, zealot placement, and interaction sequence. The
    standard error is the sample deviation across replicas over sqrt(count).
    """
    grid = [(rho0, omega) for rho0 in cfg.rho0_grid for omega in cfg.omega_grid]
    tasks = [(cfg, rho0, omega, e) for rho0, omega in grid for e in range(cfg.ensembles)]
    values = _map_tasks(_sweep_task, tasks, workers)
    points = []
    for i, (rho0, omega) in enumerate(grid):
        block = values[i * cfg.ensembles:(i + 1) * cfg.ensembles]
        mean = sum(block) / len(block)
        if len(block) > 1:
            sd = math.sqrt(sum((b - mean) ** 2 for b in block) / (len(block) - 1))
            stderr = sd / math.sqrt(len(block))
        else:
            stderr = 0.0
        points.append(PhasePoint(
            rho0=rho0, omega=omega, rho_inf_mean=mean, rho_inf_stderr=stderr,
            phase=classify_phase(rho0, mean),
        ))
    return points


def write_fig4_csvs(points, phase_path, cross_path, cross_rho0=CROSS_SECTION_RHO0):
    """fig4_phase.csv (full grid with phase labels) and fig4_cross.csv
    (adoption vs omega for the cross-section rho0 values).

    When the sweep's grid contains none of the requested cross-section
    values (reduced exploratory runs), the cross file falls back to every
    swept rho0 so it always carries plottable rows.
    """
    with open(phase_path, "w", newline="") as fh:
        fh.write("rho0,omega,rho_inf_mean,rho_inf_stderr,phase\n")
        for p in points:
            fh.write(f"{_fmt(p.rho0)},{_fmt(p.omega)},{_fmt(p.rho_inf_mean)},"
                     f"{_fmt(p.rho_inf_stderr)},{p.phase}\n")
    selected = [rho0 for rho0 in cross_rho0
                if any(abs(p.rho0 - rho0) < 1e-9 for p in points)]
    if not selected:
        selected = sorted({p.rho0 for p in points})
    with open(cross_path, "w", newline="") as fh:
        fh.write("rho0,omega,rho_inf_mean,rho_inf_stderr\n")
        for rho0 in selected:
            for p in points:
                if abs(p.rho0 - rho0) < 1e-9:
                    fh.write(f"{_fmt(p.rho0)},{_fmt(p.omega)},{_fmt(p.rho_inf_mean)},"
                             f"{_fmt(p.rho_inf_stderr)}\n")
