"""Command-line entry point.

Subcommands: simulate (single run -> trajectory CSV), fig2 (flip-probability
campaign), fig4 (modularity sweep), markov (exact chain inspection), and
validate (fast invariant battery). Every output-producing run writes a
manifest with the fully resolved configuration next to its artifacts.

Exit status: 0 success, 1 configuration error, 2 runtime failure.
"""

import argparse
import os
import random
import sys
import time

from . import __version__
from .beliefs import BeliefNetwork, ModelParams, sign_of
from .config import (
    ConfigError,
    RunManifest,
    config_snapshot,
    load_config,
    resolve_fig2,
    resolve_fig4,
    resolve_simulate,
)
from .dynamics import SimulationConfig, derive_seed, run, trajectory_csv
from .experiments import (
    flip_curve,
    modularity_sweep,
    star_population,
    two_community_population,
    write_fig2_csv,
    write_fig4_csvs,
)
from .graphs import make_two_community, seed_population
from .markov import (
    analytical_curve,
    build_transition_matrix,
    enumerate_states,
    scenario_setup,
    state_label,
    stationary_from,
    target_states_by_sign,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _build_parser():
    parser = _Parser(prog="beliefnet", description=__doc__)
    parser.add_argument("--version", action="version", version=f"beliefnet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one simulation and write its trajectory")
    sim.add_argument("--config", help="key = value settings file")
    sim.add_argument("--graph", choices=("star", "two-community"))
    sim.add_argument("--scenario", type=int, choices=(1, 2))
    sim.add_argument("--variant", choices=("zealot-similar", "free-similar"))
    sim.add_argument("--n", type=int)
    sim.add_argument("--m", type=int, help="dissimilar-zealot leaf count (star)")
    sim.add_argument("--m-edges", dest="m_edges", type=int)
    sim.add_argument("--omega", type=float)
    sim.add_argument("--rho0", type=float)
    sim.add_argument("--steps", type=int)
    sim.add_argument("--sigma", type=float)
    sim.add_argument("--alpha", type=float)
    sim.add_argument("--beta", type=float)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--snapshot-every", dest="snapshot_every", type=int)
    sim.add_argument("--record-node", dest="record_node", type=int)
    sim.add_argument("--out", default="trajectory.csv")

    f2 = sub.add_parser("fig2", help="star flip-probability campaign")
    f2.add_argument("--config")
    f2.add_argument("--scenario", type=int, choices=(1, 2))
    f2.add_argument("--variant", choices=("zealot-similar", "free-similar"))
    f2.add_argument("--n", type=int)
    f2.add_argument("--sigma", type=float)
    f2.add_argument("--alpha", type=float)
    f2.add_argument("--beta", type=float)
    f2.add_argument("--runs-per-point", dest="runs_per_point", type=int)
    f2.add_argument("--repeats", type=int)
    f2.add_argument("--max-steps", dest="max_steps", type=int)
    f2.add_argument("--seed", type=int)
    f2.add_argument("--out-dir", default=".")
    f2.add_argument("--workers", type=int, default=1)

    f4 = sub.add_parser("fig4", help="two-community modularity sweep")
    f4.add_argument("--config")
    f4.add_argument("--n", type=int)
    f4.add_argument("--m-edges", dest="m_edges", type=int)
    f4.add_argument("--sigma", type=float)
    f4.add_argument("--alpha", type=float)
    f4.add_argument("--beta", type=float)
    f4.add_argument("--ensembles", type=int)
    f4.add_argument("--rho0-grid", dest="rho0_grid")
    f4.add_argument("--omega-grid", dest="omega_grid")
    f4.add_argument("--stationarity-tol", dest="stationarity_tol", type=float)
    f4.add_argument("--seed", type=int)
    f4.add_argument("--out-dir", default=".")
    f4.add_argument("--workers", type=int, default=1)

    mk = sub.add_parser("markov", help="print the exact chain and optional curve")
    mk.add_argument("--scenario", type=int, choices=(1, 2), default=1)
    mk.add_argument("--alpha", type=float, default=1.5)
    mk.add_argument("--beta", type=float, default=1.0)
    mk.add_argument("--k", type=int, default=39, help="hub degree for the curve")
    mk.add_argument("--m", type=int, help="print the stationary vector at this m")
    mk.add_argument("--curve-out", dest="curve_out", help="write the analytical curve CSV here")

    val = sub.add_parser("validate", help="run the fast invariant battery")
    val.add_argument("--seed", type=int, default=0)
    return parser


def _overrides(args, keys):
    """Flag values (when given) as a raw-config overlay."""
    out = {}
    for key in keys:
        value = getattr(args, key, None)
        if value is not None:
            out[key] = value
    return out


def _merged_config(args, keys):
    raw = load_config(args.config) if getattr(args, "config", None) else {}
    raw.update(_overrides(args, keys))
    return raw


def _cmd_simulate(args):
    t0 = time.monotonic()
    settings = resolve_simulate(_merged_config(args, (
        "graph", "scenario", "variant", "n", "m", "m_edges", "omega", "rho0",
        "steps", "sigma", "alpha", "beta", "seed", "snapshot_every", "record_node",
    )))
    params = ModelParams(settings.alpha, settings.beta, settings.sigma)
    if settings.graph == "star":
        pop, target = star_population(settings.scenario, settings.variant, settings.n, settings.m)
    else:
        from .experiments import Fig4Config
        shim = Fig4Config(n=settings.n, m_edges=settings.m_edges,
                          rho0_grid=(settings.rho0,), omega_grid=(settings.omega,),
                          sigma=settings.sigma, alpha=settings.alpha, beta=settings.beta,
                          ensembles=1, seed=settings.seed)
        rng = random.Random(derive_seed(settings.seed, "simulate-graph"))
        pop, target = two_community_population(shim, settings.rho0, settings.omega, rng)
    cadence = settings.snapshot_every
    if cadence is None:
        cadence = max(1, settings.steps // 200) if settings.steps > 0 else 0
    sim = SimulationConfig(
        params=params,
        max_steps=settings.steps,
        target=target,
        stationarity_window=max(1, settings.steps + 1),
        seed=derive_seed(settings.seed, "simulate-run"),
        snapshot_every=cadence,
        record_node=settings.record_node,
    )
    trajectory = run(pop, sim)
    with open(args.out, "w", newline="") as fh:
        fh.write(trajectory_csv(trajectory, include_weights=settings.record_node is not None))
    manifest = RunManifest(
        command="simulate", version=__version__, seed=settings.seed,
        config=config_snapshot(settings), outputs=[os.path.basename(args.out)],
        duration_seconds=time.monotonic() - t0,
    )
    manifest.write(args.out + ".manifest.json")
    print(f"wrote {args.out} ({len(trajectory.snapshots)} snapshots, "
          f"terminated by {trajectory.terminated_by})")
    return 0


def _cmd_fig2(args):
    t0 = time.monotonic()
    cfg = resolve_fig2(_merged_config(args, (
        "scenario", "variant", "n", "sigma", "alpha", "beta",
        "runs_per_point", "repeats", "max_steps", "seed",
    )))
    rows = flip_curve(cfg, workers=args.workers)
    os.makedirs(args.out_dir, exist_ok=True)
    path = os.path.join(args.out_dir, "fig2.csv")
    write_fig2_csv(rows, cfg, path)
    manifest = RunManifest(
        command="fig2", version=__version__, seed=cfg.seed,
        config=config_snapshot(cfg), outputs=["fig2.csv"],
        duration_seconds=time.monotonic() - t0,
    )
    manifest.write(os.path.join(args.out_dir, "fig2_manifest.json"))
    print(f"wrote {path} ({len(rows)} rows)")
    return 0


def _cmd_fig4(args):
    t0 = time.monotonic()
    cfg = resolve_fig4(_merged_config(args, (
        "n", "m_edges", "sigma", "alpha", "beta", "ensembles",
        "rho0_grid", "omega_grid", "stationarity_tol", "seed",
    )))
    points = modularity_sweep(cfg, workers=args.workers)
    os.makedirs(args.out_dir, exist_ok=True)
    phase_path = os.path.join(args.out_dir, "fig4_phase.csv")
    cross_path = os.path.join(args.out_dir, "fig4_cross.csv")
    write_fig4_csvs(points, phase_path, cross_path)
    manifest = RunManifest(
        command="fig4", version=__version__, seed=cfg.seed,
        config=config_snapshot(cfg), outputs=["fig4_phase.csv", "fig4_cross.csv"],
        duration_seconds=time.monotonic() - t0,
    )
    manifest.write(os.path.join(args.out_dir, "fig4_manifest.json"))
    print(f"wrote {phase_path} and {cross_path} ({len(points)} grid points)")
    return 0


def _cmd_markov(args):
    initial, dissimilar, similar = scenario_setup(args.scenario)
    states = enumerate_states(initial, [dissimilar, similar], args.alpha, args.beta)
    matrix = build_transition_matrix(states, [dissimilar, similar], args.alpha, args.beta)
    print(f"scenario {args.scenario}: {len(states)} reachable states "
          f"(alpha={args.alpha:g}, beta={args.beta:g})")
    for s in states:
        print(f"  {state_label(s)}")
    print()
    print("transition coefficients (columns = source state; u per dissimilar "
          "(sender, edge) pair, v per similar pair):")
    print(matrix.symbolic_table())
    if args.m is not None:
        edge_count = matrix.edge_count
        u = args.m / (edge_count * args.k)
        v = (args.k - args.m) / (edge_count * args.k)
        pi = stationary_from(matrix, u, v, initial)
        print(f"stationary distribution at m={args.m}, k={args.k}:")
        for s, p in zip(states, pi):
            print(f"  {state_label(s)}: {p:.6g}")
    if args.curve_out:
        t0 = time.monotonic()
        curve = analytical_curve(args.scenario, args.k, args.alpha, args.beta)
        with open(args.curve_out, "w", newline="") as fh:
            fh.write("m,flip_probability\n")
            for m, p in curve:
                fh.write(f"{m},{p:.6g}\n")
        manifest = RunManifest(
            command="markov", version=__version__, seed=0,
            config={"scenario": args.scenario, "alpha": args.alpha,
                    "beta": args.beta, "k": args.k},
            outputs=[os.path.basename(args.curve_out)],
            duration_seconds=time.monotonic() - t0,
        )
        manifest.write(args.curve_out + ".manifest.json")
        print(f"wrote {args.curve_out}")
    return 0


def _check_state_counts():
    for scenario, expected in ((1, 5), (2, 20)):
        initial, dis, sim = scenario_setup(scenario)
        states = enumerate_states(initial, [dis, sim], 1.5, 1.0)
        assert len(states) == expected, f"scenario {scenario}: {len(states)} states, expected {expected}"


def _check_column_sums():
    import numpy as np
    for scenario in (1, 2):
        initial, dis, sim = scenario_setup(scenario)
        states = enumerate_states(initial, [dis, sim], 1.5, 1.0)
        matrix = build_transition_matrix(states, [dis, sim], 1.5, 1.0)
        for m in (0, 7, 39):
            u, v = m / 117, (39 - m) / 117
            cols = matrix.numeric(u, v).sum(axis=0)
            assert np.allclose(cols, 1.0, atol=1e-12), f"column sums off at m={m}"


def _check_boundary_flips():
    for scenario in (1, 2):
        curve = dict(analytical_curve(scenario, 39))
        assert abs(curve[0]) < 1e-9, f"scenario {scenario}: flip at m=0 is {curve[0]}"
        assert abs(curve[39] - 1) < 1e-9, f"scenario {scenario}: flip at m=k is {curve[39]}"


def _check_gradient(seed):
    rng = random.Random(seed)
    for _ in range(200):
        cc = rng.choice((3, 4, 5))
        edge_count = cc * (cc - 1) // 2
        net = BeliefNetwork([rng.uniform(-1, 1) for _ in range(edge_count)], cc)
        edge = net.edges[rng.randrange(edge_count)]
        h = 0.25
        w = list(net.weights)
        e = net.edge_index(edge)
        up = BeliefNetwork([x if i != e else min(1.0, x + h) for i, x in enumerate(w)], cc)
        dn = BeliefNetwork([x if i != e else max(-1.0, x - h) for i, x in enumerate(w)], cc)
        span = up.weights[e] - dn.weights[e]
        fd = (up.internal_energy() - dn.internal_energy()) / span
        assert abs(fd - net.energy_gradient(edge)) < 1e-12, "gradient mismatch"


def _check_random_run(seed):
    rng = random.Random(seed)
    graph, layout = make_two_community(30, 120, 0.3, rng)
    zealots = set(rng.sample(range(30), 5))
    pop = seed_population(graph, [
        (sorted(zealots), (1.0, 1.0, 1.0), True),
        ([i for i in range(30) if i not in zealots], (1.0, -1.0, -1.0), False),
    ])
    sim = SimulationConfig(
        params=ModelParams(2.0, 1.0, 0.2), max_steps=200_000,
        target=sign_of((1, 1, 1)), stationarity_window=200_001, seed=seed,
    )
    before = [pop.beliefs[i].weights for i in sorted(zealots)]
    out = run(pop, sim)
    after = [out.final.beliefs[i].weights for i in sorted(zealots)]
    assert before == after, "zealot beliefs changed"
    for b in out.final.beliefs:
        assert all(-1.0 <= w <= 1.0 for w in b.weights), "weight escaped [-1, 1]"


def _check_reproducibility(seed):
    pop, target = star_population(1, "zealot-similar", 20, 7)
    sim = SimulationConfig(
        params=ModelParams(1.5, 1.0, 0.2), max_steps=5000, target=target,
        stationarity_window=5001, seed=seed, snapshot_every=500, record_node=0,
    )
    a = run(pop, sim)
    b = run(pop, sim)
    assert a.snapshots == b.snapshots, "snapshots differ between identical runs"
    assert [x.weights for x in a.final.beliefs] == [x.weights for x in b.final.beliefs]


def _cmd_validate(args):
    checks = [
        ("state-counts", _check_state_counts),
        ("column-stochasticity", _check_column_sums),
        ("boundary-flip-probabilities", _check_boundary_flips),
        ("gradient-finite-difference", lambda: _check_gradient(args.seed)),
        ("zealot-immutability-and-bounds", lambda: _check_random_run(args.seed)),
        ("run-reproducibility", lambda: _check_reproducibility(args.seed)),
    ]
    failed = 0
    for name, check in checks:
        try:
            check()
        except AssertionError as exc:
            failed += 1
            print(f"FAIL {name}: {exc}")
        else:
            print(f"PASS {name}")
    if failed:
        print(f"{failed}/{len(checks)} checks failed")
        return 2
    print(f"all {len(checks)} checks passed")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "fig2": _cmd_fig2,
    "fig4": _cmd_fig4,
    "markov": _cmd_markov,
    "validate": _cmd_validate,
}


def cli_dispatch(argv):
    """Parse argv and execute; returns the process exit status."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports and exits
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
