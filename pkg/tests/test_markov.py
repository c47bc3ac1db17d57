from fractions import Fraction

import numpy as np
import pytest

from beliefnet.beliefs import ModelParams, sign_of
from beliefnet.dynamics import SimulationConfig, derive_seed, run
from beliefnet.experiments import star_population
from beliefnet.markov import (
    analytical_curve,
    build_transition_matrix,
    deterministic_transition,
    enumerate_states,
    exact_state,
    flip_probability,
    scenario_setup,
    state_label,
    stationary_from,
    target_states_by_sign,
)

F = Fraction
ALPHA, BETA = 1.5, 1.0


def scenario_chain(scenario):
    initial, dis, sim = scenario_setup(scenario)
    states = enumerate_states(initial, [dis, sim], ALPHA, BETA)
    matrix = build_transition_matrix(states, [dis, sim], ALPHA, BETA)
    return initial, dis, states, matrix


# The five-state chain of scenario 1, exactly as published: rows/columns in
# discovery order {-1,1,1}, {1,1,1}, {1/2,1,1}, {0,1,1}, {-1/2,1,1}; each
# entry is (u-count, v-count).
SCENARIO1_STATES = [(-1, 1, 1), (1, 1, 1), (F(1, 2), 1, 1), (0, 1, 1), (F(-1, 2), 1, 1)]
SCENARIO1_COEFFS = [
    [(2, 3), (0, 0), (0, 0), (0, 0), (0, 1)],
    [(1, 0), (3, 2), (1, 0), (1, 0), (1, 0)],
    [(0, 0), (0, 1), (2, 2), (0, 0), (0, 0)],
    [(0, 0), (0, 0), (0, 1), (2, 2), (0, 0)],
    [(0, 0), (0, 0), (0, 0), (0, 1), (2, 2)],
]


class TestEnumeration:
    def test_scenario1_exact_state_set(self):
        _, _, states, _ = scenario_chain(1)
        assert states == [exact_state(s) for s in SCENARIO1_STATES]

    def test_scenario2_has_twenty_states(self):
        _, _, states, _ = scenario_chain(2)
        assert len(states) == 20

    def test_fixed_point_closure_is_single_state(self):
        stable = exact_state((1, 1, 1))
        states = enumerate_states(stable, [stable, stable], ALPHA, BETA)
        assert states == [stable]

    def test_closure_cap(self):
        # irrational-free but non-lattice dynamics: tiny alpha produces
        # ever-new fractions; the cap must trip rather than hang
        with pytest.raises(RuntimeError, match="state space exceeded"):
            enumerate_states((F(-1), F(1), F(1)), [(F(1), F(1), F(1))],
                             F(1, 997), F(1, 991), max_states=50)

    def test_transition_clips_to_unit_interval(self):
        state = exact_state((-1, 1, 1))
        sender = exact_state((1, 1, 1))
        out = deterministic_transition(state, sender, 0, ALPHA, BETA)
        assert out == exact_state((1, 1, 1))  # -1 + 2.5 clipped


class TestTransitionMatrix:
    def test_scenario1_coefficients_exact(self):
        _, _, states, matrix = scenario_chain(1)
        for i in range(5):
            for j in range(5):
                assert tuple(matrix.coeffs[i, j]) == SCENARIO1_COEFFS[i][j], (i, j)

    def test_column_coefficient_sums(self):
        for scenario in (1, 2):
            _, _, _, matrix = scenario_chain(scenario)
            sums = matrix.coeffs.sum(axis=0)
            assert (sums == 3).all()

    def test_numeric_columns_sum_to_one(self):
        _, _, _, matrix = scenario_chain(2)
        k = 39
        for m in (0, 1, 17, 39):
            u, v = m / (3 * k), (k - m) / (3 * k)
            cols = matrix.numeric(u, v).sum(axis=0)
            assert np.abs(cols - 1.0).max() < 1e-12

    def test_single_state_matrix(self):
        stable = exact_state((1, 1, 1))
        matrix = build_transition_matrix([stable], [stable, stable], ALPHA, BETA)
        assert matrix.coeffs.shape == (1, 1, 2)
        assert tuple(matrix.coeffs[0, 0]) == (3, 3)

    def test_non_closure_detected(self):
        initial, dis, states, _ = scenario_chain(1)
        with pytest.raises(ValueError, match="leaves the state set"):
            build_transition_matrix(states[:3], [dis, initial], ALPHA, BETA)

    def test_symbolic_table_entries(self):
        _, _, _, matrix = scenario_chain(1)
        table = matrix.symbolic_table()
        assert "2u+3v" in table
        assert "3u+2v" in table
        assert "{-1,1,1}" in table

    def test_numeric_csv_parses(self):
        import csv as csvmod
        import io

        _, _, _, matrix = scenario_chain(1)
        text = matrix.numeric_csv(1 / 9, 2 / 9)
        rows = list(csvmod.reader(io.StringIO(text)))
        assert rows[0][0] == "state"
        assert len(rows) == 6
        data = np.array([[float(x) for x in r[1:]] for r in rows[1:]])
        assert np.abs(data.sum(axis=0) - 1.0).max() < 1e-9


class TestStationary:
    def test_no_dissimilar_mass_stays_at_initial(self):
        initial, _, states, matrix = scenario_chain(1)
        pi = stationary_from(matrix, 0.0, 1 / 3, initial)
        assert pi[0] == pytest.approx(1.0, abs=1e-12)

    def test_no_similar_mass_reaches_absorbing_target(self):
        initial, _, states, matrix = scenario_chain(1)
        pi = stationary_from(matrix, 1 / 3, 0.0, initial)
        assert pi[states.index(exact_state((1, 1, 1)))] == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("scenario", [1, 2])
    def test_fixed_point_residual(self, scenario):
        initial, _, states, matrix = scenario_chain(scenario)
        k = 39
        for m in range(k + 1):
            u, v = m / (3 * k), (k - m) / (3 * k)
            pi = stationary_from(matrix, u, v, initial)
            P = matrix.numeric(u, v)
            assert np.abs(P @ pi - pi).max() < 1e-10
            assert abs(pi.sum() - 1.0) < 1e-10
            assert (pi > -1e-15).all()

    def test_rejects_unnormalized_probabilities(self):
        initial, _, _, matrix = scenario_chain(1)
        with pytest.raises(ValueError, match="u\\+v"):
            stationary_from(matrix, 0.5, 0.5, initial)

    def test_rejects_unknown_initial(self):
        _, _, _, matrix = scenario_chain(1)
        with pytest.raises(ValueError, match="not in the enumerated set"):
            stationary_from(matrix, 1 / 9, 2 / 9, (F(1, 4), 1, 1))

    def test_periodic_chain_reported_as_nonconvergent(self):
        from beliefnet.markov import TransitionMatrix
        import numpy as np

        # hand-built two-state swap: powers oscillate and never settle
        coeffs = np.zeros((2, 2, 2), dtype=np.int64)
        coeffs[1, 0, 0] = 3
        coeffs[0, 1, 0] = 3
        swap = TransitionMatrix(states=(exact_state((1, 1, 1)), exact_state((-1, 1, 1))),
                                coeffs=coeffs)
        with pytest.raises(RuntimeError, match="did not converge"):
            stationary_from(swap, 1 / 3, 0.0, (1, 1, 1))


class TestFlipProbability:
    def test_target_sets_match_published_lists(self):
        _, dis, states, _ = scenario_chain(1)
        targets = target_states_by_sign(states, sign_of(dis))
        assert set(targets) == {exact_state((1, 1, 1)), exact_state((F(1, 2), 1, 1))}

        _, dis2, states2, _ = scenario_chain(2)
        targets2 = target_states_by_sign(states2, sign_of(dis2))
        expected = {
            exact_state((1, 1, 1)),
            exact_state((1, F(1, 2), 1)),
            exact_state((F(1, 2), 1, 1)),
        }
        assert expected <= set(targets2)
        assert set(targets2) == expected  # no other positive-sign state exists

    def test_unknown_target_rejected(self):
        initial, dis, states, matrix = scenario_chain(1)
        pi = stationary_from(matrix, 1 / 9, 2 / 9, initial)
        with pytest.raises(ValueError, match="not in the state set"):
            flip_probability(pi, states, [(F(3, 4), 1, 1)])

    def test_interior_m_strictly_between_bounds(self):
        curve = dict(analytical_curve(1, 39))
        for m in range(1, 39):
            assert 0.0 < curve[m] < 1.0


class TestAnalyticalCurve:
    @pytest.mark.parametrize("scenario", [1, 2])
    def test_boundaries(self, scenario):
        curve = dict(analytical_curve(scenario, 39))
        assert abs(curve[0]) < 1e-9
        assert abs(curve[39] - 1.0) < 1e-9

    @pytest.mark.parametrize("scenario", [1, 2])
    def test_monotone_in_m(self, scenario):
        probs = [p for _, p in analytical_curve(scenario, 39)]
        assert all(b >= a - 1e-12 for a, b in zip(probs, probs[1:]))

    def test_concave_simple_curve(self):
        probs = [p for _, p in analytical_curve(1, 39)]
        second = [probs[i + 1] - 2 * probs[i] + probs[i - 1] for i in range(1, 39)]
        assert all(d <= 1e-9 for d in second)

    def test_sigmoidal_complex_curve(self):
        probs = [p for _, p in analytical_curve(2, 39)]
        second = [probs[i + 1] - 2 * probs[i] + probs[i - 1] for i in range(1, 39)]
        signs = [s for s in ((d > 1e-9) - (d < -1e-9) for d in second) if s != 0]
        flips = sum(1 for a, b in zip(signs, signs[1:]) if a != b)
        assert flips == 1
        assert signs[0] == 1 and signs[-1] == -1

    def test_degenerate_single_neighbor(self):
        assert analytical_curve(1, 1) == [(0, 0.0), (1, 1.0)]

    def test_bad_scenario(self):
        with pytest.raises(ValueError):
            scenario_setup(3)


class TestSimulationAgreement:
    """The exact chain against the noiseless engine, both ways."""

    def test_deterministic_occupancy_matches_stationary(self):
        # ensemble of noiseless runs, each well past mixing: the hub's
        # final-state frequencies must match the stationary vector
        k, m, runs, horizon = 9, 4, 400, 4000
        initial, dis, states, matrix = scenario_chain(1)
        u, v = m / (3 * k), (k - m) / (3 * k)
        pi = stationary_from(matrix, u, v, initial)

        pop, target = star_population(1, "zealot-similar", k + 1, m)
        counts = {s: 0 for s in states}
        for r in range(runs):
            cfg = SimulationConfig(params=ModelParams(ALPHA, BETA, 0.0),
                                   max_steps=horizon, target=target,
                                   stationarity_window=horizon + 1,
                                   seed=derive_seed(777, r))
            final = run(pop, cfg).final.beliefs[0].weights
            counts[exact_state(final)] += 1
        for idx, s in enumerate(states):
            observed = counts[s] / runs
            se = max((pi[idx] * (1 - pi[idx]) / runs) ** 0.5, 1e-3)
            assert abs(observed - pi[idx]) <= 3 * se, state_label(s)

    def test_enumerated_states_cover_simulated_states(self):
        # no noiseless run may ever step outside the enumerated closure
        _, _, states, _ = scenario_chain(2)
        allowed = set(states)
        pop, target = star_population(2, "zealot-similar", 12, 5)
        cfg = SimulationConfig(params=ModelParams(ALPHA, BETA, 0.0),
                               max_steps=3000, target=target,
                               stationarity_window=3001, seed=99,
                               snapshot_every=1, record_node=0)
        out = run(pop, cfg)
        for _, _, weights in out.snapshots:
            assert exact_state(weights) in allowed
