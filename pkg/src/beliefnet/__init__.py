"""Weighted belief-network contagion: simulation engine and exact analysis.

Agents hold small signed belief networks; social interactions nudge single
beliefs, a coherence drive resists incoherent ones, and simple or complex
contagion emerges depending on whether the incoming belief system
stabilizes or competes with the receiver's. The package ships the event
engine, the star and two-community experiments, and the exact Markov
treatment of the deterministic star dynamics.
"""

__version__ = "0.1.0"

from .beliefs import (
    BeliefNetwork,
    ModelParams,
    TriadStability,
    canonical_edges,
    increment,
    sign_of,
)
from .dynamics import (
    EnsembleResult,
    FinalSignMatchMetric,
    InteractionEvent,
    SimulationConfig,
    Trajectory,
    adoption_fraction,
    derive_seed,
    run,
    run_ensemble,
    step,
)
from .graphs import (
    CommunityLayout,
    Population,
    SocialGraph,
    make_star,
    make_two_community,
    seed_population,
)
from .markov import (
    TransitionMatrix,
    analytical_curve,
    build_transition_matrix,
    deterministic_transition,
    enumerate_states,
    exact_state,
    flip_probability,
    scenario_setup,
    stationary_from,
    target_states_by_sign,
)

__all__ = [name for name in dir() if not name.startswith("_")]
