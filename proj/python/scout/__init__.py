"""Targeted-exploration toolkit bindings.

The compiled core exposes the decision loop's building blocks (relevance
rewards, the GP concept model, tiered Boltzmann sampling), the analytic and
Monte-Carlo discovery-time tools, caption search, duplicate hashing, and a
deterministic simulated-web episode runner.
"""

from ._core import (
    Gpr,
    SearchIndex,
    analytic_times,
    concept_score,
    count_collisions,
    dhash,
    gp_kernel,
    harmonic,
    image_reward,
    infonce_loss,
    prune_vocabulary,
    run_sim_episode,
    simulate_discovery,
    softmax_distribution,
    temperature_from_smr,
    tiered_distribution,
)

__version__ = "0.1.0"

__all__ = [
    "Gpr",
    "SearchIndex",
    "analytic_times",
    "concept_score",
    "count_collisions",
    "dhash",
    "gp_kernel",
    "harmonic",
    "image_reward",
    "infonce_loss",
    "prune_vocabulary",
    "run_sim_episode",
    "simulate_discovery",
    "softmax_distribution",
    "temperature_from_smr",
    "tiered_distribution",
]
