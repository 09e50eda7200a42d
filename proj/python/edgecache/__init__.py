"""Cache placement under unknown popularity.

Thin wrapper over the C++ core: knapsack solvers for the single-period
placement problem, the bandit policies, and the seeded simulator.
"""

from ._core import (
    Catalog,
    ConfigError,
    PopularityProfile,
    build_catalog,
    cucb_index,
    delta_bound,
    mcucb_index,
    oracle_reward,
    preset_names,
    preset_text,
    run_config,
    run_episode,
    sample_demands,
    solve,
    solve_lp,
    zipf_profile,
)

__all__ = [
    "Catalog",
    "ConfigError",
    "PopularityProfile",
    "build_catalog",
    "cucb_index",
    "delta_bound",
    "mcucb_index",
    "oracle_reward",
    "preset_names",
    "preset_text",
    "run_config",
    "run_episode",
    "sample_demands",
    "solve",
    "solve_lp",
    "zipf_profile",
]
