"""Exact coalitional analysis of finite strategic games.

The library builds finite games from JSON specs (explicit tables, cost
sharing, network contribution, welfare sharing, utility congestion), then
analyzes them exhaustively: Nash and strong Nash enumeration with efficiency
ratios, coalitional smoothness certificates (check and exact fit), structural
hypotheses (potentials, closeness, externalities, marginal contribution,
submodularity), and coalitional best-response dynamics down to exact sink
equilibria and their stationary welfare.
"""

from . import fixtures
from .core import (
    Coalition,
    Direction,
    Game,
    PlayerOrdering,
    Profile,
    apply_deviation,
    enumerate_profiles,
    harmonic,
    optimum,
    social_welfare,
    suffix_deviation_profile,
    utility,
)
from .dynamics import (
    ChainAnalysis,
    DynamicsTrace,
    build_chain,
    coalitional_step,
    empirical_bound_check,
    joint_best_response,
    run_coalitional,
    run_unilateral,
    sink_equilibria,
)
from .equilibria import (
    EquilibriumReport,
    efficiency_ratios,
    enumerate_equilibria,
    is_nash,
    is_strong_nash,
    verify_scce,
)
from .games import load_game, load_game_file
from .smoothness import (
    SmoothnessCertificate,
    check_coalitional_smoothness,
    check_monotone_participation,
    check_positive_externalities,
    check_potential_submodularity,
    check_unilateral_smoothness,
    deviation_sum,
    fit_coalitional_smoothness,
    fit_unilateral_smoothness,
    marginal_contribution_gamma,
    potential_closeness,
    verify_potential,
)

__version__ = "0.1.0"

__all__ = [
    "ChainAnalysis",
    "Coalition",
    "Direction",
    "DynamicsTrace",
    "EquilibriumReport",
    "Game",
    "PlayerOrdering",
    "Profile",
    "SmoothnessCertificate",
    "apply_deviation",
    "build_chain",
    "check_coalitional_smoothness",
    "check_monotone_participation",
    "check_positive_externalities",
    "check_potential_submodularity",
    "check_unilateral_smoothness",
    "coalitional_step",
    "deviation_sum",
    "efficiency_ratios",
    "empirical_bound_check",
    "enumerate_equilibria",
    "enumerate_profiles",
    "fit_coalitional_smoothness",
    "fit_unilateral_smoothness",
    "fixtures",
    "harmonic",
    "is_nash",
    "is_strong_nash",
    "joint_best_response",
    "load_game",
    "load_game_file",
    "marginal_contribution_gamma",
    "optimum",
    "potential_closeness",
    "run_coalitional",
    "run_unilateral",
    "sink_equilibria",
    "social_welfare",
    "suffix_deviation_profile",
    "utility",
    "verify_potential",
    "verify_scce",
]
