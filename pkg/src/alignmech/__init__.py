"""Simulation and exhaustive verification of a two-stage task-delegation mechanism.

Agents report their priority misalignment with the principal; the lowest
report wins, realizes some misalignment gamma, and is paid according to a
payment scheme (by default: second-lowest report minus gamma).
"""

from .agents import (TieBreak, best_realization, best_response_bid, feasible_realizations)
from .config import ConfigError, ScenarioConfig, parse_config
from .core import (AgentProfile, Bid, CostFamily, CostModel, DimensionError, FeasibilityError,
                   Grid, MechanismError, Metric, PolicyKind, PriorityVector, ProfitFamily,
                   ProfitModel, Realization, ValidationError, effort_cost, misalignment, profit)
from .engine import Outcome, Scenario, SplitMix64, generate_scenario, run_batch, run_game
from .mechanism import (ArityError, PaymentScheme, SchemeKind, UnsupportedSchemeError,
                        check_payment_property, compute_payment, select_winner)
from .oracles import efficient_agent_oracle, social_optimum_oracle
from .verify import (VerificationReport, check_incentive_compatibility,
                     check_individual_rationality, check_selection_efficiency,
                     check_social_optimality, check_winner_utility_constancy,
                     search_counterexample)

__version__ = "0.1.0"
