"""Scenario generation and end-to-end execution of one game.

One game follows the timeline: every agent submits a report, the principal
selects the lowest report, the winner chooses its realized misalignment, and
the winner is paid. Losers are never paid.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

from .agents import TieBreak, best_realization, best_response_bid
from .config import ScenarioConfig
from .core import (AgentProfile, Bid, CostModel, Grid, Metric, PolicyKind, PriorityVector,
                   ProfitModel, ValidationError, effort_cost, profit)
from .mechanism import PaymentScheme, compute_payment, select_winner
from .oracles import social_optimum_oracle

log = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1
MAX_BR_ROUNDS = 20


class SplitMix64:
    """SplitMix64 generator; doubles come from the top 53 bits."""

    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def next_float(self) -> float:
        return (self.next_u64() >> 11) / 9007199254740992.0


@dataclass(frozen=True)
class Scenario:
    agents: tuple[AgentProfile, ...]
    cost: CostModel = CostModel()
    profit: ProfitModel = ProfitModel()
    scheme: PaymentScheme = PaymentScheme()
    theta_grid: Grid = Grid(0.0, 4.0, 0.25)
    gamma_grid: Grid = Grid(0.0, 4.0, 0.05)
    tie_break: TieBreak = TieBreak.PRO_SOCIAL
    metric: Metric = Metric.L2
    principal_priority: Optional[PriorityVector] = None
    seed: int = 0

    def __post_init__(self):
        if len(self.agents) < 2:
            raise ValidationError("a scenario needs at least 2 agents")
        ids = [a.id for a in self.agents]
        if len(set(ids)) != len(ids):
            raise ValidationError(f"duplicate agent ids {ids}")
        if self.principal_priority is not None:
            m = len(self.principal_priority)
            for a in self.agents:
                if a.true_priority is not None and len(a.true_priority) != m:
                    raise ValidationError(f"agent {a.id} priority has length "
                                          f"{len(a.true_priority)}, expected {m}")

    @property
    def thetas(self) -> tuple[float, ...]:
        return tuple(a.true_theta for a in self.agents)

    @classmethod
    def truthful(cls, thetas: Sequence[float], **kwargs) -> "Scenario":
        agents = tuple(AgentProfile(i, t) for i, t in enumerate(thetas, start=1))
        return cls(agents=agents, **kwargs)


@dataclass(frozen=True)
class Outcome:
    seed: int
    winner_id: int
    theta_bar: float
    bids: tuple[Bid, ...]
    gamma_realized: float
    payments: tuple[float, ...]
    agent_utilities: tuple[float, ...]
    principal_utility: float
    social_welfare: float
    pi_star: float
    welfare_gap: float
    true_thetas: tuple[float, ...] = ()
    converged: bool = True
    rounds: int = 0
    multi_strategic: bool = False  # several agents best-responded jointly

    @property
    def winner_index(self) -> int:
        return [b.agent_id for b in self.bids].index(self.winner_id)

    @property
    def payment_w(self) -> float:
        return self.payments[self.winner_index]

    @property
    def utility_w(self) -> float:
        return self.agent_utilities[self.winner_index]


def social_welfare(profit_value: float, cost_value: float) -> float:
    return profit_value - cost_value


def generate_scenario(config: ScenarioConfig, seed: int) -> Scenario:
    """Deterministic scenario for ``(config, seed)``.

    Scalar mode draws theta_i = theta_max * u_i for i = 1..N. Vector mode
    draws the principal's M entries first, then each agent's M entries, all
    uniform on [0, 1), and sets theta_i to the misalignment with the principal.
    """
    if config.n_agents < 2:
        raise ValidationError("n_agents must be >= 2")
    rng = SplitMix64(seed)
    strategic = set(config.strategic_agents)

    def policy(i):
        return PolicyKind.STRATEGIC if i in strategic else PolicyKind.TRUTHFUL

    principal = None
    if config.mode == "vector":
        m = config.dimension
        principal = PriorityVector(tuple(rng.next_float() for _ in range(m)))
        agents = tuple(
            AgentProfile.from_priority(i, principal,
                                       PriorityVector(tuple(rng.next_float() for _ in range(m))),
                                       config.metric, policy=policy(i))
            for i in range(1, config.n_agents + 1))
    else:
        agents = tuple(AgentProfile(i, config.theta_max * rng.next_float(), policy(i))
                       for i in range(1, config.n_agents + 1))
    return Scenario(agents=agents, cost=config.cost, profit=config.profit, scheme=config.scheme,
                    theta_grid=config.theta_grid, gamma_grid=config.gamma_grid,
                    tie_break=config.tie_break, metric=config.metric,
                    principal_priority=principal, seed=seed)


def _agent_tie_break(agent: AgentProfile, scenario: Scenario) -> TieBreak:
    return TieBreak(agent.gamma_rule) if agent.gamma_rule else scenario.tie_break


def _collect_bids(scenario: Scenario) -> tuple[dict[int, float], bool, int]:
    reports = {}
    for a in scenario.agents:
        reports[a.id] = a.fixed_report if a.policy is PolicyKind.FIXED else a.true_theta
    strategic = [a for a in scenario.agents if a.policy is PolicyKind.STRATEGIC]
    if not strategic:
        return reports, True, 0
    # iterated best response from the truthful profile
    for rnd in range(1, MAX_BR_ROUNDS + 1):
        new = dict(reports)
        for a in strategic:
            others = [Bid(i, r) for i, r in reports.items() if i != a.id]
            new[a.id], _ = best_response_bid(a, others, scenario.scheme, scenario.cost,
                                             scenario.profit, scenario.theta_grid,
                                             scenario.gamma_grid, _agent_tie_break(a, scenario))
        moved = max(abs(new[i] - reports[i]) for i in reports)
        reports = new
        if moved <= 1e-9:
            return reports, True, rnd
    log.warning("best-response iteration did not settle after %d rounds (seed %s)",
                MAX_BR_ROUNDS, scenario.seed)
    return reports, False, MAX_BR_ROUNDS


def run_game(scenario: Scenario) -> Outcome:
    reports, converged, rounds = _collect_bids(scenario)
    bids = tuple(Bid(a.id, reports[a.id]) for a in scenario.agents)
    winner_id, theta_bar = select_winner(bids)
    winner = next(a for a in scenario.agents if a.id == winner_id)
    reported = reports[winner_id]

    gamma, _ = best_realization(winner.true_theta, reported, theta_bar, scenario.scheme,
                                scenario.cost, scenario.profit, scenario.gamma_grid,
                                _agent_tie_break(winner, scenario))
    pay = compute_payment(scenario.scheme, theta_bar, gamma, reported, scenario.profit,
                          scenario.cost, scenario.gamma_grid)
    h = effort_cost(scenario.cost, winner.true_theta, gamma)
    s = profit(scenario.profit, gamma)

    payments = tuple(pay if a.id == winner_id else 0.0 for a in scenario.agents)
    utilities = tuple(pay - h if a.id == winner_id else 0.0 for a in scenario.agents)
    pi = social_welfare(s, h)
    pi_star = max(social_optimum_oracle(a.true_theta, scenario.profit, scenario.cost,
                                        scenario.gamma_grid)[1] for a in scenario.agents)
    n_strategic = sum(a.policy is PolicyKind.STRATEGIC for a in scenario.agents)
    return Outcome(
        seed=scenario.seed,
        winner_id=winner_id,
        theta_bar=theta_bar,
        bids=bids,
        gamma_realized=gamma,
        payments=payments,
        agent_utilities=utilities,
        principal_utility=s - sum(payments),
        social_welfare=pi,
        pi_star=pi_star,
        welfare_gap=pi_star - pi,
        true_thetas=scenario.thetas,
        converged=converged,
        rounds=rounds,
        multi_strategic=n_strategic > 1,
    )


def _run_seed(args: tuple[ScenarioConfig, int]) -> Outcome:
    config, seed = args
    return run_game(generate_scenario(config, seed))


def run_batch(config: ScenarioConfig, seeds: Optional[Sequence[int]] = None,
              workers: int = 1) -> list[Outcome]:
    """Run one game per seed; results come back in seed order for any worker count."""
    seeds = list(config.seeds if seeds is None else seeds)
    jobs = [(config, s) for s in seeds]
    if workers <= 1 or len(jobs) < 2:
        return [_run_seed(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_seed, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
