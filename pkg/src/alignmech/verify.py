"""Exhaustive checkers for incentive compatibility, individual rationality,
social optimality, selection efficiency and the payment property.

Every check enumerates a declared grid; a pass certifies the property on that
grid only, and each report carries the grids it used.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

from .agents import best_realization, realization_utilities, report_utility
from .config import ScenarioConfig
from .core import TOL, Bid, Grid, effort_cost, profit
from .engine import Scenario, generate_scenario, run_game
from .mechanism import (compute_payment, iter_payment_property_violations,
                        select_winner)
from .oracles import efficient_agent_oracle, social_optimum_oracle

IR_TOL = 1e-12
CONSTANCY_TOL = 1e-12


@dataclass
class VerificationReport:
    property: str
    counterexamples: list[dict] = field(default_factory=list)
    grids_used: dict = field(default_factory=dict)
    tolerance: float = TOL
    checked: int = 0
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


@dataclass
class CounterexampleResult:
    property: str
    status: str  # "found" | "none" | "inconclusive"
    witness: Optional[dict]
    evaluations: int
    budget: int

    def to_dict(self) -> dict:
        return asdict(self)


def grid_profiles(theta_grid: Grid, n_agents: int) -> Iterator[tuple[float, ...]]:
    """Every assignment of grid thetas to ``n_agents`` positions, lexicographically."""
    return itertools.product(theta_grid.points(), repeat=n_agents)


def _grids(config: ScenarioConfig) -> dict:
    return {"theta": config.theta_grid.describe(), "gamma": config.gamma_grid.describe()}


def _setting(config: ScenarioConfig) -> dict:
    return {"scheme": str(config.scheme), "cost": str(config.cost),
            "profit": str(config.profit), "tie_break": config.tie_break.value,
            "n_agents": config.n_agents}


# -- incentive compatibility -------------------------------------------------

def _deviation(config, thetas, idx, report, tie_break):
    agent_id = idx + 1
    theta = thetas[idx]
    others = [Bid(j + 1, t) for j, t in enumerate(thetas) if j != idx]
    u, won, gamma = report_utility(theta, report, agent_id, others, config.scheme, config.cost,
                                   config.profit, config.gamma_grid, tie_break)
    payment = None
    if won:
        _, theta_bar = select_winner([Bid(agent_id, report), *others])
        payment = compute_payment(config.scheme, theta_bar, gamma, report, config.profit,
                                  config.cost, config.gamma_grid)
    return u, won, gamma, payment


def _ic_units(config: ScenarioConfig, profiles: Iterable[Sequence[float]]):
    """Yield ``(evaluations, violations)`` per (profile, agent position)."""
    tie = config.tie_break
    reports = config.theta_grid.points()
    for thetas in profiles:
        thetas = tuple(float(t) for t in thetas)
        for idx, theta in enumerate(thetas):
            truthful_u = _deviation(config, thetas, idx, theta, tie)[0]
            found = []
            for r in reports:
                if r == theta:
                    continue
                u, won, gamma, payment = _deviation(config, thetas, idx, r, tie)
                if u > truthful_u + TOL:
                    found.append({"thetas": list(thetas), "agent_id": idx + 1,
                                  "true_theta": theta, "reported_theta": r, "won": won,
                                  "gamma": gamma, "payment": payment,
                                  "truthful_utility": truthful_u, "deviation_utility": u,
                                  "gain": u - truthful_u})
            yield 1 + len(reports), found


def check_incentive_compatibility(config: ScenarioConfig,
                                  profiles: Optional[Iterable[Sequence[float]]] = None
                                  ) -> VerificationReport:
    """Truthful reporting must be a best reply for every agent, profile and misreport.

    Opponents report truthfully; the deviating agent realizes gamma through
    ``best_realization`` with the configured tie-break.
    """
    if profiles is None:
        profiles = grid_profiles(config.theta_grid, config.n_agents)
    report = VerificationReport("IC", grids_used=_grids(config), tolerance=TOL,
                                details=_setting(config))
    for cost, found in _ic_units(config, profiles):
        report.checked += cost
        report.counterexamples.extend(found)
    if report.counterexamples:
        report.details["max_gain"] = max(w["gain"] for w in report.counterexamples)
    return report


# -- individual rationality --------------------------------------------------

def _ir_units(config: ScenarioConfig, profiles, realization: str):
    for thetas in profiles:
        thetas = tuple(float(t) for t in thetas)
        bids = [Bid(i, t) for i, t in enumerate(thetas, start=1)]
        winner_id, theta_bar = select_winner(bids)
        theta_w = thetas[winner_id - 1]
        if realization == "agent":
            gamma, _ = best_realization(theta_w, theta_w, theta_bar, config.scheme, config.cost,
                                        config.profit, config.gamma_grid, config.tie_break)
        else:
            gamma, _ = social_optimum_oracle(theta_w, config.profit, config.cost,
                                             config.gamma_grid)
        pay = compute_payment(config.scheme, theta_bar, gamma, theta_w, config.profit,
                              config.cost, config.gamma_grid)
        u_w = pay - effort_cost(config.cost, theta_w, gamma)
        v = profit(config.profit, gamma) - pay
        base = {"thetas": list(thetas), "winner_id": winner_id, "theta_bar": theta_bar,
                "gamma": gamma, "payment": pay}
        agent_bad = dict(base, agent_id=winner_id, utility=u_w) if u_w < -IR_TOL else None
        principal_bad = dict(base, principal_utility=v) if v < -IR_TOL else None
        yield 1, agent_bad, principal_bad


def check_individual_rationality(config: ScenarioConfig,
                                 profiles: Optional[Iterable[Sequence[float]]] = None,
                                 realization: str = "agent") -> VerificationReport:
    """Every agent utility must be >= -1e-12 under truthful play.

    ``realization="agent"`` lets the winner pick gamma itself; ``"required"``
    pins gamma to the social optimum the principal wants, which is how the
    report-only and realization-only payments break participation. Principal
    utility V >= 0 is checked too but listed under ``details`` only: it does
    not affect ``passed``.
    """
    if realization not in ("agent", "required"):
        raise ValueError(f"unknown realization mode {realization!r}")
    if profiles is None:
        profiles = grid_profiles(config.theta_grid, config.n_agents)
    report = VerificationReport("IR", grids_used=_grids(config), tolerance=IR_TOL,
                                details=dict(_setting(config), realization=realization))
    principal = []
    for cost, agent_bad, principal_bad in _ir_units(config, profiles, realization):
        report.checked += cost
        if agent_bad:
            report.counterexamples.append(agent_bad)
        if principal_bad:
            principal.append(principal_bad)
    report.details["principal_ir_passed"] = not principal
    report.details["principal_violations"] = principal
    report.details["principal_note"] = "principal IR is reported but not required to pass"
    return report


# -- social optimality -------------------------------------------------------

def seeded_scenarios(config: ScenarioConfig, seeds: Optional[Sequence[int]] = None
                     ) -> Iterator[Scenario]:
    for s in (config.seeds if seeds is None else seeds):
        yield generate_scenario(config, s)


def profile_scenarios(config: ScenarioConfig, profiles: Iterable[Sequence[float]]
                      ) -> Iterator[Scenario]:
    for thetas in profiles:
        yield Scenario.truthful(thetas, cost=config.cost, profit=config.profit,
                                scheme=config.scheme, theta_grid=config.theta_grid,
                                gamma_grid=config.gamma_grid, tie_break=config.tie_break)


def _so_units(scenarios: Iterable[Scenario]):
    for sc in scenarios:
        out = run_game(sc)
        eff = efficient_agent_oracle(sc.thetas, sc.profit, sc.cost, sc.gamma_grid)
        gamma_star, pi_star = social_optimum_oracle(sc.thetas[eff - 1], sc.profit, sc.cost,
                                                    sc.gamma_grid)
        gap = pi_star - out.social_welfare
        witness = None
        if abs(gap) > TOL:
            witness = {"seed": sc.seed, "thetas": list(sc.thetas), "winner_id": out.winner_id,
                       "efficient_id": eff, "gamma_realized": out.gamma_realized,
                       "gamma_star": gamma_star, "social_welfare": out.social_welfare,
                       "pi_star": pi_star, "gap": gap}
        yield 1, witness, gap


def check_social_optimality(config: ScenarioConfig,
                            scenarios: Optional[Iterable[Scenario]] = None
                            ) -> VerificationReport:
    """Realized welfare must match the oracle optimum of the efficient agent.

    Defaults to one generated scenario per configured seed.
    """
    if scenarios is None:
        scenarios = seeded_scenarios(config)
    report = VerificationReport("SO", grids_used=_grids(config), tolerance=TOL,
                                details=_setting(config))
    max_gap = 0.0
    for cost, witness, gap in _so_units(scenarios):
        report.checked += cost
        max_gap = max(max_gap, gap)
        if witness:
            report.counterexamples.append(witness)
    report.details["max_gap"] = max_gap
    return report


def check_selection_efficiency(config: ScenarioConfig,
                               scenarios: Optional[Iterable[Scenario]] = None
                               ) -> VerificationReport:
    """The lowest truthful report must belong to the welfare-maximizing agent."""
    if scenarios is None:
        scenarios = seeded_scenarios(config)
    report = VerificationReport("SelectionEfficiency", grids_used=_grids(config),
                                tolerance=TOL, details=_setting(config))
    for sc in scenarios:
        report.checked += 1
        winner, _ = select_winner([Bid(a.id, a.true_theta) for a in sc.agents])
        eff = efficient_agent_oracle(sc.thetas, sc.profit, sc.cost, sc.gamma_grid)
        if winner != eff:
            report.counterexamples.append({"seed": sc.seed, "thetas": list(sc.thetas),
                                           "winner_id": winner, "efficient_id": eff})
    return report


def check_winner_utility_constancy(config: ScenarioConfig,
                                   scenarios: Optional[Iterable[Scenario]] = None
                                   ) -> VerificationReport:
    """Under truthful play, every feasible gamma must give the winner theta_bar - theta_w.

    Only meaningful for the second-price linear payment with linear cost.
    """
    if scenarios is None:
        scenarios = seeded_scenarios(config)
    report = VerificationReport("WinnerUtilityConstancy", grids_used=_grids(config),
                                tolerance=CONSTANCY_TOL, details=_setting(config))
    worst = 0.0
    for sc in scenarios:
        report.checked += 1
        winner, theta_bar = select_winner([Bid(a.id, a.true_theta) for a in sc.agents])
        theta_w = sc.thetas[winner - 1]
        table = realization_utilities(theta_w, theta_w, theta_bar, sc.scheme, sc.cost,
                                      sc.profit, sc.gamma_grid)
        dev = max(abs(u - (theta_bar - theta_w)) for _, u in table)
        worst = max(worst, dev)
        if dev > CONSTANCY_TOL:
            report.counterexamples.append({"seed": sc.seed, "thetas": list(sc.thetas),
                                           "winner_id": winner, "max_deviation": dev})
    report.details["max_deviation"] = worst
    return report


# -- payment property --------------------------------------------------------

def check_payment_property_report(config: ScenarioConfig) -> VerificationReport:
    """Payment-property check wrapped as a VerificationReport."""
    report = VerificationReport("PaymentProperty", grids_used=_grids(config), tolerance=TOL,
                                details=_setting(config))
    for evaluations, witness in iter_payment_property_violations(
            config.scheme, config.cost, config.theta_grid, config.gamma_grid, config.profit):
        report.checked = evaluations
        if witness:
            report.counterexamples.append(witness)
    report.details["condition1_holds"] = not any(
        w["condition"] == 1 for w in report.counterexamples)
    report.details["condition2_holds"] = not any(
        w["condition"] == 2 for w in report.counterexamples)
    return report


# -- counterexample search ---------------------------------------------------

def _units_for(config: ScenarioConfig, prop: str, threshold: float):
    """Yield ``(cost, witness_or_None)``, lexicographic over the theta grid."""
    profiles = grid_profiles(config.theta_grid, config.n_agents)
    if prop == "IC":
        for cost, found in _ic_units(config, profiles):
            best = max(found, key=lambda w: w["gain"], default=None)
            yield cost, best if best and best["gain"] > threshold else None
    elif prop == "IR":
        for cost, agent_bad, _ in _ir_units(config, profiles, "agent"):
            yield cost, agent_bad if agent_bad and -agent_bad["utility"] > threshold else None
    elif prop == "SO":
        for cost, witness, gap in _so_units(profile_scenarios(config, profiles)):
            yield cost, witness if witness and abs(gap) > threshold else None
    elif prop == "PaymentProperty":
        used = 0
        for evaluations, witness in iter_payment_property_violations(
                config.scheme, config.cost, config.theta_grid, config.gamma_grid,
                config.profit):
            yield evaluations - used, witness
            used = evaluations
    else:
        raise ValueError(f"unknown property {prop!r}")


def search_counterexample(config: ScenarioConfig, prop: str, budget: Optional[int] = None,
                          threshold: Optional[float] = None) -> CounterexampleResult:
    """First witness violating ``prop`` in lexicographic grid order.

    For IC the witness is the most profitable misreport of the first agent
    that has one. ``threshold`` raises the bar a violation must clear
    (default: the property's own tolerance). The budget is charged in whole
    units (one deviation scan, game, or gamma evaluation); running out before
    the grid is covered gives ``"inconclusive"``, never a pass.
    """
    budget = config.budget if budget is None else budget
    if threshold is None:
        threshold = IR_TOL if prop == "IR" else TOL
    used = 0
    units = _units_for(config, prop, threshold)
    for cost, witness in units:
        used += cost
        if witness is not None:
            return CounterexampleResult(prop, "found", witness, used, budget)
        if used >= budget:
            if next(units, None) is None:
                return CounterexampleResult(prop, "none", None, used, budget)
            return CounterexampleResult(prop, "inconclusive", None, used, budget)
    return CounterexampleResult(prop, "none", None, used, budget)
