"""Agent behaviour: which realizations are feasible, which one the winner picks,
and which report maximizes an agent's utility against fixed opponent bids."""

from __future__ import annotations

import enum
import functools
from typing import Optional, Sequence

from .core import (TOL, AgentProfile, Bid, CostModel, Grid, ProfitModel, effort_cost,
                   profit)
from .mechanism import PaymentScheme, compute_payment, select_winner


class TieBreak(str, enum.Enum):
    """How a winner chooses among utility-maximizing realizations."""

    PRO_SOCIAL = "ProSocial"
    ADVERSARIAL = "Adversarial"
    MAX_ALIGNMENT = "MaxAlignment"
    LAZY = "Lazy"


def feasible_realizations(true_theta: float, reported_theta: float, gamma_grid: Grid) -> list[float]:
    """Grid points in ``[0, min(true_theta, reported_theta)]``, both ends included."""
    if true_theta < 0 or reported_theta < 0:
        raise ValueError("misalignments must be nonnegative")
    cap = min(float(true_theta), float(reported_theta))
    pts = [g for g in gamma_grid.points() if 0.0 <= g < cap - TOL]
    if not pts or pts[0] != 0.0:
        pts.insert(0, 0.0)
    if cap > 0.0:
        pts.append(cap)
    return pts


def realization_utilities(true_theta, reported_theta, theta_bar, scheme, cost_model,
                          profit_model, gamma_grid) -> list[tuple[float, float]]:
    """``(gamma, winner utility)`` for every feasible gamma."""
    out = []
    for g in feasible_realizations(true_theta, reported_theta, gamma_grid):
        p = compute_payment(scheme, theta_bar, g, reported_theta, profit_model, cost_model,
                            gamma_grid)
        out.append((g, p - effort_cost(cost_model, true_theta, g)))
    return out


@functools.lru_cache(maxsize=200_000)
def best_realization(true_theta: float, reported_theta: float, theta_bar: float,
                     scheme: PaymentScheme, cost_model: CostModel, profit_model: ProfitModel,
                     gamma_grid: Grid,
                     tie_break: TieBreak = TieBreak.PRO_SOCIAL) -> tuple[float, float]:
    """The winner's utility-maximizing gamma and the utility it yields.

    Gammas within TOL of the best utility count as tied; ``tie_break`` picks
    among them.
    """
    table = realization_utilities(true_theta, reported_theta, theta_bar, scheme, cost_model,
                                  profit_model, gamma_grid)
    top = max(u for _, u in table)
    tied = [(g, u) for g, u in table if u >= top - TOL]
    tie_break = TieBreak(tie_break)
    if tie_break is TieBreak.MAX_ALIGNMENT:
        return tied[0]
    if tie_break is TieBreak.LAZY:
        return tied[-1]

    def welfare(g):
        return profit(profit_model, g) - effort_cost(cost_model, true_theta, g)

    if tie_break is TieBreak.PRO_SOCIAL:
        # max welfare, smallest gamma on exact ties
        return max(tied, key=lambda gu: (welfare(gu[0]), -gu[0]))
    return min(tied, key=lambda gu: (welfare(gu[0]), gu[0]))


def report_utility(true_theta: float, reported_theta: float, agent_id: int,
                   other_bids: Sequence[Bid], scheme, cost_model, profit_model, gamma_grid,
                   tie_break=TieBreak.PRO_SOCIAL) -> tuple[float, bool, Optional[float]]:
    """Utility of submitting ``reported_theta`` against fixed opponents.

    Returns ``(utility, won, gamma)``; losers get 0 and no gamma.
    """
    bids = [Bid(agent_id, reported_theta), *other_bids]
    winner, theta_bar = select_winner(bids)
    if winner != agent_id:
        return 0.0, False, None
    g, u = best_realization(true_theta, reported_theta, theta_bar, scheme, cost_model,
                            profit_model, gamma_grid, TieBreak(tie_break))
    return u, True, g


def best_response_bid(profile: AgentProfile, other_bids: Sequence[Bid], scheme: PaymentScheme,
                      cost_model: CostModel, profit_model: ProfitModel, theta_grid: Grid,
                      gamma_grid: Grid,
                      tie_break=TieBreak.PRO_SOCIAL) -> tuple[float, float]:
    """Scan every grid report (plus the truthful one) for the best utility.

    Reports above the true theta are allowed; gamma stays capped at
    ``min(theta, report)``. Ties go to the truthful report when it is among
    the maximizers, otherwise to the lowest report.
    """
    theta = profile.true_theta
    candidates = sorted(set(theta_grid.points()) | {theta})
    scored = [(r, report_utility(theta, r, profile.id, other_bids, scheme, cost_model,
                                 profit_model, gamma_grid, tie_break)[0])
              for r in candidates]
    top = max(u for _, u in scored)
    tied = [(r, u) for r, u in scored if u >= top - TOL]
    for r, u in tied:
        if r == theta:
            return r, u
    return tied[0]
