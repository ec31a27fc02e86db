"""Brute-force welfare oracles.

These enumerate the gamma grid directly and never go through payments or
agent decision logic, so they can serve as ground truth for both.
"""

from __future__ import annotations

import functools
from typing import Sequence

from .core import TOL, CostModel, Grid, ProfitModel, effort_cost, profit


def _candidates(theta: float, grid: Grid) -> list[float]:
    # grid points strictly below theta, plus 0 and theta itself
    pts = [g for g in grid.points() if 0.0 <= g < theta - TOL]
    if not pts or pts[0] != 0.0:
        pts.insert(0, 0.0)
    if theta > 0.0:
        pts.append(theta)
    return pts


@functools.lru_cache(maxsize=65536)
def social_optimum_oracle(theta: float, profit_model: ProfitModel, cost_model: CostModel,
                          gamma_grid: Grid) -> tuple[float, float]:
    """Return ``(gamma_star, pi_star)`` maximizing S(gamma) - h(theta, gamma).

    Ties go to the smallest gamma.
    """
    best_gamma, best_pi = 0.0, float("-inf")
    for g in _candidates(float(theta), gamma_grid):
        pi = profit(profit_model, g) - effort_cost(cost_model, theta, g)
        if pi > best_pi:
            best_gamma, best_pi = g, pi
    return best_gamma, best_pi


def efficient_agent_oracle(thetas: Sequence[float], profit_model: ProfitModel,
                           cost_model: CostModel, gamma_grid: Grid) -> int:
    """1-based id of the agent whose optimal welfare is highest (ties: lowest id)."""
    if len(thetas) < 2:
        raise ValueError("need at least two agents")
    best_id, best_pi = 0, float("-inf")
    for i, theta in enumerate(thetas, start=1):
        _, pi = social_optimum_oracle(float(theta), profit_model, cost_model, gamma_grid)
        if pi > best_pi + TOL:
            best_id, best_pi = i, pi
    return best_id
