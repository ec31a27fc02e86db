"""Principal side: winner selection, payment schemes, and the payment-property check."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .core import (TOL, Bid, ConfigurationError, CostModel, Grid, MechanismError,
                   ProfitModel, Realization, ValidationError, effort_cost, profit)
from .oracles import social_optimum_oracle


class ArityError(MechanismError):
    """Second-lowest bid is undefined with fewer than two bidders."""


class UnsupportedSchemeError(MechanismError):
    pass


class SchemeKind(str, enum.Enum):
    SECOND_PRICE_LINEAR = "SecondPriceLinear"
    REPORT_ONLY = "ReportOnly"
    REALIZATION_ONLY = "RealizationOnly"
    CLAIMED_EFFORT = "ClaimedEffort"
    VCG_STYLE = "VCGStyle"


@dataclass(frozen=True)
class PaymentScheme:
    """Winner payment rule.

    ``ReportOnly`` pays ``intercept + slope * reported_theta``;
    ``RealizationOnly`` pays ``intercept + slope * gamma``. The other kinds
    ignore the coefficients.
    """

    kind: SchemeKind = SchemeKind.SECOND_PRICE_LINEAR
    intercept: float = 0.0
    slope: float = 0.0
    enforce_realization_cap: bool = True

    def __post_init__(self):
        object.__setattr__(self, "kind", SchemeKind(self.kind))

    @classmethod
    def second_price_linear(cls, **kw) -> "PaymentScheme":
        return cls(SchemeKind.SECOND_PRICE_LINEAR, **kw)

    @classmethod
    def report_only(cls, intercept: float, slope: float, **kw) -> "PaymentScheme":
        return cls(SchemeKind.REPORT_ONLY, intercept, slope, **kw)

    @classmethod
    def realization_only(cls, intercept: float, slope: float, **kw) -> "PaymentScheme":
        return cls(SchemeKind.REALIZATION_ONLY, intercept, slope, **kw)

    @classmethod
    def claimed_effort(cls, **kw) -> "PaymentScheme":
        return cls(SchemeKind.CLAIMED_EFFORT, **kw)

    @classmethod
    def vcg_style(cls, **kw) -> "PaymentScheme":
        return cls(SchemeKind.VCG_STYLE, **kw)

    @property
    def reads_report(self) -> bool:
        return self.kind in (SchemeKind.REPORT_ONLY, SchemeKind.CLAIMED_EFFORT,
                             SchemeKind.VCG_STYLE)

    def __str__(self) -> str:
        if self.kind in (SchemeKind.REPORT_ONLY, SchemeKind.REALIZATION_ONLY):
            return f"{self.kind.value}({self.intercept:g},{self.slope:g})"
        return self.kind.value


def select_winner(bids: Sequence[Bid]) -> tuple[int, float]:
    """Return ``(winner_id, theta_bar)``.

    The winner is the lowest reported misalignment, ties to the lowest id;
    ``theta_bar`` is the lowest report among everyone else.
    """
    if len(bids) < 2:
        raise ArityError(f"need at least 2 bids, got {len(bids)}")
    ids = [b.agent_id for b in bids]
    if len(set(ids)) != len(ids):
        raise ValidationError(f"duplicate agent ids in {ids}")
    ranked = sorted(bids, key=lambda b: (b.reported_theta, b.agent_id))
    return ranked[0].agent_id, ranked[1].reported_theta


def compute_payment(scheme: PaymentScheme, theta_bar: float, realization: Realization | float,
                    reported_theta: float, profit_model: Optional[ProfitModel] = None,
                    cost_model: Optional[CostModel] = None,
                    gamma_grid: Optional[Grid] = None) -> float:
    """Payment to the winner. Losers are never paid, so there is no loser path.

    ``VCGStyle`` needs the profit and cost models plus the gamma grid on which
    the optimum welfare for the reported theta is computed.
    """
    gamma = realization.gamma if isinstance(realization, Realization) else float(realization)
    if scheme.enforce_realization_cap and gamma > reported_theta + TOL:
        return 0.0
    kind = scheme.kind
    if kind is SchemeKind.SECOND_PRICE_LINEAR:
        return theta_bar - gamma
    if kind is SchemeKind.REPORT_ONLY:
        return scheme.intercept + scheme.slope * reported_theta
    if kind is SchemeKind.REALIZATION_ONLY:
        return scheme.intercept + scheme.slope * gamma
    if kind is SchemeKind.CLAIMED_EFFORT:
        if cost_model is None:
            raise ConfigurationError("ClaimedEffort needs a cost model")
        return effort_cost(cost_model, reported_theta, gamma)
    if profit_model is None or cost_model is None or gamma_grid is None:
        raise ConfigurationError("VCGStyle needs profit model, cost model and gamma grid")
    _, pi_star = social_optimum_oracle(float(reported_theta), profit_model, cost_model, gamma_grid)
    return profit(profit_model, gamma) - pi_star


@dataclass
class PaymentPropertyReport:
    """Outcome of checking the two payment conditions on a grid.

    Condition 1: a winner with theta >= theta_bar never gets P > h.
    Condition 2: a winner with theta < theta_bar has some gamma with P > h.
    Condition-2 witnesses carry ``gamma=None`` because no grid gamma worked.
    """

    scheme: str
    cost: str
    condition1_holds: bool
    condition2_holds: bool
    violations: list[dict] = field(default_factory=list)
    grids_used: dict = field(default_factory=dict)
    evaluations: int = 0

    @property
    def passed(self) -> bool:
        return self.condition1_holds and self.condition2_holds


def iter_payment_property_violations(scheme: PaymentScheme, cost_model: CostModel,
                                     theta_grid: Grid, gamma_grid: Grid,
                                     profit_model: Optional[ProfitModel] = None):
    """Yield ``(evaluations_so_far, witness_or_None)`` in (theta_w, theta_bar) order."""
    from .agents import feasible_realizations

    if scheme.kind in (SchemeKind.REPORT_ONLY, SchemeKind.CLAIMED_EFFORT):
        raise UnsupportedSchemeError(
            f"{scheme.kind.value} reads the winner's own report; the property is "
            "only defined for payments of (theta_bar, gamma)")
    if scheme.kind is SchemeKind.VCG_STYLE and profit_model is None:
        raise ConfigurationError("VCGStyle needs a profit model")
    evaluations = 0
    thetas = theta_grid.points()
    for theta_w, theta_bar in itertools.product(thetas, thetas):
        # the winner is taken as truthful, so the report equals theta_w
        found = False
        for g in feasible_realizations(theta_w, theta_w, gamma_grid):
            evaluations += 1
            p = compute_payment(scheme, theta_bar, g, theta_w, profit_model, cost_model,
                                gamma_grid)
            h = effort_cost(cost_model, theta_w, g)
            if theta_w >= theta_bar and p > h + TOL:
                yield evaluations, {"condition": 1, "theta_w": theta_w, "theta_bar": theta_bar,
                                    "gamma": g, "payment": p, "cost": h}
            if theta_w < theta_bar and p > h + TOL:
                found = True
        if theta_w < theta_bar and not found:
            yield evaluations, {"condition": 2, "theta_w": theta_w, "theta_bar": theta_bar,
                                "gamma": None}
        yield evaluations, None


def check_payment_property(scheme: PaymentScheme, cost_model: CostModel, theta_grid: Grid,
                           gamma_grid: Grid,
                           profit_model: Optional[ProfitModel] = None) -> PaymentPropertyReport:
    violations = []
    evaluations = 0
    for evaluations, witness in iter_payment_property_violations(
            scheme, cost_model, theta_grid, gamma_grid, profit_model):
        if witness is not None:
            violations.append(witness)
    return PaymentPropertyReport(
        scheme=str(scheme),
        cost=str(cost_model),
        condition1_holds=not any(v["condition"] == 1 for v in violations),
        condition2_holds=not any(v["condition"] == 2 for v in violations),
        violations=violations,
        grids_used={"theta": theta_grid.describe(), "gamma": gamma_grid.describe()},
        evaluations=evaluations,
    )
