"""Domain types, misalignment metrics and the cost/profit families.

Priorities are dimensionless real weights. After reduction to scalar
misalignments every quantity in the mechanism is a float: ``theta`` is the
agent's initial misalignment with the principal, ``gamma`` the realized one.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

# Absolute tolerance for float comparisons throughout the package.
TOL = 1e-9


class MechanismError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(MechanismError, ValueError):
    pass


class DimensionError(ValidationError):
    pass


class FeasibilityError(ValidationError):
    """A realization violates gamma <= theta."""


class ConfigurationError(MechanismError):
    pass


def _check_real(name: str, value: float, *, nonneg: bool = False) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value!r}")
    if nonneg and value < 0:
        raise ValidationError(f"{name} must be >= 0, got {value!r}")
    return value


@dataclass(frozen=True)
class PriorityVector:
    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(_check_real("priority entry", v) for v in self.values)
        if not vals:
            raise DimensionError("priority vector needs at least one task")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)


class Metric(str, enum.Enum):
    L1 = "L1"
    L2 = "L2"
    LINF = "Linf"


def misalignment(metric: Metric, a: PriorityVector | Sequence[float],
                 b: PriorityVector | Sequence[float]) -> float:
    """Norm of ``a - b`` under the chosen metric."""
    if not isinstance(a, PriorityVector):
        a = PriorityVector(tuple(a))
    if not isinstance(b, PriorityVector):
        b = PriorityVector(tuple(b))
    if len(a) != len(b):
        raise DimensionError(f"length mismatch: {len(a)} vs {len(b)}")
    diff = [x - y for x, y in zip(a.values, b.values)]
    metric = Metric(metric)
    if metric is Metric.L1:
        return math.fsum(abs(d) for d in diff)
    if metric is Metric.L2:
        return math.hypot(*diff)
    return max(abs(d) for d in diff)


class CostFamily(str, enum.Enum):
    LINEAR = "Linear"
    QUADRATIC = "Quadratic"
    POWER = "Power"


@dataclass(frozen=True)
class CostModel:
    """Effort cost h(theta, gamma) of moving from theta down to gamma."""

    family: CostFamily = CostFamily.LINEAR
    power: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "family", CostFamily(self.family))
        if self.family is CostFamily.LINEAR:
            object.__setattr__(self, "power", 1.0)
        elif self.family is CostFamily.QUADRATIC:
            object.__setattr__(self, "power", 2.0)
        elif not (math.isfinite(self.power) and self.power >= 1):
            raise ValidationError(f"Power cost needs p >= 1, got {self.power!r}")

    @classmethod
    def linear(cls) -> "CostModel":
        return cls(CostFamily.LINEAR)

    @classmethod
    def quadratic(cls) -> "CostModel":
        return cls(CostFamily.QUADRATIC)

    def __str__(self) -> str:
        if self.family is CostFamily.POWER:
            return f"Power({self.power:g})"
        return self.family.value


def effort_cost(model: CostModel, theta: float, gamma: float) -> float:
    theta = _check_real("theta", theta, nonneg=True)
    gamma = _check_real("gamma", gamma, nonneg=True)
    if gamma > theta + TOL:
        raise FeasibilityError(f"gamma={gamma!r} exceeds theta={theta!r}")
    shift = max(theta - gamma, 0.0)
    if model.family is CostFamily.LINEAR:
        return shift
    if model.family is CostFamily.QUADRATIC:
        return shift * shift
    return shift ** model.power


class ProfitFamily(str, enum.Enum):
    LINEAR_DECREASING = "LinearDecreasing"
    QUADRATIC_DECREASING = "QuadraticDecreasing"


@dataclass(frozen=True)
class ProfitModel:
    """Principal's profit S(gamma).

    ``LinearDecreasing``: s0 - slope * gamma.
    ``QuadraticDecreasing``: s0 - slope * gamma**2.
    """

    family: ProfitFamily = ProfitFamily.QUADRATIC_DECREASING
    s0: float = 4.0
    slope: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "family", ProfitFamily(self.family))
        s0 = _check_real("s0", self.s0, nonneg=True)
        slope = _check_real("profit slope", self.slope)
        if slope <= 0:
            raise ValidationError(f"profit slope must be > 0, got {slope!r}")
        object.__setattr__(self, "s0", s0)
        object.__setattr__(self, "slope", slope)

    def __str__(self) -> str:
        return f"{self.family.value}({self.s0:g},{self.slope:g})"


def profit(model: ProfitModel, gamma: float) -> float:
    # not clamped at zero: negative profit is reported as-is
    gamma = _check_real("gamma", gamma, nonneg=True)
    if model.family is ProfitFamily.LINEAR_DECREASING:
        return model.s0 - model.slope * gamma
    return model.s0 - model.slope * gamma * gamma


@functools.lru_cache(maxsize=256)
def _grid_points(lo: float, hi: float, step: float) -> tuple[float, ...]:
    n = int(math.floor((hi - lo) / step + TOL))
    pts = [lo + k * step for k in range(n + 1)]
    if hi - pts[-1] > TOL:
        pts.append(hi)
    else:
        pts[-1] = hi
    return tuple(pts)


@dataclass(frozen=True)
class Grid:
    """Closed interval [lo, hi] sampled every ``step``; ``hi`` is always a point."""

    lo: float
    hi: float
    step: float

    def __post_init__(self):
        lo = _check_real("grid lo", self.lo)
        hi = _check_real("grid hi", self.hi)
        step = _check_real("grid step", self.step)
        if step <= 0:
            raise ValidationError(f"grid step must be > 0, got {step!r}")
        if lo > hi:
            raise ValidationError(f"grid lo={lo!r} exceeds hi={hi!r}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "step", step)

    def points(self) -> tuple[float, ...]:
        return _grid_points(self.lo, self.hi, self.step)

    def __len__(self) -> int:
        return len(self.points())

    def describe(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "step": self.step, "size": len(self)}


class PolicyKind(str, enum.Enum):
    TRUTHFUL = "Truthful"
    STRATEGIC = "Strategic"
    FIXED = "Fixed"


@dataclass(frozen=True)
class AgentProfile:
    """One candidate executor.

    ``fixed_report`` and ``gamma_rule`` only apply to the ``Fixed`` policy;
    ``gamma_rule`` names a tie-break policy overriding the scenario default.
    """

    id: int
    true_theta: float
    policy: PolicyKind = PolicyKind.TRUTHFUL
    fixed_report: Optional[float] = None
    gamma_rule: Optional[str] = None
    true_priority: Optional[PriorityVector] = field(default=None, compare=False)

    def __post_init__(self):
        if int(self.id) < 1:
            raise ValidationError(f"agent ids start at 1, got {self.id!r}")
        object.__setattr__(self, "true_theta",
                           _check_real("true_theta", self.true_theta, nonneg=True))
        object.__setattr__(self, "policy", PolicyKind(self.policy))
        if self.policy is PolicyKind.FIXED:
            if self.fixed_report is None:
                raise ValidationError("Fixed policy needs a fixed_report")
            object.__setattr__(self, "fixed_report",
                               _check_real("fixed_report", self.fixed_report, nonneg=True))

    @classmethod
    def from_priority(cls, id: int, principal: PriorityVector, priority: PriorityVector,
                      metric: Metric, **kwargs) -> "AgentProfile":
        theta = misalignment(metric, principal, priority)
        return cls(id=id, true_theta=theta, true_priority=priority, **kwargs)


@dataclass(frozen=True)
class Bid:
    agent_id: int
    reported_theta: float

    def __post_init__(self):
        object.__setattr__(self, "reported_theta",
                           _check_real("reported_theta", self.reported_theta, nonneg=True))


@dataclass(frozen=True)
class Realization:
    agent_id: int
    gamma: float

    def __post_init__(self):
        object.__setattr__(self, "gamma", _check_real("gamma", self.gamma, nonneg=True))
