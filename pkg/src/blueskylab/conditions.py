"""Certified verification of the degree-trichotomy hypotheses.

Everything here revolves around the criterion function

    s(theta) = h'(theta) - alpha'(theta) / (gamma * alpha(theta)),

the splitting-profile log-derivative correction to the angular shift.
The three regimes are certified through it:

    degree m = 0   : sup |s| < 1          -> a single stable periodic orbit,
    degree |m| = 1 : 1 + m*s > 0 on the circle -> invariant torus / Klein bottle,
    degree |m| >= 2: inf |m + s| > 1      -> expanding circle factor (solenoid).

Certification is a uniform grid evaluation inflated by a global Lipschitz
bound of the criterion, computed from the Fourier coefficient sums of the
derivative series and the certified positive lower bound of alpha.  The
grid doubles while the margin is smaller than the inflation; exact
trigonometric polynomials make this fully rigorous without interval
arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .fourier import TWO_PI
from .model import ValidatedModel

__all__ = [
    "CaseMismatch",
    "CaseTag",
    "ConditionReport",
    "Inconclusive",
    "case_for_degree",
    "certified_angular_expansion",
    "check_case",
    "criterion_function",
    "criterion_lipschitz",
]

DEFAULT_GRID = 4096
GRID_CAP = 2 ** 20


class CaseTag(Enum):
    BLUE_SKY = "BlueSky"
    TORUS_OR_KLEIN = "TorusOrKlein"
    SOLENOID = "Solenoid"


class CaseMismatch(ValueError):
    """The requested case tag is inconsistent with the model's degree m."""


class Inconclusive(RuntimeError):
    """The grid cap was reached with the margin still inside the inflation.

    Distinct from a false verdict: no violating angle was found, but the
    certified margin never became positive.  Carries the last grid data.
    """

    def __init__(self, case_tag, raw_margin, inflation, grid_size):
        self.case_tag = case_tag
        self.raw_margin = raw_margin
        self.inflation = inflation
        self.grid_size = grid_size
        super().__init__(
            f"{case_tag.value}: margin {raw_margin:.3e} within inflation "
            f"{inflation:.3e} at grid cap {grid_size}"
        )


@dataclass
class ConditionReport:
    """Certified min/max of a case criterion over the circle.

    ``margin`` is the certified distance from the threshold, the grid
    margin minus the Lipschitz inflation; a true verdict always has
    margin > 0, a false verdict has a grid angle violating the strict
    inequality outright.
    """

    case_tag: CaseTag
    criterion_min: float
    criterion_max: float
    margin: float
    verdict: bool
    grid_size: int
    lipschitz_bound: float

    def to_dict(self) -> dict:
        return {
            "case_tag": self.case_tag.value,
            "criterion_min": self.criterion_min,
            "criterion_max": self.criterion_max,
            "margin": self.margin,
            "verdict": self.verdict,
            "grid_size": self.grid_size,
            "lipschitz_bound": self.lipschitz_bound,
        }


def case_for_degree(m: int) -> CaseTag:
    if m == 0:
        return CaseTag.BLUE_SKY
    if abs(m) == 1:
        return CaseTag.TORUS_OR_KLEIN
    return CaseTag.SOLENOID


def criterion_function(theta, model: ValidatedModel):
    """s(theta) = h'(theta) - alpha'(theta) / (gamma * alpha(theta)).

    Exact Fourier derivatives; alpha > 0 is guaranteed by validation.
    """
    cfg = model.cfg
    return cfg.h.deriv().eval(theta) - cfg.alpha.deriv().eval(theta) / (
        model.gamma * cfg.alpha.eval(theta)
    )


def criterion_lipschitz(model: ValidatedModel) -> float:
    """Global Lipschitz bound for s: sup|h''| + (sup|a''|/min a + (sup|a'|/min a)^2)/gamma."""
    cfg = model.cfg
    a_lo = model.alpha_min
    a1 = cfg.alpha.deriv_sup_bound()
    a2 = cfg.alpha.deriv().deriv_sup_bound()
    h2 = cfg.h.deriv().deriv_sup_bound()
    return h2 + (a2 / a_lo + (a1 / a_lo) ** 2) / model.gamma


def _case_values(case_tag: CaseTag, s: np.ndarray, m: int):
    """Per-case criterion values and the raw (uninflated) grid margin."""
    if case_tag is CaseTag.BLUE_SKY:
        crit = s
        raw_margin = 1.0 - max(abs(float(np.min(s))), abs(float(np.max(s))))
    elif case_tag is CaseTag.TORUS_OR_KLEIN:
        crit = 1.0 + m * s
        raw_margin = float(np.min(crit))
    else:
        crit = np.abs(m + s)
        raw_margin = float(np.min(crit)) - 1.0
    return crit, raw_margin


def check_case(case_tag: CaseTag, model: ValidatedModel,
               grid_size: int = DEFAULT_GRID, cap: int = GRID_CAP) -> ConditionReport:
    """Certify the case inequality for the model's criterion function.

    Evaluates the criterion on a uniform grid and inflates by
    lipschitz * (half spacing).  A grid angle violating the strict
    inequality yields verdict False immediately; a margin exceeding the
    inflation yields verdict True; otherwise the grid doubles up to the
    cap, after which Inconclusive is raised (equality with the threshold
    within the inflation is never turned into a verdict).
    """
    case_tag = CaseTag(case_tag)
    m = model.m
    if case_tag is not case_for_degree(m):
        raise CaseMismatch(f"{case_tag.value} is inconsistent with degree m={m}")

    lip_s = criterion_lipschitz(model)
    lip = abs(m) * lip_s if case_tag is CaseTag.TORUS_OR_KLEIN else lip_s

    grid = max(8, int(grid_size))
    while True:
        theta = np.arange(grid) * (TWO_PI / grid)
        crit, raw_margin = _case_values(case_tag, criterion_function(theta, model), m)
        inflation = lip * np.pi / grid
        cmin, cmax = float(np.min(crit)), float(np.max(crit))
        if raw_margin < 0.0:
            return ConditionReport(case_tag, cmin, cmax, raw_margin, False, grid, lip)
        if raw_margin > inflation:
            return ConditionReport(case_tag, cmin, cmax, raw_margin - inflation, True, grid, lip)
        if grid >= cap:
            raise Inconclusive(case_tag, raw_margin, inflation, grid)
        grid *= 2


def certified_angular_expansion(model: ValidatedModel,
                                grid_size: int = DEFAULT_GRID,
                                cap: int = GRID_CAP) -> float:
    """Certified lower bound of inf |m + s(theta)| over the circle.

    The angular expansion rate of the limit return map; > 1 exactly when
    the solenoid condition holds.  Raises Inconclusive only if the bound
    cannot be separated from the grid values at the cap.
    """
    lip = criterion_lipschitz(model)
    grid = max(8, int(grid_size))
    while True:
        theta = np.arange(grid) * (TWO_PI / grid)
        vals = np.abs(model.m + criterion_function(theta, model))
        inflation = lip * np.pi / grid
        lower = float(np.min(vals)) - inflation
        if lower > 0.0 or grid >= cap:
            return lower
        grid *= 2
