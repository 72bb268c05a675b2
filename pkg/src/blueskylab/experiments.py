"""Parameter sweeps and scaling-law measurements.

The signature observable of the bifurcation is the blow-up of the return
time: the passage time through the linear-flow neighborhood grows like
(1/gamma) ln(1/mu) as the splitting parameter mu -> 0+, while the excursion
outside stays bounded.  ``mu_sweep`` classifies the attractor along a mu
grid and records a period proxy (flight time plus a unit global transit
constant); ``fit_period_scaling`` recovers 1/gamma from its slope against
ln(1/mu).  ``threshold_study`` bisects the verdict flip of a case condition
along a one-parameter family of profiles.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .analysis import AttractorLabel, ClassificationRecord, classify_attractor
from .conditions import CaseTag, ConditionReport, Inconclusive, check_case
from .model import EscapedTube, ValidatedModel, reduce_angle

__all__ = [
    "GLOBAL_TRANSIT_TIME",
    "InsufficientData",
    "ScalingFit",
    "SweepRecord",
    "ThresholdRow",
    "ThresholdStudy",
    "fit_period_scaling",
    "geometric_mu_grid",
    "mu_sweep",
    "sweep_csv_text",
    "threshold_study",
    "write_sweep_csv",
]

GLOBAL_TRANSIT_TIME = 1.0   # bounded time of the excursion outside the linear neighborhood

CSV_HEADER = ["mu", "classification", "period_proxy", "theta_fixed", "top_lyapunov", "escaped"]


class InsufficientData(ValueError):
    """Not enough usable records for a scaling fit."""


@dataclass
class SweepRecord:
    mu: float
    classification: str
    period_proxy: float
    theta_at_fixed_point: float | None
    top_lyapunov: float | None
    escape_flag: bool
    record: ClassificationRecord | None = None


@dataclass
class ScalingFit:
    """Least-squares line of period_proxy against ln(1/mu)."""

    slope: float
    intercept: float
    r_squared: float
    mu_range: tuple[float, float]
    points: int

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "mu_min": self.mu_range[0],
            "mu_max": self.mu_range[1],
            "points": self.points,
        }


def geometric_mu_grid(mu_min: float, mu_max: float, per_decade: int = 10) -> np.ndarray:
    """Geometric mu grid, descending, ``per_decade`` points per decade."""
    if not 0.0 < mu_min < mu_max:
        raise ValueError("need 0 < mu_min < mu_max")
    decades = np.log10(mu_max / mu_min)
    count = max(2, int(round(decades * per_decade)) + 1)
    return np.geomspace(mu_max, mu_min, count)


def _orbit_mean_flight(model: ValidatedModel, mu: float, steps: int = 256,
                       transient: int = 64) -> float:
    p = model.seed_point(0.5)
    X, Y, th = p.X, p.Y, p.theta
    for _ in range(transient):
        Xb, Yb, lift, _ = model.rescaled_step(X, Y, th, mu)
        X, Y, th = float(Xb), Yb, float(reduce_angle(lift))
    total = 0.0
    for _ in range(steps):
        Xb, Yb, lift, flight = model.rescaled_step(X, Y, th, mu)
        X, Y, th = float(Xb), Yb, float(reduce_angle(lift))
        total += float(flight)
    return total / steps


def mu_sweep(model: ValidatedModel, mu_values: Sequence[float], *,
             lyapunov_iterations: int = 0) -> list[SweepRecord]:
    """Classify the attractor at each mu and record the period proxy.

    For the stable-orbit regime the proxy is the fixed point's flight time
    plus the global transit constant; otherwise the orbit-averaged flight
    time is used.  Escapes are flagged per record and never abort the
    sweep.  ``lyapunov_iterations`` > 0 adds a top-exponent estimate for
    the solenoid regime (the stable-orbit regime reports the largest
    log-multiplier instead).
    """
    records: list[SweepRecord] = []
    for mu in mu_values:
        mu = float(mu)
        try:
            rec = classify_attractor(model, mu)
            theta_fp = None
            top = None
            if rec.fixed_point is not None:
                theta_fp = rec.fixed_point.point.theta
                fp = rec.fixed_point.point
                flight = float(model.rescaled_step(fp.X, fp.Y, fp.theta, mu)[3])
                moduli = np.abs(rec.fixed_point.multipliers)
                with np.errstate(divide="ignore"):
                    top = float(np.max(np.log(moduli))) if moduli.size else None
            else:
                flight = _orbit_mean_flight(model, mu)
                if lyapunov_iterations > 0 and rec.label is AttractorLabel.SOLENOID:
                    from .analysis import lyapunov_spectrum
                    top = lyapunov_spectrum(model, mu, lyapunov_iterations,
                                            transient=min(200, lyapunov_iterations)).top
            records.append(SweepRecord(
                mu=mu,
                classification=rec.label.value,
                period_proxy=flight + GLOBAL_TRANSIT_TIME,
                theta_at_fixed_point=theta_fp,
                top_lyapunov=top,
                escape_flag=False,
                record=rec,
            ))
        except EscapedTube:
            records.append(SweepRecord(
                mu=mu, classification="Escaped", period_proxy=float("nan"),
                theta_at_fixed_point=None, top_lyapunov=None, escape_flag=True,
            ))
    return records


def fit_period_scaling(records: Sequence[SweepRecord]) -> ScalingFit:
    """Fit period_proxy = slope * ln(1/mu) + intercept over the stable-orbit records.

    Requires at least 4 non-escaped stable-orbit records spanning at least
    3 decades of mu; the slope estimates 1/gamma.
    """
    usable = [r for r in records
              if not r.escape_flag
              and r.classification == AttractorLabel.STABLE_PERIODIC_ORBIT.value]
    if len(usable) < 4:
        raise InsufficientData(f"need >= 4 stable-orbit records, have {len(usable)}")
    mus = np.array([r.mu for r in usable])
    if np.max(mus) / np.min(mus) < 1e3:
        raise InsufficientData("records span fewer than 3 decades of mu")
    x = np.log(1.0 / mus)
    y = np.array([r.period_proxy for r in usable])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0.0 else 1.0
    return ScalingFit(
        slope=float(slope), intercept=float(intercept), r_squared=r2,
        mu_range=(float(np.min(mus)), float(np.max(mus))), points=len(usable),
    )


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def sweep_csv_text(records: Sequence[SweepRecord]) -> str:
    """Deterministic CSV serialization (shortest round-trip float repr)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow([
            _format_cell(r.mu),
            r.classification,
            _format_cell(r.period_proxy),
            _format_cell(r.theta_at_fixed_point),
            _format_cell(r.top_lyapunov),
            _format_cell(r.escape_flag),
        ])
    return buf.getvalue()


def write_sweep_csv(records: Sequence[SweepRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(sweep_csv_text(records))


@dataclass
class ThresholdRow:
    a: float
    outcome: str                 # "true" | "false" | "inconclusive"
    margin: float | None
    classification: str | None


@dataclass
class ThresholdStudy:
    rows: list[ThresholdRow]
    flip: float | None           # bisection estimate of the verdict flip
    bracket: tuple[float, float] | None


def _condition_outcome(family: Callable[[float], ValidatedModel], a: float,
                       case_tag: CaseTag, grid_size: int) -> tuple[str, float | None,
                                                                   ConditionReport | None]:
    model = family(a)
    try:
        report = check_case(case_tag, model, grid_size)
    except Inconclusive:
        return "inconclusive", None, None
    return ("true" if report.verdict else "false"), report.margin, report


def threshold_study(family: Callable[[float], ValidatedModel], case_tag: CaseTag,
                    a_values: Sequence[float], *, mu: float | None = None,
                    grid_size: int = 4096, bisect_tol: float = 1e-6) -> ThresholdStudy:
    """Locate the condition-verdict flip along a one-parameter model family.

    Tabulates the condition outcome (and, when ``mu`` is given, the
    attractor classification) at each ``a``, then bisects the boundary of
    definite falsification: the smallest ``a`` at which some sampled angle
    violates the strict inequality.  Near the analytic threshold the
    certified-true region may stop an inflation-width early, so the
    falsification edge is the sharp locator.
    """
    case_tag = CaseTag(case_tag)
    rows: list[ThresholdRow] = []
    for a in a_values:
        outcome, margin, _ = _condition_outcome(family, a, case_tag, grid_size)
        label = None
        if mu is not None:
            label = classify_attractor(family(a), mu).label.value
        rows.append(ThresholdRow(float(a), outcome, margin, label))

    lo = hi = None
    for row in rows:
        if row.outcome != "false":
            lo = row.a if lo is None else max(lo, row.a)
        else:
            hi = row.a if hi is None else min(hi, row.a)
    if lo is None or hi is None or lo >= hi:
        return ThresholdStudy(rows, None, None)

    while hi - lo > bisect_tol:
        mid = 0.5 * (lo + hi)
        outcome, _, _ = _condition_outcome(family, mid, case_tag, grid_size)
        if outcome == "false":
            hi = mid
        else:
            lo = mid
    return ThresholdStudy(rows, 0.5 * (lo + hi), (lo, hi))
