"""Attractor computation and certification for each degree regime.

Degree m = 0: Newton fixed points of the return map and their multipliers.
Degree |m| = 1: graph-transform invariant curves with orientation, the
cross-section traces of an invariant torus (m = 1) or Klein bottle (m = -1).
Degree |m| >= 2: cone-condition certificates of uniform hyperbolicity for
the solid-torus map, Lyapunov spectra, and finite-depth symbolic coding
against the degree-m expanding circle factor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .conditions import (
    CaseMismatch,
    CaseTag,
    ConditionReport,
    Inconclusive,
    case_for_degree,
    certified_angular_expansion,
    check_case,
)
from .fourier import TWO_PI
from .model import EscapedTube, TorusPoint, ValidatedModel, angle_diff, reduce_angle

__all__ = [
    "AnnulusDiagnostic",
    "AttractorLabel",
    "BranchAmbiguity",
    "ClassificationRecord",
    "ConeCertificate",
    "FixedPointResult",
    "InvariantCurve",
    "ItineraryReport",
    "LyapunovSpectrum",
    "NoConvergence",
    "NotACircleMap",
    "NotExpandingInTheta",
    "Orientation",
    "annulus_diagnostic",
    "branch_boundaries",
    "certify_jacobian_field",
    "circle_degree",
    "classify_attractor",
    "cone_certify",
    "find_fixed_point",
    "graph_transform_curve",
    "itinerary_semiconjugacy",
    "lyapunov_spectrum",
    "phase_distance",
]

LYAPUNOV_FLOOR = -50.0


class NoConvergence(RuntimeError):
    """An iterative solver exhausted its iteration budget."""


class NotACircleMap(RuntimeError):
    """The angular component failed strict monotonicity along the curve."""


class NotExpandingInTheta(RuntimeError):
    """The certified lower bound of the angular derivative is <= 1."""


class BranchAmbiguity(RuntimeError):
    """An orbit angle stayed within tolerance of a branch boundary after resampling."""


class Orientation(Enum):
    PRESERVING = "Preserving"
    REVERSING = "Reversing"


class AttractorLabel(Enum):
    STABLE_PERIODIC_ORBIT = "StablePeriodicOrbit"
    INVARIANT_TORUS = "InvariantTorus"
    KLEIN_BOTTLE = "KleinBottle"
    SOLENOID = "Solenoid"
    INDETERMINATE = "Indeterminate"


def phase_distance(p: TorusPoint, q: TorusPoint) -> float:
    """Euclidean distance in (X, Y) plus circle distance in theta."""
    dy = p.Y - q.Y
    return float(np.sqrt((p.X - q.X) ** 2 + np.dot(dy, dy)
                         + angle_diff(p.theta, q.theta) ** 2))


# ---------------------------------------------------------------------------
# fixed points (degree 0)
# ---------------------------------------------------------------------------


@dataclass
class FixedPointResult:
    point: TorusPoint
    multipliers: np.ndarray        # eigenvalues of the return-map derivative
    residual: float
    newton_iterations: int

    @property
    def stable(self) -> bool:
        return bool(np.all(np.abs(self.multipliers) < 1.0))

    def to_dict(self) -> dict:
        return {
            "theta": self.point.theta,
            "X": self.point.X,
            "Y": self.point.Y.tolist(),
            "multiplier_moduli": np.abs(self.multipliers).tolist(),
            "residual": self.residual,
            "newton_iterations": self.newton_iterations,
        }


def find_fixed_point(model: ValidatedModel, mu: float,
                     seed: TorusPoint | None = None,
                     tol: float = 1e-13, max_iter: int = 100) -> FixedPointResult:
    """Newton iteration for a fixed point of the rescaled return map.

    Works on (X, Y, theta-lift) with the angular residual wrapped to the
    circle; uses the analytic Jacobian.  Intended for degree m = 0, where
    the contracting limit map has a unique stable fixed point, but runs
    for any degree.
    """
    if seed is None:
        seed = model.seed_point()
        # a couple of forward steps put the seed on the attracting core
        for _ in range(2):
            Xb, Yb, lift, _ = model.rescaled_step(seed.X, seed.Y, seed.theta, mu)
            seed = TorusPoint(float(lift), float(Xb), Yb)
    k = model.ydim
    X, Y, th = seed.X, seed.Y.copy(), seed.theta
    n = model.n
    iterations = 0
    for iterations in range(1, max_iter + 1):
        Xb, Yb, lift, _, jac = model.rescaled_step(X, Y, th, mu, with_jacobian=True)
        g = np.concatenate(([float(Xb) - X], Yb - Y, [float(angle_diff(lift, th))]))
        residual = float(np.linalg.norm(g))
        if residual < tol:
            break
        step = np.linalg.solve(jac - np.eye(n), -g)
        X += step[0]
        Y = Y + step[1 : 1 + k]
        th += step[n - 1]
    else:
        raise NoConvergence(f"Newton did not reach tol={tol} in {max_iter} iterations "
                            f"(last residual {residual:.3e})")
    point = TorusPoint(th, X, Y)
    jac = model.rescaled_step(X, Y, point.theta, mu, with_jacobian=True)[-1]
    return FixedPointResult(
        point=point,
        multipliers=np.linalg.eigvals(jac),
        residual=residual,
        newton_iterations=iterations,
    )


# ---------------------------------------------------------------------------
# invariant curves (degree +-1)
# ---------------------------------------------------------------------------


@dataclass
class InvariantCurve:
    """A closed curve theta -> (X, Y) on a uniform angular grid.

    ``residual_sup`` is the sup over grid nodes of the distance between the
    image of the curve point and the curve evaluated at the image angle
    (linear interpolation between nodes).
    """

    theta_grid: np.ndarray
    radial_values: np.ndarray      # (N, 1 + ydim), column 0 is X
    residual_sup: float
    orientation: Orientation

    @property
    def X(self) -> np.ndarray:
        return self.radial_values[:, 0]

    @property
    def Y(self) -> np.ndarray:
        return self.radial_values[:, 1:]

    def radial_at(self, theta):
        """Linear interpolation of (X, Y) at arbitrary angles; shape (..., 1+ydim)."""
        n = len(self.theta_grid)
        pos = reduce_angle(np.asarray(theta, dtype=float)) / (TWO_PI / n)
        i0 = np.floor(pos).astype(int) % n
        frac = pos - np.floor(pos)
        return (1.0 - frac)[..., None] * self.radial_values[i0] \
            + frac[..., None] * self.radial_values[(i0 + 1) % n]


def _curve_residual(theta, radial, Xb, Yb, lift):
    """Distance from mapped nodes to the linearly interpolated curve at the image angles."""
    n = len(theta)
    pos = reduce_angle(lift) / (TWO_PI / n)
    i0 = np.floor(pos).astype(int) % n
    frac = pos - np.floor(pos)
    interp = (1.0 - frac)[:, None] * radial[i0] + frac[:, None] * radial[(i0 + 1) % n]
    dx = Xb - interp[:, 0]
    dy = Yb.T - interp[:, 1:]
    return float(np.max(np.sqrt(dx ** 2 + np.sum(dy ** 2, axis=1))))


def graph_transform_curve(model: ValidatedModel, mu: float, grid_size: int = 1024,
                          tol: float = 1e-8, max_iter: int = 10 ** 4) -> InvariantCurve:
    """Graph transform for the attracting invariant curve at degree |m| = 1.

    Starting from the limit curve (X, Y) = (alpha(theta)^nu, 0), each step
    maps the graph and reparametrizes it by the image angle; the angular
    lift along the curve must be strictly monotone (the circle-map
    property guaranteed by the torus condition), and its inverse is taken
    with monotone cubic (PCHIP) interpolation on the lift.  Iterates until
    the invariance residual drops below ``tol``.
    """
    if abs(model.m) != 1:
        raise CaseMismatch(f"graph transform requires |m| = 1, got m={model.m}")
    n = int(grid_size)
    k = model.ydim
    theta = np.arange(n) * (TWO_PI / n)
    radial = np.empty((n, 1 + k))
    radial[:, 0] = model.limit_radial(theta)
    radial[:, 1:] = 0.0

    residual = np.inf
    best = np.inf
    stalled = 0
    sign = 0.0
    for _ in range(max_iter):
        Xb, Yb, lift, _ = model.rescaled_step(radial[:, 0], radial[:, 1:].T, theta, mu)
        diffs = np.diff(lift)
        if np.all(diffs > 0.0) and lift[-1] < lift[0] + TWO_PI:
            sign = 1.0
        elif np.all(diffs < 0.0) and lift[-1] > lift[0] - TWO_PI:
            sign = -1.0
        else:
            raise NotACircleMap("angular component is not strictly monotone along the curve")
        residual = _curve_residual(theta, radial, Xb, Yb, lift)
        if residual < tol:
            break
        # the piecewise-linear residual cannot drop below ~h^2/8 * curvature;
        # bail out once the transform has clearly stopped improving
        stalled = stalled + 1 if residual > 0.9999 * best else 0
        best = min(best, residual)
        if stalled >= 50:
            raise NoConvergence(
                f"graph transform stagnated at residual {residual:.3e} above tol={tol} "
                f"(grid_size={n} interpolation floor; refine the grid)")

        w = sign * lift
        values = np.column_stack([Xb, Yb.T]) if k else Xb[:, None]
        # periodic extension so the interpolation stencil covers one full turn
        w_ext = np.concatenate([w - TWO_PI, w, w + TWO_PI])
        v_ext = np.vstack([values, values, values])
        interp = PchipInterpolator(w_ext, v_ext, axis=0)
        targets = sign * theta
        targets = targets + TWO_PI * np.ceil((w[0] - targets) / TWO_PI)
        radial = interp(targets)
    else:
        raise NoConvergence(f"graph transform residual {residual:.3e} above tol={tol} "
                            f"after {max_iter} iterations")

    orientation = Orientation.PRESERVING if sign > 0 else Orientation.REVERSING
    return InvariantCurve(theta, radial, residual, orientation)


@dataclass
class AnnulusDiagnostic:
    """The square-root contraction inequality behind the invariant-curve case.

    ``lhs`` is 1 - sup|dp/dr| * sup|(dq/dtheta)^-1| and ``rhs`` is
    2 sqrt(sup|(dq/dtheta)^-1| * sup|dq/dr| * sup|dp/dtheta (dq/dtheta)^-1|),
    with suprema over the sampled trapping torus; ``satisfied`` means
    lhs > rhs.  Diagnostic only: the certified angular condition
    1 + m*s > 0 is the effective criterion for this map family.
    """

    sup_pr: float
    sup_ptheta: float
    sup_qtheta_inv: float
    sup_qr: float
    lhs: float
    rhs: float

    @property
    def gap(self) -> float:
        return self.lhs - self.rhs

    @property
    def satisfied(self) -> bool:
        return self.lhs > self.rhs


def annulus_diagnostic(model: ValidatedModel, mu: float, grid: int = 256) -> AnnulusDiagnostic:
    """Evaluate the annulus contraction inequality at degree |m| = 1.

    Unlike the solenoid cone conditions this does not need angular
    expansion, so sup|(dq/dtheta)^-1| may exceed one; the inequality holds
    whenever the radial contraction beats the cross terms, which is the
    regime where the graph transform converges to a smooth curve.
    """
    if abs(model.m) != 1:
        raise CaseMismatch(f"annulus diagnostic requires |m| = 1, got m={model.m}")
    K = model.trapping_radius(mu)
    th, X, Y, K = model.trapping_samples(mu, n_theta=grid, K=K)
    *_, jac = model.rescaled_step(X, Y, th, mu, with_jacobian=True)
    r = model.n - 1
    p_r = jac[:, :r, :r]
    p_t = jac[:, :r, r]
    q_r = jac[:, r, :r]
    q_t = jac[:, r, r]
    if np.any(q_t == 0.0):
        raise NotACircleMap("vanishing angular derivative on the trapping torus")
    sup_pr = float(np.max(np.linalg.svd(p_r, compute_uv=False)[:, 0]))
    sup_ptheta = float(np.max(np.linalg.norm(p_t, axis=1)))
    sup_qtinv = float(np.max(1.0 / np.abs(q_t)))
    sup_qr = float(np.max(np.linalg.norm(q_r, axis=1)))
    sup_pt_qtinv = float(np.max(np.linalg.norm(p_t, axis=1) / np.abs(q_t)))
    lhs = 1.0 - sup_qtinv * sup_pr
    rhs = 2.0 * float(np.sqrt(sup_qtinv * sup_qr * sup_pt_qtinv))
    return AnnulusDiagnostic(sup_pr, sup_ptheta, sup_qtinv, sup_qr, lhs, rhs)


def circle_degree(model: ValidatedModel, mu: float, grid_size: int = 4096) -> int:
    """Winding number of the angular image along the limit curve.

    Measured by unwrapping the reduced image angles over one loop of the
    input angle; equals the model degree m for every valid configuration.
    """
    theta = np.linspace(0.0, TWO_PI, int(grid_size) + 1)
    X = model.limit_radial(theta)
    Y = np.zeros((model.ydim, theta.size))
    _, _, lift, _ = model.rescaled_step(X, Y, theta, mu)
    unwrapped = np.unwrap(reduce_angle(lift))
    return int(np.round((unwrapped[-1] - unwrapped[0]) / TWO_PI))


# ---------------------------------------------------------------------------
# cone certification (degree |m| >= 2)
# ---------------------------------------------------------------------------


@dataclass
class ConeCertificate:
    """Sup-norms of the solid-torus map partials and the cone verdict.

    The ``sup_*`` and ``cross_sup_*`` fields are suprema over the sample
    grid; the verdict additionally uses the ``certified`` upper bounds
    (worst-case over the whole trapping region) so that a true verdict has
    positive certified margins.  ``L_interval`` is the admissible cone
    aperture range computed from the cross-form suprema, with +inf for an
    unbounded upper end and None when empty.
    """

    sup_pr: float
    sup_ptheta: float
    sup_qtheta_inv: float
    sup_qr: float
    cross_sup_pr: float
    cross_sup_ptheta_bar: float
    cross_sup_qtheta_bar: float
    cross_sup_qr: float
    L_interval: tuple[float, float] | None
    verdict: bool
    certified: dict = field(default_factory=dict, repr=False)

    @property
    def expansion_lower_bound(self) -> float:
        """Certified lower bound on the angular derivative |dq/dtheta|."""
        return self.certified.get("qtheta_lower", 1.0 / self.sup_qtheta_inv)

    def to_dict(self) -> dict:
        if self.L_interval is None:
            interval = None
        else:
            low, high = self.L_interval
            interval = [low, None if np.isinf(high) else high]
        return {
            "sup_pr": self.sup_pr,
            "sup_ptheta": self.sup_ptheta,
            "sup_qtheta_inv": self.sup_qtheta_inv,
            "sup_qr": self.sup_qr,
            "cross_sup_pr": self.cross_sup_pr,
            "cross_sup_ptheta_bar": self.cross_sup_ptheta_bar,
            "cross_sup_qtheta_bar": self.cross_sup_qtheta_bar,
            "cross_sup_qr": self.cross_sup_qr,
            "L_interval": interval,
            "verdict": self.verdict,
        }


def _interval_from(cross_pr, cross_pt, cross_qt, cross_qr):
    """Admissible cone apertures: cross_pt/(1-cross_pr) < L < (1-cross_qt)/cross_qr."""
    if cross_pr >= 1.0 or cross_qt >= 1.0:
        return None
    low = cross_pt / (1.0 - cross_pr)
    high = np.inf if cross_qr == 0.0 else (1.0 - cross_qt) / cross_qr
    return (float(low), float(high)) if low < high else None


def _cone_checks(pr, ptheta, qt_inv, qr_over_qt, cross_pr, cross_pt, cross_qt, cross_qr):
    """The forward conditions, the cross-form conditions, and the aperture interval."""
    c_forward = pr < 1.0 and (1.0 - pr) * (1.0 - qt_inv) > ptheta * qr_over_qt
    c_cross = cross_pr < 1.0 and cross_qt < 1.0 and \
        (1.0 - cross_pr) * (1.0 - cross_qt) >= cross_pt * cross_qr
    interval = _interval_from(cross_pr, cross_pt, cross_qt, cross_qr)
    return c_forward, c_cross, interval


def certify_jacobian_field(jacobians: np.ndarray, *, upper_bounds: dict | None = None,
                           qtheta_lower: float | None = None) -> ConeCertificate:
    """Cone certificate from sampled derivatives of a solid-torus map.

    Parameters
    ----------
    jacobians : array (M, dim, dim)
        Derivatives d(r_bar, theta_bar)/d(r, theta) at the sample points,
        with the angular coordinate LAST.  The map must be written
        r_bar = p(r, theta), theta_bar = q(r, theta).
    upper_bounds : optional dict
        Certified upper bounds over the whole region for keys ``pr``,
        ``ptheta``, ``qr``, ``cross_pr``, ``cross_ptheta_bar``,
        ``cross_qtheta_bar``, ``cross_qr``.  When absent, the grid suprema
        themselves are used and rigor rests on the caller's sampling.
    qtheta_lower : optional float
        Certified lower bound of |dq/dtheta| over the region; defaults to
        the grid minimum.

    Raises NotExpandingInTheta when the angular-derivative lower bound is
    <= 1 (the cross-form bookkeeping is not available), and Inconclusive
    when the grid values satisfy the inequalities but the certified bounds
    do not.
    """
    jac = np.asarray(jacobians, dtype=float)
    if jac.ndim != 3 or jac.shape[1] != jac.shape[2]:
        raise ValueError("jacobians must have shape (M, dim, dim)")
    r = jac.shape[1] - 1

    p_r = jac[:, :r, :r]
    p_t = jac[:, :r, r]
    q_r = jac[:, r, :r]
    q_t = jac[:, r, r]

    qt_min = float(np.min(np.abs(q_t)))
    qtheta_lo = qt_min if qtheta_lower is None else float(qtheta_lower)
    if qtheta_lo <= 1.0:
        raise NotExpandingInTheta(
            f"certified angular-derivative lower bound {qtheta_lo:.6g} <= 1")

    sup_pr = float(np.max(np.linalg.svd(p_r, compute_uv=False)[:, 0])) if r else 0.0
    sup_ptheta = float(np.max(np.linalg.norm(p_t, axis=1)))
    sup_qtheta_inv = float(np.max(1.0 / np.abs(q_t)))
    sup_qr = float(np.max(np.linalg.norm(q_r, axis=1)))

    # cross-form partials: theta solved from (r, theta_bar)
    inv_qt = 1.0 / q_t
    cross_qt_s = np.abs(inv_qt)
    cross_qr_s = np.linalg.norm(q_r, axis=1) * cross_qt_s
    cross_pt_s = np.linalg.norm(p_t, axis=1) * cross_qt_s
    cross_pr_mat = p_r - np.einsum("mi,mj->mij", p_t, q_r * inv_qt[:, None])
    cross_pr_s = np.linalg.svd(cross_pr_mat, compute_uv=False)[:, 0] if r else np.zeros(len(jac))

    cross_sup_pr = float(np.max(cross_pr_s))
    cross_sup_pt = float(np.max(cross_pt_s))
    cross_sup_qt = float(np.max(cross_qt_s))
    cross_sup_qr = float(np.max(cross_qr_s))

    grid_qr_over_qt = float(np.max(np.linalg.norm(q_r, axis=1) / np.abs(q_t)))
    grid_ok = all(_cone_checks(sup_pr, sup_ptheta, sup_qtheta_inv, grid_qr_over_qt,
                               cross_sup_pr, cross_sup_pt, cross_sup_qt, cross_sup_qr)[:2]) \
        and _interval_from(cross_sup_pr, cross_sup_pt, cross_sup_qt, cross_sup_qr) is not None

    ub = dict(upper_bounds or {})
    cert = {
        "pr": ub.get("pr", sup_pr),
        "ptheta": ub.get("ptheta", sup_ptheta),
        "qr": ub.get("qr", sup_qr),
        "cross_pr": ub.get("cross_pr", cross_sup_pr),
        "cross_ptheta_bar": ub.get("cross_ptheta_bar", cross_sup_pt),
        "cross_qtheta_bar": ub.get("cross_qtheta_bar", cross_sup_qt),
        "cross_qr": ub.get("cross_qr", cross_sup_qr),
        "qtheta_lower": qtheta_lo,
    }
    c_forward, c_cross, cert_interval = _cone_checks(
        cert["pr"], cert["ptheta"], 1.0 / cert["qtheta_lower"],
        cert["qr"] / cert["qtheta_lower"],
        cert["cross_pr"], cert["cross_ptheta_bar"],
        cert["cross_qtheta_bar"], cert["cross_qr"],
    )
    cert["L_interval"] = cert_interval
    certified_ok = c_forward and c_cross and cert_interval is not None

    interval = _interval_from(cross_sup_pr, cross_sup_pt, cross_sup_qt, cross_sup_qr)
    if certified_ok:
        verdict = True
    elif not grid_ok:
        verdict = False
    else:
        raise Inconclusive(CaseTag.SOLENOID,
                           raw_margin=(1.0 - cert["cross_pr"]) * (1.0 - cert["cross_qtheta_bar"])
                           - cert["cross_ptheta_bar"] * cert["cross_qr"],
                           inflation=np.nan, grid_size=len(jac))
    return ConeCertificate(
        sup_pr=sup_pr, sup_ptheta=sup_ptheta, sup_qtheta_inv=sup_qtheta_inv, sup_qr=sup_qr,
        cross_sup_pr=cross_sup_pr, cross_sup_ptheta_bar=cross_sup_pt,
        cross_sup_qtheta_bar=cross_sup_qt, cross_sup_qr=cross_sup_qr,
        L_interval=interval, verdict=verdict, certified=cert,
    )


def _cone_upper_bounds(model: ValidatedModel, mu: float, K: float) -> tuple[dict, float]:
    """Worst-case bounds of the return-map partials over the trapping torus.

    Built from Fourier coefficient sums, the certified minimum of alpha,
    and the certified angular expansion; every bound dominates the true
    supremum over {|X - alpha^nu| <= K, |Y| <= K}.
    """
    nu, bg, d, gamma, m = model.nu, model.beta_over_gamma, model.d, model.gamma, model.m
    cfg = model.cfg
    sup = model.coupling_sup_bounds()
    k = model.ydim
    a_hi, a_lo = model.alpha_sup, model.alpha_min
    a1 = cfg.alpha.deriv_sup_bound()

    mu_nu = mu ** nu
    c_y = mu ** (bg - nu)
    d_pow = d ** (1.0 - nu)
    x_abs = a_hi ** nu + K
    fy_norm = float(np.sqrt(np.sum(sup["fy"] ** 2))) if k else 0.0
    fy1_norm = float(np.sqrt(np.sum(sup["fy1"] ** 2))) if k else 0.0
    hy1_norm = float(np.sqrt(np.sum(sup["hy1"] ** 2))) if k else 0.0

    c_max = d_pow * sup["fx"] * x_abs + fy_norm * K
    ct_max = d_pow * sup["fx1"] * x_abs + fy1_norm * K
    delta = mu ** (nu - 1.0) * c_max
    u_hi = a_hi + delta
    u_lo = a_lo - delta
    if u_lo <= 0.0:
        raise ValueError(f"trapping torus not separated from the stable manifold at mu={mu!r}")
    ut_max = a1 + mu ** (nu - 1.0) * ct_max

    y0_max = sup["g0"] + mu_nu * (d_pow * sup["fy"] * x_abs + sup["hy"] * K) if k else np.zeros(0)
    y0t_max = sup["g01"] + mu_nu * (d_pow * sup["fy1"] * x_abs + sup["hy1"] * K) if k else np.zeros(0)

    # radial block, entrywise bounds -> Frobenius dominates the operator norm
    w_hi = nu * u_hi ** (nu - 1.0) * mu ** (nu - 1.0)
    row_x = np.concatenate(([w_hi * d_pow * sup["fx"]], w_hi * sup["fy"]))
    b_pr_sq = float(np.sum(row_x ** 2))
    v_hi = c_y * bg * u_hi ** (bg - 1.0) * mu ** (nu - 1.0)
    q_hi = c_y * u_hi ** bg
    for i in range(k):
        row = np.concatenate((
            [v_hi * d_pow * sup["fx"] * y0_max[i] + q_hi * mu_nu * d_pow * sup["fy"][i]],
            v_hi * sup["fy"] * y0_max[i],
        ))
        row[1 + i] += q_hi * mu_nu * sup["hy"][i]
        b_pr_sq += float(np.sum(row ** 2))
    b_pr = float(np.sqrt(b_pr_sq))

    w_th = nu * u_hi ** (nu - 1.0) * ut_max
    y_th = v_hi / mu ** (nu - 1.0) * ut_max * y0_max + q_hi * (
        y0t_max if k else np.zeros(0))
    b_ptheta = float(np.sqrt(w_th ** 2 + np.sum(y_th ** 2)))

    qr_x = mu_nu * d_pow * sup["hx"] + mu ** (nu - 1.0) * d_pow * sup["fx"] / (gamma * u_lo)
    qr_y = mu_nu * sup["hy"] + mu ** (nu - 1.0) * sup["fy"] / (gamma * u_lo) if k \
        else np.zeros(0)
    b_qr = float(np.sqrt(qr_x ** 2 + np.sum(qr_y ** 2)))

    # angular derivative: m + s(theta) plus bounded corrections
    hy1_sum = float(np.sqrt(np.sum(sup["hy1"] ** 2))) if k else 0.0
    corr = mu_nu * d_pow * sup["hx1"] * x_abs + mu_nu * hy1_sum * K \
        + mu ** (nu - 1.0) * (a1 * c_max + a_hi * ct_max) / (gamma * a_lo * u_lo)
    expansion = certified_angular_expansion(model)
    qtheta_lo = expansion - corr

    bounds = {
        "pr": b_pr,
        "ptheta": b_ptheta,
        "qr": b_qr,
    }
    if qtheta_lo > 0.0:
        bounds["cross_pr"] = b_pr + b_ptheta * b_qr / qtheta_lo
        bounds["cross_ptheta_bar"] = b_ptheta / qtheta_lo
        bounds["cross_qtheta_bar"] = 1.0 / qtheta_lo
        bounds["cross_qr"] = b_qr / qtheta_lo
    return bounds, qtheta_lo


def cone_certify(model: ValidatedModel, mu: float, grid: int = 256) -> ConeCertificate:
    """Cone-condition certificate of uniform hyperbolicity at degree |m| >= 2.

    Samples the trapping solid torus (``grid`` angles times radial corner
    levels), computes the analytic return-map derivatives, and checks the
    forward and cross-form inequalities; the verdict uses worst-case
    upper bounds over the whole region, so it is true only with positive
    certified margins.
    """
    if abs(model.m) < 2:
        raise CaseMismatch(f"cone certification requires |m| >= 2, got m={model.m}")
    K = model.trapping_radius(mu)
    th, X, Y, K = model.trapping_samples(mu, n_theta=grid, K=K)
    *_, jac = model.rescaled_step(X, Y, th, mu, with_jacobian=True)
    upper, qtheta_lo = _cone_upper_bounds(model, mu, K)
    if qtheta_lo <= 1.0:
        raise NotExpandingInTheta(
            f"certified angular-derivative lower bound {qtheta_lo:.6g} <= 1")
    return certify_jacobian_field(jac, upper_bounds=upper, qtheta_lower=qtheta_lo)


# ---------------------------------------------------------------------------
# Lyapunov spectrum
# ---------------------------------------------------------------------------


@dataclass
class LyapunovSpectrum:
    """QR-cocycle averages along one orbit, sorted descending.

    Directions whose growth rate falls below -50 (total contraction to
    numerical zero, e.g. vanishing couplings) are reported as -inf.
    ``confidence_halfwidth`` is the block-averaging half-width of the top
    exponent.
    """

    exponents: list[float]
    orbit_length: int
    transient_discarded: int
    confidence_halfwidth: float

    @property
    def top(self) -> float:
        return self.exponents[0]

    def to_dict(self) -> dict:
        return {
            "exponents": [e if np.isfinite(e) else None for e in self.exponents],
            "orbit_length": self.orbit_length,
            "transient_discarded": self.transient_discarded,
            "confidence_halfwidth": self.confidence_halfwidth,
        }


def _cocycle_run(kcos, ksin, cos_mat, sin_mat, k, m, gamma, nu, bg, d, mu,
                 X0, Y0, th0, transient, warmup, iterations, n_blocks):
    """Orbit + QR cocycle on flattened model data (numba-compiled when available).

    The last ``warmup`` transient steps already evolve the orthonormal
    frame (without accumulating), so the averaged growth rates carry no
    initial-alignment bias.  Returns (acc, blocks, escaped) where acc is
    the summed log |diag R| per direction and blocks the per-block sums.
    """
    two_pi = 2.0 * np.pi
    n = 2 + k
    mu_nu = mu ** nu
    c_x = d ** (1.0 - nu) * mu_nu
    c_y = mu ** (bg - nu)
    log_d = np.log(d)

    X = X0
    Y = Y0.copy()
    th = th0
    Q = np.eye(n)
    jac = np.zeros((n, n))
    y0 = np.zeros(k)
    acc = np.zeros(n)
    blocks = np.zeros((n_blocks, n))
    block_len = max(1, iterations // n_blocks)
    dof = 4 + 3 * k

    for step in range(transient + iterations):
        cb = np.cos(kcos * th)
        sb = np.sin(ksin * th)
        vals = cos_mat @ cb + sin_mat @ sb
        a = vals[0]
        hv = vals[1]
        fx = vals[2]
        hx = vals[3]
        sfy = 0.0
        shy = 0.0
        for i in range(k):
            sfy += vals[4 + i] * Y[i]
            shy += vals[4 + k + i] * Y[i]
        x = c_x * X
        z0 = mu * a + x * fx + mu_nu * sfy
        if z0 <= 0.0:
            return acc, blocks, True
        u = z0 / mu
        Xb = u ** nu
        u_bg = u ** bg
        q = c_y * u_bg
        for i in range(k):
            y0[i] = vals[4 + 2 * k + i] + x * vals[4 + i] + mu_nu * vals[4 + k + i] * Y[i]
        lift = m * th + hv + x * hx + mu_nu * shy + (log_d - np.log(z0)) / gamma

        if step >= transient - warmup:
            a1 = vals[dof]
            hv1 = vals[dof + 1]
            fx1 = vals[dof + 2]
            hx1 = vals[dof + 3]
            sfy1 = 0.0
            shy1 = 0.0
            for i in range(k):
                sfy1 += vals[dof + 4 + i] * Y[i]
                shy1 += vals[dof + 4 + k + i] * Y[i]
            dz0_dth = mu * a1 + x * fx1 + mu_nu * sfy1
            w = nu * u ** (nu - 1.0) / mu
            v = c_y * bg * u ** (bg - 1.0) / mu
            inv_gz = 1.0 / (gamma * z0)
            jac[0, 0] = w * c_x * fx
            jac[0, n - 1] = w * dz0_dth
            jac[n - 1, 0] = c_x * hx - c_x * fx * inv_gz
            jac[n - 1, n - 1] = m + hv1 + x * hx1 + mu_nu * shy1 - dz0_dth * inv_gz
            for i in range(k):
                fy_i = vals[4 + i]
                hy_i = vals[4 + k + i]
                jac[0, 1 + i] = w * mu_nu * fy_i
                jac[n - 1, 1 + i] = mu_nu * hy_i - mu_nu * fy_i * inv_gz
                jac[1 + i, 0] = v * y0[i] * c_x * fx + q * c_x * fy_i
                dy0_dth = vals[dof + 4 + 2 * k + i] + x * vals[dof + 4 + i] \
                    + mu_nu * vals[dof + 4 + k + i] * Y[i]
                jac[1 + i, n - 1] = v * y0[i] * dz0_dth + q * dy0_dth
                for j in range(k):
                    jac[1 + i, 1 + j] = v * y0[i] * mu_nu * vals[4 + j]
                jac[1 + i, 1 + i] += q * mu_nu * hy_i
            Q, R = np.linalg.qr(np.dot(jac, np.ascontiguousarray(Q)))
            if step >= transient:
                logs = np.log(np.abs(np.diag(R)))
                acc += logs
                bi = min((step - transient) // block_len, n_blocks - 1)
                blocks[bi] += logs

        X = Xb
        for i in range(k):
            Y[i] = q * y0[i]
        th = lift % two_pi
    return acc, blocks, False


try:  # pragma: no cover - exercised when numba is installed
    from numba import njit as _njit

    _cocycle_kernel = _njit(cache=True)(_cocycle_run)
except ImportError:  # pragma: no cover
    _cocycle_kernel = _cocycle_run


def lyapunov_spectrum(model: ValidatedModel, mu: float, iterations: int,
                      transient: int = 1000, seed: TorusPoint | None = None,
                      blocks: int = 20, qr_warmup: int | None = None) -> LyapunovSpectrum:
    """Lyapunov exponents of the return map by QR cocycle averaging.

    One orbit is advanced past the transient (whose tail also warms up the
    orthonormal frame), then the analytic Jacobians are accumulated with
    per-step QR re-orthonormalization; the exponents are the average log
    diagonal growth, sorted descending.
    """
    if iterations < 1:
        raise ValueError("iterations must be positive")
    if seed is None:
        seed = model.seed_point(0.5)
    if qr_warmup is None:
        qr_warmup = min(200, int(transient))
    bank = model._bank
    n_blocks = max(1, min(int(blocks), int(iterations)))
    with np.errstate(divide="ignore"):
        acc, block_sums, escaped = _cocycle_kernel(
            bank.k_cos, bank.k_sin, bank.cos_mat, bank.sin_mat,
            model.ydim, float(model.m), model.gamma, model.nu,
            model.beta_over_gamma, model.d, float(mu),
            float(seed.X), np.asarray(seed.Y, dtype=float), float(seed.theta),
            int(transient), min(int(qr_warmup), int(transient)), int(iterations), n_blocks,
        )
    if escaped:
        raise EscapedTube(f"orbit escaped during the Lyapunov run at mu={mu!r}")

    rates = acc / iterations
    order = np.argsort(rates)[::-1]
    exponents = [float(r) if r >= LYAPUNOV_FLOOR else -np.inf for r in rates[order]]

    block_len = max(1, int(iterations) // n_blocks)
    top_blocks = block_sums[:, order[0]] / block_len
    top_blocks = top_blocks[np.isfinite(top_blocks)]
    if top_blocks.size > 1:
        half = 1.96 * float(np.std(top_blocks, ddof=1)) / np.sqrt(top_blocks.size)
    else:
        half = float("nan")
    return LyapunovSpectrum(exponents, int(iterations), int(transient), half)


# ---------------------------------------------------------------------------
# symbolic itineraries (degree |m| >= 2)
# ---------------------------------------------------------------------------


@dataclass
class ItineraryReport:
    """Finite-depth symbolic coding of attractor orbits over the degree-m
    expanding circle factor.

    ``shift_consistent`` records that the branch index assigned from the
    angular partition agrees, at every step of every sampled orbit, with
    the winding window actually traversed by the step (the finite shadow
    of coding-commutes-with-shift).  ``contraction_ratio`` is the fitted
    per-depth shrink factor of the set of angles sharing an itinerary
    prefix; it should not exceed 1 / (certified angular expansion).
    """

    n_symbols: int
    depth: int
    samples: int
    shift_consistent: bool
    max_diameter_by_depth: list[tuple[int, float]]
    contraction_ratio: float
    prefactor: float
    expansion_lower_bound: float
    boundaries: np.ndarray
    resampled: int

    def to_dict(self) -> dict:
        return {
            "n_symbols": self.n_symbols,
            "depth": self.depth,
            "samples": self.samples,
            "shift_consistent": self.shift_consistent,
            "max_diameter_by_depth": [[k, d] for k, d in self.max_diameter_by_depth],
            "contraction_ratio": self.contraction_ratio,
            "prefactor": self.prefactor,
            "expansion_lower_bound": self.expansion_lower_bound,
            "resampled": self.resampled,
        }


def _reference_lift(model: ValidatedModel, mu: float, theta):
    """Angular lift along the limit curve (X, Y) = (alpha^nu, 0)."""
    theta = np.asarray(theta, dtype=float)
    X = model.limit_radial(theta)
    Y = np.zeros((model.ydim,) + theta.shape)
    return model.rescaled_step(X, Y, theta, mu)[2]


def branch_boundaries(model: ValidatedModel, mu: float) -> tuple[np.ndarray, float]:
    """Branch cells of the degree-m angular factor along the limit curve.

    The boundaries are the |m| pre-images of a fixed point of the angular
    circle map.  A fixed point (rather than an arbitrary reference angle)
    makes the partition Markov: every boundary maps onto the fixed point,
    itself a boundary, so the set of angles sharing a depth-k itinerary is
    a single arc contracting at the inverse expansion rate.

    Returns (boundaries sorted in [0, 2pi), first window target t0 of the
    signed lift); the |m| arcs between consecutive boundaries are the
    symbol cells.
    """
    m = model.m
    if abs(m) < 2:
        raise CaseMismatch(f"branch coding requires |m| >= 2, got m={m}")
    sign = 1.0 if m > 0 else -1.0

    dense = np.linspace(0.0, TWO_PI, 4096 + 1)
    lift_dense = np.asarray(_reference_lift(model, mu, dense), dtype=float)
    w_dense = sign * lift_dense
    if np.any(np.diff(w_dense) <= 0.0):
        raise NotACircleMap("angular lift is not strictly monotone along the limit curve")

    # fixed point of the circle map: lift(theta) - theta crosses a 2pi
    # multiple; sign * (lift - theta) is monotone increasing either way
    g_dense = sign * (lift_dense - dense)
    g_target = TWO_PI * (np.floor(g_dense[0] / TWO_PI) + 1.0)
    i = int(np.searchsorted(g_dense, g_target))
    fixed = brentq(
        lambda x: sign * (float(_reference_lift(model, mu, x)) - x) - g_target,
        dense[max(i - 1, 0)], dense[min(i, len(dense) - 1)], xtol=1e-14,
    )
    fixed = float(reduce_angle(fixed))

    def w(theta):
        return sign * float(_reference_lift(model, mu, theta))

    sp = sign * fixed
    k0 = int(np.ceil((w_dense[0] - sp) / TWO_PI))
    targets = sp + TWO_PI * (k0 + np.arange(abs(m)))
    bounds = []
    for t in targets:
        i = int(np.searchsorted(w_dense, t))
        lo, hi = dense[max(i - 1, 0)], dense[min(i, len(dense) - 1)]
        bounds.append(brentq(lambda x, t=t: w(x) - t, lo, hi, xtol=1e-14))
    return np.sort(reduce_angle(np.array(bounds))), float(targets[0])


def _circular_diameter(angles: np.ndarray) -> float:
    """Diameter of a set of angles: full circle minus the largest gap."""
    a = np.sort(reduce_angle(angles))
    gaps = np.diff(np.concatenate([a, [a[0] + TWO_PI]]))
    return float(TWO_PI - np.max(gaps))


def itinerary_semiconjugacy(model: ValidatedModel, mu: float, depth: int = 12,
                            samples: int = 4096, transient: int = 64,
                            rng_seed: int = 0, boundary_tol: float = 1e-9,
                            max_resample_rounds: int = 8) -> ItineraryReport:
    """Code attractor orbits by the branches of the degree-m circle factor.

    Each sampled orbit is assigned, at every step, the index of the
    monotone pre-image branch containing its angle.  The report checks
    that this static assignment matches the winding window of the actual
    step (shift consistency), and fits diameter ~ C * rho^depth over the
    groups of samples sharing an itinerary prefix.  Angles within
    ``boundary_tol`` of a branch boundary are resampled.
    """
    m = model.m
    boundaries, t0 = branch_boundaries(model, mu)
    n_sym = abs(m)
    sign = 1.0 if m > 0 else -1.0
    rng = np.random.Generator(np.random.Philox(key=rng_seed))

    # label each arc between consecutive boundaries by its winding window,
    # so arc membership and window index use the same symbol alphabet
    gaps = np.diff(np.concatenate([boundaries, [boundaries[0] + TWO_PI]]))
    mids = boundaries + 0.5 * gaps
    w_mid = sign * np.asarray(_reference_lift(model, mu, mids), dtype=float)
    arc_labels = np.floor((w_mid - t0) / TWO_PI).astype(int) % n_sym

    def draw(count):
        th = rng.uniform(0.0, TWO_PI, count)
        X = model.limit_radial(th) * (1.0 + 0.01 * rng.uniform(-1, 1, count))
        Y = 0.01 * rng.uniform(-1, 1, (model.ydim, count))
        for _ in range(transient):
            Xb, Yb, lift, _ = model.rescaled_step(X, Y, th, mu)
            X, Y, th = Xb, Yb, reduce_angle(lift)
        return X, Y, th

    resampled = 0
    X, Y, th = draw(samples)
    for _ in range(max_resample_rounds):
        # symbols by arc membership and by the winding window of each step
        th_path = np.empty((depth, samples))
        sym_arc = np.empty((depth, samples), dtype=int)
        sym_win = np.empty((depth, samples), dtype=int)
        ambiguous = np.zeros(samples, dtype=bool)
        Xc, Yc, thc = X.copy(), Y.copy(), th.copy()
        for step in range(depth):
            th_path[step] = thc
            dist = np.min(np.abs(angle_diff(thc[:, None], boundaries[None, :])), axis=1)
            ambiguous |= dist < boundary_tol
            sym_arc[step] = arc_labels[(np.searchsorted(boundaries, thc, side="right") - 1)
                                       % n_sym]
            Xb, Yb, lift, _ = model.rescaled_step(Xc, Yc, thc, mu)
            sym_win[step] = np.floor((sign * lift - t0) / TWO_PI).astype(int) % n_sym
            Xc, Yc, thc = Xb, Yb, reduce_angle(lift)
        if not np.any(ambiguous):
            break
        idx = np.flatnonzero(ambiguous)
        resampled += idx.size
        Xn, Yn, thn = draw(idx.size)
        X[idx] = Xn
        Y[:, idx] = Yn
        th[idx] = thn
    else:
        raise BranchAmbiguity(
            f"angles within {boundary_tol} of a branch boundary after "
            f"{max_resample_rounds} resampling rounds")

    shift_consistent = bool(np.array_equal(sym_arc, sym_win))

    # diameter of angle groups sharing an itinerary prefix
    diam_by_depth: list[tuple[int, float]] = []
    keys = [tuple() for _ in range(samples)]
    for k in range(1, depth + 1):
        keys = [keys[i] + (int(sym_arc[k - 1, i]),) for i in range(samples)]
        groups: dict[tuple, list[int]] = {}
        for i, key in enumerate(keys):
            groups.setdefault(key, []).append(i)
        diams = [_circular_diameter(th_path[0][idx]) for idx in groups.values() if len(idx) > 1]
        if not diams:
            break
        diam_by_depth.append((k, max(diams)))

    if len(diam_by_depth) >= 3:
        ks = np.array([k for k, _ in diam_by_depth], dtype=float)
        logs = np.log([d for _, d in diam_by_depth])
        slope, intercept = np.polyfit(ks, logs, 1)
        rho, pref = float(np.exp(slope)), float(np.exp(intercept))
    else:
        rho, pref = np.nan, np.nan

    expansion = certified_angular_expansion(model)
    return ItineraryReport(
        n_symbols=n_sym, depth=depth, samples=samples,
        shift_consistent=shift_consistent,
        max_diameter_by_depth=diam_by_depth,
        contraction_ratio=rho, prefactor=pref,
        expansion_lower_bound=expansion,
        boundaries=boundaries, resampled=resampled,
    )


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


@dataclass
class ClassificationRecord:
    """Outcome of the trichotomy for one (model, mu): the attractor label
    plus the supporting condition report and case-specific certificate."""

    label: AttractorLabel
    mu: float
    condition: ConditionReport | None = None
    fixed_point: FixedPointResult | None = None
    curve: InvariantCurve | None = None
    certificate: ConeCertificate | None = None
    reason: str | None = None

    def to_dict(self) -> dict:
        out: dict = {"classification": self.label.value, "mu": self.mu}
        if self.condition is not None:
            out["condition"] = self.condition.to_dict()
        if self.fixed_point is not None:
            out["fixed_point"] = self.fixed_point.to_dict()
        if self.curve is not None:
            out["curve"] = {
                "grid_size": len(self.curve.theta_grid),
                "residual_sup": self.curve.residual_sup,
                "orientation": self.curve.orientation.value,
            }
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_dict()
        if self.reason:
            out["reason"] = self.reason
        return out


def classify_attractor(model: ValidatedModel, mu: float, *,
                       grid_size: int = 4096, curve_grid: int = 65536,
                       cone_grid: int = 256) -> ClassificationRecord:
    """Run the case condition and the case-appropriate computation.

    Returns one of StablePeriodicOrbit / InvariantTorus / KleinBottle /
    Solenoid, or Indeterminate whenever a certification is inconclusive
    or a hypothesis fails (never a guess).
    """
    m = model.m
    case = case_for_degree(m)
    try:
        condition = check_case(case, model, grid_size)
    except Inconclusive as exc:
        return ClassificationRecord(AttractorLabel.INDETERMINATE, mu,
                                    reason=f"condition inconclusive: {exc}")
    if not condition.verdict:
        return ClassificationRecord(AttractorLabel.INDETERMINATE, mu, condition=condition,
                                    reason="case condition violated")

    if case is CaseTag.BLUE_SKY:
        fp = find_fixed_point(model, mu)
        if not fp.stable:
            return ClassificationRecord(AttractorLabel.INDETERMINATE, mu, condition=condition,
                                        fixed_point=fp, reason="fixed point not stable")
        return ClassificationRecord(AttractorLabel.STABLE_PERIODIC_ORBIT, mu,
                                    condition=condition, fixed_point=fp)

    if case is CaseTag.TORUS_OR_KLEIN:
        curve = graph_transform_curve(model, mu, curve_grid)
        expected = Orientation.PRESERVING if m == 1 else Orientation.REVERSING
        if curve.orientation is not expected:
            return ClassificationRecord(AttractorLabel.INDETERMINATE, mu, condition=condition,
                                        curve=curve, reason="unexpected orientation")
        label = AttractorLabel.INVARIANT_TORUS if m == 1 else AttractorLabel.KLEIN_BOTTLE
        return ClassificationRecord(label, mu, condition=condition, curve=curve)

    try:
        certificate = cone_certify(model, mu, cone_grid)
    except (Inconclusive, NotExpandingInTheta) as exc:
        return ClassificationRecord(AttractorLabel.INDETERMINATE, mu, condition=condition,
                                    reason=f"cone certification inconclusive: {exc}")
    if not certificate.verdict:
        return ClassificationRecord(AttractorLabel.INDETERMINATE, mu, condition=condition,
                                    certificate=certificate, reason="cone conditions violated")
    return ClassificationRecord(AttractorLabel.SOLENOID, mu, condition=condition,
                                certificate=certificate)
