"""Return-map model of a saddle periodic orbit with a homoclinic unstable manifold.

The phase space is a solid-torus cross-section neighborhood of a saddle
periodic orbit whose linearized flow is

    x' = -lam * x,   y' = -beta * y,   z' = gamma * z,   theta' = 1,

with x the leading stable coordinate, y the strong-stable block
(dimension n - 2), z the unstable coordinate and theta the phase angle.
Two cross-sections are used:

    S0: {x = d}  with coordinates (z0, y0, theta0),
    S1: {z = d}  with coordinates (x1, y1, theta1).

``local_map_T0`` is the flow-induced map S0+ -> S1 (closed form of the
linear flow), ``global_map_T1`` is the model family for the return
excursion S1 -> S0, linear in (x, y) with trigonometric-polynomial
angular profiles and a splitting parameter mu:

    z0     = mu * alpha(theta) + x * F_x(theta) + <F_y(theta), y>
    y0_i   = g0_i(theta) + x * F_y_i(theta) + H_y_i(theta) * y_i
    theta0 = m * theta + h(theta) + x * H_x(theta) + <H_y(theta), y>

The composition T = T0 o T1 on S1, written in the rescaled coordinates
X = x / (d^(1-nu) mu^nu), Y = y / mu^nu with nu = lam/gamma > 1, is the
object of study: as mu -> 0+ it converges to

    X -> alpha(theta)^nu,  Y -> 0,
    theta -> omega(mu) + m*theta + h(theta) - (1/gamma) ln alpha(theta),

with omega(mu) = (1/gamma) ln(d/mu).  The integer m (the degree of the
angular component) selects the attractor born when the homoclinic
connection splits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .fourier import TWO_PI, FourierSeries

__all__ = [
    "EscapedTube",
    "InvalidModel",
    "ModelConfig",
    "NotInPositiveHalf",
    "RawSectionPoint",
    "Section",
    "TorusPoint",
    "ValidatedModel",
    "certified_series_min",
    "global_map_T1",
    "load_config",
    "load_model",
    "local_map_T0",
    "parse_config",
    "return_map",
    "return_map_jacobian",
    "validate_config",
]

CONFIG_KEYS = (
    "m", "gamma", "lambda", "beta", "d", "n",
    "alpha", "h",
    "coupling_fx", "coupling_fy", "coupling_hx", "coupling_hy",
    "g0",
)


class InvalidModel(ValueError):
    """Raised by ``validate_config``; carries every violated rule by name."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("invalid model: " + ", ".join(self.violations))


class NotInPositiveHalf(ValueError):
    """A point handed to the local map lies on the wrong side of the stable manifold (z0 <= 0)."""


class EscapedTube(RuntimeError):
    """An orbit left the homoclinic tube: the global map produced z0 <= 0."""


class Section(Enum):
    S0 = "S0"
    S1 = "S1"


def reduce_angle(theta):
    """Reduce an angle (scalar or array) to [0, 2*pi)."""
    return np.mod(theta, TWO_PI)


def angle_diff(a, b):
    """Signed circle distance a - b, wrapped to (-pi, pi]."""
    d = np.mod(np.asarray(a, dtype=float) - b + np.pi, TWO_PI) - np.pi
    return np.where(d == -np.pi, np.pi, d) if np.ndim(d) else (np.pi if d == -np.pi else float(d))


@dataclass
class TorusPoint:
    """A point (X, Y, theta) of the rescaled solid-torus cross-section.

    ``theta`` is stored reduced mod 2*pi; lift bookkeeping (winding counts)
    is explicit in the operations that need it.
    """

    theta: float
    X: float
    Y: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        self.theta = float(reduce_angle(self.theta))
        self.X = float(self.X)
        self.Y = np.atleast_1d(np.asarray(self.Y, dtype=float))

    def as_vector(self) -> np.ndarray:
        """Flatten to (X, Y..., theta)."""
        return np.concatenate(([self.X], self.Y, [self.theta]))


@dataclass
class RawSectionPoint:
    """A point on one of the unrescaled cross-sections S0 or S1.

    ``coord_a`` is z0 on S0 and x1 on S1; ``coord_b`` is the strong-stable
    vector y in both cases.
    """

    section: Section
    theta: float
    coord_a: float
    coord_b: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        self.section = Section(self.section)
        self.theta = float(self.theta)
        self.coord_a = float(self.coord_a)
        self.coord_b = np.atleast_1d(np.asarray(self.coord_b, dtype=float))


@dataclass
class ModelConfig:
    """All model parameters plus the angular profile series.

    ``coupling_fy``, ``coupling_hy`` and ``g0`` hold one series per
    strong-stable component (n - 2 of them).
    """

    m: float
    gamma: float
    lam: float
    beta: float
    d: float
    n: int
    alpha: FourierSeries
    h: FourierSeries
    coupling_fx: FourierSeries = field(default_factory=FourierSeries.zero)
    coupling_hx: FourierSeries = field(default_factory=FourierSeries.zero)
    coupling_fy: tuple[FourierSeries, ...] = ()
    coupling_hy: tuple[FourierSeries, ...] = ()
    g0: tuple[FourierSeries, ...] = ()

    def __post_init__(self):
        self.coupling_fy = tuple(self.coupling_fy)
        self.coupling_hy = tuple(self.coupling_hy)
        self.g0 = tuple(self.g0)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "gamma": self.gamma,
            "lambda": self.lam,
            "beta": self.beta,
            "d": self.d,
            "n": self.n,
            "alpha": self.alpha.to_dict(),
            "h": self.h.to_dict(),
            "coupling_fx": self.coupling_fx.to_dict(),
            "coupling_fy": [s.to_dict() for s in self.coupling_fy],
            "coupling_hx": self.coupling_hx.to_dict(),
            "coupling_hy": [s.to_dict() for s in self.coupling_hy],
            "g0": [s.to_dict() for s in self.g0],
        }


def parse_config(data: dict) -> ModelConfig:
    """Build a ModelConfig from a plain mapping (the config-file schema)."""
    if not isinstance(data, dict):
        raise ValueError("config root must be a mapping")
    missing = [k for k in CONFIG_KEYS if k not in data]
    if missing:
        raise ValueError(f"config is missing keys: {missing}")
    unknown = set(data) - set(CONFIG_KEYS)
    if unknown:
        raise ValueError(f"config has unknown keys: {sorted(unknown)}")

    def series_list(key) -> tuple[FourierSeries, ...]:
        raw = data[key]
        if not isinstance(raw, (list, tuple)):
            raise ValueError(f"{key} must be a list of series (one per y-component)")
        return tuple(FourierSeries.from_dict(item) for item in raw)

    n = data["n"]
    if not float(n).is_integer():
        raise ValueError("n must be an integer")
    cfg = ModelConfig(
        m=float(data["m"]),
        gamma=float(data["gamma"]),
        lam=float(data["lambda"]),
        beta=float(data["beta"]),
        d=float(data["d"]),
        n=int(n),
        alpha=FourierSeries.from_dict(data["alpha"]),
        h=FourierSeries.from_dict(data["h"]),
        coupling_fx=FourierSeries.from_dict(data["coupling_fx"]),
        coupling_hx=FourierSeries.from_dict(data["coupling_hx"]),
        coupling_fy=series_list("coupling_fy"),
        coupling_hy=series_list("coupling_hy"),
        g0=series_list("g0"),
    )
    return cfg


def load_config(path) -> ModelConfig:
    """Read a JSON model-configuration file."""
    with open(Path(path), "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return parse_config(data)


def load_model(path) -> "ValidatedModel":
    return validate_config(load_config(path))


def certified_series_min(series: FourierSeries, grid_size: int = 4096,
                         cap: int = 2 ** 20) -> tuple[float, int, bool]:
    """Certified lower bound for min of a trigonometric polynomial on the circle.

    Evaluates on a uniform grid and subtracts the Lipschitz inflation
    sup|f'| * (half grid spacing); the grid doubles while the bound stays
    inconclusive about the sign.  Returns (lower_bound, grid_used,
    certified) where ``certified`` is False only if the cap was reached
    with the sign still straddling zero.
    """
    lip = series.deriv_sup_bound()
    grid = max(8, int(grid_size))
    while True:
        theta = np.arange(grid) * (TWO_PI / grid)
        grid_min = float(np.min(series.eval(theta)))
        inflation = lip * np.pi / grid
        lower = grid_min - inflation
        if grid_min <= 0.0 or lower > 0.0:
            return lower, grid, True
        if grid >= cap:
            return lower, grid, False
        grid *= 2


class _SeriesBank:
    """Stacked coefficient matrices for evaluating every model profile
    (and its derivative) in two matrix products per angle batch."""

    def __init__(self, series: list[FourierSeries]):
        rows = list(series) + [s.deriv() for s in series]
        deg = max((s.degree for s in rows), default=0)
        self.n_rows = len(rows)
        self.n_base = len(series)
        self.cos_mat = np.zeros((self.n_rows, deg + 1))
        self.sin_mat = np.zeros((self.n_rows, deg))
        for i, s in enumerate(rows):
            self.cos_mat[i, 0] = s.constant_term
            self.cos_mat[i, 1 : 1 + len(s.cosine_coeffs)] = s.cosine_coeffs
            self.sin_mat[i, : len(s.sine_coeffs)] = s.sine_coeffs
        self.k_cos = np.arange(deg + 1, dtype=float)
        self.k_sin = np.arange(1, deg + 1, dtype=float)

    def eval(self, theta) -> np.ndarray:
        """Values of all rows at ``theta``; shape (n_rows,) + theta.shape."""
        theta = np.asarray(theta, dtype=float)
        cb = np.cos(np.multiply.outer(self.k_cos, theta))
        sb = np.sin(np.multiply.outer(self.k_sin, theta))
        return np.tensordot(self.cos_mat, cb, axes=1) + np.tensordot(self.sin_mat, sb, axes=1)


class ValidatedModel:
    """A ModelConfig whose invariants have been checked, plus cached
    evaluation machinery.  Immutable after construction; every map
    evaluation is side-effect free.
    """

    def __init__(self, cfg: ModelConfig, alpha_min: float, alpha_min_grid: int):
        self.cfg = cfg
        self.m = int(cfg.m)
        self.gamma = cfg.gamma
        self.lam = cfg.lam
        self.beta = cfg.beta
        self.d = cfg.d
        self.n = cfg.n
        self.ydim = cfg.n - 2
        self.nu = cfg.lam / cfg.gamma
        self.beta_over_gamma = cfg.beta / cfg.gamma
        self.alpha_min = alpha_min          # certified positive lower bound
        self.alpha_min_grid = alpha_min_grid
        self.alpha_sup = cfg.alpha.sup_bound()

        k = self.ydim
        self._bank = _SeriesBank(
            [cfg.alpha, cfg.h, cfg.coupling_fx, cfg.coupling_hx]
            + list(cfg.coupling_fy) + list(cfg.coupling_hy) + list(cfg.g0)
        )
        self._iA, self._iH, self._iFX, self._iHX = 0, 1, 2, 3
        self._sFY = slice(4, 4 + k)
        self._sHY = slice(4 + k, 4 + 2 * k)
        self._sG0 = slice(4 + 2 * k, 4 + 3 * k)
        self._doff = 4 + 3 * k

    # -- derived multipliers of the saddle orbit ---------------------------

    @property
    def rho1(self) -> float:
        """Leading stable multiplier exp(-2*pi*lam) of the saddle orbit."""
        return float(np.exp(-TWO_PI * self.lam))

    @property
    def rho_n(self) -> float:
        """Unstable multiplier exp(2*pi*gamma) of the saddle orbit."""
        return float(np.exp(TWO_PI * self.gamma))

    # -- raw cross-section maps --------------------------------------------

    def t0_raw(self, z0, y0, theta0):
        """Local map S0+ -> S1 of the linear flow (vectorized, assumes z0 > 0).

        Returns (x1, y1, theta1_lift, flight_time) with
        flight_time = (1/gamma) ln(d/z0) and y contracted by z0^(beta/gamma).
        """
        z0 = np.asarray(z0, dtype=float)
        flight = (np.log(self.d) - np.log(z0)) / self.gamma
        x1 = self.d ** (1.0 - self.nu) * z0 ** self.nu
        y1 = z0 ** self.beta_over_gamma * np.asarray(y0, dtype=float)
        theta1 = np.asarray(theta0, dtype=float) + flight
        return x1, y1, theta1, flight

    def t1_raw(self, x1, y1, theta1, mu):
        """Global map S1 -> S0 (vectorized).

        ``y1`` carries the strong-stable components on a leading axis of
        length n - 2.  Returns (z0, y0, theta0); theta0 is the lift
        m*theta1 + ..., not reduced.
        """
        x1 = np.asarray(x1, dtype=float)
        y1 = np.asarray(y1, dtype=float)
        theta1 = np.asarray(theta1, dtype=float)
        vals = self._bank.eval(theta1)
        a, hv = vals[self._iA], vals[self._iH]
        fx, hx = vals[self._iFX], vals[self._iHX]
        fy, hy, g0 = vals[self._sFY], vals[self._sHY], vals[self._sG0]
        z0 = mu * a + x1 * fx + np.sum(fy * y1, axis=0)
        y0 = g0 + x1 * fy + hy * y1
        theta0 = self.m * theta1 + hv + x1 * hx + np.sum(hy * y1, axis=0)
        return z0, y0, theta0

    # -- rescaled return map -------------------------------------------------

    def rescaled_step(self, X, Y, theta, mu, with_jacobian: bool = False):
        """One application of the rescaled return map T = T0 o T1.

        Parameters
        ----------
        X, theta : scalars or arrays of a common shape S.
        Y : array of shape (n-2,) + S (leading component axis).
        mu : positive splitting parameter.
        with_jacobian : also return the derivative in (X, Y, theta), an
            array of shape S + (n, n) with variable order (X, Y..., theta);
            the theta derivative is taken on the lift.

        Returns
        -------
        (Xb, Yb, theta_lift, flight[, jac]) where ``theta_lift`` is the
        unreduced angular image m*theta + ... + (1/gamma) ln(d/z0); the
        input ``theta`` is used as a real number, so the lift is smooth
        in all arguments.

        Raises
        ------
        EscapedTube if any intermediate z0 <= 0.
        """
        if mu <= 0.0:
            raise ValueError("rescaled return map requires mu > 0")
        X = np.asarray(X, dtype=float)
        theta = np.asarray(theta, dtype=float)
        Y = np.asarray(Y, dtype=float)
        k = self.ydim
        if Y.shape[:1] != (k,):
            if k == 0 and Y.size == 0:
                Y = Y.reshape((0,) + theta.shape)
            else:
                raise ValueError(f"Y must have leading axis of length {k}")

        gamma, nu, bg, d, m = self.gamma, self.nu, self.beta_over_gamma, self.d, self.m
        mu_nu = mu ** nu
        c_x = d ** (1.0 - nu) * mu_nu

        vals = self._bank.eval(theta)
        a, hv = vals[self._iA], vals[self._iH]
        fx, hx = vals[self._iFX], vals[self._iHX]
        fy, hy, g0 = vals[self._sFY], vals[self._sHY], vals[self._sG0]
        do = self._doff
        a1, hv1 = vals[do + self._iA], vals[do + self._iH]
        fx1, hx1 = vals[do + self._iFX], vals[do + self._iHX]
        fy1 = vals[do + self._sFY.start : do + self._sFY.stop]
        hy1 = vals[do + self._sHY.start : do + self._sHY.stop]
        g01 = vals[do + self._sG0.start : do + self._sG0.stop]

        x = c_x * X
        z0 = mu * a + x * fx + mu_nu * np.sum(fy * Y, axis=0)
        if np.any(z0 <= 0.0):
            raise EscapedTube(f"z0 <= 0 under the global map at mu={mu!r}")
        y0 = g0 + x * fy + mu_nu * hy * Y
        th0 = m * theta + hv + x * hx + mu_nu * np.sum(hy * Y, axis=0)

        u = z0 / mu
        Xb = u ** nu
        c_y = mu ** (bg - nu)
        u_bg = u ** bg
        Yb = c_y * u_bg * y0
        flight = (np.log(d) - np.log(z0)) / gamma
        theta_lift = th0 + flight

        if not with_jacobian:
            return Xb, Yb, theta_lift, flight

        # first-stage partials (z0, y0, theta0) w.r.t. (X, Y, theta)
        dz0_dX = c_x * fx
        dz0_dY = mu_nu * fy
        dz0_dth = mu * a1 + x * fx1 + mu_nu * np.sum(fy1 * Y, axis=0)
        dy0_dX = c_x * fy
        dy0_dYdiag = mu_nu * hy
        dy0_dth = g01 + x * fy1 + mu_nu * hy1 * Y
        dth0_dX = c_x * hx
        dth0_dY = mu_nu * hy
        dth0_dth = m + hv1 + x * hx1 + mu_nu * np.sum(hy1 * Y, axis=0)

        # chain through the local map and the rescaling
        w = nu * u ** (nu - 1.0) / mu                 # dXb/dz0
        v = c_y * bg * u ** (bg - 1.0) / mu           # dYb_i/dz0 factor on y0_i
        q = c_y * u_bg
        inv_gz = 1.0 / (gamma * z0)

        shape = np.broadcast_shapes(X.shape, theta.shape, Y.shape[1:])
        nn = self.n
        jac = np.zeros(shape + (nn, nn))
        jac[..., 0, 0] = w * dz0_dX
        jac[..., 0, nn - 1] = w * dz0_dth
        jac[..., nn - 1, 0] = dth0_dX - dz0_dX * inv_gz
        jac[..., nn - 1, nn - 1] = dth0_dth - dz0_dth * inv_gz
        if k:
            jac[..., 0, 1 : 1 + k] = np.moveaxis(w * dz0_dY, 0, -1)
            jac[..., nn - 1, 1 : 1 + k] = np.moveaxis(dth0_dY - dz0_dY * inv_gz, 0, -1)
            jac[..., 1 : 1 + k, 0] = np.moveaxis(v * y0 * dz0_dX + q * dy0_dX, 0, -1)
            jac[..., 1 : 1 + k, nn - 1] = np.moveaxis(v * y0 * dz0_dth + q * dy0_dth, 0, -1)
            yy = np.einsum("i...,j...->...ij", v * y0, dz0_dY)
            idx = np.arange(k)
            yy[..., idx, idx] += np.moveaxis(q * dy0_dYdiag, 0, -1)
            jac[..., 1 : 1 + k, 1 : 1 + k] = yy
        return Xb, Yb, theta_lift, flight, jac

    # -- limit objects -------------------------------------------------------

    def omega(self, mu: float) -> float:
        """Angular drift (1/gamma) ln(d/mu) of the return map."""
        return float((np.log(self.d) - np.log(mu)) / self.gamma)

    def limit_radial(self, theta):
        """The mu -> 0 radial limit X = alpha(theta)^nu of the attractor."""
        return self.cfg.alpha.eval(theta) ** self.nu

    def seed_point(self, theta: float = 0.0) -> TorusPoint:
        """A point on the limit curve, a convenient orbit seed."""
        return TorusPoint(theta=theta, X=float(self.limit_radial(theta)),
                          Y=np.zeros(self.ydim))

    # -- trapping region -------------------------------------------------------

    def coupling_sup_bounds(self) -> dict:
        cfg = self.cfg
        return {
            "fx": cfg.coupling_fx.sup_bound(),
            "hx": cfg.coupling_hx.sup_bound(),
            "fy": np.array([s.sup_bound() for s in cfg.coupling_fy]),
            "hy": np.array([s.sup_bound() for s in cfg.coupling_hy]),
            "g0": np.array([s.sup_bound() for s in cfg.g0]),
            "fx1": cfg.coupling_fx.deriv_sup_bound(),
            "hx1": cfg.coupling_hx.deriv_sup_bound(),
            "fy1": np.array([s.deriv_sup_bound() for s in cfg.coupling_fy]),
            "hy1": np.array([s.deriv_sup_bound() for s in cfg.coupling_hy]),
            "g01": np.array([s.deriv_sup_bound() for s in cfg.g0]),
        }

    def trapping_radius(self, mu: float) -> float:
        """Radius K of a solid torus {|X - alpha(theta)^nu| < K, |Y| < K}
        mapped strictly into itself.

        K is the oscillation of alpha^nu plus a worst-case bound, derived
        from the coupling amplitudes, on how far images deviate from the
        limit curve.  Raises ValueError if no radius can be certified at
        this mu (mu too large for the given couplings).
        """
        if mu <= 0.0:
            raise ValueError("trapping radius requires mu > 0")
        nu, bg, d, gamma = self.nu, self.beta_over_gamma, self.d, self.gamma
        sup = self.coupling_sup_bounds()
        a_hi = self.alpha_sup
        osc = a_hi ** nu - self.alpha_min ** nu
        floor = 1e-3 * (1.0 + a_hi ** nu)
        fy_norm = float(np.sqrt(np.sum(sup["fy"] ** 2))) if self.ydim else 0.0

        K = osc + floor
        for _ in range(8):
            x_abs = a_hi ** nu + K
            c_max = d ** (1.0 - nu) * sup["fx"] * x_abs + fy_norm * K
            delta = mu ** (nu - 1.0) * c_max
            u_hi = a_hi + delta
            u_lo = self.alpha_min - delta
            if u_lo <= 0.0:
                raise ValueError(f"no trapping radius certified at mu={mu!r}")
            x_dev = nu * u_hi ** (nu - 1.0) * delta
            if self.ydim:
                y0_max = sup["g0"] + mu ** nu * (
                    d ** (1.0 - nu) * sup["fy"] * x_abs + sup["hy"] * K
                )
                y_bound = mu ** (bg - nu) * u_hi ** bg * float(np.sqrt(np.sum(y0_max ** 2)))
            else:
                y_bound = 0.0
            if osc + x_dev < K and y_bound < K:
                return float(K)
            K = max(osc + 2.0 * x_dev + floor, 2.0 * y_bound, K)
        raise ValueError(f"no trapping radius certified at mu={mu!r}")

    def trapping_samples(self, mu: float, n_theta: int = 128, K: float | None = None):
        """Grid over the trapping solid torus: boundary levels plus the core.

        Returns (theta, X, Y, K) with theta shape (M,), X shape (M,),
        Y shape (n-2, M); the sample set is the product of the theta grid
        with radial offsets {-K, 0, +K} in X and per-component offsets
        {-K/sqrt(k), 0, +K/sqrt(k)} in Y.
        """
        if K is None:
            K = self.trapping_radius(mu)
        theta = np.arange(n_theta) * (TWO_PI / n_theta)
        base = self.limit_radial(theta)
        levels = np.array([-K, 0.0, K])
        k = self.ydim
        if k:
            y_levels = levels / np.sqrt(k)
            grids = np.meshgrid(levels, *([y_levels] * k), indexing="ij")
            offsets = np.stack([g.ravel() for g in grids])  # (1+k, 27...)
        else:
            offsets = levels[None, :]
        n_off = offsets.shape[1]
        th = np.repeat(theta, n_off)
        X = np.repeat(base, n_off) + np.tile(offsets[0], n_theta)
        Y = np.tile(offsets[1:], n_theta)
        return th, X, Y, K

    def check_trapping(self, mu: float, n_theta: int = 128, K: float | None = None) -> bool:
        """Sample the trapping torus on a grid and test that every image
        lies strictly inside it."""
        th, X, Y, K = self.trapping_samples(mu, n_theta=n_theta, K=K)
        Xb, Yb, th_lift, _ = self.rescaled_step(X, Y, th, mu)
        dev = np.abs(Xb - self.limit_radial(reduce_angle(th_lift)))
        y_norm = np.sqrt(np.sum(Yb ** 2, axis=0)) if self.ydim else np.zeros_like(Xb)
        return bool(np.all(dev < K) and np.all(y_norm < K))


def validate_config(cfg: ModelConfig) -> ValidatedModel:
    """Check every model-family rule; raise InvalidModel naming all violations.

    Rules: nu = lam/gamma > 1; beta > lam (strong-stable block dominated);
    alpha strictly positive on the circle (simultaneous splitting); m an
    integer; and the dimension constraint on m (n = 2 forces m = 1, n = 3
    allows |m| <= 1, n >= 4 allows any integer).
    """
    violations: list[str] = []
    if not float(cfg.n).is_integer() or cfg.n < 2:
        violations.append("NTooSmall")
    if cfg.gamma <= 0.0:
        violations.append("GammaNotPositive")
    if cfg.d <= 0.0:
        violations.append("DNotPositive")
    if cfg.gamma > 0.0 and cfg.lam <= cfg.gamma:
        violations.append("NuNotGreaterThanOne")
    if cfg.beta <= cfg.lam:
        violations.append("BetaNotGreaterThanLambda")

    m_is_int = float(cfg.m).is_integer()
    if not m_is_int:
        violations.append("HalfIntegerM")

    if m_is_int and float(cfg.n).is_integer() and cfg.n >= 2:
        m = int(cfg.m)
        if cfg.n == 2 and m != 1:
            violations.append("DimensionForbidsM")
        elif cfg.n == 3 and abs(m) > 1:
            violations.append("DimensionForbidsM")

    ydim = int(cfg.n) - 2 if float(cfg.n).is_integer() else None
    if ydim is not None and ydim >= 0:
        for name, seq in (("coupling_fy", cfg.coupling_fy),
                          ("coupling_hy", cfg.coupling_hy),
                          ("g0", cfg.g0)):
            if len(seq) != ydim:
                violations.append("YProfileLengthMismatch")
                break

    alpha_min, alpha_grid, certified = certified_series_min(cfg.alpha)
    if alpha_min <= 0.0 or not certified:
        violations.append("AlphaNotPositive")

    if violations:
        raise InvalidModel(violations)
    return ValidatedModel(cfg, alpha_min=alpha_min, alpha_min_grid=alpha_grid)


# -- operation-style wrappers ---------------------------------------------


def local_map_T0(p: RawSectionPoint, model: ValidatedModel) -> tuple[RawSectionPoint, float]:
    """Flow-induced map S0+ -> S1; returns the image point and the flight time.

    Closed form of the linear flow: x1 = d^(1-nu) z0^nu, y1 = z0^(beta/gamma) y0,
    theta1 = theta0 + (1/gamma) ln(d/z0).  The image angle is reduced mod 2*pi.
    """
    if p.section is not Section.S0:
        raise ValueError("local map expects a point on S0")
    if p.coord_a <= 0.0:
        raise NotInPositiveHalf(f"z0 = {p.coord_a!r} is not in S0+ (escapes toward S0-)")
    x1, y1, theta1, flight = model.t0_raw(p.coord_a, p.coord_b, p.theta)
    out = RawSectionPoint(Section.S1, float(reduce_angle(theta1)), float(x1), y1)
    return out, float(flight)


def global_map_T1(p: RawSectionPoint, mu: float, model: ValidatedModel) -> RawSectionPoint:
    """Model family for the return excursion S1 -> S0 (total on its domain).

    At x = 0, y = 0, mu = 0 the output z0 is exactly zero: the whole
    unstable manifold is homoclinic at the bifurcation moment.
    """
    if p.section is not Section.S1:
        raise ValueError("global map expects a point on S1")
    z0, y0, theta0 = model.t1_raw(p.coord_a, p.coord_b, p.theta, mu)
    return RawSectionPoint(Section.S0, float(reduce_angle(theta0)), float(z0), y0)


def return_map(p: TorusPoint, mu: float, model: ValidatedModel) -> tuple[TorusPoint, int, float]:
    """Rescaled return map on the solid torus.

    Returns (image point, winding, flight_time) where ``winding`` is the
    number of whole turns by which the angular lift exceeds the reduced
    image angle.
    """
    Xb, Yb, lift, flight = model.rescaled_step(p.X, p.Y, p.theta, mu)
    theta_mod = float(reduce_angle(lift))
    winding = int(np.floor(float(lift) / TWO_PI))
    return TorusPoint(theta_mod, float(Xb), Yb), winding, float(flight)


def return_map_jacobian(p: TorusPoint, mu: float, model: ValidatedModel) -> np.ndarray:
    """Analytic derivative of the rescaled return map in (X, Y, theta).

    The angular derivative is computed on the lift.  Shape (n, n) with
    variable order (X, Y..., theta).
    """
    *_, jac = model.rescaled_step(p.X, p.Y, p.theta, mu, with_jacobian=True)
    return jac
