"""Shared builders and oracles for the test suite."""

from __future__ import annotations

from pathlib import Path

import numpy as np

import blueskylab as bsl
from blueskylab import FourierSeries

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"

F = FourierSeries


def demo_model(name: str) -> bsl.ValidatedModel:
    return bsl.load_model(CONFIG_DIR / f"{name}.json")


def uncoupled_config(m=0, gamma=1.0, lam=2.0, beta=3.5, d=1.0, n=3,
                     alpha=None, h=None) -> bsl.ModelConfig:
    """Model with all couplings and g0 identically zero."""
    k = n - 2
    return bsl.ModelConfig(
        m=m, gamma=gamma, lam=lam, beta=beta, d=d, n=n,
        alpha=alpha if alpha is not None else F.constant(1.0),
        h=h if h is not None else F.zero(),
        coupling_fy=(F.zero(),) * k, coupling_hy=(F.zero(),) * k,
        g0=(F.zero(),) * k,
    )


def coupled_config(m, gamma=1.0, lam=None, beta=None, d=1.0, n=3,
                   alpha=None, h=None, scale=1e-3) -> bsl.ModelConfig:
    """Model with every coupling pathway populated at a common amplitude."""
    lam = lam if lam is not None else 1.8 * gamma
    beta = beta if beta is not None else 1.8 * lam
    k = n - 2
    fy = tuple(F(scale, (), (scale / (i + 1),)) for i in range(k))
    hy = tuple(F(scale, (scale / (2 * i + 2),), ()) for i in range(k))
    g0 = tuple(F(0.1 / (i + 1), (0.05,), ()) for i in range(k))
    return bsl.ModelConfig(
        m=m, gamma=gamma, lam=lam, beta=beta, d=d, n=n,
        alpha=alpha if alpha is not None else F(1.0, (0.2,), ()),
        h=h if h is not None else F(0.0, (), (0.15,)),
        coupling_fx=F(scale, (scale,), ()),
        coupling_hx=F(scale, (), (scale / 2,)),
        coupling_fy=fy, coupling_hy=hy, g0=g0,
    )


def _random_series(rng, max_degree, scale) -> FourierSeries:
    deg = int(rng.integers(0, max_degree + 1))
    weights = 1.0 / (1.0 + np.arange(deg))
    return F(
        scale * rng.uniform(-1.0, 1.0),
        tuple(scale * weights * rng.uniform(-1.0, 1.0, deg)),
        tuple(scale * weights * rng.uniform(-1.0, 1.0, deg)),
    )


def allowed_degrees(n: int) -> list[int]:
    if n == 2:
        return [1]
    if n == 3:
        return [-1, 0, 1]
    return [-3, -2, -1, 0, 1, 2, 3]


def random_config(rng, m=None, n=None, coupling_scale=1e-2) -> bsl.ModelConfig:
    """A random configuration satisfying every model-family rule."""
    n = int(n) if n is not None else int(rng.integers(2, 6))
    if m is None:
        m = int(rng.choice(allowed_degrees(n)))
    gamma = rng.uniform(0.5, 1.5)
    lam = gamma * rng.uniform(1.3, 2.4)
    beta = lam * rng.uniform(1.3, 2.0)
    d = rng.uniform(0.5, 2.0)
    k = n - 2
    bump = _random_series(rng, 3, 0.15)
    alpha = F(1.0 + bump.constant_term, bump.cosine_coeffs, bump.sine_coeffs)
    return bsl.ModelConfig(
        m=m, gamma=gamma, lam=lam, beta=beta, d=d, n=n,
        alpha=alpha,
        h=_random_series(rng, 3, 0.2),
        coupling_fx=_random_series(rng, 2, coupling_scale),
        coupling_hx=_random_series(rng, 2, coupling_scale),
        coupling_fy=tuple(_random_series(rng, 2, coupling_scale) for _ in range(k)),
        coupling_hy=tuple(_random_series(rng, 2, coupling_scale) for _ in range(k)),
        g0=tuple(_random_series(rng, 2, 0.2) for _ in range(k)),
    )


def fd_jacobian(model, mu, X, Y, theta, rel_step=1e-6) -> np.ndarray:
    """Central-difference derivative of the rescaled step on the lift."""
    v0 = np.concatenate(([X], np.atleast_1d(Y), [theta]))
    n = v0.size

    def f(v):
        Xb, Yb, lift, _ = model.rescaled_step(v[0], v[1 : n - 1], v[n - 1], mu)
        return np.concatenate(([float(Xb)], np.atleast_1d(Yb), [float(lift)]))

    out = np.empty((n, n))
    for j in range(n):
        step = rel_step * max(1.0, abs(v0[j]))
        vp = v0.copy()
        vp[j] += step
        vm = v0.copy()
        vm[j] -= step
        out[:, j] = (f(vp) - f(vm)) / (2.0 * step)
    return out


def advance(model, mu, X, Y, theta, steps):
    """Iterate the rescaled map on a batch; returns final (X, Y, theta)."""
    from blueskylab.model import reduce_angle

    for _ in range(steps):
        Xb, Yb, lift, _ = model.rescaled_step(X, Y, theta, mu)
        X, Y, theta = Xb, Yb, reduce_angle(lift)
    return X, Y, theta


def random_region_points(rng, model, mu, count):
    """Points in the trapping torus: (X, Y, theta) batch arrays."""
    K = model.trapping_radius(mu)
    theta = rng.uniform(0.0, 2.0 * np.pi, count)
    X = model.limit_radial(theta) + K * rng.uniform(-0.9, 0.9, count)
    Y = K / max(1, model.ydim) * rng.uniform(-0.9, 0.9, (model.ydim, count))
    return X, Y, theta
