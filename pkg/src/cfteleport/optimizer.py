"""Minimization of the added noise over local squeezings of the resource.

For a resource in standard form ``(b1, b2, c, d)`` squeezed locally by
``diag(sqrt(u_j), 1/sqrt(u_j))`` and used in a balanced measurement, the
added noise is

    N(u1, u2) = [b1 (u1 + 1/u1) + b2 (u2 + 1/u2)
                 - 2 (c sqrt(u1 u2) + |d| / sqrt(u1 u2))] / 2.

Numerics work in ``x_j = log(u_j)`` where the objective reads
``b1 cosh x1 + b2 cosh x2 - c exp(s/2) - |d| exp(-s/2)`` with ``s = x1 + x2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq, minimize

from .exceptions import DegenerateStateError, DomainError, RegimeError, SingularStateError
from .gaussian_core import StandardFormI, ptranspose_min_eigenvalue


@dataclass(frozen=True)
class SqueezeParams:
    u1: float
    u2: float

    def __post_init__(self):
        if not (self.u1 > 0 and self.u2 > 0 and np.isfinite(self.u1) and np.isfinite(self.u2)):
            raise DomainError(f"squeezing factors must be positive, got ({self.u1}, {self.u2})")


@dataclass(frozen=True)
class SeparabilityReport:
    delta_epr: Optional[float]
    c_tilde_minus: float
    entangled: bool
    symmetric: bool
    ptranspose_min: float


@dataclass(frozen=True)
class OptimizationResult:
    v: SqueezeParams
    n_min: float
    residuals: Tuple[float, float]
    method: str
    grid_gap: Optional[float] = None
    grid_min: Optional[float] = None
    stationary_points: List[Tuple[float, float, float]] = field(default_factory=list)


@dataclass(frozen=True)
class OptimizerConfig:
    u_max: float = 1e3
    grid_points: int = 400
    n_random_starts: int = 8
    seed: int = 0
    newton_tol: float = 1e-13
    max_newton_iter: int = 200


def _as_u(u) -> SqueezeParams:
    return u if isinstance(u, SqueezeParams) else SqueezeParams(*map(float, u))


def _objective(s: StandardFormI, u1, u2):
    w = np.sqrt(u1 * u2)
    return 0.5 * (
        s.b1 * (u1 + 1.0 / u1) + s.b2 * (u2 + 1.0 / u2) - 2.0 * (s.c * w + abs(s.d) / w)
    )


def noise_objective(s: StandardFormI, u) -> float:
    u = _as_u(u)
    return float(_objective(s, u.u1, u.u2))


def stationarity_residuals(s: StandardFormI, u) -> Tuple[float, float]:
    """Residuals of ``b1(u1^2-1)/u1 = b2(u2^2-1)/u2`` and
    ``b1 b2 (u1^2-1)(u2^2-1) = (c u1 u2 - |d|)^2``.
    """
    u = _as_u(u)
    u1, u2, a = u.u1, u.u2, abs(s.d)
    r1 = s.b1 * (u1 * u1 - 1.0) / u1 - s.b2 * (u2 * u2 - 1.0) / u2
    r2 = s.b1 * s.b2 * (u1 * u1 - 1.0) * (u2 * u2 - 1.0) - (s.c * u1 * u2 - a) ** 2
    return float(r1), float(r2)


# --- log-space calculus -----------------------------------------------------


def _log_obj(s, x):
    e = np.exp(0.5 * (x[0] + x[1]))
    return s.b1 * np.cosh(x[0]) + s.b2 * np.cosh(x[1]) - s.c * e - abs(s.d) / e


def _log_grad(s, x):
    e = np.exp(0.5 * (x[0] + x[1]))
    mix = -0.5 * s.c * e + 0.5 * abs(s.d) / e
    return np.array([s.b1 * np.sinh(x[0]) + mix, s.b2 * np.sinh(x[1]) + mix])


def _log_hess(s, x):
    e = np.exp(0.5 * (x[0] + x[1]))
    off = -0.25 * s.c * e - 0.25 * abs(s.d) / e
    return np.array([[s.b1 * np.cosh(x[0]) + off, off], [off, s.b2 * np.cosh(x[1]) + off]])


def _damped_newton(s, x0, tol, max_iter) -> Optional[np.ndarray]:
    x = np.array(x0, dtype=float)
    f = _log_obj(s, x)
    scale = max(s.b1, s.b2, 1.0)
    for _ in range(max_iter):
        g = _log_grad(s, x)
        if np.abs(g).max() <= tol * scale:
            return x
        h = _log_hess(s, x)
        if not (np.isfinite(g).all() and np.isfinite(h).all()):
            return None  # ran off to infinity: no minimum along this path
        ev = np.linalg.eigvalsh(h)
        floor = 1e-8 * max(scale, abs(ev[1]))
        convex = ev[0] > floor
        if not convex:
            h = h + (floor - ev[0]) * np.eye(2)
        step = -np.linalg.solve(h, g)
        norm = np.abs(step).max()
        if convex and norm <= 2.0:
            # near the minimum objective decreases drown in round-off; judge by the gradient
            xn = x + step
            if np.abs(_log_grad(s, xn)).max() <= 0.5 * np.abs(g).max():
                x, f = xn, _log_obj(s, xn)
                continue
        if norm > 2.0:
            step *= 2.0 / norm
        t = 1.0
        while t > 1e-12:
            xn = x + t * step
            fn = _log_obj(s, xn)
            if np.isfinite(fn) and fn <= f + 1e-4 * t * (g @ step):
                break
            t *= 0.5
        else:
            return x if np.abs(g).max() <= 1e3 * tol * scale else None
        x, f = xn, fn
    return x if np.abs(_log_grad(s, x)).max() <= 1e3 * tol * scale else None


def _elimination_roots(s: StandardFormI, k_max: float) -> List[np.ndarray]:
    """Stationary points via the common value ``k = b_j (u_j - 1/u_j)``.

    Both gradient equations say ``b_j (u_j - 1/u_j) = (c w^2 - |d|)/w`` with
    ``w = sqrt(u1 u2)``; fixing ``k`` determines ``u1, u2`` and leaves the
    scalar equation ``c w(k)^2 - |d| - k w(k) = 0``.
    """
    a = abs(s.d)

    def u_of(b, k):
        return (k + np.sqrt(k * k + 4 * b * b)) / (2 * b)

    def h(k):
        w = np.sqrt(u_of(s.b1, k) * u_of(s.b2, k))
        return s.c * w * w - a - k * w

    ks = k_max * np.sinh(np.linspace(-6.0, 6.0, 4001)) / np.sinh(6.0)
    hs = h(ks)
    roots = []
    for i in np.flatnonzero(hs == 0.0):
        roots.append(ks[i])
    for i in np.flatnonzero(hs[:-1] * hs[1:] < 0):
        roots.append(brentq(h, ks[i], ks[i + 1], xtol=1e-15, rtol=1e-15))
    return [np.log([u_of(s.b1, k), u_of(s.b2, k)]) for k in sorted(roots)]


def _result(s, x, method, points=(), gap=None, grid_min=None) -> OptimizationResult:
    u = SqueezeParams(float(np.exp(x[0])), float(np.exp(x[1])))
    return OptimizationResult(
        v=u,
        n_min=noise_objective(s, u),
        residuals=stationarity_residuals(s, u),
        method=method,
        grid_gap=gap,
        grid_min=grid_min,
        stationary_points=list(points),
    )


def optimize_symmetric(s: StandardFormI) -> OptimizationResult:
    """Closed-form optimum ``v1 = v2 = sqrt((b - |d|)/(b - c))`` of a symmetric state."""
    if not s.symmetric:
        raise RegimeError(f"closed form needs b1 == b2, got {s.b1} != {s.b2}")
    b, a = s.b1, abs(s.d)
    if b - s.c <= 1e-14 * max(1.0, b):
        raise SingularStateError("c == b1: optimal squeezing diverges")
    v = np.sqrt((b - a) / (b - s.c))
    res = _result(s, np.log([v, v]), "closed-form")
    n_closed = 2.0 * np.sqrt((b - a) * (b - s.c))
    return OptimizationResult(
        res.v, float(n_closed), res.residuals, res.method,
        stationary_points=[(res.v.u1, res.v.u2, float(n_closed))],
    )


def grid_oracle(s: StandardFormI, u_max: float = 1e3, n: int = 400) -> Tuple[float, np.ndarray, bool]:
    """Brute-force minimum over a log-spaced grid, refined by Nelder-Mead.

    Returns ``(n_min, log_u, on_boundary)``; ``on_boundary`` reports whether
    the best raw grid point touched the edge of the box.
    """
    xs = np.linspace(-np.log(u_max), np.log(u_max), n)
    x1, x2 = np.meshgrid(xs, xs, indexing="ij")
    vals = _objective(s, np.exp(x1), np.exp(x2))
    i, j = np.unravel_index(np.argmin(vals), vals.shape)
    boundary = i in (0, n - 1) or j in (0, n - 1)
    x0 = np.array([xs[i], xs[j]])
    ref = minimize(
        lambda x: _log_obj(s, x), x0, method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 20000, "maxfev": 40000},
    )
    best = (ref.fun, ref.x) if ref.fun < vals[i, j] else (vals[i, j], x0)
    return float(best[0]), np.asarray(best[1]), bool(boundary)


def optimize_general(s: StandardFormI, config: Optional[OptimizerConfig] = None) -> OptimizationResult:
    """Global minimizer of the added noise for any standard form.

    Stationary points come from multi-start damped Newton and from a
    one-variable elimination scan; the best local minimum is certified
    against :func:`grid_oracle`.  ``stationary_points`` lists every distinct
    local minimum found as ``(u1, u2, N)``.
    """
    cfg = config or OptimizerConfig()
    rng = np.random.default_rng(cfg.seed)
    lmax = np.log(cfg.u_max)

    seeds = [np.zeros(2)]
    bs = 0.5 * (s.b1 + s.b2)
    if bs - s.c > 1e-12:
        v = np.sqrt(max(bs - abs(s.d), 1e-300) / (bs - s.c))
        seeds.append(np.log([v, v]))
    seeds.extend(rng.uniform(-lmax, lmax, size=(cfg.n_random_starts, 2)))

    candidates = []
    for x0 in seeds:
        x = _damped_newton(s, x0, cfg.newton_tol, cfg.max_newton_iter)
        if x is not None:
            candidates.append(x)
    k_max = max(s.b1, s.b2) * (cfg.u_max - 1.0 / cfg.u_max)
    for x in _elimination_roots(s, k_max):
        # polish and keep minima only
        xp = _damped_newton(s, x, cfg.newton_tol, 20)
        if xp is not None:
            candidates.append(xp)

    minima: List[np.ndarray] = []
    for x in candidates:
        if np.linalg.eigvalsh(_log_hess(s, x))[0] < -1e-10:
            continue
        if all(np.abs(x - m).max() > 1e-6 for m in minima):
            minima.append(x)

    grid_min, grid_x, boundary = grid_oracle(s, cfg.u_max, cfg.grid_points)
    if not minima:
        if boundary:
            raise DegenerateStateError("no stationary point and grid minimum on the boundary")
        raise DegenerateStateError("no stationary point found")

    minima.sort(key=lambda x: _log_obj(s, x))
    best = minima[0]
    points = [(float(np.exp(m[0])), float(np.exp(m[1])), float(_log_obj(s, m))) for m in minima]
    res = _result(s, best, "numeric", points)
    return OptimizationResult(
        res.v, res.n_min, res.residuals, "numeric",
        grid_gap=res.n_min - grid_min, grid_min=grid_min, stationary_points=points,
    )


def optimize(s: StandardFormI, config: Optional[OptimizerConfig] = None) -> OptimizationResult:
    """Closed form for symmetric states, numeric search otherwise."""
    if s.symmetric:
        return optimize_symmetric(s)
    return optimize_general(s, config)


def separability(s: StandardFormI) -> SeparabilityReport:
    """EPR-correlation and partial-transpose diagnostics.

    ``entangled`` follows from the partial-transpose spectrum.  For symmetric
    states ``delta_epr = 2[(b - c) v + (b - |d|)/v]`` at the optimal squeeze
    ``v`` and ``c_tilde_minus`` is the closed form ``sqrt((b - |d|)(b - c))``;
    asymmetric states report ``delta_epr = None``.
    """
    pt = ptranspose_min_eigenvalue(s, "spectrum")
    entangled = bool(pt < 0.5)
    if not s.symmetric:
        return SeparabilityReport(None, pt, entangled, False, pt)
    b, a = s.b1, abs(s.d)
    v = np.sqrt((b - a) / (b - s.c))
    delta = 2.0 * ((b - s.c) * v + (b - a) / v)
    return SeparabilityReport(float(delta), ptranspose_min_eigenvalue(s, "closed"), entangled, True, pt)
