"""Trajectory simulation of the protocol for Gaussian input and resource.

Each trajectory draws Alice's outcome ``(q, p)``, conditions mode 2 on it
(Gaussian conditioning on two commuting quadratures), and displaces Bob's
mean by ``sqrt(2) mu = (q/cos(theta), p/sin(theta))``.  The output state is
the mixture of the displaced conditional states, so its covariance is the
(outcome-independent) conditional covariance plus the spread of the displaced
means.

Sampling is split into fixed-size blocks, each with its own child stream of
``SeedSequence(seed)``; results depend only on ``(seed, n_samples)``, not on
the number of workers.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .channel import MeasurementGeometry
from .exceptions import DegenerateConditioningError
from .gaussian_core import OneModeCovariance, TwoModeCovariance, require_bona_fide

BLOCK = 1 << 14
WORKERS_ENV = "CFTELEPORT_WORKERS"


@dataclass(frozen=True)
class OutcomeSample:
    q: float
    p: float
    theta: float

    @property
    def mu(self) -> complex:
        return (self.q / np.cos(self.theta) + 1j * self.p / np.sin(self.theta)) / np.sqrt(2.0)


@dataclass(frozen=True)
class OutcomeDistribution:
    """Bivariate normal law of the measured pair ``(q, p)``."""

    mean: np.ndarray
    cov: np.ndarray

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        chol = np.linalg.cholesky(self.cov)
        return self.mean + rng.standard_normal((size, 2)) @ chol.T


@dataclass(frozen=True)
class TrajectoryStats:
    n_samples: int
    mean: np.ndarray
    cov: np.ndarray
    mean_stderr: np.ndarray
    cov_stderr: np.ndarray
    conditional_cov: np.ndarray

    @property
    def v_out(self) -> OneModeCovariance:
        return OneModeCovariance.from_matrix(self.cov)


def _geometry(g) -> MeasurementGeometry:
    return g if isinstance(g, MeasurementGeometry) else MeasurementGeometry(g)


def _joint(v_in: OneModeCovariance, v: TwoModeCovariance, mean_in):
    """Covariance and mean of ``(q_in, p_in, q1, p1, q2, p2)``."""
    sigma = np.zeros((6, 6))
    sigma[:2, :2] = v_in.matrix
    sigma[2:, 2:] = v.matrix
    mean = np.zeros(6)
    mean[:2] = mean_in
    return sigma, mean


def _measurement(g: MeasurementGeometry) -> np.ndarray:
    c, s = np.cos(g.theta), np.sin(g.theta)
    return np.array([[c, 0, -s, 0, 0, 0], [0, s, 0, c, 0, 0]])


def outcome_distribution(v_in: OneModeCovariance, v: TwoModeCovariance, g=np.pi / 4, mean_in=(0.0, 0.0)) -> OutcomeDistribution:
    g = _geometry(g)
    sigma, mean = _joint(v_in, v, mean_in)
    m = _measurement(g)
    return OutcomeDistribution(m @ mean, m @ sigma @ m.T)


@dataclass(frozen=True)
class _Conditioner:
    gain: np.ndarray  # 2x2, maps (outcome - expected outcome) to Bob's mean shift
    cov: np.ndarray
    offset: np.ndarray  # mode-2 prior mean
    outcome_mean: np.ndarray


def _conditioner(v_in, v, g, mean_in) -> _Conditioner:
    sigma, mean = _joint(v_in, v, mean_in)
    m = _measurement(g)
    s_mm = m @ sigma @ m.T
    if np.linalg.cond(s_mm) > 1e12:
        raise DegenerateConditioningError(f"measured covariance is singular: {s_mm}")
    s_bm = sigma[4:, :] @ m.T
    gain = s_bm @ np.linalg.inv(s_mm)
    cov = sigma[4:, 4:] - gain @ s_bm.T
    return _Conditioner(gain, 0.5 * (cov + cov.T), mean[4:], m @ mean)


def conditional_bob_state(v_in: OneModeCovariance, v: TwoModeCovariance, g, s: OutcomeSample, mean_in=(0.0, 0.0)):
    """Mean and covariance of Bob's mode after outcome ``s`` (before displacement)."""
    g = _geometry(g)
    cond = _conditioner(v_in, v, g, mean_in)
    mean = cond.offset + cond.gain @ (np.array([s.q, s.p]) - cond.outcome_mean)
    return mean, OneModeCovariance.from_matrix(cond.cov)


def _block_moments(args):
    child, size, dist, cond, scale = args
    rng = np.random.default_rng(child)
    outcomes = dist.sample(rng, size)
    means = cond.offset + (outcomes - cond.outcome_mean) @ cond.gain.T + outcomes * scale
    mu = means.mean(axis=0)
    dev = means - mu
    return size, mu, dev.T @ dev


def _combine(parts):
    n, mean, m2 = 0, np.zeros(2), np.zeros((2, 2))
    for nb, mb, m2b in parts:
        delta = mb - mean
        tot = n + nb
        m2 = m2 + m2b + np.outer(delta, delta) * n * nb / tot
        mean = mean + delta * nb / tot
        n = tot
    return n, mean, m2


def run_ensemble(
    v_in: OneModeCovariance,
    v: TwoModeCovariance,
    g=np.pi / 4,
    n_samples: int = 100_000,
    seed: int = 0,
    mean_in=(0.0, 0.0),
    workers: Optional[int] = None,
) -> TrajectoryStats:
    """Monte-Carlo estimate of the teleported state's first and second moments."""
    g = _geometry(g)
    require_bona_fide(v)
    if n_samples < 2:
        raise ValueError("need at least two samples")
    dist = outcome_distribution(v_in, v, g, mean_in)
    cond = _conditioner(v_in, v, g, mean_in)
    scale = np.array([1.0 / np.cos(g.theta), 1.0 / np.sin(g.theta)])

    sizes = [BLOCK] * (n_samples // BLOCK)
    if n_samples % BLOCK:
        sizes.append(n_samples % BLOCK)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = [(c, sz, dist, cond, scale) for c, sz in zip(children, sizes)]

    workers = workers or int(os.environ.get(WORKERS_ENV, "1"))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_block_moments, jobs))
    else:
        parts = [_block_moments(j) for j in jobs]

    n, mean, m2 = _combine(parts)
    spread = m2 / (n - 1)
    diag = np.diag(spread)
    cov_se = np.sqrt((np.outer(diag, diag) + spread**2) / (n - 1))
    return TrajectoryStats(
        n_samples=n,
        mean=mean,
        cov=cond.cov + spread,
        mean_stderr=np.sqrt(diag / n),
        cov_stderr=cov_se,
        conditional_cov=cond.cov,
    )


def added_noise_estimate(stats: TrajectoryStats, v_in: OneModeCovariance):
    """Empirical ``N_added = (tr V_out - tr V_in)/2`` and its standard error."""
    spread = stats.cov - stats.conditional_cov
    n = stats.n_samples
    value = 0.5 * (np.trace(stats.cov) - np.trace(v_in.matrix))
    # Var(S00 + S11) for a Gaussian sample covariance
    var = 2.0 * (spread[0, 0] ** 2 + spread[1, 1] ** 2 + 2.0 * spread[0, 1] ** 2) / (n - 1)
    return float(value), float(0.5 * np.sqrt(var))


def sample_outcomes(v_in, v, g=np.pi / 4, n_samples: int = 1000, seed: int = 0, mean_in=(0.0, 0.0)) -> np.ndarray:
    """Raw ``(q, p)`` draws using the same block streams as :func:`run_ensemble`."""
    g = _geometry(g)
    dist = outcome_distribution(v_in, v, g, mean_in)
    sizes = [BLOCK] * (n_samples // BLOCK) + ([n_samples % BLOCK] if n_samples % BLOCK else [])
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    return np.concatenate([dist.sample(np.random.default_rng(c), sz) for c, sz in zip(children, sizes)])


def dump_samples_csv(path, outcomes: Sequence, theta: float) -> None:
    """Write ``q, p, Re mu, Im mu`` rows."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["q", "p", "mu_re", "mu_im"])
        for q, p in outcomes:
            mu = OutcomeSample(q, p, theta).mu
            w.writerow([f"{q:.12g}", f"{p:.12g}", f"{mu.real:.12g}", f"{mu.imag:.12g}"])
