"""Sampled one-mode characteristic functions and the teleportation product law.

A :class:`CFGrid` holds ``chi(lam) = Tr[rho D(lam)]`` at the cell centres of a
uniform ``n x n`` grid on ``[-L, L]^2``; ``samples[j, k]`` is taken at
``lam = axis[j] + 1j * axis[k]``.  ``n`` must be odd so the origin is a
sample.  Teleporting through a Gaussian resource multiplies the grid
pointwise by :func:`cfteleport.channel.resource_cf_factor`.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
from scipy.special import eval_laguerre

from .channel import MeasurementGeometry, resource_cf_factor
from .exceptions import GridError
from .gaussian_core import OneModeCovariance, TwoModeCovariance, require_bona_fide

DEFAULT_EXTENT = 6.0
DEFAULT_N = 257
MIN_N = 65


# --- state presets ---------------------------------------------------------------


def gaussian_cf(v: OneModeCovariance, lam, mean=(0.0, 0.0)):
    """``exp(i x.d - x^T V x/2)`` with ``x = sqrt(2)(Im lam, -Re lam)``."""
    lam = np.asarray(lam, dtype=complex)
    x1, x2 = np.sqrt(2.0) * lam.imag, -np.sqrt(2.0) * lam.real
    quad = v.sqq * x1 * x1 + 2 * v.sqp * x1 * x2 + v.spp * x2 * x2
    return np.exp(1j * (x1 * mean[0] + x2 * mean[1]) - 0.5 * quad)


def _coherent_matrix_element(beta, gamma, lam):
    """``<beta| D(lam) |gamma>``."""
    delta = lam + gamma
    overlap = np.exp(-0.5 * abs(beta) ** 2 - 0.5 * np.abs(delta) ** 2 + np.conj(beta) * delta)
    return overlap * np.exp(0.5 * (lam * np.conj(gamma) - np.conj(lam) * gamma))


@dataclass(frozen=True)
class Coherent:
    alpha: complex = 0.0

    is_gaussian = True
    is_pure = True

    @property
    def label(self) -> str:
        return f"coherent({complex(self.alpha):g})"

    def covariance(self) -> OneModeCovariance:
        return OneModeCovariance.vacuum()

    def mean(self) -> np.ndarray:
        a = complex(self.alpha)
        return np.sqrt(2.0) * np.array([a.real, a.imag])

    def mean_photon(self) -> float:
        return abs(complex(self.alpha)) ** 2

    def cf(self, lam):
        return gaussian_cf(self.covariance(), lam, self.mean())


@dataclass(frozen=True)
class Fock:
    n: int = 0

    is_gaussian = False
    is_pure = True

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise ValueError(f"Fock index must be a nonnegative integer, got {self.n}")

    @property
    def label(self) -> str:
        return f"fock({self.n})"

    def mean_photon(self) -> float:
        return float(self.n)

    def cf(self, lam):
        x = np.abs(np.asarray(lam, dtype=complex)) ** 2
        return (np.exp(-0.5 * x) * eval_laguerre(int(self.n), x)).astype(complex)


@dataclass(frozen=True)
class Cat:
    """``N (|alpha> + exp(i phase) |-alpha>)``."""

    alpha: complex = 1.0
    phase: float = 0.0

    is_gaussian = False
    is_pure = True

    @property
    def label(self) -> str:
        return f"cat({complex(self.alpha):g},{self.phase:g})"

    def _norm(self) -> float:
        a = complex(self.alpha)
        return 1.0 / (2.0 + 2.0 * np.cos(self.phase) * np.exp(-2 * abs(a) ** 2))

    def mean_photon(self) -> float:
        a2 = abs(complex(self.alpha)) ** 2
        k = np.cos(self.phase) * np.exp(-2 * a2)
        return float(a2 * (1 - k) / (1 + k))

    def cf(self, lam):
        lam = np.asarray(lam, dtype=complex)
        a = complex(self.alpha)
        ph = np.exp(1j * self.phase)
        m = _coherent_matrix_element
        total = (
            m(a, a, lam)
            + m(-a, -a, lam)
            + ph * m(a, -a, lam)
            + np.conj(ph) * m(-a, a, lam)
        )
        return self._norm() * total


@dataclass(frozen=True)
class SqueezedThermal:
    nbar: float = 0.0
    s: float = 0.0

    is_gaussian = True

    def __post_init__(self):
        if self.nbar < 0:
            raise ValueError(f"thermal occupancy must be >= 0, got {self.nbar}")

    @property
    def is_pure(self) -> bool:
        return self.nbar == 0

    @property
    def label(self) -> str:
        return f"squeezed_thermal({self.nbar:g},{self.s:g})"

    def covariance(self) -> OneModeCovariance:
        return OneModeCovariance.squeezed_thermal(self.nbar, self.s)

    def mean(self) -> np.ndarray:
        return np.zeros(2)

    def mean_photon(self) -> float:
        return self.covariance().mean_photon()

    def cf(self, lam):
        return gaussian_cf(self.covariance(), lam)


StatePreset = Union[Coherent, Fock, Cat, SqueezedThermal]


# --- grids -------------------------------------------------------------------------


@dataclass(frozen=True)
class CFGrid:
    extent: float
    n: int
    samples: np.ndarray
    label: str = ""

    def __post_init__(self):
        _check_shape(self.extent, self.n)
        a = np.array(self.samples, dtype=complex)
        if a.shape != (self.n, self.n):
            raise GridError(f"samples shape {a.shape} does not match n={self.n}")
        a.setflags(write=False)
        object.__setattr__(self, "samples", a)

    @property
    def spacing(self) -> float:
        return 2.0 * self.extent / self.n

    @property
    def axis(self) -> np.ndarray:
        return cell_centres(self.extent, self.n)

    @property
    def lam(self) -> np.ndarray:
        ax = self.axis
        return ax[:, None] + 1j * ax[None, :]

    @property
    def origin(self) -> complex:
        c = self.n // 2
        return complex(self.samples[c, c])

    def reflected(self) -> np.ndarray:
        """Samples at ``-lam``."""
        return self.samples[::-1, ::-1]

    def hermiticity_error(self) -> float:
        return float(np.abs(self.reflected() - np.conj(self.samples)).max())


def _check_shape(extent, n):
    if not extent > 0:
        raise GridError(f"extent must be positive, got {extent}")
    if int(n) != n or n % 2 == 0:
        raise GridError(f"n must be odd so that the origin is a sample, got {n}")
    if n < MIN_N:
        raise GridError(f"n must be at least {MIN_N}, got {n}")


def cell_centres(extent: float, n: int) -> np.ndarray:
    h = 2.0 * extent / n
    return -extent + h * (np.arange(n) + 0.5)


def build_cf(preset: StatePreset, extent: float = DEFAULT_EXTENT, n: int = DEFAULT_N) -> CFGrid:
    _check_shape(extent, n)
    ax = cell_centres(extent, n)
    lam = ax[:, None] + 1j * ax[None, :]
    return CFGrid(extent, n, preset.cf(lam), preset.label)


def _check_compatible(a: CFGrid, b: CFGrid):
    if a.n != b.n or not np.isclose(a.extent, b.extent, rtol=1e-14, atol=0):
        raise GridError(f"incompatible grids: (L={a.extent}, n={a.n}) vs (L={b.extent}, n={b.n})")


def teleport_cf(grid: CFGrid, v: TwoModeCovariance, g=np.pi / 4) -> CFGrid:
    """Output CF ``chi_in(lam) * chi_AB(Re lam cot(theta) - i Im lam tan(theta), lam)``."""
    g = g if isinstance(g, MeasurementGeometry) else MeasurementGeometry(g)
    require_bona_fide(v)
    factor = resource_cf_factor(v, g, grid.lam)
    return CFGrid(grid.extent, grid.n, grid.samples * factor, f"teleported {grid.label}".strip())


def fidelity_overlap(a: CFGrid, b: CFGrid) -> float:
    """``Tr[rho_a rho_b] = (1/pi) int chi_a(lam) chi_b(-lam) d^2 lam`` by the midpoint rule.

    Equals the fidelity when either state is pure.
    """
    _check_compatible(a, b)
    total = np.sum(a.samples * b.reflected()) * a.spacing**2 / np.pi
    return float(total.real)


@dataclass(frozen=True)
class PhotonNumber:
    value: float
    coarse: bool


def mean_photon(a: CFGrid) -> PhotonNumber:
    """``<a^dag a> = -d^2 chi / d lam d lam^* |_0 - 1/2`` by finite differences.

    ``d^2/d lam d lam^*`` is a quarter of the Laplacian; stencils of one and
    two cells are combined by Richardson extrapolation.
    """
    c, h = a.n // 2, a.spacing
    chi = a.samples.real

    def laplacian(m):
        s = chi[c + m, c] + chi[c - m, c] + chi[c, c + m] + chi[c, c - m] - 4.0 * chi[c, c]
        return s / (m * h) ** 2

    lap = (4.0 * laplacian(1) - laplacian(2)) / 3.0
    return PhotonNumber(float(-0.25 * lap - 0.5), coarse=bool(h > 0.1))


@dataclass(frozen=True)
class WignerGrid:
    x: np.ndarray
    p: np.ndarray
    values: np.ndarray  # values[i, j] = W(x[i], p[j])
    imag_residue: float

    def integral(self) -> float:
        return float(self.values.sum() * (self.x[1] - self.x[0]) * (self.p[1] - self.p[0]))


def wigner_transform(a: CFGrid, x_max: float = 6.0, n_out: int = 121) -> WignerGrid:
    """``W(x, p) = (1/2 pi^2) int chi(lam) exp(-i sqrt(2)(x Im lam - p Re lam)) d^2 lam``.

    Normalized to unit integral over ``dx dp``; vacuum peaks at ``1/pi``.
    """
    chi = 0.5 * (a.samples + np.conj(a.reflected()))
    ax = a.axis
    xs = np.linspace(-x_max, x_max, n_out)
    ev = np.exp(-1j * np.sqrt(2.0) * np.outer(xs, ax))  # [x, Im lam]
    eu = np.exp(1j * np.sqrt(2.0) * np.outer(xs, ax))  # [p, Re lam]
    w = ev @ chi.T @ eu.T * a.spacing**2 / (2.0 * np.pi**2)
    return WignerGrid(xs, xs.copy(), w.real, float(np.abs(w.imag).max()))


# --- I/O ------------------------------------------------------------------------------


def save_grid(grid: CFGrid, path) -> None:
    """Text export: a ``#`` header with extent, n and label, then ``re im`` rows (row-major)."""
    flat = grid.samples.reshape(-1)
    header = f"extent={grid.extent!r}\nn={grid.n}\nlabel={grid.label}"
    np.savetxt(path, np.column_stack([flat.real, flat.imag]), header=header, fmt="%.17g")


def load_grid(path) -> CFGrid:
    meta = {}
    with open(path) as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            key, _, val = line[1:].strip().partition("=")
            meta[key] = val
    try:
        extent, n = float(meta["extent"]), int(meta["n"])
    except (KeyError, ValueError) as exc:
        raise GridError(f"{path}: missing or malformed header") from exc
    data = np.loadtxt(path, ndmin=2)
    if data.shape != (n * n, 2):
        raise GridError(f"{path}: expected {n * n} rows of (re, im), got {data.shape}")
    return CFGrid(extent, n, (data[:, 0] + 1j * data[:, 1]).reshape(n, n), meta.get("label", ""))


def save_wigner_csv(w: WignerGrid, path) -> None:
    xx, pp = np.meshgrid(w.x, w.p, indexing="ij")
    rows = np.column_stack([xx.ravel(), pp.ravel(), w.values.ravel()])
    np.savetxt(Path(path), rows, delimiter=",", header="x,p,W", comments="", fmt="%.12g")
