"""Teleportation channel for Gaussian resources.

Alice mixes the input with mode 1 of the resource on a beam splitter of
angle ``theta`` and measures ``q = cos(theta) q_in - sin(theta) q_1`` and
``p = sin(theta) p_in + cos(theta) p_1``; Bob displaces mode 2 by
``mu = (q/cos(theta) + i p/sin(theta))/sqrt(2)``.  Averaged over outcomes the
input is superposed with a classical Gaussian field ``M`` whose covariance
depends only on the resource and ``theta``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import GeometryError
from .gaussian_core import (
    OneModeCovariance,
    StandardFormI,
    TwoModeCovariance,
    cf_eval_gaussian,
    local,
    require_bona_fide,
    to_standard_form_I,
)

BALANCED = np.pi / 4


@dataclass(frozen=True)
class MeasurementGeometry:
    """Beam-splitter rotation angle (radians), strictly inside ``(0, pi/2)``."""

    theta: float = BALANCED

    def __post_init__(self):
        t = float(self.theta)
        if not (np.isfinite(t) and 0.0 < t < np.pi / 2):
            raise GeometryError(f"theta={t} must lie in the open interval (0, pi/2)")
        object.__setattr__(self, "theta", t)

    @property
    def tan(self) -> float:
        return float(np.tan(self.theta))

    @property
    def cot(self) -> float:
        return float(1.0 / np.tan(self.theta))


@dataclass(frozen=True)
class EPRMoments:
    """Second moments of the commuting resource combinations

    ``Q = cos(theta) q2 - sin(theta) q1`` and ``P = sin(theta) p2 + cos(theta) p1``.
    """

    q2: float
    p2: float
    qp: float


@dataclass(frozen=True)
class InducedField:
    vm: OneModeCovariance
    n_added: float


@dataclass(frozen=True)
class TeleportReport:
    induced: InducedField
    v_out: Optional[OneModeCovariance]
    geometry: MeasurementGeometry
    resource: StandardFormI


def _geometry(g) -> MeasurementGeometry:
    return g if isinstance(g, MeasurementGeometry) else MeasurementGeometry(g)


def epr_vectors(g: MeasurementGeometry):
    """Row vectors of ``Q`` and ``P`` in ``(q1, p1, q2, p2)`` ordering."""
    c, s = np.cos(g.theta), np.sin(g.theta)
    return np.array([-s, 0.0, c, 0.0]), np.array([0.0, c, 0.0, s])


def epr_moments(v: TwoModeCovariance, g=BALANCED) -> EPRMoments:
    g = _geometry(g)
    m = v.matrix
    c, s = np.cos(g.theta), np.sin(g.theta)
    q2 = c * c * m[2, 2] + s * s * m[0, 0] - 2 * s * c * m[0, 2]
    p2 = s * s * m[3, 3] + c * c * m[1, 1] + 2 * s * c * m[1, 3]
    qp = c * s * m[2, 3] - s * c * m[0, 1] + c * c * m[2, 1] - s * s * m[0, 3]
    return EPRMoments(float(q2), float(p2), float(qp))


def _induced_direct(v: TwoModeCovariance, g: MeasurementGeometry) -> OneModeCovariance:
    m = v.matrix
    t, ct = g.tan, g.cot
    sqq = 0.5 + m[2, 2] + t * t * m[0, 0] - 2 * t * m[0, 2]
    sqp = m[2, 3] - m[0, 1] + ct * m[2, 1] - t * m[0, 3]
    spp = 0.5 + m[3, 3] + ct * ct * m[1, 1] + 2 * ct * m[1, 3]
    return OneModeCovariance(float(sqq), float(sqp), float(spp))


def _induced_epr(v: TwoModeCovariance, g: MeasurementGeometry) -> OneModeCovariance:
    e = epr_moments(v, g)
    c, s = np.cos(g.theta), np.sin(g.theta)
    return OneModeCovariance(
        0.5 + e.q2 / (c * c),
        2.0 * e.qp / np.sin(2 * g.theta),
        0.5 + e.p2 / (s * s),
    )


def induced_covariance(v: TwoModeCovariance, g=BALANCED, path: str = "direct") -> InducedField:
    """Covariance of the measurement-induced field and its mean photon number.

    ``path`` selects the element-wise formula (``"direct"``) or the route
    through the EPR moments (``"epr"``); ``"checked"`` computes both and
    raises ``AssertionError`` if they disagree.
    """
    g = _geometry(g)
    require_bona_fide(v)
    if path == "direct":
        vm = _induced_direct(v, g)
    elif path == "epr":
        vm = _induced_epr(v, g)
    elif path == "checked":
        vm = _induced_direct(v, g)
        other = _induced_epr(v, g)
        scale = max(1.0, vm.trace)
        assert np.allclose(vm.matrix, other.matrix, rtol=0, atol=1e-10 * scale), (vm, other)
    else:
        raise ValueError(f"unknown path {path!r}")
    return InducedField(vm, 0.5 * (vm.sqq + vm.spp - 1.0))


def added_noise(v: TwoModeCovariance, g=BALANCED) -> float:
    """Mean photon number added to the input, ``(<Q^2>/cos^2 + <P^2>/sin^2)/2``."""
    g = _geometry(g)
    require_bona_fide(v)
    e = epr_moments(v, g)
    return float(0.5 * (e.q2 / np.cos(g.theta) ** 2 + e.p2 / np.sin(g.theta) ** 2))


def gaussian_output(v_in: OneModeCovariance, v: TwoModeCovariance, g=BALANCED) -> TeleportReport:
    """Output covariance ``v_in + V_M - I/2`` for an undisplaced Gaussian input.

    Displaced inputs keep their first moments (unity gain) and have the same
    output covariance.
    """
    g = _geometry(g)
    induced = induced_covariance(v, g)
    v_out = OneModeCovariance.from_matrix(v_in.matrix + induced.vm.matrix - 0.5 * np.eye(2))
    resource, _ = to_standard_form_I(v)
    return TeleportReport(induced, v_out, g, resource)


def resource_cf_factor(v: TwoModeCovariance, g, lam):
    """``chi_AB(Re(lam) cot(theta) - i Im(lam) tan(theta), lam)``.

    This is the normally ordered CF of the induced field: the output CF is the
    input CF times this factor.  ``lam`` may be an array.
    """
    g = _geometry(g)
    lam = np.asarray(lam, dtype=complex)
    lam1 = lam.real * g.cot - 1j * lam.imag * g.tan
    return cf_eval_gaussian(v, lam1, lam)


def unbalanced_to_balanced(v: TwoModeCovariance, g) -> TwoModeCovariance:
    """Absorb an unbalanced measurement into a local squeeze of mode 1.

    ``q1 -> tan(theta) q1``, ``p1 -> cot(theta) p1``; the added noise of the
    result at ``theta = pi/4`` equals that of ``v`` at ``theta``.
    """
    g = _geometry(g)
    return v.congruence(local(np.diag([g.tan, g.cot]), np.eye(2)))


def gaussian_overlap(
    v_a: OneModeCovariance, v_b: OneModeCovariance, mean_a=(0.0, 0.0), mean_b=(0.0, 0.0)
) -> float:
    """``Tr[rho_a rho_b]`` for one-mode Gaussian states; the fidelity if one is pure."""
    s = v_a.matrix + v_b.matrix
    delta = np.asarray(mean_a, float) - np.asarray(mean_b, float)
    return float(np.exp(-0.5 * delta @ np.linalg.solve(s, delta)) / np.sqrt(np.linalg.det(s)))
