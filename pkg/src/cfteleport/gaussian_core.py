r"""Covariance-matrix description of one- and two-mode Gaussian states.

Conventions used throughout the package:

* quadratures ``q = (a + a^\dagger)/sqrt(2)`` and ``p = (a - a^\dagger)/(i sqrt(2))``,
  so the vacuum has ``<q^2> = <p^2> = 1/2``;
* two-mode phase-space ordering ``(q1, p1, q2, p2)``;
* the Weyl displacement ``D(lam) = exp(lam a^\dagger - lam^* a)`` equals
  ``exp(i x . R)`` with ``x = sqrt(2) (Im lam, -Re lam)``, hence an undisplaced
  Gaussian state has characteristic function ``exp(-x^T V x / 2)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .exceptions import (
    InvariantError,
    MalformedInputError,
    NotBonaFideError,
    RegimeError,
)

#: Default slack on ``nu >= 1/2`` absorbing floating-point drift.
BONA_FIDE_TOL = 1e-9

OMEGA1 = np.array([[0.0, 1.0], [-1.0, 0.0]])
OMEGA2 = np.block([[OMEGA1, np.zeros((2, 2))], [np.zeros((2, 2)), OMEGA1]])

# partial transposition flips p2
_PT = np.diag([1.0, 1.0, 1.0, -1.0])


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class OneModeCovariance:
    """Quadrature covariance ``[[sqq, sqp], [sqp, spp]]`` of a single mode."""

    sqq: float
    sqp: float
    spp: float

    @classmethod
    def from_matrix(cls, m) -> "OneModeCovariance":
        m = np.asarray(m, dtype=float)
        if m.shape != (2, 2):
            raise MalformedInputError(f"expected a 2x2 matrix, got shape {m.shape}")
        if abs(m[0, 1] - m[1, 0]) > 1e-10 * max(1.0, np.abs(m).max()):
            raise MalformedInputError("one-mode covariance is not symmetric")
        return cls(float(m[0, 0]), 0.5 * float(m[0, 1] + m[1, 0]), float(m[1, 1]))

    @classmethod
    def vacuum(cls) -> "OneModeCovariance":
        return cls(0.5, 0.0, 0.5)

    @classmethod
    def thermal(cls, nbar: float) -> "OneModeCovariance":
        return cls(nbar + 0.5, 0.0, nbar + 0.5)

    @classmethod
    def squeezed_thermal(cls, nbar: float, s: float) -> "OneModeCovariance":
        """Thermal state squeezed along ``q`` by ``exp(-2 s)``."""
        return cls((nbar + 0.5) * np.exp(-2 * s), 0.0, (nbar + 0.5) * np.exp(2 * s))

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.sqq, self.sqp], [self.sqp, self.spp]])

    @property
    def det(self) -> float:
        return self.sqq * self.spp - self.sqp**2

    @property
    def trace(self) -> float:
        return self.sqq + self.spp

    def is_physical(self, tol: float = BONA_FIDE_TOL) -> bool:
        """Robertson-Schroedinger check ``det >= 1/4`` with positive diagonal."""
        return self.sqq > 0 and self.spp > 0 and self.det >= 0.25 - tol

    def mean_photon(self) -> float:
        """Thermal-like occupancy ``(sqq + spp - 1)/2`` of an undisplaced state."""
        return 0.5 * (self.trace - 1.0)


@dataclass(frozen=True)
class TwoModeCovariance:
    """Real symmetric 4x4 covariance in ``(q1, p1, q2, p2)`` ordering.

    Construction checks shape and symmetry only; use :func:`validate_two_mode`
    or :func:`require_bona_fide` for the quantum constraint.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (4, 4):
            raise MalformedInputError(f"expected a 4x4 matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise MalformedInputError("covariance matrix has non-finite entries")
        scale = max(1.0, float(np.abs(m).max()))
        if np.abs(m - m.T).max() > 1e-10 * scale:
            raise MalformedInputError("covariance matrix is not symmetric")
        object.__setattr__(self, "matrix", _frozen(0.5 * (m + m.T)))

    @classmethod
    def from_blocks(cls, v1, v2, c_block) -> "TwoModeCovariance":
        v1 = v1.matrix if isinstance(v1, OneModeCovariance) else np.asarray(v1, float)
        v2 = v2.matrix if isinstance(v2, OneModeCovariance) else np.asarray(v2, float)
        c_block = np.asarray(c_block, dtype=float)
        return cls(np.block([[v1, c_block], [c_block.T, v2]]))

    @classmethod
    def vacuum(cls) -> "TwoModeCovariance":
        return cls(0.5 * np.eye(4))

    @classmethod
    def tmsv(cls, r: float) -> "TwoModeCovariance":
        """Two-mode squeezed vacuum with ``q1 ~ q2`` and ``p1 ~ -p2`` correlations."""
        ch, sh = 0.5 * np.cosh(2 * r), 0.5 * np.sinh(2 * r)
        return cls.from_blocks(ch * np.eye(2), ch * np.eye(2), np.diag([sh, -sh]))

    @property
    def v1(self) -> OneModeCovariance:
        return OneModeCovariance.from_matrix(self.matrix[:2, :2])

    @property
    def v2(self) -> OneModeCovariance:
        return OneModeCovariance.from_matrix(self.matrix[2:, 2:])

    @property
    def c_block(self) -> np.ndarray:
        return np.array(self.matrix[:2, 2:])

    def congruence(self, s) -> "TwoModeCovariance":
        """Return ``S V S^T``."""
        s = np.asarray(s, dtype=float)
        return TwoModeCovariance(s @ self.matrix @ s.T)

    def invariants(self) -> Tuple[float, float, float, float]:
        """``(det V1, det V2, det C, det V)``, unchanged by local symplectics."""
        m = self.matrix
        return (
            float(np.linalg.det(m[:2, :2])),
            float(np.linalg.det(m[2:, 2:])),
            float(np.linalg.det(m[:2, 2:])),
            float(np.linalg.det(m)),
        )


@dataclass(frozen=True)
class ComplexFormParams:
    r"""Parameters of the complex Gaussian CF

    ``chi = exp[-(A1+1/2)|l1|^2 - (B1^* l1^2 + B1 l1^{*2})/2] x (same for mode 2)
    x exp[-F l1^* l2 - F^* l1 l2^* + G l1^* l2^* + G^* l1 l2]``.
    """

    a1: float
    a2: float
    b1c: complex
    b2c: complex
    f: complex
    g: complex


@dataclass(frozen=True)
class StandardFormI:
    """Local-squeezing class label ``V1 = b1 I, V2 = b2 I, C = diag(c, d)``."""

    b1: float
    b2: float
    c: float
    d: float

    def __post_init__(self):
        if self.b1 < 0.5 - BONA_FIDE_TOL or self.b2 < 0.5 - BONA_FIDE_TOL:
            raise NotBonaFideError(f"b1={self.b1}, b2={self.b2} must be >= 1/2")
        if self.c < abs(self.d) - 1e-12:
            raise MalformedInputError(f"standard form needs c >= |d| (c={self.c}, d={self.d})")

    @classmethod
    def tmsv(cls, r: float) -> "StandardFormI":
        b, c = 0.5 * np.cosh(2 * r), 0.5 * np.sinh(2 * r)
        return cls(b, b, c, -c)

    @property
    def symmetric(self) -> bool:
        return abs(self.b1 - self.b2) <= 1e-10 * max(1.0, self.b1)

    def covariance(self) -> TwoModeCovariance:
        return TwoModeCovariance.from_blocks(
            self.b1 * np.eye(2), self.b2 * np.eye(2), np.diag([self.c, self.d])
        )


@dataclass(frozen=True)
class BonaFideReport:
    positive: bool
    symplectic_eigenvalues: Tuple[float, float]
    bona_fide: bool


# --- local symplectic maps --------------------------------------------------


def rotation(phi: float) -> np.ndarray:
    """Phase-space rotation by ``phi`` (symplectic on one mode)."""
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]])


def squeezer(u: float) -> np.ndarray:
    """One-mode squeeze ``diag(sqrt(u), 1/sqrt(u))``; maps ``b I`` to ``b diag(u, 1/u)``."""
    return np.diag([np.sqrt(u), 1.0 / np.sqrt(u)])


def local(s1, s2) -> np.ndarray:
    """Direct sum of two one-mode transforms."""
    out = np.zeros((4, 4))
    out[:2, :2] = s1
    out[2:, 2:] = s2
    return out


def beam_splitter(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, 0, -s, 0], [0, c, 0, -s], [s, 0, c, 0], [0, s, 0, c]])


def two_mode_squeezer(r: float) -> np.ndarray:
    """Symplectic matrix mapping the two-mode vacuum to :meth:`TwoModeCovariance.tmsv`."""
    ch, sh = np.cosh(r), np.sinh(r)
    return np.array([[ch, 0, sh, 0], [0, ch, 0, -sh], [sh, 0, ch, 0], [0, -sh, 0, ch]])


def is_symplectic(s, tol: float = 1e-10) -> bool:
    s = np.asarray(s, dtype=float)
    omega = OMEGA1 if s.shape == (2, 2) else OMEGA2
    return bool(np.abs(s @ omega @ s.T - omega).max() <= tol)


# --- spectra ----------------------------------------------------------------


def _spectrum_from_invariants(delta: float, det_v: float) -> Tuple[float, float]:
    disc = max(delta * delta - 4.0 * det_v, 0.0)
    hi2 = 0.5 * (delta + np.sqrt(disc))
    lo2 = det_v / hi2 if hi2 > 0 else 0.0
    return float(np.sqrt(max(lo2, 0.0))), float(np.sqrt(hi2))


def _spectrum(m: np.ndarray) -> Tuple[float, float]:
    w, u = np.linalg.eigh(m)
    if w.min() > 0:
        # V^(1/2) (i Omega) V^(1/2) is Hermitian with eigenvalues +-nu
        root = (u * np.sqrt(w)) @ u.T
        ev = np.linalg.eigvalsh(root @ (1j * OMEGA2) @ root)
        nu = np.sort(ev[ev.size // 2:])
    else:
        nu = np.sort(np.abs(np.linalg.eigvals(1j * OMEGA2 @ m)))[::2]
    return float(nu[0]), float(nu[1])


def symplectic_eigenvalues(v: TwoModeCovariance) -> Tuple[float, float]:
    """Ascending symplectic eigenvalues (vacuum gives ``(1/2, 1/2)``)."""
    return _spectrum(v.matrix)


def symplectic_eigenvalues_closed_form(v: TwoModeCovariance) -> Tuple[float, float]:
    """``nu^2 = (D -+ sqrt(D^2 - 4 det V))/2`` with ``D = det V1 + det V2 + 2 det C``.

    Loses about half the digits near degenerate spectra (pure states).
    """
    d1, d2, dc, dv = v.invariants()
    return _spectrum_from_invariants(d1 + d2 + 2.0 * dc, dv)


def ptranspose(v: TwoModeCovariance) -> TwoModeCovariance:
    return v.congruence(_PT)


def ptranspose_symplectic_eigenvalues(v: TwoModeCovariance) -> Tuple[float, float]:
    return _spectrum(ptranspose(v).matrix)


def validate_two_mode(v, tol: float = BONA_FIDE_TOL) -> BonaFideReport:
    """Positivity and uncertainty-principle diagnostics for a two-mode covariance.

    ``v`` may be a :class:`TwoModeCovariance` or any 4x4 array; a non-symmetric
    array raises :class:`MalformedInputError`.
    """
    if not isinstance(v, TwoModeCovariance):
        v = TwoModeCovariance(v)
    positive = bool(np.linalg.eigvalsh(v.matrix).min() > 0)
    nu = symplectic_eigenvalues(v)
    return BonaFideReport(positive, nu, positive and nu[0] >= 0.5 - tol)


def require_bona_fide(v: TwoModeCovariance, tol: float = BONA_FIDE_TOL) -> TwoModeCovariance:
    rep = validate_two_mode(v, tol)
    if not rep.bona_fide:
        raise NotBonaFideError(
            f"not a quantum state: symplectic eigenvalues {rep.symplectic_eigenvalues}"
        )
    return v


# --- characteristic functions -----------------------------------------------


def _xvec(lam):
    lam = np.asarray(lam, dtype=complex)
    return np.sqrt(2.0) * lam.imag, -np.sqrt(2.0) * lam.real


def cf_eval_gaussian(v: TwoModeCovariance, lam1, lam2):
    """Characteristic function ``exp(-x^T V x/2)`` of an undisplaced two-mode state.

    ``lam1`` and ``lam2`` broadcast against each other; the result is complex
    (real-valued for undisplaced states) with the broadcast shape.
    """
    x = np.stack(np.broadcast_arrays(*_xvec(lam1), *_xvec(lam2)), axis=-1)
    quad = np.einsum("...i,ij,...j->...", x, v.matrix, x)
    return np.exp(-0.5 * quad).astype(complex)


def cf_eval_complex_form(p: ComplexFormParams, lam1, lam2):
    """Evaluate the CF directly from its complex parameters."""
    l1 = np.asarray(lam1, dtype=complex)
    l2 = np.asarray(lam2, dtype=complex)

    def mode(a, b, lam):
        return -(a + 0.5) * abs(lam) ** 2 - 0.5 * np.conj(b) * lam**2 - 0.5 * b * np.conj(lam) ** 2

    cross = (
        -p.f * np.conj(l1) * l2
        - np.conj(p.f) * l1 * np.conj(l2)
        + p.g * np.conj(l1) * np.conj(l2)
        + np.conj(p.g) * l1 * l2
    )
    return np.exp(mode(p.a1, p.b1c, l1) + mode(p.a2, p.b2c, l2) + cross)


def covariance_from_complex_form(p: ComplexFormParams) -> TwoModeCovariance:
    def mode(a, b):
        return [[a + 0.5 - b.real, -b.imag], [-b.imag, a + 0.5 + b.real]]

    f, g = complex(p.f), complex(p.g)
    c_block = [
        [f.real + g.real, g.imag - f.imag],
        [f.imag + g.imag, f.real - g.real],
    ]
    return TwoModeCovariance.from_blocks(
        mode(p.a1, complex(p.b1c)), mode(p.a2, complex(p.b2c)), c_block
    )


def complex_form_from_covariance(v: TwoModeCovariance) -> ComplexFormParams:
    def mode(m: OneModeCovariance):
        return 0.5 * (m.sqq + m.spp) - 0.5, complex(0.5 * (m.spp - m.sqq), -m.sqp)

    a1, b1c = mode(v.v1)
    a2, b2c = mode(v.v2)
    (cqq, cqp), (cpq, cpp) = v.c_block
    f = complex(0.5 * (cqq + cpp), 0.5 * (cpq - cqp))
    g = complex(0.5 * (cqq - cpp), 0.5 * (cpq + cqp))
    return ComplexFormParams(a1, a2, b1c, b2c, f, g)


# --- standard form ------------------------------------------------------------


def _normalizer(m: np.ndarray) -> Tuple[float, np.ndarray]:
    """``(b, S)`` with ``S m S^T = b I`` and ``S`` symplectic."""
    b = np.sqrt(np.linalg.det(m))
    w, u = np.linalg.eigh(m / b)
    return float(b), (u / np.sqrt(w)) @ u.T


def to_standard_form_I(
    v: TwoModeCovariance,
) -> Tuple[StandardFormI, Tuple[np.ndarray, np.ndarray]]:
    """Reduce ``v`` by local symplectics to ``(b1 I, b2 I, diag(c, d))``.

    Returns the standard form and the pair ``(S1, S2)`` such that
    ``local(S1, S2) @ V @ local(S1, S2).T`` is the standard-form matrix.
    The sign convention is ``c >= |d|``; ``d`` carries the sign of ``det C``.
    """
    require_bona_fide(v)
    b1, s1 = _normalizer(v.matrix[:2, :2])
    b2, s2 = _normalizer(v.matrix[2:, 2:])
    cprime = s1 @ v.c_block @ s2.T
    u, sv, wt = np.linalg.svd(cprime)
    w = wt.T
    sv = sv.copy()
    if np.linalg.det(u) < 0:
        u[:, 1] *= -1
        sv[1] *= -1
    if np.linalg.det(w) < 0:
        w[:, 1] *= -1
        sv[1] *= -1
    t1, t2 = u.T @ s1, w.T @ s2
    s = StandardFormI(b1, b2, float(sv[0]), float(sv[1]))

    # cross-check against the invariant route
    ref = standard_form_from_invariants(*v.invariants())
    scale = max(1.0, b1, b2)
    if max(abs(ref.c - s.c), abs(ref.d - s.d)) > 1e-6 * scale:
        raise InvariantError(f"constructive reduction {s} disagrees with invariants {ref}")
    return s, (t1, t2)


def standard_form_from_invariants(
    det_v1: float, det_v2: float, det_c: float, det_v: float
) -> StandardFormI:
    """Solve ``c d = det C`` and ``(b1 b2 - c^2)(b1 b2 - d^2) = det V`` for ``(c, d)``."""
    if det_v1 <= 0 or det_v2 <= 0:
        raise InvariantError("local determinants must be positive")
    b1, b2 = np.sqrt(det_v1), np.sqrt(det_v2)
    pb = b1 * b2
    ssum = (pb * pb + det_c * det_c - det_v) / pb  # c^2 + d^2
    disc = ssum * ssum - 4.0 * det_c * det_c
    if disc < -1e-12 * max(1.0, ssum * ssum) or ssum < -1e-12:
        raise InvariantError(f"no real (c, d) for invariants (discriminant {disc:.3e})")
    root = np.sqrt(max(disc, 0.0))
    c2 = 0.5 * (max(ssum, 0.0) + root)
    c = np.sqrt(c2)
    d = det_c / c if c > 0 else 0.0
    return StandardFormI(float(b1), float(b2), float(c), float(d))


def ptranspose_min_eigenvalue(s: StandardFormI, method: str = "spectrum") -> float:
    """Smallest symplectic eigenvalue of the partially transposed covariance.

    ``method="closed"`` uses ``sqrt((b1 - |d|)(b1 - c))``, valid for symmetric
    states only and exact when ``d <= 0``; ``method="spectrum"`` works for
    any state.
    """
    if method == "closed":
        if not s.symmetric:
            raise RegimeError("closed-form c~- requires b1 == b2")
        return float(np.sqrt(max((s.b1 - abs(s.d)) * (s.b1 - s.c), 0.0)))
    if method != "spectrum":
        raise ValueError(f"unknown method {method!r}")
    return ptranspose_symplectic_eigenvalues(s.covariance())[0]


def classicality_check(m: OneModeCovariance, tol: float = 1e-12) -> bool:
    """True iff ``V - I/2`` is positive semidefinite (well-defined P function)."""
    return bool(np.linalg.eigvalsh(m.matrix - 0.5 * np.eye(2)).min() >= -tol)


def random_covariance(
    rng: np.random.Generator, max_squeeze: float = 1.0, max_thermal: float = 1.5
) -> TwoModeCovariance:
    """Random bona fide covariance ``S diag(nu1, nu1, nu2, nu2) S^T``.

    ``S`` chains random local rotations and squeezers, a beam splitter and a
    two-mode squeezer, which together reach a dense set of two-mode states.
    """
    nu = 0.5 + rng.uniform(0.0, max_thermal, size=2)
    v = np.diag([nu[0], nu[0], nu[1], nu[1]])

    def rand_local():
        return local(
            rotation(rng.uniform(0, np.pi)) @ squeezer(np.exp(rng.uniform(-max_squeeze, max_squeeze))),
            rotation(rng.uniform(0, np.pi)) @ squeezer(np.exp(rng.uniform(-max_squeeze, max_squeeze))),
        )

    s = (
        rand_local()
        @ two_mode_squeezer(rng.uniform(0.0, max_squeeze))
        @ beam_splitter(rng.uniform(0, np.pi))
        @ rand_local()
    )
    return TwoModeCovariance(s @ v @ s.T)
