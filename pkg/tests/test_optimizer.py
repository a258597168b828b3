import numpy as np
import pytest

from cfteleport.channel import added_noise
from cfteleport.exceptions import DegenerateStateError, DomainError, RegimeError, SingularStateError
from cfteleport.gaussian_core import StandardFormI, local, squeezer
from cfteleport.optimizer import (
    OptimizerConfig,
    SqueezeParams,
    grid_oracle,
    noise_objective,
    optimize,
    optimize_general,
    optimize_symmetric,
    separability,
    stationarity_residuals,
)

EXAMPLE = StandardFormI(1.0, 1.0, 0.6, -0.2)


def test_objective_examples():
    assert noise_objective(EXAMPLE, (1, 1)) == pytest.approx(1.2, abs=1e-15)
    assert noise_objective(StandardFormI(0.5, 0.5, 0, 0), (1, 1)) == pytest.approx(1.0)
    # b1 = 1, u1 = 2: (2 + 1/2)/2 = 1.25 from mode 1 alone
    assert noise_objective(StandardFormI(1.0, 0.5, 0, 0), (2, 1)) == pytest.approx(1.25 + 0.5)


def test_objective_is_noise_after_local_squeezing(rng):
    for _ in range(100):
        b1, b2 = rng.uniform(0.5, 3, size=2)
        c = rng.uniform(0, np.sqrt((b1 - 0.5) * (b2 - 0.5)))
        d = -rng.uniform(0, c)
        s = StandardFormI(b1, b2, c, d)
        u1, u2 = np.exp(rng.uniform(-1.5, 1.5, size=2))
        v = s.covariance().congruence(local(squeezer(u1), squeezer(u2)))
        assert noise_objective(s, (u1, u2)) == pytest.approx(added_noise(v), rel=1e-12)


def test_residual_examples():
    # at the closed-form point both equations hold
    r = stationarity_residuals(EXAMPLE, (np.sqrt(2), np.sqrt(2)))
    np.testing.assert_allclose(r, (0, 0), atol=1e-14)
    r1, r2 = stationarity_residuals(EXAMPLE, (1, 1))
    assert r1 == 0.0 and r2 == pytest.approx(-(0.6 - 0.2) ** 2)


def test_symmetric_closed_form():
    res = optimize_symmetric(EXAMPLE)
    assert res.v.u1 == res.v.u2 == pytest.approx(np.sqrt(2), abs=1e-15)
    assert res.n_min == pytest.approx(2 * np.sqrt(0.8 * 0.4), abs=1e-15)
    num = optimize_general(EXAMPLE)
    assert num.v.u1 == pytest.approx(np.sqrt(2), abs=1e-10)
    assert num.n_min == pytest.approx(res.n_min, abs=1e-12)


def test_product_of_gradient_equations_has_spurious_root():
    """The residual pair also vanishes where the gradient does not.

    For symmetric states ``u = sqrt((b + |d|)/(b + c))`` solves both residual
    equations but is not a stationary point of the noise.
    """
    b, c, a = 1.0, 0.6, 0.2
    u = np.sqrt((b + a) / (b + c))
    assert u**2 == pytest.approx(0.75)
    np.testing.assert_allclose(stationarity_residuals(EXAMPLE, (u, u)), (0, 0), atol=1e-15)
    h = 1e-6
    slope = (noise_objective(EXAMPLE, (u + h, u + h)) - noise_objective(EXAMPLE, (u - h, u - h))) / (2 * h)
    assert abs(slope) > 0.1
    assert noise_objective(EXAMPLE, (u, u)) > optimize(EXAMPLE).n_min


def test_sign_of_d_irrelevant(rng):
    s = StandardFormI(1.3, 0.9, 0.5, -0.3)
    t = StandardFormI(1.3, 0.9, 0.5, 0.3)
    assert optimize(s).n_min == pytest.approx(optimize(t).n_min, abs=1e-12)


def test_general_matches_grid(rng):
    for _ in range(20):
        b1, b2 = rng.uniform(0.5, 3, size=2)
        c = rng.uniform(0, np.sqrt((b1 - 0.5) * (b2 - 0.5)))
        s = StandardFormI(b1, b2, c, -rng.uniform(0, c))
        res = optimize_general(s)
        g_min, _, boundary = grid_oracle(s)
        assert not boundary
        assert abs(res.n_min - g_min) <= 1e-6
        assert max(map(abs, res.residuals)) <= 1e-8
        assert res.stationary_points[0][2] == pytest.approx(res.n_min)


def test_regime_and_domain_errors():
    with pytest.raises(RegimeError):
        optimize_symmetric(StandardFormI(1.0, 2.0, 0.5, -0.5))
    with pytest.raises(SingularStateError):
        optimize_symmetric(StandardFormI(1.0, 1.0, 1.0, 0.0))
    with pytest.raises(DegenerateStateError):
        optimize_general(StandardFormI(1.0, 1.0, 1.0, 0.0))
    with pytest.raises(DomainError):
        SqueezeParams(0.0, 1.0)
    with pytest.raises(DomainError):
        noise_objective(EXAMPLE, (-1.0, 1.0))


def test_config_is_deterministic():
    s = StandardFormI(1.7, 0.8, 0.6, -0.1)
    a = optimize_general(s, OptimizerConfig(seed=3))
    b = optimize_general(s, OptimizerConfig(seed=3))
    assert a == b


class TestSeparability:
    def test_boundary_example(self):
        rep = separability(StandardFormI(1.0, 1.0, 0.4, -0.4))
        assert rep.delta_epr == pytest.approx(2.4, abs=1e-14)
        assert rep.c_tilde_minus == pytest.approx(0.6, abs=1e-14)
        assert not rep.entangled and rep.symmetric

    @pytest.mark.parametrize("r", [0.1, 1.0])
    def test_tmsv(self, r):
        rep = separability(StandardFormI.tmsv(r))
        assert rep.delta_epr == pytest.approx(2 * np.exp(-2 * r), rel=1e-12)
        assert rep.entangled

    def test_asymmetric(self):
        rep = separability(StandardFormI(2.0, 1.0, 0.5, -0.5))
        assert rep.delta_epr is None and not rep.symmetric
        assert rep.c_tilde_minus == rep.ptranspose_min

    def test_positive_d(self):
        # closed form uses |d| and is not the true partial-transpose value when d > 0
        s = StandardFormI(1.0, 1.0, 0.4, 0.2)
        rep = separability(s)
        assert rep.c_tilde_minus == pytest.approx(np.sqrt(0.8 * 0.6))
        assert rep.ptranspose_min == pytest.approx(np.sqrt(0.6 * 1.2))
        assert not rep.entangled
