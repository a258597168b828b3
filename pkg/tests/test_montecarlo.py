import numpy as np
import pytest
from scipy import stats

from cfteleport.channel import gaussian_output
from cfteleport.exceptions import DegenerateConditioningError, NotBonaFideError
from cfteleport.gaussian_core import OneModeCovariance, TwoModeCovariance, random_covariance
from cfteleport.montecarlo import (
    OutcomeSample,
    added_noise_estimate,
    conditional_bob_state,
    dump_samples_csv,
    outcome_distribution,
    run_ensemble,
    sample_outcomes,
)

VAC = OneModeCovariance.vacuum()


def test_outcome_distribution_vacuum():
    d = outcome_distribution(VAC, TwoModeCovariance.vacuum(), np.pi / 3)
    np.testing.assert_allclose(d.cov, 0.5 * np.eye(2), atol=1e-15)
    np.testing.assert_allclose(d.mean, 0, atol=0)


def test_outcome_distribution_tmsv():
    r = 0.7
    d = outcome_distribution(VAC, TwoModeCovariance.tmsv(r), np.pi / 4, mean_in=(1.0, -2.0))
    # (q_in - q1)/sqrt2 and (p_in + p1)/sqrt2
    var = 0.5 * (0.5 + np.cosh(2 * r) / 2)
    np.testing.assert_allclose(d.cov, var * np.eye(2), atol=1e-14)
    np.testing.assert_allclose(d.mean, np.array([1.0, -2.0]) / np.sqrt(2), atol=1e-15)


def test_outcome_sample_mu():
    s = OutcomeSample(1.0, 2.0, np.pi / 4)
    assert s.mu == pytest.approx(1.0 + 2.0j)


def test_marginals_pass_ks(rng):
    v = random_covariance(rng)
    d = outcome_distribution(VAC, v, 0.5)
    xs = sample_outcomes(VAC, v, 0.5, n_samples=20000, seed=5)
    for k in range(2):
        z = (xs[:, k] - d.mean[k]) / np.sqrt(d.cov[k, k])
        assert stats.kstest(z, "norm").pvalue > 0.01


def test_conditional_covariance_independent_of_outcome():
    v = TwoModeCovariance.tmsv(0.9)
    m1, c1 = conditional_bob_state(VAC, v, np.pi / 4, OutcomeSample(0.0, 0.0, np.pi / 4))
    m2, c2 = conditional_bob_state(VAC, v, np.pi / 4, OutcomeSample(1.5, -0.3, np.pi / 4))
    np.testing.assert_allclose(c1.matrix, c2.matrix)
    np.testing.assert_allclose(m1, 0)
    assert np.abs(m2).max() > 0.1


def test_vacuum_resource_empirical():
    st = run_ensemble(VAC, TwoModeCovariance.vacuum(), n_samples=100_000, seed=1)
    z = (st.cov - 1.5 * np.eye(2)) / st.cov_stderr
    assert np.abs(z).max() < 4


def test_tmsv_added_noise():
    st = run_ensemble(VAC, TwoModeCovariance.tmsv(1.0), n_samples=100_000, seed=2)
    n, se = added_noise_estimate(st, VAC)
    assert abs(n - np.exp(-2)) < 3 * se
    assert se < 1e-3


def test_displaced_input_keeps_mean():
    st = run_ensemble(VAC, TwoModeCovariance.tmsv(0.5), n_samples=50_000, seed=3, mean_in=(2.0, -1.0))
    assert np.all(np.abs(st.mean - np.array([2.0, -1.0])) < 4 * st.mean_stderr)


def test_determinism_and_workers():
    v = TwoModeCovariance.tmsv(0.4)
    a = run_ensemble(VAC, v, 0.7, n_samples=70_000, seed=11, workers=1)
    b = run_ensemble(VAC, v, 0.7, n_samples=70_000, seed=11, workers=4)
    c = run_ensemble(VAC, v, 0.7, n_samples=70_000, seed=12)
    np.testing.assert_allclose(a.cov, b.cov, rtol=1e-13)
    np.testing.assert_allclose(a.mean, b.mean, rtol=1e-12, atol=1e-15)
    assert not np.allclose(a.cov, c.cov, rtol=1e-6)


def test_qp_correlations_match_analytic(rng):
    """States with q-p correlations pin down the sign of the cross term."""
    hits = 0
    for k in range(6):
        v = random_covariance(rng)
        theta = rng.uniform(0.3, 1.2)
        v_in = OneModeCovariance.squeezed_thermal(0.2, 0.1)
        expect = gaussian_output(v_in, v, theta).v_out.matrix
        st = run_ensemble(v_in, v, theta, n_samples=100_000, seed=k)
        hits += abs(st.cov[0, 1] - expect[0, 1]) < 3 * st.cov_stderr[0, 1]
        # flipping the sign of the off-diagonal would be many standard errors away
        if abs(expect[0, 1]) > 0.05:
            assert abs(st.cov[0, 1] + expect[0, 1]) > 5 * st.cov_stderr[0, 1]
    assert hits >= 5


def test_errors():
    with pytest.raises(NotBonaFideError):
        run_ensemble(VAC, TwoModeCovariance(0.2 * np.eye(4)))
    with pytest.raises(ValueError):
        run_ensemble(VAC, TwoModeCovariance.vacuum(), n_samples=1)
    # measured covariance with condition number ~1e26: noiseless input, mode 1 squeezed by r = 15
    sq = OneModeCovariance.squeezed_thermal(0.0, 15.0)
    v = TwoModeCovariance.from_blocks(sq, VAC, np.zeros((2, 2)))
    with pytest.raises(DegenerateConditioningError):
        run_ensemble(OneModeCovariance(0.0, 0.0, 0.0), v, n_samples=10)


def test_dump(tmp_path):
    xs = sample_outcomes(VAC, TwoModeCovariance.vacuum(), n_samples=10, seed=0)
    dump_samples_csv(tmp_path / "s.csv", xs, np.pi / 4)
    rows = np.loadtxt(tmp_path / "s.csv", delimiter=",", skiprows=1)
    assert rows.shape == (10, 4)
    np.testing.assert_allclose(rows[:, 2], rows[:, 0] / np.cos(np.pi / 4) / np.sqrt(2), rtol=1e-10)
