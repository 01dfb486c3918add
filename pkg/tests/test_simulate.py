import numpy as np
import pytest

from eqadapt import (
    ClosedLoopState,
    Diverged,
    build_constraint,
    lift,
    load_scenario,
    retract,
    rhs,
    rk4_step,
    run,
    step_count,
)


class TestRk4Harness:
    def test_single_step_exponential_decay(self):
        y1 = rk4_step(lambda t, y: -y, 0.0, np.array([1.0]), 0.1)
        assert y1[0] == pytest.approx(0.90483742, abs=1e-7)

    def test_precomputed_first_stage_matches(self):
        f = lambda t, y: np.array([np.sin(t) - y[0]])
        y = np.array([0.3])
        assert np.array_equal(rk4_step(f, 0.2, y, 0.01),
                              rk4_step(f, 0.2, y, 0.01, f0=f(0.2, y)))

    def test_step_count_handles_binary_fractions(self):
        assert step_count(20.0, 1e-3) == 20000
        assert step_count(0.1, 1e-3) == 100
        assert step_count(0.0995, 1e-3) == 99
        assert step_count(2.0, 5e-4) == 4000


class TestRhs:
    def test_equilibrium_of_error_system(self):
        s1 = load_scenario("paper_sim1")
        spec = s1.constraint_spec()
        t = 1.3
        xd, xd_dot = s1.trajectory()(t)
        z = retract(spec, s1.theta_true)  # theta_hat = theta
        xdot, zdot = rhs(s1, ClosedLoopState(t=t, x=xd, z=z))
        assert np.allclose(xdot - xd_dot, 0.0, atol=1e-9)
        assert np.allclose(zdot, 0.0, atol=1e-12)

    def test_constraint_direction_is_stationary(self):
        s1 = load_scenario("paper_sim1")
        spec = s1.constraint_spec()
        rng = np.random.default_rng(4)
        for _ in range(10):
            state = ClosedLoopState(t=float(rng.uniform(0, 10)),
                                    x=rng.normal(scale=5.0, size=2),
                                    z=rng.normal(scale=5.0, size=3))
            _, zdot = rhs(s1, state)
            assert np.max(np.abs(spec.A @ (spec.F @ zdot))) <= 1e-10 * (1 + np.linalg.norm(zdot))


class TestRun:
    def test_record_count(self):
        s1 = load_scenario("paper_sim1").with_overrides(T=0.1)
        log = run(s1)
        assert len(log) == 101
        assert np.all(np.diff(log.t) > 0)
        assert log.t[-1] == pytest.approx(0.1)

    def test_known_parameters_give_exact_linear_decay(self):
        # gamma = 0 and theta_hat(0) = theta: edot = -k e exactly, so
        # e1(t) = 10 exp(-20 t).
        s = load_scenario("paper_sim1").with_overrides(
            gamma=0.0, theta_hat0=[5.0, 5.0, 10.0, 20.0], T=0.6,
        )
        log = run(s)
        for t_probe in (0.1, 0.25, 0.5):
            i = int(round(t_probe / s.dt))
            expected = 10.0 * np.exp(-20.0 * t_probe)
            assert log.e[i, 0] == pytest.approx(expected, rel=1e-4)
        # theta_hat never moves
        assert np.max(np.abs(log.theta_hat - log.theta_hat[0])) == 0.0

    def test_perfect_start_stays_on_trajectory(self):
        s = load_scenario("paper_sim1").with_overrides(
            x0=[0.0, 0.0], theta_hat0=[5.0, 5.0, 10.0, 20.0], T=1.0,
        )
        log = run(s)
        assert np.max(np.abs(log.e)) <= 1e-9
        assert np.max(np.abs(np.diff(log.theta_hat, axis=0))) <= 1e-9

    def test_determinism_bit_identical(self):
        s = load_scenario("paper_sim2").with_overrides(T=0.5)
        a, b = run(s), run(s)
        for field in ("t", "x", "x_d", "e", "theta_hat", "theta_tilde", "u",
                      "constraint_violation", "V", "lambda_min", "fe_flag"):
            assert np.array_equal(getattr(a, field), getattr(b, field)), field

    def test_constraint_drift_stays_negligible(self):
        log = run(load_scenario("paper_sim1").with_overrides(T=2.0))
        assert np.max(log.constraint_violation) <= 1e-8

    def test_unstable_step_size_diverges(self):
        # k dt = 5 puts the fast mode outside the RK4 stability region
        s = load_scenario("paper_sim1").with_overrides(dt=0.05, T=20.0)
        with pytest.raises(Diverged):
            run(s)

    def test_orthogonal_complement_is_stationary(self):
        s1 = load_scenario("paper_sim1")
        log = run(s1.with_overrides(T=1.0))
        # basis of range(A^T) computed independently of the package machinery
        _, _, Vt = np.linalg.svd(s1.A)
        F_perp = Vt[: s1.A.shape[0]].T
        drift = (log.theta_hat - log.theta_hat[0]) @ F_perp
        assert np.max(np.abs(drift)) <= 1e-8

    def test_gradient_run_never_collects(self):
        log = run(load_scenario("paper_sim1").with_overrides(T=0.5))
        assert np.all(log.lambda_min == 0.0)
        assert not np.any(log.fe_flag)
        assert log.fe_latch_index is None

    def test_cl_run_collects_and_latches(self):
        log = run(load_scenario("paper_sim2").with_overrides(T=1.0))
        assert log.fe_latch_index is not None
        assert log.sigma1 >= 30.0
        assert log.lambda_min[-1] >= log.sigma1
        assert np.all(np.diff(log.lambda_min) >= -1e-12)
        # flag is latched permanently once set
        idx = log.fe_latch_index
        assert not np.any(log.fe_flag[:idx])
        assert np.all(log.fe_flag[idx:])


class TestFullHorizonRuns:
    def test_default_horizon_record_count(self, sim1):
        # floor(20 / 1e-3) + 1
        assert len(sim1["log"]) == 20001

    def test_sim2_theta_tilde_monotone_after_latch(self, sim2):
        log = sim2["log"]
        tt_norm = np.linalg.norm(log.theta_tilde, axis=1)
        steps = np.diff(tt_norm[log.fe_latch_index:])
        assert np.all(steps <= 1e-9)

    def test_projected_error_identity_along_run(self, sim1):
        # theta and theta_hat(t) both feasible, so (I - F F^T) theta_tilde = 0
        spec = sim1["scenario"].constraint_spec()
        tt = sim1["log"].theta_tilde
        resid = tt - tt @ spec.projector().T
        assert np.max(np.linalg.norm(resid, axis=1)) <= 1e-8


class TestRichardsonBehaviour:
    def test_halving_dt_shrinks_final_state_change(self):
        base = load_scenario("paper_sim1").with_overrides(T=0.5)
        x_coarse = run(base).x[-1]
        x_mid = run(base.with_overrides(dt=5e-4)).x[-1]
        x_fine = run(base.with_overrides(dt=2.5e-4)).x[-1]
        c = np.linalg.norm(x_coarse - x_mid)
        f = np.linalg.norm(x_mid - x_fine)
        assert f < c / 8.0  # at least ~3rd order locally
