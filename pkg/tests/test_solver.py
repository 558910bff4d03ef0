import math

import numpy as np
import pytest

from quenchtherm import sds, solver, state
from quenchtherm.errors import DomainError, SingularJacobianError, UnstableModeError
from quenchtherm.solver import ParameterVector

from conftest import SQ3, sds_pairs

P01 = ParameterVector(1 / SQ3, 4 / 3, SQ3 / 4)
LOG2 = math.log(2)


class TestResidual:
    def test_sds_root(self):
        assert np.abs(solver.residual(P01, LOG2)).max() <= 1e-9

    def test_identity_protocol(self):
        assert solver.residual(ParameterVector(1, 0, 0.25), LOG2) == pytest.approx([-2 / 15, 0, 8 / 15], abs=1e-14)

    def test_random_point(self):
        assert np.linalg.norm(solver.residual(ParameterVector(1.7, 0.9, 0.37), LOG2)) > 1e-3

    def test_all_sds(self):
        for l, n in sds_pairs(20):
            p = ParameterVector.from_index((l, n))
            assert np.abs(solver.residual(p, sds.beta_of_index((l, n)))).max() <= 1e-9

    def test_errors(self):
        with pytest.raises(UnstableModeError):
            solver.residual(ParameterVector(1, -0.6, 1), LOG2)
        with pytest.raises(DomainError):
            solver.residual(P01, 0.0)
        with pytest.raises(DomainError):
            solver.residual(ParameterVector(1, 0, -1), LOG2)


class TestJacobian:
    def test_richardson(self):
        # central differences at h and h/2 agree to relative 1e-4
        for p, beta in ((P01, LOG2), (ParameterVector(1.7, 0.9, 0.37), 1.0)):
            jac = solver.jacobian(p, beta)
            base = p.as_array()
            for j in range(3):
                h = 0.5e-6 * max(abs(base[j]), 1)
                e = np.zeros(3)
                e[j] = h
                half = (solver.residual(ParameterVector.from_array(base + e), beta)
                        - solver.residual(ParameterVector.from_array(base - e), beta)) / (2 * h)
                assert np.allclose(jac[:, j], half, rtol=1e-4, atol=1e-4 * np.abs(half).max())

    def test_nonsingular_at_sds(self):
        jac = solver.jacobian(P01, LOG2)
        assert abs(np.linalg.det(jac)) > 1e-6
        assert abs(jac[1, 2]) > 1e-3

    def test_step_shrinks_near_boundary(self):
        # omega'^2 + 2k = 2e-7 sits inside one regular step of the boundary
        p = ParameterVector(1.0, -0.5 + 1e-7, 0.3)
        jac = solver.jacobian(p, 1.0)
        assert np.all(np.isfinite(jac))

    def test_step_fails_at_boundary(self):
        with pytest.raises(UnstableModeError):
            solver.jacobian(ParameterVector(1.0, -0.5 + 1e-12, 0.3), 1.0)


class TestThermalDerivative:
    def test_log2(self):
        assert solver.dthermal_dbeta(LOG2) == pytest.approx([-128 / 225, 0, 272 / 225], abs=1e-14)

    def test_limit(self):
        assert np.all(solver.dthermal_dbeta(math.inf) == 0)
        assert np.abs(solver.dthermal_dbeta(400.0)).max() < 1e-300

    def test_finite_differences(self):
        h = 1e-6
        for b in np.linspace(0.1, 10, 60):
            fd = (np.array(state.thermal_r(2 * (b + h)).as_tuple()) - np.array(state.thermal_r(2 * (b - h)).as_tuple())) / (2 * h)
            assert np.abs(fd - solver.dthermal_dbeta(b)).max() <= 1e-6

    def test_domain(self):
        with pytest.raises(DomainError):
            solver.dthermal_dbeta(-1.0)


class TestPerturbative:
    def test_zero(self):
        assert solver.perturbative_correction((0, 1), 0.0) == ParameterVector.from_index((0, 1))

    def test_identity_rejected(self):
        with pytest.raises(DomainError):
            solver.perturbative_correction((2, 2), 0.1)

    @pytest.mark.parametrize("idx", [(0, 1), (1, 0), (1, 3), (2, 5), (11, 12)])
    def test_quadratic_scaling(self, idx):
        beta = sds.beta_of_index(idx)
        norms = [np.linalg.norm(solver.residual(solver.perturbative_correction(idx, d), beta + d)) for d in (1e-2, 1e-3)]
        assert 1.7 <= math.log10(norms[0] / norms[1]) <= 2.3

    def test_improves_small_shift(self):
        idx = (11, 12)
        beta = sds.beta_of_index(idx)
        d = -3e-4  # smallest singular value of M is ~1e-3 here, so the linear regime is narrow
        corrected = np.linalg.norm(solver.residual(solver.perturbative_correction(idx, d), beta + d))
        plain = np.linalg.norm(solver.residual(ParameterVector.from_index(idx), beta + d))
        assert corrected <= 0.5 * plain

    @pytest.mark.xfail(strict=True, reason="delta = -0.036 lies outside the linear regime of the (11,12) root")
    def test_pi_step_halves_residual(self):
        idx = (11, 12)
        corrected = solver.perturbative_correction(idx, math.pi - sds.beta_of_index(idx))
        assert np.linalg.norm(solver.residual(corrected, math.pi)) <= 0.5 * np.linalg.norm(
            solver.residual(ParameterVector.from_index(idx), math.pi)
        )

    def test_singular(self, monkeypatch):
        monkeypatch.setattr(solver, "jacobian", lambda p, b: np.ones((3, 3)))
        with pytest.raises(SingularJacobianError) as exc:
            solver.perturbative_correction((0, 1), 0.01)
        assert exc.value.condition > 1e13


class TestNewton:
    def test_recovers_01(self):
        seed = ParameterVector.from_array(P01.as_array() * 1.01)
        rep = solver.newton_solve(LOG2, seed, tol=1e-10)
        assert rep.converged and rep.residual_norm <= 1e-10
        assert np.abs(rep.solution.as_array() - P01.as_array()).max() <= 1e-8
        assert rep.history[0] > rep.history[-1] and rep.seed == seed

    def test_max_iter_zero(self):
        rep = solver.newton_solve(LOG2, ParameterVector(1.2, 1.0, 0.5), max_iter=0)
        assert not rep.converged and rep.iterations == 0
        assert math.isfinite(rep.jacobian_condition)

    def test_already_converged(self):
        rep = solver.newton_solve(LOG2, P01, tol=1e-9, max_iter=0)
        assert rep.converged and rep.iterations == 0

    def test_pi_from_hotter_seed(self):
        rep = solver.tune_newton(math.pi, tol=1e-10)
        assert rep.converged and rep.residual_norm <= 1e-10
        assert rep.solution.is_valid()
        r = solver.evolve_schedule(rep.solution.schedule(), 1).final_r
        assert max(state.thermality_residual(r)) <= 1e-8
        assert state.effective_beta(r) == pytest.approx(2 * math.pi, abs=1e-8)

    def test_pi_from_12_11_reports(self):
        rep = solver.newton_solve(math.pi, ParameterVector.from_index((11, 12)), tol=1e-10)
        assert rep.converged or (rep.message and rep.history and math.isfinite(rep.jacobian_condition))
        assert rep.residual_norm == rep.history[-1]

    def test_converged_implies_tolerance(self):
        rng = np.random.default_rng(4)
        for _ in range(6):
            idx = (int(rng.integers(0, 6)), int(rng.integers(6, 12)))
            seed = ParameterVector.from_array(ParameterVector.from_index(idx).as_array() * (1 + 0.01 * rng.standard_normal(3)))
            rep = solver.newton_solve(sds.beta_of_index(idx), seed, tol=1e-11)
            assert rep.converged == (rep.residual_norm <= 1e-11)
            assert rep.solution.is_valid()

    def test_bad_inputs(self):
        with pytest.raises(DomainError):
            solver.newton_solve(LOG2, P01, tol=0)
        with pytest.raises(UnstableModeError):
            solver.newton_solve(LOG2, ParameterVector(1, -1, 1))

    def test_no_seed(self):
        with pytest.raises(DomainError):
            solver.tune_newton(math.pi, seed_tol=1e-9)
