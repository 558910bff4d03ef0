import math

import numpy as np
import pytest

from quenchtherm import state
from quenchtherm.errors import DomainError, NotThermalError
from quenchtherm.state import GROUND, QuadraticForm, RVector, SingleModeCovariance

from conftest import assert_r

R_LOG2 = RVector(17 / 15, 0.0, -8 / 15)
R_OFF = RVector(1.75, 0.0, -0.25)


class TestReduce:
    def test_ground(self):
        assert_r(state.reduce_to_r(QuadraticForm(1, 1, 0)), (1, 0, 0))

    def test_coupled_real(self):
        assert_r(state.reduce_to_r(QuadraticForm(2, 2, 1 + 0j)), (1.75, 0, -0.25))

    def test_frequency_scaling(self):
        assert_r(state.reduce_to_r(QuadraticForm(4, 4, 2), omega=2), (1.75, 0, -0.25))

    def test_complex_coefficients(self):
        q = QuadraticForm(1 - 0.5j, 1 - 0.5j, 0.3 + 0.2j)
        r = state.reduce_to_r(q)
        assert r.z <= 0 and r.x + r.z > 0
        assert r.z == pytest.approx(-abs(q.a12) ** 2 / 2)

    def test_non_normalizable(self):
        with pytest.raises(DomainError):
            state.reduce_to_r(QuadraticForm(1, -1, 0))
        with pytest.raises(DomainError):
            state.reduce_to_r(QuadraticForm(1, 1, 0), omega=0)
        assert not QuadraticForm(1, 1, 2).is_normalizable()


class TestThermal:
    def test_zero_temperature(self):
        assert_r(state.thermal_r(math.inf), GROUND)
        assert_r(state.thermal_r(2000.0), GROUND)

    def test_log4(self):
        assert_r(state.thermal_r(math.log(4)), R_LOG2, 1e-15)

    def test_log24(self):
        r = state.thermal_r(2 * math.log(24))
        assert r.x == pytest.approx(1.0000060, abs=1e-7)
        assert r.z == pytest.approx(-0.0034722, abs=1e-7)
        assert r.x**2 - r.z**2 == pytest.approx(1, abs=1e-13)

    @pytest.mark.parametrize("bad", [0.0, -1.0, math.nan])
    def test_domain(self, bad):
        with pytest.raises(DomainError):
            state.thermal_r(bad)

    def test_hyperbola(self):
        for b in np.linspace(0.05, 50, 500):
            r = state.thermal_r(b)
            assert abs(r.x * r.x - r.z * r.z - 1) <= 1e-12

    def test_energy_closed_form(self):
        for b in np.linspace(0.05, 50, 200):
            assert state.mean_energy(state.thermal_r(b)) == pytest.approx(0.5 / math.tanh(b / 2), rel=1e-10)


class TestCovariance:
    @pytest.mark.parametrize(
        "r, expected",
        [(GROUND, (0.5, 0.5, 0)), (R_LOG2, (5 / 6, 5 / 6, 0)), (R_OFF, (1 / 3, 1, 0))],
    )
    def test_examples(self, r, expected):
        c = state.r_to_covariance(r)
        assert (c.sxx, c.spp, c.sxp) == pytest.approx(expected, abs=1e-15)

    def test_round_trip(self):
        r = RVector(1.4, 0.3, -0.2)
        assert_r(state.covariance_to_r(state.r_to_covariance(r, 1.3), 1.3), r, 1e-14)

    def test_vacuum_from_ground_form(self):
        c = state.r_to_covariance(state.reduce_to_r(QuadraticForm(1, 1, 0)))
        assert (c.sxx, c.spp, c.sxp) == (0.5, 0.5, 0.0)

    def test_uncertainty_bound(self):
        for r in (GROUND, R_LOG2, R_OFF, RVector(3.0, -1.2, -0.7)):
            assert state.r_to_covariance(r).det >= 0.25 - 1e-12
        with pytest.raises(DomainError):
            state.covariance_to_r(SingleModeCovariance(0.0, 0.5, 0.0))

    def test_invalid_r(self):
        with pytest.raises(DomainError):
            state.r_to_covariance(RVector(0.5, 0, -0.6))


class TestScalars:
    def test_symplectic(self):
        assert state.symplectic_eigenvalue(GROUND) == pytest.approx(0.5)
        assert state.symplectic_eigenvalue(R_LOG2) == pytest.approx(5 / 6, abs=1e-15)
        assert state.symplectic_eigenvalue(R_OFF) == pytest.approx(math.sqrt(1 / 3), abs=1e-15)

    def test_residual(self):
        assert state.thermality_residual(GROUND) == (0.0, 0.0)
        assert state.thermality_residual(R_LOG2) == pytest.approx((0, 0), abs=1e-15)
        assert state.thermality_residual(R_OFF) == pytest.approx((0, 2.0), abs=1e-15)

    def test_effective_beta(self):
        assert state.effective_beta(R_LOG2) == pytest.approx(math.log(4), abs=1e-14)
        assert state.effective_beta(GROUND) == math.inf
        with pytest.raises(NotThermalError):
            state.effective_beta(R_OFF)

    def test_effective_beta_frequency(self):
        assert state.effective_beta(state.thermal_r(1.5), omega=3.0) == pytest.approx(0.5)

    def test_energy(self):
        assert state.mean_energy(GROUND) == 0.5
        assert state.mean_energy(R_LOG2) == pytest.approx(5 / 6, abs=1e-15)
        assert state.mean_energy(R_OFF) == pytest.approx(1 / 3 * 2, abs=1e-15)

    def test_is_thermal_and_env(self, monkeypatch):
        near = RVector(R_LOG2.x, 1e-7, R_LOG2.z)
        assert state.is_thermal(R_LOG2) and not state.is_thermal(near)
        monkeypatch.setenv("QT_DEFAULT_TOL", "1e-6")
        assert state.default_tolerance() == 1e-6
        assert state.is_thermal(near)
        monkeypatch.setenv("QT_DEFAULT_TOL", "bogus")
        with pytest.raises(DomainError):
            state.default_tolerance()
