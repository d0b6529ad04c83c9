"""Error fields, energies, prepared data, rate fits."""

import math

import numpy as np
import pytest

from radhydro.analysis import (
    EnergyRecord,
    default_perturbation_shapes,
    energy,
    error_fields,
    fit_rate,
    gamma_bound_check,
    hypothesis_deviation,
    well_prepared_init,
)
from radhydro.errors import DegenerateFit, PositivityLost, TimeMismatch
from radhydro.fluid import FluidState
from radhydro.radiation import RadiationMoments, limit_I0, limit_q
from radhydro.spectral import SpectralField, VectorField, sobolev_norm
from radhydro.stepping import EpsState, LimitState


def _base_state(grid):
    x = grid.coordinates()[0]
    rho = SpectralField.from_values(grid, 1 + 0.1 * np.sin(x))
    u = VectorField([SpectralField.from_values(grid, 0.1 * np.sin(x))])
    theta = SpectralField.from_values(grid, 1 + 0.1 * np.cos(x))
    return LimitState(fluid=FluidState(rho=rho, u=u, theta=theta), time=0.0)


def _consistent_eps_state(limit_state):
    theta = limit_state.fluid.theta
    rad = RadiationMoments(I0=limit_I0(theta), I1=limit_q(theta))
    return EpsState(fluid=limit_state.fluid, rad=rad, time=limit_state.time)


class TestErrorFields:
    def test_consistent_states_give_zero(self, grid1d):
        base = _base_state(grid1d)
        eps_state = _consistent_eps_state(base)
        err = error_fields(eps_state, base)
        for f in (err.rho, err.theta, err.I0):
            assert np.abs(f.values).max() < 1e-13
        assert np.abs(err.u[0].values).max() < 1e-13
        assert np.abs(err.I1[0].values).max() < 1e-13

    def test_single_perturbation_is_linear(self, grid1d):
        base = _base_state(grid1d)
        eps_state = _consistent_eps_state(base)
        x = grid1d.coordinates()[0]
        bump = 0.03 * np.sin(x)
        perturbed = EpsState(
            fluid=FluidState(
                rho=eps_state.fluid.rho + SpectralField.from_values(grid1d, bump),
                u=eps_state.fluid.u,
                theta=eps_state.fluid.theta,
            ),
            rad=eps_state.rad,
            time=0.0,
        )
        err = error_fields(perturbed, base)
        assert np.abs(err.rho.values - bump).max() < 1e-13
        assert np.abs(err.theta.values).max() < 1e-13
        assert np.abs(err.I0.values).max() < 1e-13

    def test_time_mismatch_rejected(self, grid1d):
        base = _base_state(grid1d)
        eps_state = _consistent_eps_state(base)
        import dataclasses

        late = dataclasses.replace(eps_state, time=1e-6)
        with pytest.raises(TimeMismatch):
            error_fields(late, base)


class TestEnergy:
    def _zero_errors(self, grid):
        zero = SpectralField.zeros(grid)
        zvec = VectorField.zeros(grid)
        from radhydro.analysis import ErrorFields

        return ErrorFields(rho=zero, u=zvec, theta=zero, I0=zero, I1=zvec, time=0.0)

    def test_zero_fields(self, grid1d):
        rec = energy(self._zero_errors(grid1d), 3, 0.1)
        assert rec.fluid_energy == 0.0
        assert rec.full_energy == 0.0
        assert rec.gamma == 0.0

    def test_single_fluid_component(self, grid1d):
        import dataclasses

        x = grid1d.coordinates()[0]
        err = dataclasses.replace(
            self._zero_errors(grid1d),
            rho=SpectralField.from_values(grid1d, np.sin(x)),
        )
        rec = energy(err, 0, 0.1)
        assert rec.fluid_energy == pytest.approx(math.sqrt(math.pi), rel=1e-13)
        assert rec.full_energy == pytest.approx(math.sqrt(math.pi), rel=1e-13)

    def test_eps_weighting_of_radiation_part(self, grid1d):
        import dataclasses

        x = grid1d.coordinates()[0]
        err = dataclasses.replace(
            self._zero_errors(grid1d),
            I1=VectorField([SpectralField.from_values(grid1d, np.sin(x))]),
        )
        rec = energy(err, 0, 0.25)
        assert rec.fluid_energy == 0.0
        assert rec.full_energy == pytest.approx(math.sqrt(0.25 * math.pi), rel=1e-13)
        assert rec.full_energy == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-13)

    def test_degree_two_homogeneity(self, grid1d, rng):
        from conftest import smooth_field, smooth_vector
        from radhydro.analysis import ErrorFields

        err = ErrorFields(
            rho=smooth_field(grid1d, rng),
            u=smooth_vector(grid1d, rng),
            theta=smooth_field(grid1d, rng),
            I0=smooth_field(grid1d, rng),
            I1=smooth_vector(grid1d, rng),
            time=0.0,
        )
        scaled = ErrorFields(
            rho=err.rho * 3.0,
            u=err.u * 3.0,
            theta=err.theta * 3.0,
            I0=err.I0 * 3.0,
            I1=err.I1 * 3.0,
            time=0.0,
        )
        a = energy(err, 2, 0.1)
        b = energy(scaled, 2, 0.1)
        assert b.gamma == pytest.approx(9.0 * a.gamma, rel=1e-12)
        assert b.full_energy >= b.fluid_energy >= 0.0

    def test_monotone_in_s(self, grid1d, rng):
        from conftest import smooth_field, smooth_vector
        from radhydro.analysis import ErrorFields

        err = ErrorFields(
            rho=smooth_field(grid1d, rng),
            u=smooth_vector(grid1d, rng),
            theta=smooth_field(grid1d, rng),
            I0=smooth_field(grid1d, rng),
            I1=smooth_vector(grid1d, rng),
            time=0.0,
        )
        gammas = [energy(err, s, 0.1).gamma for s in range(5)]
        assert all(a <= b + 1e-12 for a, b in zip(gammas, gammas[1:]))


class TestWellPreparedInit:
    def test_amp_zero_is_exactly_consistent(self, grid1d):
        base = _base_state(grid1d)
        eps_init, limit_init = well_prepared_init(base, 0.05, 0.0)
        err = error_fields(eps_init, limit_init)
        rec = energy(err, 3, 0.05)
        assert rec.full_energy < 1e-13
        assert hypothesis_deviation(eps_init, limit_init, 3, 0.05) < 1e-13

    def test_scaling_arithmetic_at_amp_one(self, grid1d):
        # radiation deviation norm is sqrt(eps)*amp*||shape||, so the
        # weighted term contributes exactly eps*amp*||shape|| to the
        # deviation functional.
        base = _base_state(grid1d)
        eps = 0.04
        s = 3
        shapes = default_perturbation_shapes(grid1d)
        eps_init, limit_init = well_prepared_init(base, eps, 1.0, shapes)
        rad_norm = math.sqrt(
            sobolev_norm(eps_init.rad.I0 - limit_I0(base.fluid.theta), s) ** 2
            + sobolev_norm(eps_init.rad.I1 - limit_q(base.fluid.theta), s) ** 2
        )
        shape_norm = math.sqrt(
            sobolev_norm(shapes.I0, s) ** 2 + sobolev_norm(shapes.I1, s) ** 2
        )
        assert rad_norm == pytest.approx(math.sqrt(eps) * shape_norm, rel=1e-12)
        assert math.sqrt(eps) * rad_norm == pytest.approx(eps * shape_norm, rel=1e-12)

    @pytest.mark.parametrize("amp", [0.0, 1.0])
    def test_deviation_over_eps_is_eps_independent(self, grid1d, amp):
        base = _base_state(grid1d)
        ratios = []
        for eps in (0.1, 0.05, 0.025):
            eps_init, limit_init = well_prepared_init(base, eps, amp)
            ratios.append(hypothesis_deviation(eps_init, limit_init, 3, eps) / eps)
        if amp == 0.0:
            assert max(ratios) < 1e-10
        else:
            assert max(ratios) / min(ratios) < 1.0 + 1e-10

    def test_positivity_guard(self, grid1d):
        base = _base_state(grid1d)
        with pytest.raises(PositivityLost):
            well_prepared_init(base, 0.25, 30.0)


class TestFitRate:
    def test_exact_linear_law(self):
        eps = [0.1, 0.05, 0.025, 0.0125]
        fit = fit_rate([(e, 3 * e) for e in eps])
        assert fit.slope == pytest.approx(1.0, abs=1e-12)
        assert fit.intercept == pytest.approx(math.log(3.0), abs=1e-12)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_square_root_law(self):
        eps = [0.1, 0.05, 0.025]
        fit = fit_rate([(e, e**0.5) for e in eps])
        assert fit.slope == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("slope", [0.5, 1.0, 2.0])
    def test_recovers_planted_slopes(self, slope):
        eps = [0.2, 0.1, 0.05, 0.025]
        fit = fit_rate([(e, 1.7 * e**slope) for e in eps])
        assert fit.slope == pytest.approx(slope, abs=1e-12)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_degenerate_inputs(self):
        with pytest.raises(DegenerateFit, match="3 pairs"):
            fit_rate([(0.1, 1.0), (0.05, 0.5)])
        with pytest.raises(DegenerateFit, match="positive"):
            fit_rate([(0.1, 1.0), (0.05, 0.0), (0.025, 0.2)])
        with pytest.raises(DegenerateFit, match="equal"):
            fit_rate([(0.1, 1.0), (0.1, 0.5), (0.1, 0.2)])
        with pytest.raises(DegenerateFit, match="distinct"):
            fit_rate([(0.1, 1.0), (0.05, 0.5), (0.05, 0.2)])


class TestGammaBoundCheck:
    def test_all_zero_records(self):
        records = [EnergyRecord(time=t, fluid_energy=0, full_energy=0, gamma=0) for t in (0, 1)]
        worst, ok = gamma_bound_check(records, 0.1)
        assert worst == 0.0 and ok

    def test_constant_multiple_of_eps_squared(self):
        eps = 0.05
        records = [
            EnergyRecord(time=t, fluid_energy=0, full_energy=0, gamma=4 * eps**2)
            for t in (0.0, 0.5, 1.0)
        ]
        worst, ok = gamma_bound_check(records, eps)
        assert worst == pytest.approx(4.0, rel=1e-12)
        assert ok

    def test_bound_violation_flagged(self):
        records = [EnergyRecord(time=0, fluid_energy=0, full_energy=0, gamma=101 * 0.01)]
        worst, ok = gamma_bound_check(records, 0.1)
        assert worst == pytest.approx(101.0)
        assert not ok
