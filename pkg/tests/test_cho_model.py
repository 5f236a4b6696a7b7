#!/usr/bin/env python3
"""
Tests for the spectral CHO model, its stepper and tangent dynamics
"""

import math
from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

import chodim.services.cho_model.service as cho_service
from chodim.commands import tangent_suite
from chodim.core.exceptions import BlowUpError, ConfigurationError, DimensionMismatchError
from chodim.models import RunConfig
from chodim.services.cho_model import (
    ChoModel, ForcingMode, ForcingSpec, GridSpec, Nonlinearity, NonlinearitySpec, PhysParams,
    SpectralField, State, Stepper, apply_mode_blocks, attractor_sample, build_phys_params, dissipation_monitor,
    energy, energy_space_norm, forcing_field, get_basis, quasidifferential_test, random_smooth_state, read_snapshot,
    read_trajectory_csv, rhs, simulate, sobolev_norm, step, tangent_energy_residual,
    tangent_generator, tangent_linear_flow, tangent_rhs, validate_nonlinearity, write_snapshot,
    write_trajectory_csv,
)
from chodim.services.liouville import evolve_frame, liouville_residual
from chodim.services.multilinear import VectorFrame


DEFAULT_CONFIG = Path(__file__).resolve().parent.parent / "config" / "default.json"


def default_run():
    """Grid, parameters and integration settings of the shipped default configuration"""
    config = RunConfig.from_file(DEFAULT_CONFIG)
    return config.grid, config.phys.build(config.grid), config.integrate


def single_mode(grid, index, a=0.0, b=0.0):
    x, v = np.zeros(grid.n_coords), np.zeros(grid.n_coords)
    x[index], v[index] = a, b
    return State(SpectralField(grid, x), SpectralField(grid, v))


def energy_norm(model, y):
    return float(np.linalg.norm(model.to_energy_coords(y)))


def tangent_path(model, state, w, dt, n_steps):
    """Base states and tangent states advanced together by the discrete step"""
    stepper = Stepper(model, dt)
    y, W = state.to_vector(), w.to_vector()[:, None]
    base, tangent = [state], [w]
    for i in range(n_steps):
        W = stepper.tangent_step(y, W)
        y = stepper.step_vector(y, i * dt)
        base.append(State.from_vector(model.grid, y))
        tangent.append(State.from_vector(model.grid, W[:, 0]))
    return base, tangent, dt * np.arange(n_steps + 1)


class TestGridAndBasis:
    def test_coordinate_count(self):
        assert GridSpec(n=1, N=8).n_coords == 6
        assert GridSpec(n=2, N=8).n_coords == 48
        assert get_basis(GridSpec(n=2, N=8)).m == 48

    def test_rejects_bad_modes(self):
        with pytest.raises(ValidationError):
            GridSpec(N=12)
        with pytest.raises(ValidationError):
            GridSpec(N=4)

    def test_power_family_range(self):
        with pytest.raises(ValidationError):
            NonlinearitySpec(family="power", p=5.5)

    def test_alpha_must_be_positive(self, small_grid):
        with pytest.raises(ConfigurationError):
            PhysParams(alpha=0.0, nonlinearity=Nonlinearity.cubic(), g=SpectralField.zeros(small_grid))

    def test_field_shape_checked(self, small_grid):
        with pytest.raises(DimensionMismatchError):
            SpectralField(small_grid, np.zeros(3))

    def test_projection_inverts_synthesis(self, small_grid, rng):
        basis = get_basis(small_grid, 2)
        x = rng.standard_normal(small_grid.n_coords)
        np.testing.assert_allclose(basis.project(basis.to_grid(x)), x, atol=1e-13)

    def test_cos_and_sin_forcing(self, small_grid):
        g = forcing_field(small_grid, ForcingSpec(modes=[
            ForcingMode(k=[2], amplitude=0.7, phase="cos"),
            ForcingMode(k=[-1], amplitude=0.3, phase="sin"),
        ]))
        basis = get_basis(small_grid, 1)
        x = basis.grid_points()[0]
        expected = 0.7 * np.cos(2 * x / small_grid.ell) - 0.3 * np.sin(x / small_grid.ell)
        np.testing.assert_allclose(basis.to_grid(g.coords), expected, atol=1e-13)

    def test_unretained_forcing_mode(self, small_grid):
        with pytest.raises(ConfigurationError):
            forcing_field(small_grid, ForcingSpec(modes=[ForcingMode(k=[8], amplitude=1.0)]))


class TestSobolevAndEnergy:
    def test_single_mode_norm(self, small_grid):
        a, ell = 0.8, small_grid.ell
        g = forcing_field(small_grid, ForcingSpec(modes=[ForcingMode(k=[1], amplitude=a)]))
        l2 = a * math.sqrt(small_grid.volume / 2)
        for s in (-1.0, 0.0, 0.5, 2.0):
            assert sobolev_norm(g, s) == pytest.approx(l2 * (1 / ell) ** s, rel=1e-13)

    def test_parseval(self, small_grid, rng):
        field = SpectralField(small_grid, rng.standard_normal(small_grid.n_coords))
        basis = get_basis(small_grid, 1)
        direct = math.sqrt(basis.integrate(basis.to_grid(field.coords) ** 2))
        assert sobolev_norm(field, 0.0) == pytest.approx(direct, rel=1e-12)

    def test_homogeneity(self, small_grid, rng):
        field = SpectralField(small_grid, rng.standard_normal(small_grid.n_coords))
        assert sobolev_norm(field.scaled(-3.0), 1.0) == pytest.approx(3.0 * sobolev_norm(field, 1.0))

    def test_zero_state(self, small_grid, cubic_params):
        assert energy(State.zeros(small_grid), cubic_params) == 0.0
        assert energy_space_norm(State.zeros(small_grid), cubic_params) == 0.0

    def test_single_mode_energy(self, small_grid, free_params):
        a, b = 0.4, -1.3
        state = single_mode(small_grid, 2, a, b)
        k2 = (3 / small_grid.ell) ** 2
        expected = b ** 2 / k2 + k2 * a ** 2 + free_params.alpha * a ** 2 / k2
        assert energy(state, free_params) == pytest.approx(expected, rel=1e-13)

    def test_quadratic_energy_is_norm_squared(self, small_grid, free_params):
        state = random_smooth_state(small_grid, seed=3)
        assert energy(state, free_params) == pytest.approx(energy_space_norm(state, free_params) ** 2, rel=1e-12)

    def test_cubic_potential(self, small_grid):
        p = PhysParams(alpha=1.0, nonlinearity=Nonlinearity.cubic(), g=SpectralField.zeros(small_grid))
        state = random_smooth_state(small_grid, seed=4)
        basis = get_basis(small_grid, 8)
        potential = basis.integrate(0.25 * basis.to_grid(state.u.coords) ** 4)
        assert energy(state, p) - energy_space_norm(state, p) ** 2 == pytest.approx(2 * potential, rel=1e-10)


class TestRhs:
    def test_equilibrium(self, small_grid, free_params):
        rate = rhs(State.zeros(small_grid), free_params)
        assert not rate.u.coords.any() and not rate.ut.coords.any()

    def test_single_mode_block(self, small_grid, free_params):
        a, b = 0.5, 0.25
        rate = rhs(single_mode(small_grid, 1, a, b), free_params)
        k4 = (2 / small_grid.ell) ** 4
        assert rate.u.coords[1] == pytest.approx(b)
        assert rate.ut.coords[1] == pytest.approx(-(k4 + free_params.alpha) * a - b)
        assert np.count_nonzero(rate.ut.coords) == 1

    def test_tangent_of_free_equation(self, small_grid, free_params):
        w = random_smooth_state(small_grid, seed=5)
        base = random_smooth_state(small_grid, seed=6).u
        lhs = tangent_rhs(w, base, free_params)
        np.testing.assert_allclose(lhs.to_vector(), rhs(w, free_params).to_vector(), atol=1e-13)

    def test_linear_f_tangent_drops_force(self, small_grid):
        g = forcing_field(small_grid, ForcingSpec(modes=[ForcingMode(k=[1], amplitude=1.0)]))
        p = PhysParams(alpha=0.3, nonlinearity=Nonlinearity.linear(0.7), g=g)
        state = random_smooth_state(small_grid, seed=7)
        kappa2 = get_basis(small_grid).kappa2
        expected = rhs(state, p).ut.coords - kappa2 * g.coords
        np.testing.assert_allclose(tangent_rhs(state, state.u, p).ut.coords, expected, atol=1e-12)

    def test_finite_difference_consistency(self, small_grid, cubic_params):
        model = ChoModel(small_grid, cubic_params)
        state = random_smooth_state(small_grid, seed=8)
        w = random_smooth_state(small_grid, seed=9)
        exact = tangent_rhs(w, state.u, cubic_params).to_vector()
        errors = []
        for eps in (1e-3, 1e-4):
            fd = (rhs(state + w.scaled(eps), cubic_params).to_vector() - rhs(state, cubic_params).to_vector()) / eps
            errors.append(energy_norm(model, fd - exact))
        assert errors[0] / errors[1] > 5.0

    def test_generator_matches_tangent_rhs(self, small_grid, cubic_params):
        model = ChoModel(small_grid, cubic_params)
        base = random_smooth_state(small_grid, seed=10)
        w = random_smooth_state(small_grid, seed=11)
        L = tangent_generator(base, cubic_params)
        expected = model.to_energy_coords(tangent_rhs(w, base.u, cubic_params).to_vector())
        np.testing.assert_allclose(L @ model.to_energy_coords(w.to_vector()), expected, rtol=1e-10, atol=1e-10)


class TestStepper:
    def test_damped_oscillator_exact(self, small_grid, free_params):
        x0, v0, dt = 0.6, -0.2, 0.37
        state = single_mode(small_grid, 4, x0, v0)
        omega2 = (5 / small_grid.ell) ** 4 + free_params.alpha
        beta = math.sqrt(omega2 - 0.25)
        stepper = Stepper(ChoModel(small_grid, free_params), dt)
        for n in (1, 5):
            t = n * dt
            out = stepper.step_n(state, n)
            x = math.exp(-t / 2) * (x0 * math.cos(beta * t) + (v0 + x0 / 2) / beta * math.sin(beta * t))
            v = math.exp(-t / 2) * (v0 * math.cos(beta * t) - (v0 / 2 + omega2 * x0) / beta * math.sin(beta * t))
            assert out.u.coords[4] == pytest.approx(x, abs=1e-12)
            assert out.ut.coords[4] == pytest.approx(v, abs=1e-12)

    def test_zero_state_fixed_point(self, small_grid):
        p = PhysParams(alpha=1.0, nonlinearity=Nonlinearity.cubic(), g=SpectralField.zeros(small_grid))
        out = step(State.zeros(small_grid), p, 0.1)
        assert not out.to_vector().any()

    def test_second_order_self_convergence(self, small_grid, cubic_params):
        state = random_smooth_state(small_grid, seed=12)
        model = ChoModel(small_grid, cubic_params)
        ends = [Stepper(model, dt).step_n(state, int(round(1.0 / dt))).to_vector() for dt in (0.02, 0.01, 0.005)]
        e1 = energy_norm(model, ends[0] - ends[1])
        e2 = energy_norm(model, ends[1] - ends[2])
        assert e1 / e2 > 3.0

    def test_semigroup_bit_exact(self, small_grid, cubic_params):
        stepper = Stepper(ChoModel(small_grid, cubic_params), 0.01)
        state = random_smooth_state(small_grid, seed=13)
        twice = stepper.step(stepper.step(state))
        assert np.array_equal(twice.to_vector(), stepper.step_n(state, 2).to_vector())

    def test_step_with_tangent_matches_difference_quotient(self, small_grid, cubic_params):
        stepper = Stepper(ChoModel(small_grid, cubic_params), 0.01)
        state = random_smooth_state(small_grid, seed=18)
        w = random_smooth_state(small_grid, seed=19).to_vector()
        moved, W1 = stepper.step_with_tangent(state, w[:, None])
        assert np.array_equal(moved.to_vector(), stepper.step(state).to_vector())
        eps = 1e-5
        y = state.to_vector()
        fd = (stepper.step_vector(y + eps * w) - stepper.step_vector(y - eps * w)) / (2.0 * eps)
        assert np.linalg.norm(W1[:, 0] - fd) < 1e-6 * np.linalg.norm(fd)

    def test_overflow_guard(self, small_grid, cubic_params, monkeypatch):
        monkeypatch.setattr(cho_service, "OVERFLOW_GUARD", 1e-6)
        with pytest.raises(BlowUpError):
            step(random_smooth_state(small_grid, seed=14), cubic_params, 0.01)

    def test_rejects_nonpositive_step(self, small_grid, cubic_params):
        with pytest.raises(ConfigurationError):
            Stepper(ChoModel(small_grid, cubic_params), 0.0)


class TestEnergyBookkeeping:
    def test_linear_energy_balance(self, small_grid, free_params):
        traj = simulate(random_smooth_state(small_grid, seed=15), free_params, 1e-3, 1.0)
        assert traj.energy_residual() < 1e-8

    def test_cubic_energy_balance(self, small_grid, cubic_params):
        traj = simulate(random_smooth_state(small_grid, seed=16, amplitude=0.5), cubic_params, 1e-3, 1.0)
        assert traj.energy_residual() < 1e-5

    def test_unforced_cubic_energy_balance_on_fine_grid(self):
        grid = GridSpec(n=1, N=64, ell=8.0)
        p = build_phys_params(grid, 1.0, NonlinearitySpec(family="cubic"), ForcingSpec())
        traj = simulate(random_smooth_state(grid, seed=16), p, 1e-3, 1.0)
        assert traj.energy_residual() < 1e-6

    def test_energy_never_increases(self, small_grid, cubic_params):
        traj = simulate(random_smooth_state(small_grid, seed=17), cubic_params, 1e-3, 2.0, record_every=500)
        report = dissipation_monitor(traj, 1.0)
        assert report.max_energy_increase < 1e-6 * traj.energy_scale
        assert report.sup_energy <= traj.energy[0]
        assert len(traj.states) == 5

    def test_monitor_needs_samples(self, small_grid, free_params):
        traj = simulate(State.zeros(small_grid), free_params, 0.1, 0.5)
        with pytest.raises(ConfigurationError):
            dissipation_monitor(traj, 10.0)

    def test_trajectory_csv(self, small_grid, free_params, tmp_path):
        traj = simulate(random_smooth_state(small_grid, seed=18), free_params, 0.01, 0.2)
        columns = read_trajectory_csv(write_trajectory_csv(traj, tmp_path / "traj.csv"))
        np.testing.assert_array_equal(columns["energy"], traj.energy)
        np.testing.assert_array_equal(columns["dissipation_integral"], traj.dissipation_integral)


class TestTangentDynamics:
    def test_free_tangent_energy_identity(self, small_grid, free_params):
        model = ChoModel(small_grid, free_params)
        traj = simulate(random_smooth_state(small_grid, seed=19), free_params, 1e-3, 1.0)
        assert tangent_energy_residual(model, traj.states, traj.states, traj.state_times) < 1e-8

    def test_zero_tangent(self, small_grid, cubic_params):
        model = ChoModel(small_grid, cubic_params)
        base, _, times = tangent_path(model, random_smooth_state(small_grid, seed=20), State.zeros(small_grid), 1e-2, 20)
        zeros = [State.zeros(small_grid)] * len(base)
        assert tangent_energy_residual(model, base, zeros, times) == 0.0

    def test_cubic_tangent_energy_identity(self, small_grid, cubic_params):
        model = ChoModel(small_grid, cubic_params)
        state = random_smooth_state(small_grid, seed=21)
        base, tangent, times = tangent_path(model, state, random_smooth_state(small_grid, seed=22), 1e-3, 500)
        assert tangent_energy_residual(model, base, tangent, times) < 1e-4

    @pytest.mark.slow
    def test_tangent_energy_identity_on_default_run(self):
        grid, p, integ = default_run()
        report = tangent_suite(grid, p, 0, integ.dt, 1.0, integ.amplitude)
        assert report["residual"] < 1e-5

    @pytest.mark.slow
    def test_tangent_energy_residual_is_second_order(self):
        grid, p, integ = default_run()
        coarse = tangent_suite(grid, p, 0, 1e-3, 0.5, integ.amplitude)["residual"]
        fine = tangent_suite(grid, p, 0, 5e-4, 0.5, integ.amplitude)["residual"]
        assert coarse / fine > 3.0

    def test_grid_mismatch(self, small_grid, cubic_params):
        model = ChoModel(small_grid, cubic_params)
        states = [State.zeros(small_grid)] * 4
        with pytest.raises(DimensionMismatchError):
            tangent_energy_residual(model, states, states[:3], [0.0, 1.0, 2.0, 3.0])

    def test_quasidifferential_affine_for_linear_f(self, small_grid):
        p = PhysParams(alpha=1.0, nonlinearity=Nonlinearity.linear(0.5), g=SpectralField.zeros(small_grid))
        xi1, xi2 = random_smooth_state(small_grid, seed=23), random_smooth_state(small_grid, seed=24)
        report = quasidifferential_test(xi1, xi2, p, 0.5, dt=1e-2)
        assert report.affine
        assert report.slope is None

    def test_quasidifferential_quadratic_remainder(self, small_grid, cubic_params):
        xi1, xi2 = random_smooth_state(small_grid, seed=25), random_smooth_state(small_grid, seed=26)
        report = quasidifferential_test(xi1, xi2, cubic_params, 0.5, dt=1e-2)
        assert not report.affine
        assert report.slope == pytest.approx(2.0, abs=0.15)

    def test_quasidifferential_roundoff_flag(self, small_grid, cubic_params):
        xi1, xi2 = random_smooth_state(small_grid, seed=27), random_smooth_state(small_grid, seed=28)
        report = quasidifferential_test(xi1, xi2, cubic_params, 0.1, dt=1e-2, eps_values=(1e-2, 1e-3, 1e-9))
        assert report.fitted[:2] == [True, True]
        assert report.fitted[2] is False

    def test_tangent_flow_obeys_liouville(self, small_grid, cubic_params, rng):
        model = ChoModel(small_grid, cubic_params)
        dt = 1e-3
        traj = simulate(random_smooth_state(small_grid, seed=29), cubic_params, dt, 0.5)
        flow = tangent_linear_flow(model, traj.states, dt)
        frame0 = VectorFrame(rng.standard_normal((flow.dim, 2)))
        _, trace = evolve_frame(flow, frame0, dt)
        scale = max(1.0, float(np.abs(trace.trace_QLQ).max()))
        assert liouville_residual(trace, "simpson") < 1e-3 * scale

    def test_modal_basis_turns_blocks_into_rotations(self, small_grid, free_params):
        model = ChoModel(small_grid, free_params)
        P, P_inv = model.modal_basis()
        rotated = P_inv @ model.linear_blocks() @ P
        np.testing.assert_allclose(rotated[:, 0, 0], -0.5, atol=1e-10)
        np.testing.assert_allclose(rotated[:, 1, 1], -0.5, atol=1e-10)
        np.testing.assert_allclose(rotated[:, 0, 1], -rotated[:, 1, 0], rtol=1e-10)
        np.testing.assert_allclose(model.linear_exponents(), -0.5, atol=1e-10)

    def test_modal_basis_diagonalizes_overdamped_modes(self):
        grid = GridSpec(n=1, N=8, ell=40.0)
        p = PhysParams(alpha=0.01, nonlinearity=Nonlinearity.linear(0.0), g=SpectralField.zeros(grid))
        model = ChoModel(grid, p)
        P, P_inv = model.modal_basis()
        rotated = P_inv @ model.linear_blocks() @ P
        np.testing.assert_allclose(rotated[:, 0, 1], 0.0, atol=1e-12)
        np.testing.assert_allclose(rotated[:, 1, 0], 0.0, atol=1e-12)
        exponents = model.linear_exponents()
        assert exponents[0] > -0.5 > exponents[-1]
        np.testing.assert_allclose(exponents.sum(), -grid.n_coords, rtol=1e-12)

    def test_modal_flow_is_a_change_of_basis(self, small_grid, cubic_params, rng):
        model = ChoModel(small_grid, cubic_params)
        dt = 1e-3
        traj = simulate(random_smooth_state(small_grid, seed=31), cubic_params, dt, 0.01)
        energy_flow = tangent_linear_flow(model, traj.states, dt)
        modal_flow = tangent_linear_flow(model, traj.states, dt, basis="modal")
        P, _ = model.modal_basis()
        Y = rng.standard_normal((modal_flow.dim, 3))
        np.testing.assert_allclose(
            apply_mode_blocks(P, modal_flow.step(0.0, dt, Y)),
            energy_flow.step(0.0, dt, apply_mode_blocks(P, Y)),
            atol=1e-10,
        )
        dense_P = apply_mode_blocks(P, np.eye(modal_flow.dim))
        L = energy_flow.at(dt)
        np.testing.assert_allclose(dense_P @ modal_flow.at(dt), L @ dense_P, atol=1e-9 * np.abs(L).max())

    def test_tangent_flow_rejects_unknown_basis(self, small_grid, cubic_params):
        model = ChoModel(small_grid, cubic_params)
        with pytest.raises(ConfigurationError):
            tangent_linear_flow(model, [State.zeros(small_grid)] * 2, 1e-2, basis="schur")

    def test_tangent_flow_rejects_other_step(self, small_grid, cubic_params, rng):
        model = ChoModel(small_grid, cubic_params)
        traj = simulate(random_smooth_state(small_grid, seed=30), cubic_params, 1e-2, 0.2)
        flow = tangent_linear_flow(model, traj.states, 1e-2)
        with pytest.raises(ConfigurationError):
            evolve_frame(flow, VectorFrame(rng.standard_normal((flow.dim, 1))), 2e-2)


class TestAttractorSample:
    def test_unforced_small_data_decays(self, small_grid, free_params):
        sample = attractor_sample(free_params, small_grid, 40.0, 2.0, 3, seed=1, dt=1e-2, amplitude=0.1)
        assert len(sample.states) == 3
        assert all(energy_space_norm(s, free_params) < 1e-6 for s in sample.states)
        assert sample.times == pytest.approx([40.0, 41.0, 42.0])

    def test_deterministic(self, small_grid, cubic_params):
        runs = [attractor_sample(cubic_params, small_grid, 0.5, 0.2, 2, seed=9, dt=1e-2) for _ in range(2)]
        for a, b in zip(runs[0].states, runs[1].states):
            assert np.array_equal(a.to_vector(), b.to_vector())
        assert runs[0].c1_proxy == runs[1].c1_proxy

    def test_requires_transient(self, small_grid, cubic_params):
        with pytest.raises(ConfigurationError):
            attractor_sample(cubic_params, small_grid, 0.0, 1.0, 2, seed=1)

    def test_samples_closer_than_a_step_rejected(self, small_grid, cubic_params):
        with pytest.raises(ConfigurationError, match="closer than one step"):
            attractor_sample(cubic_params, small_grid, 0.1, 0.01, 12, seed=1, dt=1e-3)

    def test_samples_are_distinct_times(self, small_grid, cubic_params):
        sample = attractor_sample(cubic_params, small_grid, 0.1, 0.01, 6, seed=1, dt=1e-3)
        assert len(set(sample.times)) == 6
        assert np.all(np.diff(sample.times) > 0)


class TestNonlinearity:
    def test_cubic(self):
        report = validate_nonlinearity(Nonlinearity.cubic())
        assert report.passed
        assert report.L == pytest.approx(0.25, abs=1e-12)
        assert report.K == pytest.approx(0.0, abs=1e-12)

    def test_linear(self):
        report = validate_nonlinearity(Nonlinearity.linear(1.0))
        assert report.passed
        assert report.kappa == 3.0
        assert report.C == 0.0

    def test_wrong_sign(self):
        bad = Nonlinearity(
            name="negative", f=lambda u: -u, fp=lambda u: -np.ones_like(u), fpp=lambda u: np.zeros_like(u),
            F=lambda u: -0.5 * u ** 2, kappa=3.0, degree=1,
        )
        report = validate_nonlinearity(bad)
        assert not report.passed
        assert report.violation_point is not None

    def test_power_family(self):
        report = validate_nonlinearity(Nonlinearity.from_spec(NonlinearitySpec(family="power", p=3.5, lam=0.2)))
        assert report.passed
        assert report.L <= 0.5


class TestSnapshots:
    def test_round_trip_with_params(self, small_grid, cubic_params, tmp_path):
        state = random_smooth_state(small_grid, seed=31)
        path = write_snapshot(state, 1.25, tmp_path / "snap.bin", cubic_params)
        loaded, time, params = read_snapshot(path)
        assert time == 1.25
        np.testing.assert_allclose(loaded.to_vector(), state.to_vector(), rtol=1e-14, atol=1e-15)
        assert params.alpha == cubic_params.alpha
        np.testing.assert_array_equal(params.g.coords, cubic_params.g.coords)

    def test_rejects_foreign_file(self, tmp_path):
        path = tmp_path / "junk.bin"
        path.write_bytes(b"x" * 64)
        with pytest.raises(ConfigurationError):
            read_snapshot(path)
