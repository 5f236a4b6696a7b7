#!/usr/bin/env python3
"""
CHO model service - discretized hyperbolic Cahn-Hilliard-Oono dynamics

    u_tt + u_t + Delta(Delta u - f(u) + g) + alpha u = 0

on the torus (2 pi ell)^n, in the real coordinates of ``basis``. With
A = diag(kappa^2) the coordinate system reads

    x' = v,  v' = -v - (A^2 + alpha) x - A P f(u) + A g.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from scipy.integrate import cumulative_simpson

from chodim.core.exceptions import BlowUpError, ConfigurationError, DimensionMismatchError
from chodim.services.cho_model.basis import SpectralBasis, get_basis
from chodim.services.cho_model.models import (
    ForcingSpec, GridSpec, Nonlinearity, NonlinearitySpec, PhysParams, SpectralField, State,
)
from chodim.services.cho_model.validators import validate_nonlinearity
from chodim.services.liouville import LinearFlow
from chodim.utils.quadrature import rate_residual

logger = logging.getLogger(__name__)

# energy-space norm beyond which a trajectory counts as blown up
OVERFLOW_GUARD = 1e12
# relative gap below which a 2x2 linear block counts as having a repeated eigenvalue
MODAL_TOL = 1e-10


class ChoModel:
    """Model operations for one grid and one parameter set"""

    def __init__(self, grid: GridSpec, p: PhysParams):
        if p.g.grid != grid:
            raise DimensionMismatchError("Forcing g lives on a different grid")
        self.grid = grid
        self.p = p
        self.nl = p.nonlinearity
        # energy quadrature is always padded; dynamics only when dealiasing is on
        self.quad: SpectralBasis = get_basis(grid, self.nl.pad)
        self.dyn: SpectralBasis = self.quad if grid.dealias else get_basis(grid, 1)
        self.kappa2 = self.quad.kappa2
        self.stiffness = self.kappa2 ** 2 + p.alpha
        self.scaling = np.concatenate([np.sqrt(self.kappa2 + p.alpha / self.kappa2), 1.0 / np.sqrt(self.kappa2)])

    # Norms and energy
    def sobolev_norm(self, field: SpectralField, s: float) -> float:
        return float(np.sqrt(np.sum(self.kappa2 ** s * field.coords ** 2)))

    def energy_space_norm(self, state: State) -> float:
        return float(np.linalg.norm(self.to_energy_coords(state.to_vector())))

    def energy(self, state: State) -> float:
        x, v = state.u.coords, state.ut.coords
        quadratic = np.sum(v ** 2 / self.kappa2) + np.sum(self.kappa2 * x ** 2) + self.p.alpha * np.sum(x ** 2 / self.kappa2)
        potential = self.quad.integrate(self.nl.F(self.quad.to_grid(x)))
        return float(quadratic + 2.0 * potential - 2.0 * float(self.p.g.coords @ x))

    def dissipation_rate(self, state: State) -> float:
        """2 |u_t|^2_{H^-1}"""
        return float(2.0 * np.sum(state.ut.coords ** 2 / self.kappa2))

    def to_energy_coords(self, y: np.ndarray) -> np.ndarray:
        """z = D xi with |z| = |xi|_E"""
        y = np.asarray(y, dtype=float)
        return self.scaling * y if y.ndim == 1 else self.scaling[:, None] * y

    def from_energy_coords(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        return z / self.scaling if z.ndim == 1 else z / self.scaling[:, None]

    # Right-hand sides
    def nonlinear_term(self, x: np.ndarray) -> np.ndarray:
        """-A P f(u) + A g"""
        fu = self.nl.f(self.dyn.to_grid(x))
        if not np.all(np.isfinite(fu)):
            raise BlowUpError(float("nan"), "Non-finite nonlinear product")
        return -self.kappa2 * self.dyn.project(fu) + self.kappa2 * self.p.g.coords

    def nonlinear_derivative(self, x: np.ndarray, w: np.ndarray) -> np.ndarray:
        """-A P(f'(u) w), w may carry a trailing column axis"""
        fp = self.nl.fp(self.dyn.to_grid(x))
        w_grid = self.dyn.to_grid(w)
        if w_grid.ndim > fp.ndim:
            fp = fp[..., None]
        product = self.dyn.project(fp * w_grid)
        return -(self.kappa2[:, None] if product.ndim > 1 else self.kappa2) * product

    def rhs(self, state: State) -> State:
        x, v = state.u.coords, state.ut.coords
        rate = -v - self.stiffness * x + self.nonlinear_term(x)
        return State(SpectralField(self.grid, v), SpectralField(self.grid, rate))

    def tangent_rhs(self, wstate: State, base_u: SpectralField) -> State:
        w, wt = wstate.u.coords, wstate.ut.coords
        rate = -wt - self.stiffness * w + self.nonlinear_derivative(base_u.coords, w)
        return State(SpectralField(self.grid, wt), SpectralField(self.grid, rate))

    def derivative_matrix(self, u: SpectralField) -> np.ndarray:
        """Fp = S^T diag(w f'(u)) S on the dynamics grid"""
        return self.dyn.weighted_gram(self.nl.fp(self.dyn.to_grid(u.coords)))

    def linear_blocks(self) -> np.ndarray:
        """Per-mode 2x2 blocks of the linearization at u = 0 in energy-orthonormal coordinates"""
        m = self.grid.n_coords
        shift = float(np.asarray(self.nl.fp(np.zeros(1)), dtype=float).ravel()[0])
        s_x, s_v = self.scaling[:m], self.scaling[m:]
        blocks = np.zeros((m, 2, 2))
        blocks[:, 0, 1] = s_x / s_v
        blocks[:, 1, 0] = -(self.stiffness + self.kappa2 * shift) * s_v / s_x
        blocks[:, 1, 1] = -1.0
        return blocks

    def linear_exponents(self) -> np.ndarray:
        """Real parts of the eigenvalues of the linearization at u = 0, descending"""
        return np.sort(np.linalg.eigvals(self.linear_blocks()).real.ravel())[::-1]

    def modal_basis(self) -> Tuple[np.ndarray, np.ndarray]:
        """Per-mode (P, P^{-1}) with P^{-1} A P = mu I + nu J for a complex pair

        A real distinct pair gets its eigenvectors, a repeated one the identity.
        """
        blocks = self.linear_blocks()
        values, vectors = np.linalg.eig(blocks)
        scale = 1.0 + np.abs(values).max(axis=1)
        rotating = np.abs(values[:, 0].imag) > MODAL_TOL * scale
        distinct = ~rotating & (np.abs(values[:, 0] - values[:, 1]) > MODAL_TOL * scale)
        P = np.tile(np.eye(2), (len(blocks), 1, 1))
        P[rotating, :, 0] = vectors[rotating, :, 0].real
        P[rotating, :, 1] = vectors[rotating, :, 0].imag
        P[distinct] = vectors[distinct].real
        return P, np.linalg.inv(P)

    def tangent_generator(self, base: State) -> np.ndarray:
        """Dense L(t) of the equation of variations in energy-orthonormal coordinates"""
        m = self.grid.n_coords
        L = np.zeros((2 * m, 2 * m))
        L[:m, m:] = np.eye(m)
        L[m:, :m] = -np.diag(self.stiffness) - self.kappa2[:, None] * self.derivative_matrix(base.u)
        L[m:, m:] = -np.eye(m)
        return self.scaling[:, None] * L / self.scaling[None, :]


class Stepper:
    """Exponential midpoint stepper

    The linear 2x2 block of every coordinate is propagated exactly; the
    nonlinearity enters through h phi_1(h Lambda) at the midpoint.
    """

    def __init__(self, model: ChoModel, dt: float):
        if dt <= 0:
            raise ConfigurationError(f"Step size must be positive, got {dt}")
        self.model = model
        self.dt = dt
        self.half = self._setup(0.5 * dt)
        self.full = self._setup(dt)

    def _setup(self, tau: float):
        m = self.model.grid.n_coords
        augmented = np.zeros((m, 4, 4))
        augmented[:, 0, 1] = tau
        augmented[:, 1, 0] = -tau * self.model.stiffness
        augmented[:, 1, 1] = -tau
        augmented[:, 0, 2] = tau
        augmented[:, 1, 3] = tau
        blocks = scipy.linalg.expm(augmented)
        # exponential and the forcing column of tau phi_1(tau Lambda)
        return blocks[:, :2, :2].copy(), blocks[:, :2, 3].copy()

    @staticmethod
    def _apply(prop, x, v, forcing):
        E, phi = prop
        if x.ndim > 1:
            E, phi = E[:, :, :, None], phi[:, :, None]
        x1 = E[:, 0, 0] * x + E[:, 0, 1] * v + phi[:, 0] * forcing
        v1 = E[:, 1, 0] * x + E[:, 1, 1] * v + phi[:, 1] * forcing
        return x1, v1

    def _split(self, y):
        m = self.model.grid.n_coords
        return y[:m], y[m:]

    def _stages(self, y: np.ndarray):
        x, v = self._split(y)
        xh, vh = self._apply(self.half, x, v, self.model.nonlinear_term(x))
        x1, v1 = self._apply(self.full, x, v, self.model.nonlinear_term(xh))
        return x, xh, np.concatenate([x1, v1])

    def _guard(self, y: np.ndarray, time: float) -> None:
        if not np.all(np.isfinite(y)):
            raise BlowUpError(time, "Non-finite state")
        norm = float(np.linalg.norm(self.model.to_energy_coords(y)))
        if norm > OVERFLOW_GUARD:
            raise BlowUpError(time, "Energy-space norm exceeded the overflow guard", norm)

    def step_vector(self, y: np.ndarray, time: float = 0.0) -> np.ndarray:
        _, _, y1 = self._stages(y)
        self._guard(y1, time + self.dt)
        return y1

    def step(self, state: State, time: float = 0.0) -> State:
        return State.from_vector(self.model.grid, self.step_vector(state.to_vector(), time))

    def step_n(self, state: State, substeps: int, time: float = 0.0) -> State:
        y = state.to_vector()
        for i in range(substeps):
            y = self.step_vector(y, time + i * self.dt)
        return State.from_vector(self.model.grid, y)

    def tangent_step(self, y: np.ndarray, W: np.ndarray) -> np.ndarray:
        """Derivative of the discrete step at y applied to the columns of W (xi coordinates)"""
        x, v = self._split(y)
        W = np.asarray(W, dtype=float)
        wx, wv = self._split(W)
        xh, _ = self._apply(self.half, x, v, self.model.nonlinear_term(x))
        whx, _ = self._apply(self.half, wx, wv, self.model.nonlinear_derivative(x, wx))
        w1x, w1v = self._apply(self.full, wx, wv, self.model.nonlinear_derivative(xh, whx))
        return np.concatenate([w1x, w1v])

    def step_with_tangent(self, state: State, W: np.ndarray, time: float = 0.0):
        y = state.to_vector()
        W1 = self.tangent_step(y, W)
        return State.from_vector(self.model.grid, self.step_vector(y, time)), W1


@dataclass
class Trajectory:
    """Per-step energy bookkeeping plus recorded states"""

    times: np.ndarray
    energy: np.ndarray
    energy_space_norm: np.ndarray
    dissipation_integral: np.ndarray
    state_times: np.ndarray
    states: List[State] = field(default_factory=list)

    @property
    def energy_scale(self) -> float:
        return max(abs(float(self.energy[0])), float(self.energy_space_norm[0]) ** 2, np.finfo(float).tiny)

    def energy_residual(self) -> float:
        """max |E(t) + 2 int |u_t|^2_{H^-1} - E(0)|, relative to the initial energy scale"""
        balance = self.energy + self.dissipation_integral - self.energy[0]
        return float(np.abs(balance).max() / self.energy_scale)


def simulate(state0: State, p: PhysParams, dt: float, t_end: float, record_every: int = 1) -> Trajectory:
    """Integrate from state0 recording energy every step and states every ``record_every`` steps"""
    model = ChoModel(state0.grid, p)
    stepper = Stepper(model, dt)
    n_steps = max(1, int(round(t_end / dt)))
    times = dt * np.arange(n_steps + 1)
    energy = np.zeros(n_steps + 1)
    norm = np.zeros(n_steps + 1)
    dissipation = np.zeros(n_steps + 1)
    states, state_times = [], []
    state = state0
    for i in range(n_steps + 1):
        if i:
            state = stepper.step(state, times[i - 1])
        energy[i] = model.energy(state)
        norm[i] = model.energy_space_norm(state)
        dissipation[i] = model.dissipation_rate(state)
        if i % record_every == 0 or i == n_steps:
            states.append(state)
            state_times.append(times[i])
        if i and i % 1000 == 0:
            logger.debug("simulate: t=%.4g E=%.6g", times[i], energy[i])
    integral = cumulative_simpson(dissipation, x=times, initial=0.0) if n_steps > 1 else np.array([0.0, 0.5 * dt * dissipation.sum()])
    logger.info("simulated %d steps to t=%.4g, E: %.6g -> %.6g", n_steps, times[-1], energy[0], energy[-1])
    return Trajectory(times, energy, norm, integral, np.array(state_times), states)


@dataclass
class DissipationReport:
    t_after: float
    sup_energy: float
    sup_energy_space_norm: float
    max_energy_increase: float


def dissipation_monitor(trajectory: Trajectory, t_after: float) -> DissipationReport:
    """Energy ceiling after t_after and the largest one-step energy increase"""
    after = trajectory.times >= t_after
    if not after.any():
        raise ConfigurationError(f"No samples after t={t_after}")
    increases = np.diff(trajectory.energy)
    return DissipationReport(
        t_after=t_after,
        sup_energy=float(trajectory.energy[after].max()),
        sup_energy_space_norm=float(trajectory.energy_space_norm[after].max()),
        max_energy_increase=float(max(increases.max(), 0.0)) if increases.size else 0.0,
    )


def random_smooth_state(grid: GridSpec, seed: int, amplitude: float = 1.0, k_max: float = 3.0) -> State:
    """Seeded state whose u and u_t have L^2 norm ``amplitude`` on modes |k| <= k_max"""
    basis = get_basis(grid, 1)
    rng = np.random.default_rng(seed)
    mask = np.tile(np.linalg.norm(basis.modes, axis=1) <= k_max, 2)
    if not mask.any():
        raise ConfigurationError(f"No retained modes with |k| <= {k_max}")
    fields = []
    for _ in range(2):
        coords = rng.standard_normal(grid.n_coords) * mask
        fields.append(SpectralField(grid, amplitude * coords / np.linalg.norm(coords)))
    return State(*fields)


def forcing_field(grid: GridSpec, spec: ForcingSpec) -> SpectralField:
    basis = get_basis(grid, 1)
    coords = np.zeros(grid.n_coords)
    scale = math.sqrt(grid.volume / 2.0)
    for mode in spec.modes:
        if len(mode.k) != grid.n:
            raise ConfigurationError(f"Forcing wavevector {mode.k} does not have {grid.n} components")
        try:
            index, sign = basis.locate(mode.k)
        except ValueError as e:
            raise ConfigurationError(str(e))
        if mode.phase == "cos":
            coords[index] += mode.amplitude * scale
        else:
            coords[basis.n_half + index] -= sign * mode.amplitude * scale
    return SpectralField(grid, coords)


def build_phys_params(grid: GridSpec, alpha: float, nonlinearity: NonlinearitySpec, forcing: ForcingSpec) -> PhysParams:
    """PhysParams with the nonlinearity checked against its structural conditions"""
    nl = Nonlinearity.from_spec(nonlinearity)
    report = validate_nonlinearity(nl)
    if not report.passed:
        raise ConfigurationError(f"Nonlinearity {nl.name} fails: {'; '.join(report.violations)}")
    return PhysParams(alpha=alpha, nonlinearity=nl, g=forcing_field(grid, forcing), nonlinearity_spec=nonlinearity)


@dataclass
class AttractorSample:
    states: List[State]
    times: List[float]
    energies: List[float]
    c1_proxy: Dict[str, float]


def attractor_sample(
    p: PhysParams,
    grid: GridSpec,
    t_transient: float,
    t_sample: float,
    n_samples: int,
    seed: int,
    dt: float = 1e-3,
    amplitude: float = 1.0,
) -> AttractorSample:
    """Post-transient snapshots of one seeded trajectory, equally spaced over t_sample"""
    if t_transient <= 0:
        raise ConfigurationError(f"t_transient must be positive, got {t_transient}")
    if n_samples < 1:
        raise ConfigurationError(f"n_samples must be positive, got {n_samples}")
    if n_samples > 1 and t_sample / (n_samples - 1) < dt:
        raise ConfigurationError(
            f"{n_samples} samples over t_sample={t_sample:g} are closer than one step dt={dt:g}"
        )
    model = ChoModel(grid, p)
    stepper = Stepper(model, dt)
    n_transient = int(round(t_transient / dt))
    spacing = int(round(t_sample / dt / (n_samples - 1))) if n_samples > 1 else 0
    targets = [n_transient + i * spacing for i in range(n_samples)]

    state = random_smooth_state(grid, seed, amplitude)
    states, times, energies = [], [], []
    max_u, max_grad = 0.0, 0.0
    step = 0
    for target in targets:
        state = stepper.step_n(state, target - step, step * dt)
        step = target
        states.append(state)
        times.append(step * dt)
        energies.append(model.energy(state))
        max_u = max(max_u, float(np.abs(model.quad.to_grid(state.u.coords)).max()))
        max_grad = max(max_grad, float(np.abs(model.quad.gradient_grid(state.u.coords)).max()))
    logger.info("attractor sample: %d states after t=%.4g, max|u|=%.4g", n_samples, t_transient, max_u)
    return AttractorSample(states, times, energies, {"max_abs_u": max_u, "max_abs_grad_u": max_grad})


def apply_mode_blocks(blocks: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Apply per-mode 2x2 blocks to vectors stacked as [x part; v part], columns allowed"""
    m = blocks.shape[0]
    b = blocks if z.ndim == 1 else blocks[..., None]
    x, v = z[:m], z[m:]
    return np.concatenate([b[:, 0, 0] * x + b[:, 0, 1] * v, b[:, 1, 0] * x + b[:, 1, 1] * v])


def tangent_linear_flow(
    model: ChoModel,
    base_states: Sequence[State],
    dt: float,
    basis: Literal["energy", "modal"] = "energy",
) -> LinearFlow:
    """Equation of variations along a base trajectory sampled every dt

    Coordinates are energy-orthonormal, or with ``basis="modal"`` the per-mode
    basis of ``ChoModel.modal_basis`` in which the linear part is a scaled
    rotation. Vectors advance by the exact derivative of the discrete step;
    the dense generator is evaluated on the grid for traces.
    """
    if len(base_states) < 2:
        raise ConfigurationError("Base trajectory needs at least two states")
    if basis not in ("energy", "modal"):
        raise ConfigurationError(f"Unknown tangent basis '{basis}'")
    stepper = Stepper(model, dt)
    vectors = [s.to_vector() for s in base_states]
    D = model.scaling[:, None]
    if basis == "modal":
        P, P_inv = model.modal_basis()
        P_t = P.transpose(0, 2, 1)
        into = lambda W: apply_mode_blocks(P_inv, W)
        out_of = lambda W: apply_mode_blocks(P, W)
    else:
        P_t = None
        into = out_of = lambda W: W

    def index(t: float) -> int:
        return min(int(round(t / dt)), len(vectors) - 1)

    def step(t: float, h: float, W: np.ndarray) -> np.ndarray:
        if abs(h - dt) > 1e-9 * dt:
            raise ConfigurationError(f"Tangent flow was built for dt={dt}, asked for {h}")
        return into(D * stepper.tangent_step(vectors[index(t)], out_of(W) / D))

    def generator(t: float) -> np.ndarray:
        L = model.tangent_generator(base_states[index(t)])
        if P_t is None:
            return L
        return into(apply_mode_blocks(P_t, L.T).T)

    return LinearFlow(generator=generator, t_end=(len(vectors) - 1) * dt, dim=2 * model.grid.n_coords, step=step)


def tangent_propagator(model: ChoModel, base_states: Sequence[State], dt: float) -> np.ndarray:
    """Discrete U(T, 0) along base states sampled every dt, in energy-orthonormal coordinates"""
    stepper = Stepper(model, dt)
    D = model.scaling[:, None]
    W = np.eye(2 * model.grid.n_coords) / D
    for base in base_states[:-1]:
        W = stepper.tangent_step(base.to_vector(), W)
    return D * W


def tangent_energy_residual(
    model: ChoModel,
    trajectory: Sequence[State],
    wtrajectory: Sequence[State],
    times: Sequence[float],
    rule: str = "simpson",
) -> float:
    """Deviation of d/dt 1/2 |xi_w|_E^2 from -|w_t|^2_{H^-1} - (f'(u) w, w_t), relative to |xi_w(0)|_E^2"""
    if not len(trajectory) == len(wtrajectory) == len(times):
        raise DimensionMismatchError(
            "Base, tangent and time grids differ in length", expected=len(times), actual=len(wtrajectory)
        )
    half_norm = np.array([0.5 * model.energy_space_norm(w) ** 2 for w in wtrajectory])
    rate = np.array([
        -float(np.sum(w.ut.coords ** 2 / model.kappa2))
        + float(w.ut.coords @ (model.nonlinear_derivative(u.u.coords, w.u.coords) / model.kappa2))
        for u, w in zip(trajectory, wtrajectory)
    ])
    scale = 2.0 * half_norm[0]
    if scale == 0.0:
        return float(np.abs(half_norm).max() + np.abs(rate).max())
    return float(rate_residual(np.asarray(times, dtype=float), half_norm, rate, rule).max() / scale)


@dataclass
class QuasidifferentialReport:
    eps: List[float]
    residuals: List[float]
    fitted: List[bool]
    slope: Optional[float]
    affine: bool


def quasidifferential_test(
    xi1: State,
    xi2: State,
    p: PhysParams,
    T: float,
    dt: float = 1e-3,
    eps_values: Sequence[float] = (1e-2, 1e-3, 1e-4, 1e-5),
) -> QuasidifferentialReport:
    """Remainder |S(T)(xi1 + eps d) - S(T)xi1 - eps S'(T, xi1) d|_E for d = xi2 - xi1

    Points with eps below 1e-8 or a remainder at round-off level are
    reported but left out of the log-log fit.
    """
    model = ChoModel(xi1.grid, p)
    stepper = Stepper(model, dt)
    n_steps = max(1, int(round(T / dt)))
    direction = (xi2 - xi1).to_vector()

    y = xi1.to_vector()
    W = direction[:, None]
    for i in range(n_steps):
        W = stepper.tangent_step(y, W)
        y = stepper.step_vector(y, i * dt)
    base_T, tangent_T = y, W[:, 0]
    size = float(np.linalg.norm(model.to_energy_coords(base_T))) + float(np.linalg.norm(model.to_energy_coords(tangent_T)))
    floor = 1e-13 * max(size, 1.0)

    residuals, fitted = [], []
    for eps in eps_values:
        z = xi1.to_vector() + eps * direction
        for i in range(n_steps):
            z = stepper.step_vector(z, i * dt)
        r = float(np.linalg.norm(model.to_energy_coords(z - base_T - eps * tangent_T)))
        residuals.append(r)
        fitted.append(eps >= 1e-8 and r > floor)
    affine = max(r / eps for r, eps in zip(residuals, eps_values)) <= 1e-8 * max(size, 1.0)
    slope = None
    if not affine and sum(fitted) >= 2:
        log_eps = np.log([e for e, ok in zip(eps_values, fitted) if ok])
        log_r = np.log([r for r, ok in zip(residuals, fitted) if ok])
        slope = float(np.polyfit(log_eps, log_r, 1)[0])
    return QuasidifferentialReport(list(map(float, eps_values)), residuals, fitted, slope, affine)


# Functional interface over ChoModel
def sobolev_norm(field: SpectralField, s: float) -> float:
    kappa2 = get_basis(field.grid, 1).kappa2
    return float(np.sqrt(np.sum(kappa2 ** s * field.coords ** 2)))


def energy(state: State, p: PhysParams) -> float:
    return ChoModel(state.grid, p).energy(state)


def energy_space_norm(state: State, p: PhysParams) -> float:
    return ChoModel(state.grid, p).energy_space_norm(state)


def rhs(state: State, p: PhysParams) -> State:
    return ChoModel(state.grid, p).rhs(state)


def tangent_rhs(wstate: State, base_u: SpectralField, p: PhysParams) -> State:
    return ChoModel(wstate.grid, p).tangent_rhs(wstate, base_u)


def tangent_generator(base: State, p: PhysParams) -> np.ndarray:
    return ChoModel(base.grid, p).tangent_generator(base)


def step(state: State, p: PhysParams, dt: float) -> State:
    return Stepper(ChoModel(state.grid, p), dt).step(state)
