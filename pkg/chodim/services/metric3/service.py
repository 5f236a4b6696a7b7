#!/usr/bin/env python3
"""
Metric service - the time-dependent energy metric along a base trajectory

For a tangent state xi_w = (w, w_t) on a base state u the metric is

    |xi_w|^2_E + 2 delta (w_t, w)_{-1} + delta |w|^2_{-1} + (f'(u) w, w)
        + Lweight |(1 - Delta)^{-1/2} (psi_R w)|^2

and the quadratic form M with d/dt 1/2 |xi_w|^2_{E(t)} = (M xi_w, xi_w) is

    -(1 - delta)|w_t|^2_{-1} - delta |w|^2_1 - alpha delta |w|^2_{-1} - delta (f'(u) w, w)
        + 1/2 (f''(u) u_t, w^2) + Lweight ((1 - Delta)^{-1}(psi_R w), psi_R w_t).

All matrices are returned in the energy-orthonormal coordinates of
``ChoModel``, where the E form is the identity.
"""

import logging
from concurrent.futures import Executor
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from chodim.core.dependencies import ordered_map
from chodim.core.exceptions import ConfigurationError, HypothesisValidationError, MetricInvalidError
from chodim.services.cho_model import ChoModel, GridSpec, PhysParams, State, get_basis
from chodim.services.metric3.models import MetricParams, SplittingReport, TraceCurves
from chodim.services.multilinear import generalized_spectrum
from chodim.utils.quadrature import rate_residual

logger = logging.getLogger(__name__)

LWEIGHT_MAX_POWER = 20


def cutoff_field(mp: MetricParams, grid: GridSpec, M: Optional[int] = None) -> np.ndarray:
    """psi_R on the M^n grid: 1 within R - 1 of the cell center, 0 beyond R, quintic smoothstep between"""
    basis = get_basis(grid, 1) if M is None else get_basis(grid, M // grid.N)
    if mp.cutoff_profile == "none":
        return np.ones(basis.shape)
    R = mp.radius(grid)
    r = np.sqrt(np.sum((basis.grid_points() - grid.half_period) ** 2, axis=0))
    s = np.clip(R - r, 0.0, 1.0)
    return s ** 3 * (10.0 - 15.0 * s + 6.0 * s ** 2)


class MetricAssembler:
    """Dense metric, rate and M forms for one grid, parameter set and metric choice"""

    def __init__(self, grid: GridSpec, p: PhysParams, mp: MetricParams):
        self.model = ChoModel(grid, p)
        self.grid = grid
        self.p = p
        self.mp = mp
        self.m = grid.n_coords
        basis = self.model.quad
        self.psi = cutoff_field(mp, grid, basis.M)
        self.corrector = basis.masked_multiplier_gram(self.psi, -1.0)
        self.compact_x = basis.weighted_gram(self.psi ** 2)
        self._inv = 1.0 / self.model.scaling

    def _to_energy(self, A: np.ndarray) -> np.ndarray:
        return self._inv[:, None] * A * self._inv[None, :]

    def _pairing(self, values: np.ndarray) -> np.ndarray:
        return self.model.quad.weighted_gram(values)

    def _u_grid(self, base: State) -> np.ndarray:
        return self.model.quad.to_grid(base.u.coords)

    def metric_matrix(self, base: State) -> np.ndarray:
        m, k2, alpha, delta = self.m, self.model.kappa2, self.p.alpha, self.mp.delta
        V = np.zeros((2 * m, 2 * m))
        V[:m, :m] = np.diag(k2 + (alpha + delta) / k2) + self._pairing(self.model.nl.fp(self._u_grid(base)))
        V[:m, :m] += self.mp.Lweight * self.corrector
        V[:m, m:] = V[m:, :m] = np.diag(delta / k2)
        V[m:, m:] = np.diag(1.0 / k2)
        return self._to_energy(V)

    def metric_rate_matrix(self, base: State, base_rate: State) -> np.ndarray:
        """dV/dt along the base trajectory; only (f'(u) w, w) moves"""
        m = self.m
        rate = np.zeros((2 * m, 2 * m))
        ut = self.model.quad.to_grid(base_rate.u.coords)
        rate[:m, :m] = self._pairing(self.model.nl.fpp(self._u_grid(base)) * ut)
        return self._to_energy(rate)

    def m_matrix(self, base: State, base_rate: State) -> np.ndarray:
        m, k2, alpha, delta = self.m, self.model.kappa2, self.p.alpha, self.mp.delta
        u = self._u_grid(base)
        ut = self.model.quad.to_grid(base_rate.u.coords)
        M = np.zeros((2 * m, 2 * m))
        M[:m, :m] = -np.diag(delta * k2 + alpha * delta / k2) - delta * self._pairing(self.model.nl.fp(u))
        M[:m, :m] += 0.5 * self._pairing(self.model.nl.fpp(u) * ut)
        M[:m, m:] = M[m:, :m] = 0.5 * self.mp.Lweight * self.corrector
        M[m:, m:] = -np.diag((1.0 - delta) / k2)
        return self._to_energy(M)

    def compact_matrix(self) -> np.ndarray:
        """K with (K xi, xi)_E = |psi_R w|^2_{L^2}"""
        K = np.zeros((2 * self.m, 2 * self.m))
        K[: self.m, : self.m] = self.compact_x
        return self._to_energy(K)

    def energy_coords(self, state: State) -> np.ndarray:
        return self.model.to_energy_coords(state.to_vector())

    def state_from_energy(self, z: np.ndarray) -> State:
        return State.from_vector(self.grid, self.model.from_energy_coords(z))

    def rate_of(self, base: State) -> State:
        return self.model.rhs(base)


def _lambda_min(V: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(V)[0])


def metric_norm(xi_w: State, base: State, p: PhysParams, mp: MetricParams) -> float:
    """|xi_w|^2_{E(t)}; a negative value rejects the metric parameters"""
    assembler = MetricAssembler(base.grid, p, mp)
    z = assembler.energy_coords(xi_w)
    value = float(z @ assembler.metric_matrix(base) @ z)
    if value < -1e-14 * max(1.0, float(z @ z)):
        raise MetricInvalidError(f"Metric value {value:.3e} is negative", lambda_min=_lambda_min(assembler.metric_matrix(base)))
    return max(value, 0.0)


def m_form(xi_w: State, base: State, base_rate: State, p: PhysParams, mp: MetricParams) -> float:
    """(M xi_w, xi_w), the rate of 1/2 |xi_w|^2_{E(t)} along the equation of variations"""
    assembler = MetricAssembler(base.grid, p, mp)
    z = assembler.energy_coords(xi_w)
    return float(z @ assembler.m_matrix(base, base_rate) @ z)


def equivalence_constants(samples: Sequence[State], p: PhysParams, mp: MetricParams) -> float:
    """c >= 1 with c^{-1}|xi|^2_E <= |xi|^2_{E(t)} <= c|xi|^2_E on every sample"""
    if not samples:
        raise ConfigurationError("equivalence_constants needs at least one sample")
    assembler = MetricAssembler(samples[0].grid, p, mp)
    c = 1.0
    for i, base in enumerate(samples):
        values = np.linalg.eigvalsh(assembler.metric_matrix(base))
        if values[0] <= 0.0:
            raise MetricInvalidError(f"Metric is not positive definite on sample {i}", lambda_min=float(values[0]))
        c = max(c, float(values[-1]), 1.0 / float(values[0]))
    return c


def compact_form_spectrum(mp: MetricParams, grid: GridSpec, alpha: float, pad: int = 2) -> np.ndarray:
    """Descending eigenvalues of xi -> |psi_R w|^2_{L^2} relative to the E form"""
    basis = get_basis(grid, pad)
    psi = cutoff_field(mp, grid, basis.M)
    kappa2 = basis.kappa2
    inv = 1.0 / np.sqrt(kappa2 + alpha / kappa2)
    K = inv[:, None] * basis.weighted_gram(psi ** 2) * inv[None, :]
    values = np.concatenate([np.linalg.eigvalsh(K), np.zeros(grid.n_coords)])
    return np.sort(values)[::-1]


def tune_metric_params(
    samples: Sequence[State],
    p: PhysParams,
    grid: GridSpec,
    delta: Optional[float] = None,
    R: Optional[float] = None,
    cutoff_profile: str = "smoothstep",
    threshold: float = 0.1,
) -> MetricParams:
    """delta and R by default, then the smallest Lweight in {0, 1, 2, 4, ...} with lambda_min > threshold"""
    delta = MetricParams.default_delta(p.alpha) if delta is None else delta
    candidates = [0.0] + [2.0 ** j for j in range(LWEIGHT_MAX_POWER + 1)]
    worst = None
    for Lweight in candidates:
        mp = MetricParams(delta=delta, Lweight=Lweight, R=R, cutoff_profile=cutoff_profile)
        assembler = MetricAssembler(grid, p, mp)
        worst = min(_lambda_min(assembler.metric_matrix(base)) for base in samples)
        if worst > threshold:
            logger.info("tuned metric: delta=%.4g Lweight=%.4g lambda_min=%.4g", delta, Lweight, worst)
            return mp
    raise MetricInvalidError(
        f"No Lweight up to 2^{LWEIGHT_MAX_POWER} gives lambda_min > {threshold}", lambda_min=worst
    )


def _splitting_margins(Ms: Sequence[np.ndarray], K: np.ndarray, C1: float) -> np.ndarray:
    """lambda_max(M - C1 K) per sample"""
    return np.array([np.linalg.eigvalsh(M - C1 * K)[-1] for M in Ms])


def splitting_estimate(
    samples: Sequence[State],
    p: PhysParams,
    mp: MetricParams,
    n_directions: int = 64,
    seed: int = 0,
    rates: Optional[Sequence[State]] = None,
    c1: Optional[float] = None,
    gamma_fraction: float = 0.5,
) -> SplittingReport:
    """gamma and C1 with (M xi, xi) <= -gamma |xi|^2_E + C1 |psi_R w|^2 on every sample

    With ``c1`` fixed the largest admissible gamma is reported. Otherwise gamma
    is ``gamma_fraction`` of its supremum over all C1, and C1 is the smallest
    weight reaching it. The inequality is certified through the top
    eigenvalue of M + gamma - C1 K and spot-checked on the eigendirections of
    M plus ``n_directions`` random probes.
    """
    if not samples:
        raise ConfigurationError("splitting_estimate needs at least one sample")
    grid = samples[0].grid
    assembler = MetricAssembler(grid, p, mp)
    rates = rates if rates is not None else [assembler.rate_of(s) for s in samples]
    Ms = [assembler.m_matrix(s, r) for s, r in zip(samples, rates)]
    K = assembler.compact_matrix()

    if c1 is not None:
        C1 = float(c1)
        gamma = -float(_splitting_margins(Ms, K, C1).max())
    else:
        scale = max(1.0, max(float(np.abs(np.linalg.eigvalsh(M)).max()) for M in Ms))
        cap = 1e6 * scale / max(float(np.linalg.eigvalsh(K)[-1]), 1e-300)
        gamma_sup = -float(_splitting_margins(Ms, K, cap).max())
        target = gamma_fraction * gamma_sup
        C1 = 0.0
        if gamma_sup > 0 and -float(_splitting_margins(Ms, K, 0.0).max()) < target:
            lo, hi = 0.0, cap
            for _ in range(100):
                mid = 0.5 * (lo + hi)
                if -float(_splitting_margins(Ms, K, mid).max()) >= target:
                    hi = mid
                else:
                    lo = mid
            C1 = hi
        gamma = -float(_splitting_margins(Ms, K, C1).max())

    margins = [np.linalg.eigh(M - C1 * K) for M in Ms]
    worst = int(np.argmax([values[-1] for values, _ in margins]))
    witness = margins[worst][1][:, -1]
    if not gamma > 0:
        raise HypothesisValidationError(
            f"No positive contraction rate: best gamma = {gamma:.3e} at C1 = {C1:.3e}",
            witness=witness.tolist(),
            details={"sample": worst, "gamma": gamma, "C1": C1},
        )

    rng = np.random.default_rng(seed)
    slack, n_probes = np.inf, 0
    for M in Ms:
        probes = np.hstack([np.linalg.eigh(M)[1], rng.standard_normal((M.shape[0], n_directions))])
        slack = min(slack, float(splitting_slack(M, K, gamma, C1, probes).min()))
        n_probes += probes.shape[1]
    logger.info("splitting: gamma=%.6g C1=%.6g probe slack %.3e over %d probes", gamma, C1, slack, n_probes)
    return SplittingReport(
        gamma=gamma, C1=C1, worst_direction=assembler.state_from_energy(witness), worst_sample=worst,
        K_spectrum=compact_form_spectrum(mp, grid, p.alpha, assembler.model.quad.M // grid.N).tolist(),
        probe_slack=slack, n_probes=n_probes,
    )


def splitting_slack(M: np.ndarray, K: np.ndarray, gamma: float, C1: float, probes: np.ndarray) -> np.ndarray:
    """(C1 (K z, z) - gamma |z|^2 - (M z, z)) / |z|^2 per probe column"""
    norms = np.sum(probes ** 2, axis=0)
    quad_M = np.einsum("ij,ij->j", probes, M @ probes)
    quad_K = np.einsum("ij,ij->j", probes, K @ probes)
    return (C1 * quad_K - gamma * norms - quad_M) / norms


def trace_d_along(
    states: Sequence[State],
    p: PhysParams,
    mp: MetricParams,
    d_max: int,
    times: Optional[Sequence[float]] = None,
    rates: Optional[Sequence[State]] = None,
    executor: Optional[Executor] = None,
) -> TraceCurves:
    """Tr_d of V(t)^{-1} M(t), d = 1..d_max, at every base state"""
    if not states:
        raise ConfigurationError("trace_d_along needs at least one state")
    assembler = MetricAssembler(states[0].grid, p, mp)
    if not 1 <= d_max <= 2 * assembler.m:
        raise ConfigurationError(f"d_max must lie in [1, {2 * assembler.m}], got {d_max}")
    rates = rates if rates is not None else [None] * len(states)
    times = np.arange(len(states), dtype=float) if times is None else np.asarray(times, dtype=float)

    def traces_at(i: int) -> np.ndarray:
        base = states[i]
        V = assembler.metric_matrix(base)
        try:
            scipy.linalg.cholesky(V, lower=True)
        except np.linalg.LinAlgError:
            raise MetricInvalidError("Metric is not positive definite", lambda_min=_lambda_min(V), time=float(times[i]))
        M = assembler.m_matrix(base, rates[i] if rates[i] is not None else assembler.rate_of(base))
        return np.cumsum(generalized_spectrum(M, V)[:d_max])

    traces = ordered_map(traces_at, range(len(states)), executor)
    return TraceCurves(times, np.vstack(traces), {"d_max": d_max, "params": mp.model_dump()})


def metric_energy_residual(
    base_states: Sequence[State],
    tangent_states: Sequence[State],
    times: Sequence[float],
    p: PhysParams,
    mp: MetricParams,
    rule: str = "simpson",
) -> float:
    """max |d/dt 1/2 |xi_w|^2_{E(t)} - (M xi_w, xi_w)| relative to |xi_w(0)|^2_{E(0)}"""
    assembler = MetricAssembler(base_states[0].grid, p, mp)
    half_norm, rate = [], []
    for base, w in zip(base_states, tangent_states):
        z = assembler.energy_coords(w)
        half_norm.append(0.5 * float(z @ assembler.metric_matrix(base) @ z))
        rate.append(float(z @ assembler.m_matrix(base, assembler.rate_of(base)) @ z))
    scale = max(2.0 * half_norm[0], np.finfo(float).tiny)
    return float(rate_residual(np.asarray(times, dtype=float), np.array(half_norm), np.array(rate), rule).max() / scale)
