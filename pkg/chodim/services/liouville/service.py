#!/usr/bin/env python3
"""
Liouville service - frame evolution and volume bookkeeping for linear flows

Vectors are advanced by a fixed-step 4-stage scheme (or the flow's own
one-step map). Frames are reorthogonalized every ``reorth_every`` steps with
the pivots folded into an accumulated log-scale, so log-volumes stay finite
in strongly contracting flows.
"""

import logging
import math
from concurrent.futures import Executor
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from chodim.core.dependencies import ordered_map
from chodim.core.exceptions import (
    BlowUpError, ConfigurationError, DegenerateFrameError, HypothesisValidationError,
    MetricInvalidError,
)
from chodim.services.liouville.models import (
    LinearFlow, MetricFamily, VolumeTrace, VolumeBoundCheck, SplittingHypothesis,
    TheoremBound, SandwichPoint, LyapunovResult, as_matrix,
)
from chodim.services.multilinear import (
    DenseOperator, VectorFrame, InnerProduct, TOL_RANK, omega_d, orthogonalize_with_pivots,
    random_orthonormal_frame,
)
from chodim.utils.quadrature import rate_residual, running_integral

logger = logging.getLogger(__name__)

REORTH_EVERY = 10

# (step index, time, frame, accumulated per-column log scale) -> None
GridCallback = Callable[[int, float, np.ndarray, np.ndarray], None]


def _grid(t_end: float, dt: float) -> Tuple[int, float]:
    if dt <= 0:
        raise ConfigurationError(f"Step size must be positive, got {dt}")
    n_steps = max(1, int(math.ceil(t_end / dt - 1e-9)))
    return n_steps, t_end / n_steps


def _rk4_column(stage_mats: Sequence[Tuple[np.ndarray, np.ndarray, np.ndarray]], h: float, v: np.ndarray) -> np.ndarray:
    out = np.empty((len(stage_mats) + 1, v.size))
    out[0] = v
    for k, (L0, Lh, L1) in enumerate(stage_mats):
        k1 = L0 @ v
        k2 = Lh @ (v + 0.5 * h * k1)
        k3 = Lh @ (v + 0.5 * h * k2)
        k4 = L1 @ (v + h * k3)
        v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k + 1] = v
    return out


def _step_column(step, t0: float, h: float, n: int, v: np.ndarray) -> np.ndarray:
    out = np.empty((n + 1, v.size))
    out[0] = v
    for k in range(n):
        v = np.asarray(step(t0 + k * h, h, v[:, None]), dtype=float)[:, 0]
        out[k + 1] = v
    return out


def _integrate(
    flow: LinearFlow,
    phi0: np.ndarray,
    dt: float,
    reorth_every: Optional[int],
    executor: Optional[Executor],
    on_grid: Optional[GridCallback],
    normalize_form: Optional[Callable[[float], InnerProduct]] = None,
) -> Tuple[np.ndarray, np.ndarray, int, float]:
    """Advance the frame over [0, t_end]; columns run independently between barriers

    Returns (final frame, per-column log scale, step count, step size).
    """
    n_steps, h = _grid(flow.t_end, dt)
    phi = np.array(phi0, dtype=float, copy=True)
    log_scale = np.zeros(phi.shape[1])
    segment = n_steps if not reorth_every else reorth_every
    if on_grid is not None:
        on_grid(0, 0.0, phi, log_scale)

    start = 0
    while start < n_steps:
        n = min(segment, n_steps - start)
        t0 = start * h
        if flow.step is not None:
            columns = ordered_map(
                lambda j: _step_column(flow.step, t0, h, n, phi[:, j]), range(phi.shape[1]), executor
            )
        else:
            stage_mats = []
            L_prev = flow.at(t0)
            for k in range(n):
                t = t0 + k * h
                L_next = flow.at(t + h)
                stage_mats.append((L_prev, flow.at(t + 0.5 * h), L_next))
                L_prev = L_next
            columns = ordered_map(lambda j: _rk4_column(stage_mats, h, phi[:, j]), range(phi.shape[1]), executor)
        block = np.stack(columns, axis=2)

        finite = np.all(np.isfinite(block), axis=(1, 2))
        if not finite.all():
            bad = int(np.argmin(finite))
            raise BlowUpError((start + bad) * h, "Frame integration produced non-finite values")

        for k in range(1, n + 1):
            index = start + k
            if on_grid is not None and (k < n or not reorth_every or index == n_steps):
                on_grid(index, index * h, block[k], log_scale)
        phi = block[n]
        start += n

        if reorth_every and start < n_steps:
            form = normalize_form(start * h) if normalize_form else InnerProduct.identity(phi.shape[0])
            vectors, pivots, dependent = orthogonalize_with_pivots(phi, form)
            if dependent.any():
                raise DegenerateFrameError(0.0, TOL_RANK)
            phi = vectors / pivots
            log_scale = log_scale + np.log(pivots)
            if on_grid is not None:
                on_grid(start, start * h, phi, log_scale)
            logger.debug("reorthogonalized at t=%.6g, log scale %.6g", start * h, log_scale.sum())
    return phi, log_scale, n_steps, h


class _TraceRecorder:
    """Collects log-volume and the two traces at every grid point"""

    def __init__(self, d: int, n_steps: int, form_and_m: Callable[[float], Tuple[np.ndarray, np.ndarray]]):
        self.d = d
        self.form_and_m = form_and_m
        self.times = np.zeros(n_steps + 1)
        self.log_volume = np.zeros(n_steps + 1)
        self.trace_QLQ = np.zeros(n_steps + 1)
        self.trace_d = np.zeros(n_steps + 1)

    def __call__(self, index: int, t: float, phi: np.ndarray, log_scale: np.ndarray) -> None:
        V, M = self.form_and_m(t)
        vectors, pivots, dependent = orthogonalize_with_pivots(phi, InnerProduct.from_matrix(V))
        if dependent.any():
            raise DegenerateFrameError(0.0, TOL_RANK)
        E = vectors / pivots
        self.times[index] = t
        self.log_volume[index] = 2.0 * (log_scale.sum() + np.log(pivots).sum())
        self.trace_QLQ[index] = float(np.trace(E.T @ M @ E))
        values = scipy.linalg.eigh(0.5 * (M + M.T), V, eigvals_only=True)
        self.trace_d[index] = float(values[::-1][: self.d].sum())

    def result(self, metadata) -> VolumeTrace:
        return VolumeTrace(
            d=self.d,
            times=self.times,
            log_volume=self.log_volume,
            trace_QLQ=self.trace_QLQ,
            trace_d=self.trace_d,
            trace_integral=running_integral(self.times, self.trace_QLQ),
            trace_d_integral=running_integral(self.times, self.trace_d),
            metadata=metadata,
        )


def _check_frame(flow: LinearFlow, frame0: VectorFrame) -> None:
    if frame0.ambient_dim != flow.dim:
        raise ConfigurationError(f"Frame dimension {frame0.ambient_dim} does not match flow dimension {flow.dim}")


def evolve_frame(
    flow: LinearFlow,
    frame0: VectorFrame,
    dt: float,
    form: Optional[InnerProduct] = None,
    reorth_every: int = REORTH_EVERY,
    executor: Optional[Executor] = None,
) -> Tuple[VectorFrame, VolumeTrace]:
    """Evolve a frame and record log|phi_1 ^ ... ^ phi_d|^2 against Tr(Q L Q) and Tr_d(L)

    The returned frame carries the true (unnormalized) volume.
    """
    _check_frame(flow, frame0)
    form = form or InnerProduct.identity(flow.dim)
    V = form.dense()
    n_steps, _ = _grid(flow.t_end, dt)
    recorder = _TraceRecorder(frame0.d, n_steps, lambda t: (V, V @ flow.at(t)))
    phi, log_scale, n_steps, h = _integrate(
        flow, frame0.vectors, dt, reorth_every, executor, recorder, lambda t: form
    )
    logger.info("evolved %d-frame over %d steps, log-volume %.6g", frame0.d, n_steps, recorder.log_volume[-1])
    frame = VectorFrame(phi * np.exp(log_scale))
    return frame, recorder.result({"dt": h, "reorth_every": reorth_every, "metric": "fixed"})


def metric_m_matrix(flow: LinearFlow, metric: MetricFamily, t: float) -> np.ndarray:
    """M(t) = (V(t) L(t))^sym + 1/2 dV/dt"""
    VL = metric.at(t) @ flow.at(t)
    return 0.5 * (VL + VL.T) + 0.5 * metric.rate(t)


def _checked_form(metric: MetricFamily, t: float) -> np.ndarray:
    V = metric.at(t)
    try:
        scipy.linalg.cholesky(V, lower=True)
    except np.linalg.LinAlgError:
        lam_min = float(np.linalg.eigvalsh(0.5 * (V + V.T)).min())
        raise MetricInvalidError("Metric form is not positive definite", lambda_min=lam_min, time=t)
    return V


def evolve_frame_metric(
    flow: LinearFlow,
    metric: MetricFamily,
    frame0: VectorFrame,
    dt: float,
    reorth_every: int = REORTH_EVERY,
    executor: Optional[Executor] = None,
    m_operator: Optional[Callable[[float], np.ndarray]] = None,
) -> Tuple[VectorFrame, VolumeTrace]:
    """Evolve a frame measuring volumes and traces in the time-dependent form E(t)

    The recorded trace is Tr(Q(t) M_E(t) Q(t)) with M_E = V^{-1} M; ``m_operator``
    replaces the default M(t) = (V L)^sym + 1/2 dV/dt when the caller has it in
    closed form.
    """
    _check_frame(flow, frame0)
    m_at = m_operator or (lambda t: metric_m_matrix(flow, metric, t))
    n_steps, _ = _grid(flow.t_end, dt)
    recorder = _TraceRecorder(frame0.d, n_steps, lambda t: (_checked_form(metric, t), as_matrix(m_at(t))))
    phi, log_scale, n_steps, h = _integrate(
        flow, frame0.vectors, dt, reorth_every, executor, recorder,
        lambda t: InnerProduct.from_matrix(_checked_form(metric, t)),
    )
    logger.info("evolved %d-frame in E(t) over %d steps, log-volume %.6g", frame0.d, n_steps, recorder.log_volume[-1])
    frame = VectorFrame(phi * np.exp(log_scale))
    return frame, recorder.result({"dt": h, "reorth_every": reorth_every, "metric": "time-dependent", "c": metric.c})


def liouville_residual(trace: VolumeTrace, rule: str = "centered") -> float:
    """max over interior points of |1/2 d/dt log_volume - Tr(Q L Q)|

    rule "simpson" compares with the Simpson mean of the trace instead of
    its pointwise value.
    """
    residual = rate_residual(trace.times, 0.5 * trace.log_volume, trace.trace_QLQ, rule)
    return float(residual.max())


def propagator(flow: LinearFlow, dt: float, executor: Optional[Executor] = None) -> DenseOperator:
    """U(T, 0) by integrating the canonical basis"""
    phi, _, _, _ = _integrate(flow, np.eye(flow.dim), dt, None, executor, None)
    return DenseOperator(phi)


def volume_bound_check(
    trace: VolumeTrace,
    flow: LinearFlow,
    dt: float,
    form: Optional[InnerProduct] = None,
    tol: float = 1e-6,
    executor: Optional[Executor] = None,
) -> VolumeBoundCheck:
    """log omega_d(U(T,0)) <= integral of Tr_d(L(s)) ds + tol"""
    form = form or InnerProduct.identity(flow.dim)
    log_omega = math.log(max(omega_d(propagator(flow, dt, executor), trace.d, form), np.finfo(float).tiny))
    integral = float(trace.trace_d_integral[-1])
    slack = integral - log_omega
    if slack < -tol:
        logger.warning("volume bound violated: log omega_%d = %.6g > %.6g", trace.d, log_omega, integral)
    return VolumeBoundCheck(holds=slack >= -tol, slack=slack, log_omega=log_omega, trace_d_integral=integral, d=trace.d)


def tightest_c_k(K: np.ndarray, alpha: float, c: float) -> float:
    """Smallest C_K with Tr_d(K) <= C_K + alpha d / (2 c^2) for every d"""
    mu = np.linalg.eigvalsh(0.5 * (K + K.T))
    return float(np.clip(mu - alpha / (2.0 * c * c), 0.0, None).sum())


def theorem_main_bound(
    flow: LinearFlow,
    metric: MetricFamily,
    splitting: SplittingHypothesis,
    d: int,
    T: float,
    sample_times: Optional[Sequence[float]] = None,
    m_operator: Optional[Callable[[float], np.ndarray]] = None,
    tol: float = 1e-8,
) -> TheoremBound:
    """log omega_d(U(T,0)) <= d ln c + (c C_K - alpha d / (2c)) T

    The splitting (M(t) phi, phi) <= -alpha |phi|^2 + (K phi, phi) is checked
    at the sample times through the top eigenvalue of M(t) + alpha - K.
    """
    if not 1 <= d <= flow.dim:
        raise ConfigurationError(f"d must lie in [1, {flow.dim}], got {d}")
    alpha, c = splitting.alpha, metric.c
    K = as_matrix(splitting.K)
    if np.linalg.eigvalsh(0.5 * (K + K.T)).min() < -1e-10:
        raise ConfigurationError("Compact part K must be positive semidefinite")
    m_at = m_operator or (lambda t: metric_m_matrix(flow, metric, t))
    times = np.linspace(0.0, flow.t_end, 21) if sample_times is None else np.asarray(sample_times, dtype=float)

    worst, witness, witness_time = -np.inf, None, None
    for t in times:
        M = as_matrix(m_at(float(t)))
        residual = 0.5 * (M + M.T) + alpha * np.eye(K.shape[0]) - K
        values, vectors = np.linalg.eigh(residual)
        if values[-1] > worst:
            worst, witness, witness_time = float(values[-1]), vectors[:, -1], float(t)
    if worst > tol:
        raise HypothesisValidationError(
            f"Splitting fails at t={witness_time:.6g}: (M phi, phi) exceeds -alpha|phi|^2 + (K phi, phi) by {worst:.3e}",
            witness=witness.tolist(),
            details={"time": witness_time, "excess": worst},
        )

    C_K = tightest_c_k(K, alpha, c) if splitting.C_K is None else float(splitting.C_K)
    rate = c * C_K - alpha * d / (2.0 * c)
    log_bound = d * math.log(c) + rate * T
    minimal_d = int(math.floor(2.0 * c * c * C_K / alpha)) + 1
    t0 = (-math.log(2.0) - d * math.log(c)) / rate if rate < 0 else None
    return TheoremBound(
        log_bound=log_bound, d=d, T=T, c=c, alpha=alpha, C_K=C_K, rate=rate,
        minimal_d=minimal_d, t0=t0, hypothesis_slack=worst,
    )


def metric_sandwich(P: DenseOperator, metric: MetricFamily, d: int, times: Sequence[float]) -> List[SandwichPoint]:
    """c^{-d} omega_d(P, E) <= omega_d(P, E(t)) <= c^d omega_d(P, E) at each time"""
    base = omega_d(P, d, InnerProduct.identity(P.dim))
    factor = metric.c ** d
    return [
        SandwichPoint(
            time=float(t), lower=base / factor,
            value=omega_d(P, d, InnerProduct.from_matrix(_checked_form(metric, float(t)))),
            upper=base * factor,
        )
        for t in times
    ]


def kaplan_yorke_dimension(exponents: Sequence[float]) -> float:
    """j + (lambda_1 + ... + lambda_j) / |lambda_{j+1}| for the largest j with a nonnegative partial sum"""
    ordered = np.sort(np.asarray(exponents, dtype=float))[::-1]
    if ordered.size == 0 or ordered[0] < 0:
        return 0.0
    partial = np.cumsum(ordered)
    j = int(np.flatnonzero(partial >= 0)[-1]) + 1
    if j == ordered.size:
        return float(j)
    return float(j + partial[j - 1] / abs(ordered[j]))


def lyapunov_spectrum(
    flow: LinearFlow,
    n_exponents: int,
    dt: float,
    reorth_every: int = 1,
    seed: int = 0,
    executor: Optional[Executor] = None,
) -> LyapunovResult:
    """Leading Lyapunov exponents by repeated QR of an evolved frame"""
    if not 1 <= n_exponents <= flow.dim:
        raise ConfigurationError(f"n_exponents must lie in [1, {flow.dim}], got {n_exponents}")
    frame0 = random_orthonormal_frame(flow.dim, n_exponents, np.random.default_rng(seed))
    phi, log_scale, _, _ = _integrate(flow, frame0.vectors, dt, reorth_every, executor, None)
    _, pivots, dependent = orthogonalize_with_pivots(phi, InnerProduct.identity(flow.dim))
    if dependent.any():
        raise DegenerateFrameError(0.0, TOL_RANK)
    exponents = np.sort((log_scale + np.log(pivots)) / flow.t_end)[::-1]
    logger.info("Lyapunov exponents over T=%.6g: %s", flow.t_end, np.array2string(exponents, precision=4))
    return LyapunovResult(
        exponents=exponents.tolist(), kaplan_yorke=kaplan_yorke_dimension(exponents),
        T=flow.t_end, reorth_every=reorth_every,
    )


