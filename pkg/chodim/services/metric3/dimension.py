#!/usr/bin/env python3
"""
Dimension pipeline - from attractor samples to a volume-contracting dimension

    sample the attractor -> tune the metric -> split M into negative plus compact
    -> Tr_d curves along base trajectories -> smallest d with negative worst-sample
    average -> T with measured omega_d <= 1/2 -> cross-checks
"""

import logging
import math
from concurrent.futures import Executor
from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING, List, Optional, Tuple

import numpy as np

from chodim.core.dependencies import ordered_map
from chodim.core.exceptions import BoundViolationError, HypothesisValidationError, InconclusiveError
from chodim.services.cho_model import (
    ChoModel, GridSpec, PhysParams, State, attractor_sample, simulate, tangent_linear_flow, tangent_propagator,
)
from chodim.services.liouville import (
    MetricFamily, SplittingHypothesis, evolve_frame_metric, liouville_residual, metric_sandwich,
    theorem_main_bound,
)
from chodim.services.metric3.models import DimensionReport, MetricParams, TraceCurves
from chodim.services.metric3.service import (
    MetricAssembler, equivalence_constants, splitting_estimate, trace_d_along,
)
from chodim.services.multilinear import DenseOperator, InnerProduct, omega_d, random_orthonormal_frame

if TYPE_CHECKING:
    from chodim.models.run_config import RunConfig

logger = logging.getLogger(__name__)

# T_contract segments appended before giving up on omega_d <= 1/2
MAX_EXTENSIONS = 4
# slack allowed on log omega_d against the trace and theorem bounds
BOUND_TOL = 1e-6


@dataclass
class BaseRun:
    """One sample's base trajectory with its rates, traces and tangent propagator"""

    states: List[State]
    rates: List[State]
    curves: TraceCurves
    propagator: np.ndarray


def _segment(model: ChoModel, assembler: MetricAssembler, start: State, t0: float, dt: float, T: float, d_max: int):
    traj = simulate(start, model.p, dt, T)
    states = traj.states
    rates = [model.rhs(s) for s in states]
    curves = trace_d_along(states, model.p, assembler.mp, d_max, t0 + traj.times, rates)
    return states, rates, curves, tangent_propagator(model, states, dt)


def _extend(run: BaseRun, states, rates, curves: TraceCurves, P: np.ndarray) -> BaseRun:
    return BaseRun(
        states=run.states + states[1:],
        rates=run.rates + rates[1:],
        curves=TraceCurves(
            np.concatenate([run.curves.times, curves.times[1:]]),
            np.vstack([run.curves.traces, curves.traces[1:]]),
            run.curves.metadata,
        ),
        propagator=P @ run.propagator,
    )


def _log_omega(P: np.ndarray, d: int) -> float:
    value = omega_d(DenseOperator(P), d, InnerProduct.identity(P.shape[0]))
    return math.log(value) if value > 0 else -math.inf


def _metric_along(assembler: MetricAssembler, run: BaseRun, dt: float, c: float) -> MetricFamily:
    last = len(run.states) - 1

    @lru_cache(maxsize=None)
    def form(i: int) -> np.ndarray:
        return assembler.metric_matrix(run.states[i])

    def index(t: float) -> int:
        return min(max(int(round(t / dt)), 0), last)

    return MetricFamily(
        form_at=lambda t: form(index(t)),
        c=c,
        form_rate=lambda t: assembler.metric_rate_matrix(run.states[index(t)], run.rates[index(t)]),
    )


def dimension_pipeline(
    p: PhysParams,
    grid: GridSpec,
    mp: Optional[MetricParams],
    run: "RunConfig",
    executor: Optional[Executor] = None,
) -> Tuple[DimensionReport, TraceCurves]:
    """Dimension report plus the Tr_d curves of the worst base trajectory

    An inconclusive outcome comes back with ``inconclusive`` set instead of
    being raised. Raises HypothesisValidationError when no splitting holds.
    """
    integ, liou = run.integrate, run.liouville
    dt = integ.dt
    sample = attractor_sample(
        p, grid, integ.t_transient, integ.t_sample, integ.n_samples, run.seed, dt, integ.amplitude
    )
    samples = sample.states
    if mp is None:
        mp = run.metric.resolve(samples, p, grid)
    logger.info("dimension pipeline: %d samples, metric %s", len(samples), mp.model_dump())

    splitting = splitting_estimate(samples, p, mp, seed=run.seed)
    c = equivalence_constants(samples, p, mp)
    model = ChoModel(grid, p)
    assembler = MetricAssembler(grid, p, mp)

    def first_segment(s: State) -> BaseRun:
        return BaseRun(*_segment(model, assembler, s, 0.0, dt, liou.T_contract, liou.d_max))

    runs: List[BaseRun] = ordered_map(first_segment, samples, executor)
    averaged = np.vstack([r.curves.averaged() for r in runs])
    worst = averaged.max(axis=0)
    curves = {"worst_averaged": worst.tolist()}
    curves.update({f"sample_{i}": row.tolist() for i, row in enumerate(averaged)})
    params = {"metric": mp.model_dump(), "alpha": p.alpha, "nonlinearity": p.nonlinearity.name, "grid": grid.model_dump()}

    negative = np.flatnonzero(worst < 0)
    if negative.size == 0:
        report = DimensionReport(
            params=params, c=c, gamma=splitting.gamma, C1=splitting.C1, trace_curves=curves,
            chosen_d=None, T=None, omega_d_measured=None, inconclusive=True,
        )
        logger.warning("no d <= %d has a negative worst-sample averaged trace", liou.d_max)
        return report, runs[int(np.argmax(averaged[:, -1]))].curves
    d = int(negative[0]) + 1
    logger.info("chosen d = %d (worst averaged Tr_d = %.6g)", d, worst[d - 1])

    T = liou.T_contract
    log_omegas = [_log_omega(r.propagator, d) for r in runs]
    for _ in range(MAX_EXTENSIONS):
        if max(log_omegas) <= -math.log(2.0):
            break
        t0 = T

        def extend(r: BaseRun) -> BaseRun:
            return _extend(r, *_segment(model, assembler, r.states[-1], t0, dt, liou.T_contract, liou.d_max))

        runs = ordered_map(extend, runs, executor)
        T += liou.T_contract
        log_omegas = [_log_omega(r.propagator, d) for r in runs]
        logger.info("extended to T=%.4g, worst log omega_%d = %.6g", T, d, max(log_omegas))

    worst_run = int(np.argmax(log_omegas))
    base_run = runs[worst_run]
    c_run = max(c, equivalence_constants([base_run.states[0], base_run.states[-1]], p, mp))
    bound_rhs = d * math.log(c_run) + float(base_run.curves.integrals()[d - 1])
    log_omega = log_omegas[worst_run]
    omega_measured = math.exp(log_omega)
    bound_holds = log_omega <= bound_rhs + BOUND_TOL
    if not bound_holds:
        logger.warning("measured log omega_%d = %.6g exceeds the trace bound %.6g", d, log_omega, bound_rhs)

    flow = tangent_linear_flow(model, base_run.states, dt)
    metric = _metric_along(assembler, base_run, dt, c_run)
    last = len(base_run.states) - 1

    def m_operator(t: float) -> np.ndarray:
        i = min(int(round(t / dt)), last)
        return assembler.m_matrix(base_run.states[i], base_run.rates[i])

    theorem_log_bound = theorem_holds = None
    try:
        hypothesis = SplittingHypothesis(alpha=splitting.gamma, K=splitting.C1 * assembler.compact_matrix())
        theorem_log_bound = theorem_main_bound(flow, metric, hypothesis, d, T, m_operator=m_operator).log_bound
        theorem_hypothesis_holds = True
        theorem_holds = log_omega <= theorem_log_bound + BOUND_TOL
        if not theorem_holds:
            logger.warning("measured log omega_%d = %.6g exceeds the theorem bound %.6g", d, log_omega, theorem_log_bound)
    except HypothesisValidationError as e:
        theorem_hypothesis_holds = False
        logger.warning("splitting does not hold along the base trajectory: %s", e.message)

    frame0 = random_orthonormal_frame(flow.dim, d, np.random.default_rng(run.seed))
    _, trace = evolve_frame_metric(flow, metric, frame0, dt, liou.reorth_every, executor, m_operator)
    metric_residual = liouville_residual(trace, "simpson") / max(1.0, float(np.abs(trace.trace_QLQ).max()))

    sandwich = metric_sandwich(DenseOperator(base_run.propagator), metric, d, [0.0, T])
    sandwich_holds = all(pt.lower <= pt.value * (1 + 1e-9) and pt.value <= pt.upper * (1 + 1e-9) for pt in sandwich)

    checks = {"trace_bound": bound_holds, "theorem_bound": theorem_holds, "metric_sandwich": sandwich_holds}
    failed = [name for name, holds in checks.items() if holds is False]
    contracted = log_omega <= -math.log(2.0)
    report = DimensionReport(
        params=params, c=c_run, gamma=splitting.gamma, C1=splitting.C1, trace_curves=curves,
        chosen_d=d, T=T, omega_d_measured=omega_measured, bound_formula_rhs=bound_rhs, bound_holds=bound_holds,
        theorem_log_bound=theorem_log_bound, theorem_hypothesis_holds=theorem_hypothesis_holds,
        theorem_holds=theorem_holds, sandwich_holds=sandwich_holds, failed_checks=failed,
        metric_liouville_residual=metric_residual, inconclusive=not contracted,
    )
    if failed:
        logger.error("dimension report fails %s", ", ".join(failed))
    if contracted:
        logger.info("dimension bound d=%d at T=%.4g, omega_d=%.4g", d, T, omega_measured)
    else:
        logger.warning("omega_%d = %.4g stays above 1/2 up to T=%.4g", d, omega_measured, T)
    return report, base_run.curves


def dimension_bound(
    p: PhysParams,
    grid: GridSpec,
    mp: Optional[MetricParams],
    run: "RunConfig",
    executor: Optional[Executor] = None,
) -> DimensionReport:
    """Smallest d whose volumes contract uniformly over the sampled attractor

    Raises HypothesisValidationError when no splitting validates,
    BoundViolationError when the measured volume breaks a bound it must obey
    and InconclusiveError (carrying the report) when no d <= d_max contracts.
    """
    report, _ = dimension_pipeline(p, grid, mp, run, executor)
    if report.failed_checks:
        raise BoundViolationError(report.failed_checks, report)
    if report.inconclusive:
        if report.chosen_d is None:
            raise InconclusiveError(f"No d <= {run.liouville.d_max} has a negative worst-sample averaged trace", report)
        raise InconclusiveError(f"omega_{report.chosen_d} stays above 1/2 up to T={report.T:g}", report)
    return report
