#!/usr/bin/env python3
"""
Subcommand handlers: simulate, check, dimension, lyapunov, selftest

Every handler writes its artifacts plus manifest.json into the run directory
and returns the manifest path. Failures propagate as chodim exceptions after
the partial manifest is written; main maps them to exit codes.
"""

import json
import logging
import math
from concurrent.futures import Executor
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from chodim.core.config import settings
from chodim.core.dependencies import get_serial_executor
from chodim.core.exceptions import BoundViolationError, InconclusiveError, ResidualCheckError
from chodim.models.manifest import RunRecorder
from chodim.models.run_config import RunConfig
from chodim.services.cho_model import (
    ChoModel, ForcingMode, ForcingSpec, GridSpec, NonlinearitySpec, PhysParams, State, Stepper,
    attractor_sample, build_phys_params, random_smooth_state, simulate, tangent_energy_residual,
    tangent_linear_flow, write_snapshot, write_trajectory_csv,
)
from chodim.services.liouville import (
    LinearFlow, evolve_frame, liouville_residual, lyapunov_spectrum, write_lyapunov_csv,
)
from chodim.services.metric3 import (
    MetricParams, dimension_pipeline, equivalence_constants, metric_energy_residual, trace_d_along,
    write_dimension_report, write_trace_curves_csv,
)
from chodim.services.multilinear import (
    DenseOperator, InnerProduct, VectorFrame, omega_d, projected_trace, random_orthonormal_frame,
    sampled_omega_d, trace_form,
)

logger = logging.getLogger(__name__)

CHECK_SUITES = ("energy", "tangent", "liouville", "metric-identity")
# relative drift of the exponents between the 2/3 T and T runs
LYAPUNOV_DRIFT_TOL = 0.01
LYAPUNOV_CONSISTENCY_TOL = 1e-4
# linear family: max |lambda_i - Re eig_i| allowed before the run is marked unconverged
LYAPUNOV_ANALYTIC_TOL = 1e-6
# base states kept for trace curves along the Lyapunov trajectory
LYAPUNOV_TRACE_POINTS = 200


def output_dir(config: RunConfig) -> Path:
    return Path(config.output_dir or settings.OUTPUT_DIR)


def _write_json(path: Path, payload: Dict[str, Any]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2))
    return path


def _tangent_run(model: ChoModel, state0: State, dt: float, T: float, seed: int):
    """Base trajectory and a tangent trajectory from a seeded unit direction"""
    traj = simulate(state0, model.p, dt, T)
    stepper = Stepper(model, dt)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(2 * model.grid.n_coords)
    W = model.from_energy_coords(z / np.linalg.norm(z))[:, None]
    wstates = [State.from_vector(model.grid, W[:, 0])]
    for base in traj.states[:-1]:
        W = stepper.tangent_step(base.to_vector(), W)
        wstates.append(State.from_vector(model.grid, W[:, 0]))
    return traj, wstates


# Residual suites
def energy_suite(grid: GridSpec, p: PhysParams, seed: int, dt: float, T: float, amplitude: float) -> Dict[str, Any]:
    traj = simulate(random_smooth_state(grid, seed, amplitude), p, dt, T)
    return {"residual": traj.energy_residual(), "energy_start": float(traj.energy[0]), "energy_end": float(traj.energy[-1])}


def tangent_suite(grid: GridSpec, p: PhysParams, seed: int, dt: float, T: float, amplitude: float) -> Dict[str, Any]:
    model = ChoModel(grid, p)
    traj, wstates = _tangent_run(model, random_smooth_state(grid, seed, amplitude), dt, T, seed + 1)
    residual = tangent_energy_residual(model, traj.states, wstates, traj.state_times)
    return {"residual": residual, "steps": len(traj.states) - 1}


def liouville_suite(seed: int, dt: float, T: float, dim: int = 6, d: int = 3) -> Dict[str, Any]:
    """Random smooth time-dependent flow of small dimension"""
    rng = np.random.default_rng(seed)
    A = 0.5 * rng.standard_normal((dim, dim)) / math.sqrt(dim)
    B = 0.5 * rng.standard_normal((dim, dim)) / math.sqrt(dim)
    flow = LinearFlow(lambda t: A + math.sin(2.0 * math.pi * t / T) * B, T, dim)
    frame0 = random_orthonormal_frame(dim, d, rng)
    _, trace = evolve_frame(flow, frame0, dt, executor=get_serial_executor())
    return {"residual": liouville_residual(trace), "dim": dim, "d": d}


def metric_identity_suite(
    grid: GridSpec, p: PhysParams, mp: MetricParams, seed: int, dt: float, T: float, amplitude: float,
) -> Dict[str, Any]:
    model = ChoModel(grid, p)
    traj, wstates = _tangent_run(model, random_smooth_state(grid, seed, amplitude), dt, T, seed + 1)
    residual = metric_energy_residual(traj.states, wstates, traj.state_times, p, mp)
    return {"residual": residual, "metric": mp.model_dump()}


def _run_suite(which: str, config: RunConfig) -> Dict[str, Any]:
    grid, integ, T = config.grid, config.integrate, config.checks.T
    if which == "liouville":
        return liouville_suite(config.seed, integ.dt, T)
    p = config.phys.build(grid)
    if which == "energy":
        return energy_suite(grid, p, config.seed, integ.dt, T, integ.amplitude)
    if which == "tangent":
        return tangent_suite(grid, p, config.seed, integ.dt, T, integ.amplitude)
    start = random_smooth_state(grid, config.seed, integ.amplitude)
    mp = config.metric.resolve([start], p, grid)
    return metric_identity_suite(grid, p, mp, config.seed, integ.dt, T, integ.amplitude)


def _threshold(config: RunConfig, which: str) -> float:
    return getattr(config.checks, which.replace("-", "_"))


# Commands
def cmd_simulate(config: RunConfig, executor: Optional[Executor] = None) -> Path:
    """Seeded trajectory over t_transient + t_sample: snapshots plus the energy CSV"""
    out = output_dir(config)
    recorder = RunRecorder("simulate", config.model_dump(), out)
    integ = config.integrate
    try:
        with recorder.stage("simulate"):
            p = config.phys.build(config.grid)
            state0 = random_smooth_state(config.grid, config.seed, integ.amplitude)
            record_every = max(1, int(round(integ.snapshot_every / integ.dt)))
            traj = simulate(state0, p, integ.dt, integ.t_transient + integ.t_sample, record_every)
        with recorder.stage("write"):
            recorder.add_file(write_trajectory_csv(traj, out / "trajectory.csv"))
            for i, (state, t) in enumerate(zip(traj.states, traj.state_times)):
                path = write_snapshot(state, float(t), out / "snapshots" / f"snap_{i:04d}.bin", p)
                recorder.add_file(path)
                recorder.add_file(path.with_suffix(path.suffix + ".json"))
        logger.info("final energy-space norm %.6g", traj.energy_space_norm[-1])
    finally:
        manifest = recorder.finish()
    return manifest


def cmd_check(config: RunConfig, which: str, executor: Optional[Executor] = None) -> Path:
    """Run one residual suite and write check_<which>.json; raises ResidualCheckError on failure"""
    if which not in CHECK_SUITES:
        raise ValueError(f"Unknown check suite '{which}'")
    out = output_dir(config)
    recorder = RunRecorder(f"check {which}", config.model_dump(), out)
    threshold = _threshold(config, which)
    try:
        with recorder.stage(which):
            result = _run_suite(which, config)
            passed = bool(result["residual"] < threshold)
            report = {
                "schema_version": settings.REPORT_SCHEMA_VERSION,
                "suite": which, "passed": passed, "residual": float(result["residual"]),
                "threshold": threshold, "details": {k: v for k, v in result.items() if k != "residual"},
            }
            recorder.add_file(_write_json(out / f"check_{which}.json", report))
            logger.info("check %s: residual %.3e (threshold %.1e)", which, result["residual"], threshold)
            if not passed:
                raise ResidualCheckError(which, float(result["residual"]), threshold)
    finally:
        manifest = recorder.finish()
    return manifest


def cmd_dimension(config: RunConfig, executor: Optional[Executor] = None) -> Path:
    """Full dimension pipeline; raises InconclusiveError after writing the inconclusive report"""
    out = output_dir(config)
    recorder = RunRecorder("dimension", config.model_dump(), out)
    try:
        with recorder.stage("dimension"):
            p = config.phys.build(config.grid)
            report, curves = dimension_pipeline(p, config.grid, None, config, executor)
            recorder.add_file(write_dimension_report(report, out / "dimension_report.json"))
            recorder.add_file(write_trace_curves_csv(curves, out / "trace_curves.csv"))
            if report.failed_checks:
                raise BoundViolationError(report.failed_checks, report)
            if report.inconclusive:
                raise InconclusiveError("No contracting dimension found within the configured limits", report)
    finally:
        manifest = recorder.finish()
    return manifest


def _lyapunov_consistency(
    model: ChoModel, config: RunConfig, states: List[State], exponents: np.ndarray, T: float,
) -> List[Dict[str, Any]]:
    """Sum of the top-d exponents against the time-averaged Tr_d plus d ln c / T"""
    p, grid, dt = model.p, model.grid, config.integrate.dt
    stride = max(1, (len(states) - 1) // LYAPUNOV_TRACE_POINTS)
    indices = list(range(0, len(states), stride))
    picked = [states[i] for i in indices]
    mp = config.metric.resolve(picked, p, grid)
    d_max = min(len(exponents), config.liouville.d_max)
    curves = trace_d_along(picked, p, mp, d_max, dt * np.array(indices, dtype=float))
    averaged = curves.averaged()
    c = equivalence_constants(picked, p, mp)
    rows = []
    for d in range(1, d_max + 1):
        lhs = float(np.sum(exponents[:d]))
        rhs = float(averaged[d - 1] + d * math.log(c) / T)
        rows.append({"d": d, "lyapunov_sum": lhs, "trace_bound": rhs, "holds": lhs <= rhs + LYAPUNOV_CONSISTENCY_TOL})
    return rows


def cmd_lyapunov(config: RunConfig, executor: Optional[Executor] = None) -> Path:
    """Lyapunov spectrum along an attractor trajectory with Kaplan-Yorke dimension and drift flag"""
    out = output_dir(config)
    recorder = RunRecorder("lyapunov", config.model_dump(), out)
    integ, liou = config.integrate, config.liouville
    try:
        with recorder.stage("sample"):
            p = config.phys.build(config.grid)
            model = ChoModel(config.grid, p)
            start = attractor_sample(
                p, config.grid, integ.t_transient, integ.t_sample, 1, config.seed, integ.dt, integ.amplitude
            ).states[0]
            states = simulate(start, p, integ.dt, liou.lyapunov_T).states
        with recorder.stage("spectrum"):
            basis = liou.lyapunov_basis
            flow = tangent_linear_flow(model, states, integ.dt, basis)
            result = lyapunov_spectrum(flow, config.n_exponents, integ.dt, liou.reorth_every, config.seed, executor)
            n_early = max(2, int(round(2 * (len(states) - 1) / 3)))
            early_flow = tangent_linear_flow(model, states[: n_early + 1], integ.dt, basis)
            early = lyapunov_spectrum(early_flow, config.n_exponents, integ.dt, liou.reorth_every, config.seed, executor)
            final = np.array(result.exponents)
            scale = max(float(np.abs(final).max()), np.finfo(float).tiny)
            drift = float(np.abs(final - np.array(early.exponents)).max() / scale)
            converged = drift <= LYAPUNOV_DRIFT_TOL
            if not converged:
                logger.warning("Lyapunov exponents drift %.3g over the final third of the run", drift)
            analytic = analytic_error = None
            if p.nonlinearity.name == "linear":
                # autonomous tangent flow: exponents are the real parts of the block eigenvalues
                analytic = model.linear_exponents()[: len(final)]
                analytic_error = float(np.abs(final - analytic).max())
                if analytic_error > LYAPUNOV_ANALYTIC_TOL:
                    logger.warning("Lyapunov exponents miss the linear spectrum by %.3g", analytic_error)
                    converged = False
        with recorder.stage("consistency"):
            consistency = _lyapunov_consistency(model, config, states, final, result.T)
        with recorder.stage("write"):
            recorder.add_file(write_lyapunov_csv(result, out / "lyapunov.csv"))
            recorder.add_file(_write_json(out / "lyapunov.json", {
                "schema_version": settings.REPORT_SCHEMA_VERSION,
                **result.model_dump(),
                "basis": basis, "drift": drift, "converged": converged,
                "analytic_exponents": None if analytic is None else analytic.tolist(),
                "analytic_error": analytic_error, "consistency": consistency,
            }))
    finally:
        manifest = recorder.finish()
    return manifest


# Self-test on tiny sizes
def _exterior_suite(seed: int) -> Dict[str, Any]:
    rng = np.random.default_rng(seed)
    L = DenseOperator(rng.standard_normal((6, 6)))
    form = InnerProduct.identity(6)
    exact = float(np.prod(np.linalg.svd(L.entries, compute_uv=False)[:3]))
    value = omega_d(L, 3, form)
    sampled = sampled_omega_d(L, 3, form, rng, n_samples=500)
    overshoot = max(0.0, sampled / value - 1.0)
    return {"residual": max(abs(value - exact) / exact, overshoot), "omega_3": value, "sampled": sampled}


def _trace_suite(seed: int) -> Dict[str, Any]:
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((6, 6))
    form = InnerProduct.from_matrix(A @ A.T + 6.0 * np.eye(6))
    L = DenseOperator(rng.standard_normal((6, 6)))
    frame = VectorFrame(rng.standard_normal((6, 3)))
    a, b = trace_form(L, frame, form), projected_trace(L, frame, form)
    return {"residual": abs(a - b) / max(1.0, abs(b)), "trace_form": a, "projected_trace": b}


def cmd_selftest(config: RunConfig, executor: Optional[Executor] = None) -> Path:
    """Quick versions of every residual suite on tiny sizes"""
    out = output_dir(config)
    recorder = RunRecorder("selftest", config.model_dump(), out)
    seed = config.seed
    grid = GridSpec(n=1, N=16, ell=2.0)
    forcing = ForcingSpec(modes=[ForcingMode(k=[1], amplitude=0.5)])
    p = build_phys_params(grid, 0.5, NonlinearitySpec(family="cubic"), forcing)
    mp = MetricParams(delta=MetricParams.default_delta(p.alpha), Lweight=1.0)
    suites: Dict[str, Callable[[], Dict[str, Any]]] = {
        "exterior-algebra": lambda: _exterior_suite(seed),
        "trace-identity": lambda: _trace_suite(seed),
        "liouville": lambda: liouville_suite(seed, 1e-3, 0.5),
        "energy": lambda: energy_suite(grid, p, seed, 1e-3, 0.2, 0.5),
        "metric-identity": lambda: metric_identity_suite(grid, p, mp, seed, 1e-3, 0.2, 0.5),
    }
    thresholds = {
        "exterior-algebra": 1e-10, "trace-identity": 1e-10, "liouville": 1e-5,
        "energy": 1e-5, "metric-identity": 1e-4,
    }
    results = {}
    try:
        for name, run in suites.items():
            with recorder.stage(name):
                result = run()
                results[name] = {
                    "residual": float(result["residual"]), "threshold": thresholds[name],
                    "passed": bool(result["residual"] < thresholds[name]),
                }
        recorder.add_file(_write_json(out / "selftest.json", {
            "schema_version": settings.REPORT_SCHEMA_VERSION, "suites": results,
            "passed": all(r["passed"] for r in results.values()),
        }))
        failed = [name for name, r in results.items() if not r["passed"]]
        if failed:
            first = results[failed[0]]
            raise ResidualCheckError(failed[0], first["residual"], first["threshold"])
    finally:
        manifest = recorder.finish()
    return manifest
