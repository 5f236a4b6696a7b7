#!/usr/bin/env python3
"""
CHO model repository - state snapshots and trajectory summaries

Snapshot binary layout (little-endian):
    header  magic (8 bytes), n (uint32), N (uint32), ell (float64), time (float64)
    payload u_hat_k then ut_hat_k over the half set, real and imaginary parts interleaved
A JSON sidecar next to the snapshot carries the grid and PhysParams.
"""

import csv
import json
import logging
import struct
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from chodim.core.exceptions import ConfigurationError, DimensionMismatchError
from chodim.services.cho_model.basis import get_basis
from chodim.services.cho_model.models import (
    GridSpec, Nonlinearity, NonlinearitySpec, PhysParams, SpectralField, State,
)
from chodim.services.cho_model.service import Trajectory

logger = logging.getLogger(__name__)

MAGIC = b"CHOSNAP1"
HEADER = struct.Struct("<8sIIdd")
TRAJECTORY_FIELDS = ["time", "energy", "energy_space_norm", "dissipation_integral"]


def sidecar_path(path: Union[str, Path]) -> Path:
    path = Path(path)
    return path.with_suffix(path.suffix + ".json")


def _interleave(basis, coords: np.ndarray) -> np.ndarray:
    c = basis.coefficients(coords)
    return np.column_stack([c.real, c.imag]).ravel()


def _deinterleave(basis, values: np.ndarray) -> np.ndarray:
    pairs = values.reshape(-1, 2)
    return basis.from_coefficients(pairs[:, 0] + 1j * pairs[:, 1])


def params_to_dict(p: PhysParams) -> dict:
    if p.nonlinearity_spec is None:
        raise ConfigurationError(f"Nonlinearity {p.nonlinearity.name} has no serializable spec")
    return {
        "alpha": p.alpha,
        "nonlinearity": p.nonlinearity_spec.model_dump(),
        "g": [float(v) for v in p.g.coords],
    }


def params_from_dict(grid: GridSpec, data: dict) -> PhysParams:
    spec = NonlinearitySpec(**data["nonlinearity"])
    return PhysParams(
        alpha=float(data["alpha"]),
        nonlinearity=Nonlinearity.from_spec(spec),
        g=SpectralField(grid, np.array(data["g"], dtype=float)),
        nonlinearity_spec=spec,
    )


def write_snapshot(state: State, time: float, path: Union[str, Path], p: Optional[PhysParams] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    grid = state.grid
    basis = get_basis(grid, 1)
    payload = np.concatenate([_interleave(basis, state.u.coords), _interleave(basis, state.ut.coords)])
    with path.open("wb") as f:
        f.write(HEADER.pack(MAGIC, grid.n, grid.N, grid.ell, float(time)))
        f.write(payload.astype("<f8").tobytes())
    sidecar = {"grid": grid.model_dump(), "time": float(time)}
    if p is not None:
        sidecar["params"] = params_to_dict(p)
    sidecar_path(path).write_text(json.dumps(sidecar, indent=2))
    logger.debug("wrote snapshot t=%.6g to %s", time, path)
    return path


def read_snapshot(path: Union[str, Path]) -> Tuple[State, float, Optional[PhysParams]]:
    """(state, time, params); params is None when the sidecar carries none"""
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < HEADER.size:
        raise ConfigurationError(f"{path} is too short for a snapshot header")
    magic, n, N, ell, time = HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ConfigurationError(f"{path} is not a snapshot file")

    meta = json.loads(sidecar_path(path).read_text()) if sidecar_path(path).exists() else {}
    grid = GridSpec(**meta["grid"]) if "grid" in meta else GridSpec(n=n, N=N, ell=ell)
    if (grid.n, grid.N) != (n, N) or grid.ell != ell:
        raise DimensionMismatchError(f"Sidecar grid does not match the header of {path}")

    values = np.frombuffer(raw, dtype="<f8", offset=HEADER.size)
    if values.size != 2 * grid.n_coords:
        raise DimensionMismatchError(
            f"Snapshot payload has {values.size} values", expected=2 * grid.n_coords, actual=values.size
        )
    basis = get_basis(grid, 1)
    half = grid.n_coords
    state = State(
        SpectralField(grid, _deinterleave(basis, values[:half])),
        SpectralField(grid, _deinterleave(basis, values[half:])),
    )
    params = params_from_dict(grid, meta["params"]) if "params" in meta else None
    return state, float(time), params


def write_trajectory_csv(trajectory: Trajectory, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=TRAJECTORY_FIELDS)
        writer.writeheader()
        for i in range(len(trajectory.times)):
            writer.writerow({
                "time": repr(float(trajectory.times[i])),
                "energy": repr(float(trajectory.energy[i])),
                "energy_space_norm": repr(float(trajectory.energy_space_norm[i])),
                "dissipation_integral": repr(float(trajectory.dissipation_integral[i])),
            })
    return path


def read_trajectory_csv(path: Union[str, Path]) -> dict:
    """Column name -> array"""
    with Path(path).open(newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != TRAJECTORY_FIELDS:
            raise ConfigurationError(f"Unexpected trajectory columns {reader.fieldnames}")
        rows = list(reader)
    return {name: np.array([float(r[name]) for r in rows]) for name in TRAJECTORY_FIELDS}
