#!/usr/bin/env python3
"""
Liouville repository - VolumeTrace and Lyapunov exponent CSV storage
"""

import csv
from pathlib import Path
from typing import Union

import numpy as np

from chodim.core.exceptions import ConfigurationError
from chodim.services.liouville.models import LyapunovResult, VolumeTrace
from chodim.utils.quadrature import running_integral

FIELDNAMES = ["time", "log_volume", "trace_QLQ", "trace_d", "bound_rhs"]


def write_volume_trace_csv(trace: VolumeTrace, path: Union[str, Path]) -> Path:
    """Write one row per grid time; floats use repr so they read back exactly"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    bound = trace.bound_rhs
    with path.open("w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=FIELDNAMES)
        writer.writeheader()
        for i in range(len(trace)):
            writer.writerow({
                "time": repr(float(trace.times[i])),
                "log_volume": repr(float(trace.log_volume[i])),
                "trace_QLQ": repr(float(trace.trace_QLQ[i])),
                "trace_d": repr(float(trace.trace_d[i])),
                "bound_rhs": repr(float(bound[i])),
            })
    return path


def read_volume_trace_csv(path: Union[str, Path], d: int) -> VolumeTrace:
    """Rebuild a VolumeTrace; the running integrals are recomputed from the rows"""
    with Path(path).open(newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != FIELDNAMES:
            raise ConfigurationError(f"Unexpected trace columns {reader.fieldnames}")
        rows = [{k: float(v) for k, v in row.items()} for row in reader]
    times = np.array([r["time"] for r in rows])
    trace_QLQ = np.array([r["trace_QLQ"] for r in rows])
    trace_d = np.array([r["trace_d"] for r in rows])
    return VolumeTrace(
        d=d,
        times=times,
        log_volume=np.array([r["log_volume"] for r in rows]),
        trace_QLQ=trace_QLQ,
        trace_d=trace_d,
        trace_integral=running_integral(times, trace_QLQ),
        trace_d_integral=running_integral(times, trace_d),
    )


def write_lyapunov_csv(result: LyapunovResult, path: Union[str, Path]) -> Path:
    """Columns index, exponent; index starts at 1 for the leading exponent"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["index", "exponent"])
        for i, value in enumerate(result.exponents, start=1):
            writer.writerow([i, repr(float(value))])
    return path


def read_lyapunov_csv(path: Union[str, Path]) -> np.ndarray:
    with Path(path).open(newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != ["index", "exponent"]:
            raise ConfigurationError(f"Unexpected Lyapunov columns {reader.fieldnames}")
        return np.array([float(row["exponent"]) for row in reader])
