#!/usr/bin/env python3
"""
Metric repository - dimension reports as JSON, trace curves as CSV
"""

import csv
import json
from pathlib import Path
from typing import Union

import numpy as np

from chodim.core.exceptions import ConfigurationError
from chodim.services.metric3.models import DimensionReport, TraceCurves


def write_dimension_report(report: DimensionReport, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report.model_dump(), indent=2))
    return path


def read_dimension_report(path: Union[str, Path]) -> DimensionReport:
    data = json.loads(Path(path).read_text())
    if data.get("schema_version") != DimensionReport.model_fields["schema_version"].default:
        raise ConfigurationError(f"Unsupported dimension report schema {data.get('schema_version')}")
    return DimensionReport(**data)


def write_trace_curves_csv(curves: TraceCurves, path: Union[str, Path]) -> Path:
    """Columns time, tr_1 ... tr_dmax"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fieldnames = ["time"] + [f"tr_{d}" for d in range(1, curves.d_max + 1)]
    with path.open("w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(fieldnames)
        for t, row in zip(curves.times, curves.traces):
            writer.writerow([repr(float(t))] + [repr(float(v)) for v in row])
    return path


def read_trace_curves_csv(path: Union[str, Path]) -> TraceCurves:
    with Path(path).open(newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        if not header or header[0] != "time":
            raise ConfigurationError(f"Unexpected trace curve columns {header}")
        rows = np.array([[float(v) for v in row] for row in reader])
    return TraceCurves(rows[:, 0], rows[:, 1:])
