#!/usr/bin/env python3
"""
Run manifest: config echo, per-stage status and checksummed output inventory
"""

import hashlib
import json
import logging
import time
from contextlib import contextmanager
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterator, List, Literal, Optional, Union

from pydantic import BaseModel, Field

from chodim import __version__
from chodim.core.config import settings
from chodim.core.exceptions import ChodimBaseException, ConfigurationError, InconclusiveError

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


class StageStatus(BaseModel):
    name: str
    status: Literal["ok", "failed", "inconclusive"]
    seconds: float
    error_code: Optional[str] = None


class ArtifactEntry(BaseModel):
    path: str = Field(..., description="Relative to the run directory")
    sha256: str
    bytes: int


class RunManifest(BaseModel):
    schema_version: str = settings.REPORT_SCHEMA_VERSION
    command: str
    app_version: str = __version__
    config: Dict[str, Any]
    started_at: str
    wall_clock_seconds: float = 0.0
    stages: List[StageStatus] = Field(default_factory=list)
    files: List[ArtifactEntry] = Field(default_factory=list)


def sha256_file(path: Union[str, Path]) -> str:
    digest = hashlib.sha256()
    with Path(path).open("rb") as f:
        for block in iter(lambda: f.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


class RunRecorder:
    """Collects stages and output files of one command, then writes manifest.json"""

    def __init__(self, command: str, config: Dict[str, Any], out_dir: Union[str, Path]):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self._t0 = time.perf_counter()
        self.manifest = RunManifest(
            command=command, config=config, started_at=datetime.now(timezone.utc).isoformat(),
        )
        self._paths: List[Path] = []

    @contextmanager
    def stage(self, name: str) -> Iterator[None]:
        t0 = time.perf_counter()
        try:
            yield
        except ChodimBaseException as e:
            status = "inconclusive" if isinstance(e, InconclusiveError) else "failed"
            self._record(name, status, t0, e.error_code)
            raise
        except Exception:
            self._record(name, "failed", t0, "INTERNAL_ERROR")
            raise
        self._record(name, "ok", t0)

    def _record(self, name: str, status: str, t0: float, error_code: Optional[str] = None) -> None:
        seconds = time.perf_counter() - t0
        self.manifest.stages.append(StageStatus(name=name, status=status, seconds=seconds, error_code=error_code))
        logger.info("stage %s: %s in %.2fs", name, status, seconds)

    def add_file(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        if path not in self._paths:
            self._paths.append(path)
        return path

    def finish(self) -> Path:
        """Checksum every recorded file and write the manifest next to them"""
        self.manifest.wall_clock_seconds = time.perf_counter() - self._t0
        self.manifest.files = [
            ArtifactEntry(
                path=path.relative_to(self.out_dir).as_posix(),
                sha256=sha256_file(path),
                bytes=path.stat().st_size,
            )
            for path in self._paths if path.exists()
        ]
        target = self.out_dir / MANIFEST_NAME
        target.write_text(json.dumps(self.manifest.model_dump(), indent=2))
        return target


def read_manifest(out_dir: Union[str, Path]) -> RunManifest:
    path = Path(out_dir) / MANIFEST_NAME
    if not path.exists():
        raise ConfigurationError(f"No manifest in {out_dir}")
    return RunManifest(**json.loads(path.read_text()))


def verify_manifest(out_dir: Union[str, Path]) -> Dict[str, str]:
    """Problems per listed file (missing or checksum mismatch); empty when the run verifies"""
    out_dir = Path(out_dir)
    problems = {}
    for entry in read_manifest(out_dir).files:
        path = out_dir / entry.path
        if not path.exists():
            problems[entry.path] = "missing"
        elif sha256_file(path) != entry.sha256:
            problems[entry.path] = "checksum mismatch"
    if problems:
        logger.warning("manifest verification failed for %d files", len(problems))
    return problems
