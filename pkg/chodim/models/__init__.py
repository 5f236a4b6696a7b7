# Run configuration and manifest models
from chodim.models.run_config import (
    PhysConfig, MetricConfig, IntegrateConfig, LiouvilleConfig, CheckConfig, RunConfig, SEED_LIMIT,
)
from chodim.models.manifest import (
    StageStatus, ArtifactEntry, RunManifest, RunRecorder, MANIFEST_NAME, sha256_file, read_manifest,
    verify_manifest,
)

__all__ = [
    "PhysConfig", "MetricConfig", "IntegrateConfig", "LiouvilleConfig", "CheckConfig", "RunConfig", "SEED_LIMIT",
    "StageStatus", "ArtifactEntry", "RunManifest", "RunRecorder", "MANIFEST_NAME", "sha256_file",
    "read_manifest", "verify_manifest",
]
