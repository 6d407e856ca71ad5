from .corpus_schemas import (
    Codec,
    CorpusMode,
    DomainListEntry,
    FixtureEntry,
    FixtureManifest,
    PcapStats,
    SimulatedTunnelConfig,
)
from .detector_schemas import DetectorConfig, DetectorThresholds, Evidence, TunnelScore, Verdict

__all__ = [
    "Codec",
    "CorpusMode",
    "DetectorConfig",
    "DetectorThresholds",
    "DomainListEntry",
    "Evidence",
    "FixtureEntry",
    "FixtureManifest",
    "PcapStats",
    "SimulatedTunnelConfig",
    "TunnelScore",
    "Verdict",
]
