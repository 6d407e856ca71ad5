import math
from enum import Enum
from typing import Dict, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..models.fingerprint import DecayMetrics, Fingerprint


class Verdict(str, Enum):
    LEGITIMATE = "legitimate"
    SUSPICIOUS = "suspicious"
    TUNNEL = "tunnel"


class Evidence(str, Enum):
    FULL = "full"
    LOW = "low"
    INSUFFICIENT = "insufficient"


class DetectorThresholds(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_top_gap_flat: float = 0.015
    max_zipf_flat: float = 0.4
    min_rank_corr: float = 0.3

    @field_validator("max_top_gap_flat", "max_zipf_flat", "min_rank_corr")
    @classmethod
    def validate_finite(cls, v):
        if not math.isfinite(v):
            raise ValueError("Thresholds must be finite")
        return v


class DetectorConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    window_size: int = Field(default=100, ge=10)
    reference: Fingerprint
    ns_reference: Optional[Fingerprint] = None
    k_ranks: int = Field(default=14, ge=2)
    exclude_top: int = Field(default=2, ge=0)
    thresholds: DetectorThresholds = Field(default_factory=DetectorThresholds)

    @model_validator(mode="after")
    def validate_ranks(self):
        if self.exclude_top >= self.k_ranks:
            raise ValueError(f"exclude_top ({self.exclude_top}) must be below k_ranks ({self.k_ranks})")
        if self.reference.n != 1:
            raise ValueError("Reference fingerprint must be a unigram fingerprint")
        if self.ns_reference is not None and self.ns_reference.n != 1:
            raise ValueError("NS reference fingerprint must be a unigram fingerprint")
        return self


class TunnelScore(BaseModel):
    """Scores and verdict for one closed window"""

    model_config = ConfigDict(frozen=True)

    window_id: int = Field(ge=1)
    stream: str = "main"
    top_gap_after_exclusion: float
    mean_rank_delta: float
    zipf_exponent: float
    rank_corr_vs_reference: float
    n_texts: int = Field(ge=1)
    n_chars: int = Field(ge=0)
    k_used: int = Field(ge=0)
    exclude_used: int = Field(ge=0)
    evidence: Evidence = Evidence.FULL
    reasons: Tuple[str, ...] = ()
    verdict: Verdict
    ngram_metrics: Dict[int, DecayMetrics] = Field(default_factory=dict)

    @property
    def label(self) -> str:
        return str(self.window_id) if self.stream == "main" else f"{self.stream}:{self.window_id}"

    def __hash__(self):
        return hash((self.stream, self.window_id, self.verdict))
