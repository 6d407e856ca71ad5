from .base import FrozenModel
from .dns import (
    MAX_LABEL_LENGTH,
    MAX_NAME_LENGTH,
    RDATA_NAME_LAYOUT,
    DnsMessage,
    DomainName,
    Question,
    RecordType,
    ResourceRecord,
)
from .fingerprint import ALPHABET, GRAM_SIZES, DecayMetrics, Fingerprint, NGramCounts, RankedGram

__all__ = [
    "ALPHABET",
    "GRAM_SIZES",
    "MAX_LABEL_LENGTH",
    "MAX_NAME_LENGTH",
    "RDATA_NAME_LAYOUT",
    "DecayMetrics",
    "DnsMessage",
    "DomainName",
    "Fingerprint",
    "FrozenModel",
    "NGramCounts",
    "Question",
    "RankedGram",
    "RecordType",
    "ResourceRecord",
]
