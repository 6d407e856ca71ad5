from .corpus_service import CorpusService
from .extraction_service import DomainContext, ExtractionService
from .fingerprint_service import FingerprintService
from .fixture_service import FixtureService
from .pcap_service import PcapReader, PcapWriter, read_pcap
from .tunnel_service import TunnelSimulator
from .wire_service import WireService

__all__ = [
    "CorpusService",
    "DomainContext",
    "ExtractionService",
    "FingerprintService",
    "FixtureService",
    "PcapReader",
    "PcapWriter",
    "TunnelSimulator",
    "WireService",
    "read_pcap",
]
