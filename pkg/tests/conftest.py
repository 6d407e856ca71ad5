from pathlib import Path

import numpy as np
import pytest

from dnszipf.schemas.corpus_schemas import Codec, CorpusMode, SimulatedTunnelConfig
from dnszipf.schemas.detector_schemas import DetectorConfig
from dnszipf.services.corpus_service import CorpusService
from dnszipf.services.extraction_service import ExtractionService
from dnszipf.services.fingerprint_service import FingerprintService
from dnszipf.services.tunnel_service import TunnelSimulator
from dnszipf.models.fingerprint import NGramCounts

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fingerprint_of(counts: dict, n: int = 1):
    return FingerprintService.build(NGramCounts(n=n, counts=counts))


def random_payload(size: int, seed: int = 0) -> bytes:
    return np.random.default_rng(seed).integers(0, 256, size=size, dtype=np.uint8).tobytes()


def tunnel_texts(codec: Codec, payload_size: int, seed: int = 0, session_tag: str = "") -> list:
    config = SimulatedTunnelConfig(codec=codec, apex="t.example.com", session_tag=session_tag, seed=seed)
    queries = TunnelSimulator.simulate_tunnel(config, random_payload(payload_size, seed))
    return [ExtractionService.subdomain_text(name) for name in queries]


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def subdomain_reference():
    return FingerprintService.load_fingerprint(FIXTURES / "subdomain_unigram.fp")


@pytest.fixture(scope="session")
def published():
    """Loader for the bundled published frequency tables"""

    def load(name: str):
        return FingerprintService.load_fingerprint(FIXTURES / f"published_{name}_unigram.fp")

    return load


@pytest.fixture(scope="session")
def legit_texts():
    texts, _ = CorpusService.load_texts(FIXTURES / "legit_hostnames.txt", CorpusMode.SUBDOMAIN)
    return texts


@pytest.fixture(scope="session")
def domain_texts():
    texts, _ = CorpusService.load_texts(FIXTURES / "popular_domains.txt", CorpusMode.DOMAIN)
    return texts


@pytest.fixture
def detector_config(subdomain_reference):
    return DetectorConfig(reference=subdomain_reference)


@pytest.fixture(scope="session")
def million_random_fingerprint():
    """Unigram fingerprint of one million default-seed random labels"""
    texts = CorpusService.generate_random_domains(1_000_000)
    return FingerprintService.build(FingerprintService.count_ngrams(texts, 1))
