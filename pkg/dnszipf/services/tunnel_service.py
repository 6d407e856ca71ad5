import base64
import binascii
import logging
import math
from typing import Callable, Dict, Iterable, List, Tuple

import numpy as np

from ..exceptions import TunnelConfigError
from ..models.dns import MAX_NAME_LENGTH, DomainName
from ..schemas.corpus_schemas import Codec, SimulatedTunnelConfig
from .wire_service import WireService

logger = logging.getLogger(__name__)

MIN_COUNTER_WIDTH = 4


def _b32_encode(data: bytes) -> str:
    return base64.b32encode(data).decode("ascii").rstrip("=").lower()


def _b32_decode(text: str) -> bytes:
    return base64.b32decode(text.upper() + "=" * (-len(text) % 8))


def _b64_encode(data: bytes) -> str:
    return base64.urlsafe_b64encode(data).decode("ascii").rstrip("=")


def _b64_decode(text: str) -> bytes:
    return base64.urlsafe_b64decode(text + "=" * (-len(text) % 4))


CODECS: Dict[Codec, Tuple[Callable[[bytes], str], Callable[[str], bytes], Callable[[int], int]]] = {
    Codec.BASE32: (_b32_encode, _b32_decode, lambda size: math.ceil(size * 8 / 5)),
    Codec.BASE64_DNS: (_b64_encode, _b64_decode, lambda size: math.ceil(size * 4 / 3)),
    Codec.HEX: (bytes.hex, bytes.fromhex, lambda size: size * 2),
}


class TunnelSimulator:
    """
    Generates the query names a DNS tunnel would send for a payload.

    Query layout: <session_tag><counter>.<encoded chunk split into labels>.<apex>
    The counter is zero-padded decimal, at least four digits wide.
    """

    @staticmethod
    def encode_chunk(codec: Codec, data: bytes) -> str:
        return CODECS[codec][0](data)

    @staticmethod
    def decode_chunk(codec: Codec, text: str) -> bytes:
        try:
            return CODECS[codec][1](text)
        except (binascii.Error, ValueError) as e:
            raise TunnelConfigError(f"Cannot decode {codec.value} chunk {text[:16]!r}...: {e}") from e

    @staticmethod
    def chunk_capacity(config: SimulatedTunnelConfig, counter_width: int) -> int:
        """Largest number of payload octets one query can carry"""
        header_label = len(config.session_tag) + counter_width
        budget = MAX_NAME_LENGTH - (config.apex.wire_length - 1) - (header_label + 1) - 1

        # encoded characters plus one length octet per max_label-sized label
        chars = budget * config.max_label // (config.max_label + 1)
        while chars > 0 and chars + math.ceil(chars / config.max_label) > budget:
            chars -= 1

        encoded_length = CODECS[config.codec][2]
        octets = chars
        while octets > 0 and encoded_length(octets) > chars:
            octets -= 1
        return octets

    @staticmethod
    def plan(config: SimulatedTunnelConfig, payload_size: int) -> Tuple[int, int]:
        """(octets per query, counter width) for a payload of the given size"""
        width = MIN_COUNTER_WIDTH
        while True:
            capacity = TunnelSimulator.chunk_capacity(config, width)
            if capacity < 1:
                raise TunnelConfigError(
                    f"Apex {config.apex} leaves no room for payload within {MAX_NAME_LENGTH} octets"
                )
            needed = len(str(max(math.ceil(payload_size / capacity) - 1, 0)))
            if needed <= width:
                return capacity, width
            width = needed

    @staticmethod
    def simulate_tunnel(config: SimulatedTunnelConfig, payload: bytes) -> List[DomainName]:
        if not payload:
            raise TunnelConfigError("Payload is empty")

        capacity, width = TunnelSimulator.plan(config, len(payload))
        queries = []
        for counter, start in enumerate(range(0, len(payload), capacity)):
            encoded = TunnelSimulator.encode_chunk(config.codec, payload[start:start + capacity])
            labels = [f"{config.session_tag}{counter:0{width}d}".encode("ascii")]
            labels.extend(
                encoded[i:i + config.max_label].encode("ascii") for i in range(0, len(encoded), config.max_label)
            )
            queries.append(DomainName(labels=tuple(labels) + config.apex.labels))

        logger.info(
            f"Simulated {len(queries)} {config.codec.value} queries under {config.apex} "
            f"({capacity} octets per query)"
        )
        return queries

    @staticmethod
    def decode_tunnel(queries: Iterable[DomainName], config: SimulatedTunnelConfig) -> bytes:
        """Reassemble the payload from tunnel queries in counter order"""
        apex_size = len(config.apex.labels)
        chunks = {}
        for name in queries:
            if not name.endswith(config.apex) or len(name.labels) < apex_size + 2:
                raise TunnelConfigError(f"Query {name} is not a tunnel query under {config.apex}")

            header = name.labels[0].decode("ascii", errors="replace")
            counter = header[len(config.session_tag):]
            if not header.startswith(config.session_tag) or not counter.isdigit():
                raise TunnelConfigError(f"Query {name} has a malformed header label")
            if int(counter) in chunks:
                raise TunnelConfigError(f"Counter {counter} appears twice")

            encoded = b"".join(name.labels[1:-apex_size]).decode("ascii", errors="replace")
            chunks[int(counter)] = TunnelSimulator.decode_chunk(config.codec, encoded)

        return b"".join(chunks[counter] for counter in sorted(chunks))

    @staticmethod
    def write_queries(config: SimulatedTunnelConfig, queries: List[DomainName], writer) -> None:
        """Encode each query and hand it to a PcapWriter; ids and source ports come from the seed"""
        rng = np.random.default_rng(config.seed)
        ids = rng.integers(0, 0x10000, size=len(queries))
        ports = rng.integers(1024, 0x10000, size=len(queries))
        for name, query_id, port in zip(queries, ids, ports):
            message = WireService.encode_query(name.to_text(), config.qtype, query_id=int(query_id))
            writer.write_query(message, source_port=int(port))
