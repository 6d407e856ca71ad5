import logging
from decimal import Decimal
from pathlib import Path
from typing import BinaryIO, Iterator, Optional, Tuple

from scapy.data import DLT_EN10MB, ETH_P_IP, MTU
from scapy.error import Scapy_Exception
from scapy.layers.inet import IP, UDP
from scapy.layers.l2 import Dot1Q, Ether
from scapy.packet import Raw
from scapy.utils import PcapWriter as ScapyPcapWriter
from scapy.utils import RawPcapReader

from ..config import settings
from ..exceptions import PcapFormatError, WireFormatError
from ..models.dns import DnsMessage
from ..schemas.corpus_schemas import PcapStats
from .wire_service import WireService

logger = logging.getLogger(__name__)

CLASSIC_PCAP_MAGICS = (
    b"\xd4\xc3\xb2\xa1",
    b"\xa1\xb2\xc3\xd4",
    b"\x4d\x3c\xb2\xa1",
    b"\xa1\xb2\x3c\x4d",
)
PCAPNG_MAGIC = b"\x0a\x0d\x0d\x0a"

ETH_P_8021Q = 0x8100
IP_PROTO_UDP = 17
DNS_PORT = 53
IPV4_HEADER_MIN = 20
UDP_HEADER_SIZE = 8
ETHERNET_HEADER_SIZE = 14


def is_pcap(path: str | Path) -> bool:
    """True when the file starts with a classic pcap or pcapng magic number"""
    with open(path, "rb") as f:
        magic = f.read(4)
    return magic in CLASSIC_PCAP_MAGICS or magic == PCAPNG_MAGIC


class PcapReader:
    """
    Streams DNS messages out of a classic pcap capture (Ethernet, optional
    802.1Q tag, IPv4, UDP port 53).

    Records that are not DNS or fail to parse are skipped and tallied in
    `stats`; file-level damage raises PcapFormatError.
    """

    def __init__(self, source: str | Path | BinaryIO):
        self.stats = PcapStats()
        self._owns_stream = isinstance(source, (str, Path))
        try:
            self._stream = open(source, "rb") if self._owns_stream else source
        except OSError as e:
            logger.error(f"Error opening capture {source}: {e}")
            raise PcapFormatError(f"Cannot open capture: {e}") from e

        try:
            self._reader = self._open_reader()
        except Exception:
            self.close()
            raise

    def _open_reader(self) -> RawPcapReader:
        magic = self._stream.read(4)
        if magic == PCAPNG_MAGIC:
            raise PcapFormatError("pcapng captures are not supported; convert to classic pcap")
        if magic not in CLASSIC_PCAP_MAGICS:
            raise PcapFormatError(f"Bad pcap magic {magic.hex() or '(empty)'}")
        self._stream.seek(-len(magic), 1)

        try:
            reader = RawPcapReader(self._stream)
        except (Scapy_Exception, EOFError) as e:
            raise PcapFormatError(f"Bad pcap global header: {e}") from e
        if reader.linktype != DLT_EN10MB:
            raise PcapFormatError(f"Unsupported link type {reader.linktype}")
        self._frac_scale = 1_000_000_000 if reader.nano else 1_000_000
        return reader

    def __iter__(self) -> Iterator[Tuple[float, DnsMessage]]:
        for index, (frame, metadata) in enumerate(self._reader):
            if len(frame) < min(metadata.caplen, MTU):
                raise PcapFormatError(f"Truncated data for record {index}")

            self.stats.records += 1
            message = self._decapsulate(frame, index)
            if message is None:
                continue
            self.stats.parsed += 1
            yield metadata.sec + metadata.usec / self._frac_scale, message

        logger.info(
            f"Capture read: {self.stats.records} records, {self.stats.parsed} DNS messages, "
            f"{self.stats.skipped} skipped"
        )

    def _decapsulate(self, frame: bytes, index: int) -> Optional[DnsMessage]:
        if len(frame) < ETHERNET_HEADER_SIZE:
            return self._skip("malformed", index, "short Ethernet frame")
        ether = Ether(frame)

        ethertype = ether.type
        if ethertype == ETH_P_8021Q:
            if Dot1Q not in ether or len(ether[Dot1Q].original) < 4:
                return self._skip("malformed", index, "short VLAN tag")
            ethertype = ether[Dot1Q].type
        if ethertype != ETH_P_IP:
            return self._skip("non_ipv4", index, f"ethertype 0x{ethertype:04x}")

        if IP not in ether or len(ether[IP].original) < IPV4_HEADER_MIN:
            return self._skip("malformed", index, "short IPv4 header")
        ip = ether[IP]
        if ip.version != 4:
            return self._skip("non_ipv4", index, f"IP version {ip.version}")
        header_length = ip.ihl * 4
        if header_length < IPV4_HEADER_MIN or ip.len < header_length or len(ip.original) < header_length:
            return self._skip("malformed", index, "bad IPv4 lengths")
        if ip.flags.MF or ip.frag:
            return self._skip("fragmented", index, "IPv4 fragment")
        if ip.proto != IP_PROTO_UDP:
            return self._skip("non_udp", index, f"IP protocol {ip.proto}")

        if UDP not in ip or len(ip[UDP].original) < UDP_HEADER_SIZE:
            return self._skip("malformed", index, "short UDP header")
        udp = ip[UDP]
        if DNS_PORT not in (udp.sport, udp.dport):
            return self._skip("non_dns", index, f"UDP {udp.sport}->{udp.dport}")

        # The dissected DNS layer is ignored; the wire codec decodes the exact payload bytes
        datagram = udp.original
        end = udp.len if UDP_HEADER_SIZE <= udp.len <= len(datagram) else len(datagram)
        try:
            return WireService.parse_message(datagram[UDP_HEADER_SIZE:end])
        except WireFormatError as e:
            return self._skip("malformed", index, str(e))

    def _skip(self, reason: str, index: int, detail: str) -> None:
        setattr(self.stats, reason, getattr(self.stats, reason) + 1)
        logger.debug(f"Skipping record {index} ({reason}): {detail}")
        return None

    def close(self):
        if self._owns_stream:
            self._stream.close()

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        self.close()


def read_pcap(source: str | Path | BinaryIO) -> Iterator[Tuple[float, DnsMessage]]:
    with PcapReader(source) as reader:
        yield from reader


class PcapWriter:
    """
    Writes DNS payloads as classic microsecond pcap records over
    Ethernet II / IPv4 / UDP. Timestamps advance by a fixed step from a
    fixed epoch so output depends only on what is written.
    """

    EPOCH = 1262304000
    STEP_USEC = 10_000
    CLIENT_MAC = "02:00:00:00:00:02"
    RESOLVER_MAC = "02:00:00:00:00:35"

    def __init__(
        self,
        destination: str | Path | BinaryIO,
        client: str = "10.0.0.2",
        resolver: str = "10.0.0.53",
        snaplen: int | None = None,
    ):
        self._owns_stream = isinstance(destination, (str, Path))
        target = str(destination) if self._owns_stream else destination
        self._client = client
        self._resolver = resolver
        self._writer = ScapyPcapWriter(
            target,
            linktype=DLT_EN10MB,
            endianness="<",
            snaplen=snaplen or settings.PCAP_SNAPLEN,
        )
        # header goes out even when no record follows
        self._writer.write_header(None)
        self.count = 0

    def write_query(self, payload: bytes, source_port: int = 41000) -> None:
        frame = (
            Ether(src=self.CLIENT_MAC, dst=self.RESOLVER_MAC)
            / IP(src=self._client, dst=self._resolver, id=self.count & 0xFFFF, flags="DF", ttl=64)
            / UDP(sport=source_port, dport=DNS_PORT)
            / Raw(load=payload)
        )
        self._write_record(frame)

    def write_response(self, payload: bytes, destination_port: int = 41000) -> None:
        frame = (
            Ether(src=self.RESOLVER_MAC, dst=self.CLIENT_MAC)
            / IP(src=self._resolver, dst=self._client, id=self.count & 0xFFFF, flags="DF", ttl=64)
            / UDP(sport=DNS_PORT, dport=destination_port)
            / Raw(load=payload)
        )
        self._write_record(frame)

    def _write_record(self, frame) -> None:
        frame.time = self.EPOCH + Decimal(self.count * self.STEP_USEC) / 1_000_000
        self._writer.write(frame)
        self.count += 1

    def close(self):
        if self._owns_stream:
            self._writer.close()
        else:
            self._writer.flush()

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        self.close()
