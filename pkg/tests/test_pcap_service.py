import io
import struct

import pytest
import scapy.all as scapy_all

from dnszipf.exceptions import PcapFormatError
from dnszipf.models.dns import DomainName
from dnszipf.services.pcap_service import PcapReader, PcapWriter, read_pcap
from dnszipf.services.wire_service import WireService

from .conftest import FIXTURES

CLIENT_MAC = "02:00:00:00:00:01"
RESOLVER_MAC = "02:00:00:00:00:02"


def written_capture(*names) -> bytes:
    buffer = io.BytesIO()
    with PcapWriter(buffer) as writer:
        for name in names:
            writer.write_query(WireService.encode_query(name, 1))
    return buffer.getvalue()


@pytest.fixture
def scapy():
    return scapy_all


def dns_query(scapy, qname, **udp):
    return (
        scapy.Ether(src=CLIENT_MAC, dst=RESOLVER_MAC)
        / scapy.IP(src="192.0.2.10", dst="192.0.2.53")
        / scapy.UDP(sport=udp.get("sport", 33333), dport=udp.get("dport", 53))
        / scapy.DNS(id=77, rd=1, qd=scapy.DNSQR(qname=qname, qtype="A"))
    )


class TestReadPcap:
    def test_single_query_from_independent_writer(self, scapy, tmp_path):
        path = tmp_path / "one.pcap"
        scapy.wrpcap(str(path), [dns_query(scapy, "x.example.com")])

        messages = list(read_pcap(path))
        assert len(messages) == 1
        _, message = messages[0]
        assert message.id == 77
        assert message.questions[0].name == DomainName.from_text("x.example.com")

    def test_skips_are_counted(self, scapy, tmp_path):
        ether = scapy.Ether(src=CLIENT_MAC, dst=RESOLVER_MAC)
        packets = [
            dns_query(scapy, "a.example.com"),
            ether / scapy.ARP(psrc="192.0.2.10", pdst="192.0.2.53"),
            ether / scapy.IPv6(src="2001:db8::1", dst="2001:db8::53") / scapy.UDP(sport=1000, dport=53),
            ether / scapy.IP(src="192.0.2.10", dst="192.0.2.53") / scapy.TCP(sport=1000, dport=53),
            ether / scapy.IP(src="192.0.2.10", dst="192.0.2.123") / scapy.UDP(sport=123, dport=123) / scapy.Raw(b"\x00" * 48),
            ether / scapy.IP(src="192.0.2.10", dst="192.0.2.53", flags="MF") / scapy.UDP(sport=1000, dport=53) / scapy.Raw(b"\x00" * 20),
            ether / scapy.IP(src="192.0.2.10", dst="192.0.2.53") / scapy.UDP(sport=1000, dport=53) / scapy.Raw(b"\x00\x01"),
            ether / scapy.Dot1Q(vlan=10) / scapy.IP(src="192.0.2.10", dst="192.0.2.53") / scapy.UDP(sport=1000, dport=53)
            / scapy.DNS(id=5, qd=scapy.DNSQR(qname="v.example.com")),
            dns_query(scapy, "b.example.com", sport=53, dport=40000),
        ]
        path = tmp_path / "mixed.pcap"
        scapy.wrpcap(str(path), packets)

        with PcapReader(path) as reader:
            names = [message.questions[0].name.to_text() for _, message in reader]
            stats = reader.stats

        assert names == ["a.example.com", "v.example.com", "b.example.com"]
        assert stats.records == 9
        assert stats.parsed == 3
        assert (stats.non_ipv4, stats.non_udp, stats.non_dns, stats.fragmented, stats.malformed) == (2, 1, 1, 1, 1)
        assert stats.skipped + stats.parsed == stats.records

    def test_header_only_capture(self):
        assert list(read_pcap(io.BytesIO(written_capture()))) == []

    def test_pcapng_rejected(self):
        with pytest.raises(PcapFormatError, match="pcapng"):
            list(read_pcap(io.BytesIO(b"\x0a\x0d\x0d\x0a" + b"\x00" * 40)))

    @pytest.mark.parametrize("data", [b"", b"not a capture at all", b"\xd4\xc3\xb2\xa1\x02\x00"])
    def test_bad_headers(self, data):
        with pytest.raises(PcapFormatError):
            list(read_pcap(io.BytesIO(data)))

    def test_unsupported_link_type(self):
        header = struct.pack("<IHHiIII", 0xA1B2C3D4, 2, 4, 0, 0, 65535, 101)
        with pytest.raises(PcapFormatError, match="link type"):
            list(read_pcap(io.BytesIO(header)))

    def test_truncated_record_after_good_ones(self):
        data = written_capture("a.example.com", "b.example.com")[:-5]
        seen = []
        with pytest.raises(PcapFormatError):
            for _, message in read_pcap(io.BytesIO(data)):
                seen.append(message)
        assert len(seen) == 1

    def test_nanosecond_and_big_endian_captures(self):
        data = written_capture("a.example.com")
        frame = data[24 + 16:]

        nano = struct.pack("<IHHiIII", 0xA1B23C4D, 2, 4, 0, 0, 65535, 1)
        nano += struct.pack("<IIII", 100, 500_000_000, len(frame), len(frame)) + frame
        big = struct.pack(">IHHiIII", 0xA1B2C3D4, 2, 4, 0, 0, 65535, 1)
        big += struct.pack(">IIII", 100, 250_000, len(frame), len(frame)) + frame

        (ts_nano, message_nano), = list(read_pcap(io.BytesIO(nano)))
        (ts_big, message_big), = list(read_pcap(io.BytesIO(big)))
        assert ts_nano == pytest.approx(100.5)
        assert ts_big == pytest.approx(100.25)
        assert message_nano == message_big

    def test_missing_file(self, tmp_path):
        with pytest.raises(PcapFormatError):
            PcapReader(tmp_path / "absent.pcap")

    def test_legit_fixture_accounting(self):
        with PcapReader(FIXTURES / "legit_subdomains.pcap") as reader:
            messages = [message for _, message in reader]
            stats = reader.stats

        assert stats.records == 804
        assert stats.parsed == len(messages) == 798
        assert stats.non_ipv4 == 3
        assert stats.non_dns == 3
        assert sum(message.is_response for message in messages) == 50


class TestPcapWriter:
    def test_deterministic(self):
        assert written_capture("a.example.com", "b.example.com") == written_capture("a.example.com", "b.example.com")

    def test_header_written_without_records(self):
        data = written_capture()
        assert len(data) == 24
        assert data[:4] == b"\xd4\xc3\xb2\xa1"
        assert struct.unpack("<I", data[20:24])[0] == 1

    def test_timestamps_step(self):
        stamps = [ts for ts, _ in read_pcap(io.BytesIO(written_capture("a.com", "b.com", "c.com")))]
        assert stamps[0] == PcapWriter.EPOCH
        assert [b - a for a, b in zip(stamps, stamps[1:])] == pytest.approx([0.01, 0.01], abs=1e-6)

    def test_readable_by_independent_reader(self, scapy, tmp_path):
        path = tmp_path / "out.pcap"
        path.write_bytes(written_capture("a.example.com"))

        packet, = scapy.rdpcap(str(path))
        ip = packet[scapy.IP]
        stored = ip.chksum
        ip.chksum = None
        assert scapy.IP(bytes(ip)).chksum == stored
        assert packet.time == PcapWriter.EPOCH
        assert packet[scapy.UDP].dport == 53
        assert packet[scapy.DNS].qd.qname == b"a.example.com."

    def test_responses(self):
        buffer = io.BytesIO()
        with PcapWriter(buffer) as writer:
            writer.write_response(WireService.encode_query("a.example.com", 1))
        (_, message), = list(read_pcap(io.BytesIO(buffer.getvalue())))
        assert message.questions[0].name.to_text() == "a.example.com"
