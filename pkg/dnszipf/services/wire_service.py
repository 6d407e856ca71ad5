import logging
import struct
from typing import List, Tuple

from ..exceptions import (
    NameTooLongError,
    PointerLoopError,
    ReservedLabelTypeError,
    TruncatedMessageError,
    WireFormatError,
)
from ..models.dns import (
    MAX_NAME_LENGTH,
    RDATA_NAME_LAYOUT,
    DnsMessage,
    DomainName,
    Question,
    ResourceRecord,
)

logger = logging.getLogger(__name__)

HEADER = struct.Struct("!6H")
QUESTION_TAIL = struct.Struct("!HH")
RECORD_TAIL = struct.Struct("!HHIH")

POINTER_BITS = 0xC0
RECURSION_DESIRED = 0x0100
CLASS_IN = 1


class WireService:
    """RFC 1035 message decoding and query encoding"""

    @staticmethod
    def decode_name(buf: bytes, offset: int) -> Tuple[DomainName, int]:
        """
        Decode a possibly-compressed name starting at offset.
        Returns the name and the offset just past the name as it appears
        at its original position (after the first pointer, if any).
        """
        labels: List[bytes] = []
        visited = set()
        pos = offset
        next_offset = None
        length = 1

        while True:
            if pos >= len(buf):
                raise TruncatedMessageError(f"Name runs past end of message at offset {pos}")

            octet = buf[pos]
            kind = octet & POINTER_BITS

            if kind == POINTER_BITS:
                if pos + 1 >= len(buf):
                    raise TruncatedMessageError(f"Compression pointer cut short at offset {pos}")
                target = ((octet & 0x3F) << 8) | buf[pos + 1]
                if next_offset is None:
                    next_offset = pos + 2
                if target in visited:
                    raise PointerLoopError(f"Compression pointer loop through offset {target}")
                visited.add(target)
                pos = target
                continue

            if kind:
                raise ReservedLabelTypeError(f"Reserved label type 0x{kind:02x} at offset {pos}")

            if octet == 0:
                pos += 1
                break

            end = pos + 1 + octet
            if end > len(buf):
                raise TruncatedMessageError(f"Label runs past end of message at offset {pos}")
            length += octet + 1
            if length > MAX_NAME_LENGTH:
                raise NameTooLongError(f"Name exceeds {MAX_NAME_LENGTH} octets")
            labels.append(bytes(buf[pos + 1:end]))
            pos = end

        if next_offset is None:
            next_offset = pos
        return DomainName(labels=tuple(labels)), next_offset

    @staticmethod
    def parse_message(buf: bytes) -> DnsMessage:
        """Decode a full DNS message; trailing bytes after the last section are ignored"""
        if len(buf) < HEADER.size:
            raise TruncatedMessageError(f"Message of {len(buf)} bytes is shorter than a header", section="header")

        msg_id, flags, qdcount, ancount, nscount, arcount = HEADER.unpack_from(buf, 0)
        pos = HEADER.size

        questions = []
        for _ in range(qdcount):
            question, pos = WireService._read_question(buf, pos)
            questions.append(question)

        sections = []
        for section, count in (("answer", ancount), ("authority", nscount), ("additional", arcount)):
            records = []
            for _ in range(count):
                try:
                    record, pos = WireService._read_record(buf, pos)
                except WireFormatError as e:
                    raise e.in_section(section) from e
                records.append(record)
            sections.append(tuple(records))

        return DnsMessage(
            id=msg_id,
            flags=flags,
            questions=tuple(questions),
            answers=sections[0],
            authorities=sections[1],
            additionals=sections[2],
        )

    @staticmethod
    def encode_query(name: str, qtype: int, query_id: int = 0) -> bytes:
        """Encode a single-question recursive query with no compression"""
        if not 0 <= qtype <= 0xFFFF:
            raise ValueError(f"qtype {qtype} outside 0..65535")
        if not 0 <= query_id <= 0xFFFF:
            raise ValueError(f"query id {query_id} outside 0..65535")

        domain = DomainName.from_text(name)
        header = HEADER.pack(query_id, RECURSION_DESIRED, 1, 0, 0, 0)
        return header + WireService.encode_name(domain) + QUESTION_TAIL.pack(qtype, CLASS_IN)

    @staticmethod
    def encode_name(name: DomainName) -> bytes:
        return b"".join(bytes([len(label)]) + label for label in name.labels) + b"\x00"

    @staticmethod
    def _read_question(buf: bytes, pos: int) -> Tuple[Question, int]:
        try:
            name, pos = WireService.decode_name(buf, pos)
        except WireFormatError as e:
            raise e.in_section("question") from e
        if pos + QUESTION_TAIL.size > len(buf):
            raise TruncatedMessageError("Question type/class cut short", section="question")
        qtype, qclass = QUESTION_TAIL.unpack_from(buf, pos)
        return Question(name=name, qtype=qtype, qclass=qclass), pos + QUESTION_TAIL.size

    @staticmethod
    def _read_record(buf: bytes, pos: int) -> Tuple[ResourceRecord, int]:
        name, pos = WireService.decode_name(buf, pos)
        if pos + RECORD_TAIL.size > len(buf):
            raise TruncatedMessageError("Record header cut short")
        rtype, rclass, ttl, rdlength = RECORD_TAIL.unpack_from(buf, pos)
        pos += RECORD_TAIL.size
        end = pos + rdlength
        if end > len(buf):
            raise TruncatedMessageError(f"RDATA of {rdlength} bytes runs past end of message")

        rdata_names = WireService._read_rdata_names(buf, rtype, pos, end)
        record = ResourceRecord(
            name=name,
            rtype=rtype,
            rclass=rclass,
            ttl=ttl,
            rdata=bytes(buf[pos:end]),
            rdata_names=rdata_names,
        )
        return record, end

    @staticmethod
    def _read_rdata_names(buf: bytes, rtype: int, start: int, end: int) -> Tuple[DomainName, ...]:
        """Names embedded in RDATA; pointers may reach anywhere in the message"""
        if rtype not in RDATA_NAME_LAYOUT:
            return ()
        offset, count = RDATA_NAME_LAYOUT[rtype]
        pos = start + offset

        names = []
        for _ in range(count):
            if pos >= end:
                raise TruncatedMessageError(f"RDATA of type {rtype} too short for a name")
            name, pos = WireService.decode_name(buf, pos)
            if pos > end:
                raise WireFormatError(f"Name in RDATA of type {rtype} overruns RDLENGTH")
            names.append(name)
        return tuple(names)
