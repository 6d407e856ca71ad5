from enum import IntEnum
from typing import Tuple

from pydantic import Field, field_validator

from ..exceptions import EmptyLabelError, LabelTooLongError, NameTooLongError
from .base import FrozenModel

MAX_LABEL_LENGTH = 63
MAX_NAME_LENGTH = 255


class RecordType(IntEnum):
    A = 1
    NS = 2
    CNAME = 5
    SOA = 6
    NULL = 10
    PTR = 12
    MX = 15
    TXT = 16
    AAAA = 28
    OPT = 41


# RDATA of name-bearing types: (offset of the first name, number of consecutive names)
RDATA_NAME_LAYOUT = {
    RecordType.NS: (0, 1),
    RecordType.CNAME: (0, 1),
    RecordType.PTR: (0, 1),
    RecordType.MX: (2, 1),
    RecordType.SOA: (0, 2),
}


def encoded_length(labels) -> int:
    """Wire length of a name: one length octet per label plus the root octet"""
    return sum(len(label) + 1 for label in labels) + 1


class DomainName(FrozenModel):
    """
    A domain name as a sequence of raw label octets, root label excluded.
    The empty sequence is the root name; it only occurs as an owner name
    in decoded messages and is never harvested.
    """

    labels: Tuple[bytes, ...] = ()

    @field_validator("labels")
    @classmethod
    def validate_labels(cls, v):
        for label in v:
            if not label:
                raise ValueError("Empty label")
            if len(label) > MAX_LABEL_LENGTH:
                raise ValueError(f"Label exceeds {MAX_LABEL_LENGTH} octets")
        if encoded_length(v) > MAX_NAME_LENGTH:
            raise ValueError(f"Name exceeds {MAX_NAME_LENGTH} octets")
        return v

    @classmethod
    def from_text(cls, text: str) -> "DomainName":
        """Parse presentation form, raising wire-format errors instead of validation errors"""
        if text.endswith("."):
            text = text[:-1]
        if not text:
            raise EmptyLabelError("Name has no labels")

        labels = tuple(part.encode("utf-8") for part in text.split("."))
        for label in labels:
            if not label:
                raise EmptyLabelError(f"Empty label in {text!r}")
            if len(label) > MAX_LABEL_LENGTH:
                raise LabelTooLongError(f"Label of {len(label)} octets in {text!r}")
        if encoded_length(labels) > MAX_NAME_LENGTH:
            raise NameTooLongError(f"Name encodes to {encoded_length(labels)} octets")

        return cls(labels=labels)

    @property
    def is_root(self) -> bool:
        return not self.labels

    @property
    def wire_length(self) -> int:
        return encoded_length(self.labels)

    def to_text(self) -> str:
        return ".".join(label.decode("utf-8", errors="backslashreplace") for label in self.labels)

    def endswith(self, other: "DomainName") -> bool:
        n = len(other.labels)
        if n == 0:
            return True
        tail = self.labels[-n:] if len(self.labels) >= n else ()
        return tuple(label.lower() for label in tail) == tuple(label.lower() for label in other.labels)

    def __str__(self) -> str:
        return self.to_text() or "."

    def __repr__(self):
        return f"<DomainName({str(self)!r})>"


class Question(FrozenModel):
    name: DomainName
    qtype: int = Field(ge=0, le=0xFFFF)
    qclass: int = Field(default=1, ge=0, le=0xFFFF)


class ResourceRecord(FrozenModel):
    name: DomainName
    rtype: int = Field(ge=0, le=0xFFFF)
    rclass: int = Field(default=1, ge=0, le=0xFFFF)
    ttl: int = Field(default=0, ge=0, le=0xFFFFFFFF)
    rdata: bytes = b""
    rdata_names: Tuple[DomainName, ...] = ()

    def __repr__(self):
        return f"<ResourceRecord(name={str(self.name)!r}, type={self.rtype}, rdlen={len(self.rdata)})>"


class DnsMessage(FrozenModel):
    id: int = Field(ge=0, le=0xFFFF)
    flags: int = Field(default=0, ge=0, le=0xFFFF)
    questions: Tuple[Question, ...] = ()
    answers: Tuple[ResourceRecord, ...] = ()
    authorities: Tuple[ResourceRecord, ...] = ()
    additionals: Tuple[ResourceRecord, ...] = ()

    @property
    def is_response(self) -> bool:
        return bool(self.flags & 0x8000)

    def __repr__(self):
        return (
            f"<DnsMessage(id={self.id}, response={self.is_response}, "
            f"qd={len(self.questions)}, an={len(self.answers)}, "
            f"ns={len(self.authorities)}, ar={len(self.additionals)})>"
        )
