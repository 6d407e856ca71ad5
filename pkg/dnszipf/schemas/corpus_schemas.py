from enum import Enum
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, PositiveInt, field_validator

from ..models.dns import DomainName


class CorpusMode(str, Enum):
    DOMAIN = "domain"
    SUBDOMAIN = "subdomain"
    NS = "ns"


class Codec(str, Enum):
    BASE32 = "base32"
    BASE64_DNS = "base64_dns"
    HEX = "hex"

    @classmethod
    def parse(cls, value: str) -> "Codec":
        """Accepts the codec name, with 'base64' as an alias of base64_dns"""
        value = value.lower()
        if value == "base64":
            return cls.BASE64_DNS
        return cls(value)


class DomainListEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    rank: Optional[PositiveInt] = None
    domain: str
    line_number: int = Field(default=0, ge=0)

    @field_validator("domain")
    @classmethod
    def validate_domain(cls, v):
        DomainName.from_text(v)
        return v

    @property
    def name(self) -> DomainName:
        return DomainName.from_text(self.domain)


class SimulatedTunnelConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    codec: Codec
    apex: DomainName
    session_tag: str = Field(default="", max_length=8, pattern=r"^[a-z0-9_-]*$")
    max_label: int = Field(default=63, ge=8, le=63)
    seed: int = Field(default=0, ge=0, le=2**64 - 1)
    qtype: int = Field(default=16, ge=1, le=0xFFFF)

    @field_validator("apex", mode="before")
    @classmethod
    def validate_apex(cls, v):
        if isinstance(v, str):
            return DomainName.from_text(v)
        return v

    @field_validator("apex")
    @classmethod
    def validate_apex_not_root(cls, v):
        if v.is_root:
            raise ValueError("Tunnel apex cannot be the root")
        return v


class PcapStats(BaseModel):
    """Per-reason accounting of capture records; skipped + parsed == records"""

    records: int = 0
    parsed: int = 0
    non_ipv4: int = 0
    non_udp: int = 0
    fragmented: int = 0
    non_dns: int = 0
    malformed: int = 0

    @property
    def skipped(self) -> int:
        return self.non_ipv4 + self.non_udp + self.fragmented + self.non_dns + self.malformed


class FixtureEntry(BaseModel):
    model_config = ConfigDict(extra="allow")

    path: str
    fixture_class: str
    sha256: str = Field(pattern=r"^[0-9a-f]{64}$")
    description: str = ""


class FixtureManifest(BaseModel):
    version: int = Field(ge=1)
    fixtures: List[FixtureEntry]
    root: Optional[Path] = None

    @property
    def classes(self) -> set:
        return {entry.fixture_class for entry in self.fixtures}

    def by_class(self, fixture_class: str) -> List[FixtureEntry]:
        return [entry for entry in self.fixtures if entry.fixture_class == fixture_class]

    def get(self, path: str) -> FixtureEntry:
        for entry in self.fixtures:
            if entry.path == path:
                return entry
        raise KeyError(path)
