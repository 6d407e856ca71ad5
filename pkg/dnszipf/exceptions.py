class DnsZipfError(ValueError):
    """Base class for every error raised by dnszipf"""


class UsageError(DnsZipfError):
    """Invalid command-line flags or detector configuration"""


# Wire format

class WireFormatError(DnsZipfError):
    """Malformed DNS wire data"""

    def __init__(self, detail: str, section: str | None = None):
        self.detail = detail
        self.section = section
        super().__init__(f"{section}: {detail}" if section else detail)

    def in_section(self, section: str) -> "WireFormatError":
        return type(self)(self.detail, section=section)


class TruncatedMessageError(WireFormatError):
    pass


class ReservedLabelTypeError(WireFormatError):
    pass


class PointerLoopError(WireFormatError):
    pass


class NameTooLongError(WireFormatError):
    pass


class LabelTooLongError(WireFormatError):
    pass


class EmptyLabelError(WireFormatError):
    pass


# Fingerprints

class FingerprintError(DnsZipfError):
    pass


class InvalidGramSizeError(FingerprintError):
    pass


class EmptyCountsError(FingerprintError):
    pass


class RankOutOfRangeError(FingerprintError):
    pass


class FingerprintFormatError(FingerprintError):
    """Fingerprint file is not in the expected layout"""


class FingerprintVersionError(FingerprintFormatError):
    pass


class FingerprintInvariantError(FingerprintFormatError):
    """Fingerprint file parses but violates the fingerprint invariants"""


# Corpus ingestion and synthesis

class CorpusError(DnsZipfError):
    pass


class PcapFormatError(CorpusError):
    pass


class DomainListError(CorpusError):
    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}" if line_number else message)


class TunnelConfigError(CorpusError):
    pass


class FixtureError(CorpusError):
    def __init__(self, message: str, path: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class EmptyWindowError(DnsZipfError):
    pass
