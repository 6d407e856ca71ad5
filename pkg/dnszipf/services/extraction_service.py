import logging
from enum import Enum
from typing import Iterable, List, Tuple

from ..models.dns import DnsMessage, DomainName, RecordType
from ..models.fingerprint import ALPHABET

logger = logging.getLogger(__name__)

# Byte values removed by normalization (everything outside the alphabet after case folding)
_DROP = bytes(b for b in range(256) if chr(b) not in ALPHABET)


class DomainContext(str, Enum):
    QUESTION = "question"
    ANSWER_HOST = "answer_host"
    NS_HOST = "ns_host"
    OTHER = "other"


class ExtractionService:
    """Turns names into the normalized texts that get counted"""

    @staticmethod
    def normalize(value: DomainName | str | bytes) -> str:
        """
        Fold ASCII to lowercase and drop every character outside a-z 0-9 - _ .
        A DomainName is joined with '.' first.
        """
        if isinstance(value, DomainName):
            raw = b".".join(value.labels)
        elif isinstance(value, str):
            raw = value.encode("utf-8")
        else:
            raw = bytes(value)
        return raw.lower().translate(None, _DROP).decode("ascii")

    @staticmethod
    def registered_core(name: DomainName) -> str:
        """Drop the top-level label, then the lowest-level label if two or more remain"""
        labels = name.labels[:-1]
        if len(labels) >= 2:
            labels = labels[1:]
        return ExtractionService.normalize(b".".join(labels))

    @staticmethod
    def subdomain_text(name: DomainName) -> str:
        """Everything left of the registered domain, which is taken as the last two labels"""
        return ExtractionService.normalize(b".".join(name.labels[:-2]))

    @staticmethod
    def harvest(message: DnsMessage) -> List[Tuple[DomainName, DomainContext]]:
        """
        Every name in the message with the context it appeared in.
        Additional-section owners (glue, EDNS) are OTHER; root names are skipped.
        """
        harvested = [(q.name, DomainContext.QUESTION) for q in message.questions]

        sections = (
            (message.answers, DomainContext.ANSWER_HOST),
            (message.authorities, DomainContext.ANSWER_HOST),
            (message.additionals, DomainContext.OTHER),
        )
        for records, owner_context in sections:
            for record in records:
                harvested.append((record.name, owner_context))
                data_context = DomainContext.NS_HOST if record.rtype == RecordType.NS else owner_context
                harvested.extend((name, data_context) for name in record.rdata_names)

        return [(name, context) for name, context in harvested if not name.is_root]

    @staticmethod
    def texts_for(message: DnsMessage, kinds: Iterable[DomainContext]) -> List[str]:
        """Non-empty subdomain texts of the names harvested under the given contexts"""
        wanted = set(kinds)
        texts = []
        for name, context in ExtractionService.harvest(message):
            if context in wanted:
                text = ExtractionService.subdomain_text(name)
                if text:
                    texts.append(text)
        return texts
