import io
import logging
from pathlib import Path
from typing import Iterator, List, Optional, TextIO, Tuple

import numpy as np

from ..exceptions import DomainListError, WireFormatError
from ..models.dns import DomainName
from ..schemas.corpus_schemas import CorpusMode, DomainListEntry
from .extraction_service import DomainContext, ExtractionService
from .pcap_service import is_pcap, read_pcap

logger = logging.getLogger(__name__)

RANDOM_ALPHABET = "abcdefghijklmnopqrstuvwxyz0123456789-"


class CorpusService:
    """Training and evaluation data: domain lists, captures, random baselines"""

    @staticmethod
    def load_domain_list(
        source: str | Path | TextIO,
        diagnostics: Optional[List[DomainListError]] = None,
    ) -> Iterator[DomainListEntry]:
        """
        Stream entries from `domain` or `rank,domain` lines.
        Malformed lines are logged, appended to `diagnostics` when given, and skipped.
        """
        try:
            stream = open(source, encoding="utf-8") if isinstance(source, (str, Path)) else source
        except OSError as e:
            logger.error(f"Error opening domain list {source}: {e}")
            raise DomainListError(f"Cannot open domain list: {e}") from e

        try:
            for line_number, line in enumerate(stream, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                try:
                    yield CorpusService._parse_line(line, line_number)
                except DomainListError as e:
                    logger.warning(f"Skipping domain list entry: {e}")
                    if diagnostics is not None:
                        diagnostics.append(e)
        except UnicodeDecodeError as e:
            logger.error(f"Domain list {source} is not UTF-8: {e}")
            raise DomainListError(f"Domain list is not valid UTF-8: {e}") from e
        finally:
            if stream is not source:
                stream.close()

    @staticmethod
    def _parse_line(line: str, line_number: int) -> DomainListEntry:
        rank = None
        domain = line
        if "," in line:
            rank_text, _, domain = line.partition(",")
            rank_text = rank_text.strip()
            if not (rank_text.isascii() and rank_text.isdigit()) or int(rank_text) < 1:
                raise DomainListError(f"Invalid rank {rank_text!r}", line_number)
            rank = int(rank_text)

        domain = domain.strip()
        try:
            DomainName.from_text(domain)
        except WireFormatError as e:
            raise DomainListError(f"Invalid domain {domain!r}: {e}", line_number) from e
        return DomainListEntry(rank=rank, domain=domain, line_number=line_number)

    @staticmethod
    def generate_random_domains(count: int, length: int = 10, seed: int = 0) -> List[str]:
        """Texts of i.i.d. uniform characters over a-z, 0-9 and '-' from a seeded PCG64 generator"""
        if count < 1:
            raise ValueError("count must be at least 1")
        if length < 1:
            raise ValueError("length must be at least 1")

        rng = np.random.default_rng(seed)
        symbols = np.frombuffer(RANDOM_ALPHABET.encode("ascii"), dtype=np.uint8)
        draws = symbols[rng.integers(0, len(symbols), size=(count, length))]
        blob = draws.tobytes().decode("ascii")
        return [blob[i:i + length] for i in range(0, count * length, length)]

    @staticmethod
    def load_texts(source: str | Path, mode: CorpusMode) -> Tuple[List[str], int]:
        """
        Normalized texts of a domain list or a pcap, chosen by magic sniffing.
        Returns the texts (empty ones dropped) and the number of entries or
        names read.
        """
        if is_pcap(source):
            names = CorpusService._pcap_names(source, mode)
        else:
            names = (entry.name for entry in CorpusService.load_domain_list(source))

        texts = []
        entries = 0
        for name in names:
            entries += 1
            text = (
                ExtractionService.registered_core(name)
                if mode == CorpusMode.DOMAIN
                else ExtractionService.subdomain_text(name)
            )
            if text:
                texts.append(text)

        logger.info(f"Read {entries} names from {source}, {len(texts)} non-empty {mode.value} texts")
        return texts, entries

    @staticmethod
    def _pcap_names(source: str | Path, mode: CorpusMode) -> Iterator[DomainName]:
        if mode == CorpusMode.NS:
            wanted = {DomainContext.NS_HOST}
        elif mode == CorpusMode.DOMAIN:
            wanted = {DomainContext.QUESTION}
        else:
            wanted = {DomainContext.QUESTION, DomainContext.ANSWER_HOST}

        for _, message in read_pcap(source):
            for name, context in ExtractionService.harvest(message):
                if context in wanted:
                    yield name

    @staticmethod
    def write_domain_list(texts: List[str], destination: str | Path | TextIO, tld: str = "com") -> None:
        body = "".join(f"{text}.{tld}\n" for text in texts)
        if isinstance(destination, io.TextIOBase):
            destination.write(body)
        else:
            with open(destination, "w", encoding="utf-8", newline="\n") as f:
                f.write(body)
