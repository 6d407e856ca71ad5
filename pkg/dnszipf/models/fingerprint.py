import math
from typing import Dict, Tuple

from pydantic import Field, field_validator, model_validator

from ..exceptions import RankOutOfRangeError
from .base import FrozenModel

# Normalized domain text alphabet: a-z, 0-9, '-', '_', '.'
ALPHABET = frozenset("abcdefghijklmnopqrstuvwxyz0123456789-_.")
GRAM_SIZES = (1, 2, 3)


def _check_gram(gram: str, n: int) -> None:
    if len(gram) != n:
        raise ValueError(f"Gram {gram!r} is not of length {n}")
    if not set(gram) <= ALPHABET:
        raise ValueError(f"Gram {gram!r} has characters outside the alphabet")


class NGramCounts(FrozenModel):
    """Multiset of overlapping n-grams; zero counts are never stored"""

    n: int = Field(ge=1, le=3)
    counts: Dict[str, int] = Field(default_factory=dict)

    @model_validator(mode="after")
    def validate_counts(self):
        for gram, count in self.counts.items():
            _check_gram(gram, self.n)
            if count <= 0:
                raise ValueError(f"Count for {gram!r} must be positive")
        return self

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def distinct(self) -> int:
        return len(self.counts)

    def __hash__(self):
        return hash((self.n, frozenset(self.counts.items())))

    def __repr__(self):
        return f"<NGramCounts(n={self.n}, distinct={self.distinct}, total={self.total})>"


class RankedGram(FrozenModel):
    gram: str
    count: int = Field(gt=0)
    frequency: float = Field(gt=0, le=1)


class Fingerprint(FrozenModel):
    """
    Ranked n-gram distribution of a corpus.

    Entries are ordered by descending count, ties broken by ascending gram;
    frequencies are count / sample_total. Ranks are 1-based.
    """

    n: int = Field(ge=1, le=3)
    entries: Tuple[RankedGram, ...]
    sample_total: int = Field(gt=0)

    @model_validator(mode="after")
    def validate_entries(self):
        if not self.entries:
            raise ValueError("Fingerprint has no entries")

        seen = set()
        previous = None
        for entry in self.entries:
            _check_gram(entry.gram, self.n)
            if entry.gram in seen:
                raise ValueError(f"Duplicate gram {entry.gram!r}")
            seen.add(entry.gram)
            key = (-entry.count, entry.gram)
            if previous is not None and key <= previous:
                raise ValueError(f"Entries out of order at {entry.gram!r}")
            previous = key

        total = sum(entry.count for entry in self.entries)
        if total != self.sample_total:
            raise ValueError(f"sample_total {self.sample_total} != sum of counts {total}")
        if not math.isclose(sum(entry.frequency for entry in self.entries), 1.0, abs_tol=1e-9):
            raise ValueError("Frequencies do not sum to 1")
        return self

    @property
    def pool_size(self) -> int:
        return len(self.entries)

    @property
    def grams(self) -> Tuple[str, ...]:
        return tuple(entry.gram for entry in self.entries)

    @property
    def frequencies(self) -> Tuple[float, ...]:
        return tuple(entry.frequency for entry in self.entries)

    def frequency(self, rank: int) -> float:
        if not 1 <= rank <= self.pool_size:
            raise RankOutOfRangeError(f"Rank {rank} outside 1..{self.pool_size}")
        return self.entries[rank - 1].frequency

    def top(self, k: int) -> Tuple[RankedGram, ...]:
        return self.entries[:k]

    def __repr__(self):
        head = ", ".join(entry.gram for entry in self.entries[:5])
        return f"<Fingerprint(n={self.n}, pool_size={self.pool_size}, total={self.sample_total}, top=[{head}])>"


class DecayMetrics(FrozenModel):
    """Shape of the top of a fingerprint: how fast frequency decays with rank"""

    k: int = Field(ge=2)
    top_gap: float
    mean_rank_delta: float
    zipf_exponent: float

    @field_validator("top_gap", "mean_rank_delta")
    @classmethod
    def validate_non_negative(cls, v):
        if v < 0:
            raise ValueError("Decay gaps cannot be negative")
        return v
