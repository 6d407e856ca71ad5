import logging
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from functools import partial, reduce
from itertools import islice
from pathlib import Path
from typing import Dict, Iterable, List, TextIO, Tuple

import numpy as np
from scipy import stats

from ..config import settings
from ..exceptions import (
    EmptyCountsError,
    FingerprintError,
    FingerprintFormatError,
    FingerprintInvariantError,
    FingerprintVersionError,
    InvalidGramSizeError,
    RankOutOfRangeError,
)
from ..models.fingerprint import GRAM_SIZES, DecayMetrics, Fingerprint, NGramCounts, RankedGram

logger = logging.getLogger(__name__)

FORMAT_MAGIC = "dnszipf-fingerprint"
FORMAT_VERSION = "v1"


def _tally(texts: Iterable[str], n: int) -> Counter:
    if n == 1:
        tally = Counter()
        for text in texts:
            tally.update(text)
        return tally
    return Counter(text[i:i + n] for text in texts for i in range(len(text) - n + 1))


def _count_shard(shard: List[str], n: int) -> Dict[str, int]:
    return dict(_tally(shard, n))


def _shards(texts: Iterable[str], size: int):
    iterator = iter(texts)
    while shard := list(islice(iterator, size)):
        yield shard


class FingerprintService:
    """Counting, ranking and decay metrics for character n-grams"""

    @staticmethod
    def count_ngrams(texts: Iterable[str], n: int) -> NGramCounts:
        """Count overlapping n-grams; grams never span two texts"""
        if n not in GRAM_SIZES:
            raise InvalidGramSizeError(f"Gram size {n} not in {GRAM_SIZES}")
        return NGramCounts(n=n, counts=dict(_tally(texts, n)))

    @staticmethod
    def count_ngrams_sharded(
        texts: Iterable[str],
        n: int,
        workers: int | None = None,
        shard_size: int | None = None,
    ) -> NGramCounts:
        """
        Count in shards and reduce with merge.
        With more than one worker the shards are counted in a process pool;
        the result always equals count_ngrams over the same texts.
        """
        if n not in GRAM_SIZES:
            raise InvalidGramSizeError(f"Gram size {n} not in {GRAM_SIZES}")
        workers = settings.COUNT_WORKERS if workers is None else workers
        shard_size = settings.COUNT_SHARD_SIZE if shard_size is None else shard_size
        if shard_size < 1:
            raise ValueError("shard_size must be positive")

        empty = NGramCounts(n=n)
        if workers <= 1:
            partials = (NGramCounts(n=n, counts=_count_shard(shard, n)) for shard in _shards(texts, shard_size))
            return reduce(FingerprintService.merge, partials, empty)

        logger.info(f"Counting {n}-grams with {workers} workers, {shard_size} texts per shard")
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = pool.map(partial(_count_shard, n=n), _shards(texts, shard_size))
            return reduce(FingerprintService.merge, (NGramCounts(n=n, counts=r) for r in results), empty)

    @staticmethod
    def merge(a: NGramCounts, b: NGramCounts) -> NGramCounts:
        if a.n != b.n:
            raise InvalidGramSizeError(f"Cannot merge {a.n}-gram counts with {b.n}-gram counts")
        merged = Counter(a.counts)
        merged.update(b.counts)
        return NGramCounts(n=a.n, counts=dict(merged))

    @staticmethod
    def build(counts: NGramCounts) -> Fingerprint:
        """Rank counts by descending frequency, ties broken by gram"""
        total = counts.total
        if total == 0:
            raise EmptyCountsError("Cannot build a fingerprint from empty counts")

        ranked = sorted(counts.counts.items(), key=lambda item: (-item[1], item[0]))
        entries = tuple(RankedGram(gram=gram, count=count, frequency=count / total) for gram, count in ranked)
        return Fingerprint(n=counts.n, entries=entries, sample_total=total)

    @staticmethod
    def top_gap(fp: Fingerprint, i: int, j: int) -> float:
        """frequency(rank i) - frequency(rank j)"""
        if not 1 <= i < j:
            raise RankOutOfRangeError(f"Need 1 <= i < j, got i={i} j={j}")
        return fp.frequency(i) - fp.frequency(j)

    @staticmethod
    def mean_rank_delta(fp: Fingerprint, k: int, start_rank: int = 1) -> float:
        """Average drop in frequency between consecutive ranks start_rank..k"""
        if not 1 <= start_rank < k:
            raise RankOutOfRangeError(f"Need 1 <= start_rank < k, got start_rank={start_rank} k={k}")
        return (fp.frequency(start_rank) - fp.frequency(k)) / (k - start_rank)

    @staticmethod
    def rank_correlation(a: Fingerprint, b: Fingerprint, k: int) -> float:
        """
        Spearman correlation of ranks over the union of both top-k gram sets.
        A gram missing from one top-k list takes rank k+1 there.
        """
        if a.n != b.n:
            raise InvalidGramSizeError(f"Cannot correlate {a.n}-gram and {b.n}-gram fingerprints")
        if k < 2:
            raise RankOutOfRangeError(f"k must be at least 2, got {k}")

        ranks_a = {gram: rank for rank, gram in enumerate(a.grams[:k], start=1)}
        ranks_b = {gram: rank for rank, gram in enumerate(b.grams[:k], start=1)}
        union = sorted(ranks_a.keys() | ranks_b.keys())
        if len(union) < 2:
            raise FingerprintError("Rank correlation needs at least two grams")

        x = [ranks_a.get(gram, k + 1) for gram in union]
        y = [ranks_b.get(gram, k + 1) for gram in union]
        rho, _ = stats.spearmanr(x, y)
        if math.isnan(rho):
            raise FingerprintError("Rank correlation undefined for constant rankings")
        return float(rho)

    @staticmethod
    def zipf_exponent(fp: Fingerprint, k: int, start_rank: int = 1) -> float:
        """Negative least-squares slope of log(frequency) against log(rank) over start_rank..k"""
        if not 1 <= start_rank < k:
            raise RankOutOfRangeError(f"Need 1 <= start_rank < k, got start_rank={start_rank} k={k}")
        if k > fp.pool_size:
            raise RankOutOfRangeError(f"k={k} exceeds pool size {fp.pool_size}")

        ranks = np.arange(start_rank, k + 1, dtype=float)
        freqs = np.array(fp.frequencies[start_rank - 1:k], dtype=float)
        if np.any(freqs <= 0):
            raise FingerprintError("Zero frequency within the fitted ranks")

        fit = stats.linregress(np.log(ranks), np.log(freqs))
        return float(-fit.slope)

    @staticmethod
    def decay_metrics(fp: Fingerprint, k: int = 14) -> DecayMetrics:
        """top_gap, mean_rank_delta and zipf_exponent over ranks 1..k, k clamped to the pool size"""
        k = min(k, fp.pool_size)
        if k < 2:
            raise RankOutOfRangeError(f"Fingerprint with {fp.pool_size} entries has no rank pairs")
        return DecayMetrics(
            k=k,
            top_gap=FingerprintService.top_gap(fp, 1, k),
            mean_rank_delta=FingerprintService.mean_rank_delta(fp, k),
            zipf_exponent=FingerprintService.zipf_exponent(fp, k),
        )

    @staticmethod
    def pool_normalized(fp: Fingerprint, k: int | None = None) -> List[Tuple[str, float, float]]:
        """(gram, frequency, frequency * pool_size) for the top k entries"""
        entries = fp.entries if k is None else fp.top(k)
        return [(e.gram, e.frequency, e.frequency * fp.pool_size) for e in entries]

    @staticmethod
    def save_fingerprint(fp: Fingerprint, destination: str | Path | TextIO) -> None:
        lines = [f"{FORMAT_MAGIC} {FORMAT_VERSION}", f"n={fp.n} total={fp.sample_total}"]
        lines.extend(f"{entry.gram}\t{entry.count}" for entry in fp.entries)
        body = "\n".join(lines) + "\n"

        if isinstance(destination, (str, Path)):
            with open(destination, "w", encoding="utf-8", newline="\n") as f:
                f.write(body)
        else:
            destination.write(body)

    @staticmethod
    def load_fingerprint(source: str | Path | TextIO) -> Fingerprint:
        """Read a fingerprint file, enforcing the format and every fingerprint invariant"""
        try:
            if isinstance(source, (str, Path)):
                with open(source, encoding="utf-8") as f:
                    text = f.read()
            else:
                text = source.read()
        except (OSError, UnicodeDecodeError) as e:
            logger.error(f"Error reading fingerprint {source}: {e}")
            raise FingerprintFormatError(f"Unreadable fingerprint file: {e}") from e

        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if len(lines) < 2:
            raise FingerprintFormatError("Fingerprint file needs a header and a size line")

        magic, _, version = lines[0].partition(" ")
        if magic != FORMAT_MAGIC:
            raise FingerprintFormatError(f"Not a fingerprint file: {lines[0]!r}")
        if version != FORMAT_VERSION:
            raise FingerprintVersionError(f"Unsupported fingerprint version {version!r}")

        n, total = FingerprintService._parse_size_line(lines[1])

        counts = []
        for number, line in enumerate(lines[2:], start=3):
            gram, sep, count = line.partition("\t")
            if not sep or not (count.isascii() and count.isdigit()):
                raise FingerprintFormatError(f"line {number}: expected '<gram>\\t<count>', got {line!r}")
            counts.append((gram, int(count)))

        if not counts:
            raise FingerprintInvariantError("Fingerprint has no entries")
        actual_total = sum(count for _, count in counts)
        if actual_total != total:
            raise FingerprintInvariantError(f"Counts sum to {actual_total}, header says total={total}")

        try:
            entries = tuple(
                RankedGram(gram=gram, count=count, frequency=count / total) for gram, count in counts
            )
            return Fingerprint(n=n, entries=entries, sample_total=total)
        except ValueError as e:
            raise FingerprintInvariantError(f"Fingerprint invariants violated: {e}") from e

    @staticmethod
    def _parse_size_line(line: str) -> Tuple[int, int]:
        fields = dict(part.partition("=")[::2] for part in line.split(" "))
        if set(fields) != {"n", "total"} or not all(v.isascii() and v.isdigit() for v in fields.values()):
            raise FingerprintFormatError(f"Malformed size line {line!r}")
        n, total = int(fields["n"]), int(fields["total"])
        if n not in GRAM_SIZES:
            raise FingerprintFormatError(f"Gram size {n} not in {GRAM_SIZES}")
        if total <= 0:
            raise FingerprintInvariantError("total must be positive")
        return n, total
