import argparse
import logging
import sys

from . import EXIT_OK, fmt
from ..exceptions import EmptyCountsError, FingerprintError, UsageError
from ..models.fingerprint import GRAM_SIZES
from ..schemas.corpus_schemas import CorpusMode
from ..services.corpus_service import CorpusService
from ..services.fingerprint_service import FingerprintService

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("analyze", help="unigram, bigram and trigram profile of a corpus")
    parser.add_argument("--input", required=True, help="domain list or classic pcap")
    parser.add_argument("--mode", choices=[m.value for m in CorpusMode], default=CorpusMode.DOMAIN.value)
    parser.add_argument("--reference", help="fingerprint to correlate against (same gram size only)")
    parser.add_argument("--k", type=int, default=14, help="rank depth")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    if args.k < 2:
        raise UsageError("--k must be at least 2")

    reference = FingerprintService.load_fingerprint(args.reference) if args.reference else None
    texts, entries = CorpusService.load_texts(args.input, CorpusMode(args.mode))

    out = sys.stdout
    print(f"source\t{args.input}", file=out)
    print(f"mode\t{args.mode}", file=out)
    print(f"entries\t{entries}", file=out)
    print(f"texts\t{len(texts)}", file=out)

    profiled = 0
    for n in GRAM_SIZES:
        try:
            fp = FingerprintService.build(FingerprintService.count_ngrams(texts, n))
        except EmptyCountsError:
            logger.warning(f"No {n}-grams in {args.input}")
            continue
        profiled += 1
        _print_profile(fp, args.k, reference, out)

    if not profiled:
        raise EmptyCountsError(f"No {args.mode} text in {args.input}")
    return EXIT_OK


def _print_profile(fp, k, reference, out) -> None:
    print("", file=out)
    print(f"[n={fp.n}]", file=out)
    print(f"pool_size\t{fp.pool_size}", file=out)
    print(f"total\t{fp.sample_total}", file=out)
    if fp.pool_size >= 10:
        print(f"top_gap_1_10\t{fmt(FingerprintService.top_gap(fp, 1, 10))}", file=out)

    if fp.pool_size >= 2:
        metrics = FingerprintService.decay_metrics(fp, k)
        print(f"mean_rank_delta\t{fmt(metrics.mean_rank_delta)}", file=out)
        print(f"zipf_exponent\t{fmt(metrics.zipf_exponent)}", file=out)
        print(f"k\t{metrics.k}", file=out)

    if reference is not None and reference.n == fp.n:
        try:
            print(f"rank_corr\t{fmt(FingerprintService.rank_correlation(fp, reference, k))}", file=out)
        except FingerprintError as e:
            logger.warning(f"Rank correlation unavailable for n={fp.n}: {e}")

    print("rank\tgram\tfrequency\tpool_normalized", file=out)
    for rank, (gram, frequency, normalized) in enumerate(FingerprintService.pool_normalized(fp, k), start=1):
        print(f"{rank}\t{gram}\t{fmt(frequency)}\t{fmt(normalized)}", file=out)
