import argparse
import logging
import sys

from . import EXIT_OK, fmt
from ..exceptions import EmptyCountsError
from ..models.fingerprint import GRAM_SIZES
from ..schemas.corpus_schemas import CorpusMode
from ..services.corpus_service import CorpusService
from ..services.fingerprint_service import FingerprintService

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("train", help="build a fingerprint from a domain list or capture")
    parser.add_argument("--input", required=True, help="domain list (domain or rank,domain lines) or classic pcap")
    parser.add_argument("--n", type=int, choices=GRAM_SIZES, default=1, help="gram size")
    parser.add_argument("--mode", choices=[m.value for m in CorpusMode], default=CorpusMode.DOMAIN.value)
    parser.add_argument("--out", required=True, help="fingerprint file to write")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    texts, entries = CorpusService.load_texts(args.input, CorpusMode(args.mode))
    counts = FingerprintService.count_ngrams_sharded(texts, args.n)
    if counts.total == 0:
        raise EmptyCountsError(f"No {args.mode} text of length >= {args.n} in {args.input}")

    fp = FingerprintService.build(counts)
    FingerprintService.save_fingerprint(fp, args.out)
    logger.info(f"Wrote {fp!r} to {args.out}")

    top_gap = FingerprintService.top_gap(fp, 1, 10) if fp.pool_size >= 10 else float("nan")
    k = min(14, fp.pool_size)
    zipf = FingerprintService.zipf_exponent(fp, k) if k >= 2 else float("nan")

    out = sys.stdout
    print(f"entries\t{entries}", file=out)
    print(f"pool_size\t{fp.pool_size}", file=out)
    print(f"top_gap_1_10\t{fmt(top_gap)}", file=out)
    print(f"zipf_exponent\t{fmt(zipf)}", file=out)
    return EXIT_OK
