import argparse
import csv
import json
import logging
import sys

from . import EXIT_OK, fmt
from ..exceptions import UsageError
from ..services.fingerprint_service import FingerprintService

logger = logging.getLogger(__name__)

COLUMNS = ("source", "rank", "gram", "frequency")


def register(subparsers) -> None:
    parser = subparsers.add_parser("report", help="rank-frequency rows for plotting")
    parser.add_argument("--inputs", required=True, nargs="+", help="fingerprint files")
    parser.add_argument("--k", type=int, default=14, help="ranks per input")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    if args.k < 1:
        raise UsageError("--k must be at least 1")

    rows = []
    for source in args.inputs:
        fp = FingerprintService.load_fingerprint(source)
        for rank, entry in enumerate(fp.top(args.k), start=1):
            rows.append({"source": source, "rank": rank, "gram": entry.gram, "frequency": entry.frequency})

        if fp.pool_size >= 2:
            metrics = FingerprintService.decay_metrics(fp, args.k if args.k >= 2 else 2)
            print(
                f"# metrics source={source} k={metrics.k} top_gap={fmt(metrics.top_gap)} "
                f"mean_rank_delta={fmt(metrics.mean_rank_delta)} zipf_exponent={fmt(metrics.zipf_exponent)}",
                file=sys.stderr,
            )

    if args.format == "json":
        json.dump(rows, sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        writer = csv.DictWriter(sys.stdout, fieldnames=COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return EXIT_OK
