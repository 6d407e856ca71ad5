import argparse
import logging
import sys

from pydantic import ValidationError

from . import EXIT_DETECTED, EXIT_OK
from ..config import load_thresholds_file
from ..exceptions import UsageError
from ..processors.detector import StreamRouter, explain, format_line
from ..schemas.detector_schemas import DetectorConfig, DetectorThresholds, Verdict
from ..services.extraction_service import ExtractionService
from ..services.fingerprint_service import FingerprintService
from ..services.pcap_service import PcapReader

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("detect", help="score query windows in a capture for tunnel traffic")
    parser.add_argument("--pcap", required=True, help="classic pcap capture")
    parser.add_argument("--fingerprint", required=True, help="unigram reference fingerprint of legitimate subdomains")
    parser.add_argument("--window", type=int, default=None, help="queries per window (default 100)")
    parser.add_argument("--thresholds", help="key=value file overriding detector settings")
    parser.add_argument("--ns-fingerprint", help="reference for name-server hosts; enables the ns stream")
    parser.add_argument("--flush-partial", action="store_true", help="also score the trailing partial window")
    parser.add_argument("--explain", action="store_true", help="write a threshold report per window to stderr")
    parser.set_defaults(handler=run)


def build_config(args: argparse.Namespace) -> DetectorConfig:
    overrides = load_thresholds_file(args.thresholds) if args.thresholds else {}
    if args.window is not None:
        overrides["window_size"] = args.window

    try:
        thresholds = DetectorThresholds(
            **{key: overrides.pop(key) for key in list(overrides) if key in DetectorThresholds.model_fields}
        )
    except ValidationError as e:
        raise UsageError(f"Invalid thresholds: {e}") from e

    reference = FingerprintService.load_fingerprint(args.fingerprint)
    ns_reference = FingerprintService.load_fingerprint(args.ns_fingerprint) if args.ns_fingerprint else None

    try:
        return DetectorConfig(reference=reference, ns_reference=ns_reference, thresholds=thresholds, **overrides)
    except ValidationError as e:
        raise UsageError(f"Invalid detector configuration: {e}") from e


def run(args: argparse.Namespace) -> int:
    if args.window is not None and args.window < 10:
        raise UsageError(f"--window must be at least 10, got {args.window}")
    config = build_config(args)
    router = StreamRouter(config)
    tunnels = 0

    def emit(score):
        nonlocal tunnels
        print(format_line(score), file=sys.stdout)
        if args.explain:
            print(explain(score, config), file=sys.stderr)
        if score.verdict == Verdict.TUNNEL:
            tunnels += 1

    with PcapReader(args.pcap) as reader:
        for _, message in reader:
            for name, context in ExtractionService.harvest(message):
                score = router.route(ExtractionService.subdomain_text(name), context)
                if score is not None:
                    emit(score)
        stats = reader.stats

    if args.flush_partial:
        for score in router.flush():
            emit(score)
    else:
        pending = sum(len(detector.pending) for detector in router.detectors.values())
        if pending:
            logger.info(f"{pending} texts left in partial windows (use --flush-partial to score them)")

    logger.info(
        f"Detection finished: {stats.parsed} DNS messages, {stats.skipped} records skipped, "
        f"{router.ignored} texts outside scored streams, {tunnels} tunnel windows"
    )
    return EXIT_DETECTED if tunnels else EXIT_OK
