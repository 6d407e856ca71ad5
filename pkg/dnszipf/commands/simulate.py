import argparse
import logging
import sys

from pydantic import ValidationError

from . import EXIT_OK
from ..exceptions import UsageError
from ..schemas.corpus_schemas import Codec, SimulatedTunnelConfig
from ..services.corpus_service import CorpusService
from ..services.pcap_service import PcapWriter
from ..services.tunnel_service import TunnelSimulator

logger = logging.getLogger(__name__)

CODEC_CHOICES = ("base32", "base64", "base64_dns", "hex")


def register(subparsers) -> None:
    parser = subparsers.add_parser("simulate", help="write a capture of tunnel queries carrying a payload")
    parser.add_argument("--codec", required=True, choices=CODEC_CHOICES)
    parser.add_argument("--payload", required=True, help="file whose bytes are tunneled")
    parser.add_argument("--apex", required=True, help="domain the tunnel queries are sent under")
    parser.add_argument("--seed", type=int, default=0, help="drives query ids and source ports")
    parser.add_argument("--out", required=True, help="classic pcap to write")
    parser.add_argument("--session-tag", default="", help="constant prefix of the counter label")
    parser.add_argument("--max-label", type=int, default=63)
    parser.add_argument("--qtype", type=int, default=16)
    parser.set_defaults(handler=run_simulate)

    parser = subparsers.add_parser("randgen", help="write random domain names for a flat baseline")
    parser.add_argument("--count", type=int, required=True)
    parser.add_argument("--length", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--tld", default="com")
    parser.add_argument("--out", required=True, help="domain list to write")
    parser.set_defaults(handler=run_randgen)


def run_simulate(args: argparse.Namespace) -> int:
    try:
        config = SimulatedTunnelConfig(
            codec=Codec.parse(args.codec),
            apex=args.apex,
            session_tag=args.session_tag,
            max_label=args.max_label,
            seed=args.seed,
            qtype=args.qtype,
        )
    except ValidationError as e:
        raise UsageError(f"Invalid tunnel configuration: {e}") from e

    with open(args.payload, "rb") as f:
        payload = f.read()

    queries = TunnelSimulator.simulate_tunnel(config, payload)
    with PcapWriter(args.out) as writer:
        TunnelSimulator.write_queries(config, queries, writer)

    print(f"queries\t{len(queries)}", file=sys.stdout)
    print(f"payload_bytes\t{len(payload)}", file=sys.stdout)
    return EXIT_OK


def run_randgen(args: argparse.Namespace) -> int:
    if args.count < 1 or args.length < 1:
        raise UsageError("--count and --length must be at least 1")
    if args.seed < 0:
        raise UsageError("--seed must be non-negative")
    if not args.tld or "." in args.tld:
        raise UsageError(f"--tld must be a single label, got {args.tld!r}")

    texts = CorpusService.generate_random_domains(args.count, args.length, args.seed)
    CorpusService.write_domain_list(texts, args.out, tld=args.tld)
    logger.info(f"Wrote {len(texts)} random names to {args.out}")
    return EXIT_OK
