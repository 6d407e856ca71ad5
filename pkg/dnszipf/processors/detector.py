import logging
import math
from typing import Dict, Iterable, List, Optional, Tuple

from ..exceptions import EmptyWindowError, FingerprintError
from ..models.fingerprint import DecayMetrics, Fingerprint
from ..schemas.detector_schemas import DetectorConfig, DetectorThresholds, Evidence, TunnelScore, Verdict
from ..services.extraction_service import DomainContext
from ..services.fingerprint_service import FingerprintService

logger = logging.getLogger(__name__)

MAIN_STREAM = "main"
NS_STREAM = "ns"

FLAT_TOP_GAP = "flat_top_gap"
FLAT_ZIPF = "flat_zipf"
LOW_RANK_CORR = "low_rank_corr"
INSUFFICIENT_EVIDENCE = "insufficient_evidence"


def classify(
    top_gap: float,
    zipf_exponent: float,
    rank_corr: float,
    thresholds: DetectorThresholds,
    evidence: Evidence = Evidence.FULL,
) -> Tuple[Verdict, Tuple[str, ...]]:
    """
    Verdict from window metrics alone.
    tunnel: both flatness conditions; suspicious: any single condition
    or too little evidence; legitimate otherwise.
    """
    if evidence == Evidence.INSUFFICIENT:
        return Verdict.SUSPICIOUS, (INSUFFICIENT_EVIDENCE,)

    reasons = []
    if top_gap < thresholds.max_top_gap_flat:
        reasons.append(FLAT_TOP_GAP)
    if zipf_exponent < thresholds.max_zipf_flat:
        reasons.append(FLAT_ZIPF)
    if rank_corr < thresholds.min_rank_corr:
        reasons.append(LOW_RANK_CORR)

    if FLAT_TOP_GAP in reasons and FLAT_ZIPF in reasons:
        return Verdict.TUNNEL, tuple(reasons)
    if reasons:
        return Verdict.SUSPICIOUS, tuple(reasons)
    return Verdict.LEGITIMATE, ()


def score_window(
    texts: Iterable[str],
    config: DetectorConfig,
    window_id: int = 1,
    stream: str = MAIN_STREAM,
    reference: Optional[Fingerprint] = None,
) -> TunnelScore:
    """Score one window of subdomain texts against the reference fingerprint"""
    texts = list(texts)
    if not texts:
        raise EmptyWindowError("Cannot score an empty window")
    reference = reference or config.reference

    counts = FingerprintService.count_ngrams(texts, 1)
    n_chars = counts.total
    nan = float("nan")

    if n_chars < config.k_ranks or counts.distinct < 2:
        verdict, reasons = classify(nan, nan, nan, config.thresholds, Evidence.INSUFFICIENT)
        logger.debug(f"Window {stream}:{window_id} has {n_chars} characters, below k={config.k_ranks}")
        return TunnelScore(
            window_id=window_id,
            stream=stream,
            top_gap_after_exclusion=nan,
            mean_rank_delta=nan,
            zipf_exponent=nan,
            rank_corr_vs_reference=nan,
            n_texts=len(texts),
            n_chars=n_chars,
            k_used=min(config.k_ranks, counts.distinct),
            exclude_used=0,
            evidence=Evidence.INSUFFICIENT,
            reasons=reasons,
            verdict=verdict,
        )

    fp = FingerprintService.build(counts)
    k_used = min(config.k_ranks, fp.pool_size)
    evidence = Evidence.FULL if k_used == config.k_ranks else Evidence.LOW
    exclude = min(config.exclude_top, k_used - 2)
    start = exclude + 1

    top_gap = FingerprintService.top_gap(fp, start, k_used)
    mean_rank_delta = FingerprintService.mean_rank_delta(fp, k_used, start_rank=start)
    zipf_exponent = FingerprintService.zipf_exponent(fp, k_used, start_rank=start)
    rank_corr = FingerprintService.rank_correlation(fp, reference, config.k_ranks)
    verdict, reasons = classify(top_gap, zipf_exponent, rank_corr, config.thresholds, evidence)

    return TunnelScore(
        window_id=window_id,
        stream=stream,
        top_gap_after_exclusion=top_gap,
        mean_rank_delta=mean_rank_delta,
        zipf_exponent=zipf_exponent,
        rank_corr_vs_reference=rank_corr,
        n_texts=len(texts),
        n_chars=n_chars,
        k_used=k_used,
        exclude_used=exclude,
        evidence=evidence,
        reasons=reasons,
        verdict=verdict,
        ngram_metrics=_higher_order_metrics(texts, config.k_ranks),
    )


def _higher_order_metrics(texts: List[str], k: int) -> Dict[int, DecayMetrics]:
    """Bigram and trigram decay, reported alongside but never part of the verdict"""
    metrics = {}
    for n in (2, 3):
        try:
            fp = FingerprintService.build(FingerprintService.count_ngrams(texts, n))
            metrics[n] = FingerprintService.decay_metrics(fp, k)
        except FingerprintError:
            continue
    return metrics


class TunnelDetector:
    """Tumbling-window state for one stream of subdomain texts"""

    def __init__(self, config: DetectorConfig, stream: str = MAIN_STREAM, reference: Optional[Fingerprint] = None):
        self.config = config
        self.stream = stream
        self.reference = reference or config.reference
        self.pending: List[str] = []
        self.window_id = 1

    def push_query(self, text: str) -> Optional[TunnelScore]:
        """Add one text; returns a score when it completes a window"""
        self.pending.append(text)
        if len(self.pending) < self.config.window_size:
            return None
        return self._close_window()

    def flush(self) -> Optional[TunnelScore]:
        """Score whatever partial window remains"""
        if not self.pending:
            return None
        return self._close_window()

    def _close_window(self) -> TunnelScore:
        score = score_window(self.pending, self.config, self.window_id, self.stream, self.reference)
        logger.info(
            f"Window {score.label}: {score.verdict.value} "
            f"(gap={score.top_gap_after_exclusion:.4f}, zipf={score.zipf_exponent:.3f}, "
            f"corr={score.rank_corr_vs_reference:.3f})"
        )
        self.pending = []
        self.window_id += 1
        return score


class StreamRouter:
    """
    Sends question and answer-host texts to the main detector, and
    name-server host texts to a second detector when an NS reference exists.
    """

    ROUTES = {
        DomainContext.QUESTION: MAIN_STREAM,
        DomainContext.ANSWER_HOST: MAIN_STREAM,
        DomainContext.NS_HOST: NS_STREAM,
    }

    def __init__(self, config: DetectorConfig):
        self.detectors: Dict[str, TunnelDetector] = {MAIN_STREAM: TunnelDetector(config)}
        if config.ns_reference is not None:
            self.detectors[NS_STREAM] = TunnelDetector(config, NS_STREAM, config.ns_reference)
        self.ignored = 0

    def route(self, text: str, context: DomainContext) -> Optional[TunnelScore]:
        if not text:
            return None
        detector = self.detectors.get(self.ROUTES.get(context))
        if detector is None:
            self.ignored += 1
            return None
        return detector.push_query(text)

    def flush(self) -> List[TunnelScore]:
        scores = [detector.flush() for detector in self.detectors.values()]
        return [score for score in scores if score is not None]


def _fmt(value: float) -> str:
    return "nan" if math.isnan(value) else f"{value:.6f}"


def format_line(score: TunnelScore) -> str:
    """window_id, verdict, top_gap, mean_rank_delta, zipf_exp, rank_corr, n_texts; tab-separated"""
    return "\t".join(
        [
            score.label,
            score.verdict.value,
            _fmt(score.top_gap_after_exclusion),
            _fmt(score.mean_rank_delta),
            _fmt(score.zipf_exponent),
            _fmt(score.rank_corr_vs_reference),
            str(score.n_texts),
        ]
    )


def explain(score: TunnelScore, config: DetectorConfig) -> str:
    """Human-readable account of which thresholds a window crossed"""
    th = config.thresholds
    lines = [
        f"window {score.label}: verdict={score.verdict.value} evidence={score.evidence.value} "
        f"n_texts={score.n_texts} n_chars={score.n_chars}"
    ]
    if score.evidence == Evidence.INSUFFICIENT:
        lines.append(f"  only {score.n_chars} characters; at least {config.k_ranks} needed to rank")
        return "\n".join(lines)

    lines.append(f"  ranks {score.exclude_used + 1}..{score.k_used} (top {score.exclude_used} excluded)")
    if score.evidence == Evidence.LOW:
        lines.append(f"  low evidence: only {score.k_used} distinct characters, k={config.k_ranks} requested")

    checks = [
        (FLAT_TOP_GAP, "top_gap_after_exclusion", score.top_gap_after_exclusion, "<", "max_top_gap_flat", th.max_top_gap_flat),
        (FLAT_ZIPF, "zipf_exponent", score.zipf_exponent, "<", "max_zipf_flat", th.max_zipf_flat),
        (LOW_RANK_CORR, "rank_corr_vs_reference", score.rank_corr_vs_reference, "<", "min_rank_corr", th.min_rank_corr),
    ]
    for reason, metric, value, op, threshold_name, threshold in checks:
        mark = "FIRED" if reason in score.reasons else "ok"
        lines.append(f"  {metric} = {_fmt(value)} {op} {threshold_name} {_fmt(threshold)}: {mark}")
    lines.append(f"  mean_rank_delta = {_fmt(score.mean_rank_delta)}")
    for n, metrics in sorted(score.ngram_metrics.items()):
        lines.append(
            f"  {n}-gram: top_gap={_fmt(metrics.top_gap)} zipf_exponent={_fmt(metrics.zipf_exponent)} k={metrics.k}"
        )
    lines.append(f"  conditions fired: {', '.join(score.reasons) if score.reasons else 'none'}")
    return "\n".join(lines)
