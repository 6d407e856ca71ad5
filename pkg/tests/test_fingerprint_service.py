import io
import math
from collections import defaultdict

import pytest

from dnszipf.exceptions import (
    EmptyCountsError,
    FingerprintFormatError,
    FingerprintInvariantError,
    FingerprintVersionError,
    InvalidGramSizeError,
    RankOutOfRangeError,
)
from dnszipf.models.fingerprint import NGramCounts
from dnszipf.schemas.corpus_schemas import CorpusMode
from dnszipf.services.corpus_service import CorpusService
from dnszipf.services.fingerprint_service import FingerprintService

from .conftest import FIXTURES, fingerprint_of

TEXT_FIXTURES = [
    ("popular_domains.txt", CorpusMode.DOMAIN),
    ("popular_domains.txt", CorpusMode.SUBDOMAIN),
    ("legit_hostnames.txt", CorpusMode.SUBDOMAIN),
    ("legit_hostnames.txt", CorpusMode.DOMAIN),
    ("random_100_seed7.txt", CorpusMode.DOMAIN),
    ("random_1000_seed11.txt", CorpusMode.DOMAIN),
    ("legit_subdomains.pcap", CorpusMode.SUBDOMAIN),
    ("legit_subdomains.pcap", CorpusMode.NS),
    ("tunnel_base32.pcap", CorpusMode.SUBDOMAIN),
    ("tunnel_base64_dns.pcap", CorpusMode.SUBDOMAIN),
    ("tunnel_hex.pcap", CorpusMode.SUBDOMAIN),
]


def brute_force_tally(texts, n):
    tally = defaultdict(int)
    for text in texts:
        position = 0
        while position + n <= len(text):
            gram = ""
            for offset in range(n):
                gram += text[position + offset]
            tally[gram] += 1
            position += 1
    return dict(tally)


class TestCounting:
    def test_unigrams(self):
        assert FingerprintService.count_ngrams(["abc", "ab"], 1).counts == {"a": 2, "b": 2, "c": 1}

    def test_bigrams_do_not_span_texts(self):
        counts = FingerprintService.count_ngrams(["ab", "cd"], 2).counts
        assert counts == {"ab": 1, "cd": 1}

    def test_short_texts_contribute_nothing(self):
        counts = FingerprintService.count_ngrams(["ab", "a", ""], 3)
        assert counts.total == 0

    @pytest.mark.parametrize("n", [0, 4])
    def test_invalid_gram_size(self, n):
        with pytest.raises(InvalidGramSizeError):
            FingerprintService.count_ngrams(["abc"], n)

    @pytest.mark.parametrize("source, mode", TEXT_FIXTURES)
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_matches_brute_force_on_fixtures(self, source, mode, n):
        texts, _ = CorpusService.load_texts(FIXTURES / source, mode)
        expected = brute_force_tally(texts, n)
        assert FingerprintService.count_ngrams(texts, n).counts == expected
        assert FingerprintService.count_ngrams_sharded(texts, n, workers=1, shard_size=37).counts == expected

    @pytest.mark.slow
    def test_process_pool_matches_serial(self, domain_texts):
        serial = FingerprintService.count_ngrams(domain_texts, 2)
        sharded = FingerprintService.count_ngrams_sharded(domain_texts, 2, workers=2, shard_size=200)
        assert sharded == serial


class TestMerge:
    a = NGramCounts(n=1, counts={"a": 2, "b": 1})
    b = NGramCounts(n=1, counts={"b": 4, "c": 1})
    c = NGramCounts(n=1, counts={"a": 1, "z": 7})

    def test_commutative(self):
        assert FingerprintService.merge(self.a, self.b) == FingerprintService.merge(self.b, self.a)

    def test_associative(self):
        left = FingerprintService.merge(FingerprintService.merge(self.a, self.b), self.c)
        right = FingerprintService.merge(self.a, FingerprintService.merge(self.b, self.c))
        assert left == right

    def test_identity(self):
        assert FingerprintService.merge(self.a, NGramCounts(n=1)) == self.a

    def test_values(self):
        assert FingerprintService.merge(self.a, self.b).counts == {"a": 2, "b": 5, "c": 1}

    def test_gram_size_mismatch(self):
        with pytest.raises(InvalidGramSizeError):
            FingerprintService.merge(self.a, NGramCounts(n=2))


class TestBuild:
    def test_order_and_ties(self):
        fp = fingerprint_of({"b": 2, "a": 2, "c": 5})
        assert fp.grams == ("c", "a", "b")
        assert fp.frequencies == (5 / 9, 2 / 9, 2 / 9)
        assert fp.sample_total == 9
        assert fp.pool_size == 3

    def test_frequencies_sum_to_one(self, domain_texts):
        fp = FingerprintService.build(FingerprintService.count_ngrams(domain_texts, 2))
        assert math.isclose(sum(fp.frequencies), 1.0, abs_tol=1e-9)

    def test_scale_invariance(self):
        counts = {"a": 5, "b": 3, "c": 3, "d": 1}
        fp = fingerprint_of(counts)
        scaled = fingerprint_of({gram: count * 7 for gram, count in counts.items()})
        assert scaled.grams == fp.grams
        assert scaled.frequencies == fp.frequencies

    def test_empty(self):
        with pytest.raises(EmptyCountsError):
            FingerprintService.build(NGramCounts(n=1))


class TestMetrics:
    def test_top_gap_published_domain_table(self, published):
        assert FingerprintService.top_gap(published("domain"), 1, 10) == pytest.approx(0.06278, abs=1e-5)

    def test_top_gap_published_small_random_table(self, published):
        assert FingerprintService.top_gap(published("random_100"), 1, 10) == pytest.approx(0.0090, abs=1e-4)

    def test_top_gap_published_large_random_table(self, published):
        assert FingerprintService.top_gap(published("random_1m"), 1, 10) <= 0.0002

    def test_top_gap_uniform_is_zero(self):
        fp = fingerprint_of({gram: 4 for gram in "abcdefghij"})
        assert FingerprintService.top_gap(fp, 1, 10) == 0.0

    def test_top_gap_bad_ranks(self, published):
        with pytest.raises(RankOutOfRangeError):
            FingerprintService.top_gap(published("domain"), 5, 5)
        with pytest.raises(RankOutOfRangeError):
            FingerprintService.top_gap(fingerprint_of({"a": 1, "b": 1}), 1, 3)

    def test_mean_rank_delta_published_domain_table(self, published):
        expected = (0.10139 - 0.02689) / 13
        assert FingerprintService.mean_rank_delta(published("domain"), 14) == pytest.approx(expected, abs=1e-9)

    def test_mean_rank_delta_from_start_rank(self):
        fp = fingerprint_of({"a": 50, "b": 20, "c": 10, "d": 10, "e": 10})
        assert FingerprintService.mean_rank_delta(fp, 5, start_rank=2) == pytest.approx(0.1 / 3)

    def test_zipf_exact_power_law(self):
        fp = fingerprint_of({gram: 2520 // rank for rank, gram in enumerate("abcdefghij", start=1)})
        assert FingerprintService.zipf_exponent(fp, 10) == pytest.approx(1.0, abs=1e-9)

    def test_zipf_uniform(self):
        fp = fingerprint_of({gram: 3 for gram in "abcdefghijklmn"})
        assert FingerprintService.zipf_exponent(fp, 14) == pytest.approx(0.0, abs=1e-9)

    def test_zipf_k_beyond_pool(self):
        with pytest.raises(RankOutOfRangeError):
            FingerprintService.zipf_exponent(fingerprint_of({"a": 2, "b": 1}), 3)

    def test_zipf_legit_domains(self, domain_texts):
        fp = FingerprintService.build(FingerprintService.count_ngrams(domain_texts, 1))
        assert 0.5 < FingerprintService.zipf_exponent(fp, 14) < 1.5

    def test_zipf_random_domains(self):
        texts, _ = CorpusService.load_texts(FIXTURES / "random_1000_seed11.txt", CorpusMode.DOMAIN)
        fp = FingerprintService.build(FingerprintService.count_ngrams(texts, 1))
        assert -0.1 < FingerprintService.zipf_exponent(fp, 14) < 0.2

    @pytest.mark.slow
    def test_zipf_million_random_labels(self, million_random_fingerprint):
        assert -0.05 < FingerprintService.zipf_exponent(million_random_fingerprint, 14) < 0.1

    def test_decay_metrics(self, published):
        metrics = FingerprintService.decay_metrics(published("domain"))
        assert metrics.k == 14
        assert metrics.top_gap == pytest.approx(0.10139 - 0.02689)
        assert metrics.mean_rank_delta == pytest.approx((0.10139 - 0.02689) / 13)

    def test_decay_metrics_clamps_k(self):
        metrics = FingerprintService.decay_metrics(fingerprint_of({"a": 3, "b": 2, "c": 1}), 14)
        assert metrics.k == 3
        with pytest.raises(RankOutOfRangeError):
            FingerprintService.decay_metrics(fingerprint_of({"a": 3}))

    def test_pool_normalized(self):
        fp = fingerprint_of({"a": 3, "b": 1})
        assert FingerprintService.pool_normalized(fp) == [("a", 0.75, 1.5), ("b", 0.25, 0.5)]
        assert FingerprintService.pool_normalized(fp, 1) == [("a", 0.75, 1.5)]


class TestRankCorrelation:
    ranked = {gram: 20 - rank for rank, gram in enumerate("abcdefghijklmn")}

    def test_identical(self):
        fp = fingerprint_of(self.ranked)
        assert FingerprintService.rank_correlation(fp, fp, 14) == pytest.approx(1.0)

    def test_reversed(self):
        reversed_counts = {gram: 7 + rank for rank, gram in enumerate("abcdefghijklmn")}
        assert FingerprintService.rank_correlation(
            fingerprint_of(self.ranked), fingerprint_of(reversed_counts), 14
        ) == pytest.approx(-1.0)

    def test_missing_grams_take_rank_k_plus_one(self):
        a = fingerprint_of({"x": 3, "y": 2, "z": 1})
        b = fingerprint_of({"y": 3, "x": 2, "w": 1})
        assert FingerprintService.rank_correlation(a, b, 3) == pytest.approx(0.6)

    def test_symmetric(self, published):
        english, domain = published("english"), published("domain")
        assert FingerprintService.rank_correlation(english, domain, 14) == pytest.approx(
            FingerprintService.rank_correlation(domain, english, 14)
        )

    def test_english_closer_to_domains_than_random(self, published):
        domain = published("domain")
        english = FingerprintService.rank_correlation(published("english"), domain, 14)
        random = FingerprintService.rank_correlation(published("random_1m"), domain, 14)
        assert english > random

    def test_gram_size_mismatch(self):
        with pytest.raises(InvalidGramSizeError):
            FingerprintService.rank_correlation(fingerprint_of({"a": 1, "b": 1}), fingerprint_of({"ab": 1}, n=2), 2)

    def test_small_sample_stability(self, domain_texts):
        full = FingerprintService.build(FingerprintService.count_ngrams(domain_texts, 1))
        sample = FingerprintService.build(FingerprintService.count_ngrams(domain_texts[:100], 1))

        assert FingerprintService.rank_correlation(sample, full, 14) >= 0.7
        ratio = FingerprintService.mean_rank_delta(sample, 14) / FingerprintService.mean_rank_delta(full, 14)
        assert 1 / 1.5 <= ratio <= 1.5


class TestFingerprintFiles:
    def test_round_trip(self, tmp_path, domain_texts):
        for n in (1, 2, 3):
            fp = FingerprintService.build(FingerprintService.count_ngrams(domain_texts, n))
            path = tmp_path / f"fp{n}.fp"
            FingerprintService.save_fingerprint(fp, path)
            assert FingerprintService.load_fingerprint(path) == fp

    def test_stream_round_trip(self):
        fp = fingerprint_of({"-": 3, ".": 3, "a": 1})
        buffer = io.StringIO()
        FingerprintService.save_fingerprint(fp, buffer)
        assert buffer.getvalue() == "dnszipf-fingerprint v1\nn=1 total=7\n-\t3\n.\t3\na\t1\n"
        buffer.seek(0)
        assert FingerprintService.load_fingerprint(buffer) == fp

    def test_published_table_loads(self, published):
        fp = published("domain")
        assert fp.entries[0].gram == "e"
        assert fp.frequency(1) == pytest.approx(0.10139)

    @pytest.mark.parametrize(
        "body, error",
        [
            ("dnszipf-fingerprint v1\nn=1 total=200\na\t60\nb\t40\n", FingerprintInvariantError),
            ("dnszipf-fingerprint v1\nn=1 total=100\na\t40\nb\t60\n", FingerprintInvariantError),
            ("dnszipf-fingerprint v1\nn=2 total=1\na\t1\n", FingerprintInvariantError),
            ("dnszipf-fingerprint v1\nn=1 total=1\nA\t1\n", FingerprintInvariantError),
            ("dnszipf-fingerprint v1\nn=1 total=0\n", FingerprintInvariantError),
            ("dnszipf-fingerprint v2\nn=1 total=1\na\t1\n", FingerprintVersionError),
            ("zipf-table v1\nn=1 total=1\na\t1\n", FingerprintFormatError),
            ("dnszipf-fingerprint v1\nn=4 total=1\na\t1\n", FingerprintFormatError),
            ("dnszipf-fingerprint v1\nn=1 total=1\na 1\n", FingerprintFormatError),
            ("dnszipf-fingerprint v1\nn=1 total=1\na\t0.5\n", FingerprintFormatError),
            ("dnszipf-fingerprint v1\n", FingerprintFormatError),
            ("dnszipf-fingerprint v1\nn=1 total=\u00b2\na\t1\n", FingerprintFormatError),
            ("dnszipf-fingerprint v1\nn=\u00b9 total=1\na\t1\n", FingerprintFormatError),
        ],
    )
    def test_malformed_files(self, body, error):
        with pytest.raises(error):
            FingerprintService.load_fingerprint(io.StringIO(body))

    def test_missing_file(self, tmp_path):
        with pytest.raises(FingerprintFormatError):
            FingerprintService.load_fingerprint(tmp_path / "absent.fp")
