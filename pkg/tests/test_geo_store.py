"""
Tests for the IP-to-ASN/country range store.
"""

import gzip

import numpy as np
import pytest

from fluxgate.core.errors import EmptyQuery, MalformedLine, OverlappingRanges
from fluxgate.stores import GeoRange, GeoStore, ingest_ranges
from fluxgate.stores.geo_store import locate, summarize
from fluxgate.stores.io import ip_to_int

from .conftest import HEX001_IPS, HEX001_RANGES, UEFA_IPS, UEFA_RANGE


def tsv(*ranges):
    return ["\t".join(str(c) for c in r) for r in ranges]


@pytest.fixture
def store():
    return ingest_ranges(tsv(*HEX001_RANGES, UEFA_RANGE))


class TestIngestRanges:
    """Test building the range store."""

    def test_unsorted_input(self):
        """Test ranges may arrive in any order."""
        store = ingest_ranges(tsv(UEFA_RANGE, *reversed(HEX001_RANGES)))
        starts = [r.start for r in store.ranges]
        assert starts == sorted(starts)
        assert len(store) == 6

    def test_skips_comments_and_blanks(self):
        """Test blank and '#' lines are ignored."""
        store = ingest_ranges(["# start\tend\tasn\tcc\tdesc", "", *tsv(UEFA_RANGE)])
        assert len(store) == 1

    def test_overlap_rejected(self):
        """Test overlapping ranges raise OverlappingRanges."""
        with pytest.raises(OverlappingRanges):
            ingest_ranges(tsv(("10.0.0.0", "10.0.0.255", 1, "DE", "a"), ("10.0.0.128", "10.0.1.0", 2, "FR", "b")))

    def test_shared_endpoint_rejected(self):
        """Test ranges sharing one address overlap."""
        with pytest.raises(OverlappingRanges):
            GeoStore([GeoRange(0, 10, 1, "DE"), GeoRange(10, 20, 2, "FR")])

    def test_adjacent_ranges_allowed(self):
        """Test touching but disjoint ranges are fine."""
        store = GeoStore([GeoRange(0, 10, 1, "DE"), GeoRange(11, 20, 2, "FR")])
        assert store.locate(10) == (1, "DE")
        assert store.locate(11) == (2, "FR")

    @pytest.mark.parametrize(
        "line",
        [
            "10.0.0.0\t10.0.0.255\t1",
            "10.0.0.x\t10.0.0.255\t1\tDE\td",
            "10.0.0.0\t10.0.0.255\tAS1\tDE\td",
            "10.0.1.0\t10.0.0.255\t1\tDE\td",
            "10.0.0.0\t10.0.0.255\t-4\tDE\td",
        ],
    )
    def test_malformed(self, line):
        """Test lines off the schema raise MalformedLine."""
        with pytest.raises(MalformedLine):
            ingest_ranges([line])

    def test_from_file_gzip(self, tmp_path):
        """Test gzip range files are read transparently."""
        path = tmp_path / "ranges.tsv.gz"
        with gzip.open(path, "wt", encoding="utf-8") as f:
            f.write("\n".join(tsv(*HEX001_RANGES)) + "\n")
        assert len(GeoStore.from_file(path)) == 5


class TestLocate:
    """Test point queries."""

    def test_inside_and_bounds(self, store):
        """Test range bounds are inclusive."""
        assert store.locate("10.1.0.0") == (64501, "DE")
        assert store.locate("10.1.0.255") == (64501, "DE")
        assert locate(store, "172.16.5.3") == (20940, "NL")

    def test_gap_and_outside(self, store):
        """Test uncovered addresses are not located."""
        assert store.locate("10.1.1.0") is None
        assert store.locate("0.0.0.0") is None
        assert store.locate("255.255.255.255") is None

    def test_unrouted_space(self):
        """Test AS 0 and country None ranges never locate."""
        store = ingest_ranges(tsv(("1.0.0.0", "1.0.0.255", 0, "None", "Not routed"), ("2.0.0.0", "2.0.0.255", 7, "None", "x")))
        assert store.locate("1.0.0.1") is None
        assert store.locate("2.0.0.1") is None
        assert store.covering_range("1.0.0.1").asn == 0

    def test_matches_linear_scan(self):
        """Test binary search agrees with a linear scan on random queries."""
        rng = np.random.default_rng(3)
        ranges = []
        cursor = 0
        for asn in range(1, 200):
            start = cursor + int(rng.integers(0, 5000))
            end = start + int(rng.integers(0, 5000))
            ranges.append(GeoRange(start, end, asn, "C%d" % (asn % 7)))
            cursor = end + 1
        store = GeoStore(list(reversed(ranges)))
        for key in rng.integers(0, cursor + 10, size=10000):
            key = int(key)
            expected = next(((r.asn, r.country) for r in ranges if r.start <= key <= r.end), None)
            assert store.locate(key) == expected


class TestSummarize:
    """Test ASN and country spread over a response."""

    def test_worked_fastflux(self, store):
        """Test 10 addresses spread over 5 ASNs and 4 countries."""
        summary = store.summarize(HEX001_IPS)
        assert summary.distinct_asns == 5
        assert summary.distinct_countries == 4
        assert summary.unknown == 0

    def test_worked_legit(self, store):
        """Test CDN addresses sit in one AS and one country."""
        summary = summarize(store, UEFA_IPS)
        assert (summary.distinct_asns, summary.distinct_countries) == (1, 1)

    def test_unknown_counted(self, store):
        """Test unlocated addresses only add to unknown."""
        summary = store.summarize(["10.1.0.1", "203.0.113.9", "203.0.113.9"])
        assert summary.queried == 2
        assert summary.unknown == 1
        assert summary.distinct_asns == 1

    def test_empty_query(self, store):
        """Test an empty query raises EmptyQuery."""
        with pytest.raises(EmptyQuery):
            store.summarize([])


def test_ip_to_int():
    """Test address conversion bounds."""
    assert ip_to_int("0.0.0.1") == 1
    assert ip_to_int(5) == 5
    with pytest.raises(ValueError):
        ip_to_int(1 << 32)
