"""
IPv4 range database mapping addresses to (ASN, country).

Range file: TSV with five columns

    range_start<TAB>range_end<TAB>AS_number<TAB>country_code<TAB>AS_description

start and end are inclusive dotted quads. Ranges with AS number 0 or
country "None" mark unrouted space and never locate an address.
"""

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from fluxgate.core.errors import DataError, EmptyQuery, MalformedLine, OverlappingRanges
from fluxgate.core.logging_config import get_logger
from fluxgate.stores.io import PathLike, int_to_ip, ip_to_int, open_text

UNKNOWN_COUNTRY = "None"


@dataclass(frozen=True)
class GeoRange:
    """One inclusive address range and its owner."""

    start: int
    end: int
    asn: int
    country: str
    description: str = ""

    @property
    def locatable(self) -> bool:
        return self.asn != 0 and self.country != UNKNOWN_COUNTRY

    def __str__(self) -> str:
        return f"[{int_to_ip(self.start)}-{int_to_ip(self.end)} AS{self.asn} {self.country}]"


@dataclass(frozen=True)
class GeoSummary:
    """ASN and country spread of the addresses of one response."""

    queried: int
    distinct_asns: int
    distinct_countries: int
    unknown: int


def _parse_range_line(line: str, line_number: int) -> GeoRange:
    columns = line.split("\t")
    if len(columns) < 4:
        raise MalformedLine(line_number, f"expected 5 tab-separated columns, got {len(columns)}")
    try:
        start = ip_to_int(columns[0])
        end = ip_to_int(columns[1])
    except ValueError as exc:
        raise MalformedLine(line_number, f"invalid range bound ({exc})") from exc
    try:
        asn = int(columns[2])
    except ValueError as exc:
        raise MalformedLine(line_number, f"invalid AS number {columns[2]!r}") from exc
    if asn < 0:
        raise MalformedLine(line_number, f"negative AS number {asn}")
    if start > end:
        raise MalformedLine(line_number, "range start is after range end")

    country = columns[3].strip() or UNKNOWN_COUNTRY
    description = columns[4].strip() if len(columns) > 4 else ""
    return GeoRange(start=start, end=end, asn=asn, country=country, description=description)


class GeoStore:
    """
    Sorted, non-overlapping ranges answering point queries by binary search.

    Starts and ends live in numpy arrays; ``np.searchsorted`` finds the last
    range starting at or before an address.
    """

    def __init__(self, ranges: Sequence[GeoRange]):
        self.logger = get_logger(self.__class__.__name__)
        self._ranges: List[GeoRange] = sorted(ranges, key=lambda r: (r.start, r.end))
        for previous, current in zip(self._ranges, self._ranges[1:]):
            if current.start <= previous.end:
                raise OverlappingRanges(previous, current)

        self._starts = np.fromiter((r.start for r in self._ranges), dtype=np.int64, count=len(self._ranges))
        self._ends = np.fromiter((r.end for r in self._ranges), dtype=np.int64, count=len(self._ranges))

    @classmethod
    def from_file(cls, path: PathLike) -> "GeoStore":
        """Load a range TSV file (gzip by extension)."""
        with open_text(path) as handle:
            store = ingest_ranges(handle)
        store.logger.success(f"Loaded {len(store)} ranges from {path}")
        return store

    def __len__(self) -> int:
        return len(self._ranges)

    @property
    def ranges(self) -> Tuple[GeoRange, ...]:
        return tuple(self._ranges)

    def covering_range(self, ip: Union[str, int]) -> Optional[GeoRange]:
        """The range containing ip, if any, locatable or not."""
        key = ip_to_int(ip)
        index = int(np.searchsorted(self._starts, key, side="right")) - 1
        if index < 0 or key > self._ends[index]:
            return None
        return self._ranges[index]

    def locate(self, ip: Union[str, int]) -> Optional[Tuple[int, str]]:
        """(asn, country) of ip, or None when no locatable range covers it."""
        found = self.covering_range(ip)
        if found is None or not found.locatable:
            return None
        return found.asn, found.country

    def summarize(self, ips: Sequence[Union[str, int]]) -> GeoSummary:
        """
        Count distinct ASNs and countries over the located addresses.

        Repeated addresses are counted once; addresses that cannot be located
        only add to ``unknown``.

        Raises:
            EmptyQuery: ips is empty
        """
        if len(ips) == 0:
            raise EmptyQuery("summarize needs at least one address")
        try:
            keys = {ip_to_int(ip) for ip in ips}
        except ValueError as exc:
            raise DataError(f"invalid IPv4 address in query: {exc}") from exc

        asns = set()
        countries = set()
        unknown = 0
        for key in keys:
            located = self.locate(key)
            if located is None:
                unknown += 1
                continue
            asns.add(located[0])
            countries.add(located[1])
        return GeoSummary(
            queried=len(keys),
            distinct_asns=len(asns),
            distinct_countries=len(countries),
            unknown=unknown,
        )

    def __repr__(self) -> str:
        return f"<GeoStore: {len(self._ranges)} ranges>"


def ingest_ranges(source: Iterable[str]) -> GeoStore:
    """
    Build a GeoStore from TSV lines; ranges may arrive in any order.

    Blank lines and lines starting with '#' are ignored.

    Raises:
        MalformedLine: A line does not match the range schema
        OverlappingRanges: Two ranges share an address
    """
    ranges = []
    for line_number, line in enumerate(source, start=1):
        line = line.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        ranges.append(_parse_range_line(line, line_number))
    return GeoStore(ranges)


def locate(store: GeoStore, ip: Union[str, int]) -> Optional[Tuple[int, str]]:
    return store.locate(ip)


def summarize(store: GeoStore, ips: Sequence[Union[str, int]]) -> GeoSummary:
    return store.summarize(ips)
