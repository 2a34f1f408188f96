"""
Local read-only databases consulted per DNS response: the scan snapshot and
the IP-to-ASN/country range database.
"""

from fluxgate.stores.censys_store import (
    ScanHostRecord,
    ScanLookupResult,
    ScanStore,
    ingest_snapshot,
)
from fluxgate.stores.geo_store import GeoRange, GeoStore, GeoSummary, ingest_ranges

__all__ = [
    "GeoRange",
    "GeoStore",
    "GeoSummary",
    "ScanHostRecord",
    "ScanLookupResult",
    "ScanStore",
    "ingest_ranges",
    "ingest_snapshot",
]
