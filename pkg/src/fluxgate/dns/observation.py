"""
DnsObservation: one parsed DNS response reduced to what detection needs.
"""

import json
from dataclasses import dataclass, field
from enum import Enum
from ipaddress import IPv4Address
from typing import Iterable, Optional, Tuple

from fluxgate.core.errors import MalformedRecord, NoARecords


class Label(str, Enum):
    """Ground-truth label attached to a record, when known."""

    FASTFLUX = "fastflux"
    LEGITIMATE = "legit"
    UNKNOWN = "unknown"

    @property
    def numeric(self) -> int:
        """-1 for fast-flux, +1 for legitimate."""
        if self is Label.FASTFLUX:
            return -1
        if self is Label.LEGITIMATE:
            return 1
        raise ValueError("unknown label has no numeric class")


def canonical_domain(domain: str) -> str:
    """Lowercase and strip one trailing root dot."""
    name = domain.strip().lower()
    if name.endswith("."):
        name = name[:-1]
    return name


def canonical_ipv4(address: str) -> str:
    """Normalize a dotted-quad string; raises ValueError if it is not IPv4."""
    return str(IPv4Address(address.strip()))


def dedupe_addresses(addresses: Iterable[str]) -> Tuple[str, ...]:
    """Canonicalize and drop repeated addresses, keeping first-seen order."""
    seen = {}
    for address in addresses:
        try:
            ip = canonical_ipv4(address)
        except ValueError as exc:
            raise MalformedRecord(f"invalid IPv4 address {address!r}") from exc
        seen.setdefault(ip, None)
    return tuple(seen)


@dataclass(frozen=True)
class DnsObservation:
    """
    A DNS response for one domain.

    Attributes:
        domain: Query name as received (trailing dot optional)
        ttl: Record TTL in seconds
        a_records: Distinct IPv4 addresses, first-seen order
        label: Optional ground-truth label
    """

    domain: str
    ttl: int
    a_records: Tuple[str, ...]
    label: Optional[Label] = field(default=None)

    def __post_init__(self):
        if not isinstance(self.ttl, int) or isinstance(self.ttl, bool) or self.ttl < 0:
            raise MalformedRecord(f"ttl must be a non-negative integer, got {self.ttl!r}")
        if not canonical_domain(self.domain):
            raise MalformedRecord("domain is empty")
        records = dedupe_addresses(self.a_records)
        if not records:
            raise NoARecords(f"{self.domain}: no A records")
        object.__setattr__(self, "a_records", records)

    @property
    def canonical_domain(self) -> str:
        return canonical_domain(self.domain)

    @property
    def ip_count(self) -> int:
        return len(self.a_records)

    def to_dict(self) -> dict:
        payload = {
            "domain": self.domain,
            "ttl": self.ttl,
            "a_records": list(self.a_records),
        }
        if self.label is not None:
            payload["label"] = self.label.value
        return payload

    def to_json(self) -> str:
        """Serialize as one JSON-lines record."""
        return json.dumps(self.to_dict(), separators=(",", ":"))
