"""
Local snapshot of internet-wide scan results.

The snapshot answers two questions about the addresses of one DNS response:
how many of them the scanner saw (IP ratio) and how many distinct open ports
those hosts expose (Ports).

Snapshot file: JSON lines, {"ip": "a.b.c.d", "ports": [int, ...]}; gzip
accepted by extension.
"""

import json
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Iterator, Optional, Sequence, Union

from fluxgate.core.errors import DataError, EmptyQuery, MalformedLine
from fluxgate.core.logging_config import get_logger
from fluxgate.stores.io import PathLike, int_to_ip, ip_to_int, open_text

MIN_PORT = 1
MAX_PORT = 65535


@dataclass(frozen=True)
class ScanHostRecord:
    """One scanned host and its open ports."""

    ip: str
    open_ports: FrozenSet[int]


@dataclass(frozen=True)
class ScanLookupResult:
    """Snapshot answer for the addresses of one response."""

    queried: int
    found: int
    distinct_ports: int

    @property
    def ip_ratio(self) -> float:
        return self.found / self.queried if self.queried else 0.0


def _parse_snapshot_line(line: str, line_number: int) -> ScanHostRecord:
    try:
        payload = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedLine(line_number, f"invalid JSON ({exc.msg})") from exc
    if not isinstance(payload, dict):
        raise MalformedLine(line_number, "expected a JSON object")

    ip = payload.get("ip")
    ports = payload.get("ports", [])
    if not isinstance(ip, str):
        raise MalformedLine(line_number, "missing ip")
    try:
        ip = int_to_ip(ip_to_int(ip))
    except ValueError as exc:
        raise MalformedLine(line_number, f"invalid IPv4 address {ip!r}") from exc
    if not isinstance(ports, list):
        raise MalformedLine(line_number, "ports must be a list")
    for port in ports:
        if isinstance(port, bool) or not isinstance(port, int) or not MIN_PORT <= port <= MAX_PORT:
            raise MalformedLine(line_number, f"invalid port {port!r}")
    return ScanHostRecord(ip=ip, open_ports=frozenset(ports))


class ScanStore:
    """
    Immutable, read-only view of a scan snapshot keyed by IPv4 address.

    Build it with ``ingest_snapshot`` or ``ScanStore.from_file``; lookups
    need no synchronization.
    """

    def __init__(self, hosts: Dict[int, FrozenSet[int]], skipped_lines: int = 0):
        self._hosts = hosts
        self.skipped_lines = skipped_lines

    @classmethod
    def from_file(cls, path: PathLike, strict: bool = False) -> "ScanStore":
        """Load a snapshot file (gzip by extension)."""
        with open_text(path) as handle:
            store = ingest_snapshot(handle, strict=strict)
        get_logger(cls.__name__).success(f"Loaded {len(store)} scanned hosts from {path}")
        return store

    def __len__(self) -> int:
        return len(self._hosts)

    def __contains__(self, ip: Union[str, int]) -> bool:
        try:
            return ip_to_int(ip) in self._hosts
        except ValueError:
            return False

    def get(self, ip: Union[str, int]) -> Optional[ScanHostRecord]:
        key = ip_to_int(ip)
        ports = self._hosts.get(key)
        if ports is None:
            return None
        return ScanHostRecord(ip=int_to_ip(key), open_ports=ports)

    def hosts(self) -> Iterator[ScanHostRecord]:
        """Iterate hosts in ascending address order."""
        for key in sorted(self._hosts):
            yield ScanHostRecord(ip=int_to_ip(key), open_ports=self._hosts[key])

    def lookup(self, ips: Sequence[Union[str, int]]) -> ScanLookupResult:
        """
        Count how many of the given addresses were scanned and their distinct open ports.

        Repeated addresses are counted once.

        Raises:
            EmptyQuery: ips is empty
        """
        if len(ips) == 0:
            raise EmptyQuery("lookup needs at least one address")
        try:
            keys = {ip_to_int(ip) for ip in ips}
        except ValueError as exc:
            raise DataError(f"invalid IPv4 address in query: {exc}") from exc

        found = 0
        ports = set()
        for key in keys:
            host_ports = self._hosts.get(key)
            if host_ports is not None:
                found += 1
                ports.update(host_ports)
        return ScanLookupResult(queried=len(keys), found=found, distinct_ports=len(ports))

    def __repr__(self) -> str:
        return f"<ScanStore: {len(self._hosts)} hosts>"


def ingest_snapshot(source: Iterable[str], strict: bool = False) -> ScanStore:
    """
    Build a ScanStore from snapshot lines.

    Lines naming the same address merge their port sets. Blank lines are
    ignored.

    Args:
        source: Iterable of JSON-lines text
        strict: Abort on the first malformed line instead of skipping it

    Returns:
        The populated store

    Raises:
        MalformedLine: A line is malformed and ``strict`` is set
    """
    log = get_logger("ScanStore")
    hosts: Dict[int, set] = {}
    skipped = 0
    for line_number, line in enumerate(source, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            record = _parse_snapshot_line(line, line_number)
        except MalformedLine as exc:
            if strict:
                raise
            skipped += 1
            log.debug(f"Skipping {exc}")
            continue
        hosts.setdefault(ip_to_int(record.ip), set()).update(record.open_ports)

    if skipped:
        log.warning(f"Skipped {skipped} malformed snapshot lines")
    log.info(f"Ingested {len(hosts)} hosts")
    return ScanStore({key: frozenset(ports) for key, ports in hosts.items()}, skipped_lines=skipped)


def lookup(store: ScanStore, ips: Sequence[Union[str, int]]) -> ScanLookupResult:
    """Functional alias of ``ScanStore.lookup``."""
    return store.lookup(ips)
