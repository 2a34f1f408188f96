"""
Table of domains already known to be fast-flux.

A listed domain is flagged without consulting the model. Entries come from
a text file (one domain per line, ``#`` starts a comment, ``.gz`` accepted)
and, when the detector is told to remember them, from its own fast-flux
verdicts. Missed detections found later can be appended to the file.
"""

import threading
from pathlib import Path
from typing import Iterable, Iterator, Optional, Union

from fluxgate.core.logging_config import get_logger
from fluxgate.dns.observation import canonical_domain
from fluxgate.stores.io import open_text

logger = get_logger("known_domains")


class KnownDomains:
    """Thread-safe set of canonical domain names."""

    def __init__(self, domains: Optional[Iterable[str]] = None):
        self._lock = threading.Lock()
        self._domains = {canonical_domain(d) for d in domains or () if canonical_domain(d)}

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "KnownDomains":
        with open_text(path) as f:
            table = cls(_domain_lines(f))
        logger.success(f"Loaded {len(table)} known fast-flux domains from {path}")
        return table

    def add(self, domain: str) -> bool:
        """Insert a domain; False if it was already listed."""
        name = canonical_domain(domain)
        if not name:
            return False
        with self._lock:
            if name in self._domains:
                return False
            self._domains.add(name)
        return True

    def save(self, path: Union[str, Path]) -> int:
        """Write the table, sorted, one domain per line."""
        with self._lock:
            names = sorted(self._domains)
        Path(path).write_text("".join(f"{name}\n" for name in names), encoding="utf-8")
        return len(names)

    def __contains__(self, domain: str) -> bool:
        return canonical_domain(domain) in self._domains

    def __len__(self) -> int:
        return len(self._domains)

    def __repr__(self) -> str:
        return f"<KnownDomains: {len(self)} domains>"


def _domain_lines(lines: Iterable[str]) -> Iterator[str]:
    for line in lines:
        name = line.split("#", 1)[0].strip()
        if name:
            yield name
