"""Line readers for snapshot and range files (gzip by extension)."""

import gzip
from contextlib import contextmanager
from ipaddress import IPv4Address
from pathlib import Path
from typing import Iterator, TextIO, Union

PathLike = Union[str, Path]


@contextmanager
def open_text(path: PathLike) -> Iterator[TextIO]:
    """Open a text file, decompressing transparently when it ends in .gz."""
    path = Path(path)
    if path.suffix == ".gz":
        handle = gzip.open(path, "rt", encoding="utf-8")
    else:
        handle = open(path, "r", encoding="utf-8")
    try:
        yield handle
    finally:
        handle.close()


def ip_to_int(address: Union[str, int]) -> int:
    """Dotted-quad (or already numeric) IPv4 address as a 32-bit integer."""
    if isinstance(address, int) and not isinstance(address, bool):
        if not 0 <= address <= 0xFFFFFFFF:
            raise ValueError(f"address out of IPv4 range: {address}")
        return address
    return int(IPv4Address(address.strip()))


def int_to_ip(value: int) -> str:
    return str(IPv4Address(value))
