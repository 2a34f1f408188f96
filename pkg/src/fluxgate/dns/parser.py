"""
Parsers turning raw DNS responses into DnsObservation values.

Two input formats are supported:

- JSON records, one object per line:
  {"domain": "...", "ttl": 300, "a_records": ["1.2.3.4"], "label": "fastflux"}
- Wire-format DNS response messages (RFC 1035), decoded with dnslib.
"""

from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Literal, Optional, Tuple, Union

from dnslib import CNAME, QTYPE, A, DNSRecord
from pydantic import BaseModel, ConfigDict, StrictInt, StrictStr, ValidationError

from fluxgate.core.errors import MalformedRecord, NoARecords
from fluxgate.core.logging_config import logger
from fluxgate.dns.observation import DnsObservation, Label, canonical_domain

RawRecord = Union[bytes, bytearray, str]


class RecordFormat(str, Enum):
    """Supported record encodings."""

    JSON = "json"
    WIRE = "wire"


class JsonRecord(BaseModel):
    """Schema of one JSON-lines observation."""

    model_config = ConfigDict(extra="ignore")

    domain: StrictStr
    ttl: StrictInt
    a_records: List[StrictStr]
    label: Optional[Literal["fastflux", "legit", "unknown"]] = None


def parse_observation(
    record: RawRecord, fmt: RecordFormat = RecordFormat.JSON
) -> DnsObservation:
    """
    Parse one record into a DnsObservation.

    Args:
        record: Raw record; bytes or text for JSON, bytes (or a hex string) for wire format
        fmt: Encoding of the record

    Returns:
        Observation with de-duplicated A records

    Raises:
        MalformedRecord: Truncated or invalid input
        NoARecords: The response has no A records
    """
    fmt = RecordFormat(fmt)
    if fmt is RecordFormat.JSON:
        return _parse_json(record)
    return _parse_wire(record)


def _parse_json(record: RawRecord) -> DnsObservation:
    if isinstance(record, (bytes, bytearray)):
        try:
            record = bytes(record).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedRecord("record is not valid UTF-8") from exc
    try:
        parsed = JsonRecord.model_validate_json(record)
    except ValidationError as exc:
        raise MalformedRecord(_summarize_validation(exc)) from exc

    return DnsObservation(
        domain=parsed.domain,
        ttl=parsed.ttl,
        a_records=tuple(parsed.a_records),
        label=Label(parsed.label) if parsed.label is not None else None,
    )


def _summarize_validation(exc: ValidationError) -> str:
    first = exc.errors()[0]
    location = ".".join(str(part) for part in first.get("loc", ())) or "record"
    return f"{location}: {first.get('msg', 'invalid')}"


def _label_text(label) -> str:
    parts = getattr(label, "label", ())
    return ".".join(part.decode("utf-8", errors="replace") for part in parts)


def _wire_bytes(record: RawRecord) -> bytes:
    if isinstance(record, str):
        try:
            return bytes.fromhex(record.strip())
        except ValueError as exc:
            raise MalformedRecord("wire record text is not hex") from exc
    return bytes(record)


def _parse_wire(record: RawRecord) -> DnsObservation:
    packet = _wire_bytes(record)
    try:
        message = DNSRecord.parse(packet)
    except Exception as exc:  # dnslib raises a mix of DNSError, struct and index errors
        raise MalformedRecord(f"cannot decode DNS message: {exc}") from exc

    if not message.header.qr:
        raise MalformedRecord("message is a query, not a response")

    a_records: Dict[str, List[Tuple[str, int]]] = {}
    aliases: Dict[str, str] = {}
    for rr in message.rr:
        owner = canonical_domain(_label_text(rr.rname))
        if rr.rtype == QTYPE.A:
            if not isinstance(rr.rdata, A):
                raise MalformedRecord(f"A record for {owner} carries no address")
            a_records.setdefault(owner, []).append((str(rr.rdata), rr.ttl))
        elif rr.rtype == QTYPE.CNAME:
            if not isinstance(rr.rdata, CNAME):
                raise MalformedRecord(f"CNAME record for {owner} carries no target")
            aliases.setdefault(owner, canonical_domain(_label_text(rr.rdata.label)))

    if message.questions:
        domain = _label_text(message.questions[0].qname) + "."
    elif a_records:
        domain = next(iter(a_records)) + "."
    else:
        raise NoARecords("response carries neither a question nor answers")

    answers = _follow_chain(canonical_domain(domain), a_records, aliases)
    if not answers:
        raise NoARecords(f"{domain}: no A records in answer section")

    return DnsObservation(
        domain=domain,
        ttl=min(ttl for _, ttl in answers),
        a_records=tuple(address for address, _ in answers),
    )


def _follow_chain(
    qname: str,
    a_records: Dict[str, List[Tuple[str, int]]],
    aliases: Dict[str, str],
) -> List[Tuple[str, int]]:
    """Collect the A records reachable from qname through CNAMEs.

    Falls back to every A record in the answer section when the chain
    does not reach any (owner names that do not match the question).
    """
    current = qname
    visited = set()
    while current not in visited:
        visited.add(current)
        if current in a_records:
            return a_records[current]
        if current not in aliases:
            break
        current = aliases[current]

    answers = [answer for owner_answers in a_records.values() for answer in owner_answers]
    if answers:
        logger.debug(f"{qname}: CNAME chain unresolved, using all answer A records")
    return answers


def iter_lines(source: Iterable[RawRecord]) -> Iterator[RawRecord]:
    """Strip lines and drop blank ones; bytes lines are left undecoded."""
    for line in source:
        line = line.strip()
        if line:
            yield line


def decode_line(line: RawRecord) -> str:
    """
    Text of one stream line.

    Raises:
        MalformedRecord: The line is not valid UTF-8
    """
    if isinstance(line, str):
        return line
    try:
        return bytes(line).decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedRecord(f"line is not valid UTF-8 (byte {exc.start})") from exc


def iter_records(path: Union[str, Path]) -> Iterator[RawRecord]:
    """
    Yield raw non-blank lines from a file, undecoded.

    Wire-format files hold one hex-encoded message per line.
    """
    with open(path, "rb") as f:
        yield from iter_lines(f)


def load_observations(
    path: Union[str, Path], fmt: RecordFormat = RecordFormat.JSON
) -> List[DnsObservation]:
    """Parse every record in a file; the first bad record aborts the load."""
    observations = []
    for line_number, line in enumerate(iter_records(path), start=1):
        try:
            observations.append(parse_observation(decode_line(line), fmt))
        except (MalformedRecord, NoARecords) as exc:
            raise type(exc)(f"{path}:{line_number}: {exc}") from exc
    logger.info(f"Loaded {len(observations)} observations from {path}")
    return observations
