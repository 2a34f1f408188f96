"""
Synthetic labeled corpus with matching scan snapshot and geo range files.

Each autonomous system owns one /16 block, starting at 1.0.0.0, and sits in
one country. A record picks its countries, then ASes inside them, then
addresses inside those ASes, so every generated address is covered by the
emitted range file. Fast-flux records spread over many ASes and countries,
use low TTLs, are only partly present in the snapshot and expose scattered
ports; legitimate records sit in one or two ASes, use high TTLs, are almost
always scanned, and share one port set across hosts.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from fluxgate.core.errors import InvalidDistribution
from fluxgate.core.logging_config import get_logger
from fluxgate.dns.observation import DnsObservation, Label
from fluxgate.stores.io import int_to_ip

logger = get_logger("synth")

DEFAULT_CONFIG_PATH = Path(__file__).parent.parent / "data" / "synth_default.json"

COUNTRIES = (
    "US", "DE", "NL", "FR", "GB", "RU", "UA", "CN", "JP", "KR", "IN", "BR", "AR", "MX", "CA",
    "AU", "IT", "ES", "PL", "RO", "TR", "IR", "VN", "TH", "ID", "MY", "ZA", "EG", "NG", "SE",
)
FIRST_BLOCK = 1 << 24
BLOCK_SIZE = 1 << 16
FIRST_ASN = 1000
ALPHABET = np.array(list("abcdefghijklmnopqrstuvwxyz0123456789"))

IntRange = Tuple[int, int]


class ClassDistribution(BaseModel):
    """Generator parameters for one class."""

    model_config = ConfigDict(extra="forbid")

    count: int = Field(ge=1)
    ip_count: IntRange
    asn_count: IntRange
    country_count: IntRange
    ttl_choices: List[int] = Field(min_length=1)
    presence: float = Field(ge=0.0, le=1.0)
    ports_mode: Literal["shared", "scattered"]
    port_sets: List[List[int]] = Field(default_factory=list)
    port_pool: List[int] = Field(default_factory=list)
    ports_per_host: IntRange = (1, 1)
    tlds: List[str] = Field(min_length=1)
    name_length: IntRange = (6, 12)

    @model_validator(mode="after")
    def _check(self) -> "ClassDistribution":
        for name in ("ip_count", "asn_count", "country_count", "ports_per_host", "name_length"):
            low, high = getattr(self, name)
            if low < 1 or low > high:
                raise ValueError(f"{name} must satisfy 1 <= min <= max, got ({low}, {high})")
        if any(ttl < 0 for ttl in self.ttl_choices):
            raise ValueError("ttl_choices must be non-negative")
        ports = [p for s in self.port_sets for p in s] + list(self.port_pool)
        if any(not 1 <= p <= 65535 for p in ports):
            raise ValueError("ports must lie in [1, 65535]")
        if self.ports_mode == "shared" and not (self.port_sets and all(self.port_sets)):
            raise ValueError("shared ports need non-empty port_sets")
        if self.ports_mode == "scattered" and len(set(self.port_pool)) < self.ports_per_host[1]:
            raise ValueError("port_pool is smaller than ports_per_host max")
        return self


class SynthConfig(BaseModel):
    """Corpus size, class distributions and seed."""

    model_config = ConfigDict(extra="forbid")

    seed: int = 0
    fastflux: ClassDistribution
    legit: ClassDistribution
    ases_per_country: int = Field(default=12, ge=1)
    mimic_rate: float = Field(default=0.003, ge=0.0, le=1.0)
    unknown_rate: float = Field(default=0.0, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _check(self) -> "SynthConfig":
        for dist in (self.fastflux, self.legit):
            if dist.country_count[0] > len(COUNTRIES):
                raise ValueError(f"at most {len(COUNTRIES)} countries available")
            if dist.asn_count[0] > len(COUNTRIES) * self.ases_per_country:
                raise ValueError("asn_count exceeds the AS pool")
        return self

    @classmethod
    def from_json(cls, text: Union[str, bytes]) -> "SynthConfig":
        """
        Raises:
            InvalidDistribution: The configuration does not validate
        """
        try:
            return cls.model_validate_json(text)
        except ValidationError as exc:
            raise InvalidDistribution(str(exc)) from exc

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "SynthConfig":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))

    @classmethod
    def default(cls) -> "SynthConfig":
        return cls.from_file(DEFAULT_CONFIG_PATH)

    def with_overrides(self, **overrides) -> "SynthConfig":
        """Copy with top-level or per-class fields replaced, then revalidated.

        Keys ``n_fastflux`` and ``n_legit`` set the class counts.
        """
        payload = self.model_dump()
        for key, value in overrides.items():
            if value is None:
                continue
            if key == "n_fastflux":
                payload["fastflux"]["count"] = value
            elif key == "n_legit":
                payload["legit"]["count"] = value
            else:
                payload[key] = value
        try:
            return SynthConfig.model_validate(payload)
        except ValidationError as exc:
            raise InvalidDistribution(str(exc)) from exc


@dataclass
class SynthCorpus:
    """Generated observations plus the store contents that explain them."""

    observations: List[DnsObservation]
    hosts: Dict[int, Tuple[int, ...]]
    ranges: List[Tuple[int, int, int, str, str]] = field(default_factory=list)

    def observation_lines(self) -> List[str]:
        return [obs.to_json() for obs in self.observations]

    def snapshot_lines(self) -> List[str]:
        return [
            json.dumps({"ip": int_to_ip(ip), "ports": list(ports)}, separators=(",", ":"))
            for ip, ports in sorted(self.hosts.items())
        ]

    def range_lines(self) -> List[str]:
        return [
            f"{int_to_ip(start)}\t{int_to_ip(end)}\t{asn}\t{country}\t{description}"
            for start, end, asn, country, description in self.ranges
        ]

    def write(self, out_dir: Union[str, Path]) -> Dict[str, Path]:
        """Write observations.jsonl, censys.jsonl and geo.tsv into out_dir."""
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        paths = {
            "observations": out_dir / "observations.jsonl",
            "censys": out_dir / "censys.jsonl",
            "geo": out_dir / "geo.tsv",
        }
        for key, lines in (
            ("observations", self.observation_lines()),
            ("censys", self.snapshot_lines()),
            ("geo", self.range_lines()),
        ):
            paths[key].write_text("".join(line + "\n" for line in lines), encoding="utf-8")
        logger.success(f"Wrote {len(self.observations)} observations to {out_dir}")
        return paths


class _Generator:
    def __init__(self, cfg: SynthConfig):
        self.cfg = cfg
        self.rng = np.random.default_rng(cfg.seed)
        self.n_ases = len(COUNTRIES) * cfg.ases_per_country
        self.next_host = np.ones(self.n_ases + 1, dtype=np.int64)
        self.hosts: Dict[int, Tuple[int, ...]] = {}
        self.domains = set()

    def _between(self, bounds: IntRange, cap: Optional[int] = None) -> int:
        low, high = bounds
        value = int(self.rng.integers(low, high + 1))
        return min(value, cap) if cap is not None else value

    def _allocate(self, block: int) -> int:
        offset = int(self.next_host[block])
        if offset >= BLOCK_SIZE - 1:
            raise InvalidDistribution(f"address block {block} exhausted; lower counts or raise ases_per_country")
        self.next_host[block] += 1
        return FIRST_BLOCK + block * BLOCK_SIZE + offset

    def _domain(self, dist: ClassDistribution) -> str:
        while True:
            length = self._between(dist.name_length)
            name = "".join(self.rng.choice(ALPHABET, size=length))
            domain = f"{name}.{dist.tlds[int(self.rng.integers(len(dist.tlds)))]}"
            if domain not in self.domains:
                self.domains.add(domain)
                return domain

    def _pick_ases(self, dist: ClassDistribution, n_ips: int) -> np.ndarray:
        n_asns = self._between(dist.asn_count, cap=n_ips)
        n_countries = self._between(dist.country_count, cap=n_asns)
        countries = self.rng.choice(len(COUNTRIES), size=n_countries, replace=False)
        per_country = self.cfg.ases_per_country
        # one AS per chosen country, the rest from the same countries
        first = countries * per_country + self.rng.integers(per_country, size=n_countries)
        pool = np.setdiff1d((countries[:, None] * per_country + np.arange(per_country)).ravel(), first)
        extra = min(n_asns - n_countries, pool.size)
        rest = self.rng.choice(pool, size=extra, replace=False) if extra else np.array([], dtype=int)
        return np.concatenate([first, rest]).astype(int)

    def _ports(self, dist: ClassDistribution, shared: Tuple[int, ...]) -> Tuple[int, ...]:
        if dist.ports_mode == "shared":
            return shared
        size = self._between(dist.ports_per_host)
        pool = sorted(set(dist.port_pool))
        return tuple(sorted(int(p) for p in self.rng.choice(pool, size=size, replace=False)))

    def record(self, dist: ClassDistribution, label: Label) -> DnsObservation:
        n_ips = self._between(dist.ip_count)
        ases = self._pick_ases(dist, n_ips)
        owners = np.concatenate([ases, self.rng.choice(ases, size=n_ips - ases.size)])
        shared = ()
        if dist.ports_mode == "shared":
            shared = tuple(sorted(dist.port_sets[int(self.rng.integers(len(dist.port_sets)))]))

        addresses = []
        for block in owners:
            if self.cfg.unknown_rate and self.rng.random() < self.cfg.unknown_rate:
                block = self.n_ases
            ip = self._allocate(int(block))
            addresses.append(int_to_ip(ip))
            if self.rng.random() < dist.presence:
                self.hosts[ip] = self._ports(dist, shared)

        ttl = int(dist.ttl_choices[int(self.rng.integers(len(dist.ttl_choices)))])
        return DnsObservation(domain=self._domain(dist), ttl=ttl, a_records=tuple(addresses), label=label)

    def ranges(self) -> List[Tuple[int, int, int, str, str]]:
        ranges = []
        for block in range(self.n_ases):
            start = FIRST_BLOCK + block * BLOCK_SIZE
            asn = FIRST_ASN + block
            country = COUNTRIES[block // self.cfg.ases_per_country]
            ranges.append((start, start + BLOCK_SIZE - 1, asn, country, f"SYNTH-AS{asn}"))
        if self.cfg.unknown_rate:
            start = FIRST_BLOCK + self.n_ases * BLOCK_SIZE
            ranges.append((start, start + BLOCK_SIZE - 1, 0, "None", "Not routed"))
        return ranges


def synth_dataset(cfg: Optional[SynthConfig] = None, out_dir: Optional[Union[str, Path]] = None) -> SynthCorpus:
    """
    Generate a labeled corpus; deterministic given ``cfg.seed``.

    A ``mimic_rate`` share of records is drawn from the other class's
    distribution while keeping its own label.

    Args:
        cfg: Generator configuration (packaged default if None)
        out_dir: When given, the three files are written there

    Raises:
        InvalidDistribution: The configuration cannot produce valid records
    """
    cfg = cfg or SynthConfig.default()
    generator = _Generator(cfg)
    labels = np.array([-1] * cfg.fastflux.count + [1] * cfg.legit.count)
    labels = labels[generator.rng.permutation(labels.size)]

    observations = []
    for numeric in labels:
        own, other = (cfg.fastflux, cfg.legit) if numeric < 0 else (cfg.legit, cfg.fastflux)
        dist = other if generator.rng.random() < cfg.mimic_rate else own
        label = Label.FASTFLUX if numeric < 0 else Label.LEGITIMATE
        observations.append(generator.record(dist, label))

    corpus = SynthCorpus(observations=observations, hosts=generator.hosts, ranges=generator.ranges())
    logger.info(
        f"Generated {cfg.fastflux.count} fast-flux and {cfg.legit.count} legitimate records, "
        f"{len(corpus.hosts)} scanned hosts"
    )
    if out_dir is not None:
        corpus.write(out_dir)
    return corpus
