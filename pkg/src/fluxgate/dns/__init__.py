"""
DNS ingest: parse DNS responses into observations and gate them.
"""

from fluxgate.dns.gate import is_suspicious
from fluxgate.dns.observation import DnsObservation, Label, canonical_domain
from fluxgate.dns.parser import RecordFormat, load_observations, parse_observation

__all__ = [
    "DnsObservation",
    "Label",
    "RecordFormat",
    "canonical_domain",
    "is_suspicious",
    "load_observations",
    "parse_observation",
]
