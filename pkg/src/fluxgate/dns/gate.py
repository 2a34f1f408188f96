"""Suspicious-domain gate: only responses with many A records reach a classifier."""

from fluxgate.core.settings import DEFAULT_GATE_THRESHOLD
from fluxgate.dns.observation import DnsObservation


def is_suspicious(obs: DnsObservation, threshold: int = DEFAULT_GATE_THRESHOLD) -> bool:
    """
    Check whether a response carries enough A records to be worth classifying.

    The comparison is inclusive: with the default threshold of 5, a response
    with exactly five addresses is suspicious.

    Args:
        obs: Parsed observation
        threshold: Minimum number of distinct A records (>= 1)

    Returns:
        True iff the observation has at least ``threshold`` A records
    """
    if isinstance(threshold, bool) or not isinstance(threshold, int) or threshold < 1:
        raise ValueError(f"threshold must be a positive integer, got {threshold!r}")
    return obs.ip_count >= threshold
