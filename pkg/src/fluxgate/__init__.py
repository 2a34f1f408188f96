"""
fluxgate - online fast-flux domain detection from a single DNS response.

A response passing the suspicious-domain gate is looked up in a local scan
snapshot and an IP-to-ASN/country database, reduced to eight features, and
classified by an SVM, MLP or RBF network.
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("fluxgate")
except PackageNotFoundError:
    __version__ = "0.0.1"

__all__ = ["__version__"]
