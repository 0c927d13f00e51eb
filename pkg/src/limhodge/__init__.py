"""limhodge: exact-arithmetic limiting mixed Hodge structures of normal
crossing degenerations, computed from combinatorial strata data."""

__version__ = "0.1.0"
