"""Relational clocks, degeneracy-induced thermal states, tunneling rates,
and radiation-reheated cosmology.

The subpackages are importable on their own; the ``emergent`` CLI wires
them to JSON configs and CSV/JSON reports.
"""

__version__ = "0.1.0"

__all__ = ["__version__"]
