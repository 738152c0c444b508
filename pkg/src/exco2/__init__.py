"""Codegree squared extremal numbers of 3-graphs: constructions, exact search and flag programs."""

from .core import Hypergraph, new_hypergraph, co2, codegree, codegree_table, complete, empty, normalizer, read_hg, write_hg
from .errors import Exco2Error

__version__ = "0.1.0"

__all__ = [
    "Hypergraph",
    "new_hypergraph",
    "co2",
    "codegree",
    "codegree_table",
    "complete",
    "empty",
    "normalizer",
    "read_hg",
    "write_hg",
    "Exco2Error",
    "__version__",
]
