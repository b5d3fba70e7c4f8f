"""Exact weighted backward shifts, their return-time sets and integer-set families."""

from .family import Status, Verdict
from .intset import IntSet, catalog
from .weights import ProductTable, SpaceKind, WeightSeq, product_table

__version__ = "0.1.0"

__all__ = ["IntSet", "catalog", "Status", "Verdict", "WeightSeq", "ProductTable", "SpaceKind",
           "product_table", "__version__"]
