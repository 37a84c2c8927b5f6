"""Extremal span problems for additive triple systems in finite groups.

Exact g(k) / h(a, b, l) evaluation, the compression check, triangular-lattice
isoperimetry, and explicit small vertex sets spanning k triples.
"""

from tripspan.errors import BudgetExceeded, Counterexample, PatternNotFound

__version__ = "0.1.0"

__all__ = ["BudgetExceeded", "Counterexample", "PatternNotFound", "__version__"]
