"""Ishikawa-type fixed-point iterations with optimal upper and lower error bounds.

Modules:

* :mod:`oeb.schedules` - parameter sequences a_n, b_n and their catalog
* :mod:`oeb.mappings` - non-expansive maps, pairs and extremal constructions
* :mod:`oeb.iteration` - Picard, Mann, Ishikawa and modified Ishikawa runs
* :mod:`oeb.bounds` - OUEB/OLEB products, convergence criteria, log sandwiches
* :mod:`oeb.analysis` - rate ratios and the scheme comparison
* :mod:`oeb.cli` - the ``oeb`` command
"""
from .iteration import IterationTrace, Scheme, Status, run
from .mappings import Domain, MapPair, NonExpansiveMap
from .schedules import Schedule, SeriesClass, catalog

__version__ = "0.1.0"

__all__ = [
    "Domain", "IterationTrace", "MapPair", "NonExpansiveMap", "Schedule", "Scheme",
    "SeriesClass", "Status", "catalog", "run",
]
