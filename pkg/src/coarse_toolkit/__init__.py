"""
Coarse toolkit: finite extended metric spaces, coarse constructions and the
checks that turn statements about them into executable assertions.
"""

from .core import CoarseToolkitError, DomainError, PreconditionError, SchemaError, configure, get_settings
from .metric_core import INF, FiniteExtMetricSpace, MappedPair

__version__ = "0.1.0"
