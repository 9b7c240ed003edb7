"""geodd: a rule-based geometry theorem prover over a deductive fact database."""

from .core import Fact, GeometryError, PointTable, canon, is_reflexive_trivial, make_fact, orbit

__version__ = "0.1.0"

__all__ = [
    "Fact",
    "GeometryError",
    "PointTable",
    "canon",
    "is_reflexive_trivial",
    "make_fact",
    "orbit",
    "__version__",
]
