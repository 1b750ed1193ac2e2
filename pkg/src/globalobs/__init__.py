"""Birkhoff averages of global observables over infinite-measure-preserving systems.

Subpackages by concern: ``sequences`` (power-law partitions), ``maps`` (the
interval and half-line maps), ``observables``, ``birkhoff`` (orbit engine),
``luroth`` (digit expansions and renewal masses), ``tower`` (Kakutani towers
and the Levy walk), ``stats`` (empirical-law experiments), ``cli`` (runner).
"""

__version__ = "0.1.0"

from .sequences import PartitionSequence

__all__ = ["PartitionSequence", "__version__"]
