"""Exact homological algebra over small PIDs and fields.

Chain complexes of free modules, canonical resolutions, the chain-level
duality on torsion modules, and support reduction of symmetric forms,
all in exact arithmetic.
"""

__version__ = "0.1.0"

from .rings import Ring, ring_make

__all__ = ["Ring", "ring_make", "__version__"]
