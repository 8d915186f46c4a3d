"""Scale-invariant maximum-entropy distributions.

Measurement scales and their transforms (:mod:`scalekit.scale_algebra`),
normalization and multiplier solving (:mod:`scalekit.maxent_engine`), the
named distribution catalog (:mod:`scalekit.catalog`), integral transforms
(:mod:`scalekit.transforms`) and generative Monte Carlo checks
(:mod:`scalekit.simulation`).
"""

__version__ = "0.1.0"
