"""geokernel: a dynamic-geometry construction kernel.

Parses ruler-and-compass construction scripts into a dependency graph,
re-evaluates them under dragging with branch continuity, provides the
classical inversive/projective/quadratic transformations, and verifies
their algebraic properties with an exact-arithmetic curve layer.
"""

__version__ = "0.1.0"
