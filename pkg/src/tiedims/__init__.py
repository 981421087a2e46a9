"""Relationship-dimension toolkit.

Derives ten relationship dimensions from crowdsourced word ratings, labels
communication-graph edges with those dimensions by lexicon matching, and
evaluates dimension-typed common-neighbor features for link prediction.
Also ships an annotation service for collecting human relationship labels.
"""

__version__ = "0.1.0"

from .dimensions import DIMENSIONS, LEXICON_BEARING, UNTYPED

__all__ = ["DIMENSIONS", "LEXICON_BEARING", "UNTYPED", "__version__"]
