"""Operation counters threaded through the algorithms.

A :class:`Counters` instance is passed explicitly; nothing global is mutated.
"""

from __future__ import annotations

from collections import Counter


class Counters(Counter):
    """String-keyed integer counters.

    Keys used by the library:

    ``flow.arc_scans``      arcs examined by the exact max-flow routine
    ``flow.calls``          exact max-flow invocations
    ``local.arc_scans``     residual arcs examined by local searches
    ``local.augmentations`` augmenting paths found by local searches
    ``local.queries``       local queries answered
    ``sparsify.edges``      edges (or vertices) processed by sparsification
    ``sparsify.attach``     elements written when attaching a root to a deferred core
    ``eval.edges``          edges touched while re-evaluating candidates
    """

    def traversals(self) -> int:
        """All edge traversals: the quantity used for scaling checks."""
        return (
            self["flow.arc_scans"]
            + self["local.arc_scans"]
            + self["sparsify.edges"]
            + self["sparsify.attach"]
            + self["eval.edges"]
        )


def ensure(counters: Counters | None) -> Counters:
    return counters if counters is not None else Counters()
