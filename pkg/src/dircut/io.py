"""Plain-text graph format.

::

    # comments run to end of line
    n m directed edge          (or: n m directed vertex)
    v weight                   (vertex mode only: n lines, each vertex once)
    tail head weight           (m lines; no weight in vertex mode)

Weights are decimals (``2.5``) or rationals (``5/2``).
"""

from __future__ import annotations

from fractions import Fraction

from .graph import (
    GraphError,
    VertexWeightedDigraph,
    WeightedDigraph,
    as_weight,
    build_graph,
    build_vertex_graph,
)


class ParseError(GraphError):
    """Malformed graph text; the message starts with the offending line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _weight(token: str, lineno: int):
    try:
        w = as_weight(Fraction(token))
    except (ValueError, ZeroDivisionError):
        raise ParseError(lineno, f"bad weight {token!r}") from None
    if w <= 0:
        raise ParseError(lineno, f"weight must be positive, got {token}")
    return w


def _int(token: str, lineno: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(lineno, f"bad {what} {token!r}") from None


def parse_graph(text: str) -> WeightedDigraph | VertexWeightedDigraph:
    """Parse the text format into an edge- or vertex-weighted graph."""
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if body:
            lines.append((lineno, body.split()))
    if not lines:
        raise ParseError(1, "empty input")
    lineno, head = lines[0]
    if len(head) != 4 or head[2] != "directed" or head[3] not in ("edge", "vertex"):
        raise ParseError(lineno, "header must be 'n m directed edge' or 'n m directed vertex'")
    n = _int(head[0], lineno, "vertex count")
    m = _int(head[1], lineno, "edge count")
    if n < 1 or m < 0:
        raise ParseError(lineno, "vertex count must be positive and edge count nonnegative")
    mode = head[3]
    body = lines[1:]
    weights = None
    if mode == "vertex":
        if len(body) < n:
            raise ParseError(body[-1][0] if body else lineno, f"expected {n} vertex-weight lines")
        weights = [None] * n
        for lineno, toks in body[:n]:
            if len(toks) != 2:
                raise ParseError(lineno, "vertex line must be 'v weight'")
            v = _int(toks[0], lineno, "vertex id")
            if not 0 <= v < n:
                raise ParseError(lineno, f"vertex {v} out of range")
            if weights[v] is not None:
                raise ParseError(lineno, f"duplicate weight for vertex {v}")
            weights[v] = _weight(toks[1], lineno)
        body = body[n:]
    if len(body) != m:
        where = body[m][0] if len(body) > m else (body[-1][0] if body else lineno)
        raise ParseError(where, f"expected {m} edge lines, found {len(body)}")
    edges = []
    want = 3 if mode == "edge" else 2
    for lineno, toks in body:
        if len(toks) != want:
            raise ParseError(lineno, "edge line must be 'tail head weight'" if mode == "edge" else "edge line must be 'tail head'")
        u = _int(toks[0], lineno, "tail")
        v = _int(toks[1], lineno, "head")
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(lineno, f"endpoint out of range in ({u}, {v})")
        if mode == "edge":
            edges.append((u, v, _weight(toks[2], lineno)))
        else:
            edges.append((u, v))
    if mode == "edge":
        return build_graph(n, edges)
    return build_vertex_graph(n, weights, edges)


def format_weight(w) -> str:
    if isinstance(w, Fraction) and w.denominator != 1:
        return f"{w.numerator}/{w.denominator}"
    return str(int(w))


def format_graph(g) -> str:
    """Emit ``g`` in the text format (no comments, one trailing newline)."""
    if isinstance(g, WeightedDigraph):
        lines = [f"{g.n} {g.m} directed edge"]
        lines += [f"{u} {v} {format_weight(w)}" for u, v, w in zip(g.tails, g.heads, g.weights)]
    else:
        lines = [f"{g.n} {g.m} directed vertex"]
        lines += [f"{v} {format_weight(w)}" for v, w in enumerate(g.vertex_weights)]
        lines += [f"{u} {v}" for u, v in zip(g.tails, g.heads)]
    return "\n".join(lines) + "\n"


def parse_sparsified(text: str):
    """Split ``sparsify`` output into ``(graph, tau)``."""
    body, _, last = text.rstrip("\n").rpartition("\n")
    key, _, value = last.partition(" ")
    if key != "tau":
        raise ParseError(body.count("\n") + 2, "missing 'tau p/q' line")
    return parse_graph(body), Fraction(value)
