"""Undirected multigraph substrate with stable identifiers.

Vertices and edges are opaque integers assigned by insertion order and
never renumbered by deletions, so subgraph surgery elsewhere in the
package can refer back to survivors.  All iteration is in ascending-id
order, which makes every enumeration in the package deterministic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass


class Multigraph:
    """Undirected multigraph; loops and parallel edges are permitted."""

    def __init__(self) -> None:
        self._vertices: set[int] = set()
        self._edges: dict[int, tuple[int, int]] = {}
        self._next_vertex = 0
        self._next_edge = 0

    # -- construction -------------------------------------------------

    def add_vertex(self, v: int | None = None) -> int:
        if v is None:
            v = self._next_vertex
        if v in self._vertices:
            raise ValueError(f"vertex {v} already present")
        self._vertices.add(v)
        self._next_vertex = max(self._next_vertex, v + 1)
        return v

    def add_edge(self, u: int, v: int, eid: int | None = None) -> int:
        if u not in self._vertices or v not in self._vertices:
            raise ValueError(f"edge ({u},{v}) has an endpoint outside the vertex set")
        if eid is None:
            eid = self._next_edge
        if eid in self._edges:
            raise ValueError(f"edge id {eid} already present")
        self._edges[eid] = (u, v)
        self._next_edge = max(self._next_edge, eid + 1)
        return eid

    def delete_edge(self, eid: int) -> None:
        del self._edges[eid]

    def delete_vertex(self, v: int) -> None:
        """Remove v and every incident edge; other identifiers survive."""
        self._vertices.remove(v)
        for eid in [e for e, (a, b) in self._edges.items() if v in (a, b)]:
            del self._edges[eid]

    def copy(self) -> Multigraph:
        g = Multigraph()
        g._vertices = set(self._vertices)
        g._edges = dict(self._edges)
        g._next_vertex = self._next_vertex
        g._next_edge = self._next_edge
        return g

    @classmethod
    def from_edges(cls, edges: list[tuple[int, int]], vertices: list[int] | None = None) -> Multigraph:
        g = cls()
        seen: set[int] = set()
        for v in vertices or []:
            g.add_vertex(v)
            seen.add(v)
        for u, v in edges:
            for w in (u, v):
                if w not in seen:
                    g.add_vertex(w)
                    seen.add(w)
            g.add_edge(u, v)
        return g

    # -- queries -------------------------------------------------------

    @property
    def vertices(self) -> list[int]:
        return sorted(self._vertices)

    @property
    def edge_ids(self) -> list[int]:
        return sorted(self._edges)

    def has_vertex(self, v: int) -> bool:
        return v in self._vertices

    def has_edge_id(self, eid: int) -> bool:
        return eid in self._edges

    def ends(self, eid: int) -> tuple[int, int]:
        return self._edges[eid]

    def num_vertices(self) -> int:
        return len(self._vertices)

    def num_edges(self) -> int:
        return len(self._edges)

    def incident(self, v: int) -> list[int]:
        """Edge ids at v; loops reported once."""
        return [e for e in self.edge_ids if v in self._edges[e]]

    def degree(self, v: int) -> int:
        d = 0
        for a, b in self._edges.values():
            if a == v:
                d += 1
            if b == v:
                d += 1
        return d

    def neighbors(self, v: int) -> list[int]:
        out: set[int] = set()
        for a, b in self._edges.values():
            if a == v:
                out.add(b)
            elif b == v:
                out.add(a)
        return sorted(out)

    def edges_between(self, u: int, v: int) -> list[int]:
        return [e for e, (a, b) in sorted(self._edges.items()) if {a, b} == {u, v}]

    def other_end(self, eid: int, v: int) -> int:
        a, b = self._edges[eid]
        if v == a:
            return b
        if v == b:
            return a
        raise ValueError(f"vertex {v} is not an end of edge {eid}")

    # -- connectivity ---------------------------------------------------

    def components(self, skip_vertices: set[int] | None = None, skip_edges: set[int] | None = None) -> list[set[int]]:
        skip_v = skip_vertices or set()
        skip_e = skip_edges or set()
        remaining = [v for v in self.vertices if v not in skip_v]
        adj: dict[int, set[int]] = {v: set() for v in remaining}
        for e, (a, b) in self._edges.items():
            if e in skip_e or a in skip_v or b in skip_v:
                continue
            adj[a].add(b)
            adj[b].add(a)
        seen: set[int] = set()
        comps = []
        for start in remaining:
            if start in seen:
                continue
            comp = {start}
            stack = [start]
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if y not in comp:
                        comp.add(y)
                        stack.append(y)
            seen |= comp
            comps.append(comp)
        return comps

    def is_connected(self, skip_vertices: set[int] | None = None, allow_empty: bool = True) -> bool:
        comps = self.components(skip_vertices=skip_vertices)
        if not comps:
            return allow_empty
        return len(comps) == 1


def is_cubic(g: Multigraph) -> bool:
    """True iff every vertex has degree exactly 3 (loops count twice)."""
    return all(g.degree(v) == 3 for v in g.vertices)


def edge_connectivity_at_most_3(g: Multigraph) -> int | str:
    """Minimum edge-cut size capped at 3; returns "more" when it is >= 4.

    Disconnected graphs report 0.  Brute-force cut enumeration; the
    graphs handled here are desk-scale.
    """
    if g.num_vertices() == 0:
        return 0
    if not g.is_connected():
        return 0
    eids = g.edge_ids
    for k in (1, 2, 3):
        for cut in itertools.combinations(eids, k):
            if len(g.components(skip_edges=set(cut))) > 1:
                return k
    return "more"


@dataclass(frozen=True)
class YDelta:
    """Result of a Y-Delta expansion at v0 toward neighbours v1, v2."""

    graph: Multigraph
    x0: int
    y0: int


def y_delta(g: Multigraph, v0: int, v1: int, v2: int) -> YDelta:
    """Subdivide {v0,v1} and {v0,v2} with fresh x0, y0 and add {x0,y0}.

    Cubic inputs stay cubic.  Raises if v1 or v2 is not adjacent to v0.
    """
    e1 = g.edges_between(v0, v1)
    e2 = g.edges_between(v0, v2)
    if not e1 or not e2:
        raise ValueError(f"{v1} and {v2} must both be neighbours of {v0}")
    e1_id, e2_id = e1[0], e2[0]
    if e1_id == e2_id:
        e2_id = e2[1] if len(e2) > 1 else None
        if e2_id is None:
            raise ValueError("need two distinct edges at v0 to expand")
    out = g.copy()
    out.delete_edge(e1_id)
    out.delete_edge(e2_id)
    x0 = out.add_vertex()
    y0 = out.add_vertex()
    out.add_edge(v0, x0)
    out.add_edge(x0, v1)
    out.add_edge(v0, y0)
    out.add_edge(y0, v2)
    out.add_edge(x0, y0)
    return YDelta(graph=out, x0=x0, y0=y0)


# -- rotation systems and face traversal --------------------------------

Dart = tuple[int, int]  # (edge id, end index 0/1): the dart leaving ends(eid)[end]


class RotationSystem:
    """Cyclic order of incident edge-ends at every vertex.

    Embeddings are supplied as input, never computed.  Each edge-end of
    the graph appears exactly once across all the cyclic orders; loops
    contribute two ends at their vertex.
    """

    def __init__(self, order: dict[int, list[Dart]]) -> None:
        self.order = {v: list(ds) for v, ds in order.items()}

    @classmethod
    def from_edge_lists(cls, g: Multigraph, rotation: dict[int, list[int]]) -> RotationSystem:
        """Build from per-vertex edge-id lists; loop ids must appear twice."""
        order: dict[int, list[Dart]] = {}
        for v in g.vertices:
            seen: dict[int, int] = {}
            darts: list[Dart] = []
            for eid in rotation[v]:
                a, b = g.ends(eid)
                if v not in (a, b):
                    raise ValueError(f"edge {eid} in rotation of {v} is not incident to it")
                occurrence = seen.get(eid, 0)
                seen[eid] = occurrence + 1
                if a == b:  # loop: first occurrence is end 0, second end 1
                    darts.append((eid, occurrence))
                else:
                    darts.append((eid, 0 if a == v else 1))
            order[v] = darts
        rs = cls(order)
        rs.check(g)
        return rs

    def check(self, g: Multigraph) -> None:
        expected: list[Dart] = []
        for eid in g.edge_ids:
            expected.append((eid, 0))
            expected.append((eid, 1))
        got = [d for v in sorted(self.order) for d in self.order[v]]
        if sorted(got) != sorted(expected):
            raise ValueError("rotation system does not cover every edge-end exactly once")
        for v, darts in self.order.items():
            for eid, end in darts:
                if g.ends(eid)[end] != v:
                    raise ValueError(f"dart {(eid, end)} listed at {v} does not leave from it")

    def next_dart(self, g: Multigraph, dart: Dart) -> Dart:
        """Face-traversal successor: arrive at the head, turn to the next end."""
        eid, end = dart
        head = g.ends(eid)[1 - end]
        arrival = (eid, 1 - end)
        ring = self.order[head]
        i = ring.index(arrival)
        return ring[(i + 1) % len(ring)]


def faces(g: Multigraph, rot: RotationSystem) -> list[list[Dart]]:
    """Face boundary walks; every dart is used exactly once.

    A dart (eid, end) stands for traversing eid away from ends(eid)[end].
    """
    rot.check(g)
    remaining: set[Dart] = set()
    for eid in g.edge_ids:
        remaining.add((eid, 0))
        remaining.add((eid, 1))
    out: list[list[Dart]] = []
    while remaining:
        start = min(remaining)
        walk = [start]
        remaining.discard(start)
        cur = rot.next_dart(g, start)
        while cur != start:
            walk.append(cur)
            remaining.discard(cur)
            cur = rot.next_dart(g, cur)
        out.append(walk)
    return out


def face_vertex_walk(g: Multigraph, walk: list[Dart]) -> list[int]:
    return [g.ends(eid)[end] for eid, end in walk]
