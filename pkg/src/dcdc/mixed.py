"""Mixed graphs: plain edges, arcs with provenance, forbidden arc pairs.

A mixed graph is the 4-tuple (V, E, A, R).  In (V, E) every vertex keeps
degree at most three; a vertex of plain degree one is the tail of exactly
two arcs and the head of exactly two, a vertex of degree two is the tail
and head of exactly one each, and a degree-three vertex carries no arcs.
Directed loops are allowed.  Terminal states of a full consecutive
reduction may leave degree-zero vertices; those must carry equally many
arc tails and heads (in practice, loops only).

Every reduction produces a new value; instances are never mutated after
construction, so they can be shared freely across search branches.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .graph import Multigraph

# A directed occurrence of an original host edge: (edge id, tail, head).
DirectedEdge = tuple[int, int, int]


@dataclass(frozen=True)
class Arc:
    """Directed edge of a mixed graph.

    ``expansion`` is the directed walk of original host edges this arc
    stands for; it is what makes cycle extraction possible after many
    rounds of path contraction.  Freshly oriented edges expand to their
    own single directed edge.
    """

    id: int
    tail: int
    head: int
    expansion: tuple[DirectedEdge, ...] = field(default=())

    def is_loop(self) -> bool:
        return self.tail == self.head


def _norm_pair(a: int, b: int) -> tuple[int, int]:
    if a == b:
        raise ValueError(f"forbidden pair must join two distinct arcs, got ({a},{b})")
    return (a, b) if a < b else (b, a)


class MixedGraph:
    """Immutable-by-convention (V, E, A, R) value."""

    def __init__(
        self,
        vertices: set[int] | frozenset[int],
        edges: dict[int, tuple[int, int]],
        arcs: dict[int, Arc] | None = None,
        forbidden: set[tuple[int, int]] | None = None,
        next_arc_id: int | None = None,
    ) -> None:
        self.vertices: frozenset[int] = frozenset(vertices)
        self.edges: dict[int, tuple[int, int]] = dict(edges)
        self.arcs: dict[int, Arc] = dict(arcs or {})
        self.forbidden: frozenset[tuple[int, int]] = frozenset(
            _norm_pair(a, b) for a, b in (forbidden or set())
        )
        for a, b in self.forbidden:
            if a not in self.arcs or b not in self.arcs:
                raise ValueError(f"forbidden pair ({a},{b}) references a missing arc")
        for e, (u, v) in self.edges.items():
            if u not in self.vertices or v not in self.vertices:
                raise ValueError(f"edge {e} has an endpoint outside the vertex set")
        for a in self.arcs.values():
            if a.tail not in self.vertices or a.head not in self.vertices:
                raise ValueError(f"arc {a.id} has an endpoint outside the vertex set")
        if next_arc_id is None:
            next_arc_id = max(self.arcs, default=-1) + 1
        self.next_arc_id = next_arc_id

    @classmethod
    def from_graph(cls, g: Multigraph) -> MixedGraph:
        """The start state of a consecutive reduction: (V(G), E(G), 0, 0)."""
        return cls(set(g.vertices), {e: g.ends(e) for e in g.edge_ids})

    def is_empty(self) -> bool:
        return not self.vertices and not self.edges and not self.arcs

    # -- local census ----------------------------------------------------

    def plain_degree(self, v: int) -> int:
        d = 0
        for a, b in self.edges.values():
            if a == v:
                d += 1
            if b == v:
                d += 1
        return d

    def arc_ids_at(self, v: int) -> list[int]:
        return [i for i in sorted(self.arcs) if v in (self.arcs[i].tail, self.arcs[i].head)]

    def tails_at(self, v: int) -> list[int]:
        return [i for i in sorted(self.arcs) if self.arcs[i].tail == v]

    def heads_at(self, v: int) -> list[int]:
        return [i for i in sorted(self.arcs) if self.arcs[i].head == v]

    def edge_ids_at(self, v: int) -> list[int]:
        return [e for e in sorted(self.edges) if v in self.edges[e]]

    def edges_between(self, u: int, v: int) -> list[int]:
        return [e for e, (a, b) in sorted(self.edges.items()) if {a, b} == {u, v}]

    def is_forbidden(self, a: int, b: int) -> bool:
        return _norm_pair(a, b) in self.forbidden

    # -- structural checks -------------------------------------------------

    def discipline_violations(self) -> list[str]:
        """Degree-discipline diagnostics; empty means the discipline holds.

        Degree-zero vertices are tolerated when their arcs balance
        (tails == heads); they appear only in the terminal stages of a
        full reduction, where everything left has closed into loops.
        """
        out: list[str] = []
        for v in sorted(self.vertices):
            d = self.plain_degree(v)
            t = len(self.tails_at(v))
            h = len(self.heads_at(v))
            if d > 3:
                out.append(f"vertex {v}: plain degree {d} > 3")
            elif d == 3 and (t or h):
                out.append(f"vertex {v}: degree 3 but carries {t}+{h} arcs")
            elif d == 2 and (t, h) != (1, 1):
                out.append(f"vertex {v}: degree 2 needs 1 tail/1 head, has {t}/{h}")
            elif d == 1 and (t, h) != (2, 2):
                out.append(f"vertex {v}: degree 1 needs 2 tails/2 heads, has {t}/{h}")
            elif d == 0 and t != h:
                out.append(f"vertex {v}: degree 0 with unbalanced arcs {t}/{h}")
        return out

    def check_discipline(self) -> None:
        bad = self.discipline_violations()
        if bad:
            raise ValueError("degree discipline violated: " + "; ".join(bad))


def boundary(m: MixedGraph, u: set[int] | frozenset[int]) -> tuple[set[int], set[int]]:
    """(edge ids, arc ids) with exactly one end vertex in u."""
    uset = set(u)
    edge_cut = {e for e, (a, b) in m.edges.items() if (a in uset) != (b in uset)}
    arc_cut = {i for i, arc in m.arcs.items() if (arc.tail in uset) != (arc.head in uset)}
    return edge_cut, arc_cut


def is_cut_obstacle(m: MixedGraph, u: set[int] | frozenset[int]) -> bool:
    """True iff the boundary of u has more arcs than twice its edges.

    Each boundary edge supplies one inbound and one outbound crossing,
    and every correct path crosses the boundary exactly twice, so once
    the arcs outnumber twice the edges there are not enough edge
    crossings left to give each boundary arc its own path; with all
    boundary arc pairs forbidden no correct reduction of u can exist.
    """
    edge_cut, arc_cut = boundary(m, u)
    return 2 * len(edge_cut) < len(arc_cut)


def _three_ear_shape(m: MixedGraph, three: tuple[int, int, int]) -> tuple[int, int] | None:
    """Outside attachment (a, b) of the induced path v1-v2-v3, or None."""
    v1, v2, v3 = three
    if len({v1, v2, v3}) != 3 or not {v1, v2, v3} <= set(m.vertices):
        return None
    if not (m.edges_between(v1, v2) and m.edges_between(v2, v3)):
        return None
    if m.edges_between(v1, v3):
        return None
    ends1 = [e for e in m.edge_ids_at(v1) if v2 not in m.edges[e]]
    ends3 = [e for e in m.edge_ids_at(v3) if v2 not in m.edges[e]]
    mid_extra = [e for e in m.edge_ids_at(v2) if not ({v1, v3} & set(m.edges[e]))]
    if len(ends1) != 1 or len(ends3) != 1 or mid_extra:
        return None
    a = next(w for w in m.edges[ends1[0]] if w != v1)
    b = next(w for w in m.edges[ends3[0]] if w != v3)
    if a in three or b in three:
        return None
    return a, b


def is_inner_obstacle(m: MixedGraph, three: tuple[int, int, int]) -> bool:
    """Match the one non-cut obstruction pattern at a 3-ear interior.

    With the interior path written v1-v2-v3 the pattern, up to
    reflection of the ear and reversal of every arc, is: an internal arc
    from v1 to v3, an internal arc from v3 to v2, one inbound crossing
    arc at v1 and one outbound crossing arc at v2, with every pair of
    these four arcs forbidden except possibly {v3->v2 arc, inbound arc}.
    The decisive pair is {v1->v3 arc, outbound arc}: with the rest of
    the configuration in place, a correct reduction exists exactly when
    that pair is not forbidden.  Derived by exhausting all
    discipline-valid 3-ear states; cross-validated against reduction
    enumeration by the equivalence property tests.
    """
    shape = _three_ear_shape(m, three)
    if shape is None:
        raise ValueError(f"{three} is not the interior of a 3-ear in this mixed graph")
    v1, v2, v3 = three
    inner = {v1, v2, v3}
    incident = [m.arcs[i] for i in sorted(m.arcs) if {m.arcs[i].tail, m.arcs[i].head} & inner]
    if len(incident) != 4:
        return False

    def matches(p1: int, p2: int, p3: int, flip: bool) -> bool:
        # flip reverses every arc direction in the pattern.
        def arc(t: int, h: int) -> Arc | None:
            if flip:
                t, h = h, t
            found = [a for a in incident if a.tail == t and a.head == h]
            return found[0] if len(found) == 1 else None

        long_arc = arc(p1, p3)
        mid_arc = arc(p3, p2)
        if long_arc is None or mid_arc is None or long_arc is mid_arc:
            return False
        rest = [a for a in incident if a not in (long_arc, mid_arc)]
        got_in = [a for a in rest if (a.head if not flip else a.tail) == p1
                  and (a.tail if not flip else a.head) not in inner]
        got_out = [a for a in rest if (a.tail if not flip else a.head) == p2
                   and (a.head if not flip else a.tail) not in inner]
        if len(got_in) != 1 or len(got_out) != 1 or got_in[0] is got_out[0]:
            return False
        in_arc, out_arc = got_in[0], got_out[0]
        required = [
            (long_arc, mid_arc),
            (long_arc, in_arc),
            (long_arc, out_arc),
            (mid_arc, out_arc),
            (in_arc, out_arc),
        ]
        return all(m.is_forbidden(a.id, b.id) for a, b in required)

    for order in ((v1, v2, v3), (v3, v2, v1)):
        for flip in (False, True):
            if matches(order[0], order[1], order[2], flip):
                return True
    return False
