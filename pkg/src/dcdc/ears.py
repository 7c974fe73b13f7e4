"""Ears, ear decompositions, robustness and super-robustness.

An ear is a path on at least three vertices or a star on four; a bare
edge is not an ear, except as a trailing member of an edge+ear
decomposition where it contributes no internal vertices.  Trigraph
decompositions use short ears only (at most five vertices) and must
rebuild the host exactly.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .graph import Multigraph

PATH = "path"
STAR = "star"
EDGE = "edge"


@dataclass(frozen=True)
class Ear:
    """kind "path": vertices in path order, leaves at both ends.
    kind "star": (center, leaf, leaf, leaf).  kind "edge": (u, v).
    ``edge_ids`` aligns with the ear's edges in the same order."""

    kind: str
    vertices: tuple[int, ...]
    edge_ids: tuple[int, ...] = ()

    def leaves(self) -> tuple[int, ...]:
        if self.kind == PATH:
            return (self.vertices[0], self.vertices[-1])
        if self.kind == STAR:
            return tuple(self.vertices[1:])
        return self.vertices

    def internal(self) -> tuple[int, ...]:
        if self.kind == PATH:
            return self.vertices[1:-1]
        if self.kind == STAR:
            return (self.vertices[0],)
        return ()

    def vertex_pairs(self) -> list[tuple[int, int]]:
        if self.kind == PATH:
            return list(zip(self.vertices, self.vertices[1:]))
        if self.kind == STAR:
            c = self.vertices[0]
            return [(c, l) for l in self.vertices[1:]]
        return [self.vertices]

    def k(self) -> int:
        return len(self.internal())

    def is_k_ear(self, k: int) -> bool:
        return self.kind == PATH and self.k() == k

    def reversed(self) -> Ear:
        if self.kind != PATH:
            return self
        return Ear(PATH, tuple(reversed(self.vertices)), tuple(reversed(self.edge_ids)))


def _resolve_edges(host: Multigraph, pairs: list[tuple[int, int]], used: set[int]) -> list[int]:
    out = []
    for u, v in pairs:
        options = [e for e in host.edges_between(u, v) if e not in used]
        if not options:
            raise ValueError(f"no unused host edge between {u} and {v}")
        out.append(options[0])
        used.add(options[0])
    return out


@dataclass
class EarDecomposition:
    """Starting cycle h0 plus ordered ears over a fixed host graph."""

    host: Multigraph
    h0: tuple[int, ...]
    h0_edge_ids: tuple[int, ...]
    ears: list[Ear]

    @classmethod
    def build(
        cls,
        host: Multigraph,
        h0: list[int],
        ears: list[tuple[str, list[int]]],
    ) -> EarDecomposition:
        """Resolve vertex-sequence ears against host edges deterministically."""
        used: set[int] = set()
        cyc = list(h0)
        pairs = list(zip(cyc, cyc[1:] + cyc[:1]))
        h0_ids = _resolve_edges(host, pairs, used)
        out_ears = []
        for kind, vs in ears:
            ear = Ear(kind, tuple(vs))
            ids = _resolve_edges(host, ear.vertex_pairs(), used)
            out_ears.append(Ear(kind, tuple(vs), tuple(ids)))
        return cls(host, tuple(h0), tuple(h0_ids), out_ears)

    # -- structure ------------------------------------------------------

    def is_trigraph_mode(self) -> bool:
        return all(e.kind != EDGE for e in self.ears)

    def prefix_vertices(self, i: int) -> set[int]:
        """V(H_i): the h0 cycle plus the first i ears."""
        out = set(self.h0)
        for ear in self.ears[:i]:
            out.update(ear.vertices)
        return out

    def vertex_ear_index(self, v: int) -> int | None:
        """Index of the ear having v internal; None for h0 vertices."""
        for i, ear in enumerate(self.ears):
            if v in ear.internal():
                return i
        return None

    def validate(self) -> tuple[bool, list[str]]:
        d: list[str] = []
        if len(set(self.h0)) != len(self.h0) or len(self.h0) < 3:
            d.append("h0 is not a cycle on distinct vertices")
        for v in self.h0:
            if not self.host.has_vertex(v):
                d.append(f"h0 vertex {v} is not in the host")
        used = set(self.h0_edge_ids)
        if len(used) != len(self.h0_edge_ids):
            d.append("h0 reuses an edge")
        present = set(self.h0)
        seen_edge_ear = False
        for i, ear in enumerate(self.ears):
            if ear.kind == PATH and len(ear.vertices) < 3:
                d.append(f"ear {i}: a path ear needs at least 3 vertices")
            if ear.kind == STAR and len(ear.vertices) != 4:
                d.append(f"ear {i}: a star ear has exactly 4 vertices")
            if ear.kind == EDGE:
                seen_edge_ear = True
                if len(ear.vertices) != 2:
                    d.append(f"ear {i}: an edge ear has 2 vertices")
            elif seen_edge_ear:
                d.append(f"ear {i}: edge ears must trail every path/star ear")
            for leaf in ear.leaves():
                if leaf not in present:
                    d.append(f"ear {i}: leaf {leaf} not present yet")
            for v in ear.internal():
                if v in present:
                    d.append(f"ear {i}: internal vertex {v} already present")
            if ear.kind == PATH and len(set(ear.vertices[1:-1])) != len(ear.vertices) - 2:
                d.append(f"ear {i}: repeated internal vertex")
            if ear.kind == STAR and len(set(ear.vertices)) != 4:
                d.append(f"ear {i}: star vertices must be distinct")
            if len(ear.edge_ids) != len(ear.vertex_pairs()):
                d.append(f"ear {i}: edge ids not resolved")
            for eid, (u, v) in zip(ear.edge_ids, ear.vertex_pairs()):
                if not self.host.has_edge_id(eid) or set(self.host.ends(eid)) != {u, v}:
                    d.append(f"ear {i}: edge id {eid} does not join {u},{v} in the host")
                if eid in used:
                    d.append(f"ear {i}: edge {eid} already used")
                used.add(eid)
            present.update(ear.vertices)
        if present != set(self.host.vertices):
            d.append("decomposition does not reach every host vertex")
        if used != set(self.host.edge_ids):
            d.append("decomposition does not cover every host edge")
        return (not d, d)

    def validate_trigraph(self) -> tuple[bool, list[str]]:
        ok, d = self.validate()
        for i, ear in enumerate(self.ears):
            if ear.kind == EDGE:
                d.append(f"ear {i}: an edge is not an ear in a trigraph decomposition")
            elif len(ear.vertices) > 5:
                d.append(f"ear {i}: not short ({len(ear.vertices)} vertices)")
        return (not d, d)


def descendant(ed: EarDecomposition, i: int) -> list[set[int]]:
    """Components of the descendant of I(L_i): the parts of the host
    minus V(H_i) sending an edge to the ear's internal vertices."""
    ear = ed.ears[i]
    if not ear.is_k_ear(3):
        raise ValueError(f"ear {i} is not a 3-ear")
    return descendant_of(ed, i, set(ear.internal()))


def descendant_of(ed: EarDecomposition, i: int, attach: set[int]) -> list[set[int]]:
    gone = ed.prefix_vertices(i + 1)
    comps = ed.host.components(skip_vertices=gone)
    out = []
    for comp in comps:
        touches = any(
            (a in comp and b in attach) or (b in comp and a in attach)
            for a, b in (ed.host.ends(e) for e in ed.host.edge_ids)
        )
        if touches:
            out.append(comp)
    return sorted(out, key=lambda c: sorted(c))


def is_robust(ed: EarDecomposition) -> bool:
    """Every 3-ear descendant has at most two components; a second
    component must be an isolated vertex hanging on two h0 vertices."""
    h0 = set(ed.h0)
    for i, ear in enumerate(ed.ears):
        if not ear.is_k_ear(3):
            continue
        comps = descendant(ed, i)
        if len(comps) > 2:
            return False
        if len(comps) == 2:
            def qualifies(c: set[int]) -> bool:
                if len(c) != 1:
                    return False
                (t,) = c
                to_h0 = sum(1 for e in ed.host.incident(t) if ed.host.other_end(e, t) in h0)
                return to_h0 == 2
            if not any(qualifies(c) for c in comps):
                return False
    return True


def segments(ear: Ear) -> list[tuple[int, ...]]:
    """Contiguous internal runs of length >= 3 of a path ear."""
    inner = ear.internal()
    out = []
    for size in range(3, len(inner) + 1):
        for start in range(len(inner) - size + 1):
            out.append(tuple(inner[start:start + size]))
    return out


def is_super_robust(ed: EarDecomposition) -> bool:
    """Condition (a): host minus V(h0) is connected.  Condition (b):
    for every ear with >= 3 internal vertices and every segment of it,
    the segment's descendant is connected.  Empty graphs count as
    connected."""
    if not ed.host.is_connected(skip_vertices=set(ed.h0), allow_empty=True):
        return False
    for i, ear in enumerate(ed.ears):
        if ear.kind != PATH or ear.k() < 3:
            continue
        for seg in segments(ear):
            if len(descendant_of(ed, i, set(seg))) > 1:
                return False
    return True


# -- search for super robust edge+ear decompositions ----------------------


@dataclass(frozen=True)
class SearchFailure:
    kind: str  # "precondition" | "budget" | "exhausted"
    detail: str


@dataclass
class _SearchState:
    nodes: int = 0


def _canon_cycle(path: list[int]) -> tuple[int, ...]:
    i = path.index(min(path))
    rot = path[i:] + path[:i]
    alt = [rot[0]] + rot[:0:-1]
    return tuple(min(rot, alt))


def _simple_cycles(g: Multigraph, seed: int | None) -> list[list[int]]:
    """All simple cycles, shortest first; optionally seed-shuffled."""
    cycles: set[tuple[int, ...]] = set()
    for start in g.vertices:
        stack: list[list[int]] = [[start]]
        while stack:
            path = stack.pop()
            for w in g.neighbors(path[-1]):
                if w == start and len(path) >= 3:
                    cycles.add(_canon_cycle(path))
                elif w not in path and w > start:
                    stack.append(path + [w])
    out = [list(c) for c in cycles]
    out.sort(key=lambda c: (len(c), c))
    if seed is not None:
        random.Random(seed).shuffle(out)
    return out


def _path_ear_candidates(g: Multigraph, present: set[int], used: set[int], max_len: int) -> list[list[int]]:
    found: list[list[int]] = []
    for w1 in sorted(present):
        for e in g.incident(w1):
            if e in used:
                continue
            v = g.other_end(e, w1)
            if v in present:
                continue
            stack = [[w1, v]]
            while stack:
                path = stack.pop()
                tip = path[-1]
                for e2 in g.incident(tip):
                    if e2 in used:
                        continue
                    nxt = g.other_end(e2, tip)
                    if nxt in path[1:]:
                        continue
                    if nxt in present:
                        found.append(path + [nxt])
                    elif len(path) < max_len:
                        stack.append(path + [nxt])
    dedup = {tuple(p) for p in found}
    return [list(p) for p in sorted(dedup, key=lambda p: (len(p), p))]


def _star_candidates(g: Multigraph, present: set[int], used: set[int]) -> list[list[int]]:
    out = []
    for c in g.vertices:
        if c in present:
            continue
        leaves = []
        ok = True
        for e in g.incident(c):
            if e in used:
                ok = False
                break
            w = g.other_end(e, c)
            if w not in present or w == c:
                ok = False
                break
            leaves.append(w)
        if ok and len(leaves) == 3 and len(set(leaves)) == 3:
            out.append([c] + sorted(leaves))
    return sorted(out)


def find_super_robust(
    g: Multigraph,
    budget: int = 100_000,
    seed: int | None = None,
    start_cycles: list[list[int]] | None = None,
    accept=None,
) -> EarDecomposition | SearchFailure:
    """Backtracking search for a certified super robust edge+ear
    decomposition of a 3-edge-connected cubic graph.

    The invariant pruning the search is connectivity of the graph minus
    every prefix, which implies both super-robustness conditions.
    Uncovered edges at the end become trailing edge ears.  ``accept``
    can impose extra structural constraints (the trigraph builder needs
    trailing edges anchored at end internals); budget exhaustion is a
    tooling failure, reported as such, never as nonexistence.
    """
    from .graph import edge_connectivity_at_most_3, is_cubic

    if not is_cubic(g):
        return SearchFailure("precondition", "graph is not cubic")
    lam = edge_connectivity_at_most_3(g)
    if lam != "more" and lam < 3:
        return SearchFailure("precondition", f"graph is not 3-edge-connected (cut of size {lam})")

    state = _SearchState()
    cycles = start_cycles if start_cycles is not None else _simple_cycles(g, seed)
    rng = random.Random(seed) if seed is not None else None

    def assemble(h0: list[int], ears: list[tuple[str, list[int]]], used: set[int]) -> EarDecomposition | None:
        trailing = [e for e in g.edge_ids if e not in used]
        spec = list(ears) + [(EDGE, list(g.ends(e))) for e in sorted(trailing)]
        ed = EarDecomposition.build(g, h0, spec)
        ok, _ = ed.validate()
        if not ok:
            return None
        if not is_super_robust(ed):
            return None
        if accept is not None and not accept(ed):
            return None
        return ed

    def rec(h0: list[int], present: set[int], used: set[int], ears: list[tuple[str, list[int]]]) -> EarDecomposition | SearchFailure | None:
        state.nodes += 1
        if state.nodes > budget:
            return SearchFailure("budget", f"node budget {budget} exhausted")
        if present == set(g.vertices):
            return assemble(h0, ears, used)
        cands: list[tuple[str, list[int]]] = []
        cands.extend((PATH, p) for p in _path_ear_candidates(g, present, used, g.num_vertices()))
        cands.extend((STAR, s) for s in _star_candidates(g, present, used))
        if rng is not None:
            rng.shuffle(cands)
        for kind, vs in cands:
            ear = Ear(kind, tuple(vs))
            new_present = present | set(vs)
            new_used = set(used)
            try:
                _resolve_edges(g, ear.vertex_pairs(), new_used)
            except ValueError:
                continue
            if not g.is_connected(skip_vertices=new_present, allow_empty=True):
                continue
            got = rec(h0, new_present, new_used, ears + [(kind, vs)])
            if got is not None:
                return got
        return None

    for cyc in cycles:
        if not g.is_connected(skip_vertices=set(cyc), allow_empty=True):
            continue
        used: set[int] = set()
        try:
            _resolve_edges(g, list(zip(cyc, cyc[1:] + cyc[:1])), used)
        except ValueError:
            continue
        got = rec(list(cyc), set(cyc), used, [])
        if isinstance(got, (EarDecomposition, SearchFailure)):
            return got
    return SearchFailure("exhausted", "no decomposition found under the structural constraints")
