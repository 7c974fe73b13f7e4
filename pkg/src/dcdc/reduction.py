"""Correct reductions of mixed graphs and consecutive reduction runs.

A correct reduction of a vertex set U removes U, replaces every edge
touching U by its two orientations, and partitions those together with
the arcs at U into correct directed paths and cycles: no element may
contain a forbidden pair, use both orientations of one edge, or revisit
a vertex (a path may close up at its single outside endpoint, which
turns into a directed loop).  Paths contract to new arcs carrying the
concatenated expansions; cycles are emitted and become members of the
directed cycle double cover once the run completes.

Enumeration works through per-vertex bijections between inbound and
outbound arc slots, which is exhaustive because every slot at a removed
vertex must be consumed exactly once.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .graph import Multigraph
from .mixed import Arc, DirectedEdge, MixedGraph, boundary, is_cut_obstacle


@dataclass(frozen=True, order=True)
class Step:
    """One directed move of a reduction element.

    kind "arc" references an existing arc; kind "edge" is a fresh
    orientation of a plain edge (the paper's A-tilde).
    """

    kind: str
    ref: int
    tail: int
    head: int

    def signature(self) -> tuple:
        return (self.kind, self.ref, self.tail, self.head)


Walk = tuple[Step, ...]


def _walk_signature(walk: Walk, cycle: bool) -> tuple:
    sigs = tuple(s.signature() for s in walk)
    if not cycle:
        return sigs
    rotations = [sigs[i:] + sigs[:i] for i in range(len(sigs))]
    return min(rotations)


@dataclass(frozen=True)
class ReductionChoice:
    """One correct reduction of ``u``: the partition into paths and cycles.

    Walks are kept sorted by signature so that replaying a choice
    allocates identical arc identifiers.
    """

    u: frozenset[int]
    paths: tuple[Walk, ...]
    cycles: tuple[Walk, ...]

    @classmethod
    def make(cls, u: frozenset[int], paths: list[Walk], cycles: list[Walk]) -> ReductionChoice:
        return cls(
            u,
            tuple(sorted(paths, key=lambda w: _walk_signature(w, False))),
            tuple(sorted(cycles, key=lambda w: _walk_signature(w, True))),
        )

    def signature(self) -> tuple:
        return (
            tuple(_walk_signature(p, False) for p in self.paths),
            tuple(_walk_signature(c, True) for c in self.cycles),
        )

    def loop_paths(self) -> list[Walk]:
        """Paths that start and end at the same outside vertex.

        Their replacement arcs are directed loops; legal, but worth
        surfacing in diagnostics.
        """
        return [p for p in self.paths if p[0].tail == p[-1].head]

    def path_vertex_walks(self) -> list[tuple[int, ...]]:
        return [tuple([p[0].tail] + [s.head for s in p]) for p in self.paths]


def _collect_steps(m: MixedGraph, u: frozenset[int]) -> list[Step]:
    steps: list[Step] = []
    for eid in sorted(m.edges):
        a, b = m.edges[eid]
        if a in u or b in u:
            steps.append(Step("edge", eid, a, b))
            steps.append(Step("edge", eid, b, a))
    for aid in sorted(m.arcs):
        arc = m.arcs[aid]
        if arc.tail in u or arc.head in u:
            steps.append(Step("arc", aid, arc.tail, arc.head))
    return steps


def _assemble(steps: list[Step], successor: dict[Step, Step], u: frozenset[int]) -> tuple[list[Walk], list[Walk]]:
    """Chase the per-vertex pairing into paths and closed orbits."""
    paths: list[Walk] = []
    used: set[Step] = set()
    for start in steps:
        if start.tail in u or start in used:
            continue
        walk = [start]
        used.add(start)
        cur = start
        while cur.head in u:
            cur = successor[cur]
            walk.append(cur)
            used.add(cur)
        paths.append(tuple(walk))
    cycles: list[Walk] = []
    remaining = [s for s in steps if s not in used]
    seen: set[Step] = set()
    for start in remaining:
        if start in seen:
            continue
        walk = [start]
        seen.add(start)
        cur = successor[start]
        while cur != start:
            walk.append(cur)
            seen.add(cur)
            cur = successor[cur]
        cycles.append(tuple(walk))
    return paths, cycles


def _element_ok(m: MixedGraph, walk: Walk, cycle: bool) -> bool:
    arc_ids = [s.ref for s in walk if s.kind == "arc"]
    for i, a in enumerate(arc_ids):
        for b in arc_ids[i + 1:]:
            if a != b and m.is_forbidden(a, b):
                return False
    oriented = set()
    for s in walk:
        if s.kind == "edge":
            if (s.ref, s.head, s.tail) in oriented:
                return False  # both orientations of one edge in one element
            oriented.add((s.ref, s.tail, s.head))
    visits = [s.tail for s in walk]
    if cycle:
        return len(set(visits)) == len(visits)
    visits.append(walk[-1].head)
    interior = visits[1:-1]
    if len(set(interior)) != len(interior):
        return False
    if visits[0] in interior or visits[-1] in interior:
        return False
    return True  # equal endpoints allowed: the path contracts to a loop


def choice_is_correct(m: MixedGraph, choice: ReductionChoice) -> bool:
    return all(_element_ok(m, p, False) for p in choice.paths) and all(
        _element_ok(m, c, True) for c in choice.cycles
    )


def enumerate_correct_reductions(
    m: MixedGraph, u: set[int] | frozenset[int], limit: int = 10 ** 6
) -> list[ReductionChoice]:
    """All correct reductions of u on m, duplicate-free, in signature order."""
    ufs = frozenset(u)
    if not ufs <= m.vertices:
        raise ValueError("u is not a subset of the vertex set")
    steps = _collect_steps(m, ufs)
    ins: dict[int, list[Step]] = {q: [] for q in sorted(ufs)}
    outs: dict[int, list[Step]] = {q: [] for q in sorted(ufs)}
    for s in steps:
        if s.head in ufs:
            ins[s.head].append(s)
        if s.tail in ufs:
            outs[s.tail].append(s)
    import math

    total = 1
    for q in ins:
        if len(ins[q]) != len(outs[q]):
            raise ValueError(f"in/out imbalance at {q}; mixed graph violates the discipline")
        total *= math.factorial(len(outs[q]))
    if total > limit:
        raise ValueError(f"enumeration would explore {total} pairings; refusing (limit {limit})")

    qs = sorted(ufs)
    seen: set[tuple] = set()
    found: list[ReductionChoice] = []
    for combo in itertools.product(*(itertools.permutations(outs[q]) for q in qs)):
        successor: dict[Step, Step] = {}
        for q, perm in zip(qs, combo):
            for in_step, out_step in zip(ins[q], perm):
                successor[in_step] = out_step
        paths, cycles = _assemble(steps, successor, ufs)
        if not all(_element_ok(m, p, False) for p in paths):
            continue
        if not all(_element_ok(m, c, True) for c in cycles):
            continue
        choice = ReductionChoice.make(ufs, paths, cycles)
        sig = choice.signature()
        if sig in seen:
            continue
        seen.add(sig)
        found.append(choice)
    found.sort(key=lambda c: c.signature())
    return found


@dataclass(frozen=True)
class EmittedCycle:
    """A correct cycle dropped by a reduction, with its full expansion."""

    walk: Walk
    expansion: tuple[DirectedEdge, ...]


@dataclass(frozen=True)
class ApplyResult:
    graph: MixedGraph
    emitted: tuple[EmittedCycle, ...]
    new_arcs: tuple[Arc, ...]  # aligned with choice.paths


def _step_expansion(m: MixedGraph, s: Step) -> tuple[DirectedEdge, ...]:
    if s.kind == "edge":
        return ((s.ref, s.tail, s.head),)
    exp = m.arcs[s.ref].expansion
    return exp if exp else ()


def apply(m: MixedGraph, choice: ReductionChoice) -> ApplyResult:
    """Perform the reduction; returns the new mixed graph and emissions.

    Raises if the choice is stale (was not generated from m) or if the
    result breaks the degree discipline.
    """
    u = choice.u
    if not u <= m.vertices:
        raise ValueError("stale choice: u is not in the current vertex set")
    consumed_arcs: set[int] = set()
    consumed_edge_steps: set[tuple] = set()
    for walk in choice.paths + choice.cycles:
        for s in walk:
            if s.kind == "arc":
                arc = m.arcs.get(s.ref)
                if arc is None or (arc.tail, arc.head) != (s.tail, s.head):
                    raise ValueError(f"stale choice: arc step {s} does not match the graph")
                consumed_arcs.add(s.ref)
            else:
                ends = m.edges.get(s.ref)
                if ends is None or set(ends) != {s.tail, s.head}:
                    raise ValueError(f"stale choice: edge step {s} does not match the graph")
                consumed_edge_steps.add(s.signature())
    expected = _collect_steps(m, u)
    expected_arcs = {s.ref for s in expected if s.kind == "arc"}
    expected_edges = {s.signature() for s in expected if s.kind == "edge"}
    if consumed_arcs != expected_arcs or consumed_edge_steps != expected_edges:
        raise ValueError("stale or partial choice: element steps do not cover A(U) and the oriented boundary")

    new_vertices = set(m.vertices) - u
    new_edges = {e: ends for e, ends in m.edges.items() if not (set(ends) & u)}
    kept_arcs = {i: a for i, a in m.arcs.items() if a.tail not in u and a.head not in u}

    next_id = m.next_arc_id
    new_arcs: list[Arc] = []
    path_arc_ids: list[int] = []
    for walk in choice.paths:
        exp: tuple[DirectedEdge, ...] = ()
        for s in walk:
            exp = exp + _step_expansion(m, s)
        arc = Arc(next_id, walk[0].tail, walk[-1].head, exp)
        new_arcs.append(arc)
        path_arc_ids.append(next_id)
        next_id += 1

    emitted = []
    for walk in choice.cycles:
        exp = ()
        for s in walk:
            exp = exp + _step_expansion(m, s)
        emitted.append(EmittedCycle(walk, exp))

    forbidden: set[tuple[int, int]] = set()
    for a, b in m.forbidden:
        if a in kept_arcs and b in kept_arcs:
            forbidden.add((a, b))

    path_u_vertices: list[set[int]] = []
    path_arc_refs: list[set[int]] = []
    for walk in choice.paths:
        touched = {s.tail for s in walk} | {s.head for s in walk}
        path_u_vertices.append(touched & u)
        path_arc_refs.append({s.ref for s in walk if s.kind == "arc"})
    # R'': new-arc pairs whose paths met inside u or inherit a forbidden pair.
    for i in range(len(choice.paths)):
        for j in range(i + 1, len(choice.paths)):
            if path_u_vertices[i] & path_u_vertices[j]:
                forbidden.add(tuple(sorted((path_arc_ids[i], path_arc_ids[j]))))
                continue
            if any(
                m.is_forbidden(a, b)
                for a in path_arc_refs[i]
                for b in path_arc_refs[j]
                if a != b
            ):
                forbidden.add(tuple(sorted((path_arc_ids[i], path_arc_ids[j]))))
    # R-tilde: new arc against surviving arc via an inherited pair.
    for i, refs in enumerate(path_arc_refs):
        for g in kept_arcs:
            if any(m.is_forbidden(a, g) for a in refs if a != g):
                forbidden.add(tuple(sorted((path_arc_ids[i], g))))

    arcs = dict(kept_arcs)
    for a in new_arcs:
        arcs[a.id] = a
    out = MixedGraph(new_vertices, new_edges, arcs, forbidden, next_arc_id=next_id)
    out.check_discipline()
    return ApplyResult(out, tuple(emitted), tuple(new_arcs))


# -- consecutive correct reductions -------------------------------------


@dataclass(frozen=True)
class TraceStep:
    u: frozenset[int]
    choice: ReductionChoice
    emitted: tuple[EmittedCycle, ...]
    new_arcs: tuple[Arc, ...]


@dataclass
class ReductionTrace:
    """Chained record of reductions; each after-state is the next before."""

    initial: MixedGraph
    steps: list[TraceStep] = field(default_factory=list)
    states: list[MixedGraph] = field(default_factory=list)

    @property
    def final(self) -> MixedGraph:
        return self.states[-1] if self.states else self.initial

    def is_complete(self) -> bool:
        return self.final.is_empty()

    def emitted_cycles(self) -> list[EmittedCycle]:
        return [c for s in self.steps for c in s.emitted]

    def diagnostics(self) -> list[str]:
        out = []
        for i, s in enumerate(self.steps):
            loops = s.choice.loop_paths()
            if loops:
                out.append(f"step {i}: {len(loops)} path(s) closed into directed loops")
        return out

    def extended(self, step: TraceStep, state: MixedGraph) -> ReductionTrace:
        t = ReductionTrace(self.initial, list(self.steps) + [step], list(self.states) + [state])
        return t


@dataclass(frozen=True)
class CcrFailure:
    index: int
    u: frozenset[int]
    reason: str
    cut_obstacle: bool


class ExhaustiveStrategy:
    """Backtracking over the full choice list, in deterministic order."""

    backtracking = True

    def __init__(self, seed: int | None = None, limit: int = 10 ** 6) -> None:
        self.seed = seed
        self.limit = limit

    def choices(self, m: MixedGraph, u: frozenset[int], index: int) -> list[ReductionChoice]:
        found = enumerate_correct_reductions(m, u, limit=self.limit)
        if self.seed is not None:
            import random

            random.Random((self.seed, index)).shuffle(found)
        return found

    def observe(self, m: MixedGraph, u: frozenset[int], choice: ReductionChoice, result: ApplyResult) -> None:
        pass


class ScriptedStrategy:
    """Replay a stored trace by choice signature, without enumeration."""

    backtracking = False

    def __init__(self, signatures: list[tuple]) -> None:
        self.signatures = signatures

    @classmethod
    def from_trace(cls, trace: ReductionTrace) -> ScriptedStrategy:
        return cls([s.choice.signature() for s in trace.steps])

    def choices(self, m: MixedGraph, u: frozenset[int], index: int) -> list[ReductionChoice]:
        path_sigs, cycle_sigs = self.signatures[index]
        paths = [tuple(Step(*t) for t in sig) for sig in path_sigs]
        cycles = [tuple(Step(*t) for t in sig) for sig in cycle_sigs]
        choice = ReductionChoice.make(u, paths, cycles)
        if not choice_is_correct(m, choice):
            return []
        return [choice]

    def observe(self, m, u, choice, result) -> None:
        pass


class CycleScriptStrategy:
    """Reductions scripted by a known family of directed cycles.

    Every directed edge of the host must lie on exactly one member (the
    family is a directed cycle double cover, e.g. the facial cycles of
    an embedding).  Each arc's expansion is then a contiguous segment of
    one member, and the pairing at every removed vertex is forced:
    follow the cycle.  This sidesteps factorial enumeration entirely and
    is what makes whole-cycle reductions (the final H0 step) tractable.
    """

    backtracking = False

    def __init__(self, family: list[tuple[DirectedEdge, ...]]) -> None:
        self.family = [tuple(c) for c in family]
        self.lookup: dict[DirectedEdge, tuple[int, int]] = {}
        for ci, cyc in enumerate(self.family):
            tails = [t for (_, t, _) in cyc]
            if len(set(tails)) != len(tails):
                raise ValueError(f"scripting cycle {ci} revisits a vertex")
            for pos, de in enumerate(cyc):
                if de in self.lookup:
                    raise ValueError(f"directed edge {de} appears on two cycles")
                self.lookup[de] = (ci, pos)
        self.segments: dict[int, tuple[int, int, int]] = {}  # arc id -> (cycle, start, end)

    def _segment(self, s: Step) -> tuple[int, int, int]:
        if s.kind == "edge":
            de = (s.ref, s.tail, s.head)
            if de not in self.lookup:
                raise ValueError(f"directed edge {de} is not on any scripting cycle")
            ci, pos = self.lookup[de]
            return (ci, pos, pos)
        return self.segments[s.ref]

    def build_choice(self, m: MixedGraph, u: frozenset[int]) -> ReductionChoice:
        steps = _collect_steps(m, u)
        successor: dict[Step, Step] = {}
        outs_by_vertex: dict[int, list[Step]] = {}
        for s in steps:
            if s.tail in u:
                outs_by_vertex.setdefault(s.tail, []).append(s)
        for s in steps:
            if s.head not in u:
                continue
            ci, _, end = self._segment(s)
            want = (end + 1) % len(self.family[ci])
            nxt = [
                t
                for t in outs_by_vertex.get(s.head, [])
                if self._segment(t)[0] == ci and self._segment(t)[1] == want
            ]
            if len(nxt) != 1:
                raise ValueError(f"scripting broke at vertex {s.head}: {len(nxt)} successors")
            successor[s] = nxt[0]
        paths, cycles = _assemble(steps, successor, u)
        choice = ReductionChoice.make(u, paths, cycles)
        if not choice_is_correct(m, choice):
            raise ValueError("scripted pairing produced an incorrect reduction")
        return choice

    def choices(self, m: MixedGraph, u: frozenset[int], index: int) -> list[ReductionChoice]:
        return [self.build_choice(m, u)]

    def observe(self, m: MixedGraph, u: frozenset[int], choice: ReductionChoice, result: ApplyResult) -> None:
        for walk, arc in zip(choice.paths, result.new_arcs):
            segs = [self._segment(s) for s in walk]
            self.segments[arc.id] = (segs[0][0], segs[0][1], segs[-1][2])


def validate_partition(g: Multigraph, partition: list[set[int]]) -> list[str]:
    """Connected-partition diagnostics for a ccr of the listed sets in order."""
    out: list[str] = []
    allv: list[int] = []
    for part in partition:
        allv.extend(part)
    if len(allv) != len(set(allv)):
        out.append("partition parts overlap")
    if set(allv) != set(g.vertices):
        out.append("partition does not cover the vertex set")
    removed: set[int] = set()
    for i, part in enumerate(partition[:-1]):
        removed |= set(part)
        if not g.is_connected(skip_vertices=removed, allow_empty=True):
            out.append(f"removing the first {i + 1} parts disconnects the remainder")
    return out


def run_ccr(
    g: Multigraph,
    partition: list[set[int]],
    strategy,
    initial: MixedGraph | None = None,
) -> ReductionTrace | CcrFailure:
    """Consecutive correct reduction of the parts in listed order.

    With a backtracking strategy this searches all choice orders and
    returns the first complete trace; otherwise each step takes the
    first offered choice.  Failures report the earliest index where no
    offered choice could be applied, with a cut-obstacle flag.
    """
    problems = validate_partition(g, partition)
    if problems:
        raise ValueError("invalid partition: " + "; ".join(problems))
    start = initial if initial is not None else MixedGraph.from_graph(g)
    trace0 = ReductionTrace(start)
    best_failure: CcrFailure | None = None

    def fail(index: int, m: MixedGraph, u: frozenset[int], reason: str) -> None:
        nonlocal best_failure
        f = CcrFailure(index, u, reason, is_cut_obstacle(m, u))
        if best_failure is None or f.index > best_failure.index:
            best_failure = f

    def rec(trace: ReductionTrace, index: int) -> ReductionTrace | None:
        if index == len(partition):
            return trace
        m = trace.final
        u = frozenset(partition[index])
        found = strategy.choices(m, u, index)
        if not found:
            fail(index, m, u, "no correct reduction offered")
            return None
        for choice in found:
            result = apply(m, choice)
            strategy.observe(m, u, choice, result)
            step = TraceStep(u, choice, result.emitted, result.new_arcs)
            done = rec(trace.extended(step, result.graph), index + 1)
            if done is not None:
                return done
            if not strategy.backtracking:
                break
        return None

    done = rec(trace0, 0)
    if done is not None:
        return done
    assert best_failure is not None
    return best_failure


# -- reduction processes over ear blocks ---------------------------------


@dataclass(frozen=True)
class Complete:
    trace: ReductionTrace


@dataclass(frozen=True)
class Incomplete:
    j: int
    reason: str
    witness: dict

    @property
    def has_cut_obstacle(self) -> bool:
        return self.reason == "cut-obstacle"


def run_reduction_process(
    m: MixedGraph,
    interiors: list[tuple[int, frozenset[int]]],
    exhaustive_check: bool = False,
) -> Complete | Incomplete | tuple[Complete | Incomplete, list[Incomplete]]:
    """Run a reduction process over interiors [(label j, U), ...] in order.

    A process stops in front of the first interior that is a
    cut-obstacle or has no correct reduction; it is complete when it
    gets through every interior.  Backtracks over all reduction choices
    and returns the first complete process found, else the incomplete
    outcome that got furthest (smallest label).  With
    ``exhaustive_check`` the whole choice tree is walked and every
    incomplete leaf is returned alongside, which is how the dichotomy
    claims are verified per instance.
    """
    incomplete_leaves: list[Incomplete] = []
    complete_traces: list[ReductionTrace] = []

    def censor(mm: MixedGraph, u: frozenset[int]) -> dict:
        e, a = boundary(mm, u)
        return {"u": sorted(u), "boundary_edges": sorted(e), "boundary_arcs": sorted(a)}

    def rec(trace: ReductionTrace, index: int) -> None:
        mm = trace.final
        if index == len(interiors):
            complete_traces.append(trace)
            return
        label, u = interiors[index]
        if is_cut_obstacle(mm, u):
            incomplete_leaves.append(Incomplete(label, "cut-obstacle", censor(mm, u)))
            return
        found = enumerate_correct_reductions(mm, u)
        if not found:
            incomplete_leaves.append(Incomplete(label, "no-correct-reduction", censor(mm, u)))
            return
        for choice in found:
            result = apply(mm, choice)
            step = TraceStep(u, choice, result.emitted, result.new_arcs)
            rec(trace.extended(step, result.graph), index + 1)
            if complete_traces and not exhaustive_check:
                return

    rec(ReductionTrace(m), 0)
    if complete_traces:
        outcome: Complete | Incomplete = Complete(complete_traces[0])
    else:
        outcome = min(incomplete_leaves, key=lambda l: l.j)
    if exhaustive_check:
        return outcome, incomplete_leaves
    return outcome


# -- extraction and verification -----------------------------------------

DirectedCycleFamily = list[tuple[DirectedEdge, ...]]


def extract_dcdc(trace: ReductionTrace) -> DirectedCycleFamily:
    """Expand every emitted correct cycle into the original graph."""
    if not trace.is_complete():
        raise ValueError("trace is not complete; the final mixed graph is nonempty")
    return [c.expansion for c in trace.emitted_cycles()]


def verify_dcdc(g: Multigraph, family: DirectedCycleFamily) -> bool:
    """Each member a genuine directed cycle of g, each edge covered twice, oppositely."""
    from collections import Counter

    coverage: Counter = Counter()
    for member in family:
        if not member:
            return False
        tails = [t for (_, t, _) in member]
        heads = [h for (_, _, h) in member]
        for i in range(len(member)):
            if heads[i] != tails[(i + 1) % len(member)]:
                return False
        if len(set(tails)) != len(tails):
            return False
        for eid, t, h in member:
            if not g.has_edge_id(eid) or set(g.ends(eid)) != {t, h}:
                return False
            coverage[(eid, t, h)] += 1
    for eid in g.edge_ids:
        a, b = g.ends(eid)
        if a == b:
            if coverage[(eid, a, b)] != 2:
                return False
        elif coverage[(eid, a, b)] != 1 or coverage[(eid, b, a)] != 1:
            return False
    return True
