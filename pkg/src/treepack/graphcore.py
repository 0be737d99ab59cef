"""Multigraphs with stable edge ids, unit-capacity cuts, and splitting-off.

The graph model is deliberately small: integer vertex ids, integer edge ids
mapping to unordered endpoint pairs, parallel edges and loops allowed.  Edge
ids are never reused, even after deletions, so a reduction trace can be
replayed forward (original -> reduced) or backward (reduced -> original)
and reproduce ids exactly.

Cut routines use unit-capacity augmenting paths; a loop never counts toward
any cut.  The splitting-off routines implement the classical degree-lowering
operation (replace edges uv, uv' at u by a single edge vv') together with a
verified search for a cut-preserving pair at a vertex, and a reducer that
drives all non-terminals toward the bipartite degree-3 normal form used by
the hypergraph packing pipeline.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .errors import (
    InstanceParseError,
    InternalInvariantError,
    InvalidArgumentError,
    PreconditionViolationError,
)


class Multigraph:
    """Labeled multigraph; loops and parallel edges permitted.

    Edge ids are allocated from a monotone counter and never recycled, even
    across deletions.  A loop contributes 2 to the degree of its vertex.
    """

    __slots__ = ("_vertices", "_edges", "_incidence", "_next_edge_id")

    def __init__(self):
        self._vertices: set[int] = set()
        self._edges: dict[int, tuple[int, int]] = {}
        self._incidence: dict[int, set[int]] = {}
        self._next_edge_id = 0

    # -- construction ------------------------------------------------------

    def add_vertex(self, v: int) -> None:
        if v not in self._vertices:
            self._vertices.add(v)
            self._incidence[v] = set()

    def add_edge(self, u: int, v: int, eid: int | None = None) -> int:
        if u not in self._vertices or v not in self._vertices:
            raise InvalidArgumentError(f"edge endpoints {u},{v} must be existing vertices")
        if eid is None:
            eid = self._next_edge_id
        elif eid in self._edges:
            raise InvalidArgumentError(f"edge id {eid} already in use")
        self._next_edge_id = max(self._next_edge_id, eid + 1)
        self._edges[eid] = (u, v)
        self._incidence[u].add(eid)
        self._incidence[v].add(eid)
        return eid

    def delete_edge(self, eid: int) -> None:
        u, v = self.endpoints(eid)
        del self._edges[eid]
        self._incidence[u].discard(eid)
        self._incidence[v].discard(eid)

    def remove_vertex(self, v: int) -> None:
        if v not in self._vertices:
            raise InvalidArgumentError(f"no vertex {v}")
        if self._incidence[v]:
            raise InvalidArgumentError(f"vertex {v} is not isolated")
        self._vertices.discard(v)
        del self._incidence[v]

    def copy(self) -> "Multigraph":
        g = Multigraph()
        g._vertices = set(self._vertices)
        g._edges = dict(self._edges)
        g._incidence = {v: set(ids) for v, ids in self._incidence.items()}
        g._next_edge_id = self._next_edge_id
        return g

    @classmethod
    def from_edges(cls, vertices, edges) -> "Multigraph":
        """Build from an iterable of vertices and (eid, u, v) triples."""
        g = cls()
        for v in vertices:
            g.add_vertex(v)
        for eid, u, v in edges:
            g.add_edge(u, v, eid=eid)
        return g

    # -- queries -----------------------------------------------------------

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(self._vertices)

    @property
    def edges(self) -> dict[int, tuple[int, int]]:
        return dict(self._edges)

    @property
    def next_edge_id(self) -> int:
        return self._next_edge_id

    def has_vertex(self, v: int) -> bool:
        return v in self._vertices

    def has_edge(self, eid: int) -> bool:
        return eid in self._edges

    def endpoints(self, eid: int) -> tuple[int, int]:
        try:
            return self._edges[eid]
        except KeyError:
            raise InvalidArgumentError(f"no edge {eid}") from None

    def other_end(self, eid: int, v: int) -> int:
        a, b = self.endpoints(eid)
        if v == a:
            return b
        if v == b:
            return a
        raise InvalidArgumentError(f"edge {eid} is not incident to {v}")

    def is_loop(self, eid: int) -> bool:
        a, b = self.endpoints(eid)
        return a == b

    def incident_edges(self, v: int) -> list[int]:
        if v not in self._vertices:
            raise InvalidArgumentError(f"no vertex {v}")
        return sorted(self._incidence[v])

    def degree(self, v: int) -> int:
        d = 0
        for eid in self._incidence[v]:
            a, b = self._edges[eid]
            d += 2 if a == b else 1
        return d

    def neighbors(self, v: int) -> set[int]:
        out = set()
        for eid in self._incidence[v]:
            a, b = self._edges[eid]
            out.add(b if a == v else a)
        out.discard(v)
        return out

    def edge_count(self) -> int:
        return len(self._edges)

    def vertex_count(self) -> int:
        return len(self._vertices)

    def is_connected(self) -> bool:
        if not self._vertices:
            return True
        start = min(self._vertices)
        return len(self._component_of(start)) == len(self._vertices)

    def _component_of(self, start: int) -> set[int]:
        seen = {start}
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for eid in self._incidence[v]:
                w = self.other_end(eid, v)
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return seen

    def __eq__(self, other) -> bool:
        if not isinstance(other, Multigraph):
            return NotImplemented
        return self._vertices == other._vertices and self._normalized() == other._normalized()

    def _normalized(self) -> dict[int, tuple[int, int]]:
        return {eid: (min(u, v), max(u, v)) for eid, (u, v) in self._edges.items()}

    def __repr__(self) -> str:
        return f"Multigraph(|V|={len(self._vertices)}, |E|={len(self._edges)})"


# -- reduction trace ---------------------------------------------------------


@dataclass(frozen=True)
class SplitStep:
    """Edges e1=(center,v), e2=(center,v') replaced by child=(v,v')."""

    center: int
    e1: int
    e1_ends: tuple[int, int]
    e2: int
    e2_ends: tuple[int, int]
    child: int
    child_ends: tuple[int, int]


@dataclass(frozen=True)
class SuppressStep:
    """Final split at a degree-2 vertex, followed by removing the vertex."""

    removed: int
    e1: int
    e1_ends: tuple[int, int]
    e2: int
    e2_ends: tuple[int, int]
    child: int
    child_ends: tuple[int, int]


@dataclass(frozen=True)
class DeleteEdgeStep:
    edge: int
    ends: tuple[int, int]


@dataclass(frozen=True)
class RemoveIsolatedStep:
    vertex: int


TraceStep = SplitStep | SuppressStep | DeleteEdgeStep | RemoveIsolatedStep


@dataclass
class SplitTrace:
    """Ordered, replayable log of reduction steps.

    apply() maps the original graph to the reduced one with identical edge
    ids; unapply() inverts it exactly.
    """

    steps: list[TraceStep] = field(default_factory=list)

    def append(self, step: TraceStep) -> None:
        self.steps.append(step)

    def extend(self, steps) -> None:
        self.steps.extend(steps)

    def __len__(self) -> int:
        return len(self.steps)

    def apply(self, g: Multigraph) -> Multigraph:
        out = g.copy()
        for step in self.steps:
            if isinstance(step, (SplitStep, SuppressStep)):
                out.delete_edge(step.e1)
                out.delete_edge(step.e2)
                out.add_edge(step.child_ends[0], step.child_ends[1], eid=step.child)
                if isinstance(step, SuppressStep):
                    out.remove_vertex(step.removed)
            elif isinstance(step, DeleteEdgeStep):
                out.delete_edge(step.edge)
            else:
                out.remove_vertex(step.vertex)
        return out

    def unapply(self, g: Multigraph) -> Multigraph:
        out = g.copy()
        for step in reversed(self.steps):
            if isinstance(step, (SplitStep, SuppressStep)):
                if isinstance(step, SuppressStep):
                    out.add_vertex(step.removed)
                out.delete_edge(step.child)
                out.add_edge(step.e1_ends[0], step.e1_ends[1], eid=step.e1)
                out.add_edge(step.e2_ends[0], step.e2_ends[1], eid=step.e2)
            elif isinstance(step, DeleteEdgeStep):
                out.add_vertex(step.ends[0])
                out.add_vertex(step.ends[1])
                out.add_edge(step.ends[0], step.ends[1], eid=step.edge)
            else:
                out.add_vertex(step.vertex)
        return out


# -- cuts --------------------------------------------------------------------


def min_cut(g: Multigraph, s: int, t: int) -> tuple[int, frozenset[int]]:
    """Minimum number of edges separating s from t, plus the s-side of one
    minimum cut.

    Unit-capacity augmenting paths: each non-loop edge carries at most one
    unit of flow in one direction.  The returned size equals the maximum
    number of edge-disjoint s-t paths.
    """
    if s == t:
        raise InvalidArgumentError("min_cut needs two distinct vertices")
    if not g.has_vertex(s) or not g.has_vertex(t):
        raise InvalidArgumentError("min_cut endpoints must be vertices of the graph")

    # flow[eid] is +1 when one unit runs from the stored first endpoint to
    # the second, -1 for the reverse, 0 when idle.
    flow: dict[int, int] = {}
    edges = g.edges

    def residual_neighbors(x: int):
        for eid in g.incident_edges(x):
            a, b = edges[eid]
            if a == b:
                continue
            if x == a and flow.get(eid, 0) < 1:
                yield eid, b, 1
            elif x == b and flow.get(eid, 0) > -1:
                yield eid, a, -1

    size = 0
    while True:
        parent: dict[int, tuple[int, int, int]] = {}
        seen = {s}
        queue = deque([s])
        found = False
        while queue and not found:
            x = queue.popleft()
            for eid, y, direction in residual_neighbors(x):
                if y in seen:
                    continue
                seen.add(y)
                parent[y] = (x, eid, direction)
                if y == t:
                    found = True
                    break
                queue.append(y)
        if not found:
            return size, frozenset(seen)
        y = t
        while y != s:
            x, eid, direction = parent[y]
            flow[eid] = flow.get(eid, 0) + direction
            y = x
        size += 1


def steiner_connectivity(g: Multigraph, terminals: frozenset[int] | set[int]) -> int:
    """Size of a minimum edge cut separating the terminal set.

    Equals the minimum over pairwise terminal min-cuts.  A disconnected
    graph reports 0.
    """
    size, _ = steiner_min_cut(g, terminals)
    return size


def steiner_min_cut(g: Multigraph, terminals) -> tuple[int, frozenset[int]]:
    """Like steiner_connectivity but also returns one side of a minimum
    terminal-separating cut (empty side when the graph is disconnected)."""
    tset = frozenset(terminals)
    if len(tset) < 2:
        raise InvalidArgumentError("terminal connectivity needs at least two terminals")
    if not tset <= g.vertices:
        raise InvalidArgumentError("terminals must be vertices of the graph")
    if not g.is_connected():
        return 0, frozenset()
    t0 = min(tset)
    best = None
    best_side: frozenset[int] = frozenset()
    for t in sorted(tset - {t0}):
        size, side = min_cut(g, t0, t)
        if best is None or size < best:
            best, best_side = size, side
    assert best is not None
    return best, best_side


# -- splitting-off -----------------------------------------------------------


def _split_inplace(g: Multigraph, u: int, e1: int, e2: int) -> SplitStep:
    """Mutating core of split_off; returns the trace step."""
    if e1 == e2:
        raise InvalidArgumentError("split needs two distinct edges")
    for eid in (e1, e2):
        a, b = g.endpoints(eid)
        if u not in (a, b):
            raise InvalidArgumentError(f"edge {eid} is not incident to {u}")
        if a == b:
            raise InvalidArgumentError(f"edge {eid} is a loop at {u} and cannot be split")
    v = g.other_end(e1, u)
    w = g.other_end(e2, u)
    e1_ends = g.endpoints(e1)
    e2_ends = g.endpoints(e2)
    g.delete_edge(e1)
    g.delete_edge(e2)
    child = g.add_edge(v, w)
    return SplitStep(center=u, e1=e1, e1_ends=e1_ends, e2=e2, e2_ends=e2_ends,
                     child=child, child_ends=(v, w))


def split_off(g: Multigraph, u: int, e1: int, e2: int) -> tuple[Multigraph, SplitStep]:
    """Replace edges uv, uv' by a fresh edge vv' (a loop when v = v').

    Pure: returns a new graph plus the trace step describing the move.
    """
    out = g.copy()
    step = _split_inplace(out, u, e1, e2)
    return out, step


def _has_incident_cut_edge(g: Multigraph, u: int) -> bool:
    for eid in g.incident_edges(u):
        if g.is_loop(eid):
            continue
        v = g.other_end(eid, u)
        probe = g.copy()
        probe.delete_edge(eid)
        if v not in probe._component_of(u):
            return True
    return False


def _pairwise_cuts(g: Multigraph, vertices: list[int]) -> dict[tuple[int, int], int]:
    cuts = {}
    for i, x in enumerate(vertices):
        for y in vertices[i + 1:]:
            cuts[(x, y)], _ = min_cut(g, x, y)
    return cuts


def mader_split(g: Multigraph, u: int) -> tuple[int, int]:
    """Find two edges at u whose split preserves every pairwise min-cut
    among the remaining vertices.

    Candidate pairs are tried in ascending edge-id order and each one is
    verified by recomputing all pairwise min-cuts on the split graph; the
    first verified pair wins.  Such a pair always exists when deg(u) != 3,
    u meets no cut-edge and the graph is connected, so exhausting the
    search signals a cut-computation bug.
    """
    if not g.has_vertex(u):
        raise InvalidArgumentError(f"no vertex {u}")
    deg = g.degree(u)
    if deg == 3:
        raise PreconditionViolationError("cannot split at a degree-3 vertex")
    if deg < 2:
        raise PreconditionViolationError("need at least two edge ends at the vertex")
    if not g.is_connected():
        raise PreconditionViolationError("graph must be connected")
    if _has_incident_cut_edge(g, u):
        raise PreconditionViolationError(f"vertex {u} is incident with a cut-edge")

    others = sorted(g.vertices - {u})
    before = _pairwise_cuts(g, others)
    candidates = [eid for eid in g.incident_edges(u) if not g.is_loop(eid)]
    for i, e1 in enumerate(candidates):
        for e2 in candidates[i + 1:]:
            trial, _ = split_off(g, u, e1, e2)
            ok = True
            for (x, y), value in before.items():
                after, _ = min_cut(trial, x, y)
                if after != value:
                    ok = False
                    break
            if ok:
                return e1, e2
    raise InternalInvariantError(
        f"no cut-preserving pair at vertex {u}: min_cut computation is suspect")


def _drain_vertex(g: Multigraph, u: int) -> list[TraceStep]:
    """Mutating helper: split/delete at u until it is isolated, then remove.

    Requires even degree.  Loops at u are deleted (they never affect a
    cut); the final two edge ends are split and logged as a suppression.
    A degree-2 split always preserves pairwise min-cuts among the other
    vertices because any path through u uses both of its edges and reroutes
    over the child edge, so no search is needed at that stage.
    """
    steps: list[TraceStep] = []
    if g.degree(u) % 2 != 0:
        raise PreconditionViolationError(f"vertex {u} has odd degree")
    while True:
        loops = [eid for eid in g.incident_edges(u) if g.is_loop(eid)]
        for eid in loops:
            steps.append(DeleteEdgeStep(edge=eid, ends=g.endpoints(eid)))
            g.delete_edge(eid)
        deg = g.degree(u)
        if deg == 0:
            break
        if deg == 2:
            e1, e2 = g.incident_edges(u)
            split = _split_inplace(g, u, e1, e2)
            g.remove_vertex(u)
            steps.append(SuppressStep(removed=u, e1=split.e1, e1_ends=split.e1_ends,
                                      e2=split.e2, e2_ends=split.e2_ends,
                                      child=split.child, child_ends=split.child_ends))
            return steps
        e1, e2 = mader_split(g, u)
        steps.append(_split_inplace(g, u, e1, e2))
    g.remove_vertex(u)
    steps.append(RemoveIsolatedStep(vertex=u))
    return steps


def isolate_even_nonterminal(g: Multigraph, terminals, u: int) -> tuple[Multigraph, list[TraceStep]]:
    """Split an even-degree non-terminal down to degree 0 and remove it.

    All pairwise min-cuts among the remaining vertices are preserved, so in
    particular the terminal connectivity is unchanged.
    """
    tset = frozenset(terminals)
    if u in tset:
        raise InvalidArgumentError(f"vertex {u} is a terminal")
    if not g.has_vertex(u):
        raise InvalidArgumentError(f"no vertex {u}")
    if g.degree(u) % 2 != 0:
        raise PreconditionViolationError(f"vertex {u} has odd degree")
    out = g.copy()
    steps = _drain_vertex(out, u)
    return out, steps


# -- instance reduction ------------------------------------------------------


@dataclass
class ReduceResult:
    graph: Multigraph
    terminals: frozenset[int]
    trace: SplitTrace
    form: str  # "fkk" when every non-terminal is degree-3 with three distinct
    #            terminal neighbors; "partial" otherwise


def _is_normal_form(g: Multigraph, tset: frozenset[int]) -> bool:
    for u in g.vertices - tset:
        if g.degree(u) != 3:
            return False
        nbrs = g.neighbors(u)
        if len(nbrs) != 3 or not nbrs <= tset:
            return False
    return True


def reduce_instance(g: Multigraph, terminals, threshold: int) -> ReduceResult:
    """Drive every non-terminal toward degree 3 with distinct terminal
    neighbors while keeping the terminal connectivity at or above
    `threshold`.

    Fixpoint loop: even-degree non-terminals are split to isolation and
    removed; odd-degree non-terminals above 3 are split down to 3; loops,
    edges between two non-terminals and parallel edges at a non-terminal
    are deleted whenever the connectivity check on the deleted graph still
    meets the threshold.  Every change is logged so the caller can replay
    or invert the whole reduction.
    """
    tset = frozenset(terminals)
    if not tset <= g.vertices:
        raise InvalidArgumentError("terminals must be vertices of the graph")
    start = steiner_connectivity(g, tset)
    if start < threshold:
        raise InvalidArgumentError(
            f"terminal connectivity {start} is below the threshold {threshold}")

    work = g.copy()
    trace = SplitTrace()

    def deletion_candidate(eid: int) -> bool:
        a, b = work.endpoints(eid)
        if a == b:
            return True  # loops never sit in a cut and never help a packing
        if a not in tset and b not in tset:
            return True
        if a in tset and b in tset:
            return False
        hub = a if a not in tset else b
        if work.degree(hub) == 1:
            # a pendant non-terminal can never carry part of a packing:
            # a tree would prune it as a leaf and a connector cannot give
            # it odd degree, so its edge is dead weight
            return True
        key = (min(a, b), max(a, b))
        for other in work.incident_edges(hub):
            if other == eid:
                continue
            oa, ob = work.endpoints(other)
            if (min(oa, ob), max(oa, ob)) == key:
                return True
        return False

    changed = True
    while changed:
        changed = False

        # Deletions guarded by the connectivity threshold.  Loops skip the
        # check (they never lie in a cut).  The guard judges the composite
        # move including the isolated-vertex cleanup that would follow,
        # else pruning a pendant non-terminal would read as a disconnect.
        for eid in sorted(work.edges):
            if not work.has_edge(eid):
                continue
            if not deletion_candidate(eid):
                continue
            ends = work.endpoints(eid)
            probe = work.copy()
            probe.delete_edge(eid)
            orphans = [v for v in sorted(set(ends))
                       if v not in tset and probe.degree(v) == 0]
            for v in orphans:
                probe.remove_vertex(v)
            if ends[0] != ends[1] and steiner_connectivity(probe, tset) < threshold:
                continue
            trace.append(DeleteEdgeStep(edge=eid, ends=ends))
            work.delete_edge(eid)
            for v in orphans:
                work.remove_vertex(v)
                trace.append(RemoveIsolatedStep(vertex=v))
            changed = True

        # Vertex rules, ascending id for reproducibility.
        for u in sorted(work.vertices - tset):
            if not work.has_vertex(u):
                continue
            deg = work.degree(u)
            if deg == 0:
                work.remove_vertex(u)
                trace.append(RemoveIsolatedStep(vertex=u))
                changed = True
                continue
            if deg % 2 == 0:
                # Drain on a copy: a cut-edge can appear mid-chain at degree
                # >= 4 and abort the drain, which must not leave the working
                # graph half-split.
                probe = work.copy()
                try:
                    steps = _drain_vertex(probe, u)
                except PreconditionViolationError:
                    continue  # not splittable right now; later passes may free it
                work = probe
                trace.extend(steps)
                changed = True
                continue
            if deg >= 5:
                if not work.is_connected() or _has_incident_cut_edge(work, u):
                    continue
                while work.degree(u) > 3:
                    try:
                        e1, e2 = mader_split(work, u)
                    except PreconditionViolationError:
                        break
                    trace.append(_split_inplace(work, u, e1, e2))
                    changed = True

    final = steiner_connectivity(work, tset)
    if final < threshold:
        raise InternalInvariantError(
            f"reduction lowered terminal connectivity to {final} < {threshold}")
    form = "fkk" if _is_normal_form(work, tset) else "partial"
    return ReduceResult(graph=work, terminals=tset, trace=trace, form=form)


# -- instance text format ----------------------------------------------------


def parse_instance(text: str) -> tuple[Multigraph, frozenset[int]]:
    """Parse the line-based instance format.

    Lines: '# ...' comments; 'graph <n> <m>' header; 'v <id>' vertex,
    't <id>' terminal, 'e <id> <u> <v>' edge.  Edge endpoints implicitly
    declare vertices.  The header counts must match what was declared.
    """
    g = Multigraph()
    terminals: set[int] = set()
    header: tuple[int, int] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        kind = fields[0]
        try:
            if kind == "graph":
                if header is not None:
                    raise InstanceParseError(lineno, "duplicate graph header")
                if len(fields) != 3:
                    raise InstanceParseError(lineno, "graph header needs two counts")
                header = (int(fields[1]), int(fields[2]))
            elif kind == "v":
                if len(fields) != 2:
                    raise InstanceParseError(lineno, "vertex line needs one id")
                g.add_vertex(int(fields[1]))
            elif kind == "t":
                if len(fields) != 2:
                    raise InstanceParseError(lineno, "terminal line needs one id")
                v = int(fields[1])
                g.add_vertex(v)
                terminals.add(v)
            elif kind == "e":
                if len(fields) != 4:
                    raise InstanceParseError(lineno, "edge line needs id and two endpoints")
                eid, u, v = int(fields[1]), int(fields[2]), int(fields[3])
                if eid < 0:
                    raise InstanceParseError(lineno, f"edge id {eid} is negative")
                if g.has_edge(eid):
                    raise InstanceParseError(lineno, f"duplicate edge id {eid}")
                g.add_vertex(u)
                g.add_vertex(v)
                g.add_edge(u, v, eid=eid)
            else:
                raise InstanceParseError(lineno, f"unknown line kind {kind!r}")
        except ValueError:
            raise InstanceParseError(lineno, "expected integer fields") from None
    if header is None:
        raise InstanceParseError(0, "missing 'graph <n> <m>' header")
    n, m = header
    if n != g.vertex_count():
        raise InstanceParseError(
            0, f"header declares {n} vertices but {g.vertex_count()} appear")
    if m != g.edge_count():
        raise InstanceParseError(
            0, f"header declares {m} edges but {g.edge_count()} appear")
    return g, frozenset(terminals)


def serialize_instance(g: Multigraph, terminals, comments: list[str] | None = None) -> str:
    """Canonical text form: sorted vertex, terminal and edge lines."""
    tset = frozenset(terminals)
    lines = [f"# {c}" for c in (comments or [])]
    lines.append(f"graph {g.vertex_count()} {g.edge_count()}")
    for v in sorted(g.vertices - tset):
        lines.append(f"v {v}")
    for v in sorted(tset):
        lines.append(f"t {v}")
    for eid in sorted(g.edges):
        u, v = g.endpoints(eid)
        lines.append(f"e {eid} {min(u, v)} {max(u, v)}")
    return "\n".join(lines) + "\n"
