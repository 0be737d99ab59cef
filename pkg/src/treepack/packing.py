"""End-to-end packing pipelines and their ground-truth oracle.

Spanning-tree packing runs the k-fold union of the graphic matroid and, on
failure, extracts a partition of the vertex set whose crossing-edge count
certifies impossibility.  Terminal-tree ("steiner") and connector packing
share one pipeline: check the requested cut threshold, reduce the instance
until non-terminals form an independent set of degree-3 vertices, replace
every non-terminal by a 3-vertex hyperedge, pack k disjoint bases of the
hypergraphic matroid, decode the bases back to edge sets of the reduced
graph, and lift the result through the reduction trace to the original
graph.  Connector decoding keeps only the two edges named by each
hyperedge's representative pair, so every used non-terminal has degree 2
before lifting and even degree after.

Every packing any pipeline hands back has already passed verify_packing;
a verification failure after a claimed success raises an internal error
rather than returning a wrong answer.  brute_force_pack is the
capacity-bounded exhaustive oracle that the test suite plays against the
pipelines.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from . import limits
from .errors import (
    InstanceParseError,
    InternalInvariantError,
    InvalidArgumentError,
)
from .graphcore import (
    DeleteEdgeStep,
    Multigraph,
    SplitStep,
    SplitTrace,
    SuppressStep,
    reduce_instance,
    steiner_min_cut,
)
from .matroid import (
    Hypergraph,
    HypergraphicMatroid,
    Partition,
    graph_edge_sets,
    graphic_matroid,
    iter_partitions,
    pack_bases,
)

MODES = ("spanning", "steiner", "connector")


@dataclass(frozen=True)
class Thresholds:
    """The cut thresholds the pipelines and experiments care about, by k."""

    k: int
    f_k: int
    g_k: int
    nwt: int
    fkk: int

    @classmethod
    def for_k(cls, k: int) -> "Thresholds":
        if k < 1:
            raise InvalidArgumentError("k must be at least 1")
        f_k = 2 * ((5 * k + 4) // 2)
        return cls(k=k, f_k=f_k, g_k=6 * k + 6, nwt=2 * k, fkk=3 * k)


def threshold_value(name: str, k: int) -> int:
    """Resolve a threshold flag: nwt | fkk | paper-f | paper-g | <integer>."""
    t = Thresholds.for_k(k)
    table = {"nwt": t.nwt, "fkk": t.fkk, "paper-f": t.f_k, "paper-g": t.g_k}
    if name in table:
        return table[name]
    try:
        value = int(name)
    except ValueError:
        raise InvalidArgumentError(f"unknown threshold {name!r}") from None
    if value < 0:
        raise InvalidArgumentError("threshold must be nonnegative")
    return value


@dataclass(frozen=True)
class Packing:
    mode: str
    parts: tuple[frozenset[int], ...]

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidArgumentError(f"unknown packing mode {self.mode!r}")
        seen: set[int] = set()
        for part in self.parts:
            if seen & part:
                raise InvalidArgumentError("packing parts must be pairwise edge-disjoint")
            seen |= part

    @property
    def k(self) -> int:
        return len(self.parts)


@dataclass(frozen=True)
class Certificate:
    kind: str  # "violating-partition" | "cut-too-small" | "reduction-incomplete"
    scope: str = "graph"  # "graph" | "reduced-hypergraph"
    partition: tuple[frozenset[int], ...] | None = None
    lambda_out: int | None = None
    bound: int | None = None
    cut_side: frozenset[int] | None = None
    cut_size: int | None = None
    threshold: int | None = None
    reduced_graph: Multigraph | None = None
    reduced_form: str | None = None


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    part_index: int | None = None
    reason: str | None = None
    canonical: bool | None = None  # connectors: every non-terminal degree in {0, 2}
    note: str | None = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass
class PackResult:
    outcome: str  # "packed" | "certificate" | "infeasible"
    packing: Packing | None = None
    certificate: Certificate | None = None
    trace: SplitTrace | None = None
    reduced_graph: Multigraph | None = None
    pre_lift: Packing | None = None
    method: str = ""  # "pipeline" | "brute-force" | "trivial"
    threshold: int | None = None
    connectivity: int | None = None

    @property
    def succeeded(self) -> bool:
        return self.outcome == "packed"


# -- edge-set helpers ---------------------------------------------------------


def _part_vertices(g: Multigraph, edge_ids: Iterable[int]) -> set[int]:
    out: set[int] = set()
    for eid in edge_ids:
        out.update(g.endpoints(eid))
    return out


def _edges_connected(g: Multigraph, edge_ids: frozenset[int] | set[int],
                     over: set[int]) -> bool:
    """True when `over` lies inside one component of the edge-induced
    subgraph (vertices of `over` with no incident edge only pass when the
    subgraph is that single vertex)."""
    if not over:
        return True
    adj: dict[int, set[int]] = {v: set() for v in over}
    for eid in edge_ids:
        u, v = g.endpoints(eid)
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    start = min(over)
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in adj.get(x, ()):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return set(over) <= seen


def _edges_form_forest(g: Multigraph, edge_ids: Iterable[int]) -> bool:
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for eid in edge_ids:
        u, v = g.endpoints(eid)
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[rv] = ru
    return True


def _part_degrees(g: Multigraph, edge_ids: Iterable[int]) -> dict[int, int]:
    deg: dict[int, int] = {}
    for eid in edge_ids:
        u, v = g.endpoints(eid)
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    return deg


def prune_to_terminal_tree(g: Multigraph, terminals: frozenset[int],
                           edge_ids: Iterable[int]) -> frozenset[int]:
    """Shrink a connected terminal-spanning edge set to a tree.

    Non-terminal leaves are removed to a fixpoint, then a breadth-first
    spanning tree rooted at the lowest terminal id is taken over what is
    left, so the output is deterministic.
    """
    work = set(edge_ids)
    while True:
        deg = _part_degrees(g, work)
        drop = None
        for v in sorted(deg):
            if deg[v] == 1 and v not in terminals:
                drop = v
                break
        if drop is None:
            break
        for eid in sorted(work):
            if drop in g.endpoints(eid):
                work.discard(eid)
                break

    adj: dict[int, list[tuple[int, int]]] = {}
    for eid in sorted(work):
        u, v = g.endpoints(eid)
        adj.setdefault(u, []).append((v, eid))
        adj.setdefault(v, []).append((u, eid))
    root = min(terminals)
    tree: set[int] = set()
    seen = {root}
    frontier = [root]
    while frontier:
        nxt = []
        for x in frontier:
            for y, eid in sorted(adj.get(x, ())):
                if y not in seen:
                    seen.add(y)
                    tree.add(eid)
                    nxt.append(y)
        frontier = nxt
    if not terminals <= seen:
        raise InternalInvariantError("pruning disconnected a terminal")
    return frozenset(tree)


# -- verification -------------------------------------------------------------


def verify_packing(g: Multigraph, terminals: frozenset[int] | None,
                   packing: Packing) -> VerifyResult:
    """Check a packing claim against its host graph.

    Parts must be pairwise disjoint and every edge id must exist.  Then by
    mode: spanning parts are spanning trees of the whole graph; steiner
    parts are trees containing every terminal; connector parts are
    connected, contain every terminal, and give every non-terminal an even
    degree.  Connectors whose non-terminal degrees all lie in {0, 2} are
    the canonical pipeline shape; anything else even is reported ok but
    flagged, since general connector recognition is not attempted.
    """
    for part in packing.parts:
        for eid in part:
            if not g.has_edge(eid):
                raise InvalidArgumentError(f"packing refers to unknown edge id {eid}")
    seen: dict[int, int] = {}
    for i, part in enumerate(packing.parts):
        for eid in part:
            if eid in seen:
                return VerifyResult(ok=False, part_index=i,
                                    reason=f"edge {eid} also in part {seen[eid]}")
            seen[eid] = i

    tset = frozenset(terminals) if terminals is not None else frozenset()
    if packing.mode in ("steiner", "connector") and not tset:
        raise InvalidArgumentError("terminal modes need a terminal set")

    canonical = True
    for i, part in enumerate(packing.parts):
        if packing.mode == "spanning":
            if len(part) != g.vertex_count() - 1:
                return VerifyResult(ok=False, part_index=i,
                                    reason=f"{len(part)} edges cannot span "
                                           f"{g.vertex_count()} vertices as a tree")
            if not _edges_form_forest(g, part):
                return VerifyResult(ok=False, part_index=i, reason="part has a cycle")
            if not _edges_connected(g, part, set(g.vertices)):
                return VerifyResult(ok=False, part_index=i, reason="part does not span the graph")
        elif packing.mode == "steiner":
            vertices = _part_vertices(g, part)
            if not part:
                if len(tset) != 1:
                    return VerifyResult(ok=False, part_index=i, reason="empty part")
                continue
            if not tset <= vertices:
                return VerifyResult(ok=False, part_index=i,
                                    reason="part misses a terminal")
            if not _edges_form_forest(g, part):
                return VerifyResult(ok=False, part_index=i, reason="part has a cycle")
            if not _edges_connected(g, part, vertices):
                return VerifyResult(ok=False, part_index=i, reason="part is disconnected")
        else:
            vertices = _part_vertices(g, part)
            if not part:
                if len(tset) != 1:
                    return VerifyResult(ok=False, part_index=i, reason="empty part")
                continue
            if not tset <= vertices:
                return VerifyResult(ok=False, part_index=i,
                                    reason="part misses a terminal")
            if not _edges_connected(g, part, vertices):
                return VerifyResult(ok=False, part_index=i, reason="part is disconnected")
            deg = _part_degrees(g, part)
            for v in sorted(vertices - tset):
                d = deg.get(v, 0)
                if d % 2 != 0:
                    return VerifyResult(ok=False, part_index=i,
                                        reason=f"non-terminal {v} has odd degree {d}")
                if d not in (0, 2):
                    canonical = False

    if packing.mode == "connector":
        note = None if canonical else "unverified connector shape"
        return VerifyResult(ok=True, canonical=canonical, note=note)
    return VerifyResult(ok=True)


# -- violating partitions -----------------------------------------------------


def _first_violating_partition(vertices: frozenset[int],
                               edge_sets: Mapping[int, frozenset[int]],
                               k: int) -> tuple[Partition, int] | None:
    """First partition (canonical order) with fewer than k*(|P|-1) crossing
    edges, or None."""
    for p in iter_partitions(vertices):
        out = p.classify(edge_sets).outer_count
        if out < k * (len(p) - 1):
            return p, out
    return None


def _violating_partition_certificate(g: Multigraph, k: int, scope: str = "graph",
                                     edge_sets: Mapping[int, frozenset[int]] | None = None,
                                     vertices: frozenset[int] | None = None) -> Certificate:
    """Extract a partition certificate for a failed k-fold packing.

    Small vertex sets scan partitions directly.  Otherwise, for graphs
    within the subset cap, the partition is read off a minimizer of
    |E minus A| + k * rank(A): its blocks are the components of A, and the
    crossing count is then provably below the bound.  That fallback relies
    on the graphic rank being |V| minus the component count, so hypergraph
    scopes only get the partition scan.
    """
    vs = vertices if vertices is not None else g.vertices
    esets = edge_sets if edge_sets is not None else graph_edge_sets(g.edges)
    graph_scope = all(len(vset) <= 2 for vset in esets.values())
    if not (graph_scope and len(esets) <= limits.effective(limits.SUBSET_ELEMENTS)):
        limits.require("partition-vertices", limits.PARTITION_VERTICES, len(vs),
                       "violating-partition extraction")
        hit = _first_violating_partition(vs, esets, k)
        if hit is None:
            raise InternalInvariantError("packing failed but no partition violates the bound")
        p, out = hit
        return Certificate(kind="violating-partition", scope=scope,
                           partition=p.blocks, lambda_out=out, bound=k * (len(p) - 1))
    ids = sorted(esets)
    n = len(ids)
    best_value = None
    best_blocks: tuple[frozenset[int], ...] = ()
    for mask in range(1 << n):
        chosen = [ids[i] for i in range(n) if mask >> i & 1]
        parent = {v: v for v in vs}

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        components = len(vs)
        for eid in chosen:
            roots = {find(v) for v in esets[eid]}
            roots = sorted(roots)
            for other in roots[1:]:
                parent[other] = roots[0]
                components -= 1
        value = (n - len(chosen)) + k * (len(vs) - components)
        if best_value is None or value < best_value:
            groups: dict[int, set[int]] = {}
            for v in vs:
                groups.setdefault(find(v), set()).add(v)
            best_value = value
            best_blocks = tuple(frozenset(b) for b in
                                sorted(groups.values(), key=min))
    p = Partition(blocks=best_blocks)
    out = p.classify(esets).outer_count
    bound = k * (len(p) - 1)
    if out >= bound:
        raise InternalInvariantError("extracted partition does not violate the bound")
    return Certificate(kind="violating-partition", scope=scope,
                       partition=p.blocks, lambda_out=out, bound=bound)


# -- spanning-tree packing ----------------------------------------------------


def pack_spanning_trees(g: Multigraph, k: int) -> PackResult:
    """k edge-disjoint spanning trees via the k-fold graphic matroid union,
    or a partition whose crossing-edge count certifies there are none."""
    if k < 1:
        raise InvalidArgumentError("k must be at least 1")
    if not g.vertices:
        raise InvalidArgumentError("graph must have at least one vertex")
    n = g.vertex_count()
    result = pack_bases(graphic_matroid(g.vertices, g.edges), k)
    if result.size == k * (n - 1):
        packing = Packing(mode="spanning", parts=result.parts)
        check = verify_packing(g, None, packing)
        if not check.ok:
            raise InternalInvariantError(f"spanning packing failed verification: {check.reason}")
        return PackResult(outcome="packed", packing=packing, method="pipeline")
    cert = _violating_partition_certificate(g, k)
    return PackResult(outcome="certificate", certificate=cert, method="pipeline")


# -- hypergraph construction and decoding -------------------------------------


def build_steiner_hypergraph(g: Multigraph, terminals: frozenset[int]
                             ) -> tuple[Hypergraph, dict[int, tuple[str, int]]]:
    """Replace each degree-3 non-terminal by a hyperedge on its three
    neighbors; terminal-terminal edges become 2-vertex hyperedges.

    Requires the reduced normal form: every non-terminal has degree 3 and
    three distinct terminal neighbors, and the graph has no loops.  The
    origin map records, per hyperedge id, either ("edge", edge-id) or
    ("vertex", non-terminal-id) for decoding packings back to edges.
    """
    tset = frozenset(terminals)
    origin: dict[int, tuple[str, int]] = {}
    h = Hypergraph(tset)
    for u in sorted(g.vertices - tset):
        nbrs = g.neighbors(u)
        if g.degree(u) != 3 or len(nbrs) != 3 or not nbrs <= tset:
            raise InvalidArgumentError(
                f"vertex {u} breaks the reduced form needed for the hypergraph step")
    next_id = (max(g.edges) + 1) if g.edges else 0
    for eid in sorted(g.edges):
        u, v = g.endpoints(eid)
        if u == v:
            raise InvalidArgumentError(f"loop {eid} cannot enter the hypergraph")
        if u in tset and v in tset:
            h.add_hyperedge(eid, (u, v))
            origin[eid] = ("edge", eid)
    for u in sorted(g.vertices - tset):
        h.add_hyperedge(next_id, g.neighbors(u))
        origin[next_id] = ("vertex", u)
        next_id += 1
    return h, origin


def _star_edge(g: Multigraph, center: int, leaf: int) -> int:
    for eid in g.incident_edges(center):
        if g.other_end(eid, center) == leaf:
            return eid
    raise InternalInvariantError(f"no edge between {center} and {leaf}")


def _decode_steiner_part(g: Multigraph, terminals: frozenset[int],
                         part: frozenset[int],
                         origin: Mapping[int, tuple[str, int]]) -> frozenset[int]:
    edges: set[int] = set()
    for hid in sorted(part):
        kind, ref = origin[hid]
        if kind == "edge":
            edges.add(ref)
        else:
            edges.update(g.incident_edges(ref))
    return prune_to_terminal_tree(g, terminals, edges)


def _decode_connector_part(g: Multigraph, part: frozenset[int],
                           origin: Mapping[int, tuple[str, int]],
                           reps: Mapping[int, tuple[int, int]]) -> frozenset[int]:
    edges: set[int] = set()
    for hid in sorted(part):
        kind, ref = origin[hid]
        if kind == "edge":
            edges.add(ref)
        else:
            u1, u2 = reps[hid]
            edges.add(_star_edge(g, ref, u1))
            edges.add(_star_edge(g, ref, u2))
    return frozenset(edges)


# -- lifting through the reduction trace ---------------------------------------


def lift_parts(parts: Iterable[frozenset[int]], trace: SplitTrace,
               reduced: Multigraph, terminals: frozenset[int],
               mode: str) -> tuple[list[frozenset[int]], Multigraph]:
    """Walk the reduction trace backwards, swapping each used child edge
    for its two parent edges.

    Steiner parts are re-pruned to a tree after every swap (the swap can
    close a cycle when the split vertex already carries part edges);
    connector parts keep everything, which preserves even degrees.
    Returns the lifted parts plus the reconstructed original graph.
    """
    g = reduced.copy()
    work = [set(p) for p in parts]
    for step in reversed(trace.steps):
        if isinstance(step, (SplitStep, SuppressStep)):
            if isinstance(step, SuppressStep):
                g.add_vertex(step.removed)
            g.delete_edge(step.child)
            g.add_edge(step.e1_ends[0], step.e1_ends[1], eid=step.e1)
            g.add_edge(step.e2_ends[0], step.e2_ends[1], eid=step.e2)
            for part in work:
                if step.child in part:
                    part.discard(step.child)
                    part.add(step.e1)
                    part.add(step.e2)
                    if mode == "steiner":
                        part.intersection_update(g.edges)
                        refreshed = prune_to_terminal_tree(g, terminals, part)
                        part.clear()
                        part.update(refreshed)
                    break
        elif isinstance(step, DeleteEdgeStep):
            g.add_vertex(step.ends[0])
            g.add_vertex(step.ends[1])
            g.add_edge(step.ends[0], step.ends[1], eid=step.edge)
        else:
            g.add_vertex(step.vertex)
    return [frozenset(p) for p in work], g


# -- exhaustive oracle --------------------------------------------------------


@dataclass(frozen=True)
class BruteResult:
    packing: Packing | None
    infeasible: bool


def brute_force_pack(g: Multigraph, terminals: frozenset[int] | None, k: int,
                     mode: str) -> BruteResult:
    """Exhaustive packing search with symmetry breaking and pruning.

    Edges are assigned, in ascending id order, to one of k parts or left
    unused; a part label may only be opened after all lower labels are in
    use, so part families are enumerated once each.  Tree modes keep every
    part acyclic while searching; every node also checks that each part
    can still reach all its required vertices using the unassigned
    remainder.  Exhaustion is a proof that no packing exists (loops are
    never needed by any mode and are left unused).
    """
    if mode not in MODES:
        raise InvalidArgumentError(f"unknown packing mode {mode!r}")
    if k < 1:
        raise InvalidArgumentError("k must be at least 1")
    limits.require("brute-parts", limits.BRUTE_PARTS, k, "exhaustive packing search")
    limits.require("brute-edges", limits.BRUTE_EDGES, g.edge_count(),
                   "exhaustive packing search")
    tset = frozenset(terminals) if terminals is not None else frozenset()
    if mode == "spanning":
        required = set(g.vertices)
    else:
        if not tset:
            raise InvalidArgumentError("terminal modes need a terminal set")
        if not tset <= g.vertices:
            raise InvalidArgumentError("terminals must be vertices of the graph")
        required = set(tset)
        if len(tset) == 1:
            packing = Packing(mode=mode, parts=tuple(frozenset() for _ in range(k)))
            return BruteResult(packing=packing, infeasible=False)

    edges = [eid for eid in sorted(g.edges) if not g.is_loop(eid)]
    m = len(edges)
    ends = {eid: g.endpoints(eid) for eid in edges}
    min_part_edges = (g.vertex_count() if mode == "spanning" else len(required)) - 1
    parts: list[set[int]] = [set() for _ in range(k)]

    def part_can_reach(part_idx: int, next_i: int) -> bool:
        parent: dict[int, int] = {}

        def find(x: int) -> int:
            parent.setdefault(x, x)
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for eid in parts[part_idx]:
            u, v = ends[eid]
            parent[find(u)] = find(v)
        for i in range(next_i, m):
            u, v = ends[edges[i]]
            parent[find(u)] = find(v)
        roots = {find(v) for v in required}
        return len(roots) == 1

    def parts_final_ok() -> bool:
        for part in parts:
            fp = frozenset(part)
            if mode == "spanning":
                if len(fp) != g.vertex_count() - 1:
                    return False
                if not _edges_connected(g, fp, set(g.vertices)):
                    return False
            elif mode == "steiner":
                vertices = _part_vertices(g, fp)
                if not required <= vertices or not _edges_connected(g, fp, vertices):
                    return False
            else:
                vertices = _part_vertices(g, fp)
                if not required <= vertices or not _edges_connected(g, fp, vertices):
                    return False
                deg = _part_degrees(g, fp)
                for v in vertices - tset:
                    if deg.get(v, 0) % 2 != 0:
                        return False
        return True

    tree_mode = mode in ("spanning", "steiner")
    found: list[Packing] = []

    def search(i: int, used_parts: int) -> bool:
        if i == m:
            if parts_final_ok():
                found.append(Packing(mode=mode,
                                     parts=tuple(frozenset(p) for p in parts)))
                return True
            return False
        remaining = m - i
        deficit = sum(max(0, min_part_edges - len(p)) for p in parts)
        if deficit > remaining:
            return False
        eid = edges[i]
        top = min(k, used_parts + 1)
        for label in range(top + 1):
            if label == 0:
                ok = all(part_can_reach(j, i + 1) for j in range(k))
                if ok and search(i + 1, used_parts):
                    return True
                continue
            j = label - 1
            if tree_mode:
                if mode == "spanning" and len(parts[j]) >= min_part_edges:
                    continue
                if not _edges_form_forest(g, parts[j] | {eid}):
                    continue
            parts[j].add(eid)
            if all(part_can_reach(jj, i + 1) for jj in range(k)) \
                    and search(i + 1, max(used_parts, label)):
                return True
            parts[j].discard(eid)
        return False

    if min_part_edges < 0:
        min_part_edges = 0
    if search(0, 0):
        packing = found[0]
        check = verify_packing(g, tset if mode != "spanning" else None, packing)
        if not check.ok:
            raise InternalInvariantError(
                f"exhaustive search produced an invalid packing: {check.reason}")
        return BruteResult(packing=packing, infeasible=False)
    return BruteResult(packing=None, infeasible=True)


# -- terminal pipelines -------------------------------------------------------


def _trivial_single_terminal(mode: str, k: int) -> PackResult:
    packing = Packing(mode=mode, parts=tuple(frozenset() for _ in range(k)))
    return PackResult(outcome="packed", packing=packing, method="trivial")


def _pipeline(g: Multigraph, terminals, k: int, mode: str,
              threshold: int | None, brute_fallback: bool) -> PackResult:
    tset = frozenset(terminals)
    if k < 1:
        raise InvalidArgumentError("k must be at least 1")
    if not tset:
        raise InvalidArgumentError("need at least one terminal")
    if not tset <= g.vertices:
        raise InvalidArgumentError("terminals must be vertices of the graph")
    if len(tset) == 1:
        return _trivial_single_terminal(mode, k)

    t_values = Thresholds.for_k(k)
    if threshold is None:
        threshold = t_values.f_k if mode == "steiner" else t_values.g_k
    connectivity, side = steiner_min_cut(g, tset)
    if connectivity < threshold:
        cert = Certificate(kind="cut-too-small", cut_side=side,
                           cut_size=connectivity, threshold=threshold)
        return PackResult(outcome="certificate", certificate=cert,
                          threshold=threshold, connectivity=connectivity)

    # Reduction runs at the hypergraph-packing threshold when the instance
    # affords it; below that (probing regimes) it preserves what was asked.
    reduce_threshold = t_values.fkk if connectivity >= t_values.fkk else threshold
    rr = reduce_instance(g, tset, reduce_threshold)

    def brute_on(target: Multigraph, lift: bool) -> PackResult | None:
        cap = limits.effective(limits.BRUTE_EDGES)
        if target.edge_count() > cap or k > limits.effective(limits.BRUTE_PARTS):
            return None
        brute = brute_force_pack(target, tset, k, mode)
        if brute.packing is not None:
            if lift:
                lifted, original = lift_parts(brute.packing.parts, rr.trace,
                                              rr.graph, tset, mode)
                if original != g:
                    raise InternalInvariantError("trace rewind did not restore the input graph")
                packing = Packing(mode=mode, parts=tuple(lifted))
            else:
                packing = brute.packing
            check = verify_packing(g, tset, packing)
            if not check.ok:
                raise InternalInvariantError(
                    f"brute-force packing failed verification: {check.reason}")
            return PackResult(outcome="packed", packing=packing, trace=rr.trace,
                              reduced_graph=rr.graph,
                              pre_lift=brute.packing if lift else None,
                              method="brute-force", threshold=threshold,
                              connectivity=connectivity)
        if not lift:
            # Exhaustion on the original graph is a genuine impossibility proof.
            return PackResult(outcome="infeasible", trace=rr.trace,
                              reduced_graph=rr.graph, method="brute-force",
                              threshold=threshold, connectivity=connectivity)
        return None

    if rr.form != "fkk":
        if mode == "steiner" and k == 1 and rr.graph.is_connected():
            # One tree never needs the hypergraph step: prune the whole
            # reduced edge set down to a terminal tree and lift it.
            part = prune_to_terminal_tree(rr.graph, tset, rr.graph.edges)
            pre_lift = Packing(mode="steiner", parts=(part,))
            lifted, original = lift_parts([part], rr.trace, rr.graph, tset, mode)
            if original != g:
                raise InternalInvariantError("trace rewind did not restore the input graph")
            packing = Packing(mode="steiner", parts=tuple(lifted))
            check = verify_packing(g, tset, packing)
            if not check.ok:
                raise InternalInvariantError(
                    f"single-tree packing failed verification: {check.reason}")
            return PackResult(outcome="packed", packing=packing, trace=rr.trace,
                              reduced_graph=rr.graph, pre_lift=pre_lift,
                              method="pipeline", threshold=threshold,
                              connectivity=connectivity)
        if brute_fallback:
            hit = brute_on(rr.graph, lift=True)
            if hit is not None:
                return hit
            hit = brute_on(g, lift=False)
            if hit is not None:
                return hit
        cert = Certificate(kind="reduction-incomplete", reduced_graph=rr.graph,
                           reduced_form=rr.form)
        return PackResult(outcome="certificate", certificate=cert, trace=rr.trace,
                          reduced_graph=rr.graph, threshold=threshold,
                          connectivity=connectivity)

    h, origin = build_steiner_hypergraph(rr.graph, tset)
    oracle = HypergraphicMatroid(h)
    packed = pack_bases(oracle, k)
    if packed.size != k * (len(tset) - 1):
        if brute_fallback:
            hit = brute_on(g, lift=False)
            if hit is not None:
                return hit
        cert = _violating_partition_certificate(
            rr.graph, k, scope="reduced-hypergraph",
            edge_sets=h.hyperedges, vertices=h.vertices)
        return PackResult(outcome="certificate", certificate=cert, trace=rr.trace,
                          reduced_graph=rr.graph, threshold=threshold,
                          connectivity=connectivity)

    decoded: list[frozenset[int]] = []
    for part in packed.parts:
        if mode == "steiner":
            decoded.append(_decode_steiner_part(rr.graph, tset, part, origin))
        else:
            reps = oracle.witness(part)
            if reps is None:
                raise InternalInvariantError("a packed basis failed its own witness")
            decoded.append(_decode_connector_part(rr.graph, part, origin, reps))
    pre_lift = Packing(mode=mode, parts=tuple(decoded))
    check = verify_packing(rr.graph, tset, pre_lift)
    if not check.ok:
        raise InternalInvariantError(
            f"decoded packing failed verification on the reduced graph: {check.reason}")

    lifted, original = lift_parts(decoded, rr.trace, rr.graph, tset, mode)
    if original != g:
        raise InternalInvariantError("trace rewind did not restore the input graph")
    packing = Packing(mode=mode, parts=tuple(lifted))
    check = verify_packing(g, tset, packing)
    if not check.ok:
        raise InternalInvariantError(
            f"lifted packing failed verification: {check.reason}")
    return PackResult(outcome="packed", packing=packing, trace=rr.trace,
                      reduced_graph=rr.graph, pre_lift=pre_lift,
                      method="pipeline", threshold=threshold,
                      connectivity=connectivity)


def pack_steiner_trees(g: Multigraph, terminals, k: int,
                       threshold: int | None = None,
                       brute_fallback: bool = True) -> PackResult:
    """k edge-disjoint trees each containing every terminal.

    Pipeline: threshold check, reduction, hypergraphic base packing,
    decode, lift, verify.  When the reduction stalls before the normal
    form, the exhaustive oracle takes over within its capacity; otherwise
    the caller receives the partially reduced instance as a certificate.
    """
    return _pipeline(g, terminals, k, "steiner", threshold, brute_fallback)


def pack_connectors(g: Multigraph, terminals, k: int,
                    threshold: int | None = None,
                    brute_fallback: bool = True) -> PackResult:
    """k edge-disjoint connectors: connected subgraphs containing every
    terminal whose non-terminals all have even degree.

    Decoding differs from trees only at 3-vertex hyperedges: the two edges
    named by the representative pair are kept, so used non-terminals have
    degree exactly 2 before lifting.
    """
    return _pipeline(g, terminals, k, "connector", threshold, brute_fallback)


# -- packing text format ------------------------------------------------------


def serialize_packing(packing: Packing) -> str:
    lines = [f"packing {packing.mode} {packing.k}"]
    for i, part in enumerate(packing.parts, start=1):
        ids = " ".join(str(e) for e in sorted(part))
        lines.append(f"part {i}:" + (f" {ids}" if ids else ""))
    return "\n".join(lines) + "\n"


def parse_packing(text: str) -> Packing:
    mode: str | None = None
    count = 0
    parts: list[frozenset[int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("packing"):
            fields = line.split()
            if len(fields) != 3 or fields[1] not in MODES:
                raise InstanceParseError(lineno, "expected 'packing <mode> <k>'")
            mode = fields[1]
            try:
                count = int(fields[2])
            except ValueError:
                raise InstanceParseError(lineno, "part count must be an integer") from None
        elif line.startswith("part"):
            if mode is None:
                raise InstanceParseError(lineno, "part line before packing header")
            head, _, rest = line.partition(":")
            fields = head.split()
            if len(fields) != 2:
                raise InstanceParseError(lineno, "expected 'part <i>: <edge ids>'")
            try:
                index = int(fields[1])
                ids = [int(x) for x in rest.split()]
            except ValueError:
                raise InstanceParseError(lineno, "expected integer fields") from None
            if index != len(parts) + 1:
                raise InstanceParseError(lineno, f"parts must be numbered in order, got {index}")
            parts.append(frozenset(ids))
        else:
            raise InstanceParseError(lineno, f"unknown line {line!r}")
    if mode is None:
        raise InstanceParseError(0, "missing packing header")
    if len(parts) != count:
        raise InstanceParseError(0, f"header declares {count} parts but {len(parts)} appear")
    return Packing(mode=mode, parts=tuple(parts))
