"""Directed acyclic graphs, skeletons, d-separation, structural Hamming
distance, acyclic-orientation enumeration and sampling, and the
source-anchored path coloring used to reason about random-function graphs.

Graphs are immutable; nodes are integer indices with a parallel tuple of
names.  JSON forms: ``{"nodes": [...], "edges": [[from, to], ...]}`` for a
Dag and ``{"nodes": [...], "links": [[a, b], ...]}`` for a Skeleton, both
with edges sorted for deterministic serialization.
"""

from __future__ import annotations

import heapq
import itertools
import json
import warnings
from dataclasses import dataclass

from .errors import InvalidParameterError, TooManyOrientationsError

__all__ = [
    "Dag",
    "Skeleton",
    "Coloring",
    "topological_order",
    "d_separated",
    "shd",
    "enumerate_orientations",
    "sample_orientations",
    "orientation_bits",
    "rf_graph_decomposition",
    "line_graph",
    "triangle_graph",
    "diamond_graph",
    "hall_graph",
    "complete_graph",
    "random_dag",
    "g1_graph",
    "g2_graph",
    "g3_graph",
    "named_graph",
    "dag_to_json",
    "dag_from_json",
    "skeleton_to_json",
    "skeleton_from_json",
]


def _default_names(k):
    return tuple(f"X{i + 1}" for i in range(k))


@dataclass(frozen=True)
class Dag:
    """A directed acyclic graph with named nodes.

    ``edges`` holds (parent, child) index pairs; acyclicity and index bounds
    are verified at construction.
    """

    names: tuple
    edges: frozenset

    def __post_init__(self):
        names = tuple(str(n) for n in self.names)
        edges = frozenset((int(a), int(b)) for a, b in self.edges)
        n = len(names)
        for a, b in edges:
            if a == b:
                raise InvalidParameterError(f"self-loop on node {a}")
            if not (0 <= a < n and 0 <= b < n):
                raise InvalidParameterError(f"edge ({a},{b}) out of range")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "edges", edges)
        topological_order(self)  # raises on a cycle

    @property
    def n(self):
        return len(self.names)

    def parents(self, v):
        return tuple(sorted(a for a, b in self.edges if b == v))

    def children(self, v):
        return tuple(sorted(b for a, b in self.edges if a == v))

    def sources(self):
        withparent = {b for _, b in self.edges}
        return tuple(v for v in range(self.n) if v not in withparent)

    def skeleton(self):
        return Skeleton(self.names, frozenset(
            (min(a, b), max(a, b)) for a, b in self.edges))

    def descendants(self, v):
        """All nodes reachable from v by directed paths, excluding v."""
        seen = set()
        stack = [v]
        while stack:
            u = stack.pop()
            for w in self.children(u):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    def ancestors(self, v):
        seen = set()
        stack = [v]
        while stack:
            u = stack.pop()
            for w in self.parents(u):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen


@dataclass(frozen=True)
class Skeleton:
    """An undirected edge set over named nodes."""

    names: tuple
    edges: frozenset

    def __post_init__(self):
        names = tuple(str(n) for n in self.names)
        n = len(names)
        edges = set()
        for a, b in self.edges:
            a, b = int(a), int(b)
            if a == b:
                raise InvalidParameterError(f"self-loop on node {a}")
            if not (0 <= a < n and 0 <= b < n):
                raise InvalidParameterError(f"link ({a},{b}) out of range")
            edges.add((min(a, b), max(a, b)))
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "edges", frozenset(edges))

    @property
    def n(self):
        return len(self.names)

    def sorted_edges(self):
        return sorted(self.edges)

    def neighbors(self, v):
        out = set()
        for a, b in self.edges:
            if a == v:
                out.add(b)
            elif b == v:
                out.add(a)
        return out


@dataclass(frozen=True)
class Coloring:
    """Node colors from the source-anchored path decomposition.

    ``color`` maps each node on some src-to-target directed path to an
    integer color; the source itself carries the reserved color 0; nodes off
    every such path are absent from the map.
    """

    color: dict
    src: int
    target: int


def topological_order(g):
    """Kahn's algorithm with a smallest-index tie-break (deterministic)."""
    n = len(g.names)
    indeg = [0] * n
    children = [[] for _ in range(n)]
    for a, b in g.edges:
        indeg[b] += 1
        children[a].append(b)
    heap = [v for v in range(n) if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for w in children[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, w)
    if len(order) != n:
        raise InvalidParameterError("graph contains a directed cycle")
    return order


def d_separated(g, i, j, cond=()):
    """True iff every path between i and j is blocked given ``cond``.

    Implemented as reachability over active trails (the ball-bouncing
    scheme): a trail through a non-collider is active while the middle node
    is unconditioned, a trail through a collider is active while the
    collider or one of its descendants is conditioned.
    """
    cond = set(cond)
    if i == j:
        raise InvalidParameterError("i and j must differ")
    if i in cond or j in cond:
        raise InvalidParameterError("endpoints may not be conditioned on")
    # nodes whose conditioning opens colliders: cond plus nothing else;
    # a collider is open iff it has a descendant (or itself) in cond
    anc_of_cond = set(cond)
    for c in cond:
        anc_of_cond |= g.ancestors(c)
    # states are (node, direction); direction 'up' means we arrived via an
    # edge out of the node (moving against arrows), 'down' via an edge into it
    start = [(i, "up")]
    visited = set()
    while start:
        node, direction = start.pop()
        if (node, direction) in visited:
            continue
        visited.add((node, direction))
        if node == j and node not in cond:
            return False
        if direction == "up" and node not in cond:
            for p in g.parents(node):
                start.append((p, "up"))
            for c in g.children(node):
                start.append((c, "down"))
        elif direction == "down":
            if node not in cond:
                for c in g.children(node):
                    start.append((c, "down"))
            if node in anc_of_cond:
                for p in g.parents(node):
                    start.append((p, "up"))
    return True


def shd(a, b):
    """Structural Hamming distance with flips costing 1.

    Counts adjacencies present in exactly one graph, plus adjacencies
    present in both but oriented oppositely.
    """
    if a.names != b.names:
        raise InvalidParameterError("graphs must share one node set")
    adj_a = {(min(x, y), max(x, y)) for x, y in a.edges}
    adj_b = {(min(x, y), max(x, y)) for x, y in b.edges}
    dist = len(adj_a ^ adj_b)
    for pair in adj_a & adj_b:
        x, y = pair
        in_a = (x, y) in a.edges
        in_b = (x, y) in b.edges
        if in_a != in_b:
            dist += 1
    return dist


def enumerate_orientations(s, cap=10**6):
    """All acyclic orientations of a skeleton, in deterministic DFS order.

    Edges are assigned in sorted order, each first as (a -> b) then
    (b -> a); partial assignments that already close a directed cycle are
    pruned.  Raises when more than ``cap`` orientations exist.
    """
    if cap < 1:
        raise InvalidParameterError("cap must be >= 1")
    edges = s.sorted_edges()
    n = s.n
    out = []
    children = [set() for _ in range(n)]

    def reaches(src, dst):
        stack = [src]
        seen = {src}
        while stack:
            u = stack.pop()
            if u == dst:
                return True
            for w in children[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return False

    def assign(k, chosen):
        if k == len(edges):
            out.append(Dag(s.names, frozenset(chosen)))
            if len(out) > cap:
                raise TooManyOrientationsError(
                    f"more than {cap} acyclic orientations; "
                    "fall back to sample_orientations"
                )
            return
        a, b = edges[k]
        for u, v in ((a, b), (b, a)):
            if not reaches(v, u):
                children[u].add(v)
                chosen.append((u, v))
                assign(k + 1, chosen)
                chosen.pop()
                children[u].discard(v)

    assign(0, [])
    return out


def sample_orientations(s, count, rng):
    """Up to ``count`` unique acyclic orientations via random node orderings.

    Each draw permutes the nodes uniformly and orients every skeleton edge
    from the earlier node to the later one.  Duplicates are discarded; if
    100 * count draws cannot produce enough unique orientations, the result
    is returned short with a warning.
    """
    if count < 1:
        raise InvalidParameterError("count must be >= 1")
    edges = s.sorted_edges()
    seen = {}
    for _ in range(100 * count):
        perm = rng.permutation(s.n)
        rank = {int(v): pos for pos, v in enumerate(perm)}
        oriented = frozenset(
            (a, b) if rank[a] < rank[b] else (b, a) for a, b in edges
        )
        if oriented not in seen:
            seen[oriented] = Dag(s.names, oriented)
            if len(seen) == count:
                return list(seen.values())
    warnings.warn(
        f"only {len(seen)} unique orientations found after "
        f"{100 * count} permutation draws (asked for {count})",
        stacklevel=2,
    )
    return list(seen.values())


def orientation_bits(dag, s):
    """Bit-vector of a DAG against its skeleton's sorted edge list.

    Bit k is '0' when sorted edge k = (a, b) is oriented a -> b, else '1';
    used for deterministic tie-breaking and diagnostics.
    """
    bits = []
    for a, b in s.sorted_edges():
        if (a, b) in dag.edges:
            bits.append("0")
        elif (b, a) in dag.edges:
            bits.append("1")
        else:
            raise InvalidParameterError("dag does not orient this skeleton")
    return "".join(bits)


def rf_graph_decomposition(g, src, y):
    """Color the nodes lying on directed src-to-y paths.

    Nodes are processed in topological order, restricted to the induced
    subgraph of src-to-y path nodes.  A node takes a fresh color when src is
    one of its (restricted) parents or its parents carry different colors;
    otherwise it inherits its parents' common color.  The source holds the
    reserved color 0.  The resulting partition is independent of which
    topological order is used.
    """
    if g.parents(src):
        raise InvalidParameterError("src must be a source (no parents)")
    on_path = {v for v in g.descendants(src) if v == y or y in g.descendants(v)}
    if y not in on_path:
        raise InvalidParameterError("no directed path from src to y")
    on_path.add(src)
    color = {src: 0}
    next_color = 1
    for v in topological_order(g):
        if v not in on_path or v == src:
            continue
        pars = [p for p in g.parents(v) if p in on_path]
        par_colors = {color[p] for p in pars}
        if src in pars or len(par_colors) > 1:
            color[v] = next_color
            next_color += 1
        else:
            color[v] = par_colors.pop()
    return Coloring(color=color, src=src, target=y)


def line_graph(k=4):
    """X1 -> X2 -> ... -> Xk."""
    return Dag(_default_names(k), frozenset((i, i + 1) for i in range(k - 1)))


def triangle_graph():
    """X1 -> X2 -> X3 with the shortcut X1 -> X3."""
    return Dag(_default_names(3), frozenset({(0, 1), (0, 2), (1, 2)}))


def diamond_graph():
    """X1 -> {X2, X3} -> X4."""
    return Dag(_default_names(4), frozenset({(0, 1), (0, 2), (1, 3), (2, 3)}))


def hall_graph():
    """The six-node fixture whose coloring mixes inheritance and forks."""
    return Dag(
        _default_names(6),
        frozenset({(0, 1), (0, 2), (1, 3), (1, 4), (2, 3), (3, 5), (4, 5)}),
    )


def complete_graph(k):
    """Complete DAG on k nodes oriented along the index order."""
    return Dag(
        _default_names(k),
        frozenset((i, j) for i in range(k) for j in range(i + 1, k)),
    )


def random_dag(k, edge_prob, rng):
    """Random DAG: a permuted upper triangle with i.i.d. edge inclusion."""
    if not (0 <= edge_prob <= 1):
        raise InvalidParameterError("edge_prob must lie in [0, 1]")
    perm = rng.permutation(k)
    edges = set()
    for i in range(k):
        for j in range(i + 1, k):
            if rng.random() < edge_prob:
                edges.add((int(perm[i]), int(perm[j])))
    return Dag(_default_names(k), frozenset(edges))


def g1_graph():
    """Four-node fixture: two equivalent graphs (see g2) that defeat an
    unconditioned pairwise-orientation strategy."""
    return Dag(
        _default_names(4),
        frozenset({(0, 1), (0, 2), (1, 3), (1, 2), (2, 3)}),
    )


def g2_graph():
    return Dag(
        _default_names(4),
        frozenset({(1, 0), (2, 0), (3, 1), (1, 2), (3, 2)}),
    )


def g3_graph():
    """The orientation consistent with pairwise answers on both g1 and g2."""
    return Dag(
        _default_names(4),
        frozenset({(0, 1), (0, 2), (3, 1), (1, 2), (3, 2)}),
    )


_NAMED = {
    "line": lambda: line_graph(4),
    "triangle": triangle_graph,
    "diamond": diamond_graph,
    "hall": hall_graph,
    "g1": g1_graph,
    "g2": g2_graph,
    "g3": g3_graph,
}


def named_graph(spec, rng=None):
    """Resolve a graph fixture name.

    Accepts ``line``, ``triangle``, ``diamond``, ``hall``, ``g1``..``g3``,
    ``line-k`` / ``complete-k`` (k a node count), and ``random-k`` (requires
    an rng; edge probability 0.5).
    """
    if spec in _NAMED:
        return _NAMED[spec]()
    for prefix, builder in (
        ("line-", line_graph),
        ("complete-", complete_graph),
    ):
        if spec.startswith(prefix):
            return builder(_positive_int(spec[len(prefix):], spec))
    if spec.startswith("random-"):
        if rng is None:
            raise InvalidParameterError("random-k graphs need an rng")
        return random_dag(_positive_int(spec[len("random-"):], spec), 0.5, rng)
    raise InvalidParameterError(f"unknown graph fixture {spec!r}")


def _positive_int(text, spec):
    try:
        k = int(text)
    except ValueError:
        raise InvalidParameterError(f"bad graph fixture {spec!r}") from None
    if k < 1:
        raise InvalidParameterError(f"bad graph fixture {spec!r}")
    return k


def dag_to_json(dag):
    return json.dumps(
        {"nodes": list(dag.names), "edges": sorted([a, b] for a, b in dag.edges)}
    )


def dag_from_json(text):
    try:
        obj = json.loads(text)
        return Dag(tuple(obj["nodes"]), frozenset(tuple(e) for e in obj["edges"]))
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise InvalidParameterError(f"bad graph JSON: {exc}") from exc


def skeleton_to_json(s):
    return json.dumps(
        {"nodes": list(s.names), "links": sorted([a, b] for a, b in s.edges)}
    )


def skeleton_from_json(text):
    try:
        obj = json.loads(text)
        return Skeleton(tuple(obj["nodes"]), frozenset(tuple(e) for e in obj["links"]))
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise InvalidParameterError(f"bad skeleton JSON: {exc}") from exc
