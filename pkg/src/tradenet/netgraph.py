"""Undirected trading networks: representation, generation, structural metrics.

Nodes are the integers ``0 .. n-1``.  A graph optionally carries a designated
source ``S`` and destination ``D``; every other node is an intermediary.
"""

from __future__ import annotations

import hashlib
import random
from collections import deque
from dataclasses import dataclass, field
from os import PathLike
from typing import Iterable

from .errors import DegenerateSpec, Disconnected, GenerationFailed, GraphFormatError

MAX_CONNECT_TRIES = 100


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph with optional source/destination terminals.

    ``edges`` holds each edge once as ``(u, v)`` with ``u < v``.  The
    adjacency view ``adj`` is derived and excluded from equality.
    """

    n: int
    edges: frozenset
    source: int | None = None
    destination: int | None = None
    adj: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("graph needs at least one node")
        nbrs = [set() for _ in range(self.n)]
        for u, v in self.edges:
            if not (0 <= u < v < self.n):
                raise ValueError(f"invalid edge {(u, v)} for n={self.n}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        object.__setattr__(self, "adj", tuple(tuple(sorted(s)) for s in nbrs))
        s, d = self.source, self.destination
        if (s is None) != (d is None):
            raise ValueError("source and destination must be set together")
        if s is not None:
            if not (0 <= s < self.n and 0 <= d < self.n):
                raise ValueError(f"terminals {(s, d)} out of range")
            if s == d:
                raise ValueError("source and destination must differ")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable, source=None, destination=None) -> "Graph":
        """Build a graph from any iterable of pairs; rejects loops and duplicates."""
        canon = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            e = (u, v) if u < v else (v, u)
            if e in canon:
                raise ValueError(f"duplicate edge {e}")
            canon.add(e)
        return cls(n, frozenset(canon), source, destination)

    def with_terminals(self, source: int, destination: int) -> "Graph":
        return Graph(self.n, self.edges, source, destination)

    @property
    def has_terminals(self) -> bool:
        return self.source is not None

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def intermediaries(self) -> list[int]:
        self._require_terminals()
        return [v for v in range(self.n) if v != self.source and v != self.destination]

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def digest(self) -> str:
        """Short content hash, used to tag simulation logs."""
        return hashlib.sha256(dumps(self, allow_unset=True).encode()).hexdigest()[:16]

    def _require_terminals(self):
        if self.source is None:
            raise ValueError("graph has no source/destination assigned")


@dataclass(frozen=True)
class NetworkSpec:
    """Watts-Strogatz ensemble member: ``n`` nodes, mean degree ``k``, rewiring ``p``."""

    n: int
    k: int
    p: float
    seed: int = 0

    def validate(self):
        if self.k < 2 or self.k >= self.n:
            raise DegenerateSpec(f"need 2 <= k < n, got n={self.n}, k={self.k}")
        if not 0.0 <= self.p <= 1.0:
            raise DegenerateSpec(f"rewiring probability must lie in [0, 1], got {self.p}")
        if self.k % 2 == 1 and self.n % 2 == 1:
            raise DegenerateSpec(f"odd mean degree {self.k} needs an even node count, got n={self.n}")


# ---------------------------------------------------------------- generation


def ring_lattice_edges(n: int, k: int) -> list[tuple[int, int]]:
    """Lattice edges in rewiring order: ring layers first, then diametric chords.

    Each node links to its ``k // 2`` nearest neighbours on each side; for odd
    ``k`` (``n`` even) every node also gets the chord to ``i + n/2``.
    """
    out = []
    for j in range(1, k // 2 + 1):
        out.extend((i, (i + j) % n) for i in range(n))
    if k % 2 == 1:
        out.extend((i, i + n // 2) for i in range(n // 2))
    return out


def _watts_strogatz_once(n: int, k: int, p: float, rng: random.Random) -> list[set]:
    nbrs = [set() for _ in range(n)]
    lattice = ring_lattice_edges(n, k)
    for u, v in lattice:
        nbrs[u].add(v)
        nbrs[v].add(u)
    if p == 0.0:
        return nbrs
    for u, v in lattice:
        if rng.random() >= p:
            continue
        candidates = [w for w in range(n) if w != u and w not in nbrs[u]]
        if not candidates:
            continue
        w = rng.choice(candidates)
        nbrs[u].discard(v)
        nbrs[v].discard(u)
        nbrs[u].add(w)
        nbrs[w].add(u)
    return nbrs


def generate_ws(spec: NetworkSpec, max_tries: int = MAX_CONNECT_TRIES) -> Graph:
    """Connected Watts-Strogatz graph with exact pre-rewiring mean degree ``k``.

    Each lattice edge keeps its first endpoint and, with probability ``p``,
    has its far endpoint moved to a uniformly random node that is neither
    the first endpoint nor already adjacent to it.  A disconnected draw is
    discarded and generation retried with ``seed + 1``, ``seed + 2``, ...
    The returned graph has no terminals assigned.
    """
    spec.validate()
    for attempt in range(max_tries):
        rng = random.Random(spec.seed + attempt)
        nbrs = _watts_strogatz_once(spec.n, spec.k, spec.p, rng)
        if _is_connected(nbrs):
            edges = frozenset((u, v) for u in range(spec.n) for v in nbrs[u] if u < v)
            return Graph(spec.n, edges)
    raise GenerationFailed(f"no connected graph for {spec} after {max_tries} seeds")


def make_parallel_paths(M: int, hops: int) -> Graph:
    """``M`` internally disjoint S-D paths of ``hops`` edges each.

    Node 0 is S, node 1 is D; path ``i`` uses intermediaries
    ``2 + i*(hops-1) .. 2 + (i+1)*(hops-1) - 1`` in order.
    """
    if M < 1 or hops < 2:
        raise ValueError("need M >= 1 and hops >= 2")
    inner = hops - 1
    edges = []
    for i in range(M):
        chain = [0] + [2 + i * inner + j for j in range(inner)] + [1]
        edges.extend(zip(chain, chain[1:]))
    return Graph.from_edges(2 + M * inner, edges, source=0, destination=1)


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


# ---------------------------------------------------------------- distances


def _is_connected(nbrs) -> bool:
    n = len(nbrs)
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for w in nbrs[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == n


def is_connected(g: Graph) -> bool:
    return _is_connected(g.adj)


def bfs_distances(g: Graph, start: int) -> list[int]:
    """Hop distance from ``start`` to every node; ``-1`` marks unreachable."""
    dist = [-1] * g.n
    dist[start] = 0
    queue = deque([start])
    adj = g.adj
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for w in adj[u]:
            if dist[w] < 0:
                dist[w] = du
                queue.append(w)
    return dist


def all_pairs_distances(g: Graph) -> list[list[int]]:
    rows = [bfs_distances(g, s) for s in range(g.n)]
    if any(d < 0 for d in rows[0]):
        raise Disconnected("graph is not connected")
    return rows


def average_path_length(g: Graph) -> float:
    """Mean shortest-path hop distance over all unordered node pairs."""
    if g.n < 2:
        raise ValueError("average path length needs at least two nodes")
    dist = all_pairs_distances(g)
    total = sum(sum(row) for row in dist)
    return total / (g.n * (g.n - 1))


def diameter(g: Graph) -> int:
    return max(max(row) for row in all_pairs_distances(g))


def local_clustering(g: Graph, v: int) -> float:
    nb = g.adj[v]
    k = len(nb)
    if k < 2:
        return 0.0
    links = sum(1 for i, a in enumerate(nb) for b in nb[i + 1:] if g.has_edge(a, b))
    return 2.0 * links / (k * (k - 1))


def clustering_coefficient(g: Graph) -> float:
    """Average local clustering; nodes with degree below 2 count as 0."""
    return sum(local_clustering(g, v) for v in range(g.n)) / g.n


def lattice_clustering(k: int) -> float:
    """Closed-form clustering of the unrewired even-``k`` ring lattice."""
    return 3.0 * (k - 2) / (4.0 * (k - 1))


# ---------------------------------------------------------------- disjoint paths


def node_disjoint_paths(g: Graph) -> int:
    """Maximum number of internally node-disjoint S-D paths (M).

    Unit-capacity max flow on the split digraph: every intermediary ``v``
    becomes ``v_in -> v_out`` with capacity 1, each undirected edge becomes
    two unit arcs, and S and D stay unsplit.  Augmenting paths are found by
    BFS, so the count is exact.  A direct S-D edge counts as one path.
    """
    g._require_terminals()
    s, d = g.source, g.destination

    def vin(v):
        return v if v in (s, d) else 2 * g.n + v

    def vout(v):
        return v

    cap: dict[tuple[int, int], int] = {}
    out: dict[int, list[int]] = {}

    def arc(a, b, c):
        if (a, b) not in cap:
            out.setdefault(a, []).append(b)
            out.setdefault(b, []).append(a)
            cap.setdefault((b, a), 0)
        cap[(a, b)] = cap.get((a, b), 0) + c

    for v in range(g.n):
        if v not in (s, d):
            arc(vin(v), vout(v), 1)
    for u, v in g.edges:
        arc(vout(u), vin(v), 1)
        arc(vout(v), vin(u), 1)

    flow = 0
    while True:
        parent = {s: None}
        queue = deque([s])
        while queue and d not in parent:
            a = queue.popleft()
            for b in out.get(a, ()):
                if b not in parent and cap[(a, b)] > 0:
                    parent[b] = a
                    queue.append(b)
        if d not in parent:
            return flow
        b = d
        while parent[b] is not None:
            a = parent[b]
            cap[(a, b)] -= 1
            cap[(b, a)] += 1
            b = a
        flow += 1


# ---------------------------------------------------------------- file format


def dumps(g: Graph, allow_unset: bool = False) -> str:
    """Serialize to the text format ``n <N> s <S> d <D>`` + one ``u v`` per edge."""
    if not g.has_terminals and not allow_unset:
        raise ValueError("graph files require source and destination")
    s = -1 if g.source is None else g.source
    d = -1 if g.destination is None else g.destination
    lines = [f"n {g.n} s {s} d {d}"]
    lines.extend(f"{u} {v}" for u, v in g.sorted_edges())
    return "\n".join(lines) + "\n"


def loads(text: str) -> Graph:
    rows = [line.split() for line in text.splitlines() if line.strip()]
    if not rows:
        raise GraphFormatError("empty graph file")
    head = rows[0]
    if len(head) != 6 or head[0] != "n" or head[2] != "s" or head[4] != "d":
        raise GraphFormatError(f"bad header line: {' '.join(head)!r}")
    try:
        n, s, d = int(head[1]), int(head[3]), int(head[5])
        edges = [(int(a), int(b)) for a, b in rows[1:]]
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from exc
    try:
        if s < 0 and d < 0:
            return Graph.from_edges(n, edges)
        return Graph.from_edges(n, edges, source=s, destination=d)
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from exc


def store(g: Graph, path: str | PathLike) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(dumps(g))


def load(path: str | PathLike) -> Graph:
    with open(path, encoding="ascii") as fh:
        return loads(fh.read())
