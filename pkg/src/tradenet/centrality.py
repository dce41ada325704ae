"""Path-based importance of intermediaries for a single S-D pair.

Three related measures, all fractions in ``[0, 1]``:

* ``sd_criticality`` -- share of all simple S-D paths that pass through ``v``;
* ``sd_alpha`` -- the same share with each path weighted by ``length**-alpha``
  (length = hop count), so large ``alpha`` favours short paths;
* ``sd_betweenness`` -- share of *shortest* S-D paths through ``v``, the
  ``alpha -> infinity`` limit, computed by BFS path counting.

The first two need the full path inventory, which grows exponentially with
graph size; they are meant for small instances only.
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass, field
from os import PathLike
from typing import Sequence

from .errors import Disconnected, NotIntermediary, PathExplosion
from .netgraph import Graph, bfs_distances

DEFAULT_PATH_CAP = 10**6


@dataclass
class PathInventory:
    """All simple S-D paths of a graph, stored as node tuples."""

    paths: list[tuple[int, ...]]
    cap: int = DEFAULT_PATH_CAP
    _by_node: dict = field(default=None, init=False, repr=False)

    def __len__(self):
        return len(self.paths)

    def length_counts(self) -> Counter:
        """Histogram of hop counts over all paths."""
        return Counter(len(p) - 1 for p in self.paths)

    def length_counts_through(self, v: int) -> Counter:
        if self._by_node is None:
            by_node: dict[int, Counter] = {}
            for p in self.paths:
                hops = len(p) - 1
                for u in p[1:-1]:
                    by_node.setdefault(u, Counter())[hops] += 1
            self._by_node = by_node
        return self._by_node.get(v, Counter())


def enumerate_paths(g: Graph, cap: int = DEFAULT_PATH_CAP) -> PathInventory:
    """Every simple S-D path by depth-first search.

    Raises ``PathExplosion`` as soon as more than ``cap`` paths are found and
    ``Disconnected`` when there is none.
    """
    g._require_terminals()
    s, d = g.source, g.destination
    adj = g.adj
    paths: list[tuple[int, ...]] = []
    path = [s]
    on_path = [False] * g.n
    on_path[s] = True
    # iterators over neighbours, one per depth
    stack = [iter(adj[s])]
    while stack:
        nxt = next(stack[-1], None)
        if nxt is None:
            stack.pop()
            on_path[path.pop()] = False
            continue
        if on_path[nxt]:
            continue
        if nxt == d:
            paths.append(tuple(path) + (d,))
            if len(paths) > cap:
                raise PathExplosion(cap)
            continue
        on_path[nxt] = True
        path.append(nxt)
        stack.append(iter(adj[nxt]))
    if not paths:
        raise Disconnected("source and destination are not connected")
    return PathInventory(paths, cap)


def _check_intermediary(g: Graph, v: int):
    g._require_terminals()
    if v in (g.source, g.destination) or not 0 <= v < g.n:
        raise NotIntermediary(f"node {v} is not an intermediary")


def sd_criticality(g: Graph, v: int, inventory: PathInventory) -> float:
    """Fraction of simple S-D paths that contain ``v``; 1 exactly for critical nodes."""
    _check_intermediary(g, v)
    through = sum(inventory.length_counts_through(v).values())
    return through / len(inventory)


def _weighted_share(through: Counter, total: Counter, alpha: float) -> float:
    # weights are rescaled by the shortest length so huge alpha cannot underflow
    shortest = min(total)
    if alpha == 0:
        num = float(sum(through.values()))
        den = float(sum(total.values()))
        return num / den
    w = {length: math.exp(-alpha * math.log(length / shortest)) for length in total}
    num = math.fsum(c * w[length] for length, c in through.items())
    den = math.fsum(c * w[length] for length, c in total.items())
    return num / den


def sd_alpha(g: Graph, v: int, alpha: float, inventory: PathInventory) -> float:
    """Length-weighted path share of ``v``; ``alpha = 0`` gives ``sd_criticality``."""
    _check_intermediary(g, v)
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    return _weighted_share(inventory.length_counts_through(v), inventory.length_counts(), alpha)


def shortest_path_counts(g: Graph, start: int) -> tuple[list[int], list[int]]:
    """BFS distances and number of shortest paths from ``start`` to each node."""
    dist = bfs_distances(g, start)
    order = sorted((d, u) for u, d in enumerate(dist) if d >= 0)
    sigma = [0] * g.n
    sigma[start] = 1
    for du, u in order:
        for w in g.adj[u]:
            if dist[w] == du + 1:
                sigma[w] += sigma[u]
    return dist, sigma


def sd_betweenness(g: Graph, v: int) -> float:
    """Share of shortest S-D paths through ``v``: ``sigma_Sv * sigma_vD / sigma_SD``."""
    _check_intermediary(g, v)
    return sd_betweenness_all(g)[v]


def sd_betweenness_all(g: Graph) -> dict[int, float]:
    """``sd_betweenness`` for every intermediary, sharing the two BFS passes."""
    g._require_terminals()
    s, d = g.source, g.destination
    dist_s, sig_s = shortest_path_counts(g, s)
    dist_d, sig_d = shortest_path_counts(g, d)
    if dist_s[d] < 0:
        raise Disconnected("source and destination are not connected")
    total = sig_s[d]
    out = {}
    for v in g.intermediaries():
        if dist_s[v] >= 0 and dist_d[v] >= 0 and dist_s[v] + dist_d[v] == dist_s[d]:
            out[v] = sig_s[v] * sig_d[v] / total
        else:
            out[v] = 0.0
    return out


def sd_alpha_all(g: Graph, alpha: float, inventory: PathInventory) -> dict[int, float]:
    total = inventory.length_counts()
    return {
        v: _weighted_share(inventory.length_counts_through(v), total, alpha)
        for v in g.intermediaries()
    }


def measures_table(g: Graph, alphas: Sequence[float] = (), inventory: PathInventory | None = None):
    """Rows ``(node, sd0, sd_alpha..., sd_inf)`` for every intermediary."""
    if inventory is None:
        inventory = enumerate_paths(g)
    sd0 = sd_alpha_all(g, 0.0, inventory)
    weighted = [sd_alpha_all(g, a, inventory) for a in alphas]
    sd_inf = sd_betweenness_all(g)
    return [(v, sd0[v], *(w[v] for w in weighted), sd_inf[v]) for v in g.intermediaries()]


def _alpha_label(alpha: float) -> str:
    return f"sd_alpha(α={alpha:g})"


def write_measures_csv(path: str | PathLike, g: Graph, alphas: Sequence[float] = (),
                       inventory: PathInventory | None = None) -> None:
    """CSV with columns ``node, sd0, sd_alpha(α=...), ..., sd_inf``."""
    rows = measures_table(g, alphas, inventory)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["node", "sd0", *(_alpha_label(a) for a in alphas), "sd_inf"])
        for row in rows:
            writer.writerow([row[0], *(repr(float(x)) for x in row[1:])])


def read_measures_csv(path: str | PathLike) -> tuple[list[str], list[tuple]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [(int(r[0]), *(float(x) for x in r[1:])) for r in reader]
    return header, rows
