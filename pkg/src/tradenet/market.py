"""One round of the intermediation game.

Every intermediary posts a price; the path from S to D with the lowest
total intermediary price is selected, ties broken first by fewer hops and
then uniformly at random among the remaining minimizers.  Trade happens only
if the selected cost does not exceed the threshold.

Prices are plain sequences indexed by node id; entries at S and D are
ignored.  Path costs are compared on an exact integer grid of 1e-9 tokens,
so float round-off from repeated price updates never breaks a genuine tie.
"""

from __future__ import annotations

import csv
import heapq
import math
import random
from dataclasses import dataclass
from os import PathLike
from typing import Iterable, Sequence

from .errors import Disconnected
from .netgraph import Graph

COST_SCALE = 10**9  # cost comparisons resolve to 1e-9 tokens


def to_ticks(x: float) -> int:
    return round(x * COST_SCALE)


def from_ticks(t: int) -> float:
    return t / COST_SCALE


@dataclass(frozen=True)
class RoundOutcome:
    selected_path: tuple[int, ...]
    cost: float
    hops: int
    feasible: bool
    payoffs: tuple[float, ...]
    threshold: float | None

    @property
    def intermediaries(self) -> tuple[int, ...]:
        return self.selected_path[1:-1]


def check_prices(g: Graph, prices: Sequence[float]) -> None:
    if len(prices) != g.n:
        raise ValueError(f"expected {g.n} prices, got {len(prices)}")
    for v in g.intermediaries():
        x = prices[v]
        if not (x >= 0 and math.isfinite(x)):
            raise ValueError(f"price of node {v} must be finite and nonnegative, got {x}")


def _lex_search(adj, ticks, s, d):
    """Label-setting search on (cost, hops) labels.

    Returns the finalized label of D plus, for each node, its predecessors
    on tight edges, and the finalization order (a topological order of the
    tight-edge DAG because hops strictly increase along it).
    """
    n = len(adj)
    cost = [None] * n
    hops = [0] * n
    preds = [None] * n
    done = [False] * n
    cost[s] = 0
    preds[s] = ()
    heap = [(0, 0, s)]
    order = []
    while heap:
        c, h, u = heapq.heappop(heap)
        if done[u] or c != cost[u] or h != hops[u]:
            continue
        done[u] = True
        order.append(u)
        if u == d:
            return c, h, preds, order
        nh = h + 1
        for w in adj[u]:
            if done[w]:
                continue
            nc = c if w == d else c + ticks[w]
            cw = cost[w]
            if cw is None or nc < cw or (nc == cw and nh < hops[w]):
                cost[w] = nc
                hops[w] = nh
                preds[w] = [u]
                heapq.heappush(heap, (nc, nh, w))
            elif nc == cw and nh == hops[w]:
                preds[w].append(u)
    raise Disconnected("source and destination are not connected")


def _sample_path(preds, order, s, d, rng: random.Random) -> tuple[int, ...]:
    count = {s: 1}
    for u in order:
        if u != s:
            count[u] = sum(count[p] for p in preds[u])
    path = [d]
    v = d
    while v != s:
        ps = preds[v]
        if len(ps) == 1:
            v = ps[0]
        else:
            r = rng.randrange(count[v])
            for p in ps:
                r -= count[p]
                if r < 0:
                    v = p
                    break
        path.append(v)
    path.reverse()
    return tuple(path)


def count_optimal_paths(g: Graph, prices: Sequence[float]) -> int:
    """Number of distinct paths attaining the (cost, hops) minimum."""
    g._require_terminals()
    ticks = [to_ticks(x) for x in prices]
    _, _, preds, order = _lex_search(g.adj, ticks, g.source, g.destination)
    count = {g.source: 1}
    for u in order:
        if u != g.source:
            count[u] = sum(count[p] for p in preds[u])
    return count[g.destination]


def min_cost(g: Graph, prices: Sequence[float]) -> tuple[float, int]:
    """Lexicographic minimum ``(total intermediary price, hop count)`` over S-D paths."""
    g._require_terminals()
    check_prices(g, prices)
    ticks = [to_ticks(x) for x in prices]
    c, h, _, _ = _lex_search(g.adj, ticks, g.source, g.destination)
    return from_ticks(c), h


def min_cost_fast(adj, prices, s, d) -> float:
    """``min_cost`` without validation; used inside long simulation loops."""
    c, _, _, _ = _lex_search(adj, [to_ticks(x) for x in prices], s, d)
    return from_ticks(c)


def select_cheapest_path(g: Graph, prices: Sequence[float], rng: random.Random) -> tuple[int, ...]:
    """A uniformly random path among the (cost, hops) minimizers."""
    g._require_terminals()
    check_prices(g, prices)
    return select_fast(g.adj, prices, g.source, g.destination, rng)


def select_fast(adj, prices, s, d, rng: random.Random) -> tuple[int, ...]:
    ticks = [to_ticks(x) for x in prices]
    _, _, preds, order = _lex_search(adj, ticks, s, d)
    return _sample_path(preds, order, s, d, rng)


def path_cost(prices: Sequence[float], path: Sequence[int]) -> float:
    """Sum of intermediary prices along ``path``, snapped to the comparison grid."""
    return from_ticks(sum(to_ticks(prices[v]) for v in path[1:-1]))


def play_round(g: Graph, prices: Sequence[float], threshold: float | None,
               rng: random.Random) -> RoundOutcome:
    """Select a path, decide feasibility, and split the surplus.

    On-path intermediaries earn their price, off-path ones nothing, and S
    and D each take half of ``threshold - cost``.  Infeasible rounds pay
    nobody but still report the selected path.  ``threshold=None`` models
    the threshold-free regime: trade always happens and S, D earn 0.
    """
    if threshold is not None and not threshold > 0:
        raise ValueError("threshold must be positive")
    path = select_cheapest_path(g, prices, rng)
    cost = path_cost(prices, path)
    feasible = threshold is None or cost <= threshold
    payoffs = [0.0] * g.n
    if feasible:
        for v in path[1:-1]:
            payoffs[v] = float(prices[v])
        if threshold is not None:
            surplus = (threshold - cost) / 2.0
            payoffs[g.source] = surplus
            payoffs[g.destination] = surplus
    return RoundOutcome(path, cost, len(path) - 1, feasible, tuple(payoffs), threshold)


# ---------------------------------------------------------------- CSV logs

ROUND_COLUMNS = ["series", "round", "cost", "hops", "feasible", "path"]
NODE_COLUMNS = ["series", "round", "node", "price", "payoff", "on_path"]


def write_round_log(path: str | PathLike, entries: Iterable) -> None:
    """One row per round from ``(series, round, outcome, prices)`` entries."""
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ROUND_COLUMNS)
        for series, rnd, out, _ in entries:
            w.writerow([series, rnd, repr(out.cost), out.hops, int(out.feasible),
                        ";".join(map(str, out.selected_path))])


def write_node_log(path: str | PathLike, entries: Iterable, g_by_series) -> None:
    """Long-format companion: one row per (round, intermediary).

    ``g_by_series`` maps a series id to its graph, needed to know which
    nodes are intermediaries.
    """
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(NODE_COLUMNS)
        for series, rnd, out, prices in entries:
            on = set(out.intermediaries)
            for v in g_by_series[series].intermediaries():
                w.writerow([series, rnd, v, repr(float(prices[v])), repr(out.payoffs[v]),
                            int(v in on)])


def read_round_log(path: str | PathLike) -> list[dict]:
    with open(path, newline="", encoding="ascii") as fh:
        return [
            {
                "series": int(r["series"]),
                "round": int(r["round"]),
                "cost": float(r["cost"]),
                "hops": int(r["hops"]),
                "feasible": bool(int(r["feasible"])),
                "path": tuple(int(x) for x in r["path"].split(";")),
            }
            for r in csv.DictReader(fh)
        ]


def read_node_log(path: str | PathLike) -> list[dict]:
    with open(path, newline="", encoding="ascii") as fh:
        return [
            {
                "series": int(r["series"]),
                "round": int(r["round"]),
                "node": int(r["node"]),
                "price": float(r["price"]),
                "payoff": float(r["payoff"]),
                "on_path": bool(int(r["on_path"])),
            }
            for r in csv.DictReader(fh)
        ]
