"""Experiment orchestration: S-D placement, series, batches, long runs.

Randomness is derived per replication from ``(seed, index)`` with
``numpy.random.SeedSequence``, so results do not depend on execution order
or on how many worker processes are used.
"""

from __future__ import annotations

import csv
import json
import math
import os
import random
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from os import PathLike
from typing import Callable, Iterable, Sequence

import numpy as np

from .agents import AgentParams, PriceInitializer, apply_update, init_prices, read_sample
from .errors import ConfigError, EmptyLog, NoEligiblePair
from .market import RoundOutcome, min_cost_fast, play_round, select_fast
from .netgraph import (
    Graph,
    MAX_CONNECT_TRIES,
    NetworkSpec,
    all_pairs_distances,
    average_path_length,
    clustering_coefficient,
    generate_ws,
    load,
    make_parallel_paths,
    node_disjoint_paths,
)

LONGRUN_AGENTS = AgentParams(sigma=2.4, rho=1.0)
TABLE_AGENTS = AgentParams(sigma=2.6, rho=1.2)


def derive_seeds(seed: int, *key: int, count: int = 2) -> list[int]:
    """Independent 63-bit seeds for the stream identified by ``(seed, *key)``."""
    ss = np.random.SeedSequence([seed & (2**64 - 1), *key])
    return [int(x) >> 1 for x in ss.generate_state(count, dtype=np.uint64)]


def default_sd_offset(n: int) -> int:
    return 2 if n < 50 else 1


def pmap(func: Callable, items: Sequence, jobs: int = 1) -> list:
    """Order-preserving map, optionally across worker processes."""
    if jobs <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items, chunksize=max(1, len(items) // (4 * jobs))))


# ---------------------------------------------------------------- config


@dataclass(frozen=True)
class ExperimentConfig:
    network: NetworkSpec | str
    rounds: int = 15
    replications: int = 1
    threshold: float | None = 100.0
    agent_params: AgentParams = TABLE_AGENTS
    initializer: PriceInitializer = field(default_factory=PriceInitializer.constant)
    sd_rule: int = 2
    seed: int = 0
    exclude_first: bool = True
    min_disjoint_paths: int = 1

    def __post_init__(self):
        if self.rounds < 1:
            raise ConfigError("rounds must be >= 1")
        if self.replications < 1:
            raise ConfigError("replications must be >= 1")
        if self.threshold is not None and not self.threshold > 0:
            raise ConfigError("threshold must be positive when given")
        if self.sd_rule < 0:
            raise ConfigError("sd_rule must be nonnegative")
        if self.min_disjoint_paths < 1:
            raise ConfigError("min_disjoint_paths must be >= 1")

    @classmethod
    def from_dict(cls, raw: dict, base_dir: str | None = None) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "network" not in raw:
            raise ConfigError("config needs a 'network' entry")
        try:
            kw = dict(raw)
            net = kw["network"]
            if isinstance(net, dict):
                kw["network"] = NetworkSpec(int(net["n"]), int(net["k"]), float(net["p"]),
                                            int(net.get("seed", 0)))
            elif isinstance(net, str):
                kw["network"] = _resolve(net, base_dir)
                if not os.path.isfile(kw["network"]):
                    raise ConfigError(f"graph file not found: {kw['network']}")
            else:
                raise ConfigError("network must be an object or a graph file path")
            if "agent_params" in kw:
                kw["agent_params"] = AgentParams(**kw["agent_params"])
            if "initializer" in kw:
                kw["initializer"] = _initializer_from_dict(kw["initializer"], base_dir)
            return cls(**kw)
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError, OSError) as exc:
            raise ConfigError(f"invalid config: {exc}") from exc

    def to_dict(self) -> dict:
        out = asdict(self)
        if isinstance(self.network, NetworkSpec):
            out["network"] = asdict(self.network)
        out["initializer"]["sample"] = list(self.initializer.sample)
        return out


def _resolve(path: str, base_dir: str | None) -> str:
    if base_dir and not os.path.isabs(path):
        return os.path.join(base_dir, path)
    return path


def _initializer_from_dict(raw: dict, base_dir: str | None) -> PriceInitializer:
    raw = dict(raw)
    mode = raw.pop("mode", "constant")
    if mode == "constant":
        return PriceInitializer.constant(raw.pop("value", 0.0))
    if mode == "uniform":
        return PriceInitializer.uniform()
    if mode == "bootstrap":
        if "sample_file" in raw:
            return PriceInitializer.bootstrap(read_sample(_resolve(raw["sample_file"], base_dir)))
        if "sample" in raw:
            return PriceInitializer("bootstrap", sample=tuple(float(x) for x in raw["sample"]))
        return PriceInitializer.bootstrap()
    raise ConfigError(f"unknown initializer mode {mode!r}")


def load_config(path: str | PathLike) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    return ExperimentConfig.from_dict(raw, base_dir=os.path.dirname(os.fspath(path)))


# ---------------------------------------------------------------- logs & stats


@dataclass
class SeriesLog:
    outcomes: list[RoundOutcome]
    prices: list[list[float]]  # prices posted in each round
    final_prices: list[float]  # after the last update
    source: int
    destination: int
    graph_digest: str
    seed: int | None = None
    replication: int = 0


@dataclass(frozen=True)
class SummaryStats:
    efficiency: float
    mean_price: float
    mean_price_in_cp: float
    mean_cost: float
    mean_profit: float
    mean_length: float
    n_rounds: int
    replication: int | None = None  # None marks the pooled row
    warning: str = ""

    @property
    def pooled(self) -> bool:
        return self.replication is None

    @classmethod
    def empty(cls, replication, warning):
        nan = math.nan
        return cls(nan, nan, nan, nan, nan, nan, 0, replication, warning)


def summarize(logs: Iterable[SeriesLog], exclude_first: bool = True,
              replication: int | None = None) -> SummaryStats:
    """Table-style means over the rounds of one or more series.

    Price and profit are averaged per intermediary per round; price in CP
    over (round, selected-path intermediary) pairs; cost and length (hops)
    per round, infeasible rounds included.
    """
    logs = list(logs)
    if not logs:
        raise EmptyLog("no series to summarize")
    n_rounds = feasible = 0
    cost = length = 0.0
    price_sum = profit_sum = 0.0
    node_rounds = 0
    cp_sum = 0.0
    cp_count = 0
    start = 1 if exclude_first else 0
    for log in logs:
        inter = [v for v in range(len(log.final_prices)) if v not in (log.source, log.destination)]
        for t in range(start, len(log.outcomes)):
            out, prices = log.outcomes[t], log.prices[t]
            n_rounds += 1
            feasible += out.feasible
            cost += out.cost
            length += out.hops
            price_sum += sum(prices[v] for v in inter)
            profit_sum += sum(out.payoffs[v] for v in inter)
            node_rounds += len(inter)
            mids = out.intermediaries
            cp_sum += sum(prices[v] for v in mids)
            cp_count += len(mids)
    if n_rounds == 0:
        raise EmptyLog("no rounds left after excluding the first round")
    return SummaryStats(
        efficiency=feasible / n_rounds,
        mean_price=price_sum / node_rounds if node_rounds else 0.0,
        mean_price_in_cp=cp_sum / cp_count if cp_count else 0.0,
        mean_cost=cost / n_rounds,
        mean_profit=profit_sum / node_rounds if node_rounds else 0.0,
        mean_length=length / n_rounds,
        n_rounds=n_rounds,
        replication=replication,
    )


SUMMARY_COLUMNS = ["replication", "pooled", "n_rounds", "efficiency", "mean_price",
                   "mean_price_in_cp", "mean_cost", "mean_profit", "mean_length", "warning"]


def write_summary_csv(path: str | PathLike, stats: Sequence[SummaryStats]) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for s in stats:
            w.writerow(["" if s.pooled else s.replication, int(s.pooled), s.n_rounds,
                        repr(s.efficiency), repr(s.mean_price), repr(s.mean_price_in_cp),
                        repr(s.mean_cost), repr(s.mean_profit), repr(s.mean_length), s.warning])


def read_summary_csv(path: str | PathLike) -> list[SummaryStats]:
    out = []
    with open(path, newline="", encoding="ascii") as fh:
        for r in csv.DictReader(fh):
            out.append(SummaryStats(
                efficiency=float(r["efficiency"]),
                mean_price=float(r["mean_price"]),
                mean_price_in_cp=float(r["mean_price_in_cp"]),
                mean_cost=float(r["mean_cost"]),
                mean_profit=float(r["mean_profit"]),
                mean_length=float(r["mean_length"]),
                n_rounds=int(r["n_rounds"]),
                replication=None if r["pooled"] == "1" else int(r["replication"]),
                warning=r["warning"],
            ))
    return out


# ---------------------------------------------------------------- series


def choose_sd_pair(g: Graph, offset: int, rng: random.Random,
                   min_disjoint: int = 1) -> tuple[int, int]:
    """Uniform ordered pair at hop distance >= diameter - offset.

    With ``min_disjoint > 1`` the draw is restricted to pairs joined by at
    least that many node-disjoint paths; ``min_disjoint=2`` excludes pairs
    separated by a critical node.
    """
    dist = all_pairs_distances(g)
    diam = max(max(row) for row in dist)
    need = diam - offset
    pairs = [(u, v) for u in range(g.n) for v in range(g.n)
             if u != v and dist[u][v] >= max(need, 1)]
    if not pairs:
        raise NoEligiblePair(f"no pair at distance >= {need}")
    if min_disjoint <= 1:
        return rng.choice(pairs)
    rng.shuffle(pairs)
    for u, v in pairs:
        if node_disjoint_paths(g.with_terminals(u, v)) >= min_disjoint:
            return u, v
    raise NoEligiblePair(f"no pair at distance >= {need} with {min_disjoint} disjoint paths")


def run_series(g: Graph, config: ExperimentConfig, rng: random.Random | None = None,
               replication: int = 0) -> SeriesLog:
    """Initialize prices, then play and update for ``config.rounds`` rounds."""
    g._require_terminals()
    if rng is None:
        rng = random.Random(config.seed)
    params = config.agent_params
    prices = init_prices(g, config.initializer, rng)
    inter = g.intermediaries()
    outcomes, snaps = [], []
    for _ in range(config.rounds):
        out = play_round(g, prices, config.threshold, rng)
        outcomes.append(out)
        snaps.append(list(prices))
        apply_update(prices, set(out.intermediaries), inter, params)
    return SeriesLog(outcomes, snaps, prices, g.source, g.destination, g.digest(),
                     seed=config.seed, replication=replication)


def replication_graph(config: ExperimentConfig, index: int, rng: random.Random) -> Graph:
    """The graph (with terminals) used by replication ``index``.

    Generated networks without an eligible S-D pair are redrawn, up to
    ``MAX_CONNECT_TRIES`` times.
    """
    if not isinstance(config.network, NetworkSpec):
        g = load(config.network)
        if g.has_terminals:
            return g
        return g.with_terminals(*choose_sd_pair(g, config.sd_rule, rng, config.min_disjoint_paths))
    for attempt in range(MAX_CONNECT_TRIES):
        key = (index,) if attempt == 0 else (index, attempt)
        net_seed = derive_seeds(config.network.seed, *key, count=1)[0]
        g = generate_ws(replace(config.network, seed=net_seed))
        try:
            pair = choose_sd_pair(g, config.sd_rule, rng, config.min_disjoint_paths)
        except NoEligiblePair:
            continue
        return g.with_terminals(*pair)
    raise NoEligiblePair(f"replication {index}: no network with an eligible S-D pair")


def run_replication(config: ExperimentConfig, index: int) -> tuple[Graph, SeriesLog]:
    rng = random.Random(derive_seeds(config.seed, index, count=1)[0])
    g = replication_graph(config, index, rng)
    return g, run_series(g, config, rng, replication=index)


def _replication_task(arg):
    return run_replication(*arg)


def run_batch_logs(config: ExperimentConfig, jobs: int = 1) -> list[tuple[Graph, SeriesLog]]:
    return pmap(_replication_task, [(config, i) for i in range(config.replications)], jobs)


def summarize_batch(config: ExperimentConfig, logs: Sequence[SeriesLog]) -> list[SummaryStats]:
    stats = []
    for log in logs:
        try:
            stats.append(summarize([log], config.exclude_first, log.replication))
        except EmptyLog as exc:
            stats.append(SummaryStats.empty(log.replication, str(exc)))
    try:
        stats.append(summarize(logs, config.exclude_first, None))
    except EmptyLog as exc:
        warnings.warn(f"batch summary is empty: {exc}", RuntimeWarning, stacklevel=2)
        stats.append(SummaryStats.empty(None, str(exc)))
    return stats


def run_batch(config: ExperimentConfig, jobs: int = 1) -> list[SummaryStats]:
    """Per-replication summaries in index order, followed by the pooled row."""
    logs = [log for _, log in run_batch_logs(config, jobs)]
    return summarize_batch(config, logs)


# ---------------------------------------------------------------- threshold-free runs


def simulate_threshold_free(g: Graph, params: AgentParams, rounds: int, rng: random.Random,
                            initial_price: float = 0.0, checkpoints: Iterable[int] = ()):
    """Run the price dynamics with no trading threshold.

    Returns ``(costs, prices)``: the cheapest-path cost of the prices reached
    after each checkpoint round (0 = before any round) and the final prices.
    """
    g._require_terminals()
    adj, s, d = g.adj, g.source, g.destination
    inter = g.intermediaries()
    prices = [0.0] * g.n
    for v in inter:
        prices[v] = initial_price
    wanted = set(checkpoints)
    costs = {}
    if 0 in wanted:
        costs[0] = min_cost_fast(adj, prices, s, d)
    for t in range(1, rounds + 1):
        path = select_fast(adj, prices, s, d, rng)
        apply_update(prices, set(path[1:-1]), inter, params)
        if t in wanted:
            costs[t] = min_cost_fast(adj, prices, s, d)
    return costs, prices


def run_longrun(g: Graph, agent_params: AgentParams = LONGRUN_AGENTS, rounds: int = 10**4,
                rng: random.Random | None = None, seed: int = 0) -> float:
    """Cheapest-path cost after ``rounds`` threshold-free rounds from zero prices."""
    if rng is None:
        rng = random.Random(seed)
    costs, _ = simulate_threshold_free(g, agent_params, rounds, rng, 0.0, [rounds])
    return costs[rounds]


@dataclass(frozen=True)
class DivergenceCheck:
    diverges: bool
    predicted: bool
    cost_half: float
    cost_full: float


def lemma_divergence_check(M: int, hops: int, sigma: float, rho: float,
                           probe_rounds: int = 1000, initial_price: float = 0.0,
                           seed: int = 0) -> DivergenceCheck:
    """Compare measured cost growth on ``M`` equal parallel paths with ``sigma/rho > M-1``.

    Growth is declared when the cheapest cost at ``probe_rounds`` exceeds the
    cost at ``probe_rounds // 2`` by more than one full increment of every
    node on a path, which bounded oscillation cannot produce.
    """
    g = make_parallel_paths(M, hops)
    half = probe_rounds // 2
    costs, _ = simulate_threshold_free(g, AgentParams(sigma, rho), probe_rounds,
                                       random.Random(seed), initial_price, [half, probe_rounds])
    margin = (hops - 1) * sigma
    diverges = costs[probe_rounds] - costs[half] > margin
    predicted = sigma > (M - 1) * rho
    return DivergenceCheck(diverges, predicted, costs[half], costs[probe_rounds])


LEMMA_RATIOS = (0.5, 1.5, 2.4, 3.5, 4.5)


def lemma_grid(Ms=range(1, 6), hops_values=(2, 3, 4), ratios=LEMMA_RATIOS, rho: float = 1.0,
               probe_rounds: int = 1000, seed: int = 0) -> list[tuple[int, int, float, DivergenceCheck]]:
    """Every grid cell except the boundary ``ratio == M - 1``."""
    out = []
    for M in Ms:
        for hops in hops_values:
            for ratio in ratios:
                if math.isclose(ratio, M - 1):
                    continue
                chk = lemma_divergence_check(M, hops, ratio * rho, rho, probe_rounds, seed=seed)
                out.append((M, hops, ratio, chk))
    return out


# ---------------------------------------------------------------- long-run ensemble


@dataclass(frozen=True)
class LongRunRecord:
    n: int
    p: float
    k: int
    net_seed: int
    source: int
    destination: int
    M: int
    apl: float
    clustering: float
    final_cost: float
    final_hops: int


def _longrun_task(arg) -> LongRunRecord:
    n, p, k, net_seed, play_seed, rounds, params, offset = arg
    g = generate_ws(NetworkSpec(n, k, p, net_seed))
    rng = random.Random(play_seed)
    g = g.with_terminals(*choose_sd_pair(g, offset, rng))
    costs, prices = simulate_threshold_free(g, params, rounds, rng, 0.0, [rounds])
    path = select_fast(g.adj, prices, g.source, g.destination, random.Random(0))
    return LongRunRecord(n, p, k, net_seed, g.source, g.destination, node_disjoint_paths(g),
                         average_path_length(g), clustering_coefficient(g), costs[rounds],
                         len(path) - 1)


def longrun_ensemble(sizes=(26, 50), ps=(0.1, 1.0), degrees=range(2, 11),
                     networks_per_config: int = 225, rounds: int = 1000,
                     params: AgentParams = LONGRUN_AGENTS, seed: int = 0,
                     jobs: int = 1) -> list[LongRunRecord]:
    """Threshold-free final costs over a Watts-Strogatz ensemble.

    A configuration is one ``(n, p)`` pair; its networks cycle through
    ``degrees`` so every degree is equally represented.  Degrees that are
    invalid for a size are skipped.
    """
    degrees = list(degrees)
    tasks = []
    for n in sizes:
        valid = [k for k in degrees if k < n and not (k % 2 and n % 2)]
        for p in ps:
            for i in range(networks_per_config):
                k = valid[i % len(valid)]
                net_seed, play_seed = derive_seeds(seed, n, round(p * 10**6), i)
                tasks.append((n, p, k, net_seed, play_seed, rounds, params, default_sd_offset(n)))
    return pmap(_longrun_task, tasks, jobs)


LONGRUN_COLUMNS = [f.name for f in fields(LongRunRecord)]


def write_longrun_csv(path: str | PathLike, records: Sequence[LongRunRecord]) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(LONGRUN_COLUMNS)
        for r in records:
            w.writerow([repr(x) if isinstance(x, float) else x for x in asdict(r).values()])


def read_longrun_csv(path: str | PathLike) -> list[LongRunRecord]:
    casts = {f.name: f.type for f in fields(LongRunRecord)}
    out = []
    with open(path, newline="", encoding="ascii") as fh:
        for r in csv.DictReader(fh):
            out.append(LongRunRecord(**{
                k: (float(v) if casts[k] == "float" else int(v)) for k, v in r.items()
            }))
    return out


# ---------------------------------------------------------------- topology comparison


def topology_batch(n: int, k: int, p: float, replications: int = 100, rounds: int = 15,
                   threshold: float = 100.0, params: AgentParams = TABLE_AGENTS,
                   initializer: PriceInitializer | None = None, seed: int = 0,
                   min_disjoint_paths: int = 2, jobs: int = 1) -> list[SummaryStats]:
    """Thresholded batch on a fresh WS(n, k, p) network per replication.

    By default S-D pairs with a critical node are excluded, so every series
    has at least two competing disjoint routes.
    """
    config = ExperimentConfig(
        network=NetworkSpec(n, k, p, seed=derive_seeds(seed, n, k, round(p * 10**6), count=1)[0]),
        rounds=rounds,
        replications=replications,
        threshold=threshold,
        agent_params=params,
        initializer=initializer or PriceInitializer.bootstrap(),
        sd_rule=default_sd_offset(n),
        seed=seed,
        min_disjoint_paths=min_disjoint_paths,
    )
    return run_batch(config, jobs)
