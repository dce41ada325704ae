"""Behavioural price dynamics: intermediaries on the last selected path raise
their price by ``sigma``; everyone else lowers it by ``rho``, never below 0."""

from __future__ import annotations

import random
from dataclasses import dataclass
from importlib import resources
from os import PathLike
from typing import Sequence

from .errors import EmptySample, TooShort
from .netgraph import Graph

EXPERIMENT_CAP = 100.0


@dataclass(frozen=True)
class AgentParams:
    sigma: float
    rho: float
    floor: float = 0.0
    cap: float | None = None

    def __post_init__(self):
        if not (self.sigma >= 0 and self.rho >= 0):
            raise ValueError("sigma and rho must be nonnegative")
        if self.cap is not None and self.cap < self.floor:
            raise ValueError("cap must not be below the floor")


@dataclass(frozen=True)
class PriceInitializer:
    """How first-round prices are drawn.

    ``mode`` is ``"constant"`` (every intermediary gets ``value``),
    ``"bootstrap"`` (i.i.d. draws with replacement from ``sample``) or
    ``"uniform"`` (integers 0..100).
    """

    mode: str = "constant"
    value: float = 0.0
    sample: tuple[float, ...] = ()

    def __post_init__(self):
        if self.mode not in ("constant", "bootstrap", "uniform"):
            raise ValueError(f"unknown initializer mode {self.mode!r}")
        if self.mode == "constant" and self.value < 0:
            raise ValueError("constant initial price must be nonnegative")

    @classmethod
    def constant(cls, value: float = 0.0) -> "PriceInitializer":
        return cls("constant", float(value))

    @classmethod
    def bootstrap(cls, sample: Sequence[float] | None = None) -> "PriceInitializer":
        """Bootstrap from ``sample``; ``None`` means the bundled default sample."""
        return cls("bootstrap", sample=tuple(default_sample() if sample is None else sample))

    @classmethod
    def uniform(cls) -> "PriceInitializer":
        return cls("uniform")


def read_sample(path: str | PathLike) -> list[float]:
    """Empirical sample file: one nonnegative real per line; blank and ``#`` lines skipped."""
    with open(path, encoding="utf-8") as fh:
        return _parse_sample(fh.read())


def _parse_sample(text: str) -> list[float]:
    values = [float(line) for line in text.splitlines()
              if line.strip() and not line.lstrip().startswith("#")]
    if any(v < 0 for v in values):
        raise ValueError("sample values must be nonnegative")
    return values


def default_sample() -> list[float]:
    """Bundled first-round price sample (see README for how it was built)."""
    text = resources.files("tradenet").joinpath("data/initial_prices.txt").read_text()
    return _parse_sample(text)


def init_prices(g: Graph, init: PriceInitializer, rng: random.Random) -> list[float]:
    prices = [0.0] * g.n
    nodes = g.intermediaries()
    if init.mode == "constant":
        for v in nodes:
            prices[v] = init.value
    elif init.mode == "bootstrap":
        if not init.sample:
            raise EmptySample("bootstrap initialization needs a non-empty sample")
        for v in nodes:
            prices[v] = float(rng.choice(init.sample))
    else:
        for v in nodes:
            prices[v] = float(rng.randint(0, 100))
    return prices


def apply_update(prices: list[float], on_path, intermediaries, params: AgentParams) -> None:
    """In-place form of ``update_prices``; ``on_path`` is a set of node ids."""
    sigma, rho, floor, cap = params.sigma, params.rho, params.floor, params.cap
    for v in intermediaries:
        if v in on_path:
            x = prices[v] + sigma
            prices[v] = x if cap is None or x < cap else cap
        else:
            x = prices[v] - rho
            prices[v] = x if x > floor else floor


def update_prices(g: Graph, prices: Sequence[float], selected_path: Sequence[int],
                  params: AgentParams) -> list[float]:
    """Prices for the next round; the input is left untouched."""
    out = list(prices)
    apply_update(out, set(selected_path[1:-1]), g.intermediaries(), params)
    return out


@dataclass(frozen=True)
class ConditionalDeltas:
    mean_delta_on: float
    mean_delta_off: float
    p_increase_on: float
    p_decrease_off: float
    n_on: int
    n_off: int


def _mean(xs):
    return sum(xs) / len(xs) if xs else 0.0


def conditional_deltas(log) -> ConditionalDeltas:
    """Round-to-round price changes split by previous-round path membership.

    ``log`` is a ``SeriesLog``.  The change for round ``t`` is measured as
    (price posted in ``t+1``) - (price posted in ``t``), where the
    price after the last round counts as a posted price.  Empty groups
    report 0.
    """
    snaps = list(log.prices) + [log.final_prices]
    if len(snaps) < 2 or len(log.outcomes) < 1 or len(log.prices) < 2:
        raise TooShort("need at least two rounds")
    on_d, off_d = [], []
    nodes = [v for v in range(len(snaps[0])) if v not in (log.source, log.destination)]
    for t, out in enumerate(log.outcomes):
        before, after = snaps[t], snaps[t + 1]
        on = set(out.intermediaries)
        for v in nodes:
            (on_d if v in on else off_d).append(after[v] - before[v])
    return ConditionalDeltas(
        mean_delta_on=_mean(on_d),
        mean_delta_off=_mean(off_d),
        p_increase_on=_mean([1.0 if x > 0 else 0.0 for x in on_d]),
        p_decrease_off=_mean([1.0 if x < 0 else 0.0 for x in off_d]),
        n_on=len(on_d),
        n_off=len(off_d),
    )
