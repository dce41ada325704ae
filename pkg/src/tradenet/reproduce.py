"""Desk-scale reproduction protocols and their pass/fail checks."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .analysis import cost_regression, pearson, restrict_M, welch_t
from .errors import DegenerateSample, TradenetError
from .expt import LongRunRecord, SummaryStats, lemma_grid, topology_batch

T_CRITICAL = 2.6
CORR_MIN = 0.5
R2_MARGIN = 0.05


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}" + (f": {self.detail}" if self.detail else "")


def format_report(title: str, checks: Sequence[Check]) -> str:
    ok = sum(c.passed for c in checks)
    lines = [title, "=" * len(title), *(c.line() for c in checks),
             f"{ok}/{len(checks)} checks passed"]
    return "\n".join(lines) + "\n"


def lemma_checks(probe_rounds: int = 1000, rho: float = 1.0, seed: int = 0) -> list[Check]:
    out = []
    for M, hops, ratio, chk in lemma_grid(probe_rounds=probe_rounds, rho=rho, seed=seed):
        out.append(Check(
            f"M={M} hops={hops} sigma/rho={ratio}",
            chk.diverges == chk.predicted,
            f"predicted={chk.predicted} measured={chk.diverges} "
            f"cost[T/2]={chk.cost_half:.6g} cost[T]={chk.cost_full:.6g}",
        ))
    return out


TABLE_SETTINGS = {"table2": [(26, 3)], "table3": [(50, 4), (100, 4)]}


def topology_comparison(n: int, k: int, replications: int = 100, rounds: int = 15,
                        seed: int = 0, jobs: int = 1) -> dict[float, list[SummaryStats]]:
    return {p: topology_batch(n, k, p, replications, rounds, seed=seed, jobs=jobs)
            for p in (0.1, 1.0)}


def topology_checks(n: int, k: int, batches: dict[float, list[SummaryStats]]) -> list[Check]:
    rand = [s for s in batches[1.0] if not s.pooled]
    sw = [s for s in batches[0.1] if not s.pooled]
    out = []
    for attr, want_random_higher in (("efficiency", True), ("mean_cost", False)):
        a = [getattr(s, attr) for s in rand]
        b = [getattr(s, attr) for s in sw]
        rel = ">" if want_random_higher else "<"
        name = f"n={n} k={k}: {attr}(random) {rel} {attr}(small-world)"
        try:
            t, df = welch_t(a, b)
        except DegenerateSample as exc:
            out.append(Check(name, False, f"Welch t undefined: {exc}"))
            continue
        ok = (t > T_CRITICAL) if want_random_higher else (t < -T_CRITICAL)
        out.append(Check(name, ok, f"{np.mean(a):.3f} vs {np.mean(b):.3f}, Welch t={t:.2f} (df={df:.1f})"))
    return out


def summary_table(rows: dict[str, SummaryStats]) -> str:
    head = f"{'network':<10}{'efficiency':>11}{'price':>8}{'price CP':>10}{'cost':>9}{'profit':>8}{'length':>8}"
    lines = [head]
    for name, s in rows.items():
        lines.append(f"{name:<10}{s.efficiency:>11.2f}{s.mean_price:>8.2f}{s.mean_price_in_cp:>10.2f}"
                     f"{s.mean_cost:>9.2f}{s.mean_profit:>8.2f}{s.mean_length:>8.2f}")
    return "\n".join(lines) + "\n"


def _by_M(records):
    groups = defaultdict(list)
    for r in records:
        groups[r.M].append(r)
    return groups


def longrun_checks(records: Sequence[LongRunRecord]) -> list[Check]:
    """Zero cost beyond three disjoint paths, M ordering, APL trend, p contrast, R^2 ordering."""
    groups = _by_M(records)
    out = []
    high = [r.final_cost for r in records if r.M >= 4]
    out.append(Check("mean final cost is 0 for M >= 4", bool(high) and max(high) == 0.0,
                     f"{len(high)} networks, max cost {max(high) if high else math.nan:g}"))
    means = [float(np.mean([r.final_cost for r in groups[m]])) if groups[m] else math.nan
             for m in (1, 2, 3)]
    out.append(Check("mean final cost strictly decreasing over M = 1, 2, 3",
                     means[0] > means[1] > means[2],
                     ", ".join(f"M={m}: {c:.1f} (n={len(groups[m])})" for m, c in zip((1, 2, 3), means))))
    for m in (1, 2, 3):
        rs = groups[m]
        if len(rs) < 3:
            out.append(Check(f"corr(final cost, APL) >= {CORR_MIN} within M={m}", False,
                             f"only {len(rs)} networks"))
            continue
        try:
            rho = pearson([r.final_cost for r in rs], [r.apl for r in rs])
        except DegenerateSample as exc:
            out.append(Check(f"corr(final cost, APL) >= {CORR_MIN} within M={m}", False, str(exc)))
            continue
        out.append(Check(f"corr(final cost, APL) >= {CORR_MIN} within M={m}", rho >= CORR_MIN,
                         f"r={rho:.3f} over {len(rs)} networks"))
    for n in sorted({r.n for r in records}):
        sw = [r.final_cost for r in records if r.n == n and r.p == 0.1]
        rd = [r.final_cost for r in records if r.n == n and r.p == 1.0]
        name = f"n={n}: final cost p=0.1 > p=1 over matched degrees"
        try:
            t, df = welch_t(sw, rd)
        except DegenerateSample as exc:
            out.append(Check(name, False, f"Welch t undefined: {exc}"))
            continue
        out.append(Check(name, t > T_CRITICAL,
                         f"{np.mean(sw):.1f} vs {np.mean(rd):.1f}, Welch t={t:.2f} (df={df:.1f})"))
    sub = restrict_M(records)
    name = f"R^2(APL) exceeds R^2(clustering) by >= {R2_MARGIN}"
    try:
        r2_apl = cost_regression(sub, "apl").r_squared
        r2_cc = cost_regression(sub, "clustering").r_squared
    except TradenetError as exc:
        out.append(Check(name, False, f"regression failed: {exc}"))
        return out
    out.append(Check(name, r2_apl - r2_cc >= R2_MARGIN,
                     f"R^2(APL)={r2_apl:.3f}, R^2(clustering)={r2_cc:.3f}, {len(sub)} rows with M <= 3"))
    return out
