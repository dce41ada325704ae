"""Regressions and two-sample statistics for simulation output."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from os import PathLike
from typing import Sequence

import numpy as np

from .centrality import PathInventory, enumerate_paths, sd_alpha_all
from .errors import DegenerateSample, MOutOfRange, RankDeficient, TooFewObservations
from .netgraph import Graph

RANK_TOL = 1e-10


@dataclass(frozen=True)
class RegressionResult:
    coefficients: np.ndarray
    standard_errors: np.ndarray
    r_squared: float
    adj_r_squared: float
    rmse: float
    n: int
    names: tuple[str, ...] = ()
    residuals: np.ndarray | None = None


def _standardize(a: np.ndarray) -> np.ndarray:
    sd = a.std(axis=0)
    if np.any(sd == 0):
        raise RankDeficient("a column has zero variance")
    return (a - a.mean(axis=0)) / sd


def ols(design, response, standardize: bool = False, names: Sequence[str] = ()) -> RegressionResult:
    """Least squares via Householder QR.

    No intercept is added.  With ``standardize`` every column and the
    response are centred and scaled to unit (population) standard deviation
    first.  R-squared is always measured against the centred response;
    RMSE is ``sqrt(SSR / n)`` on the scale of the fitted data.
    """
    X = np.asarray(design, dtype=float)
    y = np.asarray(response, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n, p = X.shape
    if y.shape != (n,):
        raise ValueError("response length does not match design rows")
    if n <= p:
        raise TooFewObservations(f"{n} observations for {p} coefficients")
    if standardize:
        X = _standardize(X)
        y = _standardize(y[:, None])[:, 0]
    Q, R = np.linalg.qr(X, mode="reduced")
    diag = np.abs(np.diag(R))
    if diag.min() <= RANK_TOL * max(diag.max(), 1.0):
        raise RankDeficient("design matrix is not of full column rank")
    beta = np.linalg.solve(R, Q.T @ y)
    resid = y - X @ beta
    ssr = float(resid @ resid)
    sst = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - ssr / sst if sst > 0 else 0.0
    dof = n - p - (1 if standardize else 0)
    sigma2 = ssr / dof
    r_inv = np.linalg.solve(R, np.eye(p))
    se = np.sqrt(sigma2 * (r_inv**2).sum(axis=1))
    adj = 1.0 - (1.0 - r2) * (n - 1) / dof
    return RegressionResult(beta, se, r2, adj, math.sqrt(ssr / n), n, tuple(names), resid)


def kronecker_design(values, Ms, levels=(1, 2, 3)) -> np.ndarray:
    """Columns ``value * [M == level]`` for each level."""
    v = np.asarray(values, dtype=float)
    m = np.asarray(Ms)
    return np.column_stack([v * (m == lv) for lv in levels])


def cost_regression(dataset, predictor: str) -> RegressionResult:
    """Standardized M-specific slope model of final cost on clustering or APL.

    ``dataset`` rows expose ``final_cost``, ``clustering``, ``apl`` and ``M``
    (attributes or mapping keys).  Rows must already satisfy ``M <= 3``.
    """
    if predictor not in ("clustering", "apl"):
        raise ValueError("predictor must be 'clustering' or 'apl'")
    rows = [_row(r) for r in dataset]
    bad = [r["M"] for r in rows if not 1 <= r["M"] <= 3]
    if bad:
        raise MOutOfRange(f"rows with M outside 1..3: {sorted(set(bad))}")
    X = kronecker_design([r[predictor] for r in rows], [r["M"] for r in rows])
    y = [r["final_cost"] for r in rows]
    label = "Clustering Coefficient" if predictor == "clustering" else "Average Path Length"
    return ols(X, y, standardize=True, names=tuple(f"{label} for M={m}" for m in (1, 2, 3)))


def _row(r) -> dict:
    if isinstance(r, dict):
        return r
    return {k: getattr(r, k) for k in ("final_cost", "clustering", "apl", "M")}


def restrict_M(dataset, max_M: int = 3) -> list:
    return [r for r in dataset if 1 <= _row(r)["M"] <= max_M]


# ---------------------------------------------------------------- alpha sweep


@dataclass(frozen=True)
class AlphaSweep:
    alphas: np.ndarray
    r_squared: np.ndarray

    @property
    def best_alpha(self) -> float:
        return float(self.alphas[int(np.argmax(self.r_squared))])


def simple_r2(x, y) -> float:
    """R-squared of ``y`` on ``x`` with intercept; 0 when either is constant."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xc, yc = x - x.mean(), y - y.mean()
    sxx, syy = float(xc @ xc), float(yc @ yc)
    scale = max(1.0, float(np.abs(x).max()) ** 2 * len(x))
    if sxx <= 1e-24 * scale or syy == 0:
        return 0.0
    return float((xc @ yc) ** 2 / (sxx * syy))


def alpha_grid(stop: float = 50.0, step: float = 0.5) -> np.ndarray:
    return np.arange(0.0, stop + step / 2, step)


def alpha_sweep(g: Graph, accumulated_payoffs, alphas=None,
                inventory: PathInventory | None = None) -> AlphaSweep:
    """R-squared of intermediaries' payoffs regressed on ``sd_alpha`` for each alpha.

    ``accumulated_payoffs`` maps (or indexes) node id to payoff.
    """
    alphas = alpha_grid() if alphas is None else np.asarray(alphas, dtype=float)
    if inventory is None:
        inventory = enumerate_paths(g)
    nodes = g.intermediaries()
    y = [accumulated_payoffs[v] for v in nodes]
    r2 = []
    for a in alphas:
        sd = sd_alpha_all(g, float(a), inventory)
        r2.append(simple_r2([sd[v] for v in nodes], y))
    return AlphaSweep(alphas, np.array(r2))


# ---------------------------------------------------------------- two samples


def welch_t(sample_a, sample_b) -> tuple[float, float]:
    """Welch's t statistic and Welch-Satterthwaite degrees of freedom."""
    a = np.asarray(sample_a, dtype=float)
    b = np.asarray(sample_b, dtype=float)
    if len(a) < 2 or len(b) < 2:
        raise DegenerateSample("each sample needs at least two values")
    va, vb = a.var(ddof=1) / len(a), b.var(ddof=1) / len(b)
    if va + vb == 0:
        raise DegenerateSample("both samples have zero variance")
    t = (a.mean() - b.mean()) / math.sqrt(va + vb)
    df = (va + vb) ** 2 / (va**2 / (len(a) - 1) + vb**2 / (len(b) - 1))
    return float(t), float(df)


def pearson(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xc, yc = x - x.mean(), y - y.mean()
    den = math.sqrt(float(xc @ xc) * float(yc @ yc))
    if den == 0:
        raise DegenerateSample("correlation undefined for a constant sample")
    return float(xc @ yc) / den


# ---------------------------------------------------------------- reports


def _stars(t: float) -> str:
    # |t| cut-offs of the normal approximation; df is large for these datasets
    at = abs(t)
    return "***" if at > 3.291 else "**" if at > 2.576 else "*" if at > 1.960 else ""


def format_regression_table(models: dict[str, RegressionResult]) -> str:
    """Side-by-side coefficient table with standard errors in parentheses."""
    titles = list(models)
    rows = []
    for title in titles:
        res = models[title]
        for i, name in enumerate(res.names):
            cells = [""] * len(titles)
            t = res.coefficients[i] / res.standard_errors[i] if res.standard_errors[i] > 0 else math.inf
            cells[titles.index(title)] = f"{res.coefficients[i]:.2f}{_stars(t)}"
            rows.append((name, cells))
            se_cells = [""] * len(titles)
            se_cells[titles.index(title)] = f"({res.standard_errors[i]:.2f})"
            rows.append(("", se_cells))
    for label, attr, fmt in (("R^2", "r_squared", "{:.2f}"), ("Adj. R^2", "adj_r_squared", "{:.2f}"),
                             ("Num. obs.", "n", "{:d}"), ("RMSE", "rmse", "{:.2f}")):
        rows.append((label, [fmt.format(getattr(models[t], attr)) for t in titles]))
    w0 = max(len(r[0]) for r in rows)
    widths = [max(len(t), *(len(r[1][j]) for r in rows)) for j, t in enumerate(titles)]
    line = "-" * (w0 + sum(w + 3 for w in widths))
    out = [" " * w0 + "".join(f" | {t:^{w}}" for t, w in zip(titles, widths)), line]
    for i, (label, cells) in enumerate(rows):
        if label == "R^2":
            out.append(line)
        out.append(f"{label:<{w0}}" + "".join(f" | {c:^{w}}" for c, w in zip(cells, widths)))
    out.append(line)
    out.append("*** |t|>3.29, ** |t|>2.58, * |t|>1.96")
    return "\n".join(out) + "\n"


def write_regression_csv(path: str | PathLike, models: dict[str, RegressionResult]) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["model", "term", "coefficient", "std_error", "r_squared", "adj_r_squared",
                    "rmse", "n"])
        for title, res in models.items():
            for name, c, se in zip(res.names, res.coefficients, res.standard_errors):
                w.writerow([title, name, repr(float(c)), repr(float(se)), repr(res.r_squared),
                            repr(res.adj_r_squared), repr(res.rmse), res.n])
