"""Aggregate and topological systemic-risk measures.

Covers concentration (Gini coefficients of degree and asset distributions),
network-level aggregates and rankings of per-bank impact measures, two
local vulnerability indices read off the exposure matrix (counterparty
susceptibility and local network frailty), ranking-curve statistics across
replications, and correlations between the local indices and realized
impacts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from .balance import BalanceSheetSet, ExposureMatrix
from .clearing import CascadeResult
from .netgen import DirectedGraph

__all__ = [
    "NetworkRiskSummary",
    "TopoIndices",
    "RankingStatistics",
    "IndexImpactCorrelation",
    "gini",
    "counterparty_susceptibility",
    "local_network_frailty",
    "compute_topo_indices",
    "summarize",
    "ranking_statistics",
    "index_impact_correlation",
]


def gini(values: Sequence[float]) -> float:
    """Gini coefficient of a non-negative distribution, in [0, 1].

    Uses the sorted-cumulative formula
    ``G = 2 * sum(i * x_(i)) / (n * sum(x)) - (n + 1) / n``, which agrees
    with the pairwise mean-absolute-difference definition
    ``sum_ij |x_i - x_j| / (2 n^2 mean)``.

    Requires at least two values, none negative, not all zero.
    """
    x = np.asarray(values, dtype=np.float64)
    if x.size < 2:
        raise ValueError("Gini needs at least 2 values")
    if (x < 0.0).any():
        raise ValueError("Gini requires non-negative values")
    total = x.sum()
    if total == 0.0:
        raise ValueError("Gini undefined for an all-zero distribution")
    x = np.sort(x)
    n = x.size
    ranks = np.arange(1, n + 1, dtype=np.float64)
    return float(2.0 * np.dot(ranks, x) / (n * total) - (n + 1.0) / n)


@dataclass(frozen=True, eq=False)
class TopoIndices:
    """Per-bank local vulnerability indices.

    ``cs[i]`` is the maximal exposure to bank i among its creditors,
    relative to the creditor's buffer; ``frailty[i]`` additionally weights
    that exposure by the creditor's interbank liabilities, capturing
    second-round vulnerability. Both are 0 for banks with no creditors.
    """

    cs: np.ndarray
    frailty: np.ndarray


def _creditor_ratios(
    exposures: ExposureMatrix,
    sheets: BalanceSheetSet,
    normalization: str,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-link (debtor, creditor, weight/buffer) arrays."""
    if normalization not in ("equity", "exposure"):
        raise ValueError(
            f"normalization must be 'equity' or 'exposure', got {normalization!r}"
        )
    coo = exposures.matrix.tocoo()
    denom_vec = sheets.e if normalization == "equity" else sheets.ba
    denom = denom_vec[coo.col]
    with np.errstate(divide="ignore"):
        ratio = np.where(denom > 0.0, coo.data / np.where(denom > 0, denom, 1.0), np.inf)
    return coo.row, coo.col, ratio


def counterparty_susceptibility(
    exposures: ExposureMatrix,
    sheets: BalanceSheetSet,
    normalization: str = "equity",
) -> np.ndarray:
    """Maximal relative exposure of each bank's creditors to that bank.

    For bank i this is ``max_j w_ij / E_j`` over creditors j, with ``E_j``
    the creditor's equity (``normalization="equity"``, the default) or its
    total interbank exposures (``normalization="exposure"``). Banks with no
    creditors score 0.
    """
    row, _, ratio = _creditor_ratios(exposures, sheets, normalization)
    cs = np.zeros(exposures.n)
    np.maximum.at(cs, row, ratio)
    return cs


def local_network_frailty(
    exposures: ExposureMatrix,
    sheets: BalanceSheetSet,
    normalization: str = "equity",
) -> np.ndarray:
    """Creditor vulnerability weighted by the creditor's interbank debt.

    For bank i this is ``max_j (w_ij / E_j) * BL_j`` over creditors j; the
    ``BL_j`` factor proxies how hard creditor j's own failure would hit its
    lenders. Banks with no creditors score 0.
    """
    row, col, ratio = _creditor_ratios(exposures, sheets, normalization)
    f = np.zeros(exposures.n)
    np.maximum.at(f, row, ratio * sheets.bl[col])
    return f


def compute_topo_indices(
    exposures: ExposureMatrix,
    sheets: BalanceSheetSet,
    normalization: str = "equity",
) -> TopoIndices:
    """Both local indices in one pass configuration."""
    return TopoIndices(
        cs=counterparty_susceptibility(exposures, sheets, normalization),
        frailty=local_network_frailty(exposures, sheets, normalization),
    )


@dataclass(frozen=True, eq=False)
class NetworkRiskSummary:
    """Network-level aggregates for one simulated system.

    ``ranking_di``/``ranking_dc`` are bank ids sorted by descending impact
    (ties broken by ascending id); ``di_curve``/``dc_curve`` are the impact
    values in that order. Aggregates are plain sums over banks.
    """

    n: int
    di_aggregate: float
    dc_aggregate: float
    ranking_di: np.ndarray
    ranking_dc: np.ndarray
    di_curve: np.ndarray
    dc_curve: np.ndarray
    mean_degree: float
    gini_total: float
    gini_in: float
    gini_out: float
    gini_assets: float

    @property
    def di_max(self) -> float:
        return float(self.di_curve[0])

    @property
    def dc_max(self) -> float:
        return float(self.dc_curve[0])


def _descending_ranking(values: np.ndarray) -> np.ndarray:
    """Bank ids by descending value, ties broken by ascending id."""
    ids = np.arange(values.size)
    return np.lexsort((ids, -values))


def summarize(
    results: Sequence[CascadeResult],
    graph: DirectedGraph,
    sheets: BalanceSheetSet,
) -> NetworkRiskSummary:
    """Aggregate per-bank cascade results into one network summary.

    Expects exactly one result per bank. Builds impact rankings and curves,
    sums the aggregates, and attaches the topology-side concentration
    measures (mean degree; Gini of total/in/out degree and of total
    assets).
    """
    n = graph.n
    if n < 2:
        raise ValueError("summaries need at least 2 banks")
    if len(results) != n:
        raise ValueError(f"expected {n} results, got {len(results)}")
    di = np.full(n, np.nan)
    dc = np.full(n, np.nan)
    for r in results:
        if not 0 <= r.shocked_bank < n:
            raise ValueError(f"result for unknown bank {r.shocked_bank}")
        if not np.isnan(di[r.shocked_bank]):
            raise ValueError(f"duplicate result for bank {r.shocked_bank}")
        di[r.shocked_bank] = r.di
        dc[r.shocked_bank] = r.dc
    if np.isnan(di).any():
        missing = np.flatnonzero(np.isnan(di))
        raise ValueError(f"missing results for banks {missing.tolist()}")

    rank_di = _descending_ranking(di)
    rank_dc = _descending_ranking(dc)
    return NetworkRiskSummary(
        n=n,
        di_aggregate=float(di.sum()),
        dc_aggregate=float(dc.sum()),
        ranking_di=rank_di,
        ranking_dc=rank_dc,
        di_curve=di[rank_di],
        dc_curve=dc[rank_dc],
        mean_degree=graph.mean_degree,
        gini_total=gini(graph.in_degree + graph.out_degree),
        gini_in=gini(graph.in_degree),
        gini_out=gini(graph.out_degree),
        gini_assets=gini(sheets.total_assets),
    )


@dataclass(frozen=True, eq=False)
class RankingStatistics:
    """Position-wise statistics of ranking curves across replications."""

    mean: np.ndarray
    std: np.ndarray
    cv: np.ndarray


def ranking_statistics(
    ensemble: Sequence[NetworkRiskSummary], metric: str = "di"
) -> RankingStatistics:
    """Mean, sample std and coefficient of variation per ranking position.

    The position-wise means define the ensemble ranking curve; ``cv`` is
    ``std / mean`` with positions of zero spread reported as 0.

    Args:
        ensemble: at least two replications of the same network size.
        metric: ``"di"`` or ``"dc"``.
    """
    if len(ensemble) < 2:
        raise ValueError("ranking statistics need at least 2 replications")
    if metric not in ("di", "dc"):
        raise ValueError(f"metric must be 'di' or 'dc', got {metric!r}")
    curves = np.vstack(
        [s.di_curve if metric == "di" else s.dc_curve for s in ensemble]
    )
    mean = curves.mean(axis=0)
    std = curves.std(axis=0, ddof=1)
    cv = np.divide(std, mean, out=np.zeros_like(std), where=std > 0.0)
    return RankingStatistics(mean=mean, std=std, cv=cv)


@dataclass(frozen=True)
class IndexImpactCorrelation:
    """Correlations between local indices and realized impacts.

    ``None`` marks an undefined correlation (an input with zero variance),
    deliberately distinct from a measured 0.
    """

    pearson_cs_di: Optional[float]
    pearson_f_dc: Optional[float]
    spearman_cs_di: Optional[float]
    spearman_f_dc: Optional[float]


def _safe_corr(x: np.ndarray, y: np.ndarray, method: str) -> Optional[float]:
    if np.std(x) == 0.0 or np.std(y) == 0.0:
        return None
    if method == "pearson":
        return float(stats.pearsonr(x, y).statistic)
    return float(stats.spearmanr(x, y).statistic)


def index_impact_correlation(
    indices: TopoIndices, results: Sequence[CascadeResult]
) -> IndexImpactCorrelation:
    """Correlate susceptibility with DI and frailty with DC, per bank.

    Results must cover every bank exactly once (any order); vectors are
    aligned by bank id. Needs at least 3 banks.
    """
    n = indices.cs.size
    if n < 3:
        raise ValueError("correlations need at least 3 banks")
    if len(results) != n:
        raise ValueError(f"expected {n} results, got {len(results)}")
    di = np.full(n, np.nan)
    dc = np.full(n, np.nan)
    for r in results:
        di[r.shocked_bank] = r.di
        dc[r.shocked_bank] = r.dc
    if np.isnan(di).any():
        raise ValueError("results must cover every bank")
    return IndexImpactCorrelation(
        pearson_cs_di=_safe_corr(indices.cs, di, "pearson"),
        pearson_f_dc=_safe_corr(indices.frailty, dc, "pearson"),
        spearman_cs_di=_safe_corr(indices.cs, di, "spearman"),
        spearman_f_dc=_safe_corr(indices.frailty, dc, "spearman"),
    )
