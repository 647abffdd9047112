"""Experiment orchestration: ensembles, sweeps and artifact persistence.

An experiment fixes a network family (credit-concentrated GC, symmetric S,
or debt-concentrated GD), a connectivity/concentration variant (0..4), a
size, balance-sheet parameters and a master seed, then for each replication
generates a network, builds balance sheets, shocks every bank in turn and
summarizes the outcomes. Replications are independent; their RNG streams
are derived from the master seed by spawn keys, so results are identical
whatever the worker count.

Variant parameter rows:

    0: the reference mix (beta = 0.25, offsets summing to 4)
    1: denser and more concentrated (beta = 0.75, same offsets)
    2: denser at type-0-like concentration (beta = 0.75, offsets x 25)
    3: type-0 growth, then uniform random links up to mean degree 7.8
    4: type-0 density, less concentrated (beta = 0.25, offsets x 10)
"""

from __future__ import annotations

import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .balance import (
    BalanceConfig,
    BalanceSheetSet,
    build_balance_sheets,
    build_exposures,
    export_balances_csv,
)
from .clearing import (
    CascadeResult,
    ShockScenario,
    cascade_metrics,
    clear,
    total_initial_assets,
)
from .metrics import (
    IndexImpactCorrelation,
    NetworkRiskSummary,
    RankingStatistics,
    _safe_corr,
    compute_topo_indices,
    index_impact_correlation,
    ranking_statistics,
    summarize,
)
from .netgen import DirectedGraph, GenParams, augment_random_links, generate, write_edge_list

__all__ = [
    "FAMILIES",
    "TYPE_PARAMS",
    "TYPE3_TARGET_MEAN_DEGREE",
    "ExperimentSpec",
    "ReplicationRecord",
    "ExperimentReport",
    "SweepRow",
    "SweepResult",
    "run_experiment",
    "size_sweep",
    "capital_sweep",
    "write_run_directory",
    "replication_seeds",
    "resolve_workers",
]

FAMILIES = ("GC", "S", "GD")

# Attachment parameters per (family, variant): alpha, beta, gamma,
# delta_in, delta_out. Variant 3 grows with the variant-0 row and is then
# densified by random links.
TYPE_PARAMS: dict[tuple[str, int], tuple[float, float, float, float, float]] = {
    ("GC", 0): (0.5625, 0.25, 0.1875, 1.0, 3.0),
    ("S", 0): (0.3750, 0.25, 0.3750, 2.0, 2.0),
    ("GD", 0): (0.1875, 0.25, 0.5625, 3.0, 1.0),
    ("GC", 1): (0.1875, 0.75, 0.0625, 1.0, 3.0),
    ("S", 1): (0.1250, 0.75, 0.1250, 2.0, 2.0),
    ("GD", 1): (0.0625, 0.75, 0.1875, 3.0, 1.0),
    ("GC", 2): (0.1875, 0.75, 0.0625, 25.0, 75.0),
    ("S", 2): (0.1250, 0.75, 0.1250, 50.0, 50.0),
    ("GD", 2): (0.0625, 0.75, 0.1875, 75.0, 25.0),
    ("GC", 3): (0.5625, 0.25, 0.1875, 1.0, 3.0),
    ("S", 3): (0.3750, 0.25, 0.3750, 2.0, 2.0),
    ("GD", 3): (0.1875, 0.25, 0.5625, 3.0, 1.0),
    ("GC", 4): (0.5625, 0.25, 0.1875, 10.0, 30.0),
    ("S", 4): (0.3750, 0.25, 0.3750, 20.0, 20.0),
    ("GD", 4): (0.1875, 0.25, 0.5625, 30.0, 10.0),
}

# Variant-3 densification target: the empirical mean degree of the
# variant-1 ensembles.
TYPE3_TARGET_MEAN_DEGREE = 7.8

# Sizes below this are simulated but flagged as statistically meaningless.
MIN_MEANINGFUL_SIZE = 100


@dataclass(frozen=True)
class ExperimentSpec:
    """One ensemble: family, variant, size, sheet parameters, master seed."""

    network_family: str
    type_variant: int
    n_nodes: int
    replications: int
    lambda_min: float = 0.05
    sigma: float = 0.01
    xi: float = 2.0
    master_seed: int = 0

    def __post_init__(self) -> None:
        if self.network_family not in FAMILIES:
            raise ValueError(
                f"network_family must be one of {FAMILIES}, "
                f"got {self.network_family!r}"
            )
        if (self.network_family, self.type_variant) not in TYPE_PARAMS:
            raise ValueError(f"type_variant must be 0..4, got {self.type_variant}")
        if self.n_nodes < 2:
            raise ValueError("n_nodes must be >= 2")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        BalanceConfig(self.lambda_min, self.sigma, self.xi, 0)  # validates

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentSpec":
        """Load a spec from a JSON file whose keys match the field names."""
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        return cls(**payload)

    def to_dict(self) -> dict:
        return asdict(self)


def replication_seeds(master_seed: int, rep: int) -> tuple[int, int, int]:
    """Derive (generation, augmentation, balance) seeds for one replication.

    Stream splitting rule: seeds are the three 64-bit words produced by
    ``numpy.random.SeedSequence(master_seed, spawn_key=(rep,))``, so any
    scheduling of replications yields the same streams.
    """
    ss = np.random.SeedSequence(master_seed, spawn_key=(rep,))
    words = ss.generate_state(3, dtype=np.uint64)
    return int(words[0]), int(words[1]), int(words[2])


@dataclass(frozen=True, eq=False)
class ReplicationRecord:
    """Everything persisted or aggregated from one replication."""

    rep: int
    graph_seed: int
    summary: NetworkRiskSummary
    correlations: IndexImpactCorrelation
    graph: DirectedGraph
    sheets: BalanceSheetSet
    cs: np.ndarray
    frailty: np.ndarray
    di: np.ndarray
    dc: np.ndarray


@dataclass(frozen=True, eq=False)
class ExperimentReport:
    """Ensemble outcome: per-replication records plus aggregates."""

    spec: ExperimentSpec
    records: list[ReplicationRecord]
    means: dict[str, float]
    stds: dict[str, float]
    ranking_di: Optional[RankingStatistics]
    ranking_dc: Optional[RankingStatistics]
    correlation_means: dict[str, Optional[float]]
    correlation_pooled: dict[str, Optional[float]]
    elapsed_seconds: float
    workers: int
    warnings: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def scalar_rows(self) -> list[dict[str, float]]:
        """One scalar row per replication, in replication order."""
        return [_scalar_row(rec) for rec in self.records]


_SCALAR_KEYS = (
    "di_aggregate",
    "dc_aggregate",
    "mean_degree",
    "gini_total",
    "gini_in",
    "gini_out",
    "gini_assets",
    "di_max",
    "dc_max",
)


def _scalar_row(rec: ReplicationRecord) -> dict[str, float]:
    s = rec.summary
    return {
        "rep": rec.rep,
        "di_aggregate": s.di_aggregate,
        "dc_aggregate": s.dc_aggregate,
        "mean_degree": s.mean_degree,
        "gini_total": s.gini_total,
        "gini_in": s.gini_in,
        "gini_out": s.gini_out,
        "gini_assets": s.gini_assets,
        "di_max": s.di_max,
        "dc_max": s.dc_max,
    }


def resolve_workers(explicit: Optional[int] = None) -> int:
    """Worker count: explicit argument, else CONTAGION_WORKERS, else CPUs."""
    if explicit is not None:
        if explicit < 1:
            raise ValueError("worker count must be >= 1")
        return explicit
    env = os.environ.get("CONTAGION_WORKERS")
    if env:
        value = int(env)
        if value < 1:
            raise ValueError(f"CONTAGION_WORKERS must be >= 1, got {env}")
        return value
    return os.cpu_count() or 1


def _run_replication(spec: ExperimentSpec, rep: int) -> ReplicationRecord:
    """Generate, build, shock every bank, and summarize one replication."""
    g_seed, aug_seed, b_seed = replication_seeds(spec.master_seed, rep)
    a, b, g, d_in, d_out = TYPE_PARAMS[(spec.network_family, spec.type_variant)]
    graph = generate(GenParams(a, b, g, d_in, d_out, spec.n_nodes, g_seed))
    if spec.type_variant == 3:
        target = min(TYPE3_TARGET_MEAN_DEGREE, 2.0 * (spec.n_nodes - 1))
        if target > graph.mean_degree:
            graph = augment_random_links(graph, target, aug_seed)
    exposures = build_exposures(graph)
    sheets = build_balance_sheets(
        exposures,
        BalanceConfig(spec.lambda_min, spec.sigma, spec.xi, seed=b_seed),
    )
    a0 = total_initial_assets(sheets)
    results: list[CascadeResult] = []
    for bank in range(graph.n):
        solution = clear(exposures, sheets, ShockScenario(bank))
        results.append(cascade_metrics(solution, sheets, bank, a0))
    summary = summarize(results, graph, sheets)
    indices = compute_topo_indices(exposures, sheets)
    if graph.n >= 3:
        correlations = index_impact_correlation(indices, results)
    else:
        correlations = IndexImpactCorrelation(None, None, None, None)
    di = np.array([r.di for r in sorted(results, key=lambda r: r.shocked_bank)])
    dc = np.array([r.dc for r in sorted(results, key=lambda r: r.shocked_bank)])
    return ReplicationRecord(
        rep=rep,
        graph_seed=g_seed,
        summary=summary,
        correlations=correlations,
        graph=graph,
        sheets=sheets,
        cs=indices.cs,
        frailty=indices.frailty,
        di=di,
        dc=dc,
    )


def _run_replication_args(args: tuple[ExperimentSpec, int]) -> ReplicationRecord:
    return _run_replication(*args)


def _mean_or_none(values: list[Optional[float]]) -> Optional[float]:
    defined = [v for v in values if v is not None]
    return float(np.mean(defined)) if defined else None


def run_experiment(
    spec: ExperimentSpec, workers: Optional[int] = None
) -> ExperimentReport:
    """Run every replication of an experiment and aggregate the outcomes.

    Replications are dispatched to a process pool when more than one worker
    is available; the merge is keyed by replication index, so outputs are
    byte-identical across worker counts and fully determined by
    ``spec.master_seed``.
    """
    start = time.perf_counter()
    n_workers = resolve_workers(workers)
    tasks = [(spec, rep) for rep in range(spec.replications)]
    if n_workers > 1 and spec.replications > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            records = list(pool.map(_run_replication_args, tasks))
    else:
        records = []
        for task in tasks:
            records.append(_run_replication_args(task))
            print(
                f"[contagion] {spec.network_family}{spec.type_variant} "
                f"n={spec.n_nodes} rep {task[1] + 1}/{spec.replications} done",
                file=sys.stderr,
            )
    records.sort(key=lambda r: r.rep)

    means: dict[str, float] = {}
    stds: dict[str, float] = {}
    rows = [_scalar_row(rec) for rec in records]
    for key in _SCALAR_KEYS:
        values = np.array([row[key] for row in rows])
        means[key] = float(values.mean())
        stds[key] = float(values.std(ddof=1)) if len(values) > 1 else float("nan")

    summaries = [r.summary for r in records]
    rank_di = ranking_statistics(summaries, "di") if len(records) > 1 else None
    rank_dc = ranking_statistics(summaries, "dc") if len(records) > 1 else None

    corr_names = ("pearson_cs_di", "pearson_f_dc", "spearman_cs_di", "spearman_f_dc")
    corr_means = {
        name: _mean_or_none([getattr(r.correlations, name) for r in records])
        for name in corr_names
    }
    pooled_cs = np.concatenate([r.cs for r in records])
    pooled_f = np.concatenate([r.frailty for r in records])
    pooled_di = np.concatenate([r.di for r in records])
    pooled_dc = np.concatenate([r.dc for r in records])
    corr_pooled = {
        "pearson_cs_di": _safe_corr(pooled_cs, pooled_di, "pearson"),
        "pearson_f_dc": _safe_corr(pooled_f, pooled_dc, "pearson"),
        "spearman_cs_di": _safe_corr(pooled_cs, pooled_di, "spearman"),
        "spearman_f_dc": _safe_corr(pooled_f, pooled_dc, "spearman"),
    }

    warnings = []
    if spec.n_nodes < MIN_MEANINGFUL_SIZE:
        warnings.append(
            f"n_nodes={spec.n_nodes} below minimum meaningful size "
            f"{MIN_MEANINGFUL_SIZE}; statistics are anecdotal"
        )
    if spec.replications == 1:
        warnings.append("single replication: std and ranking cv unavailable")
    notes = []
    if spec.type_variant == 3:
        notes.append(
            "variant 3: grown with the variant-0 parameter row, then "
            f"densified by uniform random links to mean degree "
            f"{TYPE3_TARGET_MEAN_DEGREE}"
        )

    return ExperimentReport(
        spec=spec,
        records=records,
        means=means,
        stds=stds,
        ranking_di=rank_di,
        ranking_dc=rank_dc,
        correlation_means=corr_means,
        correlation_pooled=corr_pooled,
        elapsed_seconds=time.perf_counter() - start,
        workers=n_workers,
        warnings=warnings,
        notes=notes,
    )


@dataclass(frozen=True)
class SweepRow:
    """One sweep point: the varied value plus headline aggregates."""

    value: float
    di_mean: float
    di_std: float
    dc_mean: float
    dc_std: float
    di_max_mean: float
    dc_max_mean: float
    flag: str = ""


@dataclass(frozen=True, eq=False)
class SweepResult:
    """Sweep table plus the underlying full reports, keyed by value."""

    parameter: str
    rows: list[SweepRow]
    reports: dict[float, ExperimentReport]
    monotone_di: Optional[bool] = None
    monotone_dc: Optional[bool] = None
    relative_drop_di: Optional[float] = None
    relative_drop_dc: Optional[float] = None


def _sweep_row(value: float, report: ExperimentReport, flag: str = "") -> SweepRow:
    return SweepRow(
        value=value,
        di_mean=report.means["di_aggregate"],
        di_std=report.stds["di_aggregate"],
        dc_mean=report.means["dc_aggregate"],
        dc_std=report.stds["dc_aggregate"],
        di_max_mean=report.means["di_max"],
        dc_max_mean=report.means["dc_max"],
        flag=flag,
    )


def size_sweep(
    spec: ExperimentSpec,
    sizes: Sequence[int],
    workers: Optional[int] = None,
    replications_by_size: Optional[dict[int, int]] = None,
) -> SweepResult:
    """Run the experiment at several network sizes.

    Reports aggregates plus the mean first-ranking-position impacts
    (``di_max_mean``/``dc_max_mean``), the quantities that shrink as
    networks grow. ``replications_by_size`` optionally overrides the
    replication count per size (large sizes are expensive).
    """
    rows: list[SweepRow] = []
    reports: dict[float, ExperimentReport] = {}
    for n in sizes:
        reps = (replications_by_size or {}).get(n, spec.replications)
        sub = ExperimentSpec(
            network_family=spec.network_family,
            type_variant=spec.type_variant,
            n_nodes=n,
            replications=reps,
            lambda_min=spec.lambda_min,
            sigma=spec.sigma,
            xi=spec.xi,
            master_seed=spec.master_seed,
        )
        report = run_experiment(sub, workers=workers)
        flag = "below_min_meaningful_size" if n < MIN_MEANINGFUL_SIZE else ""
        rows.append(_sweep_row(float(n), report, flag))
        reports[float(n)] = report
    return SweepResult(parameter="n_nodes", rows=rows, reports=reports)


def capital_sweep(
    spec: ExperimentSpec,
    lambdas: Sequence[float],
    workers: Optional[int] = None,
) -> SweepResult:
    """Run the experiment at several capital floors.

    Lambdas are evaluated in the given order; monotonicity flags compare
    consecutive points sorted ascending and the relative drops compare the
    lowest against the highest floor. Network topologies are identical
    across floors (the master seed fixes them), isolating the capital
    effect.
    """
    rows: list[SweepRow] = []
    reports: dict[float, ExperimentReport] = {}
    for lam in lambdas:
        sub = ExperimentSpec(
            network_family=spec.network_family,
            type_variant=spec.type_variant,
            n_nodes=spec.n_nodes,
            replications=spec.replications,
            lambda_min=lam,
            sigma=spec.sigma,
            xi=spec.xi,
            master_seed=spec.master_seed,
        )
        report = run_experiment(sub, workers=workers)
        rows.append(_sweep_row(lam, report, ""))
        reports[float(lam)] = report

    monotone_di = monotone_dc = None
    drop_di = drop_dc = None
    if len(rows) > 1:
        ordered = sorted(rows, key=lambda r: r.value)
        di = [r.di_mean for r in ordered]
        dc = [r.dc_mean for r in ordered]
        monotone_di = all(a > b for a, b in zip(di, di[1:]))
        monotone_dc = all(a > b for a, b in zip(dc, dc[1:]))
        drop_di = (di[0] - di[-1]) / di[0] if di[0] > 0 else None
        drop_dc = (dc[0] - dc[-1]) / dc[0] if dc[0] > 0 else None
    return SweepResult(
        parameter="lambda_min",
        rows=rows,
        reports=reports,
        monotone_di=monotone_di,
        monotone_dc=monotone_dc,
        relative_drop_di=drop_di,
        relative_drop_dc=drop_dc,
    )


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def write_run_directory(report: ExperimentReport, outdir: str | Path) -> Path:
    """Persist an experiment's artifacts into a run directory.

    Writes ``summary.csv`` (one scalar row per replication),
    ``ranking_di.csv``/``ranking_dc.csv`` (position, mean, std, cv),
    per-replication ``edges_<rep>.csv`` and ``balances_<rep>.csv``, and
    ``report.json``. All CSV content is a pure function of the spec.
    """
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)

    with open(out / "summary.csv", "w", encoding="ascii") as fh:
        fh.write("rep," + ",".join(_SCALAR_KEYS) + "\n")
        for row in report.scalar_rows():
            fh.write(
                f"{int(row['rep'])},"
                + ",".join(_fmt(row[k]) for k in _SCALAR_KEYS)
                + "\n"
            )

    for name, stats in (("ranking_di", report.ranking_di), ("ranking_dc", report.ranking_dc)):
        path = out / f"{name}.csv"
        with open(path, "w", encoding="ascii") as fh:
            fh.write("position,mean,std,cv\n")
            if stats is not None:
                for pos in range(stats.mean.size):
                    fh.write(
                        f"{pos + 1},{_fmt(stats.mean[pos])},"
                        f"{_fmt(stats.std[pos])},{_fmt(stats.cv[pos])}\n"
                    )

    for rec in report.records:
        write_edge_list(rec.graph, out / f"edges_{rec.rep}.csv", rec.graph_seed)
        export_balances_csv(rec.sheets, out / f"balances_{rec.rep}.csv")

    payload = {
        "spec": report.spec.to_dict(),
        "replications": report.scalar_rows(),
        "means": report.means,
        "stds": report.stds,
        "correlation_means": report.correlation_means,
        "correlation_pooled": report.correlation_pooled,
        "runtime": {
            "elapsed_seconds": report.elapsed_seconds,
            "workers": report.workers,
        },
        "warnings": report.warnings,
        "notes": report.notes,
    }
    with open(out / "report.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return out
