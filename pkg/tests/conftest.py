"""Shared oracles and cached ensemble fixtures.

The oracles here are deliberately independent of the library's fast paths:
the clearing oracle is a plain Picard iteration on the dense payment map,
the Gini oracle is the O(n^2) pairwise definition, and the power-law
sampler inverts the exact CDF. Ensemble runs are cached per configuration
so the acceptance criteria share data.
"""

from __future__ import annotations

import numpy as np
import pytest
import scipy.sparse as sp
from scipy.special import zeta

from contagion.balance import (
    BalanceConfig,
    BalanceSheetSet,
    ExposureMatrix,
    build_balance_sheets,
)
from contagion.harness import ExperimentSpec, run_experiment

# Master seed for every ensemble-level statistical check.
ACCEPT_SEED = 99


# --------------------------------------------------------------- oracles


def picard_clearing(
    dense_w: np.ndarray,
    external: np.ndarray,
    obligations: np.ndarray,
    tol: float = 1e-14,
    max_iter: int = 2_000_000,
) -> np.ndarray:
    """Brute-force clearing vector: iterate the payment map from the top.

    p <- min(pbar, e + ratio @ W) starting at p = pbar, which converges
    monotonically down to the greatest fixed point.
    """
    n = obligations.size
    p = obligations.copy()
    for _ in range(max_iter):
        ratio = np.divide(
            p, obligations, out=np.ones(n), where=obligations > 0
        )
        p_new = np.minimum(obligations, external + ratio @ dense_w)
        np.maximum(p_new, 0.0, out=p_new)
        if np.abs(p_new - p).max() <= tol:
            return p_new
        p = p_new
    raise RuntimeError("picard oracle did not converge")


def pairwise_gini(values) -> float:
    """O(n^2) mean-absolute-difference Gini."""
    x = np.asarray(values, dtype=np.float64)
    n = x.size
    return float(np.abs(x[:, None] - x[None, :]).sum() / (2.0 * n * n * x.mean()))


def sample_discrete_power_law(
    exponent: float,
    size: int,
    rng: np.random.Generator,
    x_min: int = 1,
) -> np.ndarray:
    """Exact inverse-CDF sampler for p(k) = k^-exponent / zeta(exponent, x_min).

    The CDF is tabulated up to 10^5; the rare draws beyond the table are
    inverted individually by bisection on the exact zeta-ratio survival
    function, so no part of the distribution is truncated.
    """
    z0 = float(zeta(exponent, x_min))
    k_table = 100_000
    ks = np.arange(x_min, k_table + 1, dtype=np.float64)
    cdf = np.cumsum(ks ** (-exponent) / z0)
    u = rng.random(size)
    out = (np.searchsorted(cdf, u, side="left") + x_min).astype(np.int64)
    deep = u > cdf[-1]
    for idx in np.flatnonzero(deep):
        # Smallest k with CDF(k) = 1 - zeta(exponent, k+1)/z0 >= u.
        lo, hi = k_table, k_table
        while 1.0 - float(zeta(exponent, hi + 1)) / z0 < u[idx]:
            lo, hi = hi, hi * 4
        while lo < hi:
            mid = (lo + hi) // 2
            if 1.0 - float(zeta(exponent, mid + 1)) / z0 >= u[idx]:
                hi = mid
            else:
                lo = mid + 1
        out[idx] = lo
    return out


def random_small_system(
    rng: np.random.Generator, max_n: int = 5
) -> tuple[ExposureMatrix, BalanceSheetSet]:
    """A random <= max_n-bank exposure matrix with model-valid sheets."""
    while True:
        n = int(rng.integers(2, max_n + 1))
        mask = rng.random((n, n)) < 0.6
        np.fill_diagonal(mask, False)
        if mask.any():
            break
    dense = np.where(mask, 0.05 + rng.random((n, n)), 0.0)
    exposures = ExposureMatrix(sp.csr_matrix(dense))
    # Keep (1 - lambda) * xi >= 1 so nonbank liabilities stay feasible for
    # arbitrarily debt-heavy banks.
    config = BalanceConfig(
        lambda_min=float(rng.uniform(0.01, 0.2)),
        sigma=0.01,
        xi=float(rng.uniform(1.3, 3.0)),
        seed=int(rng.integers(2**31)),
    )
    sheets = build_balance_sheets(exposures, config)
    return exposures, sheets


def dense_exposures(exposures: ExposureMatrix) -> np.ndarray:
    return exposures.matrix.toarray()


# -------------------------------------------------------------- fixtures


@pytest.fixture(scope="session")
def ensembles():
    """Cached `run_experiment` results keyed by configuration."""
    cache: dict[tuple, object] = {}

    def get(
        family: str,
        variant: int = 0,
        n: int = 1000,
        reps: int = 20,
        lambda_min: float = 0.05,
    ):
        key = (family, variant, n, reps, lambda_min)
        if key not in cache:
            spec = ExperimentSpec(
                network_family=family,
                type_variant=variant,
                n_nodes=n,
                replications=reps,
                lambda_min=lambda_min,
                master_seed=ACCEPT_SEED,
            )
            cache[key] = run_experiment(spec)
        return cache[key]

    return get
