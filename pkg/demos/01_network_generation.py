"""
Growing directed scale-free interbank networks
===============================================

Walks the one-parameter family of attachment parameters, generates the
three reference topologies (credit-concentrated GC, symmetric S,
debt-concentrated GD), and compares their degree statistics with the
closed-form limit exponents.
"""

import numpy as np

from contagion import (
    augment_random_links,
    constraint_curve,
    generate,
    gini,
    limit_exponents,
    params_from_delta_in,
)

N_NODES = 1000
N_SEEDS = 5

# ---------------------------------------------------------------------
# The constraint curve: one degree of freedom trades credit concentration
# against debt concentration at (nearly) constant mean degree.
# ---------------------------------------------------------------------
print("exponent pairs along the constraint curve")
print(f"{'delta_in':>9} {'x_in':>8} {'x_out':>8} {'curve':>8}")
for delta_in in (0.5, 1.0, 2.0, 3.0, 3.5):
    pair = limit_exponents(params_from_delta_in(delta_in))
    print(
        f"{delta_in:9.2f} {pair.x_in:8.4f} {pair.x_out:8.4f} "
        f"{constraint_curve(pair.x_in):8.4f}"
    )

# ---------------------------------------------------------------------
# Reference networks: small-sample degree statistics.
# ---------------------------------------------------------------------
print(f"\ndegree statistics over {N_SEEDS} seeds at n={N_NODES}")
print(f"{'network':>8} {'<k>':>7} {'G':>7} {'G_in':>7} {'G_out':>7}")
for name, delta_in in (("GC0", 1.0), ("S0", 2.0), ("GD0", 3.0)):
    point = params_from_delta_in(delta_in)
    k, g, g_in, g_out = [], [], [], []
    for seed in range(N_SEEDS):
        graph = generate(point.with_size(N_NODES, seed))
        k.append(graph.mean_degree)
        g.append(gini(graph.in_degree + graph.out_degree))
        g_in.append(gini(graph.in_degree))
        g_out.append(gini(graph.out_degree))
    print(
        f"{name:>8} {np.mean(k):7.3f} {np.mean(g):7.3f} "
        f"{np.mean(g_in):7.3f} {np.mean(g_out):7.3f}"
    )

# GD concentrates debts (high G_out), GC concentrates credits (high G_in),
# S sits in between with symmetric partial concentrations.

# ---------------------------------------------------------------------
# Random densification: more links, less concentration.
# ---------------------------------------------------------------------
base = generate(params_from_delta_in(3.0).with_size(N_NODES, 0))
dense = augment_random_links(base, target_mean_degree=7.8, seed=1)
print("\nrandom densification of a GD0 draw")
print(f"  before: <k> = {base.mean_degree:5.2f}  "
      f"G = {gini(base.in_degree + base.out_degree):.3f}")
print(f"  after : <k> = {dense.mean_degree:5.2f}  "
      f"G = {gini(dense.in_degree + dense.out_degree):.3f}")
