"""The fixed multilinear-rank manifold: canonical form, chart, Gram blocks,
and the vanishing of the mean curvature.

Run:  python demos/03_tucker_minimality.py
"""

import json

import numpy as np

from tensorcurv import (
    canonicalize,
    gram_block_report,
    manifold_dim,
    mean_curvature,
    multilinear_rank,
    random_rank_r_tensor,
    tucker_chart,
    verify_minimality,
)

rng = np.random.default_rng(7)
shape, rank = (3, 3, 3), (2, 2, 2)

# Rotate a random rank-(2,2,2) tensor into canonical position: mode-wise
# singular vectors align its support with the leading 2x2x2 block.
t = random_rank_r_tensor(shape, rank, rng)
point = canonicalize(t)
print("detected rank:", point.rank)
print("reconstruction error:", np.max(np.abs(point.original_tensor() - t)))

# The chart around the canonical point: rotation parameters for each mode
# plus a core perturbation.  Its dimension is sum r(n-r) + prod r.
chart = tucker_chart(point)
print("\nchart parameters:", chart.param_dim, " (formula:", manifold_dim(shape, rank), ")")
zero = np.zeros(chart.param_dim)
print("chart(0) reproduces the canonical tensor:",
      np.array_equal(chart.value(zero), point.canonical_tensor()))

# Values of the chart stay on the manifold.
sample = chart.value(0.05 * rng.standard_normal(chart.param_dim))
print("rank of a nearby chart value:", multilinear_rank(sample))

# The Gram matrix at the origin is block diagonal: per mode, identical
# copies of the flattening row Gram; the core block is the identity.
report = gram_block_report(point)
print("\nGram off-structure magnitude:", report.off_structure_max)
print("core block deviation from identity:", report.s_block_max_dev)
print("row-Gram copy deviation:", report.a_block_max_dev)
print("A_1 =\n", np.round(report.flattening_row_grams[0], 6))

# The mean curvature vector at the origin vanishes: the manifold is minimal.
h = mean_curvature(chart, zero, derivatives="analytic")
print("\n|H| =", h.norm, " curvature scale =", round(h.curvature_scale, 6),
      " ratio =", h.ratio)

# A seeded campaign over many random points; every sample must come out flat.
campaign = verify_minimality((3, 2, 4), (2, 2, 2), samples=20, seed=42)
print("\ncampaign summary:")
print(json.dumps(campaign.to_json_dict()["summary"], indent=2, sort_keys=True))
