"""Mean curvature field of the independence model for two binary variables.

Joint distributions of two independent binary random variables form a
surface inside the hyperplane of tensors with entries summing to one.  The
unsliced rank-one manifold is minimal, but the slice is not: its mean
curvature field is nonzero away from the midlines p = 1/2 and q = 1/2.

Run:  python demos/05_independence_field.py
Writes:  independence_field.csv (and independence_field.png if matplotlib
is available)
"""

import numpy as np

from tensorcurv import (
    independence_model_chart,
    mean_curvature,
    slice_curvature_field,
    verify_minimality,
)

# The unsliced manifold is flat in the mean-curvature sense...
campaign = verify_minimality((2, 2), (1, 1), samples=10, seed=0)
print("unsliced rank-one manifold: max |H| ratio =", campaign.max_ratio)

# ...but the sum-to-one slice is not.
field = slice_curvature_field((2, 2), 9)
print("sliced model on a 9x9 grid:  min |H| =", round(field.min_norm, 6),
      " max |H| =", round(field.max_norm, 6))
field.save_csv("independence_field.csv")
print("field written to independence_field.csv")

# The field degenerates exactly on the midlines: the chart is bilinear, so
# the diagonal second derivatives vanish and H is carried by the Gram
# off-diagonal (2p-1)(2q-1).
chart = independence_model_chart((2, 2))
for u in [(0.5, 0.3), (0.3, 0.5), (0.3, 0.3)]:
    h = mean_curvature(chart, np.array(u))
    print(f"|H| at {u}: {h.norm:.6f}")

# Optional rendering: |H| over the parameter square with the zero midlines.
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("matplotlib not available; skipping the plot")
else:
    dense = 41
    values = np.linspace(0.02, 0.98, dense)
    norms = np.zeros((dense, dense))
    for i, p in enumerate(values):
        for j, q in enumerate(values):
            norms[i, j] = mean_curvature(chart, np.array([p, q])).norm
    fig, ax = plt.subplots(figsize=(5, 4))
    image = ax.pcolormesh(values, values, norms.T, shading="auto", cmap="viridis")
    ax.axvline(0.5, color="white", linestyle=":", linewidth=1)
    ax.axhline(0.5, color="white", linestyle=":", linewidth=1)
    ax.set_xlabel("p = P(X1 = 1)")
    ax.set_ylabel("q = P(X2 = 1)")
    ax.set_title("|H| on the binary independence model")
    fig.colorbar(image, ax=ax)
    fig.tight_layout()
    fig.savefig("independence_field.png", dpi=150)
    print("plot written to independence_field.png")
