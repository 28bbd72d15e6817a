"""Dense tensors: flattenings, multilinear rank, and orthogonal invariance.

Run:  python demos/01_tensor_basics.py
"""

import numpy as np

from tensorcurv import (
    flatten,
    frobenius_inner,
    frobenius_norm,
    group_action,
    multilinear_rank,
    random_orthogonal_tuple,
    random_rank_r_tensor,
    tensor_to_json_dict,
)

rng = np.random.default_rng(0)

# A 2x2x2 tensor with two diagonal ones has full multilinear rank: every
# mode flattening contains two orthogonal unit rows.
t = np.zeros((2, 2, 2))
t[0, 0, 0] = 1.0
t[1, 1, 1] = 1.0
print("diagonal cube rank:", multilinear_rank(t))
print("mode-0 flattening:\n", flatten(t, 0))

# Random tensors of prescribed multilinear rank: a full-rank Gaussian core,
# embedded and rotated by a random orthogonal tuple.
t = random_rank_r_tensor((3, 3, 3), (2, 1, 2), rng)
print("\nrequested rank (2, 1, 2), got:", multilinear_rank(t))

# The orthogonal action preserves the Frobenius inner product and the rank.
s = rng.standard_normal((3, 3, 3))
g = random_orthogonal_tuple((3, 3, 3), rng)
before = frobenius_inner(t, s)
after = frobenius_inner(group_action(g, t), group_action(g, s))
print("\n<T, S> before rotation:", f"{before:.12f}")
print("<gT, gS> after rotation:", f"{after:.12f}")
print("rank after rotation:", multilinear_rank(group_action(g, t)))

# Norms survive flattening: a flattening is just a reindexing.
print("\n|T| =", f"{frobenius_norm(t):.6f}", " |flatten(T, 1)| =",
      f"{np.linalg.norm(flatten(t, 1)):.6f}")

# Tensors serialize to JSON with last-index-fastest data order.
obj = tensor_to_json_dict(np.arange(4.0).reshape(2, 2))
print("\nJSON form of [[0,1],[2,3]]:", obj)
