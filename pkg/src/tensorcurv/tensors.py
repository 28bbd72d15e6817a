"""Dense tensor arithmetic: Frobenius products, flattenings, multilinear rank,
and the action of tuples of orthogonal matrices.

Tensors are plain ``numpy`` arrays of floats.  Axis (mode) indices are 0-based
throughout.  The flat serialization order is C order, i.e. the last index
varies fastest.
"""

from __future__ import annotations

import json
import math

import numpy as np

# Relative singular-value cutoff for rank decisions, scaled by the largest
# dimension of the flattening being examined.
DEFAULT_RANK_TOL = 1e-10


def as_tensor(data) -> np.ndarray:
    """Coerce input to a float array of order >= 1 with finite entries."""
    t = np.asarray(data, dtype=float)
    if t.ndim == 0:
        raise ValueError("tensor must have at least one mode")
    if not np.all(np.isfinite(t)):
        raise ValueError("tensor entries must be finite")
    return t


def frobenius_inner(t, s) -> float:
    """Frobenius inner product: sum of entrywise products of two same-shape tensors."""
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    if t.shape != s.shape:
        raise ValueError(f"shape mismatch: {t.shape} vs {s.shape}")
    return float(np.dot(t.ravel(), s.ravel()))


def frobenius_norm(t) -> float:
    return float(np.linalg.norm(np.asarray(t, dtype=float).ravel()))


def flatten(t, mode: int) -> np.ndarray:
    """Mode-`mode` flattening of `t`.

    Rows are indexed by the chosen mode; columns run over the remaining
    modes in increasing order with the last one varying fastest.
    """
    t = np.asarray(t, dtype=float)
    if not 0 <= mode < t.ndim:
        raise ValueError(f"mode {mode} out of range for order-{t.ndim} tensor")
    return np.moveaxis(t, mode, 0).reshape(t.shape[mode], -1)


def singular_values_per_mode(t) -> list[np.ndarray]:
    """Singular values of every mode flattening, one descending array per mode."""
    t = np.asarray(t, dtype=float)
    return [np.linalg.svd(flatten(t, j), compute_uv=False) for j in range(t.ndim)]


def multilinear_rank(t, tol: float | None = None) -> tuple[int, ...]:
    """Multilinear rank of `t`: the tuple of ranks of its mode flattenings.

    A singular value counts toward the rank when it exceeds ``tol * sigma_max``
    of its flattening.  When `tol` is None it defaults to ``DEFAULT_RANK_TOL``
    times the larger dimension of the flattening.  The zero tensor has rank
    ``(0, ..., 0)``.
    """
    t = np.asarray(t, dtype=float)
    ranks = []
    for j in range(t.ndim):
        mat = flatten(t, j)
        sv = np.linalg.svd(mat, compute_uv=False)
        smax = sv[0] if sv.size else 0.0
        rel = DEFAULT_RANK_TOL * max(mat.shape) if tol is None else tol
        ranks.append(int(np.sum(sv > rel * smax)) if smax > 0.0 else 0)
    return tuple(ranks)


def mode_product(t, mat, mode: int) -> np.ndarray:
    """Contract `mat` (out_dim x in_dim) against axis `mode` of `t`."""
    t = np.asarray(t, dtype=float)
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[1] != t.shape[mode]:
        raise ValueError(
            f"factor of shape {mat.shape} does not match mode-{mode} size {t.shape[mode]}"
        )
    return np.moveaxis(np.tensordot(mat, t, axes=(1, mode)), 0, mode)


def group_action(factors, t) -> np.ndarray:
    """Apply one square factor per mode: entries become the full multilinear
    contraction of `t` against the factor tuple.

    Orthogonal factors preserve the Frobenius inner product and the
    multilinear rank.
    """
    t = np.asarray(t, dtype=float)
    if len(factors) != t.ndim:
        raise ValueError(f"expected {t.ndim} factors, got {len(factors)}")
    out = t
    for j, g in enumerate(factors):
        g = np.asarray(g, dtype=float)
        if g.shape != (t.shape[j], t.shape[j]):
            raise ValueError(
                f"factor {j} has shape {g.shape}, expected {(t.shape[j], t.shape[j])}"
            )
        out = mode_product(out, g, j)
    return out


def is_orthogonal(mat, tol: float = 1e-12) -> bool:
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        return False
    return bool(np.max(np.abs(mat @ mat.T - np.eye(mat.shape[0]))) <= tol)


def random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random orthogonal matrix via QR with sign-fixed R diagonal."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def random_orthogonal_tuple(shape, rng: np.random.Generator) -> list[np.ndarray]:
    return [random_orthogonal(n, rng) for n in shape]


def transpose_tuple(factors) -> list[np.ndarray]:
    return [np.asarray(g, dtype=float).T for g in factors]


def check_rank_admissible(shape, rank) -> None:
    """Validate a multilinear rank tuple against a shape.

    Requirements: matching length, ``0 <= r_j <= n_j``, all entries zero as
    soon as one is, and each ``r_j`` at most the product of the others
    (the rank of a flattening is bounded by its column count).
    """
    shape = tuple(int(n) for n in shape)
    rank = tuple(int(r) for r in rank)
    if len(shape) != len(rank):
        raise ValueError(f"rank {rank} has wrong length for shape {shape}")
    if any(n < 1 for n in shape):
        raise ValueError(f"shape entries must be positive, got {shape}")
    if any(r < 0 for r in rank):
        raise ValueError(f"rank entries must be nonnegative, got {rank}")
    if any(r == 0 for r in rank):
        if any(r != 0 for r in rank):
            raise ValueError(f"a zero entry in {rank} forces the zero rank tuple")
        return
    for j, r in enumerate(rank):
        if r > shape[j]:
            raise ValueError(f"rank {rank} exceeds shape {shape} in mode {j}")
        others = math.prod(rank) // r
        if r > others:
            raise ValueError(
                f"rank {rank} is not admissible: entry {r} in mode {j} exceeds "
                f"the product {others} of the remaining entries"
            )


def embed_block(core, shape) -> np.ndarray:
    """Zero-pad `core` into the leading block of a tensor of the given shape."""
    core = np.asarray(core, dtype=float)
    out = np.zeros(tuple(shape))
    out[tuple(slice(0, r) for r in core.shape)] = core
    return out


def random_rank_r_tensor(shape, rank, rng: np.random.Generator) -> np.ndarray:
    """Random tensor with multilinear rank exactly `rank`.

    Draws a Gaussian core of shape `rank` (redrawn until it has full
    multilinear rank, an almost-sure event), embeds it, and applies a random
    orthogonal tuple.  The rank of the result is verified before returning.
    """
    shape = tuple(int(n) for n in shape)
    rank = tuple(int(r) for r in rank)
    check_rank_admissible(shape, rank)
    if any(r == 0 for r in rank):
        return np.zeros(shape)
    for _ in range(20):
        core = rng.standard_normal(rank)
        if multilinear_rank(core) != rank:
            continue
        t = group_action(random_orthogonal_tuple(shape, rng), embed_block(core, shape))
        if multilinear_rank(t) == rank:
            return t
    raise RuntimeError(f"failed to construct a rank-{rank} tensor of shape {shape}")


# --- JSON serialization -----------------------------------------------------
#
# On-disk format: {"shape": [n1, ..., nd], "data": [...]} with the flat data
# in C order (last index fastest).


def tensor_to_json_dict(t) -> dict:
    t = as_tensor(t)
    return {"shape": list(t.shape), "data": [float(x) for x in t.ravel()]}


def tensor_from_json_dict(obj) -> np.ndarray:
    if not isinstance(obj, dict) or "shape" not in obj or "data" not in obj:
        raise ValueError('tensor JSON must be an object with "shape" and "data"')
    shape = obj["shape"]
    if not shape or any(not isinstance(n, int) or n < 1 for n in shape):
        raise ValueError(f"invalid tensor shape {shape!r}")
    data = np.asarray(obj["data"], dtype=float)
    if data.ndim != 1 or data.size != math.prod(shape):
        raise ValueError(
            f"data length {data.size} does not match shape {tuple(shape)} "
            f"(expected {math.prod(shape)})"
        )
    if not np.all(np.isfinite(data)):
        raise ValueError("tensor entries must be finite")
    return data.reshape(tuple(shape))


def save_tensor(path, t) -> None:
    with open(path, "w") as fh:
        json.dump(tensor_to_json_dict(t), fh)
        fh.write("\n")


def load_tensor(path) -> np.ndarray:
    with open(path) as fh:
        return tensor_from_json_dict(json.load(fh))
