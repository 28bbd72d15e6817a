"""Orthogonal-group chart of the manifold of fixed multilinear-rank tensors.

A tensor of multilinear rank (r_1, ..., r_d) can be rotated, one orthogonal
factor per mode, so that its support lies in the leading r_1 x ... x r_d
block ("canonical position", computed here by mode-wise SVD).  Around a
canonical point the manifold is parametrized by

    T(u^1, ..., u^d, S) = (core + S)  x_1 g(u^1)[:, :r_1] ... x_d g(u^d)[:, :r_d],

where each g(u^j) is an ordered product of plane rotations mixing the leading
r_j directions of mode j with the trailing ones, and S perturbs the core.
The parameter count is sum_j r_j (n_j - r_j) + prod_j r_j, the dimension of
the manifold.

The module exposes exact derivative backends for this chart (products of
rotations differentiate by the Leibniz rule; at the origin the formulas
collapse to simple placements of core slices), the block structure of the
Gram matrix at the origin, and a randomized campaign checking that the mean
curvature vector vanishes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curvature import Chart, mean_curvature
from .tensors import (
    DEFAULT_RANK_TOL,
    as_tensor,
    check_rank_admissible,
    embed_block,
    flatten,
    frobenius_norm,
    group_action,
    mode_product,
    random_rank_r_tensor,
    transpose_tuple,
)


class AmbiguousRankError(RuntimeError):
    """Singular-value profile does not cleanly determine the multilinear rank."""


def skew_generator(n: int, a: int, b: int) -> np.ndarray:
    """Generator of rotations in the (a, b) coordinate plane: E_ba - E_ab, a < b."""
    if not 0 <= a < b < n:
        raise ValueError(f"generator indices must satisfy 0 <= a < b < {n}, got ({a}, {b})")
    mat = np.zeros((n, n))
    mat[b, a] = 1.0
    mat[a, b] = -1.0
    return mat


def rotation_exp(n: int, a: int, b: int, angle: float) -> np.ndarray:
    """Closed-form matrix exponential of angle * skew_generator(n, a, b).

    A plane rotation: cos(angle) on the (a, a) and (b, b) entries,
    sin(angle) at (b, a), -sin(angle) at (a, b), identity elsewhere.
    """
    if not 0 <= a < b < n:
        raise ValueError(f"rotation indices must satisfy 0 <= a < b < {n}, got ({a}, {b})")
    g = np.eye(n)
    c, s = math.cos(angle), math.sin(angle)
    g[a, a] = c
    g[b, b] = c
    g[b, a] = s
    g[a, b] = -s
    return g


def rotation_pairs(n: int, r: int) -> list[tuple[int, int]]:
    """Canonical ordering of the (lam, mu) rotation planes for one mode.

    lam runs over the leading block, mu over the trailing one; lam varies
    fastest.  This ordering fixes the parameter layout and the Gram block
    layout once and for all.
    """
    return [(lam, mu) for mu in range(r, n) for lam in range(r)]


def grassmann_factor(n: int, r: int, u_block) -> np.ndarray:
    """Ordered product of plane rotations for one mode.

    The factor for the first pair in rotation_pairs(n, r) is leftmost.
    Orthogonal for every u_block; the identity at u_block = 0.
    """
    u_block = np.asarray(u_block, dtype=float)
    pairs = rotation_pairs(n, r)
    if u_block.shape != (len(pairs),):
        raise ValueError(f"u block must have length {len(pairs)}, got {u_block.shape}")
    g = np.eye(n)
    for (lam, mu), angle in zip(pairs, u_block):
        g = g @ rotation_exp(n, lam, mu, angle)
    return g


def grassmann_factor_derivs(n: int, r: int, u_block):
    """Factor g(u) of one mode with its exact first and second derivatives.

    Returns (g, dg, d2g) with dg of shape (K, n, n) and d2g of shape
    (K, K, n, n), K = r (n - r).  Differentiating the ordered product by the
    Leibniz rule inserts the plane generator into the corresponding slot; at
    u = 0 this reduces to dg_k = L_k and d2g_kl = L_k L_l for k <= l.
    """
    u_block = np.asarray(u_block, dtype=float)
    pairs = rotation_pairs(n, r)
    nparams = len(pairs)
    if u_block.shape != (nparams,):
        raise ValueError(f"u block must have length {nparams}, got {u_block.shape}")
    gens = [skew_generator(n, lam, mu) for lam, mu in pairs]
    rots = [rotation_exp(n, lam, mu, angle) for (lam, mu), angle in zip(pairs, u_block)]

    # pre[k] = R_0 ... R_{k-1}, suf[k] = R_k ... R_{K-1}.
    pre = [np.eye(n)]
    for rot in rots:
        pre.append(pre[-1] @ rot)
    suf = [np.eye(n)] * (nparams + 1)
    for k in range(nparams - 1, -1, -1):
        suf[k] = rots[k] @ suf[k + 1]

    g = pre[nparams]
    dg = np.empty((nparams, n, n))
    for k in range(nparams):
        dg[k] = pre[k] @ gens[k] @ rots[k] @ suf[k + 1]
    d2g = np.empty((nparams, nparams, n, n))
    for k in range(nparams):
        d2g[k, k] = pre[k] @ gens[k] @ gens[k] @ rots[k] @ suf[k + 1]
        for l in range(k + 1, nparams):
            mid = pre[k + 1].T @ pre[l]  # R_{k+1} ... R_{l-1}
            mixed = pre[k] @ gens[k] @ rots[k] @ mid @ gens[l] @ rots[l] @ suf[l + 1]
            d2g[k, l] = mixed
            d2g[l, k] = mixed
    return g, dg, d2g


# --- canonical position -------------------------------------------------------


@dataclass(frozen=True)
class CanonicalPoint:
    """A tensor in canonical position: core block plus the aligning rotations.

    `aligning` maps the original tensor to canonical position; the canonical
    tensor is the core zero-padded to the full shape.
    """

    shape: tuple[int, ...]
    rank: tuple[int, ...]
    core: np.ndarray
    aligning: tuple[np.ndarray, ...]

    def canonical_tensor(self) -> np.ndarray:
        return embed_block(self.core, self.shape)

    def original_tensor(self) -> np.ndarray:
        return group_action(transpose_tuple(self.aligning), self.canonical_tensor())


def canonicalize(t, tol: float | None = None, rank=None) -> CanonicalPoint:
    """Rotate a nonzero tensor into canonical position by mode-wise SVD.

    For each mode the left singular vectors of the flattening (sign-fixed so
    that each vector's largest-magnitude entry is positive) are transposed
    into the aligning factor.  The rank is detected from the singular values
    unless given explicitly.  If the rotated tensor has mass outside the core
    block above ``tol * ||T||`` the rank decision was ambiguous and
    AmbiguousRankError is raised.
    """
    t = as_tensor(t)
    norm = frobenius_norm(t)
    if norm == 0.0:
        raise ValueError("cannot canonicalize the zero tensor")
    aligning = []
    detected = []
    rel_tols = []
    for j in range(t.ndim):
        mat = flatten(t, j)
        u, sv, _ = np.linalg.svd(mat, full_matrices=True)
        for col in range(u.shape[1]):
            lead = np.argmax(np.abs(u[:, col]))
            if u[lead, col] < 0.0:
                u[:, col] = -u[:, col]
        aligning.append(u.T)
        rel = DEFAULT_RANK_TOL * max(mat.shape) if tol is None else tol
        rel_tols.append(rel)
        detected.append(int(np.sum(sv > rel * sv[0])))
    rank = tuple(detected) if rank is None else tuple(int(r) for r in rank)
    check_rank_admissible(t.shape, rank)
    rotated = group_action(aligning, t)
    core = rotated[tuple(slice(0, r) for r in rank)].copy()
    residual = rotated.copy()
    residual[tuple(slice(0, r) for r in rank)] = 0.0
    max_off = float(np.max(np.abs(residual))) if residual.size else 0.0
    if max_off > max(rel_tols) * norm:
        raise AmbiguousRankError(
            f"mass {max_off:.3e} outside the rank-{rank} block of a tensor with "
            f"norm {norm:.3e}; rank detection is ambiguous"
        )
    return CanonicalPoint(shape=t.shape, rank=rank, core=core, aligning=tuple(aligning))


# --- chart parameter layout ---------------------------------------------------


@dataclass(frozen=True)
class ChartLayout:
    """Bookkeeping for the chart parameter vector.

    Parameters are laid out as the per-mode rotation blocks in mode order
    (pairs ordered by rotation_pairs) followed by the core perturbation in
    C order.
    """

    shape: tuple[int, ...]
    rank: tuple[int, ...]
    mode_pairs: tuple[tuple[tuple[int, int], ...], ...]
    mode_slices: tuple[slice, ...]
    core_slice: slice
    dim: int

    def split(self, params: np.ndarray):
        """Parameter vector -> (list of per-mode u blocks, core perturbation)."""
        params = np.asarray(params, dtype=float)
        if params.shape != (self.dim,):
            raise ValueError(f"expected parameter vector of length {self.dim}, got {params.shape}")
        u_blocks = [params[sl] for sl in self.mode_slices]
        s = params[self.core_slice].reshape(self.rank)
        return u_blocks, s


def manifold_dim(shape, rank) -> int:
    """Dimension of the fixed multilinear-rank manifold: sum r_j(n_j - r_j) + prod r_j."""
    return sum(r * (n - r) for n, r in zip(shape, rank)) + math.prod(rank)


def chart_layout(shape, rank) -> ChartLayout:
    shape = tuple(int(n) for n in shape)
    rank = tuple(int(r) for r in rank)
    check_rank_admissible(shape, rank)
    if any(r == 0 for r in rank):
        raise ValueError("the chart requires a positive rank tuple")
    mode_pairs = []
    mode_slices = []
    offset = 0
    for n, r in zip(shape, rank):
        pairs = tuple(rotation_pairs(n, r))
        mode_pairs.append(pairs)
        mode_slices.append(slice(offset, offset + len(pairs)))
        offset += len(pairs)
    core_slice = slice(offset, offset + math.prod(rank))
    return ChartLayout(
        shape=shape,
        rank=rank,
        mode_pairs=tuple(mode_pairs),
        mode_slices=tuple(mode_slices),
        core_slice=core_slice,
        dim=core_slice.stop,
    )


# --- derivative formulas at the origin ----------------------------------------
#
# At u = 0, S = 0 the chart derivatives are placements of core slices:
#
#   dT/ds_i          = basic tensor at the multi-index i,
#   dT/du^j_(lam,mu) = core slice at mode-j index lam, placed at index mu,
#
# and the only nonzero second derivatives are
#
#   d2T/ds_i du^j_(lam,mu)              = [i_j == lam] basic tensor at i with i_j -> mu,
#   d2T/du^j_(lam,mu) du^j_(lam',mu)    = - core slice at lam' placed at lam
#                                          (ordered so lam <= lam'; stays in the core block),
#   d2T/du^j_(lam,mu) du^j'_(lam',mu')  = double slice placed at (mu, mu'), j != j'.
#
# Same-mode pairs with different trailing index mu vanish, as do all s-s pairs.


def _placed_slice(core, shape, mode: int, lam: int, mu: int) -> np.ndarray:
    out = np.zeros(shape)
    idx = [slice(0, r) for r in core.shape]
    idx[mode] = mu
    out[tuple(idx)] = np.take(core, lam, axis=mode)
    return out


def _placed_double_slice(core, shape, mode_a, lam_a, mu_a, mode_b, lam_b, mu_b) -> np.ndarray:
    out = np.zeros(shape)
    idx = [slice(0, r) for r in core.shape]
    idx[mode_a] = mu_a
    idx[mode_b] = mu_b
    sliced = np.take(np.take(core, lam_b, axis=mode_b), lam_a, axis=mode_a)
    out[tuple(idx)] = sliced
    return out


def chart_first_derivs_origin(point: CanonicalPoint) -> np.ndarray:
    """Closed-form first derivatives of the chart at the origin."""
    layout = chart_layout(point.shape, point.rank)
    out = np.zeros((layout.dim,) + point.shape)
    for j, (pairs, sl) in enumerate(zip(layout.mode_pairs, layout.mode_slices)):
        for k, (lam, mu) in enumerate(pairs):
            out[sl.start + k] = _placed_slice(point.core, point.shape, j, lam, mu)
    for k, idx in enumerate(np.ndindex(point.rank)):
        out[layout.core_slice.start + k][idx] = 1.0
    return out


def chart_second_derivs_origin(point: CanonicalPoint) -> np.ndarray:
    """Closed-form second derivatives of the chart at the origin."""
    layout = chart_layout(point.shape, point.rank)
    d = len(point.shape)
    out = np.zeros((layout.dim, layout.dim) + point.shape)

    core_block = tuple(slice(0, r) for r in point.rank)
    for j in range(d):
        pairs = layout.mode_pairs[j]
        base = layout.mode_slices[j].start
        for k, (lam, mu) in enumerate(pairs):
            # same mode, same trailing index: minus a core slice, ordered lam <= lam'
            for l in range(k, len(pairs)):
                lam2, mu2 = pairs[l]
                if mu2 != mu:
                    continue
                val = np.zeros(point.shape)
                idx = list(core_block)
                idx[j] = lam
                val[tuple(idx)] = -np.take(point.core, lam2, axis=j)
                out[base + k, base + l] = val
                out[base + l, base + k] = val
            # cross-mode pairs
            for j2 in range(j + 1, d):
                base2 = layout.mode_slices[j2].start
                for l, (lam2, mu2) in enumerate(layout.mode_pairs[j2]):
                    val = _placed_double_slice(
                        point.core, point.shape, j, lam, mu, j2, lam2, mu2
                    )
                    out[base + k, base2 + l] = val
                    out[base2 + l, base + k] = val
            # core perturbation coupling
            for si, idx in enumerate(np.ndindex(point.rank)):
                if idx[j] != lam:
                    continue
                val = np.zeros(point.shape)
                shifted = list(idx)
                shifted[j] = mu
                val[tuple(shifted)] = 1.0
                out[base + k, layout.core_slice.start + si] = val
                out[layout.core_slice.start + si, base + k] = val
    return out


# --- the chart ------------------------------------------------------------------


def tucker_chart(point: CanonicalPoint) -> Chart:
    """Chart of the fixed multilinear-rank manifold around a canonical point.

    The value at the origin is the canonical tensor, reproduced exactly.
    First and second derivative backends are analytic at every parameter
    value (exact rotations differentiated by the Leibniz rule).
    """
    layout = chart_layout(point.shape, point.rank)
    shape, rank = layout.shape, layout.rank
    d = len(shape)
    core = point.core

    def value(params):
        u_blocks, s = layout.split(params)
        out = core + s
        for j in range(d):
            g = grassmann_factor(shape[j], rank[j], u_blocks[j])
            out = mode_product(out, g[:, : rank[j]], j)
        return out

    def _mode_factors(u_blocks):
        factors = []
        for j in range(d):
            g, dg, d2g = grassmann_factor_derivs(shape[j], rank[j], u_blocks[j])
            factors.append((g[:, : rank[j]], dg[:, :, : rank[j]], d2g[:, :, :, : rank[j]]))
        return factors

    def _product(center, cols, replace=None):
        out = center
        for j in range(d):
            mat = cols[j]
            if replace is not None and j in replace:
                mat = replace[j]
            out = mode_product(out, mat, j)
        return out

    def first_derivs(params):
        u_blocks, s = layout.split(params)
        factors = _mode_factors(u_blocks)
        cols = [f[0] for f in factors]
        center = core + s
        out = np.empty((layout.dim,) + shape)
        for j in range(d):
            sl = layout.mode_slices[j]
            for k in range(len(layout.mode_pairs[j])):
                out[sl.start + k] = _product(center, cols, {j: factors[j][1][k]})
        for si, idx in enumerate(np.ndindex(rank)):
            vec = cols[0][:, idx[0]]
            for j in range(1, d):
                vec = np.multiply.outer(vec, cols[j][:, idx[j]])
            out[layout.core_slice.start + si] = vec
        return out

    def second_derivs(params):
        u_blocks, s = layout.split(params)
        factors = _mode_factors(u_blocks)
        cols = [f[0] for f in factors]
        center = core + s
        out = np.zeros((layout.dim, layout.dim) + shape)
        for j in range(d):
            base = layout.mode_slices[j].start
            npairs = len(layout.mode_pairs[j])
            for k in range(npairs):
                for l in range(k, npairs):
                    val = _product(center, cols, {j: factors[j][2][k, l]})
                    out[base + k, base + l] = val
                    out[base + l, base + k] = val
                for j2 in range(j + 1, d):
                    base2 = layout.mode_slices[j2].start
                    for l in range(len(layout.mode_pairs[j2])):
                        val = _product(
                            center, cols, {j: factors[j][1][k], j2: factors[j2][1][l]}
                        )
                        out[base + k, base2 + l] = val
                        out[base2 + l, base + k] = val
                for si, idx in enumerate(np.ndindex(rank)):
                    vec = None
                    for j2 in range(d):
                        col = factors[j][1][k][:, idx[j]] if j2 == j else cols[j2][:, idx[j2]]
                        vec = col if vec is None else np.multiply.outer(vec, col)
                    out[base + k, layout.core_slice.start + si] = vec
                    out[layout.core_slice.start + si, base + k] = vec
        return out

    return Chart(
        param_dim=layout.dim,
        value=value,
        first_derivs=first_derivs,
        second_derivs=second_derivs,
    )


# --- Gram block structure ---------------------------------------------------------


@dataclass(frozen=True)
class GramBlockReport:
    """Gram matrix of the chart frame at the origin and its structure check.

    The Gram matrix is block diagonal: one block per mode, itself made of
    identical r x r copies (one per trailing index) of the row Gram A_j of
    the mode-j flattening, plus an identity block for the core perturbation.
    """

    gram: np.ndarray
    flattening_row_grams: tuple[np.ndarray, ...]
    off_structure_max: float
    s_block_max_dev: float
    a_block_max_dev: float
    min_eig: float

    @property
    def dim(self) -> int:
        return self.gram.shape[0]


def gram_block_report(point: CanonicalPoint) -> GramBlockReport:
    layout = chart_layout(point.shape, point.rank)
    basis = chart_first_derivs_origin(point).reshape(layout.dim, -1)
    gram = basis @ basis.T

    canonical = point.canonical_tensor()
    row_grams = []
    for j, r in enumerate(point.rank):
        rows = flatten(canonical, j)[:r]
        row_grams.append(rows @ rows.T)

    structure = np.zeros_like(gram, dtype=bool)
    a_dev = 0.0
    for j, (n, r) in enumerate(zip(point.shape, point.rank)):
        start = layout.mode_slices[j].start
        for g in range(n - r):
            blk = slice(start + g * r, start + (g + 1) * r)
            structure[blk, blk] = True
            a_dev = max(a_dev, float(np.max(np.abs(gram[blk, blk] - row_grams[j]))))
    core_idx = np.arange(layout.core_slice.start, layout.core_slice.stop)
    structure[core_idx, core_idx] = True

    s_block = gram[layout.core_slice, layout.core_slice]
    s_dev = float(np.max(np.abs(s_block - np.eye(s_block.shape[0]))))
    off = float(np.max(np.abs(gram[~structure]))) if (~structure).any() else 0.0
    min_eig = float(np.linalg.eigvalsh(gram)[0])
    return GramBlockReport(
        gram=gram,
        flattening_row_grams=tuple(row_grams),
        off_structure_max=off,
        s_block_max_dev=s_dev,
        a_block_max_dev=a_dev,
        min_eig=min_eig,
    )


# --- randomized minimality verification -------------------------------------------


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Per-sample RNG stream: sample `index` is reproducible on its own."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


@dataclass(frozen=True)
class MinimalityReport:
    """Outcome of a randomized vanishing-mean-curvature campaign."""

    shape: tuple[int, ...]
    rank: tuple[int, ...]
    requested_samples: int
    seed: int
    tol: float
    rows: tuple[dict, ...]
    rank_failures: int

    @property
    def max_ratio(self) -> float:
        return max((row["curvature_ratio"] for row in self.rows), default=0.0)

    @property
    def passed(self) -> bool:
        return bool(self.rows) and all(row["curvature_ratio"] <= self.tol for row in self.rows)

    def to_json_dict(self) -> dict:
        return {
            "shape": list(self.shape),
            "rank": list(self.rank),
            "seed": self.seed,
            "tol": self.tol,
            "samples": [dict(row) for row in self.rows],
            "summary": {
                "pass": self.passed,
                "max_ratio": self.max_ratio,
                "samples": len(self.rows),
                "rank_failures": self.rank_failures,
            },
        }


def verify_minimality(shape, rank, samples: int = 20, seed: int = 0, tol: float = 1e-8):
    """Check that the mean curvature of the fixed-rank manifold vanishes.

    Draws `samples` random tensors of the requested multilinear rank,
    canonicalizes each, and evaluates the mean curvature of the chart at the
    origin with analytic derivatives.  A sample passes when the dimensionless
    ratio ||H|| / max ||d2 r|| is at most `tol`.  Rank-detection failures are
    counted and reported rather than fatal.
    """
    shape = tuple(int(n) for n in shape)
    rank = tuple(int(r) for r in rank)
    check_rank_admissible(shape, rank)
    if any(r == 0 for r in rank):
        raise ValueError("minimality verification requires a positive rank tuple")
    if samples < 1:
        raise ValueError("need at least one sample")
    rows = []
    failures = 0
    for k in range(samples):
        rng = sample_rng(seed, k)
        t = random_rank_r_tensor(shape, rank, rng)
        try:
            point = canonicalize(t)
        except AmbiguousRankError:
            failures += 1
            continue
        if point.rank != rank:
            failures += 1
            continue
        chart = tucker_chart(point)
        curv = mean_curvature(chart, np.zeros(chart.param_dim), derivatives="analytic")
        report = gram_block_report(point)
        rows.append(
            {
                "sample": k,
                "shape": list(shape),
                "rank": list(rank),
                "gram_min_eig": report.min_eig,
                "curvature_ratio": curv.ratio,
                "off_structure_max": report.off_structure_max,
            }
        )
    return MinimalityReport(
        shape=shape,
        rank=rank,
        requested_samples=samples,
        seed=seed,
        tol=tol,
        rows=tuple(rows),
        rank_failures=failures,
    )
