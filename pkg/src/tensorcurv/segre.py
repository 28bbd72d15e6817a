"""Geometry of the rank-one (Segre) manifold at a canonical base point.

At the base tensor e_1 x ... x e_1 the ambient space splits into orthogonal
levels N_0, ..., N_d: the standard basis tensor at a multi-index belongs to
level k when exactly k of its indices differ from the leading one.  Levels 0
and 1 span the tangent space; the higher levels assemble the normal space.

For a normal functional with lowest nonzero level k* >= 2 the module builds
rank-one probe curves through the base whose order-k* derivative pairs to
k*! times the witness coefficient (lower orders vanish), yielding points on
both sides of any hyperplane containing the tangent space: linear
functionals have no local extrema on the rank-one manifold.  A hyperplane
slice of the manifold (the independence model of d discrete random
variables, when sliced by the sum-to-one plane) does not inherit the
vanishing mean curvature, which this module samples on a grid.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .curvature import Chart, mean_curvature, normal_project, tangent_frame
from .tensors import frobenius_inner, frobenius_norm
from .tucker import CanonicalPoint, tucker_chart


class NotNormalError(ValueError):
    """Functional has a tangent component at the base point."""

    def __init__(self, tangent_norm: float, message: str | None = None):
        self.tangent_norm = tangent_norm
        super().__init__(
            message
            or f"functional is not normal at the base point: tangent component norm {tangent_norm:.3e}"
        )


class NoWitnessError(ValueError):
    """Functional vanishes on every normal level; no probe curve applies."""


class WitnessSearchError(RuntimeError):
    """Sign search exhausted the step floor without realizing the dominant term."""


class SliceTangencyError(ValueError):
    """Slice normal is orthogonal to the base point."""


class ConstantFunctionalError(ValueError):
    """Functional is proportional to the slice normal, hence constant on the slice."""


class DomainError(ValueError):
    """Parameters fall outside the open probability simplex."""


@dataclass(frozen=True)
class SegrePoint:
    """Nonzero rank-one tensor: a scale times an outer product of unit vectors."""

    factors: tuple[np.ndarray, ...]
    scale: float = 1.0

    def __post_init__(self):
        if self.scale == 0.0:
            raise ValueError("scale must be nonzero")
        for v in self.factors:
            if abs(np.linalg.norm(v) - 1.0) > 1e-12:
                raise ValueError("factors must be unit vectors")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(v) for v in self.factors)

    def tensor(self) -> np.ndarray:
        out = np.asarray(self.factors[0], dtype=float)
        for v in self.factors[1:]:
            out = np.multiply.outer(out, np.asarray(v, dtype=float))
        return self.scale * out


def canonical_segre_point(shape) -> SegrePoint:
    """The base point e_1 x ... x e_1 of the given shape."""
    factors = []
    for n in shape:
        v = np.zeros(int(n))
        v[0] = 1.0
        factors.append(v)
    return SegrePoint(factors=tuple(factors), scale=1.0)


@dataclass(frozen=True)
class NormalFrame:
    """Level decomposition of the ambient space at the canonical base point.

    levels[k] lists the multi-indices of the standard basis tensors with
    exactly k indices off the leading axis, in lexicographic order.  Levels
    are mutually orthogonal; levels 0 and 1 span the tangent space of the
    rank-one manifold at the base.
    """

    base: SegrePoint
    levels: tuple[tuple[tuple[int, ...], ...], ...]

    @property
    def shape(self) -> tuple[int, ...]:
        return self.base.shape

    @property
    def level_sizes(self) -> tuple[int, ...]:
        return tuple(len(level) for level in self.levels)

    def base_tensor(self) -> np.ndarray:
        return self.base.tensor()

    def level_component(self, t, k: int) -> np.ndarray:
        """Restriction of a tensor to the level-k basis indices."""
        t = np.asarray(t, dtype=float)
        out = np.zeros(self.shape)
        for idx in self.levels[k]:
            out[idx] = t[idx]
        return out


def normal_frame(shape) -> NormalFrame:
    shape = tuple(int(n) for n in shape)
    if any(n < 1 for n in shape):
        raise ValueError(f"shape entries must be positive, got {shape}")
    d = len(shape)
    levels = [[] for _ in range(d + 1)]
    for idx in np.ndindex(shape):
        levels[sum(1 for i in idx if i > 0)].append(idx)
    assert sum(len(lv) for lv in levels) == math.prod(shape)
    return NormalFrame(
        base=canonical_segre_point(shape),
        levels=tuple(tuple(level) for level in levels),
    )


@dataclass(frozen=True)
class FunctionalDecomposition:
    """Per-level components of a functional, with the lowest active normal level.

    kstar is the smallest level k >= 2 whose component norm exceeds the
    tolerance times the functional norm, or None when the functional has no
    normal content (the no-witness case).  The witness index maximizes the
    coefficient magnitude within level kstar.
    """

    components: tuple[np.ndarray, ...]
    level_norms: tuple[float, ...]
    kstar: int | None
    witness_index: tuple[int, ...] | None
    witness_coeff: float | None


def decompose_functional(ell, frame: NormalFrame, tol: float = 1e-10) -> FunctionalDecomposition:
    """Split a functional into level components and locate its lowest normal level.

    The functional must be normal at the base point: its components on
    levels 0 and 1 (the tangent directions) must not exceed tol * ||ell||,
    otherwise NotNormalError is raised.
    """
    ell = np.asarray(ell, dtype=float)
    if ell.shape != frame.shape:
        raise ValueError(f"functional shape {ell.shape} does not match frame shape {frame.shape}")
    norm = frobenius_norm(ell)
    components = tuple(frame.level_component(ell, k) for k in range(len(frame.levels)))
    level_norms = tuple(frobenius_norm(c) for c in components)
    tangent_norm = math.hypot(level_norms[0], level_norms[1]) if len(level_norms) > 1 else level_norms[0]
    if tangent_norm > tol * norm:
        raise NotNormalError(tangent_norm)
    kstar = None
    for k in range(2, len(level_norms)):
        if level_norms[k] > tol * norm:
            kstar = k
            break
    witness_index = None
    witness_coeff = None
    if kstar is not None:
        best = max(frame.levels[kstar], key=lambda idx: abs(ell[idx]))
        witness_index = best
        witness_coeff = float(ell[best])
    return FunctionalDecomposition(
        components=components,
        level_norms=level_norms,
        kstar=kstar,
        witness_index=witness_index,
        witness_coeff=witness_coeff,
    )


@dataclass(frozen=True)
class ProbeCurve:
    """Rank-one curve through the base point rotating selected modes.

    Each probed mode j rotates its leading axis toward the target axis with
    the given sign: the factor is cos(u) e_1 + sign sin(u) e_target, a unit
    vector for every u, so curve values stay on the rank-one manifold.
    """

    shape: tuple[int, ...]
    modes: tuple[int, ...]
    targets: tuple[int, ...]
    signs: tuple[int, ...]

    def factor(self, j: int, u: float) -> np.ndarray:
        v = np.zeros(self.shape[j])
        if j in self.modes:
            pos = self.modes.index(j)
            v[0] = math.cos(u)
            v[self.targets[pos]] = self.signs[pos] * math.sin(u)
        else:
            v[0] = 1.0
        return v

    def __call__(self, u: float) -> np.ndarray:
        out = self.factor(0, u)
        for j in range(1, len(self.shape)):
            out = np.multiply.outer(out, self.factor(j, u))
        return out


def probe_curve(frame: NormalFrame, modes, targets, signs=None) -> ProbeCurve:
    """Validated probe curve on the frame's shape.

    modes must be strictly increasing, targets point off the leading axis of
    their mode, and signs (default all +1) are +-1 per probed mode.
    """
    shape = frame.shape
    modes = tuple(int(j) for j in modes)
    targets = tuple(int(a) for a in targets)
    signs = tuple(int(s) for s in signs) if signs is not None else (1,) * len(modes)
    if len(modes) != len(targets) or len(modes) != len(signs):
        raise ValueError("modes, targets and signs must have equal lengths")
    if any(m2 <= m1 for m1, m2 in zip(modes, modes[1:])):
        raise ValueError(f"modes must be strictly increasing, got {modes}")
    for j, a in zip(modes, targets):
        if not 0 <= j < len(shape):
            raise ValueError(f"mode {j} out of range")
        if not 1 <= a < shape[j]:
            raise ValueError(f"target {a} out of range for mode {j} of size {shape[j]}")
    if any(s not in (-1, 1) for s in signs):
        raise ValueError(f"signs must be +-1, got {signs}")
    return ProbeCurve(shape=shape, modes=modes, targets=targets, signs=signs)


def _trig_derivatives_at_zero(sin_coeffs: dict[int, float], total_power: int, orders: int):
    """Derivatives at 0 of sum_a c_a cos^(p-a)(u) sin^a(u), orders 0..orders.

    Differentiation acts on the (cos power, sin power) monomials exactly:
    d[cos^m sin^a] = -m cos^(m-1) sin^(a+1) + a cos^(m+1) sin^(a-1).
    Evaluation at 0 keeps the sin-free monomials.
    """
    terms = {(total_power - a, a): c for a, c in sin_coeffs.items() if c != 0.0}
    values = []
    for _ in range(orders + 1):
        values.append(sum(c for (_, a), c in terms.items() if a == 0))
        new_terms: dict[tuple[int, int], float] = {}
        for (m, a), c in terms.items():
            if m > 0:
                key = (m - 1, a + 1)
                new_terms[key] = new_terms.get(key, 0.0) - m * c
            if a > 0:
                key = (m + 1, a - 1)
                new_terms[key] = new_terms.get(key, 0.0) + a * c
        terms = new_terms
    return values


def curve_pairings(curve: ProbeCurve, ell, up_to_order: int) -> list[float]:
    """Exact derivatives at 0 of u -> <curve(u), ell>, orders 0..up_to_order.

    The pairing is a trigonometric polynomial, so every derivative is exact.
    When ell is supported on the single basis tensor the curve targets with
    coefficient c, orders below the probe count vanish and the probe-count
    order equals (probe count)! times c times the product of the signs.
    """
    if up_to_order > 8:
        raise ValueError("pairing orders above 8 are not supported")
    ell = np.asarray(ell, dtype=float)
    if ell.shape != curve.shape:
        raise ValueError(f"functional shape {ell.shape} does not match curve shape {curve.shape}")
    p = len(curve.modes)
    sin_coeffs: dict[int, float] = {}
    for a in range(p + 1):
        total = 0.0
        for subset in itertools.combinations(range(p), a):
            idx = [0] * len(curve.shape)
            coeff = 1.0
            for pos in subset:
                idx[curve.modes[pos]] = curve.targets[pos]
                coeff *= curve.signs[pos]
            total += coeff * ell[tuple(idx)]
        sin_coeffs[a] = total
    return _trig_derivatives_at_zero(sin_coeffs, p, up_to_order)


@dataclass(frozen=True)
class WitnessPair:
    """Nearby rank-one points on strictly opposite sides of the hyperplane."""

    kstar: int
    witness_index: tuple[int, ...]
    coeff: float
    u_plus: float
    point_plus: np.ndarray
    pairing_plus: float
    u_minus: float
    point_minus: np.ndarray
    pairing_minus: float


def extremum_witness(ell, frame: NormalFrame, eps: float = 0.1, tol: float = 1e-10) -> WitnessPair:
    """Construct rank-one points near the base with <point - base, ell> of both signs.

    Decomposes the functional, probes the witness index of the lowest normal
    level with the all-plus curve and its first-sign-flipped twin, and halves
    the curve parameter from eps until the order-k* term dominates and the
    strict signs are realized.  Raises NoWitnessError when the functional has
    no normal content and WitnessSearchError when the search hits the 1e-12
    floor.
    """
    ell = np.asarray(ell, dtype=float)
    if eps <= 0:
        raise ValueError("eps must be positive")
    dec = decompose_functional(ell, frame, tol)
    if dec.kstar is None:
        raise NoWitnessError("functional has no component on any normal level")
    idx = dec.witness_index
    modes = tuple(j for j, i in enumerate(idx) if i > 0)
    targets = tuple(idx[j] for j in modes)
    gamma = probe_curve(frame, modes, targets)
    tilde = probe_curve(frame, modes, targets, signs=(-1,) + (1,) * (len(modes) - 1))
    plus_curve, minus_curve = (gamma, tilde) if dec.witness_coeff > 0 else (tilde, gamma)
    base = frame.base_tensor()

    def search(curve, positive):
        u = eps
        while u >= 1e-12:
            val = frobenius_inner(curve(u) - base, ell)
            strict = val > 0.0 if positive else val < 0.0
            if strict:
                return u, curve(u), val
            u *= 0.5
        raise WitnessSearchError(
            f"no strict {'positive' if positive else 'negative'} pairing found above the step floor"
        )

    u_plus, point_plus, val_plus = search(plus_curve, True)
    u_minus, point_minus, val_minus = search(minus_curve, False)
    return WitnessPair(
        kstar=dec.kstar,
        witness_index=idx,
        coeff=dec.witness_coeff,
        u_plus=u_plus,
        point_plus=point_plus,
        pairing_plus=val_plus,
        u_minus=u_minus,
        point_minus=point_minus,
        pairing_minus=val_minus,
    )


@dataclass(frozen=True)
class SliceReduction:
    """Functional adjusted by a multiple of the slice normal to kill <., T>.

    On the slice {<a, .> = offset} the adjusted functional differs from the
    original by the constant mu * offset only.
    """

    v: np.ndarray
    mu: float
    constant_shift: float


def slice_reduce(ell, a, offset: float, point: SegrePoint) -> SliceReduction:
    """Shift a functional along the slice normal to make it vanish on T.

    mu = -<ell, T> / <a, T>; requires <a, T> != 0 (the slice must be
    transversal to T) and ell not proportional to a (otherwise the
    functional is constant on the slice).
    """
    ell = np.asarray(ell, dtype=float)
    a = np.asarray(a, dtype=float)
    t = point.tensor()
    a_norm = frobenius_norm(a)
    ell_norm = frobenius_norm(ell)
    if a_norm == 0.0:
        raise ValueError("slice normal must be nonzero")
    a_dot_t = frobenius_inner(a, t)
    if abs(a_dot_t) <= 1e-14 * a_norm * frobenius_norm(t):
        raise SliceTangencyError("slice normal is orthogonal to the point")
    residual = ell - (frobenius_inner(ell, a) / frobenius_inner(a, a)) * a
    if frobenius_norm(residual) <= 1e-13 * ell_norm:
        raise ConstantFunctionalError("functional is proportional to the slice normal")
    mu = -frobenius_inner(ell, t) / a_dot_t
    return SliceReduction(v=ell + mu * a, mu=mu, constant_shift=mu * offset)


# --- independence model -------------------------------------------------------


def independence_model_chart(dims) -> Chart:
    """Chart of the independence model: products of probability vectors.

    Per mode the free parameters are the first n_j - 1 probabilities; the
    last is one minus their sum.  The chart value is the outer product of
    the probability vectors: a rank-one tensor with entries summing to one.
    Valid on the product of open simplices; DomainError otherwise.
    Analytic first and second derivatives are exact (the map is multilinear
    in the per-mode blocks).
    """
    dims = tuple(int(n) for n in dims)
    if any(n < 2 for n in dims):
        raise ValueError(f"independence model requires every dimension >= 2, got {dims}")
    d = len(dims)
    block_slices = []
    offset = 0
    for n in dims:
        block_slices.append(slice(offset, offset + n - 1))
        offset += n - 1
    param_dim = offset

    def prob_vectors(params):
        params = np.asarray(params, dtype=float)
        if params.shape != (param_dim,):
            raise ValueError(f"expected parameter vector of length {param_dim}, got {params.shape}")
        vectors = []
        for n, sl in zip(dims, block_slices):
            block = params[sl]
            tail = 1.0 - block.sum()
            if np.any(block <= 0.0) or tail <= 0.0:
                raise DomainError("parameters must lie in the open probability simplex")
            vectors.append(np.append(block, tail))
        return vectors

    def _outer(vectors):
        out = vectors[0]
        for v in vectors[1:]:
            out = np.multiply.outer(out, v)
        return out

    def value(params):
        return _outer(prob_vectors(params))

    def _basis_direction(n, i):
        v = np.zeros(n)
        v[i] = 1.0
        v[n - 1] = -1.0
        return v

    def first_derivs(params):
        vectors = prob_vectors(params)
        out = np.empty((param_dim,) + dims)
        row = 0
        for j, n in enumerate(dims):
            for i in range(n - 1):
                out[row] = _outer(
                    [_basis_direction(n, i) if jj == j else vectors[jj] for jj in range(d)]
                )
                row += 1
        return out

    def second_derivs(params):
        vectors = prob_vectors(params)
        out = np.zeros((param_dim, param_dim) + dims)
        positions = [
            (j, i, block_slices[j].start + i) for j in range(d) for i in range(dims[j] - 1)
        ]
        for j, i, row in positions:
            for j2, i2, col in positions:
                if j2 <= j:
                    continue
                replaced = [
                    _basis_direction(dims[jj], i)
                    if jj == j
                    else _basis_direction(dims[jj], i2)
                    if jj == j2
                    else vectors[jj]
                    for jj in range(d)
                ]
                val = _outer(replaced)
                out[row, col] = val
                out[col, row] = val
        return out

    return Chart(
        param_dim=param_dim, value=value, first_derivs=first_derivs, second_derivs=second_derivs
    )


@dataclass(frozen=True)
class FieldRow:
    params: np.ndarray
    point: np.ndarray
    h_vector: np.ndarray
    h_norm: float


@dataclass(frozen=True)
class SliceField:
    """Mean curvature of the sliced rank-one manifold sampled on a grid."""

    dims: tuple[int, ...]
    grid: int
    rows: tuple[FieldRow, ...]

    @property
    def min_norm(self) -> float:
        return min(row.h_norm for row in self.rows)

    @property
    def max_norm(self) -> float:
        return max(row.h_norm for row in self.rows)

    def write_csv(self, fh) -> None:
        m = len(self.rows[0].params)
        size = self.rows[0].point.size
        header = (
            [f"param_{i}" for i in range(m)]
            + [f"tensor_{i}" for i in range(size)]
            + [f"H_{i}" for i in range(size)]
            + ["H_norm"]
        )
        fh.write(",".join(header) + "\n")
        for row in self.rows:
            cells = (
                [repr(float(x)) for x in row.params]
                + [repr(float(x)) for x in row.point.ravel()]
                + [repr(float(x)) for x in row.h_vector.ravel()]
                + [repr(float(row.h_norm))]
            )
            fh.write(",".join(cells) + "\n")

    def save_csv(self, path) -> None:
        with open(path, "w") as fh:
            self.write_csv(fh)


def slice_curvature_field(dims, grid: int, derivatives: str = "auto") -> SliceField:
    """Sample the mean curvature of the independence model over a parameter grid.

    Each parameter of mode j runs over the interior nodes (2k-1)/(2 grid + 1),
    k = 1..grid, scaled by 1/(n_j - 1); the scaling keeps every grid point
    inside the open simplex, and the odd-over-odd nodes never hit the value
    1/2, where the curvature of a binary mode pair degenerates: for binary
    modes the chart is multilinear, so H is proportional to the off-diagonal
    Gram entries, which vanish identically on the midlines of the square.
    Rows are emitted in lexicographic order of the grid indices, so the
    output is deterministic.
    """
    dims = tuple(int(n) for n in dims)
    if grid < 2:
        raise ValueError("grid resolution must be at least 2")
    chart = independence_model_chart(dims)
    scales = []
    for n in dims:
        scales.extend([1.0 / (n - 1)] * (n - 1))
    m = chart.param_dim
    coords = [
        [((2 * k - 1) / (2 * grid + 1)) * scales[i] for k in range(1, grid + 1)]
        for i in range(m)
    ]
    rows = []
    for multi in np.ndindex((grid,) * m):
        params = np.array([coords[i][multi[i]] for i in range(m)])
        point = chart.value(params)
        curv = mean_curvature(chart, params, derivatives=derivatives)
        rows.append(
            FieldRow(
                params=params,
                point=point,
                h_vector=curv.vector,
                h_norm=curv.norm,
            )
        )
    return SliceField(dims=dims, grid=grid, rows=tuple(rows))


def sff_degeneracy_check(frame: NormalFrame, ell) -> np.ndarray:
    """Pairings of the second fundamental form with a functional at the base.

    Returns the matrix <b(x_i, x_j), ell> over the chart tangent basis of the
    rank-one manifold at the base point.  Chart second derivatives only reach
    levels 0..2, so the matrix vanishes identically for functionals supported
    on levels above 2, while level-2 functionals pair nontrivially.
    """
    ell = np.asarray(ell, dtype=float)
    if ell.shape != frame.shape:
        raise ValueError(f"functional shape {ell.shape} does not match frame shape {frame.shape}")
    shape = frame.shape
    d = len(shape)
    point = CanonicalPoint(
        shape=shape,
        rank=(1,) * d,
        core=np.ones((1,) * d),
        aligning=tuple(np.eye(n) for n in shape),
    )
    chart = tucker_chart(point)
    zero = np.zeros(chart.param_dim)
    tf = tangent_frame(chart, zero, derivatives="analytic")
    second = chart.second_derivs(zero)
    m = chart.param_dim
    pairings = np.empty((m, m))
    for i in range(m):
        for j in range(i, m):
            val = frobenius_inner(normal_project(second[i, j], tf), ell)
            pairings[i, j] = val
            pairings[j, i] = val
    return pairings
