"""Extrinsic geometry of parametrized submanifolds of a Euclidean space.

A submanifold is described by a :class:`Chart`: a map from an open set of
parameter space into the ambient space, optionally carrying analytic first
and second derivative backends.  From a chart the engine produces tangent
frames, Gram matrices, normal projections, the second fundamental form, and
the mean curvature vector

    H = sum_ij (G^-1)_ij (d^2 r / du_i du_j)^perp,

which vanishes identically exactly when the submanifold is minimal.

Ambient vectors are numpy arrays of any fixed shape; inner products are
Frobenius (entrywise) products.  All functions are pure; charts must be pure
as well.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.linalg import cho_factor, cho_solve

_EPS = float(np.finfo(float).eps)

# A chart is degenerate at u when min eig(G) <= this factor times trace(G)/m.
DEGENERACY_FACTOR = 1e-12


class DegenerateChartError(RuntimeError):
    """First derivatives of the chart are (numerically) linearly dependent."""


@dataclass(frozen=True)
class Chart:
    """Local parametrization of a submanifold.

    value maps a parameter vector of length `param_dim` to an ambient array.
    When provided, `first_derivs(u)` must return an array of shape
    ``(param_dim, *ambient)`` and `second_derivs(u)` a symmetric array of
    shape ``(param_dim, param_dim, *ambient)``; otherwise central finite
    differences are used.
    """

    param_dim: int
    value: Callable[[np.ndarray], np.ndarray]
    first_derivs: Optional[Callable[[np.ndarray], np.ndarray]] = None
    second_derivs: Optional[Callable[[np.ndarray], np.ndarray]] = None


@dataclass
class TangentFrame:
    """Basis of first-derivative vectors together with its Gram matrix."""

    basis: np.ndarray  # (m, *ambient)
    gram: np.ndarray  # (m, m) symmetric positive definite
    _cho: tuple = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def gram_solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve G c = rhs using a cached Cholesky factorization."""
        if self._cho is None:
            self._cho = cho_factor(self.gram)
        return cho_solve(self._cho, rhs)


@dataclass(frozen=True)
class MeanCurvature:
    """Mean curvature vector with its norm and the curvature scale.

    `curvature_scale` is the largest norm among the chart's second
    derivative vectors; `ratio` is the dimensionless quantity used to decide
    whether H vanishes relative to how curved the chart is.
    """

    vector: np.ndarray
    norm: float
    curvature_scale: float

    @property
    def ratio(self) -> float:
        return self.norm / self.curvature_scale if self.curvature_scale > 0.0 else 0.0


def _fd_steps(u: np.ndarray, h, exponent: float) -> np.ndarray:
    if h is not None:
        if h <= 0:
            raise ValueError("finite-difference step must be positive")
        return np.full(u.shape, float(h))
    return _EPS**exponent * np.maximum(1.0, np.abs(u))


def fd_first_derivs(chart: Chart, u, h: float | None = None) -> np.ndarray:
    """Central finite-difference first derivatives, O(h^2) accurate.

    Default per-coordinate step eps^(1/3) * max(1, |u_i|).
    """
    u = np.asarray(u, dtype=float)
    steps = _fd_steps(u, h, 1.0 / 3.0)
    rows = []
    for i in range(chart.param_dim):
        e = np.zeros_like(u)
        e[i] = steps[i]
        rows.append((chart.value(u + e) - chart.value(u - e)) / (2.0 * steps[i]))
    return np.stack(rows)


def fd_second_derivs(chart: Chart, u, h: float | None = None) -> np.ndarray:
    """Central finite-difference second derivatives, O(h^2) accurate.

    Default per-coordinate step eps^(1/4) * max(1, |u_i|).
    """
    u = np.asarray(u, dtype=float)
    steps = _fd_steps(u, h, 1.0 / 4.0)
    m = chart.param_dim
    f0 = chart.value(u)
    out = np.empty((m, m) + f0.shape)
    for i in range(m):
        ei = np.zeros_like(u)
        ei[i] = steps[i]
        out[i, i] = (chart.value(u + ei) - 2.0 * f0 + chart.value(u - ei)) / steps[i] ** 2
        for j in range(i + 1, m):
            ej = np.zeros_like(u)
            ej[j] = steps[j]
            mixed = (
                chart.value(u + ei + ej)
                - chart.value(u + ei - ej)
                - chart.value(u - ei + ej)
                + chart.value(u - ei - ej)
            ) / (4.0 * steps[i] * steps[j])
            out[i, j] = mixed
            out[j, i] = mixed
    return out


def finite_difference_derivatives(chart: Chart, u, h: float | None = None):
    """Finite-difference (first, second) derivative arrays of a chart at u.

    Serves as the independent oracle for analytic derivative backends.
    """
    return fd_first_derivs(chart, u, h), fd_second_derivs(chart, u, h)


def _resolve_first(chart: Chart, u, derivatives: str) -> np.ndarray:
    if derivatives not in ("auto", "analytic", "fd"):
        raise ValueError(f"unknown derivative mode {derivatives!r}")
    if derivatives == "fd" or (derivatives == "auto" and chart.first_derivs is None):
        return fd_first_derivs(chart, u)
    if chart.first_derivs is None:
        raise ValueError("chart has no analytic first derivatives")
    return np.asarray(chart.first_derivs(np.asarray(u, dtype=float)), dtype=float)


def _resolve_second(chart: Chart, u, derivatives: str) -> np.ndarray:
    if derivatives not in ("auto", "analytic", "fd"):
        raise ValueError(f"unknown derivative mode {derivatives!r}")
    if derivatives == "fd" or (derivatives == "auto" and chart.second_derivs is None):
        return fd_second_derivs(chart, u)
    if chart.second_derivs is None:
        raise ValueError("chart has no analytic second derivatives")
    return np.asarray(chart.second_derivs(np.asarray(u, dtype=float)), dtype=float)


def tangent_frame(chart: Chart, u, derivatives: str = "auto") -> TangentFrame:
    """First-derivative basis and Gram matrix of a chart at u.

    Raises DegenerateChartError when the Gram matrix is numerically
    singular (minimum eigenvalue below DEGENERACY_FACTOR * trace / m).
    """
    basis = _resolve_first(chart, u, derivatives)
    flat = basis.reshape(basis.shape[0], -1)
    gram = flat @ flat.T
    gram = 0.5 * (gram + gram.T)
    m = gram.shape[0]
    eigs = np.linalg.eigvalsh(gram)
    if eigs[0] <= DEGENERACY_FACTOR * np.trace(gram) / m:
        raise DegenerateChartError(
            f"chart is degenerate at this point: min Gram eigenvalue {eigs[0]:.3e} "
            f"vs trace/m {np.trace(gram) / m:.3e}"
        )
    return TangentFrame(basis=basis, gram=gram)


def normal_project(v, frame: TangentFrame) -> np.ndarray:
    """Component of an ambient vector orthogonal to the frame's tangent space.

    Solves G c = <v, basis_i> and subtracts sum_i c_i basis_i; the Gram
    system is used instead of orthonormalizing because the ambient dimension
    may far exceed the frame dimension.
    """
    v = np.asarray(v, dtype=float)
    flat_basis = frame.basis.reshape(frame.dim, -1)
    rhs = flat_basis @ v.ravel()
    coeffs = frame.gram_solve(rhs)
    return v - np.tensordot(coeffs, frame.basis, axes=(0, 0))


def tangent_coordinates(v, frame: TangentFrame) -> np.ndarray:
    """Coordinates of the tangential part of v in the frame basis."""
    v = np.asarray(v, dtype=float)
    flat_basis = frame.basis.reshape(frame.dim, -1)
    return frame.gram_solve(flat_basis @ v.ravel())


def second_fundamental_form(chart: Chart, u, x, y, derivatives: str = "auto") -> np.ndarray:
    """Second fundamental form b(x, y) at chart point u.

    x and y are tangent coordinate vectors with respect to the frame basis;
    the result is the normal component of sum_ij x_i y_j d^2 r / du_i du_j,
    symmetric and bilinear in (x, y).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    frame = tangent_frame(chart, u, derivatives)
    second = _resolve_second(chart, u, derivatives)
    contracted = np.tensordot(np.outer(x, y), second, axes=([0, 1], [0, 1]))
    return normal_project(contracted, frame)


def mean_curvature(chart: Chart, u, derivatives: str = "auto") -> MeanCurvature:
    """Mean curvature vector of the chart at u.

    Traces the inverse Gram matrix against the normal components of the
    second derivative array.  Independent of the chosen parametrization.
    """
    frame = tangent_frame(chart, u, derivatives)
    second = _resolve_second(chart, u, derivatives)
    m = frame.dim
    flat_second = second.reshape(m, m, -1)
    gram_inv = frame.gram_solve(np.eye(m))
    traced = np.tensordot(gram_inv, flat_second, axes=([0, 1], [0, 1]))
    vector = normal_project(traced.reshape(second.shape[2:]), frame)
    scale = float(np.max(np.linalg.norm(flat_second, axis=2)))
    return MeanCurvature(
        vector=vector, norm=float(np.linalg.norm(vector.ravel())), curvature_scale=scale
    )


def affine_reparametrization(chart: Chart, mat, shift) -> Chart:
    """Chart composed with the affine parameter change v -> mat @ v + shift.

    Analytic derivative backends, when present, are transformed by the chain
    rule, which is exact for an affine change.
    """
    mat = np.asarray(mat, dtype=float)
    shift = np.asarray(shift, dtype=float)
    if mat.shape != (chart.param_dim, chart.param_dim):
        raise ValueError(f"affine matrix must be {chart.param_dim}x{chart.param_dim}")

    def value(v):
        return chart.value(mat @ np.asarray(v, dtype=float) + shift)

    first = None
    second = None
    if chart.first_derivs is not None:
        def first(v):
            d1 = np.asarray(chart.first_derivs(mat @ np.asarray(v, dtype=float) + shift))
            return np.tensordot(mat.T, d1, axes=(1, 0))

    if chart.second_derivs is not None:
        def second(v):
            d2 = np.asarray(chart.second_derivs(mat @ np.asarray(v, dtype=float) + shift))
            d2 = np.tensordot(mat.T, d2, axes=(1, 0))
            return np.moveaxis(np.tensordot(mat.T, d2, axes=(1, 1)), 0, 1)

    return Chart(param_dim=chart.param_dim, value=value, first_derivs=first, second_derivs=second)
