"""Grid-based probability densities.

A :class:`GridDensity` stores samples of a nonnegative function at the nodes
of a uniform rectangular grid in one or two dimensions, together with the
domain bounds. All integrals are composite trapezoid rules, which makes
quadrature exact for piecewise-linear integrands and second-order accurate
for smooth ones. Every other module in the package reduces its non
closed-form work to operations on these objects.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import (
    DegenerateError,
    DimensionError,
    DomainError,
    GridMismatchError,
    NotNormalizedError,
)

# Grids smaller than this per dimension are rejected outright.
MIN_POINTS_PER_DIM = 16

# Integrals at or below this are treated as an undefined normalization constant.
DEGENERATE_INTEGRAL = float(np.finfo(np.float64).eps)

NORMALIZATION_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class GridDensity:
    """A pdf (or unnormalized density) sampled on a uniform rectangular grid.

    Parameters
    ----------
    lower, upper : array_like
        Per-dimension domain bounds, ``upper > lower`` elementwise.
    shape : tuple of int
        Number of grid nodes per dimension, each at least 16. Nodes are
        uniformly spaced and include both endpoints, so node ``i`` of
        dimension ``d`` sits at ``lower[d] + i * (upper[d] - lower[d]) /
        (shape[d] - 1)``.
    values : array_like
        Nonnegative samples at the nodes, row-major, either flat or already
        shaped like ``shape``.
    normalized : bool
        Whether the samples integrate to one. Enforced to 1e-9 when claimed.

    Notes
    -----
    Instances are immutable: the value array is copied and frozen at
    construction, and all operations return new objects.
    """

    lower: np.ndarray
    upper: np.ndarray
    shape: tuple[int, ...]
    values: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=np.float64)).copy()
        upper = np.atleast_1d(np.asarray(self.upper, dtype=np.float64)).copy()
        shape = tuple(int(n) for n in np.atleast_1d(self.shape))
        if not (len(lower) == len(upper) == len(shape)):
            raise DimensionError(
                f"inconsistent lengths: lower {len(lower)}, upper {len(upper)}, shape {len(shape)}"
            )
        if len(shape) not in (1, 2):
            raise DimensionError(f"grids support 1 or 2 dimensions, got {len(shape)}")
        if not np.all(np.isfinite(lower)) or not np.all(np.isfinite(upper)):
            raise DomainError("domain bounds must be finite")
        if np.any(upper <= lower):
            raise DomainError(f"upper bounds must exceed lower bounds, got {lower} .. {upper}")
        if any(n < MIN_POINTS_PER_DIM for n in shape):
            raise ValueError(f"each dimension needs at least {MIN_POINTS_PER_DIM} nodes, got {shape}")
        values = np.asarray(self.values, dtype=np.float64).reshape(shape).copy()
        if not np.all(np.isfinite(values)):
            raise ValueError("density values must be finite")
        if np.any(values < 0.0):
            raise ValueError("density values must be nonnegative")
        for arr in (lower, upper, values):
            arr.flags.writeable = False
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "values", values)
        if self.normalized:
            total = float(np.sum(self.quad_weights * values))
            if abs(total - 1.0) > NORMALIZATION_TOL:
                raise NotNormalizedError(
                    f"density claims to be normalized but integrates to {total!r}"
                )

    @property
    def dims(self) -> int:
        return len(self.shape)

    @cached_property
    def spacing(self) -> np.ndarray:
        """Node spacing per dimension."""
        return (self.upper - self.lower) / (np.array(self.shape) - 1)

    @cached_property
    def axes(self) -> tuple[np.ndarray, ...]:
        """Node coordinates per dimension."""
        return tuple(
            np.linspace(self.lower[d], self.upper[d], self.shape[d]) for d in range(self.dims)
        )

    @cached_property
    def quad_weights(self) -> np.ndarray:
        """Tensor-product trapezoid quadrature weights, shaped like ``values``."""
        parts = []
        for d in range(self.dims):
            w = np.full(self.shape[d], self.spacing[d])
            w[0] *= 0.5
            w[-1] *= 0.5
            parts.append(w)
        if self.dims == 1:
            return parts[0]
        return np.multiply.outer(parts[0], parts[1])

    def same_grid(self, other: GridDensity) -> bool:
        """Whether ``other`` lives on an identical grid (bounds and shape)."""
        return (
            self.shape == other.shape
            and np.array_equal(self.lower, other.lower)
            and np.array_equal(self.upper, other.upper)
        )

    def with_values(self, values: np.ndarray, normalized: bool = False) -> GridDensity:
        """A density on this grid with different node values."""
        return GridDensity(self.lower, self.upper, self.shape, values, normalized)


def from_samples(lower, upper, shape, values) -> GridDensity:
    """Build an unnormalized :class:`GridDensity` from raw node samples.

    Raises
    ------
    DomainError
        If any upper bound does not exceed its lower bound.
    ValueError
        If values are negative, non-finite, or all zero.
    """
    d = GridDensity(lower, upper, shape, values, normalized=False)
    if not np.any(d.values > 0.0):
        raise ValueError("density values are all zero")
    return d


def integrate(d: GridDensity) -> float:
    """Composite trapezoid integral of ``d`` over its domain."""
    return float(np.sum(d.quad_weights * d.values))


def normalize(d: GridDensity) -> GridDensity:
    """Scale ``d`` so it integrates to one.

    Raises
    ------
    DegenerateError
        If the integral is at or below machine epsilon, i.e. the
        normalization constant is undefined.
    """
    total = integrate(d)
    if not np.isfinite(total) or total <= DEGENERATE_INTEGRAL:
        raise DegenerateError(f"cannot normalize density with integral {total!r}")
    return d.with_values(d.values / total, normalized=True)


def moments(d: GridDensity) -> tuple[np.ndarray, np.ndarray]:
    """Mean vector and covariance matrix of a normalized density.

    Returns
    -------
    mean : ndarray, shape (dims,)
    cov : ndarray, shape (dims, dims)
        Symmetrized as ``(A + A.T) / 2``.

    Raises
    ------
    NotNormalizedError
        If ``d`` is not marked normalized.
    """
    if not d.normalized:
        raise NotNormalizedError("moments require a normalized density")
    w = d.quad_weights * d.values
    if d.dims == 1:
        x = d.axes[0]
        mean = float(np.sum(w * x))
        var = float(np.sum(w * (x - mean) ** 2))
        return np.array([mean]), np.array([[var]])
    x0, x1 = np.meshgrid(d.axes[0], d.axes[1], indexing="ij")
    mean = np.array([np.sum(w * x0), np.sum(w * x1)])
    c0, c1 = x0 - mean[0], x1 - mean[1]
    cov = np.array(
        [
            [np.sum(w * c0 * c0), np.sum(w * c0 * c1)],
            [np.sum(w * c1 * c0), np.sum(w * c1 * c1)],
        ]
    )
    return mean, 0.5 * (cov + cov.T)


def event_probability(d: GridDensity, cells: np.ndarray) -> float:
    """Probability of a union of grid cells under ``d``.

    Parameters
    ----------
    cells : boolean ndarray
        One flag per grid cell: shape ``(n1 - 1,)`` in one dimension or
        ``(n1 - 1, n2 - 1)`` in two. The event is the union of the flagged
        cells; its mass is the trapezoid rule restricted to those cells.
    """
    cells = np.asarray(cells, dtype=bool)
    expected = tuple(n - 1 for n in d.shape)
    if cells.shape != expected:
        raise DimensionError(f"cell mask shape {cells.shape} does not match cell grid {expected}")
    v = d.values
    if d.dims == 1:
        mass = d.spacing[0] * 0.5 * (v[:-1] + v[1:])
        return float(np.sum(mass[cells]))
    area = d.spacing[0] * d.spacing[1]
    mass = area * 0.25 * (v[:-1, :-1] + v[1:, :-1] + v[:-1, 1:] + v[1:, 1:])
    return float(np.sum(mass[cells]))


def require_same_grid(*densities: GridDensity) -> None:
    """Raise :class:`GridMismatchError` unless all densities share one grid."""
    first = densities[0]
    for other in densities[1:]:
        if not first.same_grid(other):
            raise GridMismatchError(
                f"grids differ: {first.shape} on [{first.lower}, {first.upper}] vs "
                f"{other.shape} on [{other.lower}, {other.upper}]"
            )


@dataclass(frozen=True, eq=False)
class OpinionProfile:
    """An ordered collection of agent densities on a shared grid.

    The ``positive`` flag records whether every value of every member is
    strictly positive; pooling functions that divide by or take logarithms
    of agent densities require it.
    """

    densities: tuple[GridDensity, ...]
    positive: bool = field(init=False)

    def __post_init__(self):
        densities = tuple(self.densities)
        if len(densities) < 1:
            raise ValueError("an opinion profile needs at least one agent")
        require_same_grid(*densities)
        object.__setattr__(self, "densities", densities)
        positive = all(float(q.values.min()) > 0.0 for q in densities)
        object.__setattr__(self, "positive", positive)

    @property
    def K(self) -> int:
        return len(self.densities)

    @property
    def grid(self) -> GridDensity:
        """A representative member, used for grid metadata."""
        return self.densities[0]

    def permuted(self, order) -> OpinionProfile:
        """The profile with agents reordered by the given permutation."""
        order = list(order)
        if sorted(order) != list(range(self.K)):
            raise ValueError(f"not a permutation of 0..{self.K - 1}: {order}")
        return OpinionProfile(tuple(self.densities[i] for i in order))
