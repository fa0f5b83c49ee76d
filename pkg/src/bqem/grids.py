"""Uniform sample grids and second-order central-difference stencils.

A Lattice fixes the geometry (origin, spacing, node counts) and the grid
containers pair it with one complex value per node: a plain complex array
for scalar fields, a trailing length-4 axis for biquaternion fields, and a
leading time axis for space-time fields.

Only central stencils are used.  Nodes where a stencil would reach outside
the lattice are filled with NaN, and each grid carries a ``margin`` count
of invalid boundary layers; composing operators lets NaN propagate so the
margin bookkeeping stays honest.  Norms are always taken over the interior
that excludes the margin.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import Biquaternion
from .errors import GridTooSmall, LatticeMismatch


@dataclass(frozen=True)
class Lattice:
    """Uniformly spaced 3D lattice of nodes."""

    origin: tuple[float, float, float]
    spacing: float
    dims: tuple[int, int, int]

    def __post_init__(self):
        if self.spacing <= 0.0:
            raise ValueError("spacing must be positive")
        if any(n < 5 for n in self.dims):
            raise GridTooSmall(f"need at least 5 nodes per direction, got {self.dims}")

    @classmethod
    def cube(cls, center, side: float, n: int) -> "Lattice":
        h = side / (n - 1)
        origin = tuple(float(c) - side / 2.0 for c in center)
        return cls(origin, h, (n, n, n))

    def axis(self, k: int) -> np.ndarray:
        return self.origin[k] + self.spacing * np.arange(self.dims[k])

    def points(self) -> np.ndarray:
        """All node coordinates, shape dims + (3,)."""
        xs = np.meshgrid(self.axis(0), self.axis(1), self.axis(2), indexing="ij")
        return np.stack(xs, axis=-1)

    def node_position(self, idx) -> np.ndarray:
        return np.asarray(self.origin) + self.spacing * np.asarray(idx, dtype=float)


def _same_lattice(a: Lattice, b: Lattice) -> None:
    if a != b:
        raise LatticeMismatch(f"lattices differ: {a} vs {b}")


@dataclass(frozen=True)
class ScalarGrid:
    """One complex value per lattice node."""

    lattice: Lattice
    values: np.ndarray
    margin: int = 0

    def __post_init__(self):
        if self.values.shape != self.lattice.dims:
            raise ValueError("values shape does not match lattice dims")

    @classmethod
    def from_function(cls, lattice: Lattice, fn: Callable[[np.ndarray], np.ndarray]) -> "ScalarGrid":
        """Sample fn(points) where points has shape (..., 3)."""
        return cls(lattice, np.asarray(fn(lattice.points()), dtype=complex))

    def with_values(self, values: np.ndarray, margin: int | None = None) -> "ScalarGrid":
        return ScalarGrid(self.lattice, values, self.margin if margin is None else margin)

    def interior_max(self, margin: int | None = None) -> float:
        return max_abs_interior(self.values, self.margin if margin is None else margin)


@dataclass(frozen=True)
class QuaternionGrid:
    """One biquaternion per lattice node, components on the trailing axis."""

    lattice: Lattice
    values: np.ndarray
    margin: int = 0

    def __post_init__(self):
        if self.values.shape != self.lattice.dims + (4,):
            raise ValueError("values shape does not match lattice dims + (4,)")

    @classmethod
    def from_function(cls, lattice: Lattice, fn: Callable[[np.ndarray], np.ndarray]) -> "QuaternionGrid":
        """Sample fn(points) -> (..., 4) components."""
        return cls(lattice, np.asarray(fn(lattice.points()), dtype=complex))

    @classmethod
    def from_scalar_grid(cls, g: ScalarGrid) -> "QuaternionGrid":
        out = np.zeros(g.lattice.dims + (4,), dtype=complex)
        out[..., 0] = g.values
        return cls(g.lattice, out, g.margin)

    @classmethod
    def from_vector_values(cls, lattice: Lattice, v: np.ndarray, margin: int = 0) -> "QuaternionGrid":
        out = np.zeros(lattice.dims + (4,), dtype=complex)
        out[..., 1:] = v
        return cls(lattice, out, margin)

    @property
    def scalar(self) -> np.ndarray:
        return self.values[..., 0]

    @property
    def vector(self) -> np.ndarray:
        return self.values[..., 1:]

    def bq(self) -> Biquaternion:
        return Biquaternion(self.values)

    def with_values(self, values: np.ndarray, margin: int | None = None) -> "QuaternionGrid":
        return QuaternionGrid(self.lattice, values, self.margin if margin is None else margin)

    def interior_max(self, margin: int | None = None) -> float:
        return max_abs_interior(self.values, self.margin if margin is None else margin)

    # pointwise helpers; margins combine to the max of the operands

    def __add__(self, other: "QuaternionGrid") -> "QuaternionGrid":
        _same_lattice(self.lattice, other.lattice)
        return QuaternionGrid(self.lattice, self.values + other.values, max(self.margin, other.margin))

    def __sub__(self, other: "QuaternionGrid") -> "QuaternionGrid":
        _same_lattice(self.lattice, other.lattice)
        return QuaternionGrid(self.lattice, self.values - other.values, max(self.margin, other.margin))

    def __neg__(self) -> "QuaternionGrid":
        return self.with_values(-self.values)

    def scale(self, s) -> "QuaternionGrid":
        """Multiply by a complex number or a nodewise complex array."""
        s = np.asarray(s, dtype=complex)
        return self.with_values(self.values * s[..., None] if s.ndim else self.values * s)


@dataclass(frozen=True)
class SpaceTimeLattice:
    """A spatial lattice swept over uniformly spaced times."""

    space: Lattice
    t0: float
    dt: float
    nt: int

    def __post_init__(self):
        if self.dt <= 0.0 or self.nt < 1:
            raise ValueError("need dt > 0 and nt >= 1")

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.nt)


@dataclass(frozen=True)
class SpaceTimeGrid:
    """Biquaternion samples on a space-time lattice, shape (nt,) + dims + (4,)."""

    lattice: SpaceTimeLattice
    values: np.ndarray
    margin_t: int = 0
    margin_s: int = 0

    def __post_init__(self):
        expect = (self.lattice.nt,) + self.lattice.space.dims + (4,)
        if self.values.shape != expect:
            raise ValueError(f"values shape {self.values.shape} != {expect}")

    @classmethod
    def from_function(cls, lattice: SpaceTimeLattice, fn: Callable[[float, np.ndarray], np.ndarray]) -> "SpaceTimeGrid":
        """Sample fn(t, points) -> (..., 4) for each time level."""
        pts = lattice.space.points()
        slices = [np.asarray(fn(t, pts), dtype=complex) for t in lattice.times()]
        return cls(lattice, np.stack(slices, axis=0))

    def interior_max(self, margin_t: int | None = None, margin_s: int | None = None) -> float:
        mt = self.margin_t if margin_t is None else margin_t
        ms = self.margin_s if margin_s is None else margin_s
        return max_abs_interior(self.values, ms, spatial_axes=(1, 2, 3), extra={0: mt})


# ---------------------------------------------------------------------------
# stencils
# ---------------------------------------------------------------------------


def _check_axis_size(values: np.ndarray, axis: int, need: int) -> None:
    if values.shape[axis] < need:
        raise GridTooSmall(f"axis {axis} has {values.shape[axis]} nodes, need {need}")


def diff(values: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Central first derivative along axis; NaN on the one-node boundary."""
    _check_axis_size(values, axis, 3)
    out = np.full_like(np.asarray(values, dtype=complex), np.nan)
    lo = [slice(None)] * values.ndim
    hi = [slice(None)] * values.ndim
    mid = [slice(None)] * values.ndim
    lo[axis] = slice(0, -2)
    hi[axis] = slice(2, None)
    mid[axis] = slice(1, -1)
    out[tuple(mid)] = (values[tuple(hi)] - values[tuple(lo)]) / (2.0 * h)
    return out


def second_diff(values: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Central second derivative along axis; NaN on the one-node boundary."""
    _check_axis_size(values, axis, 3)
    out = np.full_like(np.asarray(values, dtype=complex), np.nan)
    lo = [slice(None)] * values.ndim
    hi = [slice(None)] * values.ndim
    mid = [slice(None)] * values.ndim
    lo[axis] = slice(0, -2)
    hi[axis] = slice(2, None)
    mid[axis] = slice(1, -1)
    out[tuple(mid)] = (values[tuple(hi)] - 2.0 * values[tuple(mid)] + values[tuple(lo)]) / (h * h)
    return out


def grad(values: np.ndarray, h: float, axes=(0, 1, 2)) -> np.ndarray:
    """Gradient of a scalar array, components stacked on a new trailing axis."""
    return np.stack([diff(values, ax, h) for ax in axes], axis=-1)


def div(vec_values: np.ndarray, h: float, axes=(0, 1, 2)) -> np.ndarray:
    """Divergence of a (..., 3) vector array."""
    return sum(diff(vec_values[..., k], ax, h) for k, ax in enumerate(axes))


def rot(vec_values: np.ndarray, h: float, axes=(0, 1, 2)) -> np.ndarray:
    """Curl of a (..., 3) vector array."""
    d = [[diff(vec_values[..., k], ax, h) for k in range(3)] for ax in axes]
    return np.stack(
        [d[1][2] - d[2][1], d[2][0] - d[0][2], d[0][1] - d[1][0]],
        axis=-1,
    )


def laplacian(values: np.ndarray, h: float, axes=(0, 1, 2)) -> np.ndarray:
    """Compact 7-point Laplacian of a scalar array."""
    return sum(second_diff(values, ax, h) for ax in axes)


def dirac(values: np.ndarray, h: float, axes=(0, 1, 2)) -> np.ndarray:
    """Dirac operator on (..., 4) quaternion components.

    Scalar part -div of the vector part, vector part grad of the scalar
    part plus rot of the vector part; ``axes`` names the three spatial axes.
    """
    d = [[diff(values[..., c], ax, h) for c in range(4)] for ax in axes]
    out = np.empty_like(np.asarray(values, dtype=complex))
    out[..., 0] = -(d[0][1] + d[1][2] + d[2][3])
    out[..., 1] = d[0][0] + (d[1][3] - d[2][2])
    out[..., 2] = d[1][0] + (d[2][1] - d[0][3])
    out[..., 3] = d[2][0] + (d[0][2] - d[1][1])
    return out


def max_abs_interior(values: np.ndarray, margin: int, spatial_axes=(0, 1, 2), extra: dict | None = None) -> float:
    """Max componentwise modulus over the interior that excludes the margin.

    Raises if the interior is empty or still contains non-finite values,
    which would mean an operator was applied with too small a margin.
    """
    sl = [slice(None)] * values.ndim
    for ax in spatial_axes:
        if 2 * margin >= values.shape[ax]:
            raise GridTooSmall(f"margin {margin} leaves no interior on axis {ax}")
        sl[ax] = slice(margin, values.shape[ax] - margin) if margin else slice(None)
    for ax, m in (extra or {}).items():
        if 2 * m >= values.shape[ax]:
            raise GridTooSmall(f"margin {m} leaves no interior on axis {ax}")
        sl[ax] = slice(m, values.shape[ax] - m) if m else slice(None)
    inner = values[tuple(sl)]
    if not np.all(np.isfinite(inner)):
        raise ValueError("non-finite values inside the declared interior")
    return float(np.max(np.abs(inner)))
