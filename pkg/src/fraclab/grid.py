"""Uniform periodic grids, grid functions, and index masks.

The computational domain is the periodic box [-L/2, L/2)^dim sampled on a
uniform lattice with N points per dimension (N a power of two, so that
h * N == L holds exactly in floating point). Points are stored
lexicographically, row-major: in 2-d the flat index is i0 * N + i1 and the
first coordinate varies slowest.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

__all__ = [
    "Grid",
    "Field",
    "DomainMask",
    "make_grid",
    "mask_from_predicate",
    "inner",
    "GridError",
    "DOF_CAP",
]

# dense-direct desk scale: matrices, factorizations and eigensolves are all
# full, so lattices are capped at this many degrees of freedom
DOF_CAP = 4096


class GridError(ValueError):
    """Invalid grid, field, or mask construction."""


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True, eq=False)
class Grid:
    """Periodic uniform lattice on [-extent/2, extent/2)^dim."""

    dim: int
    extent: float
    points_per_dim: int
    spacing: float = field(init=False)

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise GridError(f"dim must be 1 or 2, got {self.dim}")
        if not (np.isfinite(self.extent) and self.extent > 0):
            raise GridError(f"extent must be positive and finite, got {self.extent}")
        n = self.points_per_dim
        if not (_is_power_of_two(n) and n >= 8):
            raise GridError(f"points_per_dim must be a power of two >= 8, got {n}")
        object.__setattr__(self, "spacing", self.extent / n)

    @property
    def size(self) -> int:
        """Total number of lattice points N^dim."""
        return self.points_per_dim**self.dim

    def axis_coords(self) -> np.ndarray:
        """Coordinates along one axis: x_i = -L/2 + i*h."""
        n = self.points_per_dim
        return -0.5 * self.extent + self.spacing * np.arange(n)

    def axis_wavenumbers(self) -> np.ndarray:
        """Fourier wavenumbers 2*pi*m/L for m in [-N/2, N/2), fft order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.points_per_dim, d=self.spacing)

    def points(self) -> np.ndarray:
        """All lattice points as an (N^dim, dim) array, lexicographic order."""
        x = self.axis_coords()
        if self.dim == 1:
            return x[:, None]
        a, b = np.meshgrid(x, x, indexing="ij")
        return np.column_stack([a.ravel(), b.ravel()])

    def index_to_multi(self, idx) -> tuple:
        """Flat index -> per-axis integer indices."""
        n = self.points_per_dim
        if self.dim == 1:
            return (np.asarray(idx),)
        idx = np.asarray(idx)
        return (idx // n, idx % n)

    def multi_to_index(self, multi) -> np.ndarray:
        """Per-axis integer indices -> flat index."""
        n = self.points_per_dim
        if self.dim == 1:
            return np.asarray(multi[0])
        return np.asarray(multi[0]) * n + np.asarray(multi[1])

    def shape(self) -> tuple:
        return (self.points_per_dim,) * self.dim

    def same_as(self, other: "Grid") -> bool:
        return (
            self.dim == other.dim
            and self.extent == other.extent
            and self.points_per_dim == other.points_per_dim
        )


def make_grid(dim: int, extent: float, points_per_dim: int) -> Grid:
    """Build a periodic grid; rejects dim outside {1,2} and non-power-of-two N."""
    return Grid(dim=dim, extent=float(extent), points_per_dim=int(points_per_dim))


@dataclass(frozen=True, eq=False)
class Field:
    """Real-valued grid function, stored as a flat length-N^dim array."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()  # defensive copy
        if v.size != self.grid.size:
            raise GridError(
                f"field length {v.size} does not match grid size {self.grid.size}"
            )
        if not np.all(np.isfinite(v)):
            raise GridError("field contains non-finite entries")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, grid: Grid, fn: Callable) -> "Field":
        """Sample fn(*coords) at every lattice point."""
        pts = grid.points()
        vals = np.array([float(fn(*p)) for p in pts])
        return cls(grid, vals)

    @classmethod
    def constant(cls, grid: Grid, value: float) -> "Field":
        return cls(grid, np.full(grid.size, float(value)))

    @classmethod
    def zeros(cls, grid: Grid) -> "Field":
        return cls(grid, np.zeros(grid.size))

    def support(self) -> np.ndarray:
        """Indices where the field is nonzero."""
        return np.nonzero(self.values != 0.0)[0]


@dataclass(frozen=True, eq=False)
class DomainMask:
    """Partition of lattice indices into interior and exterior, plus windows.

    Windows are named sorted index sets contained in the exterior; they may
    overlap each other.
    """

    grid: Grid
    interior: np.ndarray
    exterior: np.ndarray
    windows: Mapping[str, np.ndarray]

    def __post_init__(self):
        interior = np.unique(np.asarray(self.interior, dtype=np.intp))
        exterior = np.unique(np.asarray(self.exterior, dtype=np.intp))
        m = self.grid.size
        if interior.size == 0:
            raise GridError("interior is empty")
        if exterior.size == 0:
            raise GridError("exterior is empty")
        if interior.size + exterior.size != m or np.intersect1d(interior, exterior).size:
            raise GridError("interior and exterior must partition the lattice")
        windows = {}
        for name, idx in dict(self.windows).items():
            idx = np.unique(np.asarray(idx, dtype=np.intp))
            if idx.size == 0:
                raise GridError(f"window {name!r} is empty")
            if np.setdiff1d(idx, exterior).size:
                raise GridError(f"window {name!r} is not contained in the exterior")
            idx.flags.writeable = False
            windows[name] = idx
        interior.flags.writeable = False
        exterior.flags.writeable = False
        object.__setattr__(self, "interior", interior)
        object.__setattr__(self, "exterior", exterior)
        object.__setattr__(self, "windows", windows)

    def window(self, name: str) -> np.ndarray:
        return self.windows[name]


def mask_from_predicate(
    grid: Grid,
    inside: Callable,
    windows: Mapping[str, Callable] | None = None,
) -> DomainMask:
    """Build a mask from point predicates.

    `inside` marks interior points; each window predicate is intersected with
    the exterior, and a window whose intersection with the exterior is empty
    (e.g. one lying wholly inside the interior) is rejected.
    """
    pts = grid.points()
    inside_flags = np.array([bool(inside(*p)) for p in pts])
    interior = np.nonzero(inside_flags)[0]
    exterior = np.nonzero(~inside_flags)[0]
    if interior.size == 0:
        raise GridError("interior predicate selects no points")
    if exterior.size == 0:
        raise GridError("exterior is empty: interior predicate selects every point")
    win_sets = {}
    for name, pred in (windows or {}).items():
        flags = np.array([bool(pred(*p)) for p in pts])
        idx = np.intersect1d(np.nonzero(flags)[0], exterior)
        if idx.size == 0:
            raise GridError(
                f"window {name!r} has no exterior points (wholly inside the domain or empty)"
            )
        win_sets[name] = idx
    return DomainMask(grid=grid, interior=interior, exterior=exterior, windows=win_sets)


def inner(a: Field, b: Field) -> float:
    """Quadrature L2 pairing h^dim * sum(a_i b_i) on a shared grid."""
    if not a.grid.same_as(b.grid):
        raise GridError("inner: fields live on different grids")
    return float(a.grid.spacing**a.grid.dim * np.dot(a.values, b.values))
