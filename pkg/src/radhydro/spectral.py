"""Periodic-grid fields and Fourier-space operators.

Everything in the solver lives on the torus [0, 2pi)^n with n = 1 or 2, so
wavenumbers are integers and differential operators are exact mode-wise
multiplications:

- ``grad``/``div``: multiplication by i*k_j
- ``laplacian``: multiplication by -|k|^2
- ``helmholtz_inverse``: multiplication by 1/(1 + |k|^2), the exact inverse
  of (I - Laplacian) on the grid
- ``sobolev_norm``: Parseval-exact H^s norm with the (2pi)^n measure
- ``dealias``: 2/3-rule truncation applied after nonlinear products

The forward transform divides by the total point count, so the k = 0
coefficient of a field equals its mean and symbols read off directly.
Fields are immutable: every operation returns a new field, and value /
coefficient arrays are marked read-only so they can be shared freely
across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "Grid",
    "SpectralField",
    "VectorField",
    "grad",
    "div",
    "laplacian",
    "helmholtz_inverse",
    "sobolev_norm",
    "dealias",
    "l2_inner",
]

MAX_SOBOLEV_INDEX = 6


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [0, 2pi)^n.

    Attributes:
        n_dims: Spatial dimension, 1 or 2.
        points_per_dim: Points along each axis; a power of two, at least 8.
    """

    n_dims: int
    points_per_dim: int

    def __post_init__(self):
        if self.n_dims not in (1, 2):
            raise ValueError(f"n_dims must be 1 or 2, got {self.n_dims}")
        n = self.points_per_dim
        if n < 8 or (n & (n - 1)) != 0:
            raise ValueError(
                f"points_per_dim must be a power of two >= 8, got {n}"
            )

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_dim,) * self.n_dims

    @property
    def spacing(self) -> float:
        """Grid spacing h = 2pi / points_per_dim."""
        return 2.0 * np.pi / self.points_per_dim

    @property
    def cell_volume(self) -> float:
        """Measure of one grid cell, h^n."""
        return self.spacing**self.n_dims

    @property
    def volume(self) -> float:
        """Measure of the torus, (2pi)^n."""
        return (2.0 * np.pi) ** self.n_dims

    def coordinates(self) -> list[np.ndarray]:
        """Node coordinates, one full-shape array per axis."""
        x = np.arange(self.points_per_dim) * self.spacing
        axes = np.meshgrid(*([x] * self.n_dims), indexing="ij")
        return list(axes)

    @cached_property
    def wavenumbers(self) -> list[np.ndarray]:
        """Integer wavenumber meshes, one full-shape array per axis."""
        n = self.points_per_dim
        k = np.fft.fftfreq(n, d=1.0 / n)
        meshes = np.meshgrid(*([k] * self.n_dims), indexing="ij")
        for m in meshes:
            m.setflags(write=False)
        return list(meshes)

    @cached_property
    def k_squared(self) -> np.ndarray:
        ksq = sum(k**2 for k in self.wavenumbers)
        ksq.setflags(write=False)
        return ksq

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """Boolean keep-mask for the 2/3 rule: any |k_j| > N/3 is dropped."""
        cutoff = self.points_per_dim / 3.0
        keep = np.ones(self.shape, dtype=bool)
        for k in self.wavenumbers:
            keep &= np.abs(k) <= cutoff
        keep.setflags(write=False)
        return keep


def _read_only(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


class SpectralField:
    """Real scalar field with lazily synchronized Fourier coefficients.

    Construct with :meth:`from_values` (physical samples) or
    :meth:`from_coefficients` (Fourier modes). The other representation is
    computed on first access and cached; instances are immutable.
    """

    __slots__ = ("grid", "_values", "_coefficients")

    def __init__(self, grid: Grid, values=None, coefficients=None):
        if (values is None) == (coefficients is None):
            raise ValueError("provide exactly one of values or coefficients")
        self.grid = grid
        self._values = values
        self._coefficients = coefficients

    @classmethod
    def from_values(cls, grid: Grid, values) -> "SpectralField":
        arr = np.array(values, dtype=float)
        if arr.shape != grid.shape:
            raise ValueError(f"values shape {arr.shape} != grid shape {grid.shape}")
        return cls(grid, values=_read_only(arr))

    @classmethod
    def from_coefficients(cls, grid: Grid, coefficients) -> "SpectralField":
        arr = np.array(coefficients, dtype=complex)
        if arr.shape != grid.shape:
            raise ValueError(
                f"coefficients shape {arr.shape} != grid shape {grid.shape}"
            )
        return cls(grid, coefficients=_read_only(arr))

    @classmethod
    def constant(cls, grid: Grid, value: float) -> "SpectralField":
        return cls.from_values(grid, np.full(grid.shape, float(value)))

    @classmethod
    def zeros(cls, grid: Grid) -> "SpectralField":
        return cls.constant(grid, 0.0)

    @property
    def values(self) -> np.ndarray:
        """Physical-space samples (read-only array)."""
        if self._values is None:
            vals = np.fft.ifftn(self._coefficients, norm="forward").real
            self._values = _read_only(vals)
        return self._values

    @property
    def coefficients(self) -> np.ndarray:
        """Fourier coefficients; the k = 0 entry is the field mean."""
        if self._coefficients is None:
            self._coefficients = _read_only(np.fft.fftn(self._values, norm="forward"))
        return self._coefficients

    @property
    def mean(self) -> float:
        return float(self.coefficients[(0,) * self.grid.n_dims].real)

    @property
    def min_value(self) -> float:
        return float(self.values.min())

    @property
    def max_value(self) -> float:
        return float(self.values.max())

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))

    # Pointwise arithmetic. Linear combinations are alias-free; nonlinear
    # products must be followed by dealias() at the call site.
    def _coerce(self, other):
        if isinstance(other, SpectralField):
            if other.grid != self.grid:
                raise ValueError("fields live on different grids")
            return other.values
        if np.isscalar(other):
            return other
        return None

    def __add__(self, other):
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return SpectralField.from_values(self.grid, self.values + rhs)

    __radd__ = __add__

    def __sub__(self, other):
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return SpectralField.from_values(self.grid, self.values - rhs)

    def __rsub__(self, other):
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return SpectralField.from_values(self.grid, rhs - self.values)

    def __mul__(self, other):
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return SpectralField.from_values(self.grid, self.values * rhs)

    __rmul__ = __mul__

    def __truediv__(self, other):
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return SpectralField.from_values(self.grid, self.values / rhs)

    def __neg__(self):
        return SpectralField.from_values(self.grid, -self.values)

    def __pow__(self, exponent: int):
        return SpectralField.from_values(self.grid, self.values**exponent)

    def __repr__(self):
        return f"SpectralField(n_dims={self.grid.n_dims}, N={self.grid.points_per_dim})"


class VectorField:
    """Tuple of scalar fields sharing one grid; one entry per dimension."""

    __slots__ = ("components",)

    def __init__(self, components):
        comps = tuple(components)
        if not comps:
            raise ValueError("vector field needs at least one component")
        grid = comps[0].grid
        if any(c.grid != grid for c in comps):
            raise ValueError("components live on different grids")
        if len(comps) != grid.n_dims:
            raise ValueError(
                f"expected {grid.n_dims} components, got {len(comps)}"
            )
        self.components = comps

    @classmethod
    def zeros(cls, grid: Grid) -> "VectorField":
        return cls([SpectralField.zeros(grid) for _ in range(grid.n_dims)])

    @property
    def grid(self) -> Grid:
        return self.components[0].grid

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i) -> SpectralField:
        return self.components[i]

    def __add__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return VectorField([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return VectorField([a - b for a, b in zip(self.components, other.components)])

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return VectorField([c * scalar for c in self.components])

    __rmul__ = __mul__

    def __neg__(self):
        return VectorField([-c for c in self.components])

    def dot(self, other: "VectorField") -> SpectralField:
        """Pointwise scalar product (not dealiased)."""
        out = self.components[0] * other.components[0]
        for a, b in zip(self.components[1:], other.components[1:]):
            out = out + a * b
        return out

    def max_magnitude(self) -> float:
        """Largest pointwise Euclidean norm over the grid."""
        sq = sum(c.values**2 for c in self.components)
        return float(np.sqrt(sq.max()))

    def is_finite(self) -> bool:
        return all(c.is_finite() for c in self.components)


def grad(f: SpectralField) -> VectorField:
    """Spectral gradient: component j has coefficients i*k_j*fhat(k)."""
    g = f.grid
    c = f.coefficients
    return VectorField(
        [SpectralField.from_coefficients(g, 1j * k * c) for k in g.wavenumbers]
    )


def div(v: VectorField) -> SpectralField:
    """Spectral divergence: coefficients sum_j i*k_j*vhat_j(k)."""
    g = v.grid
    out = np.zeros(g.shape, dtype=complex)
    for k, comp in zip(g.wavenumbers, v.components):
        out += 1j * k * comp.coefficients
    return SpectralField.from_coefficients(g, out)


def laplacian(f: SpectralField) -> SpectralField:
    """Spectral Laplacian: coefficients -|k|^2 * fhat(k)."""
    g = f.grid
    return SpectralField.from_coefficients(g, -g.k_squared * f.coefficients)


def helmholtz_inverse(f: SpectralField) -> SpectralField:
    """Exact inverse of (I - Laplacian): coefficients fhat(k)/(1 + |k|^2)."""
    g = f.grid
    return SpectralField.from_coefficients(g, f.coefficients / (1.0 + g.k_squared))


def dealias(x):
    """Zero all modes with any |k_j| > N/3 (2/3 rule). Idempotent.

    Accepts a scalar or vector field and returns the same kind.
    """
    if isinstance(x, VectorField):
        return VectorField([dealias(c) for c in x.components])
    mask = x.grid.dealias_mask
    return SpectralField.from_coefficients(x.grid, np.where(mask, x.coefficients, 0.0))


def sobolev_norm(x, s: int) -> float:
    """H^s norm: (sum_k (1+|k|^2)^s |fhat(k)|^2 (2pi)^n)^(1/2).

    For s = 0 this is the L^2 norm. Vector fields sum component squares.

    Args:
        x: SpectralField or VectorField.
        s: Integer Sobolev index, 0 <= s <= 6. Grid resolution at desk
           scale cannot support meaningful higher indices.
    """
    if not isinstance(s, (int, np.integer)) or s < 0 or s > MAX_SOBOLEV_INDEX:
        raise ValueError(f"Sobolev index must be an integer in [0, {MAX_SOBOLEV_INDEX}]")
    if isinstance(x, VectorField):
        return float(np.sqrt(sum(sobolev_norm(c, s) ** 2 for c in x.components)))
    g = x.grid
    weight = (1.0 + g.k_squared) ** s
    total = np.sum(weight * np.abs(x.coefficients) ** 2) * g.volume
    return float(np.sqrt(total))


def l2_inner(a, b) -> float:
    """L^2 inner product on the torus, exact via Parseval.

    Accepts two scalar fields or two vector fields.
    """
    if isinstance(a, VectorField) and isinstance(b, VectorField):
        return float(sum(l2_inner(x, y) for x, y in zip(a.components, b.components)))
    total = np.sum(np.conj(a.coefficients) * b.coefficients).real
    return float(total * a.grid.volume)
