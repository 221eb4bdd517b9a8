"""Periodic cubic grid, scalar fields and spectral convolution kernels.

Fields live on a uniform n^3 lattice covering the cube [-L/2, L/2)^3.
All convolution operators (screened resolvents, truncated Coulomb, SCF
shifts, kinetic-inverse components) are diagonal in Fourier space and
applied exactly on the discrete mode lattice k = 2*pi*m/L.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "Grid",
    "Field",
    "KernelSpec",
    "GridError",
    "GridMismatchError",
    "NonFiniteFieldError",
    "create_grid",
    "sample",
    "combine",
    "multiply",
    "inner_product",
    "apply_kernel",
    "dump_orbital",
    "load_orbital",
]


class GridError(ValueError):
    """Invalid grid construction parameters."""


class GridMismatchError(ValueError):
    """Fields defined on different grids were combined."""


class NonFiniteFieldError(ValueError):
    """A field contains NaN or Inf samples."""


@dataclass(frozen=True)
class Grid:
    """Cubic sampling lattice with box length L (bohr) and n points per axis."""

    box_length: float
    points_per_axis: int

    @property
    def spacing(self) -> float:
        return self.box_length / self.points_per_axis

    @property
    def shape(self) -> tuple[int, int, int]:
        n = self.points_per_axis
        return (n, n, n)

    @cached_property
    def axis(self) -> np.ndarray:
        """Sample coordinates along one axis, origin at the box center."""
        n = self.points_per_axis
        return (np.arange(n) - n // 2) * self.spacing

    @cached_property
    def coords(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return np.meshgrid(self.axis, self.axis, self.axis, indexing="ij")

    @cached_property
    def k_axis(self) -> np.ndarray:
        """Wave numbers 2*pi*m/L in FFT order, m in {-n/2, ..., n/2 - 1}."""
        return 2.0 * np.pi * np.fft.fftfreq(self.points_per_axis, d=self.spacing)

    @cached_property
    def k_squared(self) -> np.ndarray:
        """|k|^2 on the full FFT mode lattice."""
        k = self.k_axis
        kx, ky, kz = np.meshgrid(k, k, k, indexing="ij")
        return kx * kx + ky * ky + kz * kz

    @cached_property
    def k_squared_rfft(self) -> np.ndarray:
        """|k|^2 on the real-transform (half) mode lattice."""
        k = self.k_axis
        kz = k[: self.points_per_axis // 2 + 1].copy()
        kz[-1] = -kz[-1]  # Nyquist sign is irrelevant for |k|^2
        kx, ky, kzz = np.meshgrid(k, k, kz, indexing="ij")
        return kx * kx + ky * ky + kzz * kzz

    @cached_property
    def rfft_mode_weights(self) -> np.ndarray:
        """Multiplicity of half-lattice modes when summing over the full lattice."""
        n = self.points_per_axis
        w = np.full(n // 2 + 1, 2.0)
        w[0] = 1.0
        w[-1] = 1.0
        return np.broadcast_to(w, (n, n, n // 2 + 1))


@dataclass(frozen=True, eq=False)
class Field:
    """Real scalar function sampled on a Grid.  Immutable."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != self.grid.shape:
            raise GridError(
                f"sample array shape {values.shape} does not match grid {self.grid.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise NonFiniteFieldError("field contains non-finite samples")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def norm_l2(self) -> float:
        return float(np.sqrt(inner_product(self, self, "L2")))

    def norm_h1(self) -> float:
        return float(np.sqrt(max(inner_product(self, self, "H1"), 0.0)))


@dataclass(frozen=True)
class KernelSpec:
    """Fourier-multiplier convolution kernel.

    variant:
        "resolvent"       symbol 1/(|k|^2 + mu), mu > 0 (Yukawa screening)
        "coulomb"         spherically truncated 4*pi/|k|^2, cutoff R_c = L/2
        "scf_shift"       symbol 1/(|k|^2/2 - eps), eps < 0
        "tinv_component"  symbol (|k|^2 + 1)/(2|k|^2 - mu), mu < 0
    """

    variant: str
    parameter: float = 0.0

    def __post_init__(self):
        if self.variant == "resolvent":
            if not self.parameter > 0:
                raise GridError("resolvent kernel requires mu > 0")
        elif self.variant == "scf_shift":
            if not self.parameter < 0:
                raise GridError("scf_shift kernel requires eps < 0")
        elif self.variant == "tinv_component":
            if not self.parameter < 0:
                raise GridError("tinv_component kernel requires mu < 0")
        elif self.variant != "coulomb":
            raise GridError(f"unknown kernel variant {self.variant!r}")

    @classmethod
    def resolvent(cls, mu: float) -> "KernelSpec":
        return cls("resolvent", mu)

    @classmethod
    def coulomb(cls) -> "KernelSpec":
        return cls("coulomb")

    @classmethod
    def scf_shift(cls, eps: float) -> "KernelSpec":
        return cls("scf_shift", eps)

    @classmethod
    def tinv_component(cls, mu: float) -> "KernelSpec":
        return cls("tinv_component", mu)

    def symbol(self, k_squared: np.ndarray, grid: Grid) -> np.ndarray:
        k2 = k_squared
        if self.variant == "resolvent":
            return 1.0 / (k2 + self.parameter)
        if self.variant == "scf_shift":
            return 1.0 / (0.5 * k2 - self.parameter)
        if self.variant == "tinv_component":
            return (k2 + 1.0) / (2.0 * k2 - self.parameter)
        # Truncated Coulomb: convolution with 1/|x| restricted to |x| < R_c,
        # which reproduces the free-space potential for densities supported
        # well inside the cutoff sphere.
        r_c = 0.5 * grid.box_length
        k = np.sqrt(k2)
        with np.errstate(divide="ignore", invalid="ignore"):
            sym = 4.0 * np.pi * (1.0 - np.cos(k * r_c)) / k2
        return np.where(k2 == 0.0, 2.0 * np.pi * r_c * r_c, sym)


def create_grid(box_length: float, points_per_axis: int) -> Grid:
    """Build a periodic cubic grid; n must be even and at least 8."""
    if not box_length > 0:
        raise GridError(f"box_length must be positive, got {box_length}")
    n = points_per_axis
    if n % 2 != 0 or n < 8:
        raise GridError(f"points_per_axis must be even and >= 8, got {n}")
    return Grid(float(box_length), int(n))


def sample(grid: Grid, f: Callable) -> Field:
    """Sample a scalar function f(x, y, z) on the lattice (vectorized call)."""
    x, y, z = grid.coords
    values = np.asarray(f(x, y, z), dtype=np.float64)
    values = np.broadcast_to(values, grid.shape)
    return Field(grid, values)


def _check_same_grid(*fields: Field) -> Grid:
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise GridMismatchError("fields live on different grids")
    return grid


def combine(coeffs: Sequence[float], fields: Sequence[Field]) -> Field:
    """Pointwise linear combination sum_i c_i f_i."""
    if len(fields) == 0 or len(coeffs) == 0:
        raise GridError("combine requires nonempty coefficient and field lists")
    if len(coeffs) != len(fields):
        raise GridError("combine requires equally long coefficient and field lists")
    grid = _check_same_grid(*fields)
    acc = np.zeros(grid.shape)
    for c, f in zip(coeffs, fields):
        acc += c * f.values
    return Field(grid, acc)


def multiply(f: Field, g: Field) -> Field:
    """Pointwise product of two fields."""
    grid = _check_same_grid(f, g)
    return Field(grid, f.values * g.values)


def inner_product(f: Field, g: Field, space: str = "L2") -> float:
    """L2 or H1 (Sobolev) inner product approximating the continuum integral."""
    grid = _check_same_grid(f, g)
    h3 = grid.spacing**3
    if space == "L2":
        return float(h3 * np.vdot(f.values, g.values).real)
    if space != "H1":
        raise ValueError(f"space must be 'L2' or 'H1', got {space!r}")
    n3 = grid.points_per_axis**3
    fh = np.fft.rfftn(f.values)
    gh = fh if g is f else np.fft.rfftn(g.values)
    w = grid.rfft_mode_weights * (1.0 + grid.k_squared_rfft)
    return float(h3 / n3 * np.sum(w * (np.conj(fh) * gh).real))


def apply_kernel(f: Field, kernel: KernelSpec) -> Field:
    """Apply a Fourier-multiplier kernel; exact on the discrete mode lattice."""
    grid = f.grid
    sym = kernel.symbol(grid.k_squared_rfft, grid)
    values = np.fft.irfftn(np.fft.rfftn(f.values) * sym, s=grid.shape, axes=(0, 1, 2))
    return Field(grid, values)


def dump_orbital(f: Field, path: str | Path, index: int = 0) -> None:
    """Write raw little-endian float64 samples (x-fastest) plus a text header."""
    path = Path(path)
    # values[ix, iy, iz] in C order is z-fastest; transpose so x varies fastest
    raw = np.ascontiguousarray(f.values.transpose(2, 1, 0)).astype("<f8")
    path.write_bytes(raw.tobytes())
    header = path.with_suffix(path.suffix + ".hdr")
    header.write_text(
        f"box_length = {f.grid.box_length!r}\n"
        f"points_per_axis = {f.grid.points_per_axis}\n"
        f"orbital_index = {index}\n"
        "byte_order = little-endian\n"
        "sample_order = x-fastest\n"
    )


def load_orbital(grid: Grid, path: str | Path) -> Field:
    """Read a field previously written by dump_orbital."""
    raw = np.frombuffer(Path(path).read_bytes(), dtype="<f8")
    n = grid.points_per_axis
    if raw.size != n**3:
        raise GridError(f"orbital file holds {raw.size} samples, expected {n**3}")
    values = raw.reshape(n, n, n).transpose(2, 1, 0)
    return Field(grid, values)
