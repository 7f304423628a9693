"""Uniform radial grids, the radial Laplacian and weighted quadrature.

Fields are plain 1-D numpy arrays living on the nodes of a :class:`RadialGrid`.
Node 0 is the obstacle boundary ``|x| = r_min`` and carries the homogeneous
Dirichlet condition; the far node ``r_max`` is an artificial Dirichlet wall.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gamma, pi

import numpy as np


def sphere_area(dim: int) -> float:
    """Surface area of the unit sphere in ``R^dim`` (2*pi for dim=2, 4*pi for dim=3)."""
    return 2.0 * pi ** (dim / 2) / gamma(dim / 2)


@dataclass(frozen=True)
class RadialGrid:
    r_min: float
    r_max: float
    n: int
    dim: int
    nodes: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.r_min > 0:
            raise ValueError(f"r_min must be positive (a(x) is singular at the origin), got {self.r_min}")
        if not self.r_max > self.r_min:
            raise ValueError(f"empty interval [{self.r_min}, {self.r_max}]")
        if self.n < 8:
            raise ValueError(f"need at least 8 nodes, got {self.n}")
        if self.dim < 2:
            raise ValueError(f"dimension must be >= 2, got {self.dim}")
        nodes = self.r_min + self.dr * np.arange(self.n)
        nodes[-1] = self.r_max
        nodes.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)

    @property
    def dr(self) -> float:
        return (self.r_max - self.r_min) / (self.n - 1)

    @property
    def r(self) -> np.ndarray:
        return self.nodes

    def zeros(self) -> np.ndarray:
        return np.zeros(self.n)

    def refined(self) -> "RadialGrid":
        """Same interval with the spacing halved."""
        return RadialGrid(self.r_min, self.r_max, 2 * self.n - 1, self.dim)


def build_grid(r_min: float, r_max: float, n: int, dim: int) -> RadialGrid:
    return RadialGrid(float(r_min), float(r_max), int(n), int(dim))


def grid_with_spacing(r_min: float, r_max: float, dr: float, dim: int) -> RadialGrid:
    """Grid whose spacing is at most ``dr`` (``r_max`` is kept exactly)."""
    n = int(np.ceil((r_max - r_min) / dr - 1e-9)) + 1
    return build_grid(r_min, r_max, max(n, 8), dim)


def _check(grid: RadialGrid, f: np.ndarray) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape != (grid.n,):
        raise ValueError(f"field shape {f.shape} does not match grid with {grid.n} nodes")
    return f


def laplacian_coefficients(grid: RadialGrid) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Stencil weights ``(lower, centre, upper)`` of the radial Laplacian per node.

    Row i reads ``lower[i]*f[i-1] + centre[i]*f[i] + upper[i]*f[i+1]``.  The two
    boundary rows are zero (Dirichlet nodes carry no equation).
    """
    r, dr = grid.r, grid.dr
    drift = (grid.dim - 1) / (2.0 * r * dr)
    lower = 1.0 / dr**2 - drift
    upper = 1.0 / dr**2 + drift
    centre = np.full(grid.n, -2.0 / dr**2)
    for c in (lower, centre, upper):
        c[0] = c[-1] = 0.0
    return lower, centre, upper


def radial_laplacian(grid: RadialGrid, f: np.ndarray) -> np.ndarray:
    """Centred second-order approximation of ``f'' + (N-1)/r f'``.

    Interior nodes only; both boundary entries of the result are zero.
    """
    f = _check(grid, f)
    r, dr = grid.r[1:-1], grid.dr
    out = np.zeros_like(f)
    out[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / dr**2 + (grid.dim - 1) / r * (f[2:] - f[:-2]) / (2.0 * dr)
    return out


def radial_gradient(grid: RadialGrid, f: np.ndarray) -> np.ndarray:
    """``df/dr`` by centred differences, one-sided second order at the ends."""
    return np.gradient(_check(grid, f), grid.dr, edge_order=2)


def symmetrizer_weights(grid: RadialGrid) -> np.ndarray:
    """Node weights ``w`` making the discrete Laplacian symmetric: ``w_i upper_i = w_{i+1} lower_{i+1}``.

    Normalised so ``w_0 = r_min**(N-1)``; ``w_i = r_i**(N-1) (1 + O(dr**2))``.
    Requires ``dr < 2 r_min / (N-1)`` so every off-diagonal weight is positive.
    """
    lower, _, upper = laplacian_coefficients(grid)
    if np.any(lower[1:-1] <= 0):
        raise ValueError("grid too coarse: lower stencil weight not positive")
    ratio = np.ones(grid.n)
    # interior recursion; the end nodes only enter through Dirichlet zeros
    ratio[1:-1] = np.r_[grid.r[1] ** (grid.dim - 1) / grid.r[0] ** (grid.dim - 1), upper[1:-2] / lower[2:-1]]
    ratio[-1] = (grid.r[-1] / grid.r[-2]) ** (grid.dim - 1)
    return grid.r_min ** (grid.dim - 1) * np.cumprod(ratio)


def trapezoid_weights(grid: RadialGrid) -> np.ndarray:
    """Quadrature weights of ``omega_N r^{N-1} dr`` on the nodes (composite trapezoid)."""
    w = np.full(grid.n, grid.dr)
    w[0] = w[-1] = 0.5 * grid.dr
    return sphere_area(grid.dim) * grid.r ** (grid.dim - 1) * w


def weighted_integral(grid: RadialGrid, f: np.ndarray, w: np.ndarray | float = 1.0) -> float:
    """``int_Omega f w dx`` for radial ``f`` and ``w``."""
    f = _check(grid, f)
    return float(np.dot(trapezoid_weights(grid), f * w))


def norm_dmu(grid: RadialGrid, f: np.ndarray, a, p: int = 2) -> float:
    """Norm of ``f`` in ``L^p(a dx)``; ``a`` is a damping profile or its nodal values."""
    if p not in (1, 2):
        raise ValueError("p must be 1 or 2")
    weight = a.on(grid) if hasattr(a, "on") else np.asarray(a, dtype=float)
    val = weighted_integral(grid, np.abs(_check(grid, f)) ** p, weight)
    return val ** (1.0 / p)
