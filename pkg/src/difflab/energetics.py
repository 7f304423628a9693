"""Weighted energy functionals, the weighted Hardy inequality and the embedding ratio.

All weights ``Phi`` are applied in log space: an integrand ``Phi * f`` is
evaluated as ``sign(f) * exp(log Phi + log|f|)``, so nodes where the field
vanishes contribute exactly zero however large ``Phi`` is there.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coefficients import DampingProfile, WeightParams
from .grid import RadialGrid, norm_dmu, radial_gradient, weighted_integral


@dataclass
class EnergyRecord:
    t: float
    E1: float
    E2: float
    F: float
    weighted_u_sq: tuple   # int Phi a |d_t^k u|^2 dx, k = 0, 1, 2
    grad_sq: tuple         # int Phi |d_t^k u_r|^2 dx, k = 0, 1, 2


def _weighted(log_phi: np.ndarray, f: np.ndarray) -> np.ndarray:
    out = np.zeros_like(f)
    nz = f != 0
    out[nz] = np.sign(f[nz]) * np.exp(log_phi[nz] + np.log(np.abs(f[nz])))
    return out


def weighted_quadrature(grid: RadialGrid, log_phi: np.ndarray, f: np.ndarray) -> float:
    val = weighted_integral(grid, _weighted(log_phi, f))
    if not np.isfinite(val):
        raise FloatingPointError("weighted integral is not finite (weight blow-up: beta too large?)")
    return val


def energy_record(sample, weight: WeightParams | None, grid: RadialGrid) -> EnergyRecord:
    """Weighted functionals of one wave sample; ``weight=None`` means ``Phi = 1``."""
    t = sample.t
    if weight is None:
        log_phi = np.zeros(grid.n)
        A = np.zeros(grid.n)
        a = None
    else:
        log_phi = weight.log_phi(grid.r, t)
        A = weight.potential(grid.r)
        a = weight.potential.profile.on(grid)
    if a is None:
        raise ValueError("energy_record needs a damping profile; use plain_energy_record for Phi = 1")
    return _record(grid, t, log_phi, A, a, sample)


def plain_energy_record(sample, profile: DampingProfile, grid: RadialGrid) -> EnergyRecord:
    """Energy record with ``Phi = 1`` (and the ``A`` term of ``F`` dropped)."""
    return _record(grid, sample.t, np.zeros(grid.n), np.zeros(grid.n), profile.on(grid), sample)


def _record(grid, t, log_phi, A, a, sample) -> EnergyRecord:
    q = lambda f: weighted_quadrature(grid, log_phi, f)
    u, ut = sample.u, sample.u_t
    ur = radial_gradient(grid, u)
    E1 = q(ur**2 + ut**2)
    E2 = q(2 * u * ut + a * u**2)
    F = q((a + A / (1 + t) ** 2) * ut**2)
    derivs = [sample.derivative(k) for k in range(3)]
    wk = tuple(q(a * d**2) for d in derivs)
    gk = tuple(q(radial_gradient(grid, d) ** 2) for d in derivs)
    return EnergyRecord(t, E1, E2, F, wk, gk)


def hardy_check(u: np.ndarray, t: float, weight: WeightParams, grid: RadialGrid) -> float:
    """Ratio of ``beta/(1+t) int a u^2 Phi`` to ``int |u_r|^2 Phi`` (0 for ``u = 0``)."""
    u = np.asarray(u, dtype=float)
    if abs(u[0]) > 0 or abs(u[-1]) > 0:
        raise ValueError("trial function must vanish at both ends of the grid")
    log_phi = weight.log_phi(grid.r, t)
    a = weight.potential.profile.on(grid)
    lhs = weight.beta / (1 + t) * weighted_quadrature(grid, log_phi, a * u**2)
    rhs = weighted_quadrature(grid, log_phi, radial_gradient(grid, u) ** 2)
    if rhs == 0:
        return 0.0
    return lhs / rhs


def critical_exponent(dim: int, alpha: float) -> float:
    """``q* = 2 (N - alpha) / (N - 2)`` for ``N >= 3``."""
    if dim < 3:
        raise ValueError("critical exponent needs N >= 3")
    return 2 * (dim - alpha) / (dim - 2)


def embedding_check(u: np.ndarray, profile: DampingProfile, grid: RadialGrid, q: float = 4.0) -> float:
    """Ratio bounded by the weighted Sobolev embedding.

    ``N >= 3``: ``||u||_{L^{q*}(dmu)} / ||u_r||_{L^2}``.  ``N = 2``:
    ``||u||_{L^q(dmu)} / (||u_r||^{1-2/q} ||u||_{L^2(dmu)}^{2/q})`` with the given ``q > 2``.
    """
    u = np.asarray(u, dtype=float)
    a = profile.on(grid)
    grad = np.sqrt(weighted_integral(grid, radial_gradient(grid, u) ** 2))
    if grad == 0:
        return 0.0
    if grid.dim >= 3:
        qs = critical_exponent(grid.dim, profile.alpha)
        return weighted_integral(grid, np.abs(u) ** qs, a) ** (1 / qs) / grad
    if not q > 2:
        raise ValueError("q must exceed 2")
    lq = weighted_integral(grid, np.abs(u) ** q, a) ** (1 / q)
    l2 = norm_dmu(grid, u, a, 2)
    return lq / (grad ** (1 - 2 / q) * l2 ** (2 / q))


def diffusion_difference(u: np.ndarray, v: np.ndarray, profile: DampingProfile, grid: RadialGrid) -> float:
    """``|| sqrt(a) (u - v) ||_{L^2}``."""
    return norm_dmu(grid, np.asarray(u) - np.asarray(v), profile, 2)
