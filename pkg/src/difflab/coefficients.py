"""Damping coefficient, its Poisson potential and the exponential weight.

The damping is radial, ``a(r) = a0 r^{-alpha} (1 + delta/r)`` (``delta = 0`` is the
pure power law).  ``A0`` solves ``Delta A0 = a`` in the whole space, with ``a``
continued inside the obstacle by the power law ``a(r_min) (r/r_min)^{-alpha}``,
and ``A = A0 + c0`` is shifted until ``|A'|^2 / (a A) <= h_a + eps_shift`` on the grid.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import RadialGrid

PURE_POWER = "pure_power"
PERTURBED_POWER = "perturbed_power"


@dataclass(frozen=True)
class DampingProfile:
    kind: str = PURE_POWER
    a0: float = 1.0
    alpha: float = 0.0
    delta: float = 0.0
    r_min: float = 1.0

    def __post_init__(self):
        if self.kind not in (PURE_POWER, PERTURBED_POWER):
            raise ValueError(f"unknown damping kind {self.kind!r}")
        if self.a0 < 0:
            raise ValueError("a0 must be nonnegative (0 only for undamped reference runs)")
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha}")
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")
        if self.kind == PURE_POWER and self.delta != 0:
            raise ValueError("pure_power profile takes delta = 0")
        if not self.r_min > 0:
            raise ValueError("r_min must be positive")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < self.r_min * (1 - 1e-12)):
            raise ValueError(f"damping evaluated inside the obstacle (r < {self.r_min})")
        return self.a0 * r ** (-self.alpha) * (1.0 + self.delta / r)

    def on(self, grid: RadialGrid) -> np.ndarray:
        return self(grid.r)

    def sandwich_bounds(self, grid: RadialGrid) -> tuple[float, float]:
        """Constants ``(a1, a2)`` with ``a1 (1+r)^-alpha <= a(r) <= a2 (1+r)^-alpha`` on the grid."""
        q = self.on(grid) * (1.0 + grid.r) ** self.alpha
        return float(q.min()), float(q.max())

    def power_bound(self, grid: RadialGrid) -> float:
        """Largest ``c0 in (0, 1)`` with ``c0 r^-alpha <= a(r) <= r^-alpha / c0`` on the grid."""
        q = self.on(grid) * grid.r**self.alpha
        return float(min(q.min(), 1.0 / q.max(), 0.999))


def damping_eval(profile: DampingProfile, r):
    return profile(r)


def h_a(alpha: float, dim: int) -> float:
    """Asymptotic value of ``|A0'|^2 / (a A0)`` for power-like damping."""
    return (2.0 - alpha) / (dim - alpha)


@dataclass(frozen=True)
class PotentialA:
    """``A = A0 + c0`` with closed-form ``A0`` for the two damping kinds."""

    profile: DampingProfile
    dim: int
    c0: float
    h_a: float
    eps_shift: float

    def _terms(self):
        p, N = self.profile, self.dim
        a0, al, d, r0 = p.a0, p.alpha, p.delta, p.r_min
        # A0'(r) r^{N-1} = k + a0 r^{N-al}/(N-al) + a0 d r^{N-1-al}/(N-1-al) for r >= r0
        a_r0 = a0 * r0 ** (-al) * (1 + d / r0)
        k = (a_r0 * r0**N - a0 * r0 ** (N - al)) / (N - al) - a0 * d * r0 ** (N - 1 - al) / (N - 1 - al)
        return a0, al, d, r0, a_r0, k

    def base(self, r):
        """``A0(r)`` (no shift), normalised by ``A0(0) = 0`` for the continued coefficient."""
        r = np.asarray(r, dtype=float)
        N = self.dim
        a0, al, d, r0, a_r0, k = self._terms()

        def outer(s):
            out = a0 * s ** (2 - al) / ((N - al) * (2 - al))
            if d:
                out = out + a0 * d * s ** (1 - al) / ((N - 1 - al) * (1 - al))
            if k:
                out = out + k * (np.log(s) if N == 2 else s ** (2 - N) / (2 - N))
            return out

        at_r0 = a_r0 * r0**2 / ((N - al) * (2 - al))
        return at_r0 + outer(r) - outer(r0)

    def __call__(self, r):
        return self.base(r) + self.c0

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        N = self.dim
        a0, al, d, r0, a_r0, k = self._terms()
        flux = k + a0 * r ** (N - al) / (N - al)
        if d:
            flux = flux + a0 * d * r ** (N - 1 - al) / (N - 1 - al)
        return flux * r ** (1 - N)

    def ratio(self, r):
        """``|A'|^2 / (a A)``."""
        return self.derivative(r) ** 2 / (self.profile(r) * self(r))


def potential_build(profile: DampingProfile, grid: RadialGrid, dim: int | None = None,
                    eps_shift: float = 0.05) -> PotentialA:
    """Poisson potential with the smallest shift ``c0`` in ``{0, 1, 2, 4, ...}`` meeting the ratio bound."""
    dim = grid.dim if dim is None else dim
    if dim <= profile.alpha:
        raise ValueError("need N > alpha")
    ha = h_a(profile.alpha, dim)
    c0 = 0.0
    while c0 <= 2.0**64:
        pot = PotentialA(profile, dim, c0, ha, eps_shift)
        if np.max(pot.ratio(grid.r)) <= ha + eps_shift:
            return pot
        c0 = 1.0 if c0 == 0 else 2 * c0
    raise ValueError("no admissible shift c0 <= 2**64: damping profile is inadmissible")


@dataclass(frozen=True)
class WeightParams:
    """Weight ``Phi(x, t) = exp(beta A(x) / (1 + t))``."""

    potential: PotentialA
    beta: float

    def __post_init__(self):
        limit = 1.0 / (self.potential.h_a + 2 * self.potential.eps_shift)
        if not 0 <= self.beta < limit:
            raise ValueError(f"beta={self.beta} outside the admissible range [0, {limit})")

    @classmethod
    def default(cls, potential: PotentialA) -> "WeightParams":
        return cls(potential, 0.9 / (potential.h_a + 2 * potential.eps_shift))

    def log_phi(self, r, t: float):
        if t < 0:
            raise ValueError("t must be nonnegative")
        return self.beta * self.potential(r) / (1.0 + t)

    def phi(self, r, t: float):
        return np.exp(self.log_phi(r, t))

    def derivatives(self, r, t: float):
        """``(d/dt Phi, dPhi/dr, Delta Phi)`` from the closed forms."""
        A, dA = self.potential(r), self.potential.derivative(r)
        a = self.potential.profile(r)
        phi = self.phi(r, t)
        s = 1.0 + t
        dt_phi = -self.beta * A / s**2 * phi
        dr_phi = self.beta * dA / s * phi
        lap_phi = (self.beta * a / s + (self.beta * dA / s) ** 2) * phi
        return dt_phi, dr_phi, lap_phi


def weight_phi(weight: WeightParams, r, t: float):
    return weight.phi(r, t)


def weight_derivatives(weight: WeightParams, r, t: float):
    return weight.derivatives(r, t)
