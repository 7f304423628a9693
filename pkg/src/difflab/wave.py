"""Radial damped wave equation ``u_tt - Delta u + a u_t = 0`` with Dirichlet walls.

Semi-implicit leapfrog: explicit Laplacian, time-centred damping, so each step
is a pointwise update.  The discrete energy

    E^{n+1/2} = |D_+ u^n|_w^2 + B(u^{n+1}, u^n)

(``w`` the symmetriser weights, ``B`` the edge form of ``-Delta_h``) obeys
``E^{n+1/2} - E^{n-1/2} = -2 dt sum w a (D_0 u^n)^2`` exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .coefficients import DampingProfile
from .grid import RadialGrid, laplacian_coefficients, radial_laplacian, sphere_area, symmetrizer_weights

CFL = 0.5
SUPPORT_TOL = 1e-12


def bump(s):
    """``exp(-1/(1-s^2))`` on ``|s| < 1``, zero elsewhere."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1
    out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    return out


@dataclass
class CauchyData:
    u0: np.ndarray
    u1: np.ndarray
    R0: float

    @classmethod
    def canonical(cls, grid: RadialGrid, R0: float = 3.0, amplitude: float = 1.0,
                  velocity: float = 0.0) -> "CauchyData":
        """Bump data supported in ``[r_min, R0]``: ``u0 = amplitude*bump``, ``u1 = velocity*bump``."""
        if not R0 > grid.r_min:
            raise ValueError("R0 must exceed r_min")
        w = 0.5 * (R0 - grid.r_min)
        shape = bump((grid.r - grid.r_min - w) / w)
        return cls(amplitude * shape, velocity * shape, R0)

    def scaled(self, c: float) -> "CauchyData":
        return CauchyData(c * self.u0, c * self.u1, self.R0)


@dataclass
class WaveState:
    grid: RadialGrid
    t: float
    u: np.ndarray
    u_prev: np.ndarray
    dt: float


@dataclass
class WaveSample:
    """Solution and its first two time derivatives at one sampled step."""

    t: float
    u: np.ndarray
    u_t: np.ndarray
    u_tt: np.ndarray
    energy: float          # discrete conserved/dissipated energy at t + dt/2
    support_ratio: float

    def derivative(self, k: int) -> np.ndarray:
        return (self.u, self.u_t, self.u_tt)[k]


@dataclass
class WaveRun:
    grid: RadialGrid
    dt: float
    samples: list
    max_support_ratio: float
    energies: np.ndarray = field(repr=False)     # energy after every step
    dissipation: np.ndarray = field(repr=False)  # 2 dt sum w a (D0 u)^2 at every step

    @property
    def support_ok(self) -> bool:
        return self.max_support_ratio <= SUPPORT_TOL


class WaveStepper:
    def __init__(self, grid: RadialGrid, profile: DampingProfile, dt: float):
        if not 0 < dt <= CFL * grid.dr * (1 + 1e-12):
            raise ValueError(f"CFL violated: dt={dt} > {CFL}*dr={CFL * grid.dr}")
        self.grid, self.profile, self.dt = grid, profile, dt
        self.a = profile.on(grid)
        self.half_damp = 0.5 * dt * self.a
        self.w = symmetrizer_weights(grid)
        lower, _, upper = laplacian_coefficients(grid)
        edge = np.empty(grid.n - 1)
        edge[:-1] = self.w[1:-1] * lower[1:-1]
        edge[-1] = self.w[-2] * upper[-2]
        self.edge = edge
        self.scale = sphere_area(grid.dim) * grid.dr
        # fused interior update: u_next = cm*u_prev + cl*u[i-1] + cc*u[i] + cu*u[i+1]
        den = 1.0 + self.half_damp[1:-1]
        dt2 = dt**2
        self._cl = dt2 * lower[1:-1] / den
        self._cu = dt2 * upper[1:-1] / den
        self._cc = (2.0 - 2.0 * dt2 / grid.dr**2) / den
        self._cm = -(1.0 - self.half_damp[1:-1]) / den

    def first_step(self, u0: np.ndarray, u1: np.ndarray) -> np.ndarray:
        dt = self.dt
        u = u0 + dt * u1 + 0.5 * dt**2 * (radial_laplacian(self.grid, u0) - self.a * u1)
        u[0] = u[-1] = 0.0
        return u

    def step(self, u: np.ndarray, u_prev: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
        nxt = np.empty_like(u) if out is None else out
        inner = nxt[1:-1]
        np.multiply(self._cm, u_prev[1:-1], out=inner)
        inner += self._cl * u[:-2]
        inner += self._cc * u[1:-1]
        inner += self._cu * u[2:]
        nxt[0] = nxt[-1] = 0.0
        return nxt

    def energy(self, u_new: np.ndarray, u_old: np.ndarray) -> float:
        vel = (u_new - u_old) / self.dt
        return self.scale * (np.dot(self.w, vel**2) + np.dot(self.edge, np.diff(u_new) * np.diff(u_old)))

    def dissipation(self, u_next: np.ndarray, u_prev: np.ndarray) -> float:
        d0 = (u_next - u_prev) / (2 * self.dt)
        return self.scale * 2 * self.dt * np.dot(self.w * self.a, d0**2)


def wave_step(state: WaveState, profile: DampingProfile) -> WaveState:
    st = WaveStepper(state.grid, profile, state.dt)
    return WaveState(state.grid, state.t + state.dt, st.step(state.u, state.u_prev), state.u.copy(), state.dt)


def support_ratio(grid: RadialGrid, u: np.ndarray, R0: float, t: float) -> float:
    """Fraction of ``int u^2 dx`` lying beyond ``R0 + t + 2 dr``."""
    w = grid.r ** (grid.dim - 1) * u**2
    total = w.sum()
    if total == 0:
        return 0.0
    return float(w[grid.r > R0 + t + 2 * grid.dr].sum() / total)


def default_dt(grid: RadialGrid) -> float:
    return CFL * grid.dr


@njit(cache=True)
def _advance(u_prev, u, spare, cm, cl, cc, cu, nsteps, r_pow, r_first, dr, cone0, dt, n0,
             w, edge, wa, scale, energies, dissip):
    """Advance ``nsteps`` leapfrog steps; returns ``(worst support ratio, u_prev, u, spare)``.

    Buffers rotate as (u_prev, u, spare).  ``energies``/``dissip`` have length
    ``nsteps`` or 0 (no tracking).  The support monitor is fused into the update.
    Nodes beyond the numerical domain of dependence (one node per step past the
    last nonzero entry) are exactly zero and are skipped.
    """
    n = u.shape[0]
    worst = 0.0
    track = energies.shape[0] > 0
    front = 0
    for i in range(n - 1, -1, -1):
        if u[i] != 0.0 or u_prev[i] != 0.0:
            front = i
            break
    for k in range(nsteps):
        front = min(front + 1, n - 2)
        cone = cone0 + (n0 + k + 1) * dt
        # first node strictly beyond the cone
        j0 = int(np.floor((cone - r_first) / dr)) + 1
        j0 = max(1, min(j0, front + 1))
        tot = 0.0
        for i in range(1, j0):
            v = cm[i - 1] * u_prev[i] + cl[i - 1] * u[i - 1] + cc[i - 1] * u[i] + cu[i - 1] * u[i + 1]
            spare[i] = v
            tot += r_pow[i] * v * v
        out = 0.0
        for i in range(j0, front + 1):
            v = cm[i - 1] * u_prev[i] + cl[i - 1] * u[i - 1] + cc[i - 1] * u[i] + cu[i - 1] * u[i + 1]
            spare[i] = v
            out += r_pow[i] * v * v
        spare[0] = 0.0
        spare[n - 1] = 0.0
        tot += out
        if tot > 0.0 and out / tot > worst:
            worst = out / tot
        if track:
            e = 0.0
            d = 0.0
            for i in range(n):
                vel = (spare[i] - u[i]) / dt
                e += w[i] * vel * vel
                d0 = (spare[i] - u_prev[i]) / (2.0 * dt)
                d += wa[i] * d0 * d0
            for i in range(n - 1):
                e += edge[i] * (spare[i + 1] - spare[i]) * (u[i + 1] - u[i])
            energies[k] = scale * e
            dissip[k] = scale * 2.0 * dt * d
        tmp = u_prev
        u_prev = u
        u = spare
        spare = tmp
    return worst, u_prev, u, spare


def run_wave(data: CauchyData, profile: DampingProfile, grid: RadialGrid, T: float,
             dt: float | None = None, sample_times=(), track_energy: bool = False) -> WaveRun:
    """Integrate to ``T`` and record samples at the steps nearest ``sample_times``.

    Sample times are snapped to the time grid ``n*dt``; ``u_t`` and ``u_tt`` use
    the centred three-level differences around the sampled level.  The support
    monitor runs after every step.  With ``track_energy`` the discrete energy and
    the per-step dissipation are kept for every step.
    """
    dt = default_dt(grid) if dt is None else dt
    if grid.r_max <= data.R0 + T:
        raise ValueError(f"r_max={grid.r_max} must exceed R0 + T = {data.R0 + T}")
    st = WaveStepper(grid, profile, dt)
    nsteps = int(round(T / dt))
    wanted = sorted({int(round(t / dt)) for t in sample_times if 0 <= t <= T + 1e-12})
    u_prev = np.array(data.u0, dtype=float)
    u_prev[0] = u_prev[-1] = 0.0
    u1 = np.asarray(data.u1, dtype=float)
    u = st.first_step(u_prev, u1)
    # level -1 from the centred first-derivative condition, so samples at t = 0 work
    u_back = u - 2 * dt * u1
    u_back[0] = u_back[-1] = 0.0

    r_pow = grid.r ** (grid.dim - 1)
    cone0 = data.R0 + 2 * grid.dr
    wa = st.w * st.a
    # energies[m] = E^{m+1/2}; dissip[m] = E^{m-1/2} - E^{m+1/2} predicted by the scheme
    energies = np.empty(nsteps if track_energy else 0)
    dissip = np.zeros(nsteps if track_energy else 0)
    if track_energy:
        energies[0] = st.energy(u, u_prev)
    samples = []
    worst = max(support_ratio(grid, u_prev, data.R0, 0.0), support_ratio(grid, u, data.R0, dt))
    spare = np.zeros_like(u)
    empty = np.empty(0)

    def record(n, u_m, u_0, u_p):
        t = n * dt
        samples.append(WaveSample(t, u_0.copy(), (u_p - u_m) / (2 * dt), (u_p - 2 * u_0 + u_m) / dt**2,
                                  st.energy(u_p, u_0), support_ratio(grid, u_0, data.R0, t)))

    wanted_zero = bool(wanted) and wanted[0] == 0
    if wanted_zero:
        record(0, u_back, u_prev, u)
        wanted = wanted[1:]
    level = 0  # index of u_prev; u is level + 1
    for target in wanted + [nsteps]:
        # bring u_prev to level target - 1 so (u_prev, u, next) straddle the sample
        todo = target - 1 - level
        if todo > 0:
            e = energies[level + 1: level + 1 + todo] if track_energy else empty
            d = dissip[level + 1: level + 1 + todo] if track_energy else empty
            w_, u_prev, u, spare = _advance(u_prev, u, spare, st._cm, st._cl, st._cc, st._cu, todo, r_pow,
                                            grid.r_min, grid.dr, cone0, dt, level + 1, st.w, st.edge, wa, st.scale, e, d)
            worst = max(worst, w_)
            level += todo
        if len(samples) < len(wanted) + (1 if wanted_zero else 0):
            nxt = st.step(u, u_prev)
            record(target, u_prev, u, nxt)
    return WaveRun(grid, dt, samples, worst, energies, dissip)


def dalembert_radial3(u0_fn, r, t: float, r_min: float):
    """Exact undamped N=3 radial solution with ``u1 = 0`` and Dirichlet at ``r_min``.

    ``w = r u`` solves the 1-D wave equation on ``r > r_min`` with ``w(r_min) = 0``;
    the data is continued oddly across ``r_min``.
    """
    def w0(s):
        s = np.asarray(s, dtype=float)
        refl = 2 * r_min - s
        return np.where(s >= r_min, s * u0_fn(s), -refl * u0_fn(refl))

    r = np.asarray(r, dtype=float)
    return 0.5 * (w0(r - t) + w0(r + t)) / r
