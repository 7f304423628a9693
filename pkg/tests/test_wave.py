import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import eig

from difflab.coefficients import PERTURBED_POWER, DampingProfile
from difflab.grid import build_grid, grid_with_spacing, laplacian_coefficients, norm_dmu
from difflab.wave import (CFL, CauchyData, WaveState, WaveStepper, bump, dalembert_radial3, run_wave,
                          support_ratio, wave_step)


def _grid(T, R0=3.0, dr=0.02, dim=3):
    return grid_with_spacing(1.0, R0 + T + 1.0, dr, dim)


def test_bump_support_and_canonical_data():
    s = np.linspace(-1.5, 1.5, 301)
    b = bump(s)
    assert np.all(b[np.abs(s) >= 1] == 0) and b.max() == pytest.approx(np.exp(-1))
    g = _grid(1.0)
    d = CauchyData.canonical(g, R0=3.0, amplitude=2.0, velocity=0.5)
    assert np.all(d.u0[g.r >= 3.0] == 0) and d.u0[0] == 0
    np.testing.assert_allclose(d.u1, 0.25 * d.u0)
    with pytest.raises(ValueError):
        CauchyData.canonical(g, R0=0.5)


def test_cfl_and_domain_checks():
    g = _grid(5.0)
    with pytest.raises(ValueError):
        WaveStepper(g, DampingProfile(), 0.6 * g.dr)
    d = CauchyData.canonical(g)
    with pytest.raises(ValueError):
        run_wave(d, DampingProfile(), g, 10.0)


def test_zero_time_returns_data():
    g = _grid(1.0)
    d = CauchyData.canonical(g, velocity=1.0)
    run = run_wave(d, DampingProfile(), g, 0.0, sample_times=[0.0])
    assert len(run.samples) == 1
    np.testing.assert_array_equal(run.samples[0].u, d.u0)
    np.testing.assert_allclose(run.samples[0].u_t, d.u1, atol=1e-4)


def test_zero_solution():
    g = _grid(3.0)
    d = CauchyData(g.zeros(), g.zeros(), 3.0)
    run = run_wave(d, DampingProfile(), g, 3.0, sample_times=[1.0, 3.0], track_energy=True)
    assert all(np.all(s.u == 0) for s in run.samples)
    assert np.all(run.energies == 0) and run.max_support_ratio == 0


def test_sample_times_snap_to_steps():
    g = _grid(2.0)
    run = run_wave(CauchyData.canonical(g), DampingProfile(), g, 2.0, sample_times=[0.5, 1.0, 2.0])
    dt = CFL * g.dr
    assert [s.t for s in run.samples] == [round(t / dt) * dt for t in (0.5, 1.0, 2.0)]
    for s in run.samples:
        assert s.derivative(0) is s.u and s.derivative(2) is s.u_tt


def test_single_step_matches_run():
    g = _grid(1.0)
    prof = DampingProfile(alpha=0.5)
    d = CauchyData.canonical(g, velocity=1.0)
    st_ = WaveStepper(g, prof, CFL * g.dr)
    u1 = st_.first_step(d.u0, d.u1)
    state = wave_step(WaveState(g, st_.dt, u1, d.u0.copy(), st_.dt), prof)
    run = run_wave(d, prof, g, 1.0, sample_times=[2 * st_.dt])
    np.testing.assert_allclose(state.u, run.samples[0].u, atol=1e-15)


def test_undamped_energy_conserved():
    g = _grid(10.0)
    run = run_wave(CauchyData.canonical(g, velocity=1.0), DampingProfile(a0=0.0), g, 10.0, track_energy=True)
    e = run.energies
    assert np.max(np.abs(e - e[0])) / e[0] <= 1e-6


@pytest.mark.parametrize("prof", [DampingProfile(), DampingProfile(alpha=0.5),
                                  DampingProfile(PERTURBED_POWER, alpha=0.5, delta=1.0)])
def test_damped_energy_identity(prof):
    g = _grid(10.0)
    run = run_wave(CauchyData.canonical(g, velocity=1.0), prof, g, 10.0, track_energy=True)
    e, d = run.energies, run.dissipation
    assert np.all(np.diff(e) < 0)
    # scheme identity: E^{m-1/2} - E^{m+1/2} equals the discrete dissipation exactly
    np.testing.assert_allclose(e[:-1] - e[1:], d[1:], rtol=1e-9, atol=1e-15 * e[0])


@pytest.mark.parametrize("dim", [2, 3])
def test_dissipation_matches_continuum_rate(dim):
    """Per-step energy loss divided by dt against 2 int a u_t^2 dx with the centred u_t.

    For N = 2 and 3 the symmetrizer weights equal r^{N-1} exactly, so the two
    agree to rounding at every resolution.
    """
    prof = DampingProfile(alpha=0.5)
    errs = []
    for dr in (0.04, 0.02, 0.01):
        g = _grid(2.0, dr=dr, dim=dim)
        run = run_wave(CauchyData.canonical(g, velocity=1.0), prof, g, 2.5, sample_times=[2.0],
                       track_energy=True)
        s = run.samples[-1]
        m = int(round(s.t / run.dt))
        # energies[m] sits at t_m + dt/2, so the centred difference is located at t_m
        rate = (run.energies[m - 1] - run.energies[m]) / run.dt
        exact = 2 * norm_dmu(g, s.u_t, prof) ** 2
        errs.append(abs(rate - exact) / exact)
    assert max(errs) < 1e-10


def test_dalembert_oracle_second_order():
    centre, width, T = 5.0, 3.0, 4.0
    u0_fn = lambda s: bump((s - centre) / width)
    errs = []
    for dr in (0.01, 0.005, 0.0025):
        g = grid_with_spacing(1.0, centre + width + T + 1.0, dr, 3)
        run = run_wave(CauchyData(u0_fn(g.r), g.zeros(), centre + width), DampingProfile(a0=0.0), g, T,
                       sample_times=[T])
        s = run.samples[-1]
        errs.append(np.max(np.abs(s.u - dalembert_radial3(u0_fn, g.r, s.t, 1.0))))
    orders = np.log2(np.array(errs[:-1]) / errs[1:])
    assert np.all(orders >= 1.9), orders


def test_dalembert_oracle_reflection_sign():
    r = np.linspace(1.0, 3.0, 5)
    u = dalembert_radial3(lambda s: bump((s - 2.0) / 0.5), r, 0.0, 1.0)
    np.testing.assert_allclose(u, bump((r - 2.0) / 0.5))


def test_eigenmode_ode_oracle():
    """Laplacian eigenvector with constant damping follows u'' + a u' + mu u = 0 at second order in dt."""
    g = build_grid(1.0, 4.0, 61, 3)
    lo, c, up = laplacian_coefficients(g)
    M = np.diag(c[1:-1]) + np.diag(up[1:-2], 1) + np.diag(lo[2:-1], -1)
    vals, vecs = eig(M)
    k = np.argmax(vals.real)
    mu = -vals[k].real
    mode = g.zeros()
    mode[1:-1] = vecs[:, k].real
    mode /= np.max(np.abs(mode))
    a, T = 0.7, 2.0
    disc = np.sqrt(mu - a**2 / 4)
    exact = np.exp(-a * T / 2) * (np.cos(disc * T) + a / (2 * disc) * np.sin(disc * T))
    errs = []
    for frac in (0.5, 0.25, 0.125):
        dt = frac * g.dr
        # the mode fills the whole interval, so step directly instead of through the cone-monitored driver
        st_ = WaveStepper(g, DampingProfile(a0=a), dt)
        prev, cur = mode.copy(), st_.first_step(mode, g.zeros())
        for _ in range(int(round(T / dt)) - 1):
            prev, cur = cur, st_.step(cur, prev)
        errs.append(np.max(np.abs(cur - exact * mode)))
    orders = np.log2(np.array(errs[:-1]) / errs[1:])
    assert errs[0] < 1e-3 and np.all(orders > 1.8), (errs, orders)


@pytest.mark.parametrize("prof,dr", [(DampingProfile(), 0.005), (DampingProfile(alpha=0.5), 0.0025)])
def test_finite_propagation(prof, dr):
    g = _grid(20.0, dr=dr)
    run = run_wave(CauchyData.canonical(g, velocity=1.0), prof, g, 20.0, sample_times=[5.0, 20.0])
    assert run.support_ok
    assert all(s.support_ratio <= 1e-12 for s in run.samples)


def test_leak_shrinks_under_refinement():
    leaks = []
    for dr in (0.01, 0.005):
        g = _grid(20.0, dr=dr)
        leaks.append(run_wave(CauchyData.canonical(g, velocity=1.0), DampingProfile(alpha=0.5), g, 20.0)
                     .max_support_ratio)
    assert leaks[1] < leaks[0] / 20


def test_support_ratio_detects_leak():
    g = _grid(2.0)
    u = bump((g.r - 5.0) / 0.5)
    assert support_ratio(g, u, 3.0, 0.0) > 0.9
    assert support_ratio(g, u, 3.0, 5.0) == 0.0


@given(st.floats(-10, 10).filter(lambda c: abs(c) > 1e-3))
def test_linearity(c):
    g = _grid(2.0, dr=0.05)
    prof = DampingProfile(alpha=0.5)
    d = CauchyData.canonical(g, velocity=1.0)
    base = run_wave(d, prof, g, 2.0, sample_times=[1.0, 2.0])
    scaled = run_wave(d.scaled(c), prof, g, 2.0, sample_times=[1.0, 2.0])
    for s0, s1 in zip(base.samples, scaled.samples):
        np.testing.assert_allclose(s1.u, c * s0.u, rtol=1e-12, atol=1e-14 * abs(c))
        np.testing.assert_allclose(s1.u_tt, c * s0.u_tt, rtol=1e-9, atol=1e-9 * abs(c))
