import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st
from scipy.integrate import quad

from difflab.coefficients import (PERTURBED_POWER, PURE_POWER, DampingProfile, PotentialA, WeightParams,
                                  h_a, potential_build)
from difflab.grid import build_grid, radial_laplacian


def test_profile_values():
    p = DampingProfile(PERTURBED_POWER, a0=2.0, alpha=0.5, delta=1.0)
    assert p(4.0) == pytest.approx(2.0 * 0.5 * 1.25)
    with pytest.raises(ValueError):
        p(0.5)


@pytest.mark.parametrize("kwargs", [
    dict(a0=-1.0), dict(alpha=1.0), dict(alpha=-0.1), dict(kind="other"),
    dict(kind=PURE_POWER, delta=1.0), dict(kind=PERTURBED_POWER, delta=-1.0), dict(r_min=0.0),
])
def test_profile_validation(kwargs):
    with pytest.raises(ValueError):
        DampingProfile(**kwargs)


def test_bounds():
    g = build_grid(1.0, 50.0, 200, 3)
    p = DampingProfile(PERTURBED_POWER, alpha=0.5, delta=1.0)
    a1, a2 = p.sandwich_bounds(g)
    q = p.on(g) * (1 + g.r) ** 0.5
    assert a1 <= q.min() + 1e-15 and q.max() <= a2 + 1e-15
    c0 = p.power_bound(g)
    assert np.all(c0 * g.r**-0.5 <= p.on(g) * (1 + 1e-12))
    assert np.all(p.on(g) <= g.r**-0.5 / c0 * (1 + 1e-12))


def test_h_a():
    assert h_a(0.0, 3) == pytest.approx(2 / 3)
    assert h_a(0.5, 3) == pytest.approx(0.6)


def _flux_oracle(profile, dim, r):
    """``r^{N-1} A0'(r)`` by quadrature of the continued coefficient."""
    r0 = profile.r_min
    a_r0 = float(profile(r0))
    inner = quad(lambda s: a_r0 * (s / r0) ** (-profile.alpha) * s ** (dim - 1), 0, min(r, r0))[0]
    if r <= r0:
        return inner
    return inner + quad(lambda s: float(profile(s)) * s ** (dim - 1), r0, r)[0]


CASES = [(PURE_POWER, 0.0, 0.0, 3), (PURE_POWER, 0.5, 0.0, 3), (PURE_POWER, 0.0, 0.0, 2),
         (PERTURBED_POWER, 0.5, 1.0, 3), (PERTURBED_POWER, 0.3, 2.0, 2)]


@pytest.mark.parametrize("kind,alpha,delta,dim", CASES)
def test_potential_against_quadrature(kind, alpha, delta, dim):
    prof = DampingProfile(kind, alpha=alpha, delta=delta)
    pot = PotentialA(prof, dim, 0.0, h_a(alpha, dim), 0.05)
    for r in (1.0, 1.7, 5.0, 40.0):
        assert pot.derivative(r) * r ** (dim - 1) == pytest.approx(_flux_oracle(prof, dim, r), rel=1e-9)
    # A0(r) = int_0^r A0'(s) ds with A0' continued inside by the same quadrature
    r0 = prof.r_min
    inside = quad(lambda s: _flux_oracle(prof, dim, s) * s ** (1 - dim), 1e-12, r0)[0]
    outside = quad(lambda s: float(pot.derivative(s)), r0, 7.0)[0]
    assert pot.base(7.0) == pytest.approx(inside + outside, rel=1e-8)


@pytest.mark.parametrize("kind,alpha,delta,dim", CASES)
def test_potential_solves_poisson(kind, alpha, delta, dim):
    prof = DampingProfile(kind, alpha=alpha, delta=delta)
    errs = []
    for n in (201, 401):
        g = build_grid(1.0, 9.0, n, dim)
        pot = potential_build(prof, g)
        errs.append(np.max(np.abs(radial_laplacian(g, pot(g.r)) - prof.on(g))[1:-1]))
    # alpha = 0 potentials are quadratic plus harmonic terms; rounding dominates there
    assert errs[1] < max(errs[0] / 3.5, 1e-9) and errs[1] < 1e-3


@pytest.mark.parametrize("alpha,dim", [(0.0, 3), (0.5, 3), (0.0, 2)])
def test_pure_power_ratio(alpha, dim):
    g = build_grid(1.0, 400.0, 4000, dim)
    pot = potential_build(DampingProfile(alpha=alpha), g)
    ratio = pot.ratio(g.r)
    assert np.all(ratio <= h_a(alpha, dim) + 0.05)
    assert ratio[-1] == pytest.approx(h_a(alpha, dim), rel=0.01)


def test_perturbed_ratio_needs_no_shift():
    g = build_grid(1.0, 400.0, 4000, 3)
    pot = potential_build(DampingProfile(PERTURBED_POWER, alpha=0.5, delta=1.0), g)
    assert pot.c0 == 0.0
    assert np.max(pot.ratio(g.r)) <= 0.65


def test_shift_search_finds_power_of_two():
    g = build_grid(1.0, 50.0, 500, 3)
    pot = potential_build(DampingProfile(alpha=0.0), g, eps_shift=1e-4)
    assert pot.c0 == 0.0 or np.log2(pot.c0) == int(np.log2(pot.c0))
    assert np.max(pot.ratio(g.r)) <= pot.h_a + 1e-4


def test_weight_beta_range():
    g = build_grid(1.0, 10.0, 100, 3)
    pot = potential_build(DampingProfile(), g)
    limit = 1 / (pot.h_a + 2 * pot.eps_shift)
    assert WeightParams.default(pot).beta == pytest.approx(0.9 * limit)
    for bad in (-0.1, limit, 2 * limit):
        with pytest.raises(ValueError):
            WeightParams(pot, bad)


def test_weight_derivatives_sympy():
    """Closed-form time/space derivatives of the weight against symbolic differentiation."""
    r, t = sp.symbols("r t", positive=True)
    dim, alpha = 3, sp.Rational(1, 2)
    g = build_grid(1.0, 10.0, 100, dim)
    prof = DampingProfile(alpha=0.5)
    pot = potential_build(prof, g)
    w = WeightParams(pot, 0.5)
    # with r0 = a0 = 1 the harmonic term of the potential vanishes
    A = r ** (2 - alpha) / ((dim - alpha) * (2 - alpha)) + sp.Float(pot.c0)
    phi = sp.exp(sp.Rational(1, 2) * A / (1 + t))
    dt = sp.lambdify((r, t), sp.diff(phi, t))
    dr = sp.lambdify((r, t), sp.diff(phi, r))
    lap = sp.lambdify((r, t), sp.diff(phi, r, 2) + (dim - 1) / r * sp.diff(phi, r))
    for rv, tv in [(1.0, 0.0), (2.5, 1.0), (7.0, 10.0)]:
        got = w.derivatives(np.array(rv), tv)
        np.testing.assert_allclose(got, [dt(rv, tv), dr(rv, tv), lap(rv, tv)], rtol=1e-12)


def test_log_phi_rejects_negative_time():
    g = build_grid(1.0, 10.0, 100, 3)
    w = WeightParams.default(potential_build(DampingProfile(), g))
    with pytest.raises(ValueError):
        w.log_phi(g.r, -1.0)


@given(st.floats(0.0, 0.95), st.floats(1.0, 500.0))
def test_potential_increasing_and_positive(alpha, r):
    prof = DampingProfile(alpha=alpha)
    pot = PotentialA(prof, 3, 0.0, h_a(alpha, 3), 0.05)
    assert pot(r) > 0 and pot.derivative(r) > 0
