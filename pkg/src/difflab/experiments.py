"""Experiment drivers: one function per experiment kind, each returning a
:class:`Verdict` plus the per-time rows destined for the CSV file."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .coefficients import PURE_POWER, DampingProfile, WeightParams, potential_build
from .config import ExperimentConfig
from .decay import (TWO_SIDED, UPPER_BOUND, DecaySeries, InsufficientSpanError, expected_exponents,
                    fit_slope, verdict)
from .energetics import energy_record, hardy_check
from .grid import RadialGrid, build_grid, norm_dmu, radial_laplacian
from .heat import Schedule, evolve, heat_domain, optimality_experiment, submarkov_check
from .wave import CauchyData, SUPPORT_TOL, bump, run_wave

CSV_COLUMNS = ("t", "norm_sqrt_a_u_L2", "norm_sqrt_a_v_L2", "diff_L2_dmu", "E1", "E2", "F",
               "wk0", "wk1", "wk2", "gk0", "gk1", "gk2")

HEAT_TOL = 0.05
DIFF_TOL = 0.15
ENERGY_TOL = 0.2
CONTRACTION_TOL = 1e-10
SMOOTHING_TOL = 1.1
HARDY_TOL = 1.02
HARDY_REFINED_TOL = 1.005
SUPPORT_CHECK_DR = 0.0025    # the leapfrog precursor ahead of the cone shrinks like exp(-c/dr^(2/3))


@dataclass
class SeriesVerdict:
    label: str
    slope: float
    tail_slope: float
    expected: float
    mode: str
    tol: float
    passed: bool
    tail_stable: bool
    tail_ok: bool

    @property
    def ok(self) -> bool:
        return self.passed and self.tail_ok


@dataclass
class Verdict:
    ident: str
    experiment: str
    dim: int
    alpha: float
    series: list = field(default_factory=list)
    flags: dict = field(default_factory=dict)      # gating diagnostics, True = raised
    info: dict = field(default_factory=dict)       # reported, never gating
    informational: bool = False
    error: str = ""

    @property
    def passed(self) -> bool:
        return (not self.error and all(s.ok for s in self.series)
                and not any(self.flags.values()))

    def failures(self) -> list[str]:
        out = [f"{s.label}: slope {s.slope:.4f} vs expected -{s.expected:.4f} ({s.mode}, tol {s.tol})"
               for s in self.series if not s.passed]
        out += [f"{s.label}: tail slope {s.tail_slope:.4f} unstable" for s in self.series if s.passed and not s.tail_ok]
        out += [f"flag {k}" for k, v in sorted(self.flags.items()) if v]
        if self.error:
            out.append(f"error: {self.error}")
        return out

    def to_keyvalue(self) -> str:
        lines = [f"id={self.ident}", f"experiment={self.experiment}", f"N={self.dim}",
                 f"alpha={self.alpha!r}", f"informational={str(self.informational).lower()}",
                 f"pass={str(self.passed).lower()}", f"error={self.error}"]
        for s in self.series:
            p = f"series.{s.label}"
            lines += [f"{p}.slope={s.slope!r}", f"{p}.tail_slope={s.tail_slope!r}",
                      f"{p}.expected={s.expected!r}", f"{p}.mode={s.mode}", f"{p}.tol={s.tol!r}",
                      f"{p}.tail_stable={str(s.tail_stable).lower()}", f"{p}.pass={str(s.ok).lower()}"]
        lines += [f"flag.{k}={str(bool(v)).lower()}" for k, v in sorted(self.flags.items())]
        lines += [f"info.{k}={_fmt(v)}" for k, v in sorted(self.info.items())]
        return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def judge(label: str, t, values, window, expected: float, mode: str, tol: float) -> SeriesVerdict:
    """Fit a series and apply the verdict rule.

    Two-sided verdicts need a stable tail (tail slope within 0.03 of the full
    fit).  Upper-bound verdicts need the tail slope to satisfy the bound as
    well: faster-than-predicted decay is consistent there, so only a tail that
    drifts above the bound counts as unstable.
    """
    fit = fit_slope(DecaySeries.from_samples(label, t, values), window)
    line = verdict(fit, expected, mode, tol)
    if mode == TWO_SIDED:
        tail_ok = fit.tail_stable
    else:
        tail_ok = bool(np.isfinite(fit.tail_slope) and fit.tail_slope <= -expected + tol)
    return SeriesVerdict(label, fit.slope, fit.tail_slope, expected, mode, tol, line.passed,
                         fit.tail_stable, tail_ok)


def sample_times(cfg: ExperimentConfig) -> np.ndarray:
    lo, hi = cfg.fit_window
    early = np.empty(0)
    if cfg.early_samples > 0 and cfg.early_start < lo:
        early = np.geomspace(cfg.early_start, lo, cfg.early_samples + 1)[:-1]
    return np.r_[early, np.geomspace(lo, hi, cfg.samples)]


def aligned_grid(r0: float, r_needed: float, dr: float, dim: int) -> RadialGrid:
    """Grid on ``[r0, r0 + k dr]`` covering ``r_needed`` with spacing exactly ``dr`` (up to rounding)."""
    k = int(np.ceil((r_needed - r0) / dr - 1e-9))
    return build_grid(r0, r0 + k * dr, k + 1, dim)


def profile_of(cfg: ExperimentConfig) -> DampingProfile:
    return DampingProfile(cfg.profile, a0=cfg.a0, alpha=cfg.alpha, delta=cfg.delta, r_min=cfg.r0)


def heat_mode(cfg: ExperimentConfig) -> str:
    return TWO_SIDED if cfg.profile == PURE_POWER else UPPER_BOUND


# ---------------------------------------------------------------- experiments

def heat_decay(cfg: ExperimentConfig):
    prof = profile_of(cfg)
    grid = aligned_grid(cfg.r0, max(heat_domain(cfg.alpha, cfg.T), cfg.R0 + 1.0), cfg.dr, cfg.N)
    f = CauchyData.canonical(grid, cfg.R0, cfg.amplitude).u0
    times = sample_times(cfg)
    states = evolve(f, times, prof, grid, theta=0.5, schedule=Schedule(cap_factor=cfg.heat_cap))
    t = np.array([s.t for s in states])
    norms = np.array([norm_dmu(grid, s.v, prof) for s in states])
    exp_ = expected_exponents(cfg.N, cfg.alpha)["heat_L2"]
    v = Verdict(cfg.ident, cfg.experiment, cfg.N, cfg.alpha)
    v.series.append(judge("heat_L2", t, norms, cfg.fit_window, exp_, heat_mode(cfg), HEAT_TOL))
    v.flags["truncated"] = any(s.truncated for s in states)
    norm0 = norm_dmu(grid, f, prof)
    v.info["max_contraction_ratio"] = float(np.max(norms) / norm0)
    rows = [{"t": ti, "norm_sqrt_a_v_L2": ni} for ti, ni in zip(t, norms)]
    return v, rows


def heat_optimality(cfg: ExperimentConfig):
    prof = profile_of(cfg)
    strict = cfg.profile == PURE_POWER and cfg.a0 == 1.0
    grid = aligned_grid(cfg.r0, heat_domain(cfg.alpha, cfg.T + cfg.radius ** (2 - cfg.alpha)), cfg.dr, cfg.N)
    res = optimality_experiment(cfg.radius, prof, grid, sample_times(cfg),
                                schedule=Schedule(cap_factor=cfg.heat_cap), theta=1.0, strict=strict)
    exp_ = expected_exponents(cfg.N, cfg.alpha)["heat_L2"]
    v = Verdict(cfg.ident, cfg.experiment, cfg.N, cfg.alpha, informational=not strict)
    v.series.append(judge("heat_L2", res.times, res.norms, cfg.fit_window, exp_, TWO_SIDED, HEAT_TOL))
    v.flags["truncated"] = res.truncated
    v.info.update(
        floor_holds=res.floor_holds,
        min_norm_over_floor=float(np.min(res.norms / res.floor)),
        comparison_holds=res.comparison_holds,
        min_comparison_margin=float(np.min(res.comparison_margin)),
        ctilde=res.comparison.ctilde(),
        ctilde_unsquared=res.comparison.ctilde_unsquared(),
        t_R=res.comparison.t_R,
    )
    rows = [{"t": ti, "norm_sqrt_a_v_L2": ni} for ti, ni in zip(res.times, res.norms)]
    return v, rows


def _wave_setup(cfg: ExperimentConfig):
    prof = profile_of(cfg)
    grid = aligned_grid(cfg.r0, cfg.R0 + cfg.T + 1.0, cfg.dr, cfg.N)
    data = CauchyData.canonical(grid, cfg.R0, cfg.amplitude, cfg.velocity)
    run = run_wave(data, prof, grid, cfg.T, dt=cfg.cfl * grid.dr, sample_times=sample_times(cfg))
    pot = potential_build(prof, grid, eps_shift=cfg.eps_shift)
    weight = WeightParams.default(pot) if cfg.beta is None else WeightParams(pot, cfg.beta)
    return prof, grid, data, run, weight


def _energy_columns(rec) -> dict:
    row = {"E1": rec.E1, "E2": rec.E2, "F": rec.F}
    for k in range(3):
        row[f"wk{k}"] = rec.weighted_u_sq[k]
        row[f"gk{k}"] = rec.grad_sq[k]
    return row


def wave_energy(cfg: ExperimentConfig):
    prof, grid, data, run, weight = _wave_setup(cfg)
    recs = [energy_record(s, weight, grid) for s in run.samples]
    t = np.array([s.t for s in run.samples])
    exp_ = expected_exponents(cfg.N, cfg.alpha)
    v = Verdict(cfg.ident, cfg.experiment, cfg.N, cfg.alpha)
    for k in range(3):
        v.series.append(judge(f"wk{k}", t, [r.weighted_u_sq[k] for r in recs], cfg.fit_window,
                              exp_[f"energy_{k}"], UPPER_BOUND, ENERGY_TOL))
        v.series.append(judge(f"gk{k}", t, [r.grad_sq[k] for r in recs], cfg.fit_window,
                              exp_[f"grad_{k}"], UPPER_BOUND, ENERGY_TOL))
    v.flags["support_violation"] = not run.support_ok
    E1 = np.array([r.E1 for r in recs])
    v.info.update(max_support_ratio=run.max_support_ratio, E1_nonincreasing=bool(np.all(np.diff(E1) <= 0)),
                  beta=weight.beta, min_E2=float(min(r.E2 for r in recs)))
    rows = []
    for s, rec in zip(run.samples, recs):
        row = {"t": s.t, "norm_sqrt_a_u_L2": norm_dmu(grid, s.u, prof)}
        row.update(_energy_columns(rec))
        rows.append(row)
    return v, rows


def diffusion_phenomenon(cfg: ExperimentConfig):
    prof, grid, data, run, weight = _wave_setup(cfg)
    t = np.array([s.t for s in run.samples])
    hgrid = aligned_grid(cfg.r0, max(grid.r_max, heat_domain(cfg.alpha, cfg.T)), grid.dr, cfg.N)
    pad = lambda f: np.r_[f, np.zeros(hgrid.n - grid.n)]
    v0 = pad(data.u0 + data.u1 / prof.on(grid))
    states = evolve(v0, t, prof, hgrid, theta=0.5, schedule=Schedule(cap_factor=cfg.heat_cap))
    nu = np.array([norm_dmu(grid, s.u, prof) for s in run.samples])
    nv = np.array([norm_dmu(hgrid, h.v, prof) for h in states])
    nd = np.array([norm_dmu(hgrid, pad(s.u) - h.v, prof) for s, h in zip(run.samples, states)])
    exp_ = expected_exponents(cfg.N, cfg.alpha)
    v = Verdict(cfg.ident, cfg.experiment, cfg.N, cfg.alpha)
    v.series.append(judge("diff", t, nd, cfg.fit_window, exp_["thm1_diff"], UPPER_BOUND, DIFF_TOL))
    v.series.append(judge("heat_L2", t, nv, cfg.fit_window, exp_["heat_L2"], heat_mode(cfg), HEAT_TOL))
    v.flags["support_violation"] = not run.support_ok
    v.flags["truncated"] = any(h.truncated for h in states)
    u_fit = fit_slope(DecaySeries.from_samples("u", t, nu), cfg.fit_window)
    v.info.update(max_support_ratio=run.max_support_ratio, u_slope=u_fit.slope,
                  gap=v.series[1].slope - v.series[0].slope,
                  expected_gap=exp_["thm1_diff"] - exp_["heat_L2"])
    recs = [energy_record(s, weight, grid) for s in run.samples]
    rows = []
    for ti, a, b, c, rec in zip(t, nu, nv, nd, recs):
        row = {"t": ti, "norm_sqrt_a_u_L2": a, "norm_sqrt_a_v_L2": b, "diff_L2_dmu": c}
        row.update(_energy_columns(rec))
        rows.append(row)
    return v, rows


# ---------------------------------------------------------------- property suite

def random_bumps(rng: np.random.Generator, grid: RadialGrid, lo: float, hi: float, signed: bool = True,
                 max_terms: int = 3) -> np.ndarray:
    """Sum of 1..max_terms smooth bumps with supports inside ``(lo, hi)``."""
    f = grid.zeros()
    for _ in range(rng.integers(1, max_terms + 1)):
        width = rng.uniform(0.3, 0.25 * (hi - lo))
        centre = rng.uniform(lo + width, hi - width)
        amp = rng.uniform(-1, 1) if signed else rng.uniform(0.1, 1)
        f += amp * bump((grid.r - centre) / width)
    f[0] = f[-1] = 0.0
    return f


def contraction_smoothing(f, prof, grid, times, smoothing_times=(1.0, 4.0, 16.0), theta=1.0,
                          schedule=Schedule()):
    """Norm ratios ``||v(t)|| / ||f||`` and ``t ||L v(t)|| / ||f||`` in ``L^2(dmu)``."""
    states = evolve(f, sorted(set(times) | set(smoothing_times)), prof, grid, theta, schedule)
    a = prof.on(grid)
    n0 = norm_dmu(grid, f, a)
    ratios = {s.t: norm_dmu(grid, s.v, a) / n0 for s in states}
    smooth = {s.t: s.t * norm_dmu(grid, radial_laplacian(grid, s.v) / a, a) / n0
              for s in states if s.t in smoothing_times}
    return states, ratios, smooth


def hardy_max(rng_seed: int, prof: DampingProfile, dim: int, dr: float, trials: int, times=(0.0, 1.0, 10.0),
              r_hi: float = 12.0, eps_shift: float = 0.05) -> float:
    grid = aligned_grid(prof.r_min, r_hi, dr, dim)
    weight = WeightParams.default(potential_build(prof, grid, eps_shift=eps_shift))
    rng = np.random.default_rng(rng_seed)
    worst = 0.0
    for _ in range(trials):
        u = random_bumps(rng, grid, prof.r_min, r_hi)
        for t in times:
            worst = max(worst, hardy_check(u, t, weight, grid))
    return worst


def property_suite(cfg: ExperimentConfig):
    prof = profile_of(cfg)
    rng = np.random.default_rng(cfg.seed)
    v = Verdict(cfg.ident, cfg.experiment, cfg.N, cfg.alpha)

    grid = aligned_grid(cfg.r0, heat_domain(cfg.alpha, 16.0), cfg.dr, cfg.N)
    f = random_bumps(rng, grid, cfg.r0, cfg.R0 + 2.0)
    times = np.geomspace(0.01, 16.0, 24)
    states, ratios, smooth = contraction_smoothing(f, prof, grid, times)
    v.flags["contraction"] = max(ratios.values()) > 1 + CONTRACTION_TOL
    v.flags["smoothing"] = max(smooth.values()) > SMOOTHING_TOL
    v.flags["truncated"] = any(s.truncated for s in states)
    v.info.update(max_contraction_ratio=max(ratios.values()), max_smoothing_ratio=max(smooth.values()))

    worst_min, worst_sup = 0.0, 0.0
    for _ in range(20):
        g = random_bumps(rng, grid, cfg.r0, cfg.R0 + 2.0, signed=False)
        rep = submarkov_check(g, times, prof, grid)
        worst_min = min(worst_min, min(rep.min_value))
        worst_sup = max(worst_sup, max(rep.sup_ratio))
    v.flags["positivity"] = worst_min < -1e-12
    v.flags["sup_contraction"] = worst_sup > 1 + CONTRACTION_TOL
    v.info.update(min_value=worst_min, max_sup_ratio=worst_sup)

    hardy_seed = int(rng.integers(2**31))
    coarse = hardy_max(hardy_seed, prof, cfg.N, cfg.dr, cfg.trials, eps_shift=cfg.eps_shift)
    fine = hardy_max(hardy_seed, prof, cfg.N, cfg.dr / 2, cfg.trials, eps_shift=cfg.eps_shift)
    v.flags["hardy"] = coarse > HARDY_TOL or fine > HARDY_TOL
    v.flags["hardy_refined"] = fine > HARDY_REFINED_TOL
    v.info.update(hardy_max=coarse, hardy_max_refined=fine)

    T_wave = min(cfg.T, 20.0)
    wgrid = aligned_grid(cfg.r0, cfg.R0 + T_wave + 1.0, min(cfg.dr, SUPPORT_CHECK_DR), cfg.N)
    w0 = random_bumps(rng, wgrid, cfg.r0, cfg.R0)
    w1 = random_bumps(rng, wgrid, cfg.r0, cfg.R0)
    run = run_wave(CauchyData(w0, w1, cfg.R0), prof, wgrid, T_wave)
    v.flags["support_violation"] = run.max_support_ratio > SUPPORT_TOL
    v.info["max_support_ratio"] = run.max_support_ratio

    rows = [{"t": s.t, "norm_sqrt_a_v_L2": norm_dmu(grid, s.v, prof)} for s in states]
    return v, rows


RUNNERS = {
    "heat_decay": heat_decay,
    "heat_optimality": heat_optimality,
    "wave_energy": wave_energy,
    "diffusion_phenomenon": diffusion_phenomenon,
    "property_suite": property_suite,
}


def run_experiment(cfg: ExperimentConfig):
    """Run one configured experiment; numerical failures become failed verdicts."""
    try:
        return RUNNERS[cfg.experiment](cfg)
    except (FloatingPointError, InsufficientSpanError, np.linalg.LinAlgError) as exc:
        v = Verdict(cfg.ident, cfg.experiment, cfg.N, cfg.alpha, error=f"{type(exc).__name__}: {exc}")
        return v, []


def csv_text(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow(["" if row.get(c) is None else repr(float(row[c])) for c in CSV_COLUMNS])
    return buf.getvalue()
