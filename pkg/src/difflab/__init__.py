"""Damped waves and their diffusion limit on exterior radial domains."""
from .coefficients import DampingProfile, PotentialA, WeightParams, potential_build
from .config import ExperimentConfig, parse, serialize
from .decay import expected_exponents, fit_slope, verdict
from .grid import RadialGrid, build_grid, grid_with_spacing
from .heat import evolve, optimality_experiment, semigroup_apply, submarkov_check
from .wave import CauchyData, run_wave

__all__ = [
    "CauchyData", "DampingProfile", "ExperimentConfig", "PotentialA", "RadialGrid", "WeightParams",
    "build_grid", "evolve", "expected_exponents", "fit_slope", "grid_with_spacing", "optimality_experiment",
    "parse", "potential_build", "run_wave", "semigroup_apply", "serialize", "submarkov_check", "verdict",
]
