"""Log-log slope fits and comparison with predicted decay exponents."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TWO_SIDED = "two_sided"
UPPER_BOUND = "upper_bound"
TAIL_TOL = 0.03


class InsufficientSpanError(ValueError):
    pass


@dataclass
class DecaySeries:
    label: str
    t: np.ndarray
    values: np.ndarray
    dropped: int = 0

    @classmethod
    def from_samples(cls, label: str, t, values) -> "DecaySeries":
        t, values = np.asarray(t, dtype=float), np.asarray(values, dtype=float)
        if np.any(np.diff(t) <= 0):
            raise ValueError("sample times must be strictly increasing")
        keep = values > 0
        return cls(label, t[keep], values[keep], int((~keep).sum()))


@dataclass
class SlopeFit:
    slope: float
    intercept: float
    window: tuple
    rms: float
    tail_slope: float
    n: int

    @property
    def tail_stable(self) -> bool:
        return bool(np.isfinite(self.tail_slope) and abs(self.tail_slope - self.slope) <= TAIL_TOL)


def fit_slope(series: DecaySeries, window: tuple | None = None, min_samples: int = 8) -> SlopeFit:
    """Least-squares fit of ``log value = slope * log t + intercept`` inside ``window``.

    The tail slope refits the upper half of the window in ``log t``.
    """
    t, y = series.t, series.values
    lo, hi = window if window is not None else (t[0], t[-1])
    sel = (t >= lo * (1 - 1e-9)) & (t <= hi * (1 + 1e-9))
    ts, ys = t[sel], y[sel]
    if ts.size < min_samples or ts[-1] / ts[0] < 10 * (1 - 1e-6):
        raise InsufficientSpanError(
            f"{series.label}: need {min_samples} samples over a decade, got {ts.size} in [{lo}, {hi}]")
    lt, ly = np.log(ts), np.log(ys)
    slope, intercept = np.polyfit(lt, ly, 1)
    rms = float(np.sqrt(np.mean((ly - (slope * lt + intercept)) ** 2)))
    tail = lt >= 0.5 * (lt[0] + lt[-1]) - 1e-12
    tail_slope = float(np.polyfit(lt[tail], ly[tail], 1)[0]) if tail.sum() >= 3 else float("nan")
    return SlopeFit(float(slope), float(intercept), (float(lo), float(hi)), rms, tail_slope, int(ts.size))


def expected_exponents(dim: int, alpha: float) -> dict:
    """Predicted decay exponents (positive numbers) for the tracked quantities.

    ``heat_L2``: ``||sqrt(a) e^{tL} f||``; ``energy_k``: ``int Phi a |d_t^k u|^2``;
    ``grad_k``: ``int Phi |d_t^k grad u|^2``; ``thm1_diff``: ``||sqrt(a)(u - v)||``.
    """
    if dim < 2 or not 0 <= alpha < 1:
        raise ValueError(f"need N >= 2 and alpha in [0, 1), got N={dim}, alpha={alpha}")
    base = (dim - alpha) / (2 - alpha)
    table = {"heat_L2": base / 2, "thm1_diff": base / 2 + (2 - 2 * alpha) / (2 - alpha)}
    for k in range(3):
        table[f"energy_{k}"] = base + 2 * k
        table[f"grad_{k}"] = base + 2 * k + 1
    return table


@dataclass
class VerdictLine:
    passed: bool
    slope: float
    expected: float
    mode: str
    tol: float
    report: str = field(default="")


def verdict(fit: SlopeFit | float, expected: float, mode: str, tol: float) -> VerdictLine:
    """Two-sided: ``|slope + expected| <= tol``.  Upper bound: ``slope <= -expected + tol``."""
    slope = fit.slope if isinstance(fit, SlopeFit) else float(fit)
    if mode == TWO_SIDED:
        ok = abs(slope + expected) <= tol
        rel = f"|{slope:.4f} + {expected:.4f}| <= {tol}"
    elif mode == UPPER_BOUND:
        ok = slope <= -expected + tol
        rel = f"{slope:.4f} <= {-expected + tol:.4f}"
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return VerdictLine(bool(ok), slope, expected, mode, tol, ("PASS " if ok else "FAIL ") + rel)
