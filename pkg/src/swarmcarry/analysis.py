"""Detrended deviation signals and pairwise synchronicity.

A carrier cruising at constant velocity traces a straight line in each
coordinate. Removing the least-squares line leaves the corrective motion, and
the mean pairwise Pearson correlation of those residuals measures how much the
carriers move together.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .sim import TrajectoryLog

AXES = {"x": 0, "y": 1}


@dataclass(frozen=True)
class DetrendedSignal:
    t: np.ndarray
    values: np.ndarray
    axis: str
    agent: int


@dataclass(frozen=True)
class CorrelationReport:
    rho_x_mean: float
    rho_y_mean: float
    combined: float
    pairs: dict = field(default_factory=dict)
    window: tuple[float, float] = (0.0, 0.0)
    missing: tuple = ()
    label: str = ""


def detrend_series(t, values) -> np.ndarray:
    """Residual of ``values`` after removing the least-squares line in ``t``."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(values, dtype=float)
    if t.shape != y.shape or t.ndim != 1:
        raise DomainError("t and values must be equal-length 1-D arrays")
    if t.size < 3:
        raise DomainError(f"need at least 3 samples to detrend, got {t.size}")
    tc = t - t.mean()
    sxx = float(np.dot(tc, tc))
    if sxx == 0.0:
        raise DomainError("degenerate window: all samples share one timestamp")
    yc = y - y.mean()
    slope = float(np.dot(tc, yc)) / sxx
    return yc - slope * tc


def detrend(log: TrajectoryLog, agent: int, axis: str, window) -> DetrendedSignal:
    if axis not in AXES:
        raise DomainError(f"axis must be 'x' or 'y', got {axis!r}")
    lo, hi = window
    if not hi > lo:
        raise DomainError(f"degenerate window {window}")
    if lo < log.t[0] - 1e-9 or hi > log.t[-1] + 1e-9:
        raise DomainError(f"window {window} outside log span [{log.t[0]}, {log.t[-1]}]")
    mask = log.window_mask(window)
    t = log.t[mask]
    values = log.position[mask, log.column(agent), AXES[axis]]
    return DetrendedSignal(t=t, values=detrend_series(t, values), axis=axis, agent=agent)


def pearson(a, b) -> float | None:
    """Pearson coefficient, or ``None`` when either signal has zero variance."""
    raw_a = np.asarray(a, dtype=float)
    raw_b = np.asarray(b, dtype=float)
    a = raw_a - raw_a.mean()
    b = raw_b - raw_b.mean()
    saa = float(np.dot(a, a))
    sbb = float(np.dot(b, b))
    # variance at the rounding level of a signal's own magnitude counts as zero
    for raw, ss in ((raw_a, saa), (raw_b, sbb)):
        if ss == 0.0 or ss <= (1e-12 * float(np.max(np.abs(raw)))) ** 2 * raw.size:
            return None
    r = float(np.dot(a, b)) / math.sqrt(saa * sbb)
    return min(1.0, max(-1.0, r))


def _mean_or_nan(values):
    vals = [v for v in values if v is not None]
    return float(np.mean(vals)) if vals else math.nan


def synchronicity(log: TrajectoryLog, window, agents=None, label: str = "") -> CorrelationReport:
    """Mean pairwise correlation of detrended residuals, per axis and combined."""
    ids = [int(i) for i in (log.ids if agents is None else agents)]
    if len(ids) < 2:
        raise DomainError("synchronicity needs at least two agents")
    pairs = {}
    missing = []
    per_axis = {}
    for axis in AXES:
        sig = {i: detrend(log, i, axis, window).values for i in ids}
        coeffs = []
        for a, b in itertools.combinations(ids, 2):
            r = pearson(sig[a], sig[b])
            pairs[(a, b, axis)] = r
            if r is None:
                missing.append((a, b, axis))
            coeffs.append(r)
        per_axis[axis] = _mean_or_nan(coeffs)
    if missing:
        warnings.warn(
            f"zero-variance residuals; excluded pairs {missing} from the mean", RuntimeWarning, stacklevel=2
        )
    rx, ry = per_axis["x"], per_axis["y"]
    combined = _mean_or_nan([None if math.isnan(r) else r for r in (rx, ry)])
    return CorrelationReport(
        rho_x_mean=rx, rho_y_mean=ry, combined=combined, pairs=pairs,
        window=(float(window[0]), float(window[1])), missing=tuple(missing), label=label,
    )


def summarize(reports) -> tuple[float, float]:
    """Mean and sample standard deviation of the combined coefficients.

    Accepts reports or bare numbers. A single value has spread 0.
    """
    vals = np.array([r.combined if isinstance(r, CorrelationReport) else float(r) for r in reports], dtype=float)
    if vals.size == 0:
        raise DomainError("summarize needs at least one report")
    vals = vals[~np.isnan(vals)]
    if vals.size == 0:
        return math.nan, math.nan
    if vals.size == 1:
        return float(vals[0]), 0.0
    return float(vals.mean()), float(vals.std(ddof=1))
