"""Exponentially weighted distance filter with a built-in rate estimate.

The filter keeps a smoothed distance ``d_tilde`` that forgets old samples with
time constant ``tau``. The gap between the newest sample and ``d_tilde`` is
proportional to the rate of change, which gives a derivative estimate that is
robust to coarse, jittery sampling.
"""

from __future__ import annotations

import math

from .errors import DomainError, NonMonotonicTimeError

REGULAR = "regular"
IRREGULAR = "irregular"
AUTO = "auto"


class EmaDerivativeFilter:
    """Online smoother and rate estimator for one distance signal.

    Parameters
    ----------
    tau : float
        Forgetting time constant in seconds.
    jitter : float
        Relative tolerance between consecutive sampling intervals under which
        sampling counts as regular (``auto`` mode).
    burn_in : float
        The rate is reported as 0 until the samples span ``burn_in * tau``
        seconds.
    method : {"auto", "regular", "irregular"}
        ``regular`` always uses the interval-aware formula, ``irregular``
        always uses ``(d - d_tilde) / tau``, ``auto`` picks per sample.
    steady_start : bool
        On the second sample, place ``d_tilde`` where it would sit had the
        signal followed the first observed slope forever. Without it the
        estimate on a ramp converges only as ``1 - w**n``.
    """

    def __init__(self, tau=0.2, jitter=0.05, burn_in=3.0, method=AUTO, steady_start=True):
        if not tau > 0:
            raise DomainError(f"tau must be positive, got {tau}")
        if method not in (AUTO, REGULAR, IRREGULAR):
            raise ValueError(f"unknown method {method!r}")
        self.tau = float(tau)
        self.jitter = float(jitter)
        self.burn_in = float(burn_in)
        self.method = method
        self.steady_start = bool(steady_start)
        self.samples = 0
        self.d_tilde = math.nan
        self.last_time = math.nan
        self.first_time = math.nan
        self.last_dt = math.nan
        self.initialized = False
        self.last_method = None

    def reset(self):
        self.__init__(self.tau, self.jitter, self.burn_in, self.method, self.steady_start)

    def weight(self, dt):
        return math.exp(-dt / self.tau)

    def update(self, t_n, d_n):
        """Feed the sample ``d_n`` taken at ``t_n``.

        Returns
        -------
        (d_tilde, d_dot) : tuple of float
            Smoothed distance and rate estimate after this sample.
        """
        if not self.initialized:
            self.d_tilde = float(d_n)
            self.last_time = self.first_time = float(t_n)
            self.initialized = True
            self.samples = 1
            return self.d_tilde, 0.0

        dt = t_n - self.last_time
        if not dt > 0:
            raise NonMonotonicTimeError(
                f"sample time {t_n} does not follow previous time {self.last_time}"
            )
        w = self.weight(dt)
        if self.samples == 1 and self.steady_start:
            # d_tilde still holds the first sample
            slope = (d_n - self.d_tilde) / dt
            self.d_tilde = d_n - slope * w * dt / (1.0 - w)
        else:
            # same as w*d_tilde + (1-w)*d_n, but exact when the signal is constant
            self.d_tilde = d_n + w * (self.d_tilde - d_n)
        self.samples += 1
        prev_dt, self.last_dt = self.last_dt, dt
        self.last_time = float(t_n)

        method = self.method
        if method == AUTO:
            regular = not math.isnan(prev_dt) and abs(dt - prev_dt) <= self.jitter * dt
            method = REGULAR if regular else IRREGULAR
        self.last_method = method

        if t_n - self.first_time < self.burn_in * self.tau:
            return self.d_tilde, 0.0
        gap = d_n - self.d_tilde
        if method == REGULAR:
            d_dot = (1.0 - w) * gap / (w * dt)
        else:
            d_dot = gap / self.tau
        return self.d_tilde, d_dot
