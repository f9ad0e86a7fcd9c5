"""Estimating how fast a neighbor approaches from coarse distance samples.

The filter keeps an exponentially weighted running distance. On a ramp the
running value trails the signal by a fixed amount proportional to the slope,
which is how the rate is read off.
"""
# %%
import numpy as np

from swarmcarry.estimation import EmaDerivativeFilter

tau, dt, v = 0.2, 0.01, 0.25
t = np.arange(0, 1.5, dt)
d = 0.6 + v * t

exact = EmaDerivativeFilter(tau=tau, method="regular")
simple = EmaDerivativeFilter(tau=tau, method="irregular")
for ti, di in zip(t, d):
    _, r_exact = exact.update(ti, di)
    _, r_simple = simple.update(ti, di)
print(f"true slope {v}, interval-aware estimate {r_exact:.12f}, simple estimate {r_simple:.6f}")
print(f"simple/true = {r_simple / v:.5f}, predicted x/(e^x-1) with x=dt/tau: {(dt / tau) / np.expm1(dt / tau):.5f}")

# %% jittery sampling: auto mode falls back to the simple estimate
rng = np.random.default_rng(3)
steps = dt * (1 + rng.uniform(-0.3, 0.3, 300))
t = np.cumsum(steps)
f = EmaDerivativeFilter(tau=tau)
for ti in t:
    _, rate = f.update(ti, 0.6 + v * ti)
print(f"jittered sampling: estimate {rate:.4f} via {f.last_method} formula")
