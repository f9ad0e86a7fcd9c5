"""Tuning the spring-damper so the formation returns to shape without ringing.

The payload acts as an extra spring toward the centroid. Per axis the
formation reduces to one mass, one spring and one damper, so the spring and
damper constants can be picked for critical damping on both axes at once.
"""
# %%
import math

import numpy as np

from swarmcarry.control import axis_gains, damping_ratios
from swarmcarry.experiments import SPACING_M, step_response_scenario
from swarmcarry.sim import run

sc, g = step_response_scenario(compression=0.05)
gains = axis_gains(g.k, g.B, g.k_p, g.bearings)
zx, zy = damping_ratios(sc.plant.mass_kg, gains)
print(f"k_p={g.k_p:.4f} N/m  k={g.k:.4f} N/m  B={g.B:.4f} N s/m  zeta_x={zx:.3f}  zeta_y={zy:.3f}")
print(f"neighbor bearings: {[round(math.degrees(b), 1) for b in g.bearings]} deg")

# %% release the formation from 5% compression and watch one edge
log = run(sc)
d = np.linalg.norm(log.position[:, 0] - log.position[:, 1], axis=1)
for t_probe in (0.0, 0.25, 0.5, 1.0, 2.0, 4.0):
    k = int(round(t_probe / log.dt))
    print(f"t={t_probe:4.2f}s  edge={d[k]:.4f} m  error={100 * (d[k] / SPACING_M - 1):+.2f}%")
print(f"largest edge over the run: {d.max():.4f} m (spacing {SPACING_M} m)")
