"""Does carrying a payload make the carriers move together?

Runs the eleven-flight comparison (one run without payload, five with each
formation law), removes each carrier's constant-velocity trend and averages
the pairwise correlations of what remains.
"""
# %%
import time

from swarmcarry.analysis import synchronicity
from swarmcarry.experiments import WINDOW_S, default_suite
from swarmcarry.report import format_table
from swarmcarry.sim import run

start = time.perf_counter()
rows = [(group, synchronicity(run(sc), WINDOW_S, label=sc.name)) for group, sc in default_suite(base_seed=0)]
print(format_table(rows))
print(f"\n{len(rows)} runs in {time.perf_counter() - start:.1f}s")
