"""How hard does a hanging payload pull on each carrier?

Three carriers hold the corners of a light sheet. Each corner hangs as a
catenary toward a point under the group's centroid. Spreading the carriers
raises the horizontal pull, slowly at first and then sharply as the cable
approaches taut.
"""
# %%
import numpy as np

from swarmcarry.catenary import PayloadModel, horizontal_tension, payload_stiffness, solve_catenary, vertical_tension

p = PayloadModel(mass_kg=0.03, cable_length_m=0.6, agent_count=3)
print(f"vertical load per carrier: {vertical_tension(p) * 1000:.1f} mN")

# %% pull and stiffness against the carrier's distance from the centroid
for frac in (0.2, 0.4, 0.577, 0.8, 0.95):
    x0 = frac * p.cable_length_m
    sol = solve_catenary(p, x0)
    print(
        f"x0={x0:.3f} m  a={sol.a:.4f} m  T_x={horizontal_tension(p, x0) * 1000:6.2f} mN  "
        f"k_p={payload_stiffness(p, x0):.4f} N/m"
    )

# %% the ratio of vertical to horizontal tension is the cable slope L/a
x0 = 0.6 / np.sqrt(3)
a = solve_catenary(p, x0).a
print("T_z/T_x =", vertical_tension(p) / horizontal_tension(p, x0), " L/a =", p.cable_length_m / a)
