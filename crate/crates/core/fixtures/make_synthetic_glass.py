"""Regenerates synthetic_glass.csv (numpy, seed 20140101).

Random-effects draws with the geometry of a 16-window, 5-fragment glass
collection and three log-ratio features. These are not measurements.
"""
import numpy as np

rng = np.random.default_rng(20140101)
mean = np.array([4.20, -1.25, 2.60])
between_sd = np.array([0.25, 0.015, 0.12])
within_sd = np.array([0.05, 0.004, 0.02])

rows = []
for window in range(1, 17):
    center = mean + between_sd * rng.standard_normal(3)
    for fragment in range(1, 6):
        y = center + within_sd * rng.standard_normal(3)
        rows.append((window, fragment, *y))

with open("synthetic_glass.csv", "w") as f:
    f.write("source,fragment,logCaK,logCaSi,logCaFe\n")
    for w, j, a, b, c in rows:
        f.write(f"{w},{j},{a:.6f},{b:.6f},{c:.6f}\n")
