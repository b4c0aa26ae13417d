#!/usr/bin/env python3
# Equatorial intensity of the vortex components and ring radius against p0.
import csv

import matplotlib.pyplot as plt

with open("field_ring_profile.csv") as f:
    rows = [(float(r["r"]), float(r["intensity"])) for r in csv.DictReader(f)]
with open("field_ring_sweep.csv") as f:
    sweep = sorted((float(r["p0"]), float(r["peak_radius"])) for r in csv.DictReader(f))

fig, (a, b) = plt.subplots(1, 2, figsize=(7, 3))
a.plot([r for r, _ in rows], [i for _, i in rows])
a.set_xlabel("r")
a.set_ylabel("intensity (arb.)")
b.loglog([p for p, _ in sweep], [r for _, r in sweep], "o-")
b.set_xlabel(r"$p_0$")
b.set_ylabel("ring radius")
fig.tight_layout()
fig.savefig("field_ring.png", dpi=150)
