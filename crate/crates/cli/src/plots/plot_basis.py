#!/usr/bin/env python3
# S_z occupation probabilities of e_+ in the linear:m gauge against theta.
import csv
import sys
from collections import defaultdict

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "basis.csv"
curves = defaultdict(lambda: defaultdict(list))
with open(path) as f:
    for row in csv.DictReader(f):
        if row["lambda"] != "1":
            continue
        c = curves[int(row["m"])]
        c["theta"].append(float(row["theta"]))
        for key in ("p_minus", "p_zero", "p_plus", "s_z", "l_z"):
            c[key].append(float(row[key]))

ms = sorted(curves)
fig, axes = plt.subplots(1, len(ms), figsize=(3.2 * len(ms), 3), sharey=True)
if len(ms) == 1:
    axes = [axes]
for ax, m in zip(axes, ms):
    c = curves[m]
    for key, label in (("p_minus", r"$\mu=-1$"), ("p_zero", r"$\mu=0$"), ("p_plus", r"$\mu=+1$")):
        ax.plot(c["theta"], c[key], label=label)
    ax.set_title(f"m = {m}")
    ax.set_xlabel(r"$\theta$")
axes[0].set_ylabel("probability")
axes[-1].legend()
fig.tight_layout()
fig.savefig("basis_probabilities.png", dpi=150)
