#!/usr/bin/env python3
# Intensity sum |E_mu|^2 in the x-z half plane phi = 0, plus each component.
import csv
from collections import defaultdict

import matplotlib.pyplot as plt
import numpy as np

data = defaultdict(dict)
with open("field.csv") as f:
    for row in csv.DictReader(f):
        if float(row["phi"]) != 0.0:
            continue
        data[int(row["mu"])][(float(row["r"]), float(row["theta"]))] = float(row["abs2"])

rs = sorted({r for r, _ in data[0]})
ths = sorted({t for _, t in data[0]})
R, TH = np.meshgrid(rs, ths, indexing="ij")
X, Z = R * np.sin(TH), R * np.cos(TH)
panels = [("total", sum(np.array([[data[mu][(r, t)] for t in ths] for r in rs]) for mu in (-1, 0, 1)))]
for mu in (-1, 0, 1):
    panels.append((rf"$\mu={mu}$", np.array([[data[mu][(r, t)] for t in ths] for r in rs])))

fig, axes = plt.subplots(1, len(panels), figsize=(3.2 * len(panels), 3.4), sharey=True)
for ax, (title, z) in zip(axes, panels):
    im = ax.pcolormesh(X, Z, z, shading="gouraud", cmap="magma")
    ax.set_aspect("equal")
    ax.set_title(title)
    ax.set_xlabel("x")
    fig.colorbar(im, ax=ax, shrink=0.8)
axes[0].set_ylabel("z")
fig.tight_layout()
fig.savefig("field_intensity.png", dpi=150)
