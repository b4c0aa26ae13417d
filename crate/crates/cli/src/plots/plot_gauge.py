#!/usr/bin/env python3
# a_phi maps per gauge and the curl error against step size.
import csv
from collections import defaultdict

import matplotlib.pyplot as plt
import numpy as np

maps = defaultdict(list)
with open("gauge_potential.csv") as f:
    for row in csv.DictReader(f):
        maps[row["gauge"]].append((float(row["theta"]), float(row["phi"]), float(row["a_phi"])))

names = list(maps)
fig, axes = plt.subplots(1, len(names), figsize=(3.2 * len(names), 3))
if len(names) == 1:
    axes = [axes]
for ax, name in zip(axes, names):
    d = np.array(maps[name])
    thetas, phis = np.unique(d[:, 0]), np.unique(d[:, 1])
    grid = d[:, 2].reshape(len(thetas), len(phis))
    im = ax.pcolormesh(phis, thetas, np.clip(grid, -20, 20), shading="nearest", cmap="RdBu_r")
    ax.set_title(name)
    ax.set_xlabel(r"$\phi$")
    fig.colorbar(im, ax=ax)
axes[0].set_ylabel(r"$\theta$")
fig.tight_layout()
fig.savefig("gauge_potential.png", dpi=150)

curves = defaultdict(list)
with open("gauge_monopole.csv") as f:
    for row in csv.DictReader(f):
        curves[(row["gauge"], row["point"])].append((float(row["step"]), float(row["relative_error"])))
fig, ax = plt.subplots(figsize=(4, 3.2))
for (gauge, point), pts in curves.items():
    pts = np.array(sorted(pts))
    ax.loglog(pts[:, 0], pts[:, 1], color="0.4", lw=0.6)
h = np.array(sorted({s for pts in curves.values() for s, _ in pts}))
ax.loglog(h, h**2 * max(e for pts in curves.values() for _, e in pts) / h.max() ** 2, "k--", label="slope 2")
ax.set_xlabel("step")
ax.set_ylabel("relative curl error")
ax.legend()
fig.tight_layout()
fig.savefig("gauge_monopole.png", dpi=150)
