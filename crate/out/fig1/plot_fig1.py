#!/usr/bin/env python3
"""Plot error_l2 and the lower bound per target spectral radius.

usage: plot_fig1.py [fig1_plot_data.csv] [output.png]
"""
import csv
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

src = sys.argv[1] if len(sys.argv) > 1 else "fig1_plot_data.csv"
dst = sys.argv[2] if len(sys.argv) > 2 else "fig1.png"

curves = defaultdict(lambda: ([], [], [], []))
with open(src, newline="") as f:
    for row in csv.DictReader(f):
        n, err, nb, lb = curves[row["target_rho"]]
        n.append(int(row["n"]))
        err.append(float(row["error_l2"]))
        if row["lower_bound"]:
            nb.append(int(row["n"]))
            lb.append(float(row["lower_bound"]))

fig, ax = plt.subplots(figsize=(6, 4))
for rho, (n, err, nb, lb) in sorted(curves.items(), key=lambda kv: float(kv[0])):
    line, = ax.semilogy(n, err, label=f"FPI, rho = {float(rho):.3g}")
    ax.semilogy(nb, lb, "--", color=line.get_color(), label=f"lower bound, rho = {float(rho):.3g}")
ax.set_xlabel("iteration n")
ax.set_ylabel("||x_n - x*||_2")
ax.grid(True, which="both", alpha=0.3)
ax.legend()
fig.tight_layout()
fig.savefig(dst, dpi=150)
