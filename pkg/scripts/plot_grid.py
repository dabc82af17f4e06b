#!/usr/bin/env python3
"""Render grid files as deformed-grid line plots.

Draws the image of the uniform grid lines under each transformation; with
two grids the second is overlaid in red for visual comparison, e.g.

    python3 scripts/plot_grid.py results/phi0.grid results/recon99.grid -o cmp.png

Requires matplotlib (not a package dependency; scripts only).
"""

import argparse
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from diffavg.gridio import read_grid


def draw(ax, grid, color, lw=0.7):
    coords = grid.coords
    for i in range(coords.shape[0]):
        ax.plot(coords[i, :, 0], coords[i, :, 1], color=color, lw=lw)
    for j in range(coords.shape[1]):
        ax.plot(coords[:, j, 0], coords[:, j, 1], color=color, lw=lw)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("grids", nargs="+", help="one or two grid files")
    parser.add_argument("-o", "--out", default="grid.png")
    parser.add_argument("--dpi", type=int, default=150)
    args = parser.parse_args()
    if len(args.grids) > 2:
        parser.error("at most two grids can be overlaid")

    fig, ax = plt.subplots(figsize=(6, 6))
    draw(ax, read_grid(args.grids[0]), "black")
    if len(args.grids) == 2:
        draw(ax, read_grid(args.grids[1]), "red", lw=0.5)
    ax.set_aspect("equal")
    ax.set_xlim(-0.02, 1.02)
    ax.set_ylim(-0.02, 1.02)
    ax.set_title(" vs ".join(args.grids))
    fig.tight_layout()
    fig.savefig(args.out, dpi=args.dpi)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
