#!/usr/bin/env python3
"""Render a decoprobe output table as a figure.

Convenience viewer for the CSV files the CLI writes; it is not part of
the tested surface. The table kind is read from the `# decoprobe ...`
header line, so any output file works:

    python3 scripts/plot.py out/fig1.csv
    python3 scripts/plot.py out/fig6b.csv -o valleys.png
"""

import argparse
import math
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read_table(path):
    """Header metadata plus float-or-string data rows."""
    meta = {"notes": []}
    rows = []
    header_seen = False
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("# decoprobe "):
                meta["command"] = line.split()[-1]
            elif line.startswith("# model "):
                meta["model"] = line.split()[-1]
            elif line.startswith("# columns ") or line.startswith("# units ") or line.startswith("# config "):
                pass
            elif line.startswith("# "):
                meta["notes"].append(line[2:])
            elif not header_seen:
                meta["columns"] = line.split(",")
                header_seen = True
            else:
                rows.append(line.split(","))
    data = {}
    for j, name in enumerate(meta["columns"]):
        try:
            data[name] = [float(r[j]) for r in rows]
        except ValueError:
            data[name] = [r[j] for r in rows]
    meta["data"] = data
    return meta


def vertex_marks(meta):
    """`vertex <label> at s = <pos>` notes as (label, position) pairs."""
    marks = []
    for note in meta["notes"]:
        parts = note.split()
        if len(parts) == 6 and parts[0] == "vertex" and parts[2] == "at":
            marks.append((parts[1], float(parts[5])))
    return marks


def plot_sweep(meta, ax):
    name = meta["columns"][0]
    x, y, cusp = meta["data"][name], meta["data"]["diagnostic"], meta["data"]["is_cusp"]
    ax.plot(x, y, lw=1.0, color="tab:blue")
    hits = [(xi, yi) for xi, yi, c in zip(x, y, cusp) if c == 1]
    if hits:
        ax.plot(*zip(*hits), "v", color="tab:red", ms=7, label="cusp candidate")
        ax.legend(frameon=False)
    ax.set_xlabel(name)
    ax.set_ylabel(meta["notes"][0] if meta["notes"] else "diagnostic")


def plot_kmap(meta, ax, fig):
    cols = meta["columns"]
    if cols[:2] != ["kx", "ky"]:
        sys.exit("kmap plotting supports two momentum axes")
    kx, ky, z = meta["data"]["kx"], meta["data"]["ky"], meta["data"]["lk2"]
    xs, ys = sorted(set(kx)), sorted(set(ky))
    grid = [[math.nan] * len(xs) for _ in ys]
    ix = {v: i for i, v in enumerate(xs)}
    iy = {v: i for i, v in enumerate(ys)}
    for a, b, v in zip(kx, ky, z):
        grid[iy[b]][ix[a]] = v
    im = ax.pcolormesh(xs, ys, grid, shading="nearest", cmap="viridis")
    fig.colorbar(im, ax=ax, label="|L_k|^2")
    ax.set_xlabel("kx")
    ax.set_ylabel("ky")
    ax.set_aspect("equal")


def plot_path(meta, fig):
    d = meta["data"]
    bands = [c for c in meta["columns"] if c.startswith("band_")]
    top, bottom = fig.subplots(2, 1, sharex=True, height_ratios=[2, 1])
    for b in bands:
        top.plot(d["s"], d[b], lw=0.9, color="tab:blue")
    top.axhline(0.0, color="0.7", lw=0.6, zorder=0)
    top.set_ylabel("energy")
    bottom.plot(d["s"], d["lk2"], lw=1.0, color="tab:red")
    bottom.set_ylabel("|L_k|^2")
    bottom.set_xlabel("s")
    marks = vertex_marks(meta)
    if marks:
        bottom.set_xticks([m[1] for m in marks], [m[0] for m in marks])
        for _, pos in marks:
            for ax in (top, bottom):
                ax.axvline(pos, color="0.85", lw=0.6, zorder=0)


def plot_series(meta, ax):
    d = meta["data"]
    ax.plot(d["t"], d["lk2"], lw=1.0, color="tab:blue")
    ax.set_xlabel("t")
    ax.set_ylabel("|L|^2")
    ax.set_ylim(-0.02, 1.02)
    if meta["notes"]:
        ax.set_title(meta["notes"][0], fontsize=9)


def plot_spectrum(meta, fig):
    d = meta["data"]
    cols = meta["columns"]
    ax = fig.subplots()
    if cols[0] == "index":
        sc = ax.scatter(d["index"], d["energy"], c=d["edge_weight"], s=8, cmap="plasma")
        fig.colorbar(sc, ax=ax, label="edge weight")
        ax.set_xlabel("state index")
    else:
        x = cols[0]  # "k" for strips, "s" for bulk paths
        ax.scatter(d[x], d["energy"], s=1.5, color="tab:blue")
        ax.set_xlabel(x)
        marks = vertex_marks(meta)
        if marks:
            ax.set_xticks([m[1] for m in marks], [m[0] for m in marks])
    ax.axhline(0.0, color="0.7", lw=0.6, zorder=0)
    ax.set_ylabel("energy")


def plot_nodes(meta, ax):
    d = meta["data"]
    cols = [c for c in meta["columns"] if c.startswith("k")]
    if len(cols) < 2:
        sys.exit("node plotting needs at least two momentum axes")
    touching = [g < 1e-6 for g in d["gap"]]
    sc = ax.scatter(d[cols[0]], d[cols[1]], c=d["gap"], s=40, cmap="viridis")
    for x, y, t in zip(d[cols[0]], d[cols[1]], touching):
        if t:
            ax.plot(x, y, "x", color="tab:red", ms=10)
    ax.figure.colorbar(sc, ax=ax, label="gap")
    ax.set_xlabel(cols[0])
    ax.set_ylabel(cols[1])


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("table", help="CSV written by decoprobe")
    parser.add_argument("-o", "--output", help="figure file (default: <table>.png)")
    args = parser.parse_args()

    meta = read_table(args.table)
    command = meta.get("command", "")
    fig = plt.figure(figsize=(6.4, 4.4))
    if command == "sweep":
        plot_sweep(meta, fig.subplots())
    elif command == "kmap":
        plot_kmap(meta, fig.subplots(), fig)
    elif command == "path":
        plot_path(meta, fig)
    elif command == "series":
        plot_series(meta, fig.subplots())
    elif command == "spectrum":
        plot_spectrum(meta, fig)
    elif command == "nodes":
        plot_nodes(meta, fig.subplots())
    else:
        sys.exit(f"no plot defined for command {command!r} (topo tables are single numbers)")
    fig.suptitle(f"{meta.get('model', '?')} - {command}", fontsize=10)
    fig.tight_layout()
    out = args.output or args.table.rsplit(".", 1)[0] + ".png"
    fig.savefig(out, dpi=160)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
