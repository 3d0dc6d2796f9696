#!/usr/bin/env python3
"""Render publication-style figures from solver CSV outputs.

Reads the CSV files a simulation directory contains (traces.csv,
picard.csv, defect.csv, region.csv) and writes one figure per plot kind
plus a combined overlay for the norm traces.  No computation of record
happens here and the solver package is never imported; the inputs are
plain files.

Usage:
    python render.py --in <dir> --out <dir> [--format png|svg]
                     [--N <dim> --gamma <rational>]

The optional --N/--gamma pair draws the closed-form feasibility curve on
the region figure.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from fractions import Fraction
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# pinned rendering settings: identical inputs must give identical bytes
matplotlib.rcParams.update({
    "svg.hashsalt": "boltzlab-plots",
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "font.size": 10,
})

_SAVE_METADATA = {"svg": {"Date": None}, "png": {"Software": "render.py"}}


def _read_rows(path: Path) -> list[dict]:
    if not path.is_file():
        raise FileNotFoundError(f"missing CSV: {path}")
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{path}: 0 data rows")
    return rows


def _save(fig, out_dir: Path, stem: str, fmt: str) -> Path:
    out = out_dir / f"{stem}.{fmt}"
    fig.savefig(out, format=fmt, metadata=_SAVE_METADATA[fmt])
    plt.close(fig)
    return out


def plot_traces(csv_path: Path, out_dir: Path, fmt: str = "svg") -> list[Path]:
    """Norm-vs-time curves: one figure per trace plus a combined overlay."""
    rows = _read_rows(csv_path)
    t = [float(r["t"]) for r in rows]
    written = []
    series = {
        "norm_a": ("container norm", "tab:blue"),
        "norm_rp": ("mixed space-velocity norm", "tab:orange"),
    }
    for key, (label, color) in series.items():
        y = [float(r[key]) for r in rows]
        fig, ax = plt.subplots()
        ax.plot(t, y, color=color, marker="o", markersize=3)
        ax.set_xlabel("t")
        ax.set_ylabel(label)
        ax.set_title(f"{label} along the trajectory")
        ax.grid(True, alpha=0.3)
        written.append(_save(fig, out_dir, f"traces_{key}", fmt))
    fig, ax = plt.subplots()
    for key, (label, color) in series.items():
        ax.plot(t, [float(r[key]) for r in rows], color=color, label=label)
    ax.set_xlabel("t")
    ax.set_ylabel("norm")
    ax.set_title("norm traces")
    ax.legend()
    ax.grid(True, alpha=0.3)
    written.append(_save(fig, out_dir, "traces_overlay", fmt))
    return written


def plot_picard(csv_path: Path, out_dir: Path, fmt: str = "svg") -> list[Path]:
    """Iterate deltas on a log scale with the fitted geometric ratio."""
    rows = _read_rows(csv_path)
    iters = [int(r["iter"]) for r in rows]
    deltas = [float(r["delta"]) for r in rows]
    fig, ax = plt.subplots()
    ax.semilogy(iters, deltas, marker="o", color="tab:green")
    ax.set_xlabel("iteration")
    ax.set_ylabel("sup-in-time iterate change")
    ax.set_title("fixed-point iteration")
    ax.grid(True, which="both", alpha=0.3)
    positive = [(i, d) for i, d in zip(iters, deltas) if d > 0]
    if len(positive) >= 3:
        xs = [i for i, _ in positive[1:]]
        ys = [math.log(d) for _, d in positive[1:]]
        n = len(xs)
        sx, sy = sum(xs), sum(ys)
        sxx = sum(x * x for x in xs)
        sxy = sum(x * y for x, y in zip(xs, ys))
        slope = (n * sxy - sx * sy) / (n * sxx - sx * sx)
        ax.annotate(f"fitted ratio = {math.exp(slope):.3f}",
                    xy=(0.55, 0.85), xycoords="axes fraction")
    return [_save(fig, out_dir, "picard", fmt)]


def plot_defect(csv_path: Path, out_dir: Path, fmt: str = "svg") -> list[Path]:
    """Scattering-defect decay with the truncation point marked."""
    rows = _read_rows(csv_path)
    t = [float(r["t"]) for r in rows]
    d = [float(r["defect"]) for r in rows]
    fig, ax = plt.subplots()
    ax.plot(t, d, marker="o", markersize=3, color="tab:red")
    ax.axvline(t[-1], linestyle="--", color="gray", alpha=0.7)
    ax.annotate(f"truncation horizon = {t[-1]:g}", xy=(0.45, 0.9),
                xycoords="axes fraction")
    ax.set_xlabel("t")
    ax.set_ylabel("defect")
    ax.set_title("distance to the scattering asymptote")
    ax.grid(True, alpha=0.3)
    return [_save(fig, out_dir, "defect", fmt)]


def plot_region(csv_path: Path, out_dir: Path, fmt: str = "svg",
                n_dim: int | None = None, gamma: Fraction | None = None) -> list[Path]:
    """Feasible (1/p, 1/r) points with the closed-form family curve."""
    rows = _read_rows(csv_path)
    inv_p = [float(Fraction(r["inv_p"])) for r in rows]
    inv_r = [float(Fraction(r["inv_r"])) for r in rows]
    fig, ax = plt.subplots()
    ax.scatter(inv_p, inv_r, s=14, color="tab:purple", zorder=3,
               label="lattice scan")
    if n_dim is not None and gamma is not None and inv_p:
        lo, hi = min(inv_p), max(inv_p)
        pad = 0.05 * (hi - lo) if hi > lo else 0.01
        xs = [lo - pad + (hi - lo + 2 * pad) * k / 200 for k in range(201)]
        c = 1.0 + float(gamma) / n_dim
        ax.plot(xs, [c - x for x in xs], color="black", linewidth=1,
                label="closed-form family")
        ax.legend()
    ax.set_xlabel("1/p")
    ax.set_ylabel("1/r")
    ax.set_title("feasible exponent pairs")
    ax.grid(True, alpha=0.3)
    return [_save(fig, out_dir, "region", fmt)]


KNOWN = {
    "traces.csv": plot_traces,
    "picard.csv": plot_picard,
    "defect.csv": plot_defect,
    "region.csv": plot_region,
}


def render_directory(in_dir: Path, out_dir: Path, fmt: str,
                     n_dim: int | None = None,
                     gamma: Fraction | None = None) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    found = False
    for name, fn in KNOWN.items():
        path = in_dir / name
        if not path.is_file():
            continue
        found = True
        if fn is plot_region:
            written.extend(fn(path, out_dir, fmt, n_dim=n_dim, gamma=gamma))
        else:
            written.extend(fn(path, out_dir, fmt))
    if not found:
        raise FileNotFoundError(f"no known CSV files in {in_dir}")
    return written


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--in", dest="in_dir", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--format", default="svg", choices=("png", "svg"))
    parser.add_argument("--N", type=int, default=None)
    parser.add_argument("--gamma", default=None)
    args = parser.parse_args(argv)
    gamma = Fraction(args.gamma) if args.gamma is not None else None
    try:
        written = render_directory(Path(args.in_dir), Path(args.out), args.format,
                                   n_dim=args.N, gamma=gamma)
    except (FileNotFoundError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
