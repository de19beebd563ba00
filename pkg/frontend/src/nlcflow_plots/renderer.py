"""Render log-log decay curves from norms.csv / decay.csv run artifacts.

This is a pure post-processing step: it reads the documented CSV schemas,
draws each requested quantity against (1+t) on log-log axes, overlays a
reference power law anchored at the first plotted point, and annotates the
least-squares slope of the data in the legend.  Nothing is recomputed from
the model; re-rendering the same CSV bytes reproduces the same plotted
values and annotations.

norms.csv:  time, then one column per labeled norm.
decay.csv:  component, k, exponent, r2, window_lo, window_hi.
"""

from __future__ import annotations

import argparse
import csv
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["PlotSpec", "render", "fit_slope", "reference_exponent",
           "decay_annotations", "main"]


@dataclass
class PlotSpec:
    norms_csv: Path | None = None
    decay_csv: Path | None = None
    out_dir: Path = Path(".")
    quantities: list = field(default_factory=list)  # empty -> every positive column
    reference_exponents: dict = field(default_factory=dict)  # column -> slope


def _read_csv(path) -> tuple:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if len(rows) < 2:
        raise ValueError(f"no data rows in {path}")
    return rows[0], rows[1:]


def read_norms(path) -> dict:
    header, rows = _read_csv(path)
    return {name: np.array([float(r[j]) for r in rows])
            for j, name in enumerate(header)}


def fit_slope(times: np.ndarray, values: np.ndarray) -> float:
    """Least-squares slope of log(value) vs log(1+t)."""
    x = np.log(1.0 + times)
    y = np.log(values)
    return float(np.polyfit(x, y, 1)[0])


def reference_exponent(column: str) -> float | None:
    """Default reference slope -(3+2k)/4 for columns carrying a gradient order."""
    match = re.search(r"grad(\d+)", column)
    if match is None:
        return None
    k = int(match.group(1))
    return -(3.0 + 2.0 * k) / 4.0


def _render_quantity(times, values, name, ref, out_dir) -> Path:
    slope = fit_slope(times, values)
    fig, ax = plt.subplots(figsize=(5.0, 3.75))
    ax.loglog(1.0 + times, values, "o-", ms=3, lw=1,
              label=f"{name} (fit slope {slope:+.3f})")
    if ref is not None:
        anchor = values[0] * ((1.0 + times) / (1.0 + times[0])) ** ref
        ax.loglog(1.0 + times, anchor, "k--", lw=1,
                  label=f"reference slope {ref:+.3f}")
    ax.set_xlabel("1 + t")
    ax.set_ylabel(name)
    ax.legend(fontsize=8)
    fig.tight_layout()
    out = Path(out_dir) / f"{name}.png"
    fig.savefig(out, dpi=110)
    plt.close(fig)
    return out


def decay_annotations(decay_csv) -> list:
    """One annotation string per decay.csv row; exponents quoted verbatim."""
    header, rows = _read_csv(decay_csv)
    idx = {name: j for j, name in enumerate(header)}
    for needed in ("component", "k", "exponent", "r2"):
        if needed not in idx:
            raise ValueError(f"column {needed!r} not found in {decay_csv}")
    return [
        f"{r[idx['component']]} (k={r[idx['k']]}): exponent {r[idx['exponent']]}, "
        f"r2 {r[idx['r2']]}"
        for r in rows
    ]


def _render_decay_summary(decay_csv, out_dir) -> Path:
    notes = decay_annotations(decay_csv)
    fig, ax = plt.subplots(figsize=(6.0, 0.5 + 0.3 * len(notes)))
    ax.axis("off")
    for i, text in enumerate(notes):
        ax.text(0.02, 1.0 - (i + 1) / (len(notes) + 1), text,
                fontsize=9, family="monospace", transform=ax.transAxes)
    out = Path(out_dir) / "decay_summary.png"
    fig.savefig(out, dpi=110)
    plt.close(fig)
    return out


def render(spec: PlotSpec) -> dict:
    """Render every requested quantity; returns {name: (path, fitted slope)}
    plus a decay summary entry when decay.csv is given."""
    out_dir = Path(spec.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = {}

    if spec.norms_csv is not None:
        data = read_norms(spec.norms_csv)
        if "time" not in data:
            raise ValueError(f"column 'time' not found in {spec.norms_csv}")
        times = data["time"]
        names = spec.quantities or [
            c for c in data if c != "time" and np.all(data[c] > 0.0)
        ]
        for name in names:
            if name not in data:
                raise ValueError(f"column {name!r} not found in {spec.norms_csv}")
            if np.any(data[name] <= 0.0):
                raise ValueError(f"column {name!r} has nonpositive entries; "
                                 "cannot draw on log axes")
            ref = spec.reference_exponents.get(name, reference_exponent(name))
            path = _render_quantity(times, data[name], name, ref, out_dir)
            results[name] = (path, fit_slope(times, data[name]))

    if spec.decay_csv is not None:
        path = _render_decay_summary(spec.decay_csv, out_dir)
        results["decay_summary"] = (path, None)
    return results


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="nlcflow-plots",
        description="Render log-log decay plots from norms.csv / decay.csv")
    parser.add_argument("--norms", default=None, help="path to norms.csv")
    parser.add_argument("--decay", default=None, help="path to decay.csv")
    parser.add_argument("--out", required=True, help="output directory for images")
    parser.add_argument("--quantity", action="append", default=[],
                        help="norm column to plot (repeatable; default: all positive)")
    parser.add_argument("--reference", action="append", default=[],
                        metavar="COLUMN=SLOPE",
                        help="override the reference slope for one column")
    args = parser.parse_args(argv)
    if args.norms is None and args.decay is None:
        parser.error("need at least one of --norms / --decay")
    refs = {}
    for item in args.reference:
        name, _, value = item.partition("=")
        refs[name] = float(value)
    spec = PlotSpec(
        norms_csv=Path(args.norms) if args.norms else None,
        decay_csv=Path(args.decay) if args.decay else None,
        out_dir=Path(args.out),
        quantities=args.quantity,
        reference_exponents=refs,
    )
    try:
        results = render(spec)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for name, (path, slope) in results.items():
        note = f" (fit slope {slope:+.4f})" if slope is not None else ""
        print(f"wrote {path}{note}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
