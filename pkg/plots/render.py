#!/usr/bin/env python3
"""Render sweep CSVs into log-log scaling figures with a fitted slope.

Reads only the published sweep CSV schema (one row per trial plus
aggregate rows marked trial = -1); never invokes the generator binary.

Usage:
    plots/render.py <csv> --x m_bar --y outcome_checks --out fig.png
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

#: published sweep schema, in order
SWEEP_COLUMNS = [
    "n",
    "theta",
    "q",
    "m_bar",
    "C1",
    "C2",
    "C_prime",
    "trial",
    "seed",
    "m",
    "tests_total",
    "outcome_checks",
    "pd_max",
    "success",
    "false_positives",
    "typicality_pass",
    "decode_ms",
    "error",
]

NUMERIC_METRICS = {
    "n",
    "theta",
    "q",
    "m_bar",
    "m",
    "tests_total",
    "outcome_checks",
    "pd_max",
    "success",
    "false_positives",
    "typicality_pass",
    "decode_ms",
}


class SchemaError(Exception):
    """CSV does not conform to the sweep schema."""


@dataclass
class SweepFrame:
    rows: list[dict]

    @classmethod
    def from_csv(cls, path: str) -> "SweepFrame":
        with open(path, newline="", encoding="utf-8") as f:
            reader = csv.DictReader(f)
            header = reader.fieldnames or []
            missing = [c for c in SWEEP_COLUMNS if c not in header]
            if missing:
                raise SchemaError(f"missing required columns: {missing}")
            rows = list(reader)
        if not rows:
            raise SchemaError("no data rows")
        return cls(rows=rows)

    def _split(self) -> tuple[list[dict], list[dict]]:
        trials, aggregates = [], []
        for r in self.rows:
            if r.get("error"):
                continue
            try:
                is_aggregate = int(float(r["trial"])) < 0
            except ValueError:
                continue
            (aggregates if is_aggregate else trials).append(r)
        return trials, aggregates

    def trial_rows(self) -> list[dict]:
        """Per-trial rows; aggregates (trial == -1) and errored rows excluded."""
        return self._split()[0]

    def fit_rows(self) -> list[dict]:
        """Rows used for fitting: the per-config aggregate rows when the
        producer emitted them (per-config means damp the skew of
        individual trials), otherwise the per-trial rows."""
        trials, aggregates = self._split()
        return aggregates or trials

    def series(self, x_metric: str, y_metric: str) -> tuple[np.ndarray, np.ndarray]:
        for metric in (x_metric, y_metric):
            if metric not in NUMERIC_METRICS:
                raise SchemaError(f"{metric!r} is not a numeric sweep metric")
        xs, ys = [], []
        for r in self.fit_rows():
            x = float(r[x_metric])
            y = float(r[y_metric])
            if x > 0 and y > 0:  # log-log plot needs positive values
                xs.append(x)
                ys.append(y)
        if not xs:
            raise SchemaError(f"no positive ({x_metric}, {y_metric}) observations")
        return np.array(xs), np.array(ys)


def fit_loglog_slope(xs: np.ndarray, ys: np.ndarray) -> tuple[float, float]:
    """Least-squares slope and intercept of log(y) on log(x)."""
    lx, ly = np.log(xs), np.log(ys)
    a = np.vstack([lx, np.ones_like(lx)]).T
    (slope, intercept), *_ = np.linalg.lstsq(a, ly, rcond=None)
    return float(slope), float(intercept)


def render(csv_path: str, x_metric: str, y_metric: str, out_path: str) -> float:
    """Draw the log-log scatter with its fitted power law; returns the slope."""
    frame = SweepFrame.from_csv(csv_path)
    xs, ys = frame.series(x_metric, y_metric)
    slope, intercept = fit_loglog_slope(xs, ys)

    plt.rcParams["svg.hashsalt"] = "sweep-render"
    fig, ax = plt.subplots(figsize=(6.4, 4.8), dpi=120)
    ax.scatter(xs, ys, s=22, color="#1f6fb2", alpha=0.75, edgecolors="none", label="trials")
    grid = np.linspace(math.log(xs.min()), math.log(xs.max()), 64)
    ax.plot(
        np.exp(grid),
        np.exp(intercept + slope * grid),
        color="#c0392b",
        linewidth=1.6,
        label=f"fit: slope {slope:.3f}",
    )
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(x_metric)
    ax.set_ylabel(y_metric)
    ax.set_title(f"{y_metric} vs {x_metric} (log-log)")
    ax.legend(loc="upper left")
    ax.grid(True, which="both", alpha=0.25)
    fig.tight_layout()
    fig.savefig(out_path, metadata=_stable_metadata(out_path))
    plt.close(fig)
    return slope


# public alias matching the operation name used by downstream tooling
plot_scaling = render


def _stable_metadata(out_path: str) -> dict | None:
    # strip run-dependent metadata so identical input gives identical bytes
    if out_path.endswith(".png"):
        return {"Software": "sweep-render"}
    if out_path.endswith(".svg"):
        return {"Date": None}
    return None


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv", help="sweep CSV path")
    parser.add_argument("--x", default="m_bar", dest="x_metric")
    parser.add_argument("--y", default="outcome_checks", dest="y_metric")
    parser.add_argument("--out", required=True, help="output image (.png or .svg)")
    args = parser.parse_args(argv)
    try:
        slope = render(args.csv, args.x_metric, args.y_metric, args.out)
    except (SchemaError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out} (fitted slope {slope:.3f})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
