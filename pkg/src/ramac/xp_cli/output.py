"""CSV and SVG emission for sweep results.

CSV column order: the swept variable, analytic columns (alphabetical),
``sim_*`` columns, ``ci_*`` columns (95 % half-widths), then ``status``.
Numbers carry 12 significant digits; NaN marks undefined or failed cells.
"""

from __future__ import annotations

import logging
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
from matplotlib.figure import Figure  # noqa: E402

from ramac.metrics import S_T_INTERPRETATION  # noqa: E402
from ramac.xp_cli.sweep import SweepRow  # noqa: E402

log = logging.getLogger(__name__)

PLOT_FAMILIES = {
    "throughput": "request throughput (grants/frame)",
    "utilization": "data-channel utilization",
    "acceptance": "acceptance probability",
    "net_acceptance": "net acceptance probability",
    "delay": "access delay (attempts)",
    "energy": "request energy (dB)",
}
_FAMILY_COLUMN = {"energy": "energy_db"}

matplotlib.rcParams["svg.hashsalt"] = "ramac"
matplotlib.rcParams["svg.fonttype"] = "none"


def _fmt(v: float) -> str:
    return format(float(v), ".12g")


def columns(rows: list[SweepRow]) -> list[str]:
    if not rows:
        raise ValueError("no rows to emit")
    first = rows[0]
    cols = [first.var] + sorted(first.analytic)
    if first.sim is not None:
        sim_keys = sorted(first.sim)
        cols += [f"sim_{k}" for k in sim_keys] + [f"ci_{k}" for k in sim_keys]
    return cols + ["status"]


def row_cells(row: SweepRow, cols: list[str]) -> list[str]:
    cells = []
    for col in cols:
        if col == row.var:
            cells.append(_fmt(row.value))
        elif col == "status":
            cells.append(row.status)
        elif col.startswith("sim_") and row.sim is not None and col[4:] in row.sim:
            cells.append(_fmt(row.sim[col[4:]]))
        elif col.startswith("ci_") and row.ci is not None and col[3:] in row.ci:
            cells.append(_fmt(row.ci[col[3:]]))
        else:
            cells.append(_fmt(row.analytic[col]))
    return cells


def emit_csv(rows: list[SweepRow], path: str | Path) -> Path:
    path = Path(path)
    cols = columns(rows)
    lines = [",".join(cols)] + [",".join(row_cells(r, cols)) for r in rows]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def emit_metadata(path: str | Path, items: dict[str, object]) -> Path:
    path = Path(path)
    body = {"s_t_interpretation": S_T_INTERPRETATION, **items}
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("".join(f"{k} = {v}\n" for k, v in body.items()))
    return path


def _series(rows: list[SweepRow], key: str, source: str):
    xs, ys, errs = [], [], []
    for r in rows:
        table = r.analytic if source == "analytic" else (r.sim or {})
        v = table.get(key, math.nan)
        if math.isfinite(v):
            xs.append(r.value)
            ys.append(v)
            errs.append((r.ci or {}).get(key, 0.0) if source == "sim" else 0.0)
    errs = [0.0 if not math.isfinite(e) else e for e in errs]
    return xs, ys, errs


def emit_plots(rows: list[SweepRow], directory: str | Path, scenario_name: str) -> list[Path]:
    """One SVG per metric family: analytic lines, simulated points with 95 % error bars."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    if not rows:
        raise ValueError("no rows to plot")
    qos = any(k.endswith("_1") for k in rows[0].analytic)
    suffixes = ("_1", "_2") if qos else ("",)
    written = []
    for family, ylabel in PLOT_FAMILIES.items():
        base = _FAMILY_COLUMN.get(family, family)
        fig = Figure(figsize=(6.4, 4.4))
        ax = fig.add_subplot()
        drawn = 0
        for i, sfx in enumerate(suffixes):
            key = base + sfx
            label = f"class {sfx[1:]}" if sfx else "analytic"
            color = f"C{i}"
            xs, ys, _ = _series(rows, key, "analytic")
            if xs:
                ax.plot(xs, ys, "-", color=color, label=label if not qos else f"{label} (analytic)")
                drawn += 1
            xs, ys, errs = _series(rows, key, "sim")
            if xs:
                ax.errorbar(xs, ys, yerr=errs, fmt="o", ms=3, capsize=2, color=color,
                            label=f"{label} (simulation)" if qos else "simulation")
                drawn += 1
        if not drawn:
            log.warning("skipping %s plot for %s: no finite values", family, scenario_name)
            continue
        ax.set_xlabel(rows[0].var)
        ax.set_ylabel(ylabel)
        ax.set_title(f"{scenario_name}: {family.replace('_', ' ')}")
        ax.grid(True, alpha=0.3)
        ax.legend()
        path = directory / f"{scenario_name}_{family}.svg"
        fig.savefig(path, format="svg", metadata={"Date": None, "Creator": "ramac"})
        written.append(path)
    return written
