"""Report figures. Agg backend only; PNG metadata is stripped so reruns match byte for byte."""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_META = {"Software": None}


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata=_META)
    plt.close(fig)
    return path


def sweep_figure(rows: list[dict], path: Path) -> Path:
    """abs_err against sigma on log axes, one line per quantity.

    Exact zeros have no place on a log axis and are left out.
    """
    fig, ax = plt.subplots(figsize=(6, 4))
    by_q: dict[str, list[tuple[float, float]]] = {}
    for r in rows:
        if r["abs_err"] == "" or float(r["abs_err"]) == 0.0:
            continue
        by_q.setdefault(r["quantity"], []).append((float(r["sigma"]), float(r["abs_err"])))
    for q, pts in sorted(by_q.items()):
        pts.sort()
        ax.loglog([p[0] for p in pts], [p[1] for p in pts], marker="o", label=q)
    ax.set_xlabel("sigma")
    ax.set_ylabel("|value - reference|")
    ax.grid(True, which="both", alpha=0.3)
    if by_q:
        ax.legend()
    return _save(fig, path)


def scan_figure(report, path: Path) -> Path:
    """Isolated real roots in delta for every (n, C, a) cell."""
    fig, ax = plt.subplots(figsize=(6, 4))
    labels = []
    for i, cell in enumerate(report.cells):
        labels.append(f"n={cell.n} C={cell.C_val} a={cell.a}")
        xs = [float((r.lo + r.hi) / 2) for r in cell.roots]
        ax.scatter(xs, [i] * len(xs), marker="|", s=200, color="k")
        if cell.is_zero:
            ax.text(0, i, "identically zero", color="r", va="center")
    for (n, C), star in sorted(report.delta_star.items()):
        if star.get("delta") is not None:
            ax.axvline(float(Fraction(star["delta"])), color="tab:green", ls="--", lw=1)
    ax.set_yticks(range(len(labels)))
    ax.set_yticklabels(labels)
    ax.set_xlabel("delta (real roots of the resultant)")
    ax.grid(True, axis="x", alpha=0.3)
    return _save(fig, path)
