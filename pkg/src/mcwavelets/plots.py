"""Figure rendering for benchmark reports.

Every bench subcommand drops a PNG next to its CSV/JSON pair, and
``plot_rate`` re-renders a figure from a JSON report on disk. The slope
printed on a figure is always re-fitted from the plotted points and must
agree with the slope stored in the report; a mismatch means the report
and its rows have drifted apart and rendering is refused.
"""

from __future__ import annotations

import json
import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .experiments import SCHEMA_VERSION, concentration_bound, fit_rate

SLOPE_AGREEMENT = 1e-9


class PlotError(ValueError):
    """Report content unfit for rendering."""


def _series(summary: dict, x_name: str) -> tuple[list, list]:
    if x_name == "tau":
        return summary["tau_values"], summary["errors"]
    return summary["n_values"], summary["medians"]


def _draw(ax, xs, ys, fit_slope: float, fit_intercept: float,
          theory_slope: float, x_label: str, rows=None) -> None:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if rows:
        ax.plot([r[0] for r in rows], [r[3] for r in rows], ".",
                color="0.7", markersize=3, label="trials")
    ax.plot(xs, ys, "o-", color="C0", label="median error")
    grid = np.geomspace(xs.min(), xs.max(), 64)
    ax.plot(grid, np.exp(fit_intercept) * grid**fit_slope, "--", color="C1",
            label=f"fit slope {fit_slope:+.4f}")
    anchor = ys[0] * (grid / xs[0]) ** theory_slope
    ax.plot(grid, anchor, ":", color="C2",
            label=f"reference slope {theory_slope:+.4f}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(x_label)
    ax.set_ylabel("error")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.25)


def render_report(report, path: str) -> str:
    """Render an in-memory ExperimentReport to a PNG."""
    summary = report.summary
    xs, ys = _series(summary, report.x_name)
    fit = summary["fit"]
    fig, ax = plt.subplots(figsize=(6, 4.2), dpi=120)
    rows = report.rows if report.kind != "approximation" else None
    _draw(ax, xs, ys, fit["slope"], fit["intercept"],
          summary["theory_slope"], report.x_name, rows=rows)
    if report.kind == "concentration":
        grid = np.geomspace(min(xs), max(xs), 64)
        for key in sorted(summary.get("coverage", {}), key=float):
            t = float(key)
            bound = [concentration_bound(summary["kappa_sq"], t, g) for g in grid]
            ax.plot(grid, bound, "-", alpha=0.5, linewidth=0.9,
                    label=f"bound t={key}")
        ax.legend(fontsize=8)
    ax.set_title(f"{report.kind} (R^2 {fit['r_squared']:.4f})")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_rate(report_path: str, exponent: float, out_path: str) -> str:
    """Render a log-log error plot from a JSON report file.

    The slope is re-fitted from the summary series and must match the
    stored fit to 1e-9; reports with an unknown schema version or fewer
    than two distinct x values are refused.
    """
    with open(report_path) as fh:
        doc = json.load(fh)
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise PlotError(f"unsupported schema_version {version!r}, "
                        f"expected {SCHEMA_VERSION}")
    summary = doc.get("summary", {})
    x_name = doc.get("x_name", "n")
    try:
        xs, ys = _series(summary, x_name)
    except KeyError as exc:
        raise PlotError(f"report summary is missing {exc}")
    if len(set(xs)) < 2:
        raise PlotError("need at least two distinct x values to fit a rate")
    refit = fit_rate(xs, ys)
    stored = summary.get("fit", {}).get("slope")
    if stored is None or not math.isfinite(stored):
        raise PlotError("report carries no fitted slope")
    if abs(refit.slope - stored) > SLOPE_AGREEMENT:
        raise PlotError(
            f"re-fitted slope {refit.slope!r} disagrees with stored slope "
            f"{stored!r} beyond {SLOPE_AGREEMENT:g}")
    fig, ax = plt.subplots(figsize=(6, 4.2), dpi=120)
    _draw(ax, xs, ys, refit.slope, refit.intercept, float(exponent), x_name)
    ax.set_title(f"{doc.get('kind', 'report')} rate")
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return out_path
