"""Render error-curve figures with 1-sd bands from summary CSVs.

The renderer is a pure function of the parsed CSV rows: the SVG is
assembled as text with fixed styling, fixed float formatting, and no
timestamps, so the same input always yields byte-identical output. Each
mean polyline and band polygon also carries ``data-*`` attributes holding
the exact data values (repr round-trip), which is what the fidelity tests
compare against the CSV.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

__all__ = ["PlotSpec", "read_summary_rows", "render", "render_svg"]

# fixed per-method styling; unknown methods fall back in sorted order
_METHOD_STYLE = {
    "uniform": ("Uniform", "#1f77b4"),
    "effective_resistance": ("EffectiveResistance", "#d62728"),
}
_FALLBACK_COLORS = ["#2ca02c", "#9467bd", "#8c564b", "#e377c2"]

PANEL_W = 320
PANEL_H = 240
MARGIN_L = 58
MARGIN_R = 16
MARGIN_T = 38
MARGIN_B = 46
LEGEND_H = 26


class PlotError(ValueError):
    """Bad plot specification or malformed input CSV."""


@dataclass(frozen=True)
class PlotSpec:
    csv_paths: tuple[str, ...]
    panel_key: str
    x: str
    y: str
    out: str
    format: str = "svg"

    def __post_init__(self):
        if not self.csv_paths:
            raise PlotError("at least one input CSV required")
        if self.format not in ("svg", "png"):
            raise PlotError(f"format must be 'svg' or 'png', got {self.format!r}")

    @property
    def y_mean(self) -> str:
        return f"{self.y}_mean"

    @property
    def y_sd(self) -> str:
        return f"{self.y}_sd"


def read_summary_rows(paths: tuple[str, ...]) -> list[dict]:
    """Read schema=1 summary CSVs, skipping comment lines."""
    rows: list[dict] = []
    for path in paths:
        text = Path(path).read_text(encoding="utf-8")
        lines = text.splitlines()
        if not lines or not lines[0].strip().startswith("# schema=1"):
            raise PlotError(f"{path}: missing '# schema=1' header")
        data_lines = [ln for ln in lines if ln and not ln.startswith("#")]
        reader = csv.DictReader(data_lines)
        rows.extend(reader)
    if not rows:
        raise PlotError("no data rows in input")
    return rows


def _series(rows: list[dict], spec: PlotSpec):
    """Group rows into {panel: {method: sorted [(x, mean, sd)]}} preserving panel order."""
    for col in (spec.panel_key, spec.x, spec.y_mean, spec.y_sd, "method"):
        if col not in rows[0]:
            raise PlotError(f"column {col!r} not found in CSV header")
    panels: dict[str, dict[str, list[tuple[float, float, float]]]] = {}
    panel_order: list[str] = []
    for row in rows:
        panel = row[spec.panel_key]
        if panel not in panels:
            panels[panel] = {}
            panel_order.append(panel)
        method = row["method"]
        panels[panel].setdefault(method, []).append(
            (float(row[spec.x]), float(row[spec.y_mean]), float(row[spec.y_sd]))
        )
    for methods in panels.values():
        for pts in methods.values():
            pts.sort(key=lambda t: t[0])
    return panels, panel_order


def _style_for(method: str, index: int) -> tuple[str, str]:
    if method in _METHOD_STYLE:
        return _METHOD_STYLE[method]
    return method, _FALLBACK_COLORS[index % len(_FALLBACK_COLORS)]


def _fmt_coord(v: float) -> str:
    return f"{v:.3f}"


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def _esc(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def render_svg(spec: PlotSpec) -> str:
    """Build the multi-panel SVG document as a string."""
    rows = read_summary_rows(spec.csv_paths)
    panels, panel_order = _series(rows, spec)

    # global y range across panels keeps panels comparable
    all_upper = []
    all_lower = []
    for methods in panels.values():
        for pts in methods.values():
            all_upper.extend(m + s for _, m, s in pts)
            all_lower.extend(m - s for _, m, s in pts)
    y_hi = max(all_upper)
    y_lo = min(0.0, min(all_lower))
    if y_hi <= y_lo:
        y_hi = y_lo + 1.0
    y_hi *= 1.05

    method_names = sorted({m for methods in panels.values() for m in methods})

    total_w = MARGIN_L + len(panel_order) * (PANEL_W + MARGIN_R)
    total_h = MARGIN_T + PANEL_H + MARGIN_B + LEGEND_H
    out: list[str] = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{total_w}" height="{total_h}" '
        f'viewBox="0 0 {total_w} {total_h}" font-family="Helvetica, Arial, sans-serif">'
    )
    out.append(f'<rect width="{total_w}" height="{total_h}" fill="white"/>')

    for p_idx, panel in enumerate(panel_order):
        methods = panels[panel]
        x_vals = sorted({x for pts in methods.values() for x, _, _ in pts})
        x_lo, x_hi = min(x_vals), max(x_vals)
        if x_hi <= x_lo:
            x_hi = x_lo + 1.0
        pad = 0.04 * (x_hi - x_lo)
        x_lo -= pad
        x_hi += pad

        ox = MARGIN_L + p_idx * (PANEL_W + MARGIN_R)
        oy = MARGIN_T

        def sx(x: float) -> float:
            return ox + (x - x_lo) / (x_hi - x_lo) * PANEL_W

        def sy(y: float) -> float:
            return oy + PANEL_H - (y - y_lo) / (y_hi - y_lo) * PANEL_H

        out.append(f'<g class="panel" data-panel="{_esc(panel)}">')
        out.append(
            f'<rect x="{ox}" y="{oy}" width="{PANEL_W}" height="{PANEL_H}" '
            f'fill="none" stroke="#444" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{ox + PANEL_W / 2:.1f}" y="{oy - 10}" text-anchor="middle" '
            f'font-size="13">{_esc(spec.panel_key)}={_esc(panel)}</text>'
        )
        # x ticks at the data points themselves (budget sweeps are short)
        for xv in x_vals:
            px = sx(xv)
            out.append(
                f'<line x1="{px:.3f}" y1="{oy + PANEL_H}" x2="{px:.3f}" '
                f'y2="{oy + PANEL_H + 4}" stroke="#444"/>'
            )
            out.append(
                f'<text x="{px:.3f}" y="{oy + PANEL_H + 16}" text-anchor="middle" '
                f'font-size="10">{xv:g}</text>'
            )
        for yv in _ticks(y_lo, y_hi):
            py = sy(yv)
            out.append(
                f'<line x1="{ox - 4}" y1="{py:.3f}" x2="{ox}" y2="{py:.3f}" stroke="#444"/>'
            )
            out.append(
                f'<text x="{ox - 7}" y="{py + 3:.3f}" text-anchor="end" '
                f'font-size="10">{yv:.3g}</text>'
            )
        out.append(
            f'<text x="{ox + PANEL_W / 2:.1f}" y="{oy + PANEL_H + 34}" '
            f'text-anchor="middle" font-size="11">{_esc(spec.x)}</text>'
        )
        if p_idx == 0:
            cx = ox - 42
            cy = oy + PANEL_H / 2
            out.append(
                f'<text x="{cx}" y="{cy:.1f}" text-anchor="middle" font-size="11" '
                f'transform="rotate(-90 {cx} {cy:.1f})">{_esc(spec.y)}</text>'
            )

        for m_idx, method in enumerate(sorted(methods)):
            pts = methods[method]
            label, color = _style_for(method, m_idx)
            upper = [(x, m + s) for x, m, s in pts]
            lower = [(x, m - s) for x, m, s in pts]
            band_points = " ".join(
                f"{sx(x):.3f},{sy(y):.3f}" for x, y in upper + lower[::-1]
            )
            upper_vals = ",".join(repr(y) for _, y in upper)
            lower_vals = ",".join(repr(y) for _, y in lower)
            out.append(
                f'<polygon class="band" data-method="{_esc(method)}" '
                f'data-upper="{upper_vals}" data-lower="{lower_vals}" '
                f'points="{band_points}" fill="{color}" fill-opacity="0.18" stroke="none"/>'
            )
            line_points = " ".join(f"{sx(x):.3f},{sy(m):.3f}" for x, m, _ in pts)
            xs_vals = ",".join(repr(x) for x, _, _ in pts)
            mean_vals = ",".join(repr(m) for _, m, _ in pts)
            out.append(
                f'<polyline class="mean" data-method="{_esc(method)}" '
                f'data-x="{xs_vals}" data-y="{mean_vals}" '
                f'points="{line_points}" fill="none" stroke="{color}" stroke-width="1.8"/>'
            )
            for x, m, _ in pts:
                out.append(
                    f'<circle cx="{sx(x):.3f}" cy="{sy(m):.3f}" r="2.4" fill="{color}"/>'
                )
        out.append("</g>")

    # legend strip under the panels
    lx = MARGIN_L
    ly = MARGIN_T + PANEL_H + MARGIN_B + 6
    for m_idx, method in enumerate(method_names):
        label, color = _style_for(method, m_idx)
        out.append(
            f'<line x1="{lx}" y1="{ly}" x2="{lx + 22}" y2="{ly}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        out.append(
            f'<text x="{lx + 27}" y="{ly + 4}" font-size="12">{_esc(label)}</text>'
        )
        lx += 27 + 9 * len(label) + 24
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _render_png(spec: PlotSpec) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = read_summary_rows(spec.csv_paths)
    panels, panel_order = _series(rows, spec)
    fig, axes = plt.subplots(
        1, len(panel_order), figsize=(4.2 * len(panel_order), 3.4),
        squeeze=False, sharey=True,
    )
    for ax, panel in zip(axes[0], panel_order):
        for m_idx, method in enumerate(sorted(panels[panel])):
            pts = panels[panel][method]
            label, color = _style_for(method, m_idx)
            xs = [x for x, _, _ in pts]
            means = [m for _, m, _ in pts]
            sds = [s for _, _, s in pts]
            ax.plot(xs, means, color=color, label=label, marker="o", ms=3)
            ax.fill_between(
                xs,
                [m - s for m, s in zip(means, sds)],
                [m + s for m, s in zip(means, sds)],
                color=color, alpha=0.18, linewidth=0,
            )
        ax.set_title(f"{spec.panel_key}={panel}", fontsize=11)
        ax.set_xlabel(spec.x)
    axes[0][0].set_ylabel(spec.y)
    axes[0][0].legend(fontsize=9)
    fig.tight_layout()
    fig.savefig(spec.out, format="png", dpi=120)
    plt.close(fig)


def render(spec: PlotSpec) -> Path:
    """Render to the requested format and return the output path."""
    out = Path(spec.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    if spec.format == "svg":
        out.write_text(render_svg(spec), encoding="utf-8")
    else:
        _render_png(spec)
    return out
