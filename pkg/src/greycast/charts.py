"""Deterministic standalone SVG line charts of actual vs predicted series."""

from __future__ import annotations

WIDTH, HEIGHT = 720, 420
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 70, 20, 20, 50

_SERIES_STYLE = {
    "actual": ('stroke="#222222" stroke-width="1.5"', True),
    "predicted": ('stroke="#1f6fb4" stroke-width="1.5"', False),
    "forecast": ('stroke="#c0392b" stroke-width="1.5" stroke-dasharray="5,3"', False),
}


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def render_chart(series_map: dict[str, tuple[list[int], list[float]]],
                 title: str = "") -> str:
    """Build an SVG 1.1 document from named (periods, values) series.

    Byte-identical output for identical input. Keys should be a subset of
    {actual, predicted, forecast}; empty series are skipped.
    """
    series_map = {k: v for k, v in series_map.items() if v[0]}
    if not series_map:
        raise ValueError("no data to chart")
    all_x = [p for xs, _ in series_map.values() for p in xs]
    all_y = [v for _, ys in series_map.values() for v in ys]
    x_min, x_max = min(all_x), max(all_x)
    y_min, y_max = min(all_y), max(all_y)
    if y_max == y_min:
        y_min, y_max = y_min - 1.0, y_max + 1.0
    pad = 0.05 * (y_max - y_min)
    y_min, y_max = y_min - pad, y_max + pad
    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def sx(p):
        if x_max == x_min:
            return MARGIN_LEFT + plot_w / 2
        return MARGIN_LEFT + (p - x_min) / (x_max - x_min) * plot_w

    def sy(v):
        return MARGIN_TOP + (y_max - v) / (y_max - y_min) * plot_h

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="#999999" stroke-width="1"/>',
    ]
    if title:
        parts.append(
            f'<text x="{WIDTH // 2}" y="14" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{title}</text>'
        )
    # axis ticks: 5 evenly spaced labels per axis
    for i in range(5):
        frac = i / 4
        yv = y_min + frac * (y_max - y_min)
        ypix = sy(yv)
        parts.append(
            f'<text x="{MARGIN_LEFT - 6}" y="{_fmt(ypix + 3)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10">{_fmt(yv)}</text>'
        )
        xv = x_min + frac * (x_max - x_min)
        xpix = sx(xv)
        parts.append(
            f'<text x="{_fmt(xpix)}" y="{HEIGHT - MARGIN_BOTTOM + 16}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{xv:.0f}</text>'
        )
    legend_y = MARGIN_TOP + 14
    for name in ("actual", "predicted", "forecast"):
        if name not in series_map:
            continue
        xs, ys = series_map[name]
        style, markers = _SERIES_STYLE[name]
        points = " ".join(f"{_fmt(sx(p))},{_fmt(sy(v))}" for p, v in zip(xs, ys))
        parts.append(f'<polyline fill="none" {style} points="{points}"/>')
        if markers:
            for p, v in zip(xs, ys):
                parts.append(
                    f'<circle cx="{_fmt(sx(p))}" cy="{_fmt(sy(v))}" r="2.2" fill="#222222"/>'
                )
        color = style.split('"')[1]
        parts.append(
            f'<line x1="{MARGIN_LEFT + 10}" y1="{legend_y}" x2="{MARGIN_LEFT + 34}" '
            f'y2="{legend_y}" {style}/>'
        )
        parts.append(
            f'<text x="{MARGIN_LEFT + 40}" y="{legend_y + 4}" font-family="sans-serif" '
            f'font-size="11" fill="{color}">{name}</text>'
        )
        legend_y += 16
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_chart(actual, predicted, forecast, path, title: str = "") -> None:
    """Write the chart for (periods, values) pairs to ``path``.

    Each argument is a (periods, values) pair; pass empty sequences to omit a
    series (e.g. no forecast segment).
    """
    svg = render_chart(
        {"actual": actual, "predicted": predicted, "forecast": forecast}, title=title
    )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(svg)
