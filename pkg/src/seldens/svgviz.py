"""Hand-rolled SVG 1.1 output: scene views, layer views, and line plots.

Colors follow one convention everywhere: checked-valid edges black,
checked-invalid red, unevaluated edges light grey, the final path blue,
obstacles salmon. Output is deterministic for deterministic inputs.
"""

from __future__ import annotations

import numpy as np

VALID_COLOR = "black"
INVALID_COLOR = "red"
UNEVALUATED_COLOR = "#cccccc"
PATH_COLOR = "blue"
OBSTACLE_COLOR = "#f08080"

_PLANNER_PALETTE = [
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
    "#bcbd22",
    "#17becf",
]


def _fmt(x: float) -> str:
    return f"{x:.6g}"


class _SvgWriter:
    def __init__(self, width: float, height: float):
        self.parts = [
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{_fmt(width)}" height="{_fmt(height)}" '
            f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">\n'
        ]

    def rect(self, x, y, w, h, fill, opacity=None):
        op = f' fill-opacity="{_fmt(opacity)}"' if opacity is not None else ""
        self.parts.append(
            f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" '
            f'height="{_fmt(h)}" fill="{fill}"{op}/>\n'
        )

    def line(self, x1, y1, x2, y2, stroke, width=1.0, opacity=None):
        op = f' stroke-opacity="{_fmt(opacity)}"' if opacity is not None else ""
        self.parts.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
            f'stroke="{stroke}" stroke-width="{_fmt(width)}"{op}/>\n'
        )

    def polyline(self, points, stroke, width=2.0):
        coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
        self.parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{stroke}" '
            f'stroke-width="{_fmt(width)}"/>\n'
        )

    def circle(self, cx, cy, r, fill):
        self.parts.append(
            f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r)}" fill="{fill}"/>\n'
        )

    def text(self, x, y, content, size=12, fill="black", anchor="start"):
        self.parts.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-size="{_fmt(size)}" '
            f'fill="{fill}" text-anchor="{anchor}" '
            f'font-family="sans-serif">{content}</text>\n'
        )

    def write(self, path):
        self.parts.append("</svg>\n")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("".join(self.parts))


def emit_svg_scene(world, result, path, canvas: float = 600.0):
    """Workspace view: obstacles, checked edges by verdict, final path.

    Configurations are placed by the robot's workspace point (the disk
    center for a point robot, the end-effector for an arm)."""
    grid = world.grid
    w_m, h_m = grid.extent
    scale = canvas / max(w_m, h_m)

    def to_px(p):
        return (p[0] * scale, (h_m - p[1]) * scale)

    svg = _SvgWriter(w_m * scale, h_m * scale)
    svg.rect(0, 0, w_m * scale, h_m * scale, "white")
    res = grid.resolution
    xs, ys = np.nonzero(grid.occupied)
    for cx, cy in zip(xs.tolist(), ys.tolist()):
        x_px, y_px = to_px((cx * res, (cy + 1) * res))
        svg.rect(x_px, y_px, res * scale, res * scale, OBSTACLE_COLOR)
    for _layer, qa, qb, ok in result.edge_log:
        pa = to_px(world.robot.workspace_point(grid, qa))
        pb = to_px(world.robot.workspace_point(grid, qb))
        svg.line(*pa, *pb, VALID_COLOR if ok else INVALID_COLOR, width=1.0)
    if result.path is not None and len(result.path) >= 1:
        pts = [to_px(world.robot.workspace_point(grid, q)) for q in result.path]
        if len(pts) == 1:
            pts = pts * 2
        svg.polyline(pts, PATH_COLOR, width=2.5)
        svg.circle(*pts[0], 4, "green")
        svg.circle(*pts[-1], 4, "purple")
    svg.write(path)


def emit_svg_layers(graph, result, path, canvas: float = 600.0, max_grey_edges: int = 20000):
    """Layer view: one horizontal band per layer, depth downward.

    Within a band a configuration sits at (q[0], q[1]) squeezed into the
    band, so zero-cost edges between layer copies appear as vertical
    lines. Unevaluated edges are drawn light grey for layers up to a
    total edge budget; evaluated edges take their verdict color."""
    D = graph.D
    band = canvas / D
    pad = 0.12 * band

    def to_px(layer, q):
        x = q[0] * canvas
        y = (layer - 1) * band + pad + q[1] * (band - 2 * pad)
        return (x, y)

    svg = _SvgWriter(canvas, canvas)
    svg.rect(0, 0, canvas, canvas, "white")
    for layer in range(1, D + 1):
        svg.line(0, (layer - 1) * band, canvas, (layer - 1) * band, "#eeeeee")
        svg.text(4, (layer - 1) * band + 12, f"layer {layer} (n={graph.n_of(layer)})", size=10, fill="#999999")
    budget = max_grey_edges
    for layer in range(1, D + 1):
        n_edges = graph.layer_edge_count(layer)
        if n_edges > budget:
            break
        budget -= n_edges
        for j, k, _d in graph.layer_edges(layer):
            pa = to_px(layer, graph.configs[j])
            pb = to_px(layer, graph.configs[k])
            svg.line(*pa, *pb, UNEVALUATED_COLOR, width=0.5)
        if layer < D:
            for j in range(graph.n_of(layer)):
                pa = to_px(layer, graph.configs[j])
                pb = to_px(layer + 1, graph.configs[j])
                svg.line(*pa, *pb, UNEVALUATED_COLOR, width=0.3, opacity=0.5)
    for layer, qa, qb, ok in result.edge_log:
        pa = to_px(layer, qa)
        pb = to_px(layer, qb)
        svg.line(*pa, *pb, VALID_COLOR if ok else INVALID_COLOR, width=1.2)
    if result.vertex_path:
        pts = [to_px(v[0], graph.config_of(v)) for v in result.vertex_path]
        svg.polyline(pts, PATH_COLOR, width=2.0)
    svg.write(path)


def emit_line_plot(path, series: dict, title: str, xlabel: str, ylabel: str, canvas=(640.0, 420.0)):
    """Simple line plot; series maps label -> list of (x, y) points."""
    width, height = canvas
    margin_l, margin_r, margin_t, margin_b = 60.0, 150.0, 30.0, 40.0
    plot_w = width - margin_l - margin_r
    plot_h = height - margin_t - margin_b
    pts_all = [p for pts in series.values() for p in pts]
    if not pts_all:
        xs_min, xs_max, ys_min, ys_max = 0.0, 1.0, 0.0, 1.0
    else:
        xs = [p[0] for p in pts_all]
        ys = [p[1] for p in pts_all]
        xs_min, xs_max = min(xs), max(xs)
        ys_min, ys_max = min(ys), max(ys)
    if xs_max <= xs_min:
        xs_max = xs_min + 1.0
    if ys_max <= ys_min:
        ys_max = ys_min + 1.0

    def to_px(x, y):
        px = margin_l + (x - xs_min) / (xs_max - xs_min) * plot_w
        py = margin_t + (1.0 - (y - ys_min) / (ys_max - ys_min)) * plot_h
        return (px, py)

    svg = _SvgWriter(width, height)
    svg.rect(0, 0, width, height, "white")
    svg.rect(margin_l, margin_t, plot_w, plot_h, "none")
    svg.line(margin_l, margin_t + plot_h, margin_l + plot_w, margin_t + plot_h, "black")
    svg.line(margin_l, margin_t, margin_l, margin_t + plot_h, "black")
    svg.text(width / 2, height - 8, xlabel, anchor="middle")
    svg.text(margin_l + plot_w / 2, 18, title, anchor="middle", size=14)
    svg.text(14, margin_t + plot_h / 2, ylabel, anchor="middle")
    for tick in range(5):
        frac = tick / 4.0
        xv = xs_min + frac * (xs_max - xs_min)
        yv = ys_min + frac * (ys_max - ys_min)
        px, _ = to_px(xv, ys_min)
        _, py = to_px(xs_min, yv)
        svg.text(px, margin_t + plot_h + 16, _fmt_tick(xv), size=10, anchor="middle")
        svg.text(margin_l - 6, py + 4, _fmt_tick(yv), size=10, anchor="end")
    for idx, (label, pts) in enumerate(series.items()):
        color = _PLANNER_PALETTE[idx % len(_PLANNER_PALETTE)]
        if len(pts) >= 2:
            svg.polyline([to_px(x, y) for x, y in pts], color, width=1.8)
        for x, y in pts:
            svg.circle(*to_px(x, y), 2.2, color)
        ly = margin_t + 16 * idx + 10
        svg.line(width - margin_r + 10, ly - 4, width - margin_r + 34, ly - 4, color, width=2.0)
        svg.text(width - margin_r + 40, ly, label, size=11)
    svg.write(path)


def _fmt_tick(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1000 or abs(v) < 0.01:
        return f"{v:.2e}"
    return f"{v:.3g}"
