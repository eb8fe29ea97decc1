"""Deterministic SVG scatter plots and heat maps for point sets in the complex plane."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError

DEFAULT_VIEWPORT = (-2.2, 2.2, -2.2, 2.2)

# fill colour and radius per layer style
STYLES = {
    "curve": ("#1f4e9c", 0.9),
    "cloud": ("#c0392b", 1.1),
    "endpoints": ("#111111", 2.5),
    "poles": ("#e67e22", 3.0),
    "isolated": ("#27ae60", 2.5),
}


@dataclass
class Layer:
    points: np.ndarray
    style: str = "cloud"
    label: str = ""

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.complex128).ravel()
        if self.style not in STYLES:
            raise InvalidArgumentError(f"unknown layer style {self.style!r}; choose from {', '.join(STYLES)}")
        if not np.all(np.isfinite(self.points)):
            raise InvalidArgumentError(f"layer {self.label or self.style!r} has non-finite points")


@dataclass
class PlotSpec:
    layers: list
    viewport: tuple = DEFAULT_VIEWPORT
    size: int = 800
    title: str = ""

    def __post_init__(self):
        if not self.layers:
            raise InvalidArgumentError("a plot needs at least one layer")
        x0, x1, y0, y1 = self.viewport
        if not (x0 < x1 and y0 < y1):
            raise InvalidArgumentError(f"degenerate viewport {self.viewport}")
        if self.size < 16:
            raise InvalidArgumentError("plot size must be >= 16 pixels")


@dataclass
class Rendered:
    text: str
    clamped: int
    per_layer: list = field(default_factory=list)

    def save(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write(self.text)


def _to_pixels(z, viewport, size):
    """Map points to pixel coordinates, clamping to the viewport; returns (x, y, clamped mask)."""
    x0, x1, y0, y1 = viewport
    re = np.clip(z.real, x0, x1)
    im = np.clip(z.imag, y0, y1)
    clamped = (re != z.real) | (im != z.imag)
    px = (re - x0) / (x1 - x0) * size
    py = (y1 - im) / (y1 - y0) * size
    return px, py, clamped


def _header(size, title):
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="#ffffff"/>',
    ]
    if title:
        out.append(f"<title>{_escape(title)}</title>")
    return out


def _axes(viewport, size):
    x0, x1, y0, y1 = viewport
    out = []
    if x0 <= 0 <= x1:
        x = (0 - x0) / (x1 - x0) * size
        out.append(f'<line x1="{x:.2f}" y1="0" x2="{x:.2f}" y2="{size}" stroke="#cccccc" stroke-width="0.5"/>')
    if y0 <= 0 <= y1:
        y = (y1 - 0) / (y1 - y0) * size
        out.append(f'<line x1="0" y1="{y:.2f}" x2="{size}" y2="{y:.2f}" stroke="#cccccc" stroke-width="0.5"/>')
    return out


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")


def render_svg(spec: PlotSpec) -> Rendered:
    """Scatter every layer in order; points outside the viewport are clamped to its edge and counted."""
    size = spec.size
    lines = _header(size, spec.title) + _axes(spec.viewport, size)
    total, per_layer = 0, []
    for layer in spec.layers:
        colour, r = STYLES[layer.style]
        px, py, clamped = _to_pixels(layer.points, spec.viewport, size)
        n_cl = int(clamped.sum())
        total += n_cl
        per_layer.append(n_cl)
        label = _escape(layer.label or layer.style)
        lines.append(f'<g class="{layer.style}" data-label="{label}" fill="{colour}">')
        lines.extend(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r}"/>' for x, y in zip(px, py))
        lines.append("</g>")
    lines.append(f"<!-- clamped points: {total} -->")
    lines.append("</svg>")
    return Rendered("\n".join(lines) + "\n", total, per_layer)


def render_heatmap(lmap, overlay: list | None = None, size: int = 800, field_name: str = "escape_fraction") -> Rendered:
    """Grey-scale cells (black = 1) over the map's bounds, with optional scatter layers on top."""
    g = lmap.grid
    values = np.asarray(getattr(lmap, field_name), dtype=float)
    finite = np.isfinite(values)
    lo = float(values[finite].min()) if finite.any() else 0.0
    hi = float(values[finite].max()) if finite.any() else 1.0
    if field_name == "escape_fraction":
        lo, hi = 0.0, 1.0
    span = hi - lo if hi > lo else 1.0
    dx = (g.re_max - g.re_min) / max(g.nx - 1, 1)
    dy = (g.im_max - g.im_min) / max(g.ny - 1, 1)
    viewport = (g.re_min - dx / 2, g.re_max + dx / 2, g.im_min - dy / 2, g.im_max + dy / 2)
    if viewport[0] == viewport[1] or viewport[2] == viewport[3]:
        viewport = (viewport[0] - 0.5, viewport[1] + 0.5, viewport[2] - 0.5, viewport[3] + 0.5)
    sx = size / (viewport[1] - viewport[0])
    sy = size / (viewport[3] - viewport[2])
    lines = _header(size, f"{lmap.label}: {field_name}")
    lines.append('<g class="heat" shape-rendering="crispEdges">')
    for j, im in enumerate(g.im):
        for i, re in enumerate(g.re):
            v = values[j, i]
            if not np.isfinite(v):
                continue
            level = int(round(255 * (1 - (v - lo) / span)))
            x = (re - dx / 2 - viewport[0]) * sx
            y = (viewport[3] - (im + dy / 2)) * sy
            lines.append(
                f'<rect x="{x:.2f}" y="{y:.2f}" width="{dx * sx:.2f}" height="{dy * sy:.2f}" '
                f'fill="rgb({level},{level},{level})"/>'
            )
    lines.append("</g>")
    total, per_layer = 0, []
    for layer in overlay or []:
        colour, r = STYLES[layer.style]
        px, py, clamped = _to_pixels(layer.points, viewport, size)
        total += int(clamped.sum())
        per_layer.append(int(clamped.sum()))
        lines.append(f'<g class="{layer.style}" fill="{colour}">')
        lines.extend(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r}"/>' for x, y in zip(px, py))
        lines.append("</g>")
    lines.append(f"<!-- clamped points: {total} -->")
    lines.append("</svg>")
    return Rendered("\n".join(lines) + "\n", total, per_layer)
