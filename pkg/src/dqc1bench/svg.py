"""Small deterministic SVG plotting: line, scatter and ellipse panels.

Output is a pure function of the inputs (fixed number formatting, no
timestamps), so identical data give byte-identical files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


def _f(v: float) -> str:
    return f"{v:.2f}"


def nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        return [lo]
    raw = (hi - lo) / max(n, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(round(v, 12))
        v += step
    return ticks


def _tick_label(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-3:
        return f"{v:.1e}"
    return f"{v:.3g}"


@dataclass
class Axes:
    x: float
    y: float
    w: float
    h: float
    xlim: tuple[float, float] = (0.0, 1.0)
    ylim: tuple[float, float] = (0.0, 1.0)
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    logy: bool = False
    items: list[str] = field(default_factory=list)
    legend: list[tuple[str, str, bool]] = field(default_factory=list)

    def _ty(self, v: float) -> float:
        return math.log10(v) if self.logy else v

    def px(self, xv: float, yv: float) -> tuple[float, float]:
        x0, x1 = self.xlim
        y0, y1 = (self._ty(self.ylim[0]), self._ty(self.ylim[1]))
        sx = self.x + (xv - x0) / (x1 - x0 or 1) * self.w
        sy = self.y + self.h - (self._ty(yv) - y0) / (y1 - y0 or 1) * self.h
        return sx, sy

    def _visible(self, yv: float) -> bool:
        return math.isfinite(yv) and (not self.logy or yv > 0)

    def line(self, xs, ys, color: str, label: str = "", dashed: bool = False, width: float = 1.5):
        pts = [self.px(a, b) for a, b in zip(xs, ys) if self._visible(b)]
        if len(pts) < 2:
            return
        d = " ".join(f"{_f(a)},{_f(b)}" for a, b in pts)
        dash = ' stroke-dasharray="5,3"' if dashed else ""
        self.items.append(
            f'<polyline points="{d}" fill="none" stroke="{color}" stroke-width="{width}"{dash}/>'
        )
        if label:
            self.legend.append((label, color, dashed))

    def scatter(self, xs, ys, color: str, label: str = "", r: float = 3.0, text=None):
        for i, (a, b) in enumerate(zip(xs, ys)):
            if not self._visible(b):
                continue
            cx, cy = self.px(a, b)
            self.items.append(f'<circle cx="{_f(cx)}" cy="{_f(cy)}" r="{r}" fill="{color}"/>')
            if text is not None:
                self.items.append(
                    f'<text x="{_f(cx + 4)}" y="{_f(cy - 4)}" font-size="9" fill="{color}">{escape(str(text[i]))}</text>'
                )
        if label:
            self.legend.append((label, color, False))

    def errorbars(self, xs, ys, errs, color: str):
        for a, b, e in zip(xs, ys, errs):
            if not (self._visible(b - e) and self._visible(b + e)):
                continue
            x0, y0 = self.px(a, b - e)
            _, y1 = self.px(a, b + e)
            self.items.append(
                f'<line x1="{_f(x0)}" y1="{_f(y0)}" x2="{_f(x0)}" y2="{_f(y1)}" stroke="{color}" stroke-width="1"/>'
            )

    def ellipse(self, cx: float, cy: float, cov, color: str, dashed: bool = False, filled: bool = False):
        """One-standard-deviation ellipse of a 2x2 covariance."""
        cov = np.asarray(cov, dtype=float)
        vals, vecs = np.linalg.eigh(cov)
        vals = np.clip(vals, 0, None)
        t = np.linspace(0, 2 * math.pi, 48)
        circle = np.stack([np.cos(t), np.sin(t)])
        pts = (vecs @ np.diag(np.sqrt(vals)) @ circle).T + [cx, cy]
        d = " ".join(f"{_f(a)},{_f(b)}" for a, b in (self.px(p[0], p[1]) for p in pts))
        dash = ' stroke-dasharray="4,2"' if dashed else ""
        fill = f'fill="{color}" fill-opacity="0.2"' if filled else 'fill="none"'
        self.items.append(f'<polygon points="{d}" {fill} stroke="{color}" stroke-width="1.2"{dash}/>')

    def render(self) -> list[str]:
        out = [
            f'<rect x="{_f(self.x)}" y="{_f(self.y)}" width="{_f(self.w)}" height="{_f(self.h)}" '
            'fill="white" stroke="#333" stroke-width="1"/>'
        ]
        if self.logy:
            lo, hi = math.floor(math.log10(self.ylim[0])), math.ceil(math.log10(self.ylim[1]))
            yt = [10.0**k for k in range(lo, hi + 1) if self.ylim[0] <= 10.0**k <= self.ylim[1]]
        else:
            yt = nice_ticks(*self.ylim)
        for v in nice_ticks(*self.xlim):
            sx, sy = self.px(v, self.ylim[0])
            out.append(f'<line x1="{_f(sx)}" y1="{_f(sy)}" x2="{_f(sx)}" y2="{_f(sy + 4)}" stroke="#333"/>')
            out.append(f'<text x="{_f(sx)}" y="{_f(sy + 15)}" font-size="10" text-anchor="middle">{_tick_label(v)}</text>')
        for v in yt:
            sx, sy = self.px(self.xlim[0], v)
            out.append(f'<line x1="{_f(sx - 4)}" y1="{_f(sy)}" x2="{_f(sx)}" y2="{_f(sy)}" stroke="#333"/>')
            out.append(f'<text x="{_f(sx - 6)}" y="{_f(sy + 3)}" font-size="10" text-anchor="end">{_tick_label(v)}</text>')
        out.append(f'<clipPath id="c{int(self.x)}_{int(self.y)}"><rect x="{_f(self.x)}" y="{_f(self.y)}" '
                   f'width="{_f(self.w)}" height="{_f(self.h)}"/></clipPath>')
        out.append(f'<g clip-path="url(#c{int(self.x)}_{int(self.y)})">')
        out.extend(self.items)
        out.append("</g>")
        if self.title:
            out.append(f'<text x="{_f(self.x + self.w / 2)}" y="{_f(self.y - 6)}" font-size="12" '
                       f'text-anchor="middle">{escape(self.title)}</text>')
        if self.xlabel:
            out.append(f'<text x="{_f(self.x + self.w / 2)}" y="{_f(self.y + self.h + 30)}" font-size="11" '
                       f'text-anchor="middle">{escape(self.xlabel)}</text>')
        if self.ylabel:
            tx, ty = self.x - 40, self.y + self.h / 2
            out.append(f'<text x="{_f(tx)}" y="{_f(ty)}" font-size="11" text-anchor="middle" '
                       f'transform="rotate(-90 {_f(tx)} {_f(ty)})">{escape(self.ylabel)}</text>')
        for i, (label, color, dashed) in enumerate(self.legend):
            ly = self.y + 12 + 13 * i
            lx = self.x + self.w - 95
            dash = ' stroke-dasharray="5,3"' if dashed else ""
            out.append(f'<line x1="{_f(lx)}" y1="{_f(ly - 3)}" x2="{_f(lx + 16)}" y2="{_f(ly - 3)}" '
                       f'stroke="{color}" stroke-width="2"{dash}/>')
            out.append(f'<text x="{_f(lx + 20)}" y="{_f(ly)}" font-size="9">{escape(label)}</text>')
        return out


class Figure:
    def __init__(self, width: float, height: float, title: str = ""):
        self.width, self.height, self.title = width, height, title
        self.axes: list[Axes] = []

    def add_axes(self, x, y, w, h, **kwargs) -> Axes:
        ax = Axes(x, y, w, h, **kwargs)
        self.axes.append(ax)
        return ax

    def grid(self, rows: int, cols: int, margin=(70, 40, 30, 50), gap=(70, 60), **kwargs) -> list[list[Axes]]:
        left, top, right, bottom = margin
        w = (self.width - left - right - gap[0] * (cols - 1)) / cols
        h = (self.height - top - bottom - gap[1] * (rows - 1)) / rows
        return [
            [self.add_axes(left + c * (w + gap[0]), top + r * (h + gap[1]), w, h, **kwargs) for c in range(cols)]
            for r in range(rows)
        ]

    def to_svg(self) -> str:
        parts = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(self.width)}" height="{_f(self.height)}" '
            f'viewBox="0 0 {_f(self.width)} {_f(self.height)}" font-family="sans-serif">',
            f'<rect width="{_f(self.width)}" height="{_f(self.height)}" fill="white"/>',
        ]
        if self.title:
            parts.append(f'<text x="{_f(self.width / 2)}" y="18" font-size="14" text-anchor="middle">'
                         f"{escape(self.title)}</text>")
        for ax in self.axes:
            parts.extend(ax.render())
        parts.append("</svg>")
        return "\n".join(parts) + "\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_svg())


def padded(lo: float, hi: float, frac: float = 0.05) -> tuple[float, float]:
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return (0.0, 1.0)
    if hi - lo < 1e-12:
        return (lo - 0.5, hi + 0.5)
    pad = (hi - lo) * frac
    return (lo - pad, hi + pad)
