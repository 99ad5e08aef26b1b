"""Tiny deterministic SVG writer for the plot command.

Hand-rolled on purpose: output must be byte-identical across reruns, which
rules out plotting libraries with embedded timestamps or version strings.
Coordinates are formatted with fixed precision.
"""

from __future__ import annotations

import numpy as np

_W = 640
_H = 480
_MARGIN = 56
_COLORS = {"pos": "#d62728", "neg": "#1f77b4"}


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = np.linspace(lo, hi, count)
    return [float(v) for v in raw]


class _Canvas:
    def __init__(self, x_range, y_range, xlabel, ylabel, title):
        self.x_lo, self.x_hi = x_range
        self.y_lo, self.y_hi = y_range
        if self.x_hi <= self.x_lo:
            self.x_hi = self.x_lo + 1.0
        if self.y_hi <= self.y_lo:
            self.y_hi = self.y_lo + 1.0
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" '
            f'height="{_H}" viewBox="0 0 {_W} {_H}">',
            f'<rect width="{_W}" height="{_H}" fill="white"/>',
        ]
        self._frame(xlabel, ylabel, title)

    def px(self, x: float) -> float:
        t = (x - self.x_lo) / (self.x_hi - self.x_lo)
        return _MARGIN + t * (_W - 2 * _MARGIN)

    def py(self, y: float) -> float:
        t = (y - self.y_lo) / (self.y_hi - self.y_lo)
        return _H - _MARGIN - t * (_H - 2 * _MARGIN)

    def _frame(self, xlabel, ylabel, title):
        p = self.parts
        p.append(f'<rect x="{_MARGIN}" y="{_MARGIN}" '
                 f'width="{_W - 2 * _MARGIN}" height="{_H - 2 * _MARGIN}" '
                 'fill="none" stroke="#333333" stroke-width="1"/>')
        for tx in _ticks(self.x_lo, self.x_hi):
            px = self.px(tx)
            p.append(f'<line x1="{_fmt(px)}" y1="{_H - _MARGIN}" '
                     f'x2="{_fmt(px)}" y2="{_H - _MARGIN + 5}" '
                     'stroke="#333333" stroke-width="1"/>')
            p.append(f'<text x="{_fmt(px)}" y="{_H - _MARGIN + 18}" '
                     'font-size="11" text-anchor="middle" '
                     f'font-family="sans-serif">{tx:.3g}</text>')
        for ty in _ticks(self.y_lo, self.y_hi):
            py = self.py(ty)
            p.append(f'<line x1="{_MARGIN - 5}" y1="{_fmt(py)}" '
                     f'x2="{_MARGIN}" y2="{_fmt(py)}" '
                     'stroke="#333333" stroke-width="1"/>')
            p.append(f'<text x="{_MARGIN - 8}" y="{_fmt(py + 4)}" '
                     'font-size="11" text-anchor="end" '
                     f'font-family="sans-serif">{ty:.3g}</text>')
        p.append(f'<text x="{_W // 2}" y="{_H - 12}" font-size="13" '
                 f'text-anchor="middle" font-family="sans-serif">{xlabel}</text>')
        p.append(f'<text x="16" y="{_H // 2}" font-size="13" '
                 'text-anchor="middle" font-family="sans-serif" '
                 f'transform="rotate(-90 16 {_H // 2})">{ylabel}</text>')
        p.append(f'<text x="{_W // 2}" y="24" font-size="14" '
                 f'text-anchor="middle" font-family="sans-serif">{title}</text>')

    def circle(self, x, y, color):
        self.parts.append(f'<circle cx="{_fmt(self.px(x))}" '
                          f'cy="{_fmt(self.py(y))}" r="2.5" fill="{color}" '
                          'fill-opacity="0.65"/>')

    def polyline(self, pts, color, dash=None, width=1.8):
        coords = " ".join(f"{_fmt(self.px(x))},{_fmt(self.py(y))}"
                          for x, y in pts)
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(f'<polyline points="{coords}" fill="none" '
                          f'stroke="{color}" stroke-width="{width}"'
                          f'{dash_attr}/>')

    def clipped_line(self, w0, w1, b):
        """Draw the line w0 x + w1 y + b = 0 clipped to the data frame."""
        pts = []
        for x in (self.x_lo, self.x_hi):
            if abs(w1) > 1e-12:
                y = -(w0 * x + b) / w1
                if self.y_lo <= y <= self.y_hi:
                    pts.append((x, y))
        for y in (self.y_lo, self.y_hi):
            if abs(w0) > 1e-12:
                x = -(w1 * y + b) / w0
                if self.x_lo <= x <= self.x_hi:
                    pts.append((x, y))
        uniq = []
        for pt in pts:
            if not any(abs(pt[0] - q[0]) + abs(pt[1] - q[1]) < 1e-9
                       for q in uniq):
                uniq.append(pt)
        if len(uniq) >= 2:
            self.polyline(uniq[:2], "#222222", width=1.5)

    def label(self, x_px, y_px, text, color):
        self.parts.append(f'<rect x="{x_px}" y="{y_px - 9}" width="12" '
                          f'height="9" fill="{color}"/>')
        self.parts.append(f'<text x="{x_px + 16}" y="{y_px}" font-size="11" '
                          f'font-family="sans-serif">{text}</text>')

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def scatter_svg(U, z, line=None, title="reduced data") -> str:
    """2-D scatter colored by protected class, optional separator line.

    ``line`` is (w0, w1, b) for w . u + b = 0.
    """
    U = np.asarray(U, dtype=np.float64)
    pad_x = 0.05 * (U[:, 0].max() - U[:, 0].min() + 1e-9)
    pad_y = 0.05 * (U[:, 1].max() - U[:, 1].min() + 1e-9)
    cv = _Canvas((U[:, 0].min() - pad_x, U[:, 0].max() + pad_x),
                 (U[:, 1].min() - pad_y, U[:, 1].max() + pad_y),
                 "component 1", "component 2", title)
    for i in range(U.shape[0]):
        cv.circle(U[i, 0], U[i, 1],
                  _COLORS["pos"] if z[i] > 0 else _COLORS["neg"])
    if line is not None:
        cv.clipped_line(*line)
    cv.label(_W - 170, 44, "protected +1", _COLORS["pos"])
    cv.label(_W - 170, 60, "protected -1", _COLORS["neg"])
    return cv.render()


def curves_svg(curves, xlabel, ylabel, title) -> str:
    """Line chart. curves: list of (label, color, dash, [(x, y), ...])."""
    xs = [x for _, _, _, pts in curves for x, _ in pts]
    ys = [y for _, _, _, pts in curves for _, y in pts]
    if not xs:
        raise ValueError("no points to plot")
    pad = 0.05 * (max(ys) - min(ys) + 1e-9)
    cv = _Canvas((min(xs), max(xs)), (min(ys) - pad, max(ys) + pad),
                 xlabel, ylabel, title)
    at_y = 44
    for label, color, dash, pts in curves:
        cv.polyline(sorted(pts), color, dash=dash)
        cv.label(_W - 190, at_y, label, color)
        at_y += 16
    return cv.render()
