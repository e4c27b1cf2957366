"""Minimal deterministic SVG writers (no plotting dependency).

Every document starts with a single version comment line so that byte
comparisons can skip exactly one line.
"""

import math

import numpy as np

__all__ = ["class_map_svg", "curves_svg", "vector_field_svg", "diverging_color"]

WIDTH = 640
HEIGHT = 640
MARGIN = 40

CLASS_COLORS = {
    "stable_focus": "#2c7bb6",
    "stable_node": "#abd9e9",
    "unstable_focus": "#d7191c",
    "unstable_node": "#fdae61",
    "saddle": "#7b3294",
    "non_hyperbolic": "#f7f7f7",
    "unresolved": "#000000",
}


def _num(v):
    return f"{v:.6g}"


def _header(version, title):
    return [
        f"<!-- wigner-aah {version} -->",
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f"<title>{title}</title>",
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]


class _Frame:
    def __init__(self, x_range, y_range):
        self.x0, self.x1 = x_range
        self.y0, self.y1 = y_range
        self.sx = (WIDTH - 2 * MARGIN) / (self.x1 - self.x0)
        self.sy = (HEIGHT - 2 * MARGIN) / (self.y1 - self.y0)

    def px(self, x):
        return MARGIN + (x - self.x0) * self.sx

    def py(self, y):
        return HEIGHT - MARGIN - (y - self.y0) * self.sy

    def axes(self, xlabel, ylabel):
        b = HEIGHT - MARGIN
        return [
            f'<rect x="{MARGIN}" y="{MARGIN}" width="{WIDTH - 2 * MARGIN}" '
            f'height="{HEIGHT - 2 * MARGIN}" fill="none" stroke="black"/>',
            f'<text x="{WIDTH / 2}" y="{b + 28}" text-anchor="middle" '
            f'font-size="14">{xlabel}</text>',
            f'<text x="12" y="{HEIGHT / 2}" font-size="14">{ylabel}</text>',
            f'<text x="{MARGIN}" y="{b + 14}" font-size="10">{_num(self.x0)}</text>',
            f'<text x="{WIDTH - MARGIN}" y="{b + 14}" font-size="10" '
            f'text-anchor="end">{_num(self.x1)}</text>',
            f'<text x="{MARGIN - 4}" y="{b}" font-size="10" '
            f'text-anchor="end">{_num(self.y0)}</text>',
            f'<text x="{MARGIN - 4}" y="{MARGIN + 10}" font-size="10" '
            f'text-anchor="end">{_num(self.y1)}</text>',
        ]


def diverging_color(value, scale):
    """Blue (negative) - white - red (positive), saturating at ``|value| = scale``."""
    if not math.isfinite(value):
        return "#808080"
    t = 0.0 if scale <= 0 else max(-1.0, min(1.0, value / scale))
    if t >= 0:
        r, g, b = 255, round(255 * (1 - t)), round(255 * (1 - t))
    else:
        r, g, b = round(255 * (1 + t)), round(255 * (1 + t)), 255
    return f"#{r:02x}{g:02x}{b:02x}"


def _edges(centers):
    c = np.asarray(centers, dtype=float)
    if len(c) == 1:
        return np.array([c[0] - 0.5, c[0] + 0.5])
    mid = 0.5 * (c[1:] + c[:-1])
    return np.concatenate([[c[0] - (mid[0] - c[0])], mid, [c[-1] + (c[-1] - mid[-1])]])


def vector_field_svg(xs, ks, u, v, background, title, version, max_arrows=25):
    """Arrows for ``(u, v)`` over cells coloured by ``background``.

    Arrays are indexed ``[i, j]`` for ``(xs[i], ks[j])``.  The colour scale is
    symmetric and clipped at the 99th percentile of ``|background|``.
    """
    xe, ke = _edges(xs), _edges(ks)
    frame = _Frame((xe[0], xe[-1]), (ke[0], ke[-1]))
    out = _header(version, title)
    finite = np.abs(background[np.isfinite(background)])
    scale = float(np.percentile(finite, 99)) if finite.size else 0.0
    for i in range(len(xs)):
        for j in range(len(ks)):
            x0, x1 = frame.px(xe[i]), frame.px(xe[i + 1])
            y0, y1 = frame.py(ke[j + 1]), frame.py(ke[j])
            out.append(
                f'<rect x="{x0:.2f}" y="{y0:.2f}" width="{x1 - x0:.2f}" '
                f'height="{y1 - y0:.2f}" fill="{diverging_color(background[i, j], scale)}"/>'
            )
    si = max(1, math.ceil(len(xs) / max_arrows))
    sj = max(1, math.ceil(len(ks) / max_arrows))
    speed = np.hypot(u, v)
    vmax = float(np.nanmax(speed)) if np.any(np.isfinite(speed)) else 0.0
    cell = min((WIDTH - 2 * MARGIN) / len(range(0, len(xs), si)),
               (HEIGHT - 2 * MARGIN) / len(range(0, len(ks), sj)))
    for i in range(0, len(xs), si):
        for j in range(0, len(ks), sj):
            if not (math.isfinite(u[i, j]) and math.isfinite(v[i, j])) or vmax == 0:
                continue
            length = 0.9 * cell * speed[i, j] / vmax
            if length < 0.5:
                continue
            ang = math.atan2(v[i, j], u[i, j])
            px, py = frame.px(xs[i]), frame.py(ks[j])
            ex, ey = px + length * math.cos(ang), py - length * math.sin(ang)
            hx1 = ex - 0.3 * length * math.cos(ang - 0.4)
            hy1 = ey + 0.3 * length * math.sin(ang - 0.4)
            hx2 = ex - 0.3 * length * math.cos(ang + 0.4)
            hy2 = ey + 0.3 * length * math.sin(ang + 0.4)
            out.append(
                f'<path d="M{px:.2f},{py:.2f} L{ex:.2f},{ey:.2f} M{hx1:.2f},{hy1:.2f} '
                f'L{ex:.2f},{ey:.2f} L{hx2:.2f},{hy2:.2f}" stroke="black" '
                f'stroke-width="0.8" fill="none"/>'
            )
    out += frame.axes("x", "k")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def curves_svg(curves, x_range, y_range, title, version, xlabel="x", ylabel="k"):
    """Polylines; ``curves`` is a list of ``(points, color)`` with ``points``
    an ``(n, 2)`` array."""
    frame = _Frame(x_range, y_range)
    out = _header(version, title)
    out.append(
        f'<clipPath id="plot"><rect x="{MARGIN}" y="{MARGIN}" '
        f'width="{WIDTH - 2 * MARGIN}" height="{HEIGHT - 2 * MARGIN}"/></clipPath>'
    )
    for points, color in curves:
        coords = " ".join(f"{frame.px(p[0]):.2f},{frame.py(p[1]):.2f}" for p in points)
        out.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="1" clip-path="url(#plot)"/>'
        )
    out += frame.axes(xlabel, ylabel)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def class_map_svg(alphas, a_values, classes, title, version):
    """Stability classes on the ``(alpha, a)`` plane; ``classes[i][j]`` is the
    class name at ``(alphas[i], a_values[j])``."""
    ae, be = _edges(alphas), _edges(a_values)
    frame = _Frame((ae[0], ae[-1]), (be[0], be[-1]))
    out = _header(version, title)
    for i in range(len(alphas)):
        for j in range(len(a_values)):
            x0, x1 = frame.px(ae[i]), frame.px(ae[i + 1])
            y0, y1 = frame.py(be[j + 1]), frame.py(be[j])
            color = CLASS_COLORS[classes[i][j]]
            out.append(
                f'<rect x="{x0:.2f}" y="{y0:.2f}" width="{x1 - x0:.2f}" '
                f'height="{y1 - y0:.2f}" fill="{color}"><title>{classes[i][j]}</title></rect>'
            )
    out += frame.axes("alpha", "a")
    out.append("</svg>")
    return "\n".join(out) + "\n"
