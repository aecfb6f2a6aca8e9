"""SVG rendering of disc domains and solved fields.

Coordinates are model coordinates mapped affinely onto a 1000x1000
viewport (the unit square of the model maps to the full canvas), so a
rendered figure corresponds point-for-point with the disc model used
everywhere else.  Hyperbolic geodesics are drawn as true circular arcs,
euclidean ones as straight chords.
"""

from __future__ import annotations

import numpy as np

VIEWPORT = 1000.0

A_STROKE = "#c62828"  # sides carrying +infinity data
B_STROKE = "#1565c0"  # sides carrying -infinity data
RIM_STROKE = "#555555"
CORE_STROKE = "#2e7d32"


def _px(p) -> tuple[float, float]:
    x, y = float(p[0]), float(p[1])
    return 0.5 * VIEWPORT * (1.0 + x), 0.5 * VIEWPORT * (1.0 - y)


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def _circumcircle(p, m, q):
    """Center and radius of the circle through three points, or None if collinear."""
    ax, ay = p
    bx, by = m
    cx, cy = q
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if abs(d) < 1e-12:
        return None
    ux = ((ax**2 + ay**2) * (by - cy) + (bx**2 + by**2) * (cy - ay)
          + (cx**2 + cy**2) * (ay - by)) / d
    uy = ((ax**2 + ay**2) * (cx - bx) + (bx**2 + by**2) * (ax - cx)
          + (cx**2 + cy**2) * (bx - ax)) / d
    r = float(np.hypot(ax - ux, ay - uy))
    return (ux, uy), r


def arc_path(p, m, q) -> str:
    """SVG path for the circular arc through p, m, q (line if collinear)."""
    x0, y0 = _px(p)
    x1, y1 = _px(q)
    circ = _circumcircle(p, m, q)
    if circ is None:
        return f"M {_fmt(x0)} {_fmt(y0)} L {_fmt(x1)} {_fmt(y1)}"
    (ux, uy), r = circ
    r_px = 0.5 * VIEWPORT * r
    # sweep flag: orientation of p -> m -> q in viewport coordinates
    xm, ym = _px(m)
    cross = (xm - x0) * (y1 - ym) - (ym - y0) * (x1 - xm)
    sweep = 1 if cross > 0 else 0
    return (f"M {_fmt(x0)} {_fmt(y0)} "
            f"A {_fmt(r_px)} {_fmt(r_px)} 0 0 {sweep} {_fmt(x1)} {_fmt(y1)}")


def polyline_path(points) -> str:
    pts = [_px(p) for p in np.asarray(points, dtype=float)]
    parts = [f"M {_fmt(pts[0][0])} {_fmt(pts[0][1])}"]
    parts += [f"L {_fmt(x)} {_fmt(y)}" for x, y in pts[1:]]
    return " ".join(parts)


def _document(elements, background: str | None = "#ffffff") -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" '
            f'width="{VIEWPORT:.0f}" height="{VIEWPORT:.0f}" '
            f'viewBox="0 0 {VIEWPORT:.0f} {VIEWPORT:.0f}">')
    body = []
    if background is not None:
        body.append(f'<rect width="{VIEWPORT:.0f}" height="{VIEWPORT:.0f}" '
                    f'fill="{background}"/>')
    body.extend(elements)
    return "\n".join([head] + body + ["</svg>"]) + "\n"


def _rim_element(disc) -> str:
    cx, cy = _px((0.0, 0.0))
    r = 0.5 * VIEWPORT * disc.model_radius
    return (f'<circle class="rim" cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r)}" '
            f'fill="none" stroke="{RIM_STROKE}" stroke-width="1.5" '
            f'stroke-dasharray="6 4"/>')


def _side_element(side, label: str, hyperbolic: bool) -> str:
    stroke = A_STROKE if label == "A" else B_STROKE
    if hyperbolic:
        d = arc_path(side.sample(0.0), side.midpoint(), side.sample(1.0))
    else:
        d = polyline_path([side.sample(0.0), side.sample(1.0)])
    return (f'<path class="side-{label}" d="{d}" fill="none" '
            f'stroke="{stroke}" stroke-width="2.5"/>')


def render_domain(domain, core=None) -> str:
    """SVG document for a Scherk polygon (optionally with its compact core)."""
    disc = domain.disc
    hyp = disc.model.hyperbolic
    elements = [_rim_element(disc)]
    for side, label in zip(domain.sides, domain.labels):
        elements.append(_side_element(side, label, hyp))
    for i, s in enumerate(domain.vertex_params):
        x, y = _px(disc.boundary_point(s))
        elements.append(f'<circle class="vertex" cx="{_fmt(x)}" cy="{_fmt(y)}" '
                        f'r="4" fill="#000000"/>')
    if core is not None:
        ring = core.boundary_polyline()
        d = polyline_path(np.vstack([ring, ring[:1]]))
        elements.append(f'<path class="core" d="{d}" fill="none" '
                        f'stroke="{CORE_STROKE}" stroke-width="1.5"/>')
    return _document(elements)


def _colormap(t: np.ndarray) -> list[str]:
    from matplotlib import colormaps

    rgba = colormaps["viridis"](np.clip(t, 0.0, 1.0))
    return ["#%02x%02x%02x" % tuple(int(255 * c) for c in row[:3]) for row in rgba]


def render_field(mesh, values, domain=None) -> str:
    """SVG heatmap of a nodal field: one filled polygon per triangle."""
    values = np.asarray(values, dtype=float)
    tri_vals = values[mesh.triangles].mean(axis=1)
    lo, hi = float(tri_vals.min()), float(tri_vals.max())
    span = hi - lo if hi > lo else 1.0
    colors = _colormap((tri_vals - lo) / span)
    elements = []
    for tri, color in zip(mesh.triangles, colors):
        pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in (_px(p) for p in mesh.nodes[tri]))
        elements.append(f'<polygon class="cell" points="{pts}" fill="{color}" '
                        f'stroke="none"/>')
    if domain is not None:
        hyp = domain.disc.model.hyperbolic
        for side, label in zip(domain.sides, domain.labels):
            elements.append(_side_element(side, label, hyp))
    return _document(elements)


def render_field_csv(rows) -> str:
    """SVG heatmap from (x, y, u) samples re-tessellated by Delaunay."""
    from scipy.spatial import Delaunay

    pts = np.asarray([[r[0], r[1]] for r in rows], dtype=float)
    vals = np.asarray([r[2] for r in rows], dtype=float)
    tri = Delaunay(pts)
    tri_vals = vals[tri.simplices].mean(axis=1)
    lo, hi = float(tri_vals.min()), float(tri_vals.max())
    span = hi - lo if hi > lo else 1.0
    colors = _colormap((tri_vals - lo) / span)
    elements = []
    for simplex, color in zip(tri.simplices, colors):
        poly = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in (_px(p) for p in pts[simplex]))
        elements.append(f'<polygon class="cell" points="{poly}" fill="{color}" '
                        f'stroke="none"/>')
    return _document(elements)
