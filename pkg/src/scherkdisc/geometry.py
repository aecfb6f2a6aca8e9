"""Closed-form geometry of the geodesic disc.

The hyperbolic plane is realized as the conformal unit-disc model with
curvature -1 (conformal factor 2/(1-|z|^2)).  The working domain is the
geodesic disc of radius 1 about the origin, which in model coordinates is
the Euclidean disc of radius tanh(1/2).  The Euclidean model is the flat
plane and the same geodesic disc is the unit disc.

All lengths are geodesic lengths; all point coordinates are model
coordinates.  Everything here is immutable and side-effect free.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError, MalformedPolygonError

GEODESIC_RADIUS = 1.0

# samples per side used for polyline-based predicates (intersection, area)
SIDE_SAMPLES = 64


def _as_point(p) -> np.ndarray:
    a = np.asarray(p, dtype=float)
    if a.shape != (2,):
        raise GeometryError(f"expected a 2-d point, got shape {a.shape}")
    return a


def _to_complex(p) -> complex:
    a = _as_point(p)
    return complex(a[0], a[1])


def _from_complex(z) -> np.ndarray:
    return np.array([z.real, z.imag], dtype=float)


@dataclass(frozen=True)
class MetricModel:
    """Conformal disc-model metric, Euclidean or hyperbolic.

    `conformal_factor` is the scalar lambda with g = lambda^2 (dx^2+dy^2);
    lambda = 1 for the Euclidean model and 2/(1-|z|^2) for the hyperbolic
    one.  `model_radius` is the Euclidean radius of the geodesic disc of
    radius 1 in model coordinates.
    """

    kind: str

    def __post_init__(self):
        if self.kind not in ("euclidean", "hyperbolic"):
            raise GeometryError(f"unknown metric kind {self.kind!r}")

    @property
    def hyperbolic(self) -> bool:
        return self.kind == "hyperbolic"

    @property
    def model_radius(self) -> float:
        return np.tanh(0.5) if self.hyperbolic else 1.0

    @property
    def boundary_length(self) -> float:
        return 2.0 * np.pi * (np.sinh(1.0) if self.hyperbolic else 1.0)

    def conformal_factor(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.hyperbolic:
            r2 = pts[:, 0] ** 2 + pts[:, 1] ** 2
            lam = 2.0 / (1.0 - r2)
        else:
            lam = np.ones(len(pts))
        return lam if np.asarray(points).ndim > 1 else float(lam[0])

    def _check_inside(self, p: np.ndarray):
        r = float(np.hypot(p[0], p[1]))
        if r > self.model_radius * (1.0 + 1e-10) + 1e-15:
            raise GeometryError(
                f"point at model radius {r:.6g} outside the closed model disc "
                f"(radius {self.model_radius:.6g})"
            )

    def distance(self, p, q) -> float:
        """Geodesic distance between two model points (closed form)."""
        p = _as_point(p)
        q = _as_point(q)
        self._check_inside(p)
        self._check_inside(q)
        if not self.hyperbolic:
            return float(np.hypot(*(p - q)))
        d2 = float(np.sum((p - q) ** 2))
        den = (1.0 - float(np.sum(p**2))) * (1.0 - float(np.sum(q**2)))
        return float(np.arccosh(1.0 + 2.0 * d2 / den))

    def polar_density(self, rho: float, theta: float = 0.0) -> float:
        """Volume density G(rho, theta) in geodesic polar coordinates.

        G = sinh(rho) for the hyperbolic metric, G = rho for the flat one.
        Defined on rho in (0, 1]; the coordinate degenerates at the center.
        """
        del theta  # rotationally symmetric
        if rho <= 0.0:
            raise GeometryError("polar density undefined at rho <= 0 (coordinate degeneracy)")
        if rho > GEODESIC_RADIUS * (1.0 + 1e-12):
            raise GeometryError("rho beyond the geodesic disc radius")
        return float(np.sinh(rho)) if self.hyperbolic else float(rho)

    def geodesic_to_model_radius(self, rho) -> np.ndarray | float:
        """Model radius of the circle at geodesic distance rho from the origin."""
        rho = np.asarray(rho, dtype=float)
        out = np.tanh(rho / 2.0) if self.hyperbolic else rho
        return float(out) if out.ndim == 0 else out

    def model_to_geodesic_radius(self, r) -> np.ndarray | float:
        r = np.asarray(r, dtype=float)
        out = 2.0 * np.arctanh(r) if self.hyperbolic else r
        return float(out) if out.ndim == 0 else out


EUCLIDEAN = MetricModel("euclidean")
HYPERBOLIC = MetricModel("hyperbolic")


def metric_model(kind: str) -> MetricModel:
    return MetricModel(kind)


def distance(model: MetricModel, p, q) -> float:
    return model.distance(p, q)


def polar_density(model: MetricModel, rho: float, theta: float = 0.0) -> float:
    return model.polar_density(rho, theta)


class GeodesicArc:
    """Geodesic segment between two model points, constant-speed parametrized.

    For the hyperbolic model the segment is transported to the origin by a
    Mobius map, walked at constant hyperbolic speed along a Euclidean ray,
    and transported back; for the Euclidean model it is a straight segment.
    """

    def __init__(self, model: MetricModel, p, q):
        self.model = model
        self.p = _as_point(p)
        self.q = _as_point(q)
        self.length = model.distance(p, q)
        if self.length <= 0.0:
            raise GeometryError("degenerate arc: coincident endpoints")

    def sample(self, t):
        """Point(s) at parameter t in [0, 1]; geodesic distance from p is t*length."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        if not self.model.hyperbolic:
            pts = self.p[None, :] + t[:, None] * (self.q - self.p)[None, :]
        else:
            a = _to_complex(self.p)
            w = (_to_complex(self.q) - a) / (1.0 - np.conj(a) * _to_complex(self.q))
            direction = w / abs(w)
            radii = np.tanh(t * self.length / 2.0)
            wt = radii * direction
            zt = (wt + a) / (1.0 + np.conj(a) * wt)
            pts = np.column_stack([zt.real, zt.imag])
        # pin endpoints exactly
        pts[t == 0.0] = self.p
        pts[t == 1.0] = self.q
        return pts[0] if scalar else pts

    def polyline(self, n: int = SIDE_SAMPLES) -> np.ndarray:
        return self.sample(np.linspace(0.0, 1.0, n + 1))

    def midpoint(self) -> np.ndarray:
        return self.sample(0.5)

    def __repr__(self):
        return f"GeodesicArc({self.model.kind}, {self.p}, {self.q}, length={self.length:.6g})"


@dataclass(frozen=True)
class DiscSpec:
    """The geodesic disc of radius 1 centered at the model origin."""

    model: MetricModel
    geodesic_radius: float = GEODESIC_RADIUS
    center: np.ndarray = field(default_factory=lambda: np.zeros(2))

    @property
    def model_radius(self) -> float:
        return self.model.model_radius

    @property
    def boundary_length(self) -> float:
        return self.model.boundary_length

    def boundary_point(self, s):
        """Arc-length parametrization of the boundary circle.

        s = 0 is the basepoint on the positive horizontal axis; the curve
        runs counter-clockwise and is L-periodic.
        """
        s = np.asarray(s, dtype=float)
        scalar = s.ndim == 0
        theta = 2.0 * np.pi * np.atleast_1d(s) / self.boundary_length
        pts = self.model_radius * np.column_stack([np.cos(theta), np.sin(theta)])
        return pts[0] if scalar else pts

    def boundary_angle(self, s) -> np.ndarray | float:
        """Central angle of the boundary point at arc length s."""
        s = np.asarray(s, dtype=float)
        out = 2.0 * np.pi * s / self.boundary_length
        return float(out) if out.ndim == 0 else out

    def chord(self, s0: float, s1: float) -> GeodesicArc:
        """Geodesic arc joining the boundary points at arc lengths s0, s1."""
        L = self.boundary_length
        if abs((s1 - s0) % L) < 1e-14 * L:
            raise GeometryError("degenerate chord: coincident boundary parameters")
        return GeodesicArc(self.model, self.boundary_point(s0), self.boundary_point(s1))

    def chord_length(self, s0: float, s1: float) -> float:
        return self.model.distance(self.boundary_point(s0), self.boundary_point(s1))


def disc(kind: str = "hyperbolic") -> DiscSpec:
    return DiscSpec(metric_model(kind))


class GeodesicPolygon:
    """Closed geodesic polygon from an ordered vertex list (counter-clockwise)."""

    def __init__(self, model: MetricModel, vertices):
        vertices = [np.asarray(v, dtype=float) for v in vertices]
        if len(vertices) < 3:
            raise MalformedPolygonError("polygon needs at least 3 vertices")
        self.model = model
        self.vertices = vertices
        self.sides = [
            GeodesicArc(model, vertices[i], vertices[(i + 1) % len(vertices)])
            for i in range(len(vertices))
        ]

    @property
    def perimeter(self) -> float:
        return float(sum(side.length for side in self.sides))

    def boundary_polyline(self, samples_per_side: int = SIDE_SAMPLES) -> np.ndarray:
        chunks = [side.polyline(samples_per_side)[:-1] for side in self.sides]
        return np.vstack(chunks)


def _segments_cross(a0, a1, b0, b1, eps: float = 1e-14) -> bool:
    """Strict proper crossing test for two segments (touching endpoints excluded)."""

    def orient(p, q, r):
        v = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
        return 0.0 if abs(v) < eps else v

    o1 = orient(a0, a1, b0)
    o2 = orient(a0, a1, b1)
    o3 = orient(b0, b1, a0)
    o4 = orient(b0, b1, a1)
    return o1 * o2 < 0.0 and o3 * o4 < 0.0


def _polyline_cross(pa: np.ndarray, pb: np.ndarray) -> bool:
    """Any strict crossing between two polylines (bounding-box prefilter)."""
    lo_a, hi_a = pa.min(axis=0), pa.max(axis=0)
    lo_b, hi_b = pb.min(axis=0), pb.max(axis=0)
    if np.any(lo_a > hi_b) or np.any(lo_b > hi_a):
        return False
    for i in range(len(pa) - 1):
        for j in range(len(pb) - 1):
            if _segments_cross(pa[i], pa[i + 1], pb[j], pb[j + 1]):
                return True
    return False


@dataclass(frozen=True)
class PolygonMetrics:
    perimeter: float
    is_simple: bool
    is_ccw: bool


def polygon_metrics(polygon: GeodesicPolygon, samples_per_side: int = SIDE_SAMPLES) -> PolygonMetrics:
    """Perimeter, simplicity and orientation of a geodesic polygon.

    Simplicity is decided on dense polyline samples of each side: the
    polygon fails iff two non-adjacent sides cross (adjacent sides share a
    vertex, which is not a crossing).
    """
    sides = polygon.sides
    n = len(sides)
    polylines = [s.polyline(samples_per_side) for s in sides]
    simple = True
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue  # adjacent sides may only meet at the shared vertex
            if _polyline_cross(polylines[i], polylines[j]):
                simple = False
                break
        if not simple:
            break
    ring = polygon.boundary_polyline(samples_per_side)
    x, y = ring[:, 0], ring[:, 1]
    signed = 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
    return PolygonMetrics(perimeter=polygon.perimeter, is_simple=simple, is_ccw=signed > 0.0)


def arc_length_by_quadrature(arc: GeodesicArc, n: int = 4096) -> float:
    """Numerically integrate lambda |ds| along the arc (cross-check of closed forms)."""
    pts = arc.polyline(n)
    mids = 0.5 * (pts[:-1] + pts[1:])
    seg = np.hypot(*(pts[1:] - pts[:-1]).T)
    lam = arc.model.conformal_factor(mids)
    return float(np.sum(lam * seg))


def gauss_curvature_fd(model: MetricModel, p, h: float = 1e-4) -> float:
    """Finite-difference Gauss curvature K = -Laplacian(log lambda)/lambda^2."""
    p = _as_point(p)

    def loglam(q):
        return np.log(model.conformal_factor(q))

    lap = (
        loglam(p + [h, 0]) + loglam(p - [h, 0]) + loglam(p + [0, h]) + loglam(p - [0, h]) - 4.0 * loglam(p)
    ) / h**2
    lam = model.conformal_factor(p)
    return float(-lap / lam**2)
