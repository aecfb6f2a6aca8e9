"""Scherk-type polygon domains on the geodesic disc.

Builds balanced inscribed quadrilaterals, regular trapezoids, perturbed
trapezoid attachments, compact cores and the iterative example-domain
sequence, and decides Jenkins-Serrin admissibility:

    sum |A_i| = sum |B_i|,   and for every proper inscribed polygon P
    2 a(P) < |P|  and  2 b(P) < |P|.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np
from matplotlib.path import Path as MplPath

from . import geometry
from .errors import (
    BracketError,
    DegenerateCoreError,
    EnumerationCapError,
    GeometryError,
    MalformedPolygonError,
    NoAdmissibleTauError,
)
from .geometry import DiscSpec, GeodesicArc, GeodesicPolygon, MetricModel, polygon_metrics

CONDITION1_TOL = 1e-10
# strict positivity of the inscribed-polygon slacks, at working precision
SLACK_TOL = 1e-9
ENUMERATION_CAP = 16


def bisect_root(f, lo: float, hi: float, ftol: float = 1e-10, max_iter: int = 200):
    """Bisection with bracket verification.

    The balance functions are merely continuous, so plain bisection with a
    verified sign change is used everywhere a root is needed.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise BracketError(f"no sign change on [{lo:.6g}, {hi:.6g}]: f={flo:.3g}, {fhi:.3g}")
    xtol = 1e-15 * max(1.0, abs(hi - lo))
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or (hi - lo < xtol and abs(fm) <= ftol):
            return mid
        if flo * fm < 0.0:
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


class ScherkPolygon:
    """Even-sided geodesic polygon inscribed in the disc, sides labeled A/B.

    `vertex_params` are boundary arc-length values in counter-clockwise
    order; side i joins vertex i to vertex i+1 (mod n) and carries
    labels[i].  The bottom side (first B side of the base quadrilateral)
    is tracked through later constructions.
    """

    def __init__(self, disc: DiscSpec, vertex_params, labels, bottom_index: int = 0):
        L = disc.boundary_length
        params = [float(s) % L for s in vertex_params]
        if len(params) != len(labels):
            raise MalformedPolygonError("one label per side required")
        if len(params) < 4 or len(params) % 2 != 0:
            raise MalformedPolygonError("Scherk polygon needs an even side count >= 4")
        for lab in labels:
            if lab not in ("A", "B"):
                raise MalformedPolygonError(f"bad side label {lab!r}")
        # rotate so vertex_params start at the smallest value, staying cyclic
        k = int(np.argmin(params))
        self.disc = disc
        self.vertex_params = params[k:] + params[:k]
        self.labels = list(labels[k:] + labels[:k])
        self.bottom_index = (bottom_index - k) % len(params)
        self._vertices = None
        self._sides = None

    @property
    def n_sides(self) -> int:
        return len(self.vertex_params)

    @property
    def vertices(self):
        if self._vertices is None:
            self._vertices = [self.disc.boundary_point(s) for s in self.vertex_params]
        return self._vertices

    @property
    def sides(self):
        if self._sides is None:
            n = self.n_sides
            self._sides = [
                GeodesicArc(self.disc.model, self.vertices[i], self.vertices[(i + 1) % n])
                for i in range(n)
            ]
        return self._sides

    def side_lengths(self) -> np.ndarray:
        return np.array([s.length for s in self.sides])

    def sum_length(self, label: str) -> float:
        return float(sum(s.length for s, lab in zip(self.sides, self.labels) if lab == label))

    def condition1_residual(self) -> float:
        return abs(self.sum_length("A") - self.sum_length("B"))

    def as_geodesic_polygon(self) -> GeodesicPolygon:
        return GeodesicPolygon(self.disc.model, self.vertices)

    def validate(self):
        """Raise unless labels alternate, params increase CCW and sides do not cross."""
        n = self.n_sides
        for i in range(n):
            if self.labels[i] == self.labels[(i + 1) % n]:
                raise MalformedPolygonError("side labels must alternate")
        gaps = np.diff(np.asarray(self.vertex_params + [self.vertex_params[0] + self.disc.boundary_length]))
        if np.any(gaps <= 0.0):
            raise MalformedPolygonError("vertex params must be strictly increasing mod L")
        m = polygon_metrics(self.as_geodesic_polygon())
        if not m.is_simple:
            raise MalformedPolygonError("two sides intersect inside the disc")
        return self

    def subtended_arcs(self) -> np.ndarray:
        """Boundary arc length subtended by each side."""
        L = self.disc.boundary_length
        p = np.asarray(self.vertex_params)
        return (np.roll(p, -1) - p) % L

    def to_json_dict(self) -> dict:
        return {
            "model": self.disc.model.kind,
            "vertices_s": list(self.vertex_params),
            "labels": list(self.labels),
        }

    @staticmethod
    def from_json_dict(data: dict) -> "ScherkPolygon":
        d = geometry.disc(data["model"])
        labels = list(data["labels"])
        bottom = labels.index("B") if "B" in labels else 0
        return ScherkPolygon(d, list(data["vertices_s"]), labels, bottom_index=bottom)

    def __repr__(self):
        return f"ScherkPolygon({self.n_sides} sides, labels={''.join(self.labels)})"


def uncovered_boundary_length(poly: ScherkPolygon) -> float:
    """Boundary length not yet consumed by the polygon: L minus the perimeter.

    Each attached trapezoid strictly increases the perimeter, and the
    perimeter tends to L as the domains exhaust the disc, so this is a
    monotone coverage gauge for the iterative example.
    """
    return poly.disc.boundary_length - float(np.sum(poly.side_lengths()))


# ---------------------------------------------------------------------------
# balanced inscribed quadrilateral
# ---------------------------------------------------------------------------


def _quadrilateral_balance(disc: DiscSpec, x0_s: float, s: float) -> float:
    """sum|A| - sum|B| for the candidate quadrilateral at half-offset s."""
    L = disc.boundary_length
    p1, p2 = x0_s + s, x0_s + L / 2 - s
    p3, p4 = x0_s + L / 2 + s, x0_s + L - s
    b = disc.chord_length(p1, p2) + disc.chord_length(p3, p4)
    a = disc.chord_length(p2, p3) + disc.chord_length(p4, p1)
    return a - b


def inscribed_quadrilateral(disc: DiscSpec, x0_s: float = 0.0, tol: float = CONDITION1_TOL) -> ScherkPolygon:
    """Balanced quadrilateral associated to the basepoint at arc length x0_s.

    Vertices sit at x0_s +- s0 and x0_s + L/2 +- s0 where s0 balances the
    two A chords against the two B chords; the bottom side joins the two
    vertices adjacent to the basepoint arc.
    """
    L = disc.boundary_length
    lo, hi = 1e-9 * L, L / 4 - 1e-9 * L  # beyond L/4 the vertex order degenerates
    s0 = bisect_root(lambda s: _quadrilateral_balance(disc, x0_s, s), lo, hi, ftol=tol)
    params = [x0_s + s0, x0_s + L / 2 - s0, x0_s + L / 2 + s0, x0_s + L - s0]
    # side 0 joins the two vertices nearest the basepoint half: label B (bottom)
    poly = ScherkPolygon(disc, params, ["B", "A", "B", "A"], bottom_index=0)
    # rotation in the constructor may have moved the bottom index; recover it
    want = (x0_s + s0) % L
    for i, s in enumerate(poly.vertex_params):
        if abs(s - want) < 1e-9 * L or abs(abs(s - want) - L) < 1e-9 * L:
            poly.bottom_index = i
            break
    residual = poly.condition1_residual()
    if residual > max(tol, 1e2 * tol):
        raise BracketError(f"quadrilateral balance residual {residual:.3g} above tolerance")
    return poly


# ---------------------------------------------------------------------------
# regular trapezoids
# ---------------------------------------------------------------------------


@dataclass
class Trapezoid:
    """Balanced four-arc region attached to a chord of the disc boundary.

    The base is the chord from p1 to p2 (the side of the parent polygon);
    the flanks run p1 -> p_minus -> p_plus -> p2 along new chords, with
    l1 + l3 = l2 + l4.
    """

    disc: DiscSpec
    p1_s: float
    p2_s: float
    s0: float
    arc_span: float
    mid_s: float

    @property
    def p_minus_s(self) -> float:
        return self.mid_s - self.s0

    @property
    def p_plus_s(self) -> float:
        return self.mid_s + self.s0

    @property
    def lengths(self):
        d = self.disc
        l1 = d.chord_length(self.p1_s, self.p_minus_s)
        l2 = d.chord_length(self.p_minus_s, self.p_plus_s)
        l3 = d.chord_length(self.p_plus_s, self.p2_s)
        l4 = d.chord_length(self.p1_s, self.p2_s)
        return l1, l2, l3, l4

    @property
    def balance_residual(self) -> float:
        l1, l2, l3, l4 = self.lengths
        return abs(l1 + l3 - l2 - l4)

    def arcs(self):
        d = self.disc
        return [
            d.chord(self.p1_s, self.p_minus_s),
            d.chord(self.p_minus_s, self.p_plus_s),
            d.chord(self.p_plus_s, self.p2_s),
            d.chord(self.p2_s, self.p1_s),
        ]

    def as_geodesic_polygon(self) -> GeodesicPolygon:
        d = self.disc
        pts = [d.boundary_point(s) for s in (self.p1_s, self.p_minus_s, self.p_plus_s, self.p2_s)]
        return GeodesicPolygon(d.model, pts)


def trapezoid_balance(disc: DiscSpec, p1_s: float, p2_s: float, s: float) -> float:
    """l1 + l3 - l2 - l4 at flank offset s from the arc midpoint."""
    L = disc.boundary_length
    span = (p2_s - p1_s) % L
    mid = p1_s + span / 2
    l1 = disc.chord_length(p1_s, mid - s)
    l2 = disc.chord_length(mid - s, mid + s)
    l3 = disc.chord_length(mid + s, p2_s)
    l4 = disc.chord_length(p1_s, p2_s)
    return l1 + l3 - l2 - l4


def regular_trapezoid(disc: DiscSpec, p1_s: float, p2_s: float, tol: float = CONDITION1_TOL) -> Trapezoid:
    """Regular trapezoid over the counter-clockwise boundary arc p1 -> p2.

    The two new vertices are symmetric about the arc midpoint; their
    offset solves the balance l1 + l3 = l2 + l4 (sign change guaranteed by
    the triangle inequality at s -> 0 and by l1, l3 -> 0 at the far end).
    """
    L = disc.boundary_length
    span = (p2_s - p1_s) % L
    if span <= 0.0 or span >= L:
        raise GeometryError("trapezoid needs a nondegenerate boundary arc")
    half = span / 2
    lo, hi = 1e-9 * span, half * (1 - 1e-9)
    s0 = bisect_root(lambda s: trapezoid_balance(disc, p1_s, p2_s, s), lo, hi, ftol=tol)
    trap = Trapezoid(disc, p1_s % L, p2_s % L, s0, span, (p1_s + half) % L)
    if trap.balance_residual > max(tol, 1e2 * tol):
        raise BracketError("trapezoid balance residual above tolerance")
    return trap


# ---------------------------------------------------------------------------
# admissibility (Jenkins-Serrin conditions)
# ---------------------------------------------------------------------------


@dataclass
class AdmissibilityReport:
    condition1_residual: float
    slack_a: float
    slack_b: float
    worst_polygon: tuple
    worst_polygon_a: tuple
    worst_polygon_b: tuple
    passes: bool
    tol: float
    slack_tol: float

    def to_json_dict(self) -> dict:
        return {
            "condition1_residual": self.condition1_residual,
            "slack_a": self.slack_a,
            "slack_b": self.slack_b,
            "worst_polygon": list(self.worst_polygon),
            "worst_polygon_a": list(self.worst_polygon_a),
            "worst_polygon_b": list(self.worst_polygon_b),
            "passes": self.passes,
        }


def check_admissible(poly: ScherkPolygon, tol: float = CONDITION1_TOL, slack_tol: float = SLACK_TOL) -> AdmissibilityReport:
    """Evaluate both Jenkins-Serrin conditions for an A/B labeled polygon.

    Every cyclic vertex subset of size >= 3 (excluding the full set) spans
    an inscribed polygon P with geodesic sides between consecutive chosen
    vertices; a(P) sums the |A_j| of polygon sides both of whose endpoints
    are adjacent in P, b(P) likewise.  Slacks are min(|P| - 2a(P)) and
    min(|P| - 2b(P)) over all P.
    """
    n = poly.n_sides
    if n > ENUMERATION_CAP:
        raise EnumerationCapError(f"{n} vertices: inscribed-polygon enumeration capped at {ENUMERATION_CAP}")
    verts = poly.vertices
    model = poly.disc.model
    dist = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            dist[i, j] = dist[j, i] = model.distance(verts[i], verts[j])
    side_len = poly.side_lengths()

    slack_a = np.inf
    slack_b = np.inf
    worst_a: tuple = ()
    worst_b: tuple = ()
    for m in range(3, n):
        for subset in itertools.combinations(range(n), m):
            perim = 0.0
            a_sum = 0.0
            b_sum = 0.0
            for k in range(m):
                i, j = subset[k], subset[(k + 1) % m]
                perim += dist[i, j]
                if (i + 1) % n == j:  # this chord is polygon side i
                    if poly.labels[i] == "A":
                        a_sum += side_len[i]
                    else:
                        b_sum += side_len[i]
            sa = perim - 2.0 * a_sum
            sb = perim - 2.0 * b_sum
            if sa < slack_a:
                slack_a, worst_a = sa, subset
            if sb < slack_b:
                slack_b, worst_b = sb, subset
    residual = poly.condition1_residual()
    passes = residual <= tol and slack_a > slack_tol and slack_b > slack_tol
    worst = worst_a if slack_a <= slack_b else worst_b
    return AdmissibilityReport(
        condition1_residual=residual,
        slack_a=float(slack_a),
        slack_b=float(slack_b),
        worst_polygon=worst,
        worst_polygon_a=worst_a,
        worst_polygon_b=worst_b,
        passes=bool(passes),
        tol=tol,
        slack_tol=slack_tol,
    )


# ---------------------------------------------------------------------------
# trapezoid attachment with vertex perturbation
# ---------------------------------------------------------------------------


def _shared_vertex(poly: ScherkPolygon, a_side: int, b_side: int) -> int:
    n = poly.n_sides
    if (b_side + 1) % n == a_side:
        return a_side  # b ends where a starts
    if (a_side + 1) % n == b_side:
        return b_side  # a ends where b starts
    raise GeometryError("the A and B sides must be adjacent (trapezoids share one vertex)")


def build_attached(poly: ScherkPolygon, a_side: int, b_side: int, tau: float, sigma: float):
    """Polygon with trapezoids on a_side/b_side, near vertices displaced.

    tau displaces the new vertex of the A-trapezoid nearest the shared
    vertex toward it along the boundary; sigma displaces the near vertex
    of the B-trapezoid likewise.  tau = sigma = 0 is the plain attachment.
    """
    if poly.labels[a_side] != "A" or poly.labels[b_side] != "B":
        raise GeometryError("attachment sides must carry labels A and B respectively")
    n = poly.n_sides
    p_idx = _shared_vertex(poly, a_side, b_side)
    L = poly.disc.boundary_length
    params = poly.vertex_params

    def side_span(i):
        return params[i], params[(i + 1) % n]

    ta = regular_trapezoid(poly.disc, *side_span(a_side))
    tb = regular_trapezoid(poly.disc, *side_span(b_side))

    # near vertex of each trapezoid relative to the shared vertex p
    a_minus, a_plus = ta.p_minus_s, ta.p_plus_s
    b_minus, b_plus = tb.p_minus_s, tb.p_plus_s
    if p_idx == a_side:  # a starts at p: its near vertex is p_minus, moved down
        a_minus = (a_minus - tau) % L
    else:  # a ends at p: near vertex is p_plus, moved up
        a_plus = (a_plus + tau) % L
    if p_idx == b_side:
        b_minus = (b_minus - sigma) % L
    else:
        b_plus = (b_plus + sigma) % L

    new_params: list[float] = []
    new_labels: list[str] = []
    inserted: dict[int, tuple] = {}
    for i in range(n):
        new_params.append(params[i])
        if i == a_side:
            start = len(new_labels)
            new_labels.extend(["A", "B", "A"])
            new_params.extend([a_minus, a_plus])
            inserted[a_side] = (start, start + 3)
        elif i == b_side:
            start = len(new_labels)
            new_labels.extend(["B", "A", "B"])
            new_params.extend([b_minus, b_plus])
            inserted[b_side] = (start, start + 3)
        else:
            new_labels.append(poly.labels[i])
    bottom = poly.bottom_index
    shift = sum(2 for s in (a_side, b_side) if s < bottom)
    out = ScherkPolygon(poly.disc, new_params, new_labels, bottom_index=bottom + shift)
    return out, ta, tb


def attach_and_perturb(
    poly: ScherkPolygon,
    a_side: int,
    b_side: int,
    tau_grid=None,
    tol: float = CONDITION1_TOL,
    slack_tol: float = SLACK_TOL,
):
    """Attach trapezoids to an adjacent A/B side pair and restore admissibility.

    The A-trapezoid near vertex moves by the prescribed tau; the matching
    B-vertex displacement is solved so that the first Jenkins-Serrin
    condition holds exactly.  The smallest grid tau whose polygon passes
    `check_admissible` is returned with the polygon.
    """
    if tau_grid is None:
        tau_grid = default_tau_grid()
    taus = sorted(float(t) for t in tau_grid)

    p_idx = _shared_vertex(poly, a_side, b_side)
    L = poly.disc.boundary_length
    # room available for the sigma displacement: arc gap from the B near vertex to p
    tb = regular_trapezoid(poly.disc, poly.vertex_params[b_side], poly.vertex_params[(b_side + 1) % poly.n_sides])
    if p_idx == b_side:
        gap_b = (tb.p_minus_s - poly.vertex_params[p_idx]) % L
    else:
        gap_b = (poly.vertex_params[p_idx] - tb.p_plus_s) % L

    def residual(tau, sigma):
        cand, _, _ = build_attached(poly, a_side, b_side, tau, sigma)
        return cand.sum_length("A") - cand.sum_length("B")

    for tau in taus:
        if tau <= 0.0:
            continue
        sig_hi = 0.9 * gap_b
        try:
            sigma = bisect_root(lambda s: residual(tau, s), 0.0, sig_hi, ftol=tol)
        except BracketError:
            continue
        cand, _, _ = build_attached(poly, a_side, b_side, tau, sigma)
        report = check_admissible(cand, tol=tol, slack_tol=slack_tol)
        if report.passes:
            cand.validate()
            return cand, tau
    raise NoAdmissibleTauError("tau grid exhausted without reaching admissibility; refine the grid")


def default_tau_grid(tau_max: float = 0.05, levels: int = 21):
    """Geometric perturbation grid tau_max * 2^-j, j = 0..levels-1."""
    return [tau_max * 2.0 ** (-j) for j in range(levels)]


# ---------------------------------------------------------------------------
# compact cores
# ---------------------------------------------------------------------------


@dataclass
class CompactCore:
    """Polygonal core of a Scherk domain minus discs around its offset vertices.

    K' is the geodesic polygon over the points at geodesic distance r
    along the radial geodesics to the domain vertices; K removes geodesic
    discs of radius 1 - r around each of those points.
    """

    poly: ScherkPolygon
    r: float
    centers: list  # offset vertex points p_i
    core_polygon: GeodesicPolygon
    notch_radius: float
    side_labels: list

    def contains(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        ring = self.core_polygon.boundary_polyline()
        inside = MplPath(ring).contains_points(pts)
        model = self.poly.disc.model
        for c in self.centers:
            if not inside.any():
                break
            d = _vector_distance(model, pts, c)
            inside &= d > self.notch_radius
        return inside

    def area(self, n_samples: int = 200_000, seed: int = 0) -> float:
        """Monte-Carlo area with the metric area element (seeded, deterministic)."""
        rng = np.random.default_rng(seed)
        ring = self.core_polygon.boundary_polyline()
        lo, hi = ring.min(axis=0), ring.max(axis=0)
        pts = rng.uniform(lo, hi, size=(n_samples, 2))
        mask = self.contains(pts)
        lam = np.atleast_1d(self.poly.disc.model.conformal_factor(pts))
        box = float(np.prod(hi - lo))
        return box * float(np.mean(lam**2 * mask))

    def side_polylines(self, samples: int = 128):
        """Clipped chord polylines of the core boundary, one per domain side.

        Each entry is (label, points): the part of the K' side facing the
        same-index domain side, with the notch neighbourhoods removed.
        """
        out = []
        model = self.poly.disc.model
        n = len(self.centers)
        for i in range(n):
            arc = GeodesicArc(model, self.centers[i], self.centers[(i + 1) % n])
            pts = arc.polyline(samples)
            d0 = _vector_distance(model, pts, self.centers[i])
            d1 = _vector_distance(model, pts, self.centers[(i + 1) % n])
            keep = (d0 > self.notch_radius) & (d1 > self.notch_radius)
            out.append((self.side_labels[i], pts[keep]))
        return out

    def boundary_polyline(self, samples: int = 128) -> np.ndarray:
        """Single closed polyline tracing chords and notch arcs of the core."""
        model = self.poly.disc.model
        pieces = [pts for _, pts in self.side_polylines(samples) if len(pts)]
        if not pieces:
            raise DegenerateCoreError("core boundary is empty")
        ring: list[np.ndarray] = []
        n = len(pieces)
        for i in range(n):
            ring.append(pieces[i])
            ring.append(_notch_arc(model, self.centers[(i + 1) % n], self.notch_radius,
                                   pieces[i][-1], pieces[(i + 1) % n][0]))
        return np.vstack(ring)


def _vector_distance(model: MetricModel, pts: np.ndarray, q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if not model.hyperbolic:
        return np.hypot(pts[:, 0] - q[0], pts[:, 1] - q[1])
    d2 = np.sum((pts - q) ** 2, axis=1)
    den = (1.0 - np.sum(pts**2, axis=1)) * (1.0 - np.sum(q**2))
    return np.arccosh(1.0 + 2.0 * d2 / den)


def _notch_arc(model: MetricModel, center, radius_g: float, start, end, samples: int = 24) -> np.ndarray:
    """Points of the metric circle around `center` from `start` to `end`.

    The hyperbolic circle is the Mobius image of a Euclidean circle around
    the origin; the arc between the two given points is taken the short
    way, which is the portion bounding the notch.
    """
    c = complex(center[0], center[1])
    if model.hyperbolic:
        rho = np.tanh(radius_g / 2.0)
    else:
        rho = radius_g

    def pull(p):
        z = complex(p[0], p[1])
        return (z - c) / (1.0 - np.conj(c) * z) if model.hyperbolic else z - c

    def push(w):
        return (w + c) / (1.0 + np.conj(c) * w) if model.hyperbolic else w + c

    a0 = np.angle(pull(start))
    a1 = np.angle(pull(end))
    delta = (a1 - a0 + np.pi) % (2.0 * np.pi) - np.pi  # short way
    angles = a0 + delta * np.linspace(0.0, 1.0, samples + 2)[1:-1]
    ws = rho * np.exp(1j * angles)
    zs = np.array([push(w) for w in ws])
    return np.column_stack([zs.real, zs.imag])


def compact_core(poly: ScherkPolygon, r: float) -> CompactCore:
    """Compact domain associated to a Scherk domain at offset parameter r."""
    if not (0.5 <= r < 1.0):
        raise DegenerateCoreError("core offset r must lie in [1/2, 1)")
    disc = poly.disc
    model = disc.model
    radial = model.geodesic_to_model_radius(r)
    angles = [disc.boundary_angle(s) for s in poly.vertex_params]
    centers = [radial * np.array([np.cos(t), np.sin(t)]) for t in angles]
    core_poly = GeodesicPolygon(model, centers)
    core = CompactCore(
        poly=poly,
        r=r,
        centers=centers,
        core_polygon=core_poly,
        notch_radius=1.0 - r,
        side_labels=list(poly.labels),
    )
    if not core.contains(np.zeros((1, 2)))[0]:
        raise DegenerateCoreError("disc center excluded from the core")
    return core


# ---------------------------------------------------------------------------
# iterative example sequence
# ---------------------------------------------------------------------------


@dataclass
class ExampleSchedule:
    """Accuracy/cap schedule for the iterative construction.

    eps_n and tau_n shrink geometrically; r_n climbs toward 1 so the cores
    nest; caps are the finite surrogates for the infinite boundary data.
    """

    x0_s: float = 0.0
    tau_max: float = 0.05
    tau_levels: int = 21
    caps: tuple = (5.0, 10.0, 20.0)

    def eps(self, n: int) -> float:
        return 2.0 ** (-n)

    def r_core(self, n: int) -> float:
        return 1.0 - 0.08 * 2.0 ** (-(n - 1))

    def tau_grid(self):
        return default_tau_grid(self.tau_max, self.tau_levels)


@dataclass
class ExampleStep:
    index: int
    polygon: ScherkPolygon
    tau: float | None
    eps: float
    r_core: float
    core: CompactCore
    caps: tuple
    attached_pair: tuple | None

    def manifest(self) -> dict:
        rep = check_admissible(self.polygon)
        return {
            "step": self.index,
            "vertices_s": list(self.polygon.vertex_params),
            "labels": list(self.polygon.labels),
            "tau": self.tau,
            "r_n": self.r_core,
            "slacks": {"slack_a": rep.slack_a, "slack_b": rep.slack_b},
            "condition1_residual": rep.condition1_residual,
            "uncovered_boundary": uncovered_boundary_length(self.polygon),
        }


@dataclass
class ExampleSequence:
    disc: DiscSpec
    steps: list
    schedule: ExampleSchedule
    normalization: float = 0.0

    def manifests(self):
        return [s.manifest() for s in self.steps]


def _close_mod(x: float, y: float, L: float) -> bool:
    d = abs(x - y) % L
    return min(d, L - d) < 1e-9


def _find_side(poly: ScherkPolygon, span: tuple, L: float) -> int:
    s0, s1 = span
    for i in range(poly.n_sides):
        a = poly.vertex_params[i]
        b = poly.vertex_params[(i + 1) % poly.n_sides]
        if _close_mod(a, s0, L) and _close_mod(b, s1, L):
            return i
    raise GeometryError("side not found in current polygon")


def iterate_example(disc: DiscSpec, n_steps: int, schedule: ExampleSchedule | None = None) -> ExampleSequence:
    """Build the iterative example-domain sequence.

    Step 1 is the balanced inscribed quadrilateral; each later step
    attaches a perturbed trapezoid pair to the next adjacent A/B side pair
    (the two pairs of the base quadrilateral first, then round-robin over
    the pairs created by earlier attachments).  Solving is deferred to the
    solver module; this records the pure geometry plus the cap schedule.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if schedule is None:
        schedule = ExampleSchedule()
    L = disc.boundary_length

    poly = inscribed_quadrilateral(disc, schedule.x0_s)
    steps = [
        ExampleStep(
            index=1,
            polygon=poly,
            tau=None,
            eps=schedule.eps(1),
            r_core=schedule.r_core(1),
            core=compact_core(poly, schedule.r_core(1)),
            caps=schedule.caps,
            attached_pair=None,
        )
    ]

    def span(p: ScherkPolygon, i: int) -> tuple:
        return (p.vertex_params[i], p.vertex_params[(i + 1) % p.n_sides])

    # adjacent (A side, B side) pairs pending attachment, oldest first
    b0 = poly.bottom_index
    queue = [
        (span(poly, (b0 + 1) % 4), span(poly, b0)),          # A1, B1 share a vertex
        (span(poly, (b0 + 3) % 4), span(poly, (b0 + 2) % 4)),  # A2, B2 share a vertex
    ]

    for n in range(2, n_steps + 1):
        if not queue:
            raise NoAdmissibleTauError("attachment queue exhausted")
        a_span, b_span = queue.pop(0)
        a_idx = _find_side(poly, a_span, L)
        b_idx = _find_side(poly, b_span, L)
        poly, tau = attach_and_perturb(poly, a_idx, b_idx, tau_grid=schedule.tau_grid())
        # the attachment inserted sides; enqueue the fresh adjacent pairs of
        # each trapezoid (outer flank with the new middle side)
        for base_span, lab in ((a_span, "A"), (b_span, "B")):
            i0 = _locate_vertex(poly, base_span[0], L)
            # inserted sides start at the base side's start vertex
            first = span(poly, i0)
            second = span(poly, (i0 + 1) % poly.n_sides)
            third = span(poly, (i0 + 2) % poly.n_sides)
            if lab == "A":  # labels A,B,A: pair the middle B with each flank A
                queue.append((first, second))
                queue.append((third, second))
            else:  # labels B,A,B
                queue.append((second, first))
                queue.append((second, third))
        rc = schedule.r_core(n)
        steps.append(
            ExampleStep(
                index=n,
                polygon=poly,
                tau=tau,
                eps=schedule.eps(n),
                r_core=rc,
                core=compact_core(poly, rc),
                caps=schedule.caps,
                attached_pair=(a_span, b_span),
            )
        )
    return ExampleSequence(disc=disc, steps=steps, schedule=schedule)


def _locate_vertex(poly: ScherkPolygon, s: float, L: float) -> int:
    for i, v in enumerate(poly.vertex_params):
        if _close_mod(v, s, L):
            return i
    raise GeometryError("vertex not found in current polygon")


def save_domain_json(poly: ScherkPolygon, path):
    from .jsonio import canonical_dumps

    with open(path, "w") as fh:
        fh.write(canonical_dumps(poly.to_json_dict()))


def load_domain_json(path) -> ScherkPolygon:
    with open(path) as fh:
        return ScherkPolygon.from_json_dict(json.load(fh))


def find_label_swap_axis(poly: ScherkPolygon) -> float | None:
    """Angle of a reflection axis that maps the polygon to itself with A/B swapped."""
    found = label_swap_axis_and_map(poly)
    return None if found is None else found[0]


def label_swap_axis_and_map(poly: ScherkPolygon):
    """Reflection axis with swapped labels, plus the induced side permutation.

    The reflection fixes two antipodal vertices and permutes the rest; if
    such an axis exists the Scherk data is odd under it, which meshing
    exploits to cancel discretization bias in the capped solves.  Returns
    (axis angle at a fixed vertex, {side i: reflected side}) or None.
    """
    L = poly.disc.boundary_length
    n = poly.n_sides
    params = poly.vertex_params
    for i in range(n):
        s_i = params[i]
        perm = []
        ok = True
        for j in range(n):
            target = (2.0 * s_i - params[j]) % L
            for k in range(n):
                if _close_mod(params[k], target, L):
                    perm.append(k)
                    break
            else:
                ok = False
                break
        if not ok:
            continue
        good = True
        for j in range(n):
            a, b = perm[j], perm[(j + 1) % n]
            # the reflected side joins vertices a and b (orientation reversed)
            if (b + 1) % n == a:
                sidx = b
            elif (a + 1) % n == b:
                sidx = a
            else:
                good = False
                break
            if poly.labels[sidx] == poly.labels[j]:
                good = False
                break
        if good:
            side_map = {}
            for j in range(n):
                a, b = perm[j], perm[(j + 1) % n]
                side_map[j] = b if (b + 1) % n == a else a
            return float(poly.disc.boundary_angle(s_i)), side_map
    return None
