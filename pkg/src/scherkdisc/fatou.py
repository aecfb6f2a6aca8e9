"""Radial-limit diagnostics for solved fields.

Implements the quantities behind the Fatou-type arguments:

* compressions eta with 0 < eta' < 1 that turn an unbounded u into a
  bounded psi = eta(u) with controlled total variation,
* hypothesis checks on disc-shaped fields: polar-density bounds on an
  annulus, boundedness of the flux, and the coercivity inequality
  g(grad u, X_u) >= delta |grad u| + h with an integrable h,
* total-variation integrals of |grad psi| over nested sub-discs,
* a finite-resolution radial-limit classifier and angular-measure report.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError, UnsupportedDomainError
from .solver import Field, OperatorSpec, flux_metric_norm


# ---------------------------------------------------------------------------
# compression
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Compression:
    """Smooth squashing map with 0 < eta' < 1.

    positive kind: eta(x) = (1 + tanh(x/2))/2 with range (0,1);
    negative kind is the same curve shifted to (-1,0).
    eta'(x) = sech(x/2)^2 / 4 lies in (0, 1/4].
    """

    kind: str = "positive"

    def __post_init__(self):
        if self.kind not in ("positive", "negative"):
            raise ValueError(f"unknown compression kind {self.kind!r}")

    def eta(self, x):
        x = np.asarray(x, dtype=float)
        base = 0.5 * (1.0 + np.tanh(x / 2.0))
        return base if self.kind == "positive" else base - 1.0

    def eta_prime(self, x):
        x = np.asarray(x, dtype=float)
        return 0.25 / np.cosh(x / 2.0) ** 2

    @property
    def value_range(self) -> tuple:
        return (0.0, 1.0) if self.kind == "positive" else (-1.0, 0.0)


@dataclass
class CompressedField:
    """psi = eta(u): nodal values plus per-triangle gradients."""

    source: Field
    compression: Compression
    values: np.ndarray
    gradients: np.ndarray  # per triangle: eta'(u_centroid) * grad u

    @property
    def mesh(self):
        return self.source.mesh


def compress(fld: Field, c: Compression | None = None) -> CompressedField:
    if c is None:
        c = Compression("positive")
    values = c.eta(fld.values)
    u_cent = fld.values[fld.mesh.triangles].mean(axis=1)
    grads = c.eta_prime(u_cent)[:, None] * fld.gradients
    return CompressedField(source=fld, compression=c, values=values, gradients=grads)


# ---------------------------------------------------------------------------
# hypothesis checks
# ---------------------------------------------------------------------------


@dataclass
class HypothesisReport:
    G_bounds: tuple  # (alpha_lo, beta_hi) on the annulus
    annulus: tuple
    flux_bound: float
    delta: float
    coercivity_min: float  # pointwise min of g(grad u, X_u) - delta|grad u|_g - h
    integral_abs_h: float
    integral_abs_f: float
    identity_max_error: float  # heisenberg: |g(grad u, X_u) - (W + h)|, else 0
    verdict_a: bool
    verdict_b: bool
    verdict_c: bool

    def to_json_dict(self) -> dict:
        return {
            "G_bounds": {"alpha_lo": self.G_bounds[0], "beta_hi": self.G_bounds[1]},
            "annulus": list(self.annulus),
            "flux_bound": self.flux_bound,
            "delta": self.delta,
            "coercivity_min": self.coercivity_min,
            "integral_abs_h": self.integral_abs_h,
            "integral_abs_f": self.integral_abs_f,
            "identity_max_error": self.identity_max_error,
            "verdicts": {"a": self.verdict_a, "b": self.verdict_b, "c": self.verdict_c},
        }


def heisenberg_h(points: np.ndarray, grads: np.ndarray) -> np.ndarray:
    """The integrable function h with g(grad u, X_u) = W + h for the Killing flux.

    From alpha^2 + beta^2 = |grad u|^2 + (y u_x - x u_y) + r^2/4 one gets
    h = -(1 + (y u_x - x u_y)/2 + r^2/4) / W.
    """
    x, y = points[:, 0], points[:, 1]
    rot = y * grads[:, 0] - x * grads[:, 1]
    W = np.sqrt(1.0 + (0.5 * y + grads[:, 0]) ** 2 + (-0.5 * x + grads[:, 1]) ** 2)
    return -(1.0 + 0.5 * rot + 0.25 * (x**2 + y**2)) / W


DEFAULT_ANNULUS = (0.5, 1.0)


def check_hypotheses(fld: Field, op: OperatorSpec | None = None, delta: float | None = None,
                     annulus: tuple = DEFAULT_ANNULUS) -> HypothesisReport:
    """Check the three radial-limit hypotheses on a disc-shaped field.

    a) the polar density is pinched on the annulus, b) the flux is
    bounded, c) coercivity g(grad u, X_u) >= delta |grad u|_g + h with
    h integrable.  The per-variant (delta, h) pairs are the sharp desk
    choices: heisenberg uses delta = 3/10 and the closed-form h; the
    minimal variants use delta = 1, h = -1; harmonic uses h = -delta^2/4.
    """
    if op is None:
        op = fld.op
    if fld.mesh.meta.get("kind") != "disc":
        raise UnsupportedDomainError("hypothesis checks need a disc-shaped domain")
    rho_lo, rho_hi = annulus
    if not (0.0 < rho_lo <= rho_hi <= 1.0):
        raise GeometryError("annulus must satisfy 0 < rho_lo <= rho_hi <= 1")

    model = op.metric
    alpha_lo = model.polar_density(rho_lo)
    beta_hi = model.polar_density(rho_hi)

    cent = fld.mesh.centroids
    grads = fld.gradients
    areas = fld.mesh.areas
    lam = np.atleast_1d(model.conformal_factor(cent))
    area_w = lam**2  # metric area element per unit model area

    Xn = flux_metric_norm(op, cent, grads)
    M = float(np.max(Xn))

    gnorm_g = np.hypot(grads[:, 0], grads[:, 1]) / lam  # metric gradient norm
    if op.variant == "heisenberg_killing":
        if delta is None:
            delta = 0.3
        h = heisenberg_h(cent, grads)
        alpha = 0.5 * cent[:, 1] + grads[:, 0]
        beta = -0.5 * cent[:, 0] + grads[:, 1]
        W = np.sqrt(1.0 + alpha**2 + beta**2)
        pairing = (grads[:, 0] ** 2 + grads[:, 1] ** 2 + 0.5 * (cent[:, 1] * grads[:, 0] - cent[:, 0] * grads[:, 1])) / W
        identity_err = float(np.max(np.abs(pairing - (W + h))))
    elif op.variant in ("minimal_euclidean", "minimal_hyperbolic"):
        if delta is None:
            delta = 1.0
        W = np.sqrt(1.0 + gnorm_g**2)
        pairing = gnorm_g**2 / W
        h = np.full(len(cent), -1.0)
        identity_err = 0.0
    else:  # harmonic
        if delta is None:
            delta = 1.0
        pairing = gnorm_g**2
        h = np.full(len(cent), -(delta**2) / 4.0)
        identity_err = 0.0

    coer = pairing - delta * gnorm_g - h
    coercivity_min = float(np.min(coer))
    int_h = float(np.sum(np.abs(h) * area_w * areas))
    if op.source is not None:
        f_vals = np.asarray(op.source(cent), dtype=float)
        int_f = float(np.sum(np.abs(f_vals) * area_w * areas))
    else:
        int_f = 0.0

    verdict_a = bool(0.0 < alpha_lo <= beta_hi < np.inf)
    verdict_b = bool(np.isfinite(M))
    verdict_c = bool(coercivity_min >= -1e-9 and np.isfinite(int_h))
    return HypothesisReport(
        G_bounds=(float(alpha_lo), float(beta_hi)),
        annulus=(float(rho_lo), float(rho_hi)),
        flux_bound=M,
        delta=float(delta),
        coercivity_min=coercivity_min,
        integral_abs_h=int_h,
        integral_abs_f=int_f,
        identity_max_error=identity_err,
        verdict_a=verdict_a,
        verdict_b=verdict_b,
        verdict_c=verdict_c,
    )


# ---------------------------------------------------------------------------
# total-variation integrals over nested sub-discs
# ---------------------------------------------------------------------------

_TV_SUBDIV = 4  # fixed barycentric subsampling depth per triangle


def _barycentric_subsamples(n: int) -> np.ndarray:
    """Deterministic barycentric sample points interior to the triangle."""
    pts = []
    for i in range(n):
        for j in range(n - i):
            k = n - 1 - i - j
            pts.append([(i + 1.0 / 3.0) / n, (j + 1.0 / 3.0) / n, (k + 1.0 / 3.0) / n])
    return np.asarray(pts)


def tv_integral(psi: CompressedField, radii) -> list:
    """Integral of the metric |grad psi| over sub-discs of geodesic radius r.

    The integrand is the metric gradient norm times the metric area
    element (lambda^-1 |grad psi| * lambda^2 dx = lambda |grad psi| dx);
    triangles straddling a sub-disc rim contribute the fraction of their
    fixed barycentric subsamples inside.  Sequence is nondecreasing in r.
    """
    radii = [float(r) for r in radii]
    mesh = psi.mesh
    model = psi.source.op.metric
    if any(r <= 0.0 for r in radii):
        raise GeometryError("sub-disc radii must be positive")
    max_model = float(np.max(np.hypot(mesh.nodes[:, 0], mesh.nodes[:, 1])))
    bary = _barycentric_subsamples(_TV_SUBDIV)
    tri_pts = mesh.nodes[mesh.triangles]  # (M,3,2)
    sub = np.einsum("sk,mkd->msd", bary, tri_pts)  # (M,S,2)
    sub_r = np.hypot(sub[..., 0], sub[..., 1])
    gnorm = np.hypot(psi.gradients[:, 0], psi.gradients[:, 1])
    lam_c = np.atleast_1d(model.conformal_factor(mesh.centroids))
    cell = gnorm * lam_c * mesh.areas
    out = []
    for r in radii:
        rm = model.geodesic_to_model_radius(r)
        if rm > max_model * (1.0 + 1e-9) + 1e-12:
            raise GeometryError(f"sub-disc radius {r} beyond mesh support")
        frac = np.mean(sub_r <= rm, axis=1)
        out.append(float(np.sum(cell * frac)))
    return out


# ---------------------------------------------------------------------------
# radial-limit classification
# ---------------------------------------------------------------------------

FINITE = "finite"
PLUS_INF_CLASS = "plus_inf"
MINUS_INF_CLASS = "minus_inf"
UNDETERMINED = "undetermined"


@dataclass
class RayTrace:
    theta: float
    radii: np.ndarray  # geodesic radii, strictly increasing
    values: np.ndarray
    classification: str
    value: float | None = None  # finite limit estimate
    truncated: bool = False

    def to_json_dict(self) -> dict:
        d = {"theta": self.theta, "class": self.classification}
        if self.value is not None:
            d["value"] = self.value
        return d


@dataclass
class TraceParams:
    K: int = 8
    T_high: float | None = None  # default 0.8 * cap (inf if the field has no cap)
    eps_tail: float = 0.05


def _exit_radius(fld: Field, theta: float, tol: float = 1e-12) -> float:
    """Largest geodesic radius along the ray still inside the mesh (bisection).

    All supported domains are star-shaped about the origin (rays cross
    each geodesic side at most once), so membership along the ray is an
    interval and bisection is exact.
    """
    model = fld.op.metric
    direction = np.array([np.cos(theta), np.sin(theta)])

    def inside(rho: float) -> bool:
        pt = model.geodesic_to_model_radius(rho) * direction
        return bool(np.isfinite(fld.interpolate(pt[None, :])[0]))

    if not inside(0.0):
        raise GeometryError("mesh does not contain the disc center")
    lo, hi = 0.0, 1.0
    if inside(hi):
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if inside(mid):
            lo = mid
        else:
            hi = mid
    return lo


def trace_and_classify(fld: Field, theta: float, params: TraceParams | None = None) -> RayTrace:
    """Classify the radial limit along the ray of angle theta.

    Samples sit at geodesic radii (1 - 2^-k) * rho_exit, k = 1..K, where
    rho_exit is the exit radius of the ray from the solved domain (1 for
    disc domains, recovering the plain dyadic schedule).  Classification:
    plus_inf if u(r_K) > T_high with the last three increments positive;
    minus_inf symmetrically; finite if |u(r_K)| <= T_high and the last
    increment is at most eps_tail; otherwise undetermined.
    """
    if params is None:
        params = TraceParams()
    T_high = params.T_high
    if T_high is None:
        T_high = 0.8 * fld.cap if fld.cap is not None else np.inf
    model = fld.op.metric
    rho_exit = _exit_radius(fld, theta)
    ks = np.arange(1, params.K + 1)
    radii = (1.0 - 2.0 ** (-ks.astype(float))) * rho_exit
    direction = np.array([np.cos(theta), np.sin(theta)])
    pts = model.geodesic_to_model_radius(radii)[:, None] * direction[None, :]
    values = fld.interpolate(pts)

    if not np.all(np.isfinite(values)):
        return RayTrace(theta=theta, radii=radii, values=values,
                        classification=UNDETERMINED, truncated=True)
    inc = np.diff(values)
    last = float(values[-1])
    tail3 = inc[-3:]
    if last > T_high and np.all(tail3 > 0.0):
        cls, val = PLUS_INF_CLASS, None
    elif last < -T_high and np.all(tail3 < 0.0):
        cls, val = MINUS_INF_CLASS, None
    elif abs(last) <= T_high and abs(inc[-1]) <= params.eps_tail:
        cls, val = FINITE, last
    else:
        cls, val = UNDETERMINED, None
    return RayTrace(theta=theta, radii=radii, values=values, classification=cls, value=val)


@dataclass
class FatouReport:
    n_rays: int
    rays: list
    mu_finite: float
    mu_plus: float
    mu_minus: float
    mu_und: float

    def to_json_dict(self) -> dict:
        return {
            "n_rays": self.n_rays,
            "mu_finite": self.mu_finite,
            "mu_plus": self.mu_plus,
            "mu_minus": self.mu_minus,
            "mu_und": self.mu_und,
            "rays": [r.to_json_dict() for r in self.rays],
        }


def fatou_report(fld: Field, n_rays: int = 256, params: TraceParams | None = None,
                 arc_length_measure: bool = False) -> FatouReport:
    """Classify n_rays uniformly spaced rays and aggregate angular measures.

    Each ray carries weight 2 pi / n_rays; mu_und is defined as the
    complement so the four measures sum to 2 pi exactly.  With
    `arc_length_measure` the weights are multiplied by the boundary
    length factor (sinh 1 for the hyperbolic disc).

    The grid is cell-centered (midpoint rule): a measure estimator
    should not privilege the measure-zero exceptional directions
    (polygon vertices) that an endpoint grid would hit exactly; use
    trace_and_classify directly to probe a specific direction.
    """
    if n_rays < 16:
        raise ValueError("need at least 16 rays")
    thetas = 2.0 * np.pi * (np.arange(n_rays) + 0.5) / n_rays
    rays = [trace_and_classify(fld, float(t), params) for t in thetas]
    unit = 2.0 * np.pi / n_rays
    if arc_length_measure:
        unit *= fld.op.metric.boundary_length / (2.0 * np.pi)
    counts = {FINITE: 0, PLUS_INF_CLASS: 0, MINUS_INF_CLASS: 0, UNDETERMINED: 0}
    for r in rays:
        counts[r.classification] += 1
    total = unit * n_rays
    mu_f = unit * counts[FINITE]
    mu_p = unit * counts[PLUS_INF_CLASS]
    mu_m = unit * counts[MINUS_INF_CLASS]
    mu_u = total - mu_f - mu_p - mu_m  # exact complement
    return FatouReport(n_rays=n_rays, rays=rays, mu_finite=mu_f, mu_plus=mu_p,
                       mu_minus=mu_m, mu_und=mu_u)
