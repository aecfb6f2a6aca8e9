"""P1 finite-element solver for div(X_u) = f on meshed domains.

Four operator variants:

* ``harmonic``            X = grad u
* ``minimal_euclidean``   X = grad u / sqrt(1 + |grad u|^2)
* ``minimal_hyperbolic``  minimal-graph operator of the conformal metric;
  by conformal invariance of the 2-d pairing the Euclidean weak form uses
  X = grad u / sqrt(1 + lambda^-2 |grad u|^2) with the conformal factor
  lambda evaluated at the quadrature point
* ``heisenberg_killing``  Killing-graph flux X = (alpha/W, beta/W) with
  alpha = y/2 + u_x, beta = -x/2 + u_y, W^2 = 1 + alpha^2 + beta^2

All variants are assembled in the Euclidean weak form
``integral flux(x, grad u) . grad phi dx = - integral f phi w(x) dx``
with one-point (centroid) quadrature on P1 triangles; ``w`` is the metric
area weight (lambda^2) where the source term lives in the curved metric.
Newton iterations use exact flux Jacobians and backtracking damping.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import SolverError
from .geometry import EUCLIDEAN, HYPERBOLIC, MetricModel
from .meshing import Mesh, triangulate

VARIANTS = ("minimal_euclidean", "minimal_hyperbolic", "heisenberg_killing", "harmonic")

DAMPING_FLOOR = 2.0**-20


@dataclass(frozen=True)
class OperatorSpec:
    """Divergence-form operator div(X_u) = f.

    `source` is f as a vectorized callable of (n,2) points (None = 0).
    The metric determines the conformal factor for the hyperbolic minimal
    variant and the area weight of the source term.
    """

    variant: str
    metric: MetricModel
    source: object = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise SolverError(f"unknown operator variant {self.variant!r}")

    @property
    def bounded_flux(self) -> bool:
        return self.variant in ("minimal_euclidean", "minimal_hyperbolic", "heisenberg_killing")

    @property
    def metric_weighted_source(self) -> bool:
        """Whether the source integral carries the lambda^2 area element."""
        return self.metric.hyperbolic


def operator(variant: str, metric: MetricModel | None = None, source=None) -> OperatorSpec:
    if metric is None:
        metric = HYPERBOLIC if variant == "minimal_hyperbolic" else EUCLIDEAN
    return OperatorSpec(variant=variant, metric=metric, source=source)


# ---------------------------------------------------------------------------
# flux and its Jacobian (vectorized over quadrature points)
# ---------------------------------------------------------------------------


def _inv_lambda_sq(op: OperatorSpec, points: np.ndarray) -> np.ndarray:
    lam = np.atleast_1d(op.metric.conformal_factor(points))
    return 1.0 / lam**2


def _heisenberg_vw(points: np.ndarray, grads: np.ndarray):
    alpha = 0.5 * points[:, 1] + grads[:, 0]
    beta = -0.5 * points[:, 0] + grads[:, 1]
    W = np.sqrt(1.0 + alpha**2 + beta**2)
    return alpha, beta, W


def flux(op: OperatorSpec, points, grads) -> np.ndarray:
    """Flux vector X at quadrature points with P1 gradients (n,2)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    grads = np.atleast_2d(np.asarray(grads, dtype=float))
    if op.variant == "harmonic":
        return grads.copy()
    if op.variant == "minimal_euclidean":
        W = np.sqrt(1.0 + np.sum(grads**2, axis=1))
        return grads / W[:, None]
    if op.variant == "minimal_hyperbolic":
        s = _inv_lambda_sq(op, points)
        W = np.sqrt(1.0 + s * np.sum(grads**2, axis=1))
        return grads / W[:, None]
    alpha, beta, W = _heisenberg_vw(points, grads)
    return np.column_stack([alpha / W, beta / W])


def flux_jacobian(op: OperatorSpec, points, grads) -> np.ndarray:
    """d(flux)/d(grad u) as (n,2,2) arrays (exact closed forms)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    grads = np.atleast_2d(np.asarray(grads, dtype=float))
    n = len(grads)
    eye = np.broadcast_to(np.eye(2), (n, 2, 2))
    if op.variant == "harmonic":
        return eye.copy()
    if op.variant in ("minimal_euclidean", "minimal_hyperbolic"):
        s = np.ones(n) if op.variant == "minimal_euclidean" else _inv_lambda_sq(op, points)
        W = np.sqrt(1.0 + s * np.sum(grads**2, axis=1))
        outer = grads[:, :, None] * grads[:, None, :]
        return eye / W[:, None, None] - s[:, None, None] * outer / W[:, None, None] ** 3
    alpha, beta, W = _heisenberg_vw(points, grads)
    v = np.column_stack([alpha, beta])
    outer = v[:, :, None] * v[:, None, :]
    return eye / W[:, None, None] - outer / W[:, None, None] ** 3


def flux_metric_norm(op: OperatorSpec, points, grads) -> np.ndarray:
    """|X_u| in the operator's own metric (the bounded quantity <= 1)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    grads = np.atleast_2d(np.asarray(grads, dtype=float))
    if op.variant == "harmonic":
        lam = np.atleast_1d(op.metric.conformal_factor(points))
        return np.hypot(grads[:, 0], grads[:, 1]) / lam
    if op.variant == "minimal_euclidean":
        g = np.hypot(grads[:, 0], grads[:, 1])
        return g / np.sqrt(1.0 + g**2)
    if op.variant == "minimal_hyperbolic":
        lam = np.atleast_1d(op.metric.conformal_factor(points))
        gm = np.hypot(grads[:, 0], grads[:, 1]) / lam
        return gm / np.sqrt(1.0 + gm**2)
    alpha, beta, W = _heisenberg_vw(points, grads)
    return np.sqrt(alpha**2 + beta**2) / W


# ---------------------------------------------------------------------------
# boundary data
# ---------------------------------------------------------------------------

PLUS_INF = "plus_inf"
MINUS_INF = "minus_inf"


@dataclass
class BoundaryData:
    """Dirichlet data per boundary side-id, or a pointwise function.

    `side_values` maps side-id to a finite value or the symbolic strings
    'plus_inf'/'minus_inf', which are applied as +-cap.  Nodes shared by
    sides with different values receive the mean of the incident side
    values (the natural P1 compromise at polygon vertices).
    """

    side_values: dict | None = None
    cap: float | None = None
    func: object = None

    def __post_init__(self):
        if (self.side_values is None) == (self.func is None):
            raise SolverError("boundary data needs side_values or a function, not both")
        if self.side_values is not None:
            symbolic = any(v in (PLUS_INF, MINUS_INF) for v in self.side_values.values())
            if symbolic and (self.cap is None or self.cap <= 0.0):
                raise SolverError("symbolic infinite boundary data needs a positive cap")

    @staticmethod
    def from_function(fn) -> "BoundaryData":
        return BoundaryData(func=fn)

    @staticmethod
    def scherk(labels, cap: float) -> "BoundaryData":
        """+-cap data for an A/B labeled polygon: +inf on A sides, -inf on B."""
        return BoundaryData(
            side_values={i: (PLUS_INF if lab == "A" else MINUS_INF) for i, lab in enumerate(labels)},
            cap=cap,
        )

    def applied_value(self, side_id: int) -> float:
        v = self.side_values[side_id]
        if v == PLUS_INF:
            return float(self.cap)
        if v == MINUS_INF:
            return -float(self.cap)
        return float(v)

    def nodal_values(self, mesh: Mesh) -> tuple[np.ndarray, np.ndarray]:
        """(boundary node ids, Dirichlet values) for a mesh."""
        bnodes = mesh.boundary_nodes
        if self.func is not None:
            return bnodes, np.asarray(self.func(mesh.nodes[bnodes]), dtype=float)
        mesh_sides = set(int(m) for m in mesh.boundary_markers)
        missing = mesh_sides - set(self.side_values)
        if missing:
            raise SolverError(f"boundary data missing side ids {sorted(missing)}")
        for sid in self.side_values:
            if sid not in mesh_sides:
                raise SolverError(f"declared side id {sid} has no boundary edge")
        acc = np.zeros(mesh.n_nodes)
        cnt = np.zeros(mesh.n_nodes)
        for (i, j), marker in zip(mesh.boundary_edges, mesh.boundary_markers):
            v = self.applied_value(int(marker))
            acc[i] += v
            acc[j] += v
            cnt[i] += 1
            cnt[j] += 1
        return bnodes, acc[bnodes] / cnt[bnodes]


# ---------------------------------------------------------------------------
# solved field
# ---------------------------------------------------------------------------


@dataclass
class Field:
    """P1 solution: nodal values + piecewise-constant gradients + solve log."""

    mesh: Mesh
    op: OperatorSpec
    values: np.ndarray
    residual_norm: float
    newton_iters: int
    converged: bool
    residual_history: list = field(default_factory=list)
    damping_history: list = field(default_factory=list)
    cap: float | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def gradients(self) -> np.ndarray:
        if "grads" not in self._cache:
            self._cache["grads"] = np.einsum(
                "mi,mid->md", self.values[self.mesh.triangles], self.mesh.basis_gradients
            )
        return self._cache["grads"]

    def node_gradients(self) -> np.ndarray:
        """Area-weighted average of adjacent triangle gradients per node."""
        if "ngrads" not in self._cache:
            g = self.gradients
            w = self.mesh.areas
            acc = np.zeros((self.mesh.n_nodes, 2))
            tot = np.zeros(self.mesh.n_nodes)
            for k in range(3):
                idx = self.mesh.triangles[:, k]
                np.add.at(acc, idx, g * w[:, None])
                np.add.at(tot, idx, w)
            self._cache["ngrads"] = acc / tot[:, None]
        return self._cache["ngrads"]

    def _interp(self):
        from matplotlib.tri import LinearTriInterpolator

        if "interp" not in self._cache:
            self._cache["interp"] = LinearTriInterpolator(self.mesh.triangulation(), self.values)
        return self._cache["interp"]

    def interpolate(self, points) -> np.ndarray:
        """Barycentric interpolation; NaN outside the mesh."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = self._interp()(pts[:, 0], pts[:, 1])
        return np.asarray(out.filled(np.nan))

    def value_at_origin(self) -> float:
        return float(self.interpolate([[0.0, 0.0]])[0])

    def to_csv(self, path):
        ng = self.node_gradients()
        with open(path, "w") as fh:
            fh.write("x,y,u,ux,uy\n")
            for (x, y), u, (ux, uy) in zip(self.mesh.nodes, self.values, ng):
                fh.write(f"{x:.17g},{y:.17g},{u:.17g},{ux:.17g},{uy:.17g}\n")

    def solve_log(self) -> dict:
        return {
            "newton_iters": self.newton_iters,
            "residuals": list(self.residual_history),
            "damping": list(self.damping_history),
            "converged": self.converged,
        }


# ---------------------------------------------------------------------------
# assembly + Newton
# ---------------------------------------------------------------------------


def _assemble_residual(mesh: Mesh, op: OperatorSpec, u: np.ndarray, load: np.ndarray) -> np.ndarray:
    grads_u = np.einsum("mi,mid->md", u[mesh.triangles], mesh.basis_gradients)
    F = flux(op, mesh.centroids, grads_u)
    contrib = mesh.areas[:, None] * np.einsum("md,mid->mi", F, mesh.basis_gradients)
    R = np.zeros(mesh.n_nodes)
    for k in range(3):
        np.add.at(R, mesh.triangles[:, k], contrib[:, k])
    return R - load

def _assemble_load(mesh: Mesh, op: OperatorSpec) -> np.ndarray:
    load = np.zeros(mesh.n_nodes)
    if op.source is None:
        return load
    f_c = np.asarray(op.source(mesh.centroids), dtype=float)
    w = np.atleast_1d(op.metric.conformal_factor(mesh.centroids)) ** 2 if op.metric_weighted_source else 1.0
    cell = mesh.areas * (f_c * w if op.metric_weighted_source else f_c) / 3.0
    for k in range(3):
        np.add.at(load, mesh.triangles[:, k], cell)
    return -load


def _assemble_tangent(mesh: Mesh, op: OperatorSpec, u: np.ndarray) -> sp.csr_matrix:
    grads_u = np.einsum("mi,mid->md", u[mesh.triangles], mesh.basis_gradients)
    J = flux_jacobian(op, mesh.centroids, grads_u)
    # K_local[m,i,j] = A_m * grad(phi_i)^T J_m grad(phi_j)
    K_local = np.einsum("m,mid,mde,mje->mij", mesh.areas, mesh.basis_gradients, J, mesh.basis_gradients)
    rows = np.repeat(mesh.triangles, 3, axis=1).ravel()
    cols = np.tile(mesh.triangles, (1, 3)).ravel()
    return sp.coo_matrix(
        (K_local.ravel(), (rows, cols)), shape=(mesh.n_nodes, mesh.n_nodes)
    ).tocsr()


def solve(
    mesh: Mesh,
    op: OperatorSpec,
    bc: BoundaryData,
    tol: float = 1e-10,
    max_newton: int = 60,
    u0: np.ndarray | None = None,
) -> Field:
    """Solve the Dirichlet problem by damped Newton iteration.

    The convergence test is on the free-node residual norm relative to its
    initial value.  On stagnation (damping floor reached without descent)
    the best iterate is returned with `converged=False`.
    """
    bnodes, bvals = bc.nodal_values(mesh)
    free = np.setdiff1d(np.arange(mesh.n_nodes), bnodes)
    if len(free) == 0:
        raise SolverError("mesh has no interior nodes")
    load = _assemble_load(mesh, op)

    u = np.zeros(mesh.n_nodes) if u0 is None else np.asarray(u0, dtype=float).copy()
    u[bnodes] = bvals  # Dirichlet values are exact at boundary nodes

    def res_norm(vec):
        return float(np.linalg.norm(vec[free]))

    R = _assemble_residual(mesh, op, u, load)
    r0 = max(res_norm(R), 1e-300)
    scale = max(1.0, r0)
    history = [res_norm(R)]
    dampings: list = []
    best_u, best_r = u.copy(), history[0]
    converged = history[0] <= tol * scale
    iters = 0

    while not converged and iters < max_newton:
        K = _assemble_tangent(mesh, op, u)
        Kff = K[free][:, free]
        try:
            delta = spla.spsolve(Kff.tocsc(), -R[free])
        except RuntimeError as exc:
            raise SolverError(f"singular stiffness matrix: {exc}")
        if not np.all(np.isfinite(delta)):
            raise SolverError("singular stiffness matrix (non-finite Newton step)")
        s = 1.0
        cur = res_norm(R)
        while True:
            trial = u.copy()
            trial[free] += s * delta
            R_trial = _assemble_residual(mesh, op, trial, load)
            if res_norm(R_trial) < (1.0 - 0.25 * s) * cur or s < DAMPING_FLOOR:
                break
            s *= 0.5
        iters += 1
        dampings.append(s)
        if s < DAMPING_FLOOR and res_norm(R_trial) >= cur:
            break  # stagnation: no descent even with the smallest step
        u, R = trial, R_trial
        rn = res_norm(R)
        history.append(rn)
        if rn < best_r:
            best_u, best_r = u.copy(), rn
        converged = rn <= tol * scale

    if not converged:
        u, rn = best_u, best_r
    else:
        rn = history[-1]
    return Field(
        mesh=mesh,
        op=op,
        values=u,
        residual_norm=rn,
        newton_iters=iters,
        converged=bool(converged),
        residual_history=history,
        damping_history=dampings,
    )


# ---------------------------------------------------------------------------
# capped Scherk continuation
# ---------------------------------------------------------------------------

DEFAULT_CAPS = (5.0, 10.0, 20.0, 40.0)


def solve_scherk(poly, op: OperatorSpec, caps=DEFAULT_CAPS, h: float = 0.02,
                 tol: float = 1e-10, mesh: Mesh | None = None) -> list:
    """Capped continuation toward the infinite Jenkins-Serrin data.

    Solves with Dirichlet data +-T on the A/B sides for each cap T in
    increasing order, warm-starting every solve from the previous cap.
    All caps share one mesh, so consecutive differences measure only the
    continuation. Returns one Field per cap (with `.cap` set).
    """
    caps = sorted(float(T) for T in caps)
    if any(T <= 0 for T in caps):
        raise SolverError("caps must be positive")
    if mesh is None:
        mesh = triangulate(poly, h)
    fields = []
    u_prev = None
    for T in caps:
        bc = BoundaryData.scherk(poly.labels, T)
        if u_prev is not None:
            u0 = u_prev.copy()
        else:
            # harmonic solve with the same data: cheap, excellent Newton seed
            # for the saturating minimal/Killing fluxes
            harm = OperatorSpec(variant="harmonic", metric=op.metric)
            u0 = solve(mesh, harm, bc, tol=tol).values
        fld = solve(mesh, op, bc, tol=tol, u0=u0)
        if not fld.converged:
            # fallback: ramp the cap from half with warm starts
            uh = u0
            for Tsub in (T / 4.0, T / 2.0, T):
                fld = solve(mesh, op, BoundaryData.scherk(poly.labels, Tsub), tol=tol, u0=uh)
                uh = fld.values
            if not fld.converged:
                raise SolverError(f"continuation failed to converge at cap T={T}")
        fld.cap = T
        fields.append(fld)
        u_prev = fld.values
    return fields


def origin_gaps(fields) -> list:
    """|u_{T_{k+1}}(p0) - u_{T_k}(p0)| for consecutive caps (Cauchy gauge)."""
    vals = [f.value_at_origin() for f in fields]
    return [abs(b - a) for a, b in zip(vals, vals[1:])]
