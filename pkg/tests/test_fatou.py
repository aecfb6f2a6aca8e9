"""Radial-limit classification, compression, TV integrals, hypothesis checks."""

import dataclasses

import numpy as np
import pytest
from scipy import integrate

from scherkdisc import domains as dm
from scherkdisc import fatou as ft
from scherkdisc import meshing as ms
from scherkdisc import solver as sv
from scherkdisc.errors import GeometryError, UnsupportedDomainError
from scherkdisc.geometry import HYPERBOLIC, disc

D = disc("hyperbolic")
DE = disc("euclidean")


def harmonic_disc_field(h=0.03, bc=None):
    mesh = ms.triangulate(D, h)
    op = sv.operator("harmonic", metric=HYPERBOLIC)
    if bc is None:
        bc = sv.BoundaryData.from_function(
            lambda p: p[:, 0] / np.hypot(p[:, 0], p[:, 1]))
    return sv.solve(mesh, op, bc)


def scherk_quad_field(caps=(5.0, 10.0, 20.0), h=0.05):
    quad = dm.inscribed_quadrilateral(D, 0.0)
    mesh = ms.triangulate(quad, h)
    op = sv.operator("minimal_hyperbolic")
    return sv.solve_scherk(quad, op, caps=caps, h=h, mesh=mesh)[-1]


class TestCompression:
    def test_eta_range_and_derivative(self):
        c = ft.Compression("positive")
        x = np.linspace(-30.0, 30.0, 301)  # beyond ~37 eta saturates in float64
        y = c.eta(x)
        assert np.all((y > 0.0) & (y < 1.0))
        dp = c.eta_prime(x)
        assert np.all((dp > 0.0) & (dp <= 0.25 + 1e-15))
        # closed form eta' = sech^2(x/2)/4
        assert np.allclose(dp, 1.0 / (4.0 * np.cosh(x / 2.0) ** 2), atol=1e-14)

    def test_negative_kind_shifts_range(self):
        c = ft.Compression("negative")
        x = np.linspace(-5.0, 5.0, 11)
        assert np.all((c.eta(x) > -1.0) & (c.eta(x) < 0.0))

    def test_compress_chain_rule(self):
        fld = harmonic_disc_field(h=0.06)
        psi = ft.compress(fld)
        c = ft.Compression("positive")
        u_cent = fld.values[fld.mesh.triangles].mean(axis=1)
        assert np.allclose(psi.gradients, c.eta_prime(u_cent)[:, None] * fld.gradients)
        assert psi.values.min() > 0.0 and psi.values.max() < 1.0


class TestClassifier:
    def test_harmonic_ray_finite(self):
        fld = harmonic_disc_field()
        tr = ft.trace_and_classify(fld, 0.0)
        assert tr.classification == ft.FINITE
        assert abs(tr.value - 1.0) <= 5e-2

    def test_constant_field_finite_everywhere(self):
        mesh = ms.triangulate(D, 0.06)
        op = sv.operator("harmonic")
        fld = sv.Field(mesh=mesh, op=op, values=np.zeros(mesh.n_nodes),
                       residual_norm=0.0, newton_iters=0, converged=True)
        for theta in np.linspace(0.0, 2.0 * np.pi, 17):
            tr = ft.trace_and_classify(fld, float(theta))
            assert tr.classification == ft.FINITE
            assert tr.value == 0.0

    def test_scherk_midside_ray_plus_inf(self):
        fld = scherk_quad_field(caps=(5.0, 10.0, 20.0))
        quad = dm.inscribed_quadrilateral(D, 0.0)
        a_side = quad.labels.index("A")
        L = D.boundary_length
        mid_s = (quad.vertex_params[a_side]
                 + 0.5 * ((quad.vertex_params[(a_side + 1) % 4]
                           - quad.vertex_params[a_side]) % L)) % L
        theta = float(D.boundary_angle(mid_s))
        tr = ft.trace_and_classify(fld, theta, ft.TraceParams(T_high=16.0))
        assert tr.classification == ft.PLUS_INF_CLASS

    def test_compression_invariance_on_plus_inf_rays(self):
        fld = scherk_quad_field(caps=(5.0, 10.0, 20.0))
        rep = ft.fatou_report(fld, n_rays=64)
        c = ft.Compression("positive")
        psi_field = dataclasses.replace(fld, values=c.eta(fld.values), cap=None,
                                        _cache={})
        plus_rays = [r for r in rep.rays if r.classification == ft.PLUS_INF_CLASS]
        assert plus_rays
        for ray in plus_rays:
            tr = ft.trace_and_classify(psi_field, ray.theta,
                                       ft.TraceParams(T_high=1.0))
            assert tr.classification == ft.FINITE
            assert 0.0 < tr.value < 1.0

    def test_report_measures(self):
        fld = harmonic_disc_field()
        rep = ft.fatou_report(fld, n_rays=64)
        assert rep.mu_finite == 2.0 * np.pi
        assert rep.mu_plus == rep.mu_minus == 0.0
        total = rep.mu_finite + rep.mu_plus + rep.mu_minus + rep.mu_und
        assert total == 2.0 * np.pi  # exact complement, not approximate
        errs = [abs(r.value - np.cos(r.theta)) for r in rep.rays]
        assert max(errs) <= 5e-2

    def test_report_ray_floor(self):
        fld = harmonic_disc_field(h=0.06)
        with pytest.raises(ValueError):
            ft.fatou_report(fld, n_rays=8)

    def test_scherk_quad_report_symmetry(self):
        fld = scherk_quad_field(caps=(5.0, 10.0, 20.0))
        rep = ft.fatou_report(fld, n_rays=256)
        assert abs(rep.mu_plus - rep.mu_minus) <= 2.0 * (2.0 * np.pi / 256.0)

    def test_report_json_shape(self):
        fld = harmonic_disc_field(h=0.06)
        rep = ft.fatou_report(fld, n_rays=16)
        data = rep.to_json_dict()
        assert set(data) == {"n_rays", "mu_finite", "mu_plus", "mu_minus",
                             "mu_und", "rays"}
        assert len(data["rays"]) == 16
        assert all({"theta", "class"} <= set(r) for r in data["rays"])


class TestTVIntegral:
    def test_matches_quadrature_oracle(self):
        # psi = eta(u) with u the P1-exact harmonic extension of cos(theta)
        fld = harmonic_disc_field(h=0.02)
        psi = ft.compress(fld)
        R = D.model_radius
        c = ft.Compression("positive")

        def integrand(r, t):
            x, y = r * np.cos(t), r * np.sin(t)
            lam = 2.0 / (1.0 - r * r)
            gp = c.eta_prime(x / R) / R  # |grad psi| for u = x/R
            return gp * lam * r

        for rho in (0.5, 0.95):
            r_model = HYPERBOLIC.geodesic_to_model_radius(rho)
            oracle, _ = integrate.dblquad(integrand, 0.0, 2.0 * np.pi,
                                          0.0, r_model, epsabs=1e-10)
            tv = ft.tv_integral(psi, [rho])[0]
            assert abs(tv - oracle) <= 2e-3 * max(1.0, oracle)

    def test_nondecreasing_with_flattening_tail(self):
        fld = scherk_quad_field(caps=(5.0, 10.0, 20.0))
        psi = ft.compress(fld)
        radii = [0.5, 0.8, 0.9, 0.95, 0.99]
        tv = ft.tv_integral(psi, radii)
        assert all(tv[i] <= tv[i + 1] + 1e-12 for i in range(len(tv) - 1))
        last_inc = tv[-1] - tv[-2]
        assert last_inc <= 0.25 * tv[-1]

    def test_radius_beyond_support_rejected(self):
        fld = harmonic_disc_field(h=0.06)
        psi = ft.compress(fld)
        with pytest.raises(GeometryError):
            ft.tv_integral(psi, [1.5])


class TestHypotheses:
    def test_harmonic_verdicts(self):
        fld = harmonic_disc_field()
        rep = ft.check_hypotheses(fld)
        assert rep.verdict_a and rep.verdict_b and rep.verdict_c
        lo, hi = rep.G_bounds
        assert 0.0 < lo <= hi

    def test_heisenberg_identity_and_bounds(self):
        mesh = ms.triangulate(DE, 0.03)
        op = sv.operator("heisenberg_killing")
        bc = sv.BoundaryData.from_function(lambda p: p[:, 0] * p[:, 1])
        fld = sv.solve(mesh, op, bc)
        rep = ft.check_hypotheses(fld, op=op)
        assert rep.delta == pytest.approx(0.3)
        assert rep.identity_max_error <= 1e-9
        area = float(fld.mesh.areas.sum())
        assert rep.integral_abs_h <= 2.92 * area

    def test_heisenberg_case_split_bound(self):
        rng = np.random.default_rng(5)
        pts = rng.uniform(-1.0, 1.0, size=(200, 2))
        grads_small = rng.uniform(-0.7, 0.7, size=(200, 2))
        norm = np.hypot(grads_small[:, 0], grads_small[:, 1])
        keep = norm <= 1.25
        alpha = pts[:, 1] / 2.0 + grads_small[:, 0]
        beta = -pts[:, 0] / 2.0 + grads_small[:, 1]
        W = np.sqrt(1.0 + alpha**2 + beta**2)
        assert np.all(W[keep] >= norm[keep] - 1e-12)
        grads_big = grads_small * 40.0
        norm_b = np.hypot(grads_big[:, 0], grads_big[:, 1])
        alpha = pts[:, 1] / 2.0 + grads_big[:, 0]
        beta = -pts[:, 0] / 2.0 + grads_big[:, 1]
        W = np.sqrt(1.0 + alpha**2 + beta**2)
        assert np.all(W >= 0.3 * norm_b)

    def test_polygon_domain_unsupported(self):
        fld = scherk_quad_field(caps=(5.0,))
        with pytest.raises(UnsupportedDomainError):
            ft.check_hypotheses(fld)
