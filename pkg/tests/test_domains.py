"""Admissible polygon construction: balance, Jenkins-Serrin checks, iteration."""

import itertools

import numpy as np
import pytest

from scherkdisc import domains as dm
from scherkdisc.errors import DegenerateCoreError, GeometryError, MalformedPolygonError
from scherkdisc.geometry import GeodesicArc, disc

D = disc("hyperbolic")
L = D.boundary_length


class TestInscribedQuadrilateral:
    def test_symmetric_basepoint(self):
        quad = dm.inscribed_quadrilateral(D, 0.0)
        assert abs(quad.vertex_params[0] - L / 8.0) < 1e-9
        expect = [L / 8, 3 * L / 8, 5 * L / 8, 7 * L / 8]
        assert np.allclose(quad.vertex_params, expect, atol=1e-9)
        assert abs(quad.condition1_residual()) <= 1e-10

    def test_balance_residual_generic_basepoint(self):
        quad = dm.inscribed_quadrilateral(D, 0.37 * L)
        assert abs(quad.condition1_residual()) <= 1e-10
        assert quad.labels in (["A", "B", "A", "B"], ["B", "A", "B", "A"])

    def test_rotational_equivariance(self):
        rng = np.random.default_rng(7)
        base = dm.inscribed_quadrilateral(D, 0.0)
        for x0 in rng.uniform(0.0, L, 8):
            quad = dm.inscribed_quadrilateral(D, x0)
            rel = (np.asarray(quad.vertex_params) - x0) % L
            rel.sort()
            base_rel = np.sort(np.asarray(base.vertex_params) % L)
            assert np.allclose(rel, base_rel, atol=1e-9)

    def test_euclidean_square(self):
        de = disc("euclidean")
        quad = dm.inscribed_quadrilateral(de, 0.0)
        lengths = quad.side_lengths()
        assert np.allclose(lengths, np.sqrt(2.0), atol=1e-9)


class TestRegularTrapezoid:
    def test_balance_identity(self):
        quad = dm.inscribed_quadrilateral(D, 0.0)
        s0, s1 = quad.vertex_params[1], quad.vertex_params[2]
        trap = dm.regular_trapezoid(D, s0, s1)
        # defining property: l1 + l3 = l2 + l4
        assert trap.balance_residual < 1e-9
        l1, l2, l3, l4 = trap.lengths
        assert abs((l1 + l3) - (l2 + l4)) < 1e-9

    def test_trapezoid_inside_subtended_arc(self):
        quad = dm.inscribed_quadrilateral(D, 0.0)
        s0, s1 = quad.vertex_params[1], quad.vertex_params[2]
        trap = dm.regular_trapezoid(D, s0, s1)
        span = (s1 - s0) % L
        assert 0.0 < (trap.p_plus_s - s0) % L < span
        assert 0.0 < (s1 - trap.p_minus_s) % L < span


def brute_force_admissible(poly, cap=16):
    """Independent Jenkins-Serrin check by direct subset enumeration."""
    n = poly.n_sides
    lengths = poly.side_lengths()

    def chord_len(i, j):
        return GeodesicArc(poly.disc.model, poly.vertices[i], poly.vertices[j]).length

    worst_a = worst_b = np.inf
    for k in range(3, min(n, cap) + 1):
        for combo in itertools.combinations(range(n), k):
            perim = 0.0
            a_len = b_len = 0.0
            full = set(combo)
            for t in range(k):
                i, j = combo[t], combo[(t + 1) % k]
                if (i + 1) % n == j:
                    perim += lengths[i]
                    if poly.labels[i] == "A":
                        a_len += lengths[i]
                    else:
                        b_len += lengths[i]
                else:
                    perim += chord_len(i, j)
            if full == set(range(n)):
                continue  # the polygon itself
            worst_a = min(worst_a, perim - 2.0 * a_len)
            worst_b = min(worst_b, perim - 2.0 * b_len)
    return worst_a, worst_b


class TestAdmissibility:
    def test_quadrilateral_passes(self):
        quad = dm.inscribed_quadrilateral(D, 0.0)
        rep = dm.check_admissible(quad)
        assert rep.passes
        assert rep.slack_a > 0.0 and rep.slack_b > 0.0

    def test_brute_force_oracle_matches(self):
        quad = dm.inscribed_quadrilateral(D, 0.11 * L)
        rep = dm.check_admissible(quad)
        wa, wb = brute_force_admissible(quad)
        assert rep.slack_a == pytest.approx(wa, abs=1e-9)
        assert rep.slack_b == pytest.approx(wb, abs=1e-9)

    def test_unperturbed_attachment_fails_at_trapezoid_polygon(self):
        quad = dm.inscribed_quadrilateral(D, 0.0)
        d2, a_new, b_new = dm.build_attached(quad, 1, 2, 0.0, 0.0)
        rep = dm.check_admissible(d2)
        assert not rep.passes
        # slack vanishes exactly (to tolerance) at the blocking polygon
        assert min(rep.slack_a, rep.slack_b) <= dm.SLACK_TOL
        wa, wb = brute_force_admissible(d2)
        assert min(wa, wb) <= 1e-8

    def test_perturbation_restores_admissibility(self):
        quad = dm.inscribed_quadrilateral(D, 0.0)
        d2, tau = dm.attach_and_perturb(quad, 1, 2, dm.default_tau_grid(0.05))
        assert tau > 0.0
        rep = dm.check_admissible(d2)
        assert rep.passes
        assert abs(d2.condition1_residual()) <= 1e-10

    def test_slack_grows_with_tau(self):
        quad = dm.inscribed_quadrilateral(D, 0.0)
        slacks = []
        for tau in (0.05, 0.15, 0.3):
            d2, _ = dm.attach_and_perturb(quad, 1, 2, [tau])
            rep = dm.check_admissible(d2)
            slacks.append(min(rep.slack_a, rep.slack_b))
        assert slacks[0] < slacks[1] < slacks[2]


class TestScherkPolygonType:
    def test_json_roundtrip(self):
        quad = dm.inscribed_quadrilateral(D, 0.2 * L)
        data = quad.to_json_dict()
        back = dm.ScherkPolygon.from_json_dict(data)
        assert np.allclose(back.vertex_params, quad.vertex_params, atol=0.0)
        assert back.labels == quad.labels

    def test_odd_side_count_rejected(self):
        with pytest.raises(MalformedPolygonError):
            dm.ScherkPolygon(D, [0.0, L / 3, 2 * L / 3], ["A", "B", "A"]).validate()

    def test_nonalternating_labels_rejected(self):
        params = [L / 8, 3 * L / 8, 5 * L / 8, 7 * L / 8]
        with pytest.raises(MalformedPolygonError):
            dm.ScherkPolygon(D, params, ["A", "A", "B", "B"]).validate()

    def test_uncovered_boundary_positive(self):
        quad = dm.inscribed_quadrilateral(D, 0.0)
        assert dm.uncovered_boundary_length(quad) > 0.0

    def test_label_swap_axis_of_quadrilateral(self):
        quad = dm.inscribed_quadrilateral(D, 0.0)
        found = dm.label_swap_axis_and_map(quad)
        assert found is not None
        angle, side_map = found
        assert sorted(side_map) == [0, 1, 2, 3]
        assert all(side_map[side_map[k]] == k for k in side_map)


class TestCompactCore:
    def test_core_inside_and_contains_center(self):
        quad = dm.inscribed_quadrilateral(D, 0.0)
        core = dm.compact_core(quad, 0.9)
        assert core.contains(np.zeros(2))
        ring = core.boundary_polyline()
        # strictly inside the open polygon: away from the rim
        assert np.all(np.hypot(ring[:, 0], ring[:, 1]) < D.model_radius)

    def test_invalid_radius(self):
        quad = dm.inscribed_quadrilateral(D, 0.0)
        with pytest.raises((DegenerateCoreError, GeometryError, ValueError)):
            dm.compact_core(quad, 0.2)

    def test_cores_nest_along_schedule(self):
        sched = dm.ExampleSchedule()
        assert sched.r_core(1) < sched.r_core(2) < sched.r_core(3) < 1.0


class TestIterateExample:
    def test_three_step_structure(self):
        seq = dm.iterate_example(D, 3)
        sides = [s.polygon.n_sides for s in seq.steps]
        assert sides == [4, 8, 12]
        for step in seq.steps:
            rep = dm.check_admissible(step.polygon)
            assert rep.passes
            assert abs(step.polygon.condition1_residual()) <= 1e-10

    def test_manifests_shape(self):
        seq = dm.iterate_example(D, 2)
        manifests = seq.manifests()
        assert [m["step"] for m in manifests] == [1, 2]
        assert manifests[1]["tau"] > 0.0
        assert manifests[0]["uncovered_boundary"] > manifests[1]["uncovered_boundary"]

    def test_bad_step_count(self):
        with pytest.raises(ValueError):
            dm.iterate_example(D, 0)
