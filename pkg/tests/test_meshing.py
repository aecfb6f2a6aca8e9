"""Mesh generation: quality posts, boundary fidelity, marker coverage, symmetry."""

import numpy as np
import pytest
from scipy.spatial import cKDTree

from scherkdisc import domains as dm
from scherkdisc import meshing as ms
from scherkdisc.errors import MeshError
from scherkdisc.geometry import disc

D = disc("hyperbolic")


def boundary_distance_to_circle(mesh, radius):
    bn = mesh.boundary_nodes
    return np.abs(np.hypot(mesh.nodes[bn, 0], mesh.nodes[bn, 1]) - radius).max()


class TestDiscMesh:
    def test_posts(self):
        h = 0.05
        mesh = ms.triangulate(D, h)
        assert mesh.min_angle() >= 20.0
        assert mesh.max_edge_length() <= 2.0 * h
        assert boundary_distance_to_circle(mesh, D.model_radius) <= h * h / 8.0
        assert mesh.n_nodes <= ms.NODE_CAP
        assert mesh.meta["kind"] == "disc"

    def test_refinement_scaling(self):
        n1 = ms.triangulate(D, 0.05).n_nodes
        n2 = ms.triangulate(D, 0.025).n_nodes
        assert 3.0 <= n2 / n1 <= 5.0

    def test_orientation_and_areas(self):
        mesh = ms.triangulate(D, 0.05)
        assert np.all(mesh.areas > 0.0)
        # total area equals the model disc area to O(h^2)
        assert abs(mesh.areas.sum() - np.pi * D.model_radius**2) < 5e-3

    def test_invalid_h(self):
        with pytest.raises((MeshError, ValueError)):
            ms.triangulate(D, 0.0)


class TestRectangleMesh:
    def test_markers_four_sides(self):
        mesh = ms.triangulate((-0.5, -0.4, 0.5, 0.4), 0.05)
        assert set(int(m) for m in mesh.boundary_markers) == {0, 1, 2, 3}
        assert mesh.min_angle() >= 20.0


class TestScherkQuadMesh:
    def test_symmetric_mesh(self):
        quad = dm.inscribed_quadrilateral(D, 0.0)
        mesh = ms.triangulate(quad, 0.05)
        assert mesh.min_angle() >= 20.0
        assert set(int(m) for m in mesh.boundary_markers) == {0, 1, 2, 3}
        # exact symmetry under the label-swap reflection (swap x/y)
        swapped = mesh.nodes[:, ::-1]
        d, _ = cKDTree(mesh.nodes).query(swapped)
        assert d.max() < 1e-12

    def test_boundary_on_geodesics(self):
        quad = dm.inscribed_quadrilateral(D, 0.0)
        mesh = ms.triangulate(quad, 0.05)
        # every boundary node lies within h^2 of some side polyline
        pts = np.vstack([s.polyline(512) for s in quad.sides])
        bn = mesh.boundary_nodes
        d, _ = cKDTree(pts).query(mesh.nodes[bn])
        assert d.max() < 0.05**2


class TestPolygonMesh:
    def test_example_step2_mirror_symmetry(self):
        seq = dm.iterate_example(D, 2)
        poly = seq.steps[1].polygon
        axis, side_map = dm.label_swap_axis_and_map(poly)
        mesh = ms.triangulate(poly, 0.03)
        assert mesh.min_angle() >= 20.0
        assert set(int(m) for m in mesh.boundary_markers) == set(range(poly.n_sides))
        S = np.array([[np.cos(2 * axis), np.sin(2 * axis)],
                      [np.sin(2 * axis), -np.cos(2 * axis)]])
        d, idx = cKDTree(mesh.nodes).query(mesh.nodes @ S.T)
        assert d.max() < 1e-12
        # markers are reflection-odd: each boundary edge has a mirror edge
        # carrying the reflected side id
        edge_marker = {}
        for (i, j), m in zip(mesh.boundary_edges, mesh.boundary_markers):
            edge_marker[frozenset((i, j))] = int(m)
        for (i, j), m in zip(mesh.boundary_edges, mesh.boundary_markers):
            key = frozenset((int(idx[i]), int(idx[j])))
            assert edge_marker[key] == side_map[int(m)]

    def test_vertex_grading(self):
        seq = dm.iterate_example(D, 2)
        poly = seq.steps[1].polygon
        mesh = ms.triangulate(poly, 0.03)
        verts = np.array(poly.vertices)
        tree = cKDTree(mesh.nodes)
        # near-vertex resolution is much finer than h
        d, _ = tree.query(verts)
        assert d.max() < 0.03 / 8.0

    def test_core_mesh(self):
        quad = dm.inscribed_quadrilateral(D, 0.0)
        core = dm.compact_core(quad, 0.9)
        mesh = ms.triangulate(core, 0.03)
        assert mesh.min_angle() >= 20.0
        assert mesh.n_nodes > 100


class TestMeshDataStructure:
    def test_boundary_edges_form_closed_loops(self):
        mesh = ms.triangulate(D, 0.06)
        degree = {}
        for i, j in mesh.boundary_edges:
            degree[i] = degree.get(i, 0) + 1
            degree[j] = degree.get(j, 0) + 1
        assert all(v == 2 for v in degree.values())

    def test_basis_gradient_partition_of_unity(self):
        mesh = ms.triangulate(D, 0.06)
        g = mesh.basis_gradients
        assert np.abs(g.sum(axis=1)).max() < 1e-10
