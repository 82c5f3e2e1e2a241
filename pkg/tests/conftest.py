import math
import os
import sys

import numpy as np
import pytest

from mcrkit.generate import box_mesh, hull_mesh, star_polygon
from mcrkit.geometry import SimplePolygon, TriMeshPolyhedron

sys.path.insert(0, os.path.dirname(__file__))


def random_star(rng, m, shift=None):
    ring = star_polygon(rng, int(m))
    if shift is not None:
        ring = ring + shift
    return SimplePolygon.from_rings(ring)


def random_fixed_instance(rng, m_max=20, n_max=20):
    P = random_star(rng, rng.integers(3, m_max + 1))
    S = rng.uniform(-2.2, 2.2, (int(rng.integers(0, n_max + 1)), 2))
    r = rng.uniform(-0.4, 0.4, 2)
    return P, r, S


def random_segment_instance(rng, m_max=10, n_max=10):
    P = random_star(rng, rng.integers(3, m_max + 1))
    S = rng.uniform(-1.5, 1.5, (int(rng.integers(1, n_max + 1)), 2))
    a, b = rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 2)
    return P, S, a, b


def random_mesh_instance(rng, n_max=10):
    if rng.random() < 0.5:
        c = rng.uniform(-0.3, 0.3, 3)
        h = rng.uniform(0.5, 1.5, 3)
        V, F = box_mesh(c - h, c + h, int(rng.integers(0, 2)))
    else:
        V, F = hull_mesh(rng.normal(size=(int(rng.integers(4, 9)), 3)))
    M = TriMeshPolyhedron.from_arrays(V, F)
    S = rng.uniform(-1.2, 1.2, (int(rng.integers(1, n_max + 1)), 3))
    r = rng.uniform(-0.3, 0.3, 3)
    return M, r, S


def unit_square():
    return SimplePolygon.from_rings([[0, 0], [1, 0], [1, 1], [0, 1]])


def unit_cube():
    V, F = box_mesh([0, 0, 0], [1, 1, 1])
    return TriMeshPolyhedron.from_arrays(V, F)


def ang_dist(a, b):
    return abs((a - b + math.pi) % (2 * math.pi) - math.pi)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def fit_circle_residual(pts):
    """Max distance of 2D points from their algebraic least-squares circle."""
    pts = np.asarray(pts, dtype=float)
    A = np.c_[pts, np.ones(len(pts))]
    rhs = -(pts ** 2).sum(1)
    (D, E, F), *_ = np.linalg.lstsq(A, rhs, rcond=None)
    c = -0.5 * np.array([D, E])
    rho = math.sqrt(c @ c - F)
    return float(np.abs(np.linalg.norm(pts - c, axis=1) - rho).max())


def random_sphere_circle(rng, N, k=12):
    """``k`` points on a random small circle of the unit sphere that stays clear of the pole ``N``."""
    while True:
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        rad = rng.uniform(0.05, 1.4)
        if math.acos(np.clip(axis @ N, -1, 1)) > rad + 0.3:
            break
    e1 = np.cross(axis, [1.0, 0, 0] if abs(axis[0]) < 0.9 else [0, 1.0, 0])
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(axis, e1)
    t = rng.uniform(0, 2 * math.pi, k)
    return math.cos(rad) * axis + math.sin(rad) * (np.cos(t)[:, None] * e1 + np.sin(t)[:, None] * e2)
