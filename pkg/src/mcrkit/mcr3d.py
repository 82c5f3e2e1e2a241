"""Maximum cover under rotation of a polyhedron about a fixed centre.

Rotations are ``R(theta, phi) = Rz(theta) Ry(pi/2 - phi)``, the family that
takes the z-axis to the direction with azimuth ``theta`` and altitude ``phi``.
With ``phi`` fixed every orbit is a horizontal circle, so a slice is an exact
circular sweep.  The solver scans ``phi`` over the values where those circles
become tangent to a facet plane or meet a mesh edge, a uniform grid, and the
midpoints between all of them.

The orbit-sphere pieces (facet arcs, inclusion regions, normalisation
rotations, stereographic projection) are available on their own.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .config import Tolerances, resolve
from .errors import PointAtCenter, PoleProjection
from .fixed import AngularIntervalSet, _interval_set, _map
from .geometry import (
    TWO_PI,
    Arc3,
    Circle3,
    Plane3,
    TriMeshPolyhedron,
    points_in_polyhedron,
    sphere_plane_intersection,
    unit_frame,
)

EPS_UNIT = 1e-12
HALF_PI = 0.5 * math.pi


# --------------------------------------------------------------------------
# rotations


@dataclass(frozen=True)
class Rotation3:
    matrix: np.ndarray
    theta: float | None = None
    phi: float | None = None

    def apply(self, pts, center=(0.0, 0.0, 0.0)) -> np.ndarray:
        c = np.asarray(center, dtype=float)
        return (np.asarray(pts, dtype=float) - c) @ self.matrix.T + c

    def is_orthonormal(self, tol: float = 1e-12) -> bool:
        Rm = self.matrix
        return bool(np.abs(Rm.T @ Rm - np.eye(3)).max() <= tol and abs(np.linalg.det(Rm) - 1.0) <= tol)


def _rz(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _ry(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def direction(theta: float, phi: float) -> np.ndarray:
    return np.array([math.cos(phi) * math.cos(theta), math.cos(phi) * math.sin(theta), math.sin(phi)])


def rotation_from_direction(theta: float, phi: float) -> Rotation3:
    """``Rz(theta) Ry(pi/2 - phi)``; at the poles every theta names the same direction."""
    return Rotation3(_rz(theta) @ _ry(HALF_PI - phi), float(theta), float(phi))


def _rodrigues(axis, angle):
    k = np.asarray(axis, dtype=float)
    k = k / np.linalg.norm(k)
    Kx = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    return np.eye(3) + math.sin(angle) * Kx + (1.0 - math.cos(angle)) * (Kx @ Kx)


def normalization_rotation(p, r, N) -> Rotation3:
    """Smallest rotation taking the direction of ``p - r`` onto the unit vector ``N``."""
    d = np.asarray(p, dtype=float) - np.asarray(r, dtype=float)
    nd = float(np.linalg.norm(d))
    if nd == 0.0:
        raise PointAtCenter("point coincides with the rotation centre")
    d /= nd
    N = np.asarray(N, dtype=float)
    N = N / np.linalg.norm(N)
    axis = np.cross(d, N)
    s = float(np.linalg.norm(axis))
    c = float(np.clip(d @ N, -1.0, 1.0))
    if s <= EPS_UNIT:
        if c > 0:
            return Rotation3(np.eye(3))
        # antipodal: half turn about the first coordinate axis not parallel to N
        for k in range(3):
            e = np.zeros(3)
            e[k] = 1.0
            perp = e - (e @ N) * N
            if np.linalg.norm(perp) > 1e-6:
                return Rotation3(_rodrigues(perp, math.pi))
    return Rotation3(_rodrigues(axis, math.atan2(s, c)))


def stereographic_project(q, N) -> np.ndarray:
    """Project the unit vector ``q`` from ``N`` onto the plane tangent at ``-N`` (2D frame of that plane)."""
    q = np.asarray(q, dtype=float)
    N = np.asarray(N, dtype=float)
    den = 1.0 - float(q @ N)
    if den <= 1e-20:
        raise PoleProjection("cannot project the pole itself")
    X = N + (2.0 / den) * (q - N)
    e1, e2 = unit_frame(N)
    return np.array([X @ e1, X @ e2])


def stereographic_unproject(z, N) -> np.ndarray:
    N = np.asarray(N, dtype=float)
    e1, e2 = unit_frame(N)
    X = z[0] * e1 + z[1] * e2 - N
    d = X - N
    # second intersection of the line N + t d with the unit sphere
    t = -2.0 * float(N @ d) / float(d @ d)
    return N + t * d


# --------------------------------------------------------------------------
# orbit-sphere regions


def _in_triangle(tri, q, eps):
    return K._tri_dist2_np(tri, q, eps) <= eps * eps


def sphere_facet_arcs(M: TriMeshPolyhedron, f: int, center, radius: float,
                      tol: Tolerances | None = None) -> list[Arc3]:
    """Arcs of the circle (sphere meets facet plane) that lie on the facet triangle."""
    tol = resolve(tol, M.vertices, [center])
    eps = tol.length
    pl = M.plane(f)
    C = sphere_plane_intersection(center, radius, pl, tol)
    if not isinstance(C, Circle3) or C.radius <= eps:
        return []
    tri = M.triangles[f]
    e1, e2 = C.frame
    c0 = np.asarray(C.center)
    cuts = []
    for k in range(3):
        a, b = tri[k] - c0, tri[(k + 1) % 3] - c0
        a2, d2 = np.array([a @ e1, a @ e2]), np.array([(b - a) @ e1, (b - a) @ e2])
        A = d2 @ d2
        Bh = a2 @ d2
        disc = Bh * Bh - A * (a2 @ a2 - C.radius ** 2)
        if A <= 0 or disc < 0:
            continue
        sq = math.sqrt(disc)
        for t in ((-Bh - sq) / A, (-Bh + sq) / A):
            if -1e-12 <= t <= 1 + 1e-12:
                z = a2 + t * d2
                cuts.append(math.atan2(z[1], z[0]) % TWO_PI)
    cuts = sorted(cuts)
    merged = []
    for c in cuts:
        if not merged or c - merged[-1] > tol.eps_ang:
            merged.append(c)
    if len(merged) >= 2 and TWO_PI - merged[-1] + merged[0] <= tol.eps_ang:
        merged.pop()
    if len(merged) < 2:
        probe = C.point_at(merged[0] + math.pi if merged else 0.0)
        return [Arc3(C, merged[0] if merged else 0.0, TWO_PI)] if _in_triangle(tri, probe, eps) else []
    arcs = []
    for k, s in enumerate(merged):
        e = merged[k + 1] if k + 1 < len(merged) else merged[0] + TWO_PI
        if _in_triangle(tri, C.point_at(0.5 * (s + e)), eps):
            if arcs and abs(arcs[-1][1] - s) <= tol.eps_ang:
                arcs[-1][1] = e
            else:
                arcs.append([s, e])
    if len(arcs) >= 2 and abs(arcs[-1][1] - TWO_PI - arcs[0][0]) <= tol.eps_ang:
        arcs[0][0] = arcs[-1][0]
        arcs[0][1] += TWO_PI
        arcs.pop()
    return [Arc3(C, s % TWO_PI, min(e - s, TWO_PI)) for s, e in arcs]


@dataclass
class SphericalRegion:
    """Directions on the orbit sphere of one point that keep it inside the mesh."""

    point_index: int
    center: np.ndarray
    radius: float
    arcs: list = field(default_factory=list)
    seeds: np.ndarray = field(default_factory=lambda: np.empty((0, 3)))
    mesh: TriMeshPolyhedron | None = field(default=None, repr=False)
    eps_len: float = 1e-9
    constant: bool | None = None

    def contains(self, dirs) -> np.ndarray:
        d = np.asarray(dirs, dtype=float).reshape(-1, 3)
        if self.constant is not None:
            return np.full(len(d), self.constant)
        return points_in_polyhedron(self.mesh, self.center + self.radius * d, self.eps_len)


def inclusion_region(M: TriMeshPolyhedron, r, p, tol: Tolerances | None = None,
                     point_index: int = 0, strict: bool = False) -> SphericalRegion:
    r = np.asarray(r, dtype=float)
    p = np.asarray(p, dtype=float)
    tol = resolve(tol, M.vertices, [r], [p])
    rad = float(np.linalg.norm(p - r))
    if rad <= tol.length:
        if strict:
            raise PointAtCenter("point coincides with the rotation centre")
        inside = bool(points_in_polyhedron(M, r[None], tol.length)[0])
        return SphericalRegion(point_index, r, 0.0, mesh=M, eps_len=tol.length, constant=inside)
    arcs = []
    for f in range(len(M.facets)):
        arcs.extend(sphere_facet_arcs(M, f, r, rad, tol))
    seeds = np.array([a.sample(3)[1] for a in arcs]) if arcs else np.empty((0, 3))
    reg = SphericalRegion(point_index, r, rad, arcs, seeds, M, tol.length)
    if not arcs:
        reg.constant = bool(points_in_polyhedron(M, p[None], tol.length)[0])
    return reg


def depth_at_rotation(M: TriMeshPolyhedron, r, S, R: Rotation3, tol: Tolerances | None = None) -> int:
    S = np.asarray(S, dtype=float).reshape(-1, 3)
    tol = resolve(tol, M.vertices, S, [r])
    return int(points_in_polyhedron(M, R.apply(S, r), tol.length).sum())


def _u_of(V, phi):
    s, c = math.sin(phi), math.cos(phi)
    return np.stack([s * V[:, 0] + c * V[:, 2], V[:, 1], -c * V[:, 0] + s * V[:, 2]], axis=1)


def latitude_theta_intervals(M: TriMeshPolyhedron, r, S, phi: float,
                             tol: Tolerances | None = None) -> list[AngularIntervalSet]:
    """Per point, the closed theta set with ``Rz(theta) Ry(pi/2 - phi)`` keeping it inside ``M``."""
    r = np.asarray(r, dtype=float)
    S = np.asarray(S, dtype=float).reshape(-1, 3)
    tol = resolve(tol, M.vertices, S, [r])
    tris = M.triangles
    normals, offsets = M.planes
    U = _u_of(S - r, phi)
    out = []
    for j, u in enumerate(U):
        if math.hypot(u[0], u[1]) <= tol.length:
            ca, arc = [], points_in_polyhedron(M, (r + u)[None], tol.length)
        else:
            ca, arc = K.slice_arcs_np(tris, normals, offsets, r, u, tol.length, tol.eps_ang, K.RAY_DIRS)
        if not ca:
            out.append(AngularIntervalSet.full(j) if arc[0] else AngularIntervalSet(j))
            continue
        out.append(_interval_set(j, ca, [bool(a) for a in arc], list(range(len(ca))), [-1] * len(ca)))
    return out


# --------------------------------------------------------------------------
# global solver


@dataclass(frozen=True)
class Solution3D:
    theta_star: float
    phi_star: float
    count: int
    n_slices: int = 0

    @property
    def rotation(self) -> Rotation3:
        return rotation_from_direction(self.theta_star, self.phi_star)


def _phis_for_height(v, h):
    """phi in [-pi/2, pi/2] with the z-component of Ry(pi/2 - phi) v equal to h."""
    Rxz = math.hypot(v[0], v[2])
    if Rxz <= 1e-300 or abs(h) > Rxz * (1 + 1e-12):
        return []
    beta = math.atan2(v[0], v[2])
    a = math.asin(max(-1.0, min(1.0, h / Rxz)))
    out = []
    for phi in (beta + a, beta + math.pi - a):
        phi = (phi + math.pi) % TWO_PI - math.pi
        if -HALF_PI - 1e-12 <= phi <= HALF_PI + 1e-12:
            out.append(max(-HALF_PI, min(HALF_PI, phi)))
    return out


def _mesh_edges(M: TriMeshPolyhedron):
    e = set()
    for f in M.facets:
        for k in range(3):
            a, b = int(f[k]), int(f[(k + 1) % 3])
            e.add((min(a, b), max(a, b)))
    return sorted(e)


def critical_phis(M: TriMeshPolyhedron, r, S) -> list[float]:
    """phi values where a latitude orbit touches a facet plane or meets a mesh edge."""
    r = np.asarray(r, dtype=float)
    normals, offsets = M.planes
    verts = np.asarray(M.vertices, dtype=float)
    edges = _mesh_edges(M)
    out = [-HALF_PI, HALF_PI]
    for v in np.asarray(S, dtype=float).reshape(-1, 3) - r:
        rad2 = float(v @ v)
        heights = []
        cp = offsets - normals @ r
        m = np.hypot(normals[:, 0], normals[:, 1])
        for f in np.flatnonzero(cp * cp <= rad2):
            sq = math.sqrt(max(rad2 - cp[f] ** 2, 0.0))
            nz = normals[f, 2]
            heights.extend((nz * cp[f] + m[f] * sq, nz * cp[f] - m[f] * sq))
        for a, b in edges:
            A, d = verts[a] - r, verts[b] - verts[a]
            qa, qb, qc = d @ d, 2 * A @ d, A @ A - rad2
            disc = qb * qb - 4 * qa * qc
            if disc < 0:
                continue
            sq = math.sqrt(disc)
            for t in ((-qb - sq) / (2 * qa), (-qb + sq) / (2 * qa)):
                if 0.0 <= t <= 1.0:
                    heights.append(A[2] + t * d[2])
        for h in heights:
            out.extend(_phis_for_height(v, h))
    out.sort()
    ded = [out[0]]
    for x in out[1:]:
        if x - ded[-1] > 1e-9:
            ded.append(x)
    return ded


def solve_3d_fixed_mcr(M: TriMeshPolyhedron, r, S, tol: Tolerances | None = None,
                       grid: int = 4096, parallel: bool = False) -> Solution3D:
    r = np.asarray(r, dtype=float)
    S = np.asarray(S, dtype=float).reshape(-1, 3)
    tol = resolve(tol, M.vertices, S, [r])
    tris = np.ascontiguousarray(M.triangles)
    normals, offsets = M.planes
    normals, offsets = np.ascontiguousarray(normals), np.ascontiguousarray(offsets)
    V = np.ascontiguousarray(S - r)

    def slice_at(phi):
        c, th, _ = K.slice3d(tris, normals, offsets, V, r, float(phi), tol.length, tol.eps_ang, K.RAY_DIRS)
        return int(c), float(th)

    crit = critical_phis(M, r, S)
    if grid:
        crit = sorted(set(crit) | set(np.linspace(-HALF_PI, HALF_PI, grid + 1).tolist()))
    probes = [crit[0]]
    for p0, p1 in zip(crit, crit[1:]):
        probes.extend((0.5 * (p0 + p1), p1))
    vals = _map(slice_at, probes, parallel)

    def argbest(ps, vs):
        k = 0
        for i in range(1, len(ps)):
            if vs[i][0] > vs[k][0]:
                k = i
        return k

    k = argbest(probes, vals)
    # one refinement round around the best slab and its neighbours
    lo, hi = max(k - 2, 0), min(k + 2, len(probes) - 1)
    extra = [0.5 * (probes[i] + probes[i + 1]) for i in range(lo, hi)]
    probes2 = probes + extra
    vals2 = vals + _map(slice_at, extra, parallel)
    order = sorted(range(len(probes2)), key=lambda i: probes2[i])
    probes2 = [probes2[i] for i in order]
    vals2 = [vals2[i] for i in order]
    k = argbest(probes2, vals2)
    return Solution3D(vals2[k][1], probes2[k], vals2[k][0], len(probes2))
