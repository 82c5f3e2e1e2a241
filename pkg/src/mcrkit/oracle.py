"""Brute-force verifiers.

They rebuild everything from containment predicates and plain circle/line
algebra and share no solver code: the fixed-centre oracle enumerates every
contact angle per (point, edge) and evaluates the objective at each one and
at every gap midpoint; the segment oracle runs it on a grid of centres; the
3D oracle samples rotation directions on a Fibonacci sphere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .config import Tolerances, resolve
from .geometry import SimplePolygon, TriMeshPolyhedron, points_in_polygon, points_in_polyhedron


@dataclass(frozen=True)
class OracleReport:
    best_count: int
    witness: dict = field(default_factory=dict)
    n_candidates: int = 0
    method: str = ""


def _rotate2(S, r, theta):
    c, s = math.cos(theta), math.sin(theta)
    d = np.asarray(S, dtype=float).reshape(-1, 2) - np.asarray(r, dtype=float)
    return np.stack([c * d[:, 0] - s * d[:, 1], s * d[:, 0] + c * d[:, 1]], axis=1) + np.asarray(r, dtype=float)


def count_at_rotation(P: SimplePolygon, r, S, theta: float, tol: Tolerances | None = None) -> int:
    """Number of points inside or on ``P`` after rotating ``S`` counterclockwise by ``theta`` about ``r``."""
    S = np.asarray(S, dtype=float).reshape(-1, 2)
    tol = resolve(tol, P.vertices, S, [r])
    return int(points_in_polygon(P, _rotate2(S, r, theta), tol.length).sum())


def oracle_fixed(P: SimplePolygon, r, S, tol: Tolerances | None = None) -> OracleReport:
    S = np.ascontiguousarray(S, dtype=float).reshape(-1, 2)
    tol = resolve(tol, P.vertices, S, [r])
    best, ang, n = K.oracle_fixed_kernel(np.ascontiguousarray(P.edges), S, np.asarray(r, dtype=float), tol.length)
    return OracleReport(int(best), {"center": (float(r[0]), float(r[1])), "theta": float(ang)}, int(n),
                        "fixed-event-enumeration")


def segment_grid(a, b, G: int) -> np.ndarray:
    """Centres ``a + (b - a) i / G`` for ``i = 0..G`` (just ``a`` when G = 1)."""
    if G < 1:
        raise ValueError("grid size must be at least 1")
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if G == 1:
        return a[None]
    return a + np.outer(np.arange(G + 1) / G, b - a)


def oracle_segment(P: SimplePolygon, S, a, b, G: int, tol: Tolerances | None = None) -> OracleReport:
    S = np.ascontiguousarray(S, dtype=float).reshape(-1, 2)
    tol = resolve(tol, P.vertices, S, [a, b])
    edges = np.ascontiguousarray(P.edges)
    best, wit, total = -1, {}, 0
    for c in segment_grid(a, b, G):
        cnt, ang, n = K.oracle_fixed_kernel(edges, S, np.ascontiguousarray(c), tol.length)
        total += int(n)
        if cnt > best:
            best, wit = int(cnt), {"center": (float(c[0]), float(c[1])), "theta": float(ang)}
    return OracleReport(best, wit, total, f"segment-grid-{G}")


def fibonacci_directions(k: int) -> np.ndarray:
    i = np.arange(k) + 0.5
    z = 1.0 - 2.0 * i / k
    rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    lon = math.pi * (1.0 + math.sqrt(5.0)) * i
    return np.stack([rho * np.cos(lon), rho * np.sin(lon), z], axis=1)


def _rotations(dirs):
    """Batch of matrices taking z to each direction: azimuth about z after tilting in the xz-plane."""
    th = np.arctan2(dirs[:, 1], dirs[:, 0])
    ph = np.arcsin(np.clip(dirs[:, 2], -1.0, 1.0))
    ct, st = np.cos(th), np.sin(th)
    sp, cp = np.sin(ph), np.cos(ph)
    Rm = np.empty((len(dirs), 3, 3))
    # Rz(th) @ Ry(pi/2 - ph) with cos(pi/2 - ph) = sin ph, sin(pi/2 - ph) = cos ph
    Rm[:, 0] = np.stack([ct * sp, -st, ct * cp], 1)
    Rm[:, 1] = np.stack([st * sp, ct, st * cp], 1)
    Rm[:, 2] = np.stack([-cp, np.zeros_like(ph), sp], 1)
    return Rm, th, ph


def oracle_3d(M: TriMeshPolyhedron, r, S, samples: int, tol: Tolerances | None = None,
              chunk: int = 4096, directions=None) -> OracleReport:
    """Best depth over ``samples`` Fibonacci directions, or over ``directions`` when given.

    Fibonacci lattices of different sizes are not nested; pass explicit
    prefix-nested ``directions`` when a monotone refinement is needed.
    """
    if directions is not None:
        dirs = np.asarray(directions, dtype=float).reshape(-1, 3)
        dirs = dirs / np.linalg.norm(dirs, axis=1)[:, None]
        samples = len(dirs)
    if samples < 1:
        raise ValueError("samples must be at least 1")
    r = np.asarray(r, dtype=float)
    S = np.asarray(S, dtype=float).reshape(-1, 3)
    tol = resolve(tol, M.vertices, S, [r])
    tris = M.triangles
    V = S - r
    if directions is None:
        dirs = fibonacci_directions(samples)
    best, wit = -1, {}
    for s0 in range(0, samples, chunk):
        Rm, th, ph = _rotations(dirs[s0:s0 + chunk])
        W = np.einsum("kij,nj->kni", Rm, V) + r
        cnt = points_in_polyhedron(M, W.reshape(-1, 3), tol.length, tris).reshape(len(Rm), -1).sum(1)
        k = int(np.argmax(cnt))
        if cnt[k] > best:
            best = int(cnt[k])
            wit = {"theta": float(th[k] % (2 * math.pi)), "phi": float(ph[k])}
    return OracleReport(best, wit, samples, f"fibonacci-{samples}" if directions is None else f"directions-{samples}")
