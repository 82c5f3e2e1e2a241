"""Seeded instance generators.

Every generator takes a parameter dict and a seed and returns an instance
document (plain JSON-ready dict).  The same (kind, params, seed) always
produces the same document.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import InvalidParams
from .reduction import scp_brute_force

KINDS = ("comb", "star", "random-points", "scp", "box3d", "tetra3d")


def _rng(seed):
    return np.random.default_rng(int(seed) if seed is not None else 0)


def _int(params, key, default, lo=1, hi=None):
    v = params.get(key, default)
    if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < lo or (hi is not None and v > hi):
        raise InvalidParams(f"{key} must be an integer in [{lo}, {hi if hi is not None else 'inf'}], got {v!r}")
    return int(v)


def _float(params, key, default, positive=True):
    v = params.get(key, default)
    if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v) or (positive and v <= 0):
        raise InvalidParams(f"{key} must be a finite {'positive ' if positive else ''}number, got {v!r}")
    return float(v)


def _prov(kind, params, seed):
    return {"generator": kind, "params": dict(params), "seed": int(seed) if seed is not None else 0}


def _pts(a):
    return [[float(x) for x in row] for row in np.asarray(a)]


def comb_polygon(teeth: int, inner: float = 1.0, outer: float = 2.0, duty: float = 0.5) -> np.ndarray:
    """Radial comb about the origin: ``teeth`` spokes that reach from ``inner`` to ``outer``."""
    ring = []
    step = 2 * math.pi / teeth
    half = 0.5 * duty * step
    for k in range(teeth):
        a = k * step
        for rad, ang in ((inner, a - half), (outer, a - half), (outer, a + half), (inner, a + half)):
            ring.append((rad * math.cos(ang), rad * math.sin(ang)))
    return np.array(ring)


def gen_comb(params, seed=None) -> dict:
    t = _int(params, "teeth", 8, lo=3)
    inner = _float(params, "inner", 1.0)
    outer = _float(params, "outer", 2.0)
    if outer <= inner:
        raise InvalidParams("outer must exceed inner")
    n = _int(params, "points", 1)
    rng = _rng(seed)
    # threaded points sit between the hub and the tooth tips, so their orbits cross every tooth
    rad = inner + (outer - inner) * (0.5 if n == 1 else rng.uniform(0.2, 0.8, n))
    ang = rng.uniform(0, 2 * math.pi, n) if n > 1 else np.array([0.5 * 2 * math.pi / t])
    S = np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1)
    return {"kind": "fixed2d", "polygon": {"outer": _pts(comb_polygon(t, inner, outer)), "holes": []},
            "center": [0.0, 0.0], "points": _pts(S), "provenance": _prov("comb", params, seed)}


def star_polygon(rng, m: int, rmin: float = 0.4, rmax: float = 2.0) -> np.ndarray:
    """Random polygon star-shaped about the origin: one vertex per angular sector."""
    ang = (np.arange(m) + rng.uniform(0.1, 0.9, m)) * 2 * math.pi / m
    rad = rng.uniform(rmin, rmax, m)
    return np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1)


def gen_star(params, seed=None) -> dict:
    m = _int(params, "m", 10, lo=3)
    n = _int(params, "n", 10, lo=0)
    rng = _rng(seed)
    P = star_polygon(rng, m)
    S = rng.uniform(-2.0, 2.0, (n, 2))
    c = rng.uniform(-0.5, 0.5, 2)
    doc = {"kind": "fixed2d", "polygon": {"outer": _pts(P), "holes": []}, "center": [float(c[0]), float(c[1])],
           "points": _pts(S), "provenance": _prov("star", params, seed)}
    seg = params.get("segment")
    if seg:
        a, b = rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 2)
        doc.pop("center")
        doc["kind"] = "segment2d"
        doc["segment"] = _pts([a, b])
    return doc


def gen_random_points(params, seed=None) -> dict:
    n = _int(params, "n", 10, lo=0)
    bbox = params.get("bbox", [-2.0, -2.0, 2.0, 2.0])
    if len(bbox) != 4 or not all(isinstance(v, (int, float)) for v in bbox) or bbox[0] >= bbox[2] or bbox[1] >= bbox[3]:
        raise InvalidParams("bbox must be [xmin, ymin, xmax, ymax] with positive extent")
    rng = _rng(seed)
    S = np.stack([rng.uniform(bbox[0], bbox[2], n), rng.uniform(bbox[1], bbox[3], n)], axis=1)
    P = star_polygon(rng, _int(params, "m", 8, lo=3))
    return {"kind": "fixed2d", "polygon": {"outer": _pts(P), "holes": []}, "center": [0.0, 0.0],
            "points": _pts(S), "provenance": _prov("random-points", params, seed)}


def random_scp(rng, na: int, nb: int, planted: bool | None = None):
    """Integer SCP instance; with ``planted`` a yes (True) or no (False) answer is forced by resampling."""
    if planted is False and na < 2:
        raise InvalidParams("a single value always fits some interval, so a no answer needs n >= 2")
    for _ in range(1000):
        starts = np.sort(rng.choice(np.arange(0, 6 * nb, 2), nb, replace=False))
        B = [(float(s), float(s + rng.integers(0, 2))) for s in starts]
        if planted:
            shift = float(rng.integers(-4, 5))
            A = sorted({float(rng.uniform(s, e) if e > s else s) - shift for s, e in
                        (B[i] for i in rng.integers(0, nb, na))})
            A = [round(a, 3) for a in A]
        else:
            A = sorted({float(x) for x in rng.integers(0, 6 * nb, na)})
        if planted is None or scp_brute_force(A, B) == planted:
            return A, B
    raise InvalidParams("could not plant the requested answer")


def gen_scp(params, seed=None) -> dict:
    n = _int(params, "n", 4, lo=1)
    nb = _int(params, "nb", n, lo=1)
    ans = params.get("answer")
    if ans not in (None, True, False):
        raise InvalidParams("answer must be true, false or absent")
    A, B = random_scp(_rng(seed), n, nb, ans)
    return {"kind": "scp", "A": A, "B": [list(b) for b in B], "provenance": _prov("scp", params, seed)}


_CUBE_V = [[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)]
_CUBE_F = [[0, 1, 3], [0, 3, 2], [4, 6, 7], [4, 7, 5], [0, 4, 5], [0, 5, 1],
           [2, 3, 7], [2, 7, 6], [0, 2, 6], [0, 6, 4], [1, 5, 7], [1, 7, 3]]


def box_mesh(lo, hi, split: int = 0):
    """Axis-aligned box; ``split = 1`` adds a centre vertex per face (24 facets)."""
    lo, hi = np.asarray(lo, float), np.asarray(hi, float)
    V = [list(lo + np.array(v) * (hi - lo)) for v in _CUBE_V]
    if not split:
        return np.array(V), np.array(_CUBE_F)
    F = []
    for f1, f2 in zip(_CUBE_F[0::2], _CUBE_F[1::2]):
        quad = [f1[0], f1[1], f1[2], f2[2]]
        c = np.mean([V[i] for i in quad], axis=0)
        V.append(list(c))
        ci = len(V) - 1
        for k in range(4):
            F.append([quad[k], quad[(k + 1) % 4], ci])
    return np.array(V), np.array(F)


def hull_mesh(pts):
    """Outward-wound convex hull of ``pts`` with unused points dropped."""
    from scipy.spatial import ConvexHull

    pts = np.asarray(pts, float)
    H = ConvexHull(pts)
    F = H.simplices.copy()
    for i, f in enumerate(F):
        nrm = np.cross(pts[f[1]] - pts[f[0]], pts[f[2]] - pts[f[0]])
        if nrm @ H.equations[i, :3] < 0:
            F[i] = f[[0, 2, 1]]
    used = np.unique(F)
    remap = -np.ones(len(pts), int)
    remap[used] = np.arange(len(used))
    return pts[used], remap[F]


def _mesh3d_doc(kind, V, F, rng, n, params, seed):
    S = rng.uniform(-1.2, 1.2, (n, 3))
    r = rng.uniform(-0.3, 0.3, 3)
    return {"kind": "fixed3d", "mesh": {"vertices": _pts(V), "facets": [[int(i) for i in f] for f in F]},
            "center": [float(x) for x in r], "points": _pts(S), "provenance": _prov(kind, params, seed)}


def gen_box3d(params, seed=None) -> dict:
    split = _int(params, "m", 0, lo=0, hi=1)
    n = _int(params, "n", 6, lo=0)
    rng = _rng(seed)
    c = rng.uniform(-0.3, 0.3, 3)
    h = rng.uniform(0.5, 1.5, 3)
    V, F = box_mesh(c - h, c + h, split)
    return _mesh3d_doc("box3d", V, F, rng, n, params, seed)


def gen_tetra3d(params, seed=None) -> dict:
    k = _int(params, "vertices", 4, lo=4, hi=14)
    n = _int(params, "n", 6, lo=0)
    rng = _rng(seed)
    for _ in range(100):
        pts = rng.normal(size=(k, 3)) * rng.uniform(0.8, 1.4)
        V, F = hull_mesh(pts)
        if len(F) <= 24 and abs(np.linalg.det(np.cov(V.T))) > 1e-3:
            return _mesh3d_doc("tetra3d", V, F, rng, n, params, seed)
    raise InvalidParams("could not build a non-degenerate hull")


_GEN = {"comb": gen_comb, "star": gen_star, "random-points": gen_random_points, "scp": gen_scp,
        "box3d": gen_box3d, "tetra3d": gen_tetra3d}


def generate(kind: str, params: dict | None = None, seed=None) -> dict:
    if kind not in _GEN:
        raise InvalidParams(f"unknown generator {kind!r}; choose from {', '.join(KINDS)}")
    return _GEN[kind](dict(params or {}), seed)
