"""Maximum cover when the rotation centre may slide along a segment ``ab``.

The instance is moved to a frame with ``a = (0, 0)`` and ``b = (bx, 0)``.
For every point the polygon edges are cut so that each piece is hit at most
once by every orbit and the hit angle stays in one half-turn; the angle of
each hit is then an algebraic curve ``omega(x)``.  Between consecutive
critical abscissae (curve ends, tangencies, pairwise crossings) the angular
structure does not change, so the fixed-centre sweep at every critical value
and at every slab midpoint finds the optimum.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .config import Tolerances, resolve
from .errors import DegenerateSegment, OverlappingCurves, PointOnBoundary
from .fixed import _map, fixed_best, solve_fixed_baseline
from .geometry import SimplePolygon
from .omega import OmegaCurve, batch_pair_intersections, build_omega_curve

log = logging.getLogger(__name__)


# --------------------------------------------------------------------------
# frame


@dataclass(frozen=True)
class CanonicalFrame:
    """Rigid map ``z -> R (z - a)`` sending ``a`` to the origin and ``b`` onto the positive x-axis."""

    a: tuple
    rot: np.ndarray
    bx: float

    def forward(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return (pts - np.asarray(self.a)) @ self.rot.T

    def inverse(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return pts @ self.rot + np.asarray(self.a)

    @property
    def determinant(self) -> float:
        return float(np.linalg.det(self.rot))


def canonicalize_frame(a, b, P: SimplePolygon, S, tol: Tolerances | None = None):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    S = np.asarray(S, dtype=float).reshape(-1, 2)
    tol = resolve(tol, P.vertices, S, [a, b])
    d = b - a
    bx = float(math.hypot(d[0], d[1]))
    if bx <= tol.length:
        raise DegenerateSegment(f"|ab| = {bx} is below eps_len")
    c, s = d / bx
    rot = np.array([[c, s], [-s, c]])
    F = CanonicalFrame((float(a[0]), float(a[1])), rot, bx)
    Q = SimplePolygon(F.forward(P.outer), tuple(F.forward(h) for h in P.holes))
    return F, Q, F.forward(S)


def _split_ring_at_axis(ring: np.ndarray) -> np.ndarray:
    out = []
    n = len(ring)
    for i in range(n):
        u, v = ring[i], ring[(i + 1) % n]
        out.append(u)
        if (u[1] < 0 < v[1]) or (v[1] < 0 < u[1]):
            t = u[1] / (u[1] - v[1])
            out.append(np.array([u[0] + t * (v[0] - u[0]), 0.0]))
    return np.array(out)


def split_edges_at_x_axis(P: SimplePolygon) -> SimplePolygon:
    """Cut every edge whose relative interior crosses ``y = 0``."""
    return SimplePolygon(_split_ring_at_axis(P.outer), tuple(_split_ring_at_axis(h) for h in P.holes))


# --------------------------------------------------------------------------
# subdivision


@dataclass(frozen=True)
class SubEdge:
    parent: int
    u: tuple
    v: tuple
    sign_qy: int
    region_tag: str
    x_domain: tuple


def _seg_disk(u, d, c, rad):
    """Parameter interval of the segment ``u + t d`` inside the closed disk, or None."""
    f = u - c
    A = d @ d
    Bh = f @ d
    C = f @ f - rad * rad
    disc = Bh * Bh - A * C
    if disc < 0:
        return None
    sq = math.sqrt(disc)
    lo, hi = max((-Bh - sq) / A, 0.0), min((-Bh + sq) / A, 1.0)
    return (lo, hi) if lo <= hi else None


def _proper_cross(u, v, s, t):
    """Parameter on ``uv`` of a proper crossing with segment ``st``, or None."""
    d, e = v - u, t - s
    den = d[0] * e[1] - d[1] * e[0]
    if den == 0.0:
        return None
    w = s - u
    lam = (w[0] * e[1] - w[1] * e[0]) / den
    mu = (w[0] * d[1] - w[1] * d[0]) / den
    if 0.0 < lam < 1.0 and 0.0 <= mu <= 1.0:
        return lam
    return None


def _foot(u, d, c):
    return float((c - u) @ d / (d @ d))


def _phase1_cuts(u, v, p, bx):
    a, b = np.zeros(2), np.array([bx, 0.0])
    ra, rb = float(np.hypot(*p)), float(np.hypot(*(p - b)))
    d = v - u
    Ia, Ib = _seg_disk(u, d, a, ra), _seg_disk(u, d, b, rb)
    if Ia is None and Ib is None:
        return []

    def in_lens(z):
        return np.hypot(*(z - a)) <= ra and np.hypot(*(z - b)) <= rb

    if in_lens(u) or in_lens(v):
        return []
    lens = None
    if Ia is not None and Ib is not None:
        lo, hi = max(Ia[0], Ib[0]), min(Ia[1], Ib[1])
        if hi > lo:
            lens = (lo, hi)
    if lens is None:
        # tangency with C_p((x, 0)) where the line distance equals the orbit radius
        Ld = math.hypot(*d)
        n = np.array([-d[1], d[0]]) / Ld
        c = float(n @ u)
        coef = [c * c - p @ p, 2 * p[0] - 2 * n[0] * c, n[0] * n[0] - 1.0]
        cuts = []
        roots = np.roots(coef[::-1]) if abs(coef[2]) > 1e-14 else ([-coef[0] / coef[1]] if coef[1] else [])
        for x in roots:
            if abs(np.imag(x)) > 1e-12 or not (0.0 <= np.real(x) <= bx):
                continue
            cuts.append(_foot(u, d, np.array([float(np.real(x)), 0.0])))
        return cuts
    lam = _proper_cross(u, v, p, np.array([p[0], -p[1]]))
    if lam is not None:
        return [lam]
    # lens chord ends on one circle: cut at the feet of a and b that fall inside the lens part
    cuts = [t for t in (_foot(u, d, a), _foot(u, d, b)) if lens[0] < t < lens[1]]
    if not cuts:
        end_a = (Ia[0] >= Ib[0], Ia[1] <= Ib[1])
        if all(end_a):
            cuts = [_foot(u, d, a)]
        elif not any(end_a):
            cuts = [_foot(u, d, b)]
        else:
            cuts = [_foot(u, d, a), _foot(u, d, b)]
    return cuts


def _phase2_cuts(u, v, p, bx):
    a2 = np.array([-p[0], -p[1]])
    b2 = np.array([2 * bx - p[0], -p[1]])
    cuts = []
    lam = _proper_cross(u, v, a2, b2)
    if lam is not None:
        cuts.append(lam)
    dx = v[0] - u[0]
    if dx != 0.0:
        t = (p[0] - u[0]) / dx
        if 0.0 < t < 1.0:
            cuts.append(t)
    return cuts


def _region(z, p):
    left = z[0] <= p[0]
    if p[1] >= 0:
        above = z[1] >= -p[1]
    else:
        above = z[1] <= -p[1]
    return {(True, True): "R1", (False, True): "R2", (True, False): "R3", (False, False): "R4"}[(left, above)]


def _apply_cuts(u, v, cuts, eps):
    L = math.hypot(*(v - u))
    ts = [0.0]
    for t in sorted(cuts):
        if eps / L < t < 1.0 - eps / L and t * L - ts[-1] * L > eps:
            ts.append(t)
    ts.append(1.0)
    return [(u + ts[i] * (v - u), u + ts[i + 1] * (v - u)) for i in range(len(ts) - 1)]


def _check_boundary(edges, p, eps):
    u, v = edges[:, :2], edges[:, 2:]
    d = v - u
    t = np.clip(((p - u) * d).sum(1) / (d * d).sum(1), 0.0, 1.0)
    dist = np.hypot(*(u + t[:, None] * d - p).T)
    if (dist <= eps).any():
        raise PointOnBoundary(f"point {tuple(p)} lies on edge {int(np.argmin(dist))}")


def subdivide_for_point(Q: SimplePolygon, p, bx: float, tol: Tolerances | None = None) -> list[SubEdge]:
    """Cut the axis-split polygon ``Q`` for point ``p``; at most five pieces per edge."""
    p = np.asarray(p, dtype=float)
    tol = resolve(tol, Q.vertices, [p], [[0.0, 0.0], [bx, 0.0]])
    eps = tol.length
    _check_boundary(Q.edges, p, eps)
    out = []
    for e, row in enumerate(Q.edges):
        u, v = row[:2].copy(), row[2:].copy()
        pieces = _apply_cuts(u, v, _phase1_cuts(u, v, p, bx), eps)
        sub = []
        for s, t in pieces:
            sub.extend(_apply_cuts(s, t, _phase2_cuts(s, t, p, bx), eps))
        if len(sub) > 5:
            from .errors import InvariantViolation
            raise InvariantViolation(f"edge {e} cut into {len(sub)} pieces")
        for s, t in sub:
            mid = 0.5 * (s + t)
            out.append(SubEdge(e, (float(s[0]), float(s[1])), (float(t[0]), float(t[1])),
                               1 if mid[1] >= 0 else -1, _region(mid, p), (0.0, float(bx))))
    return out


# --------------------------------------------------------------------------
# critical values and the slab scan


@dataclass(frozen=True)
class SegmentSolution:
    x_star: float
    center_star: tuple
    omega_star: float
    count: int
    n_critical: int = 0
    n_curves: int = 0


def _curves_for_point(Q, p, j, bx, tol):
    try:
        sub = subdivide_for_point(Q, p, bx, tol)
    except PointOnBoundary:
        # curves stay exact on the raw edges; only the piece bookkeeping is coarser
        log.warning("point %d lies on the boundary; using unsubdivided edges", j)
        sub = [SubEdge(e, tuple(r[:2]), tuple(r[2:]), 1, "R1", (0.0, bx)) for e, r in enumerate(Q.edges)]
    curves = []
    for k, se in enumerate(sub):
        curves.extend(build_omega_curve(se, p, bx, tol, point_index=j, sub_edge=k))
    return curves


def critical_x_values(curves: list[OmegaCurve], bx: float, tol: Tolerances | None = None,
                      extra=()) -> list[float]:
    """Sorted abscissae where the angular structure along ``ab`` can change."""
    tol = tol or Tolerances()
    xs = [0.0, float(bx)] + [float(x) for x in extra]
    for c in curves:
        xs.extend(c.x_domain)
    n = len(curves)
    if n > 1:
        ia, ib = np.triu_indices(n, 1)
        pi = np.array([c.point_index for c in curves])
        up = np.array([c.upper for c in curves])
        lo = np.array([c.x_domain[0] for c in curves])
        hi = np.array([c.x_domain[1] for c in curves])
        keep = (pi[ia] != pi[ib]) & (up[ia] == up[ib]) & (np.minimum(hi[ia], hi[ib]) > np.maximum(lo[ia], lo[ib]))
        ia, ib = ia[keep], ib[keep]
        try:
            res = batch_pair_intersections(curves, curves, ia, ib, tol)
        except OverlappingCurves:
            res = []
        for hits in res:
            xs.extend(x for x, _ in hits)
    xs = sorted(x for x in xs if 0.0 <= x <= bx)
    ex = 1e-9 * bx
    out = [xs[0]]
    for x in xs[1:]:
        if x - out[-1] > ex:
            out.append(x)
    if bx - out[-1] > ex:
        out.append(float(bx))
    else:
        out[-1] = float(bx)
    return out


def solve_segment_mcr(P: SimplePolygon, S, a, b, tol: Tolerances | None = None,
                      parallel: bool = False) -> SegmentSolution:
    S = np.asarray(S, dtype=float).reshape(-1, 2)
    tol = resolve(tol, P.vertices, S, [a, b])
    try:
        F, Q, S2 = canonicalize_frame(a, b, P, S, tol)
    except DegenerateSegment:
        sol = solve_fixed_baseline(P, tuple(map(float, a)), S, tol)
        return SegmentSolution(0.0, (float(a[0]), float(a[1])), sol.witness_angle, sol.best_count)
    bx = F.bx
    Q = split_edges_at_x_axis(Q)
    per_point = _map(lambda j: _curves_for_point(Q, S2[j], j, bx, tol), list(range(len(S2))), parallel)
    curves = [c for cs in per_point for c in cs]
    on_axis = [float(p[0]) for p in S2 if abs(p[1]) <= tol.length]
    crit = critical_x_values(curves, bx, tol, extra=on_axis)
    probes = [crit[0]]
    for x0, x1 in zip(crit, crit[1:]):
        probes.extend((0.5 * (x0 + x1), x1))
    edges, nxt = np.ascontiguousarray(Q.edges), np.ascontiguousarray(Q.nxt)
    results = _map(lambda x: fixed_best(edges, nxt, S2, (x, 0.0), tol.length, tol.eps_ang), probes, parallel)
    best = None
    for x, (cnt, ang, _) in zip(probes, results):
        if best is None or cnt > best[1] or (cnt == best[1] and x < best[0]):
            best = (x, cnt, ang)
    x, cnt, ang = best
    c = F.inverse([[x, 0.0]])[0]
    return SegmentSolution(float(x), (float(c[0]), float(c[1])), float(ang), int(cnt), len(crit), len(curves))


def solve_chain_mcr(P: SimplePolygon, S, chain, tol: Tolerances | None = None,
                    parallel: bool = False) -> SegmentSolution:
    """Best placement over a polygonal chain; ``chain`` is a vertex list or a list of (a, b) pairs."""
    chain = np.asarray(chain, dtype=float)
    if chain.ndim == 2:
        segs = list(zip(chain[:-1], chain[1:]))
    else:
        segs = [(s[0], s[1]) for s in chain]
    if not segs:
        raise ValueError("chain needs at least one segment")
    best = None
    for a, b in segs:
        sol = solve_segment_mcr(P, S, a, b, tol, parallel)
        if best is None or sol.count > best.count:
            best = sol
    return best
