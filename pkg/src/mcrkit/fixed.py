"""Maximum cover under rotation about a fixed centre.

Two solvers share the per-point contact rule and the final circular sweep:

* :func:`solve_fixed_baseline` intersects every orbit circle with every edge.
* :func:`solve_fixed_output_sensitive` grows a circle about the centre and
  keeps the edges it currently crosses in angular order, so each point only
  touches the edges its orbit actually meets.

Angles are counterclockwise rotations of the point set about the centre,
which is the same as rotating the polygon clockwise by that angle.
"""
from __future__ import annotations

import heapq
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from sortedcontainers import SortedList

from . import _kernels as K
from .config import Tolerances, resolve
from .errors import PointAtCenter
from .geometry import TWO_PI, AngularInterval, SimplePolygon, points_in_polygon

log = logging.getLogger(__name__)


class EventKind(Enum):
    IN = 0
    OUT = 1


@dataclass(frozen=True)
class RotationEvent:
    angle: float
    kind: EventKind
    point_index: int
    edge_index: int


@dataclass
class AngularIntervalSet:
    """Rotation angles (closed) at which one point lies in the polygon."""

    point_index: int
    intervals: list[AngularInterval] = field(default_factory=list)
    full_circle: bool = False
    events: list[RotationEvent] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not self.full_circle and not self.intervals

    def contains(self, angle: float, eps: float = 0.0) -> bool:
        return self.full_circle or any(iv.contains(angle, eps) for iv in self.intervals)

    @classmethod
    def full(cls, j: int) -> "AngularIntervalSet":
        return cls(j, [AngularInterval.full()], True)


@dataclass
class CoverageSolution:
    best_count: int
    witness_intervals: list[AngularInterval]
    witness_angle: float


def _wrap(x):
    y = np.mod(x, TWO_PI)
    return np.where(y >= TWO_PI, 0.0, y)


# --------------------------------------------------------------------------
# per-point contacts


def orbit_contacts(edges, nxt, center, p, eps_len, idx=None):
    """Boundary contacts of the orbit of ``p`` about ``center``.

    Returns ``(omega, state_after, edge_index)`` in edge order; ``state_after``
    says whether the rotating point is in the polygon just past the contact.
    ``idx`` restricts the search to a subset of edges.
    """
    cx, cy = float(center[0]), float(center[1])
    px, py = float(p[0]), float(p[1])
    R = math.hypot(px - cx, py - cy)
    phi0 = math.atan2(py - cy, px - cx)
    tol_h2 = 2.0 * R * eps_len + eps_len * eps_len
    ids = np.arange(len(edges)) if idx is None else np.asarray(idx, dtype=np.int64)
    E = edges[ids]
    ux, uy, vx, vy = E[:, 0], E[:, 1], E[:, 2], E[:, 3]
    dx, dy = vx - ux, vy - uy
    a = dx * dx + dy * dy
    L = np.sqrt(a)
    t0 = -((ux - cx) * dx + (uy - cy) * dy) / a
    hx, hy = ux + t0 * dx - cx, uy + t0 * dy - cy
    h2 = R * R - (hx * hx + hy * hy)
    tangent = np.abs(h2) <= tol_h2
    s = np.sqrt(np.where(tangent | (h2 < 0), 0.0, h2) / a)
    # candidate order matches the compiled kernel: edge-major, lower root first
    t = np.stack([t0 - s, t0 + s], axis=1)
    ok = np.stack([h2 >= -tol_h2, (h2 > tol_h2)], axis=1)
    ok &= (t * L[:, None] > eps_len) & ((1.0 - t) * L[:, None] > eps_len)
    # the end vertex is a contact whenever it lies in the band around the orbit
    wx, wy = vx - cx, vy - cy
    at_v = np.abs(wx * wx + wy * wy - R * R) <= tol_h2
    t = np.concatenate([t, np.ones((len(E), 1))], axis=1)
    ok = np.concatenate([ok, at_v[:, None]], axis=1)
    rows, cols = np.nonzero(ok)
    if len(rows) == 0:
        return np.empty(0), np.empty(0, bool), np.empty(0, np.int64)
    tt = t[rows, cols]
    vert = cols == 2
    relx = np.where(vert, vx[rows], ux[rows] + tt * dx[rows]) - cx
    rely = np.where(vert, vy[rows], uy[rows] + tt * dy[rows]) - cy
    ddx, ddy = dx[rows], dy[rows]
    crossing = ddx * relx + ddy * rely > 0.0
    left = ddx * (cy - uy[rows]) - ddy * (cx - ux[rows]) > 0.0
    state = np.where(tangent[rows], left, crossing)
    if vert.any():
        k = np.flatnonzero(vert)
        out = edges[nxt[ids[rows[k]]]]
        ox, oy = out[:, 2] - out[:, 0], out[:, 3] - out[:, 1]
        wx, wy = vx[rows[k]], vy[rows[k]]
        state[k] = _vertex_state(ddx[k], ddy[k], ox, oy, relx[k], rely[k], cx, cy, wx, wy, R, tol_h2)
    om = _wrap(np.arctan2(rely, relx) - phi0)
    return om, state, ids[rows]


def _vertex_state(dinx, diny, ox, oy, relx, rely, cx, cy, wx, wy, R, tol_h2):
    """State just past a vertex hit.

    The interior cone at the vertex runs counterclockwise from the outgoing
    direction to the reversed incoming one.  If the orbit leaves along one of
    those two rays (tangent to that edge line) the curvature decides: inside
    iff the centre is to the left of the edge.  Otherwise the point is inside
    iff its direction of travel lies strictly in the cone.
    """
    tx, ty = -rely, relx
    cr_out = ox * (cy - wy) - oy * (cx - wx)
    tan_out = (np.abs(R * R - cr_out * cr_out / (ox * ox + oy * oy)) <= tol_h2) & (tx * ox + ty * oy > 0)
    cr_in = dinx * (cy - wy) - diny * (cx - wx)
    tan_in = (np.abs(R * R - cr_in * cr_in / (dinx * dinx + diny * diny)) <= tol_h2) & (tx * dinx + ty * diny < 0)
    a1 = np.arctan2(oy, ox)
    sweep = np.mod(np.arctan2(-diny, -dinx) - a1, TWO_PI)
    pos = np.mod(np.arctan2(relx, -rely) - a1, TWO_PI)
    return np.where(tan_out, cr_out > 0, np.where(tan_in, cr_in > 0, pos < sweep))


def _clusters(om, st, eps_ang, presorted=False):
    """Merge contacts closer than eps_ang; each cluster keeps its first angle and last state."""
    order = np.arange(len(om)) if presorted else np.argsort(om, kind="stable")
    ca, cs, ce = [], [], []
    for o in order:
        if ca and om[o] - ca[-1] <= eps_ang:
            cs[-1] = bool(st[o])
            ce[-1] = int(o)
        else:
            ca.append(float(om[o]))
            cs.append(bool(st[o]))
            ce.append(int(o))
    if len(ca) >= 2 and (TWO_PI - ca[-1]) + ca[0] <= eps_ang:
        ca.pop()
        cs.pop()
        ce.pop()
    return ca, cs, ce


def _interval_set(j, ca, cs, ce, edge_ids) -> AngularIntervalSet:
    K_ = len(ca)
    if all(cs):
        return AngularIntervalSet.full(j)
    events = []
    intervals = []
    first = next(k for k in range(K_) if not cs[k - 1])
    open_at = None
    for step in range(K_):
        k = (first + step) % K_
        before, after = cs[k - 1], cs[k]
        if before and after:
            continue
        e = int(edge_ids[ce[k]])
        if not before:
            events.append(RotationEvent(ca[k], EventKind.IN, j, e))
            open_at = ca[k]
        if not after:
            events.append(RotationEvent(ca[k], EventKind.OUT, j, e))
            intervals.append(AngularInterval(open_at, ca[k]))
    intervals.sort(key=lambda iv: iv.start)
    events.sort(key=lambda ev: (ev.angle, ev.kind.value))
    return AngularIntervalSet(j, intervals, False, events)


def _point_set(P: SimplePolygon, r, p, j, tol: Tolerances, idx=None, presorted=False) -> AngularIntervalSet:
    eps = tol.length
    if math.hypot(p[0] - r[0], p[1] - r[1]) <= eps:
        inside = bool(points_in_polygon(P, [r], eps)[0])
        return AngularIntervalSet.full(j) if inside else AngularIntervalSet(j)
    om, st, eid = orbit_contacts(P.edges, P.nxt, r, p, eps, idx)
    if len(om) == 0:
        inside = bool(points_in_polygon(P, [p], eps)[0])
        return AngularIntervalSet.full(j) if inside else AngularIntervalSet(j)
    ca, cs, ce = _clusters(om, st, tol.eps_ang, presorted)
    return _interval_set(j, ca, cs, ce, eid)


def point_rotation_intervals(P: SimplePolygon, r, p, tol: Tolerances | None = None,
                             point_index: int = 0, strict: bool = False) -> AngularIntervalSet:
    """Closed set of rotation angles that keep ``p`` inside ``P`` while rotating about ``r``.

    A point at the centre is a valid input (full or empty set).  With
    ``strict=True`` it raises :class:`PointAtCenter` instead.
    """
    tol = resolve(tol, P.vertices, [r], [p])
    if strict and math.hypot(p[0] - r[0], p[1] - r[1]) <= tol.length:
        raise PointAtCenter("point coincides with the rotation centre")
    return _point_set(P, r, p, point_index, tol)


# --------------------------------------------------------------------------
# circular sweep


def _events_of(s: AngularIntervalSet):
    for iv in s.intervals:
        yield (iv.start, 0, s.point_index)
        yield (iv.end, 1, s.point_index)


def _sweep(base: int, wrap: int, events, eps_ang: float) -> tuple[CoverageSolution, int]:
    """Sweep pre-sorted ``(angle, kind, point)`` events; kind 0 = in, 1 = out."""
    gA, gin, gout = [], [], []
    prev = None
    ne = 0
    for ang, kind, _ in events:
        ne += 1
        if prev is None or ang - prev > eps_ang:
            gA.append(ang)
            gin.append(0)
            gout.append(0)
        prev = ang
        if kind == 0:
            gin[-1] += 1
        else:
            gout[-1] += 1
    if not gA:
        return CoverageSolution(base, [AngularInterval.full()], 0.0), 0
    G = len(gA)
    V, W = [], []
    c = base + wrap
    for g in range(G):
        c += gin[g]
        V.append(c)
        c -= gout[g]
        W.append(c)
    best = max(V)
    if all(w == best for w in W):
        return CoverageSolution(best, [AngularInterval.full()], 0.0), ne
    s0 = next(g for g in range(G) if W[g] != best)
    runs = []
    isolated = []
    g = 1
    while g <= G:
        gi = (s0 + g) % G
        if W[gi] == best:
            h = g
            while W[(s0 + h) % G] == best:
                h += 1
            runs.append((gA[gi], gA[(s0 + h) % G]))
            g = h + 1
        else:
            if V[gi] == best and W[(gi - 1) % G] != best:
                isolated.append(gA[gi])
            g += 1
    witness = [AngularInterval(a, b) for a, b in runs] + [AngularInterval(a, a) for a in isolated]
    witness.sort(key=lambda iv: iv.start)
    if runs:
        best_len, angle = -1.0, 0.0
        for a, b in runs:
            length = (b - a) % TWO_PI
            if length > best_len:
                best_len = length
                angle = float(_wrap(a + 0.5 * length))
    else:
        angle = min(isolated)
    return CoverageSolution(best, witness, angle), ne


def sweep_max_coverage(sets: list[AngularIntervalSet], tol: Tolerances | None = None) -> CoverageSolution:
    eps_ang = (tol or Tolerances()).eps_ang
    sol, _ = _sweep_sets(sets, eps_ang)
    return sol


def _sweep_sets(sets, eps_ang):
    base = sum(1 for s in sets if s.full_circle)
    wrap = sum(1 for s in sets if not s.full_circle for iv in s.intervals if iv.wraps)
    events = sorted(ev for s in sets if not s.full_circle for ev in _events_of(s))
    return _sweep(base, wrap, events, eps_ang)


# --------------------------------------------------------------------------
# baseline


def _map(fn, items, parallel: bool):
    if parallel and len(items) > 1:
        with ThreadPoolExecutor() as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def fixed_interval_sets(P: SimplePolygon, r, S, tol: Tolerances | None = None, parallel: bool = False):
    S = np.asarray(S, dtype=float).reshape(-1, 2)
    tol = resolve(tol, P.vertices, S, [r])
    return _map(lambda j: _point_set(P, r, S[j], j, tol), list(range(len(S))), parallel), tol


def solve_fixed_baseline(P: SimplePolygon, r, S, tol: Tolerances | None = None,
                         parallel: bool = False) -> CoverageSolution:
    sets, tol = fixed_interval_sets(P, r, S, tol, parallel)
    return sweep_max_coverage(sets, tol)


def fixed_best_reference(edges, nxt, pts, center, eps_len, eps_ang):
    """Pure-numpy twin of the compiled ``fixed_best_nb`` kernel."""
    base = wrap = 0
    events = []
    centre_in = None
    for j, p in enumerate(pts):
        if math.hypot(p[0] - center[0], p[1] - center[1]) <= eps_len:
            if centre_in is None:
                centre_in = bool(K.pip2d_np(edges, np.asarray([center], float), eps_len)[0] > 0)
            base += centre_in
            continue
        om, st, _ = orbit_contacts(edges, nxt, center, p, eps_len)
        if len(om) == 0:
            base += bool(K.pip2d_np(edges, np.asarray([p], float), eps_len)[0] > 0)
            continue
        ca, cs, _ = _clusters(om, st, eps_ang)
        if all(cs):
            base += 1
            continue
        wrap += cs[-1]
        for k in range(len(ca)):
            before, after = cs[k - 1], cs[k]
            if not before:
                events.append((ca[k], 0, j))
            if not after:
                events.append((ca[k], 1, j))
    events.sort()
    sol, ne = _sweep(base, wrap, events, eps_ang)
    return sol.best_count, sol.witness_angle, ne


def fixed_best(edges, nxt, pts, center, eps_len, eps_ang):
    """(count, witness angle, events) for one centre using the active backend."""
    pts = np.ascontiguousarray(pts, dtype=float).reshape(-1, 2)
    center = np.asarray(center, dtype=float)
    if K.USE_NUMBA:
        c, a, k = K.fixed_best_nb(edges, nxt, pts, center, float(eps_len), float(eps_ang))
        return int(c), float(a), int(k)
    return fixed_best_reference(edges, nxt, pts, center, eps_len, eps_ang)


# --------------------------------------------------------------------------
# output-sensitive


def normalize_polygon(P: SimplePolygon, r, tol: Tolerances | None = None, extra_rays=()) -> SimplePolygon:
    """Split every edge at the foot of the perpendicular from ``r`` when it is interior.

    ``extra_rays`` lists directions (radians) of rays from ``r``; edges are
    also split where they properly cross one of them.
    """
    tol = resolve(tol, P.vertices, [r])
    eps = tol.length
    r = np.asarray(r, dtype=float)
    dirs = [np.array([math.cos(a), math.sin(a)]) for a in extra_rays]
    rings = []
    for ring in P.rings:
        out = []
        for u, v in zip(ring, np.roll(ring, -1, axis=0)):
            out.append(u)
            d = v - u
            L = float(np.hypot(*d))
            cuts = []
            t = float((r - u) @ d) / (L * L)
            if eps < t * L < L - eps:
                cuts.append(t)
            for w in dirs:
                den = d[0] * w[1] - d[1] * w[0]
                if den == 0.0:
                    continue
                rel = r - u
                t = (rel[0] * w[1] - rel[1] * w[0]) / den
                s = (rel[0] * d[1] - rel[1] * d[0]) / den
                if s > eps and eps < t * L < L - eps and all(abs(t - c) * L > eps for c in cuts):
                    cuts.append(t)
            for t in sorted(cuts):
                out.append(u + t * d)
        rings.append(np.array(out))
    return SimplePolygon(rings[0], tuple(rings[1:]))


def _largest_gap_direction(angles) -> float:
    a = np.sort(np.mod(angles, TWO_PI))
    if len(a) == 0:
        return 0.0
    gaps = np.diff(np.append(a, a[0] + TWO_PI))
    k = int(np.argmax(gaps))
    return float(np.mod(a[k] + 0.5 * gaps[k], TWO_PI))


class _Status:
    """Active edges ordered by the angle at which they cross the sweep circle.

    Backed by a SortedList of (label, edge) pairs; labels are floats chosen
    between neighbours at insertion and renumbered when they run out.
    """

    def __init__(self, key_at):
        self._sl = SortedList()
        self._label = {}
        self.key_at = key_at  # key_at(edge, rho) -> relative angle

    def __len__(self):
        return len(self._sl)

    def edges(self):
        return [e for _, e in self._sl]

    def _less(self, e, f, rho, rho_hi):
        ke, kf = self.key_at(e, rho), self.key_at(f, rho)
        if abs(ke - kf) > 1e-12:
            return ke < kf
        probe = rho + 0.5 * (rho_hi(e, f) - rho)
        return self.key_at(e, probe) < self.key_at(f, probe)

    def insert(self, e, rho, rho_hi):
        sl = self._sl
        lo, hi = 0, len(sl)
        while lo < hi:
            mid = (lo + hi) // 2
            if self._less(sl[mid][1], e, rho, rho_hi):
                lo = mid + 1
            else:
                hi = mid
        left = sl[lo - 1][0] if lo > 0 else None
        right = sl[lo][0] if lo < len(sl) else None
        if left is None and right is None:
            lab = 0.0
        elif left is None:
            lab = right - 1.0
        elif right is None:
            lab = left + 1.0
        else:
            lab = 0.5 * (left + right)
            if not left < lab < right:
                self._relabel()
                return self.insert(e, rho, rho_hi)
        sl.add((lab, e))
        self._label[e] = lab

    def _relabel(self):
        items = [e for _, e in self._sl]
        self._sl = SortedList((float(i), e) for i, e in enumerate(items))
        self._label = {e: float(i) for i, e in enumerate(items)}

    def remove(self, e):
        self._sl.remove((self._label.pop(e), e))

    def walk_from(self, key, rho):
        """Active edges in angular order starting at the first one whose key is >= ``key``."""
        sl = self._sl
        lo, hi = 0, len(sl)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.key_at(sl[mid][1], rho) < key:
                lo = mid + 1
            else:
                hi = mid
        n = len(sl)
        return [sl[(lo + i) % n][1] for i in range(n)]


def solve_fixed_output_sensitive(P: SimplePolygon, r, S, tol: Tolerances | None = None):
    """Expanding-circle sweep; returns ``(CoverageSolution, k)`` with k the in/out event total."""
    S = np.asarray(S, dtype=float).reshape(-1, 2)
    tol = resolve(tol, P.vertices, S, [r])
    eps = tol.length
    r = np.asarray(r, dtype=float)
    verts = P.vertices
    rel = verts - r
    far = np.hypot(rel[:, 0], rel[:, 1]) > eps
    psi0 = _largest_gap_direction(np.arctan2(rel[far, 1], rel[far, 0]))
    Q = normalize_polygon(P, r, tol, extra_rays=(psi0,))
    E = Q.edges
    U, Vv = E[:, :2] - r, E[:, 2:] - r
    du, dv = np.hypot(U[:, 0], U[:, 1]), np.hypot(Vv[:, 0], Vv[:, 1])
    dmin, dmax = np.minimum(du, dv), np.maximum(du, dv)
    D = Vv - U
    DD = np.einsum("ij,ij->i", D, D)
    UD = np.einsum("ij,ij->i", U, D)
    UU = du * du

    # every normalised edge meets a circle about r at most once; relative angle from psi0
    rel_u = np.mod(np.arctan2(U[:, 1], U[:, 0]) - psi0, TWO_PI)
    rel_v = np.mod(np.arctan2(Vv[:, 1], Vv[:, 0]) - psi0, TWO_PI)
    on_ray_u = (du > eps) & ((rel_u < 1e-12) | (rel_u > TWO_PI - 1e-12))
    on_ray_v = (dv > eps) & ((rel_v < 1e-12) | (rel_v > TWO_PI - 1e-12))
    # an endpoint on the reference ray reads 0 or 2pi depending on the other end
    rel_u = np.where(on_ray_u, np.where(rel_v > math.pi, TWO_PI, 0.0), rel_u)
    rel_v = np.where(on_ray_v, np.where(rel_u > math.pi, TWO_PI, 0.0), rel_v)
    increasing = dv >= du

    def key_at(e, rho):
        rho = min(max(rho, dmin[e]), dmax[e])
        b, c = UD[e], UU[e] - rho * rho
        disc = max(b * b - DD[e] * c, 0.0)
        sq = math.sqrt(disc)
        t = (-b + sq) / DD[e] if increasing[e] else (-b - sq) / DD[e]
        t = min(max(t, 0.0), 1.0)
        if t <= 1e-12:
            return rel_u[e]
        if t >= 1.0 - 1e-12:
            return rel_v[e]
        z = U[e] + t * D[e]
        a = (math.atan2(z[1], z[0]) - psi0) % TWO_PI
        lo_, hi_ = min(rel_u[e], rel_v[e]), max(rel_u[e], rel_v[e])
        if hi_ - lo_ < math.pi and not lo_ - 1e-9 <= a <= hi_ + 1e-9:
            a = lo_ if abs(a - lo_) < abs(a - hi_) else hi_
        return a

    def rho_hi(e, f):
        return min(dmax[e], dmax[f])

    status = _Status(key_at)
    # event queue: (radius, order, payload); inserts < points < removals at equal keys
    queue = []
    for e in range(len(E)):
        queue.append((dmin[e] - eps, 0, e))
        queue.append((dmax[e] + eps, 2, e))
    dS = np.hypot(S[:, 0] - r[0], S[:, 1] - r[1])
    for j in range(len(S)):
        queue.append((dS[j], 1, j))
    queue.sort()

    sets: list[AngularIntervalSet] = [None] * len(S)
    for rho, kind, idx in queue:
        if kind == 0:
            status.insert(idx, max(rho, dmin[idx]), rho_hi)
        elif kind == 2:
            status.remove(idx)
        else:
            p = S[idx]
            if dS[idx] <= eps:
                inside = bool(points_in_polygon(Q, [r], eps)[0])
                sets[idx] = AngularIntervalSet.full(idx) if inside else AngularIntervalSet(idx)
                continue
            start_key = (math.atan2(p[1] - r[1], p[0] - r[0]) - psi0) % TWO_PI
            order = status.walk_from(start_key, rho)
            sets[idx] = _walk_set(Q, r, p, idx, order, tol)

    base = sum(1 for s in sets if s.full_circle)
    wrap = sum(1 for s in sets if not s.full_circle for iv in s.intervals if iv.wraps)
    streams = [sorted(_events_of(s)) for s in sets if not s.full_circle]
    sol, k = _sweep(base, wrap, heapq.merge(*streams), tol.eps_ang)
    return sol, k


def _walk_set(Q, r, p, j, order, tol):
    """Interval set of one point from the active edges listed in angular order."""
    eps = tol.length
    if not order:
        inside = bool(points_in_polygon(Q, [p], eps)[0])
        return AngularIntervalSet.full(j) if inside else AngularIntervalSet(j)
    om, st, eid = orbit_contacts(Q.edges, Q.nxt, r, p, eps, np.asarray(order, dtype=np.int64))
    if len(om) == 0:
        inside = bool(points_in_polygon(Q, [p], eps)[0])
        return AngularIntervalSet.full(j) if inside else AngularIntervalSet(j)
    # the walk already yields contacts by angle; tolerate float jitter at the seam
    presorted = bool(np.all(np.diff(om) >= -tol.eps_ang))
    if not presorted:
        log.debug("walk order for point %d not monotone; sorting %d contacts", j, len(om))
    ca, cs, ce = _clusters(om, st, tol.eps_ang, presorted)
    return _interval_set(j, ca, cs, ce, eid)
