"""2D/3D primitives and predicates shared by every solver.

Containment is closed throughout: a point within ``eps_len`` of the boundary
is reported as ``BOUNDARY`` and counts as contained downstream.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np

from . import _kernels as K
from .config import DEFAULT, Tolerances, diameter
from .errors import CoincidentCircles, DegenerateRay, InvalidGeometry

TWO_PI = 2.0 * math.pi
EPS_UNIT = 1e-9


class Orientation(Enum):
    LEFT = 1
    RIGHT = -1
    COLLINEAR = 0


class Location(Enum):
    OUTSIDE = 0
    BOUNDARY = 1
    INSIDE = 2

    @property
    def contained(self) -> bool:
        return self is not Location.OUTSIDE


def _finite(*vals):
    for v in vals:
        if not math.isfinite(v):
            raise InvalidGeometry(f"non-finite coordinate {v!r}")


class Point2(NamedTuple):
    x: float
    y: float

    @classmethod
    def of(cls, p) -> "Point2":
        x, y = float(p[0]), float(p[1])
        _finite(x, y)
        return cls(x, y)


class Point3(NamedTuple):
    x: float
    y: float
    z: float

    @classmethod
    def of(cls, p) -> "Point3":
        x, y, z = float(p[0]), float(p[1]), float(p[2])
        _finite(x, y, z)
        return cls(x, y, z)


@dataclass(frozen=True)
class Segment2:
    u: Point2
    v: Point2

    def __post_init__(self):
        object.__setattr__(self, "u", Point2.of(self.u))
        object.__setattr__(self, "v", Point2.of(self.v))
        if math.dist(self.u, self.v) <= 0.0:
            raise InvalidGeometry("zero-length segment")


@dataclass(frozen=True)
class Circle2:
    center: Point2
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", Point2.of(self.center))
        _finite(self.radius)
        if not self.radius > 0:
            raise InvalidGeometry("circle radius must be positive")


@dataclass(frozen=True)
class AngularInterval:
    """Closed counterclockwise arc ``start -> end``; ``start == end`` is a single angle."""

    start: float
    end: float
    full_circle: bool = False

    def __post_init__(self):
        object.__setattr__(self, "start", float(self.start) % TWO_PI)
        object.__setattr__(self, "end", float(self.end) % TWO_PI)

    @classmethod
    def full(cls) -> "AngularInterval":
        return cls(0.0, 0.0, True)

    @property
    def length(self) -> float:
        if self.full_circle:
            return TWO_PI
        return (self.end - self.start) % TWO_PI

    @property
    def wraps(self) -> bool:
        return not self.full_circle and self.end < self.start

    @property
    def midpoint(self) -> float:
        return (self.start + 0.5 * self.length) % TWO_PI

    def contains(self, angle: float, eps: float = 0.0) -> bool:
        if self.full_circle:
            return True
        off = (angle - self.start) % TWO_PI
        return off <= self.length + eps or off >= TWO_PI - eps


def _ring_area2(ring: np.ndarray) -> float:
    x, y = ring[:, 0], ring[:, 1]
    return float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


@dataclass(frozen=True, eq=False)
class SimplePolygon:
    """Simple polygon with optional holes.

    The outer ring is stored counterclockwise and holes clockwise, so the
    interior is on the left of every directed edge.  ``edges`` is an (E, 4)
    array ``[ux, uy, vx, vy]``; ``nxt``/``prv`` index the neighbouring edge
    on the same ring.
    """

    outer: np.ndarray
    holes: tuple = ()
    edges: np.ndarray = field(init=False, repr=False)
    nxt: np.ndarray = field(init=False, repr=False)
    prv: np.ndarray = field(init=False, repr=False)
    ring_of: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        outer = self._ring(self.outer, ccw=True)
        holes = tuple(self._ring(h, ccw=False) for h in self.holes)
        object.__setattr__(self, "outer", outer)
        object.__setattr__(self, "holes", holes)
        edges, nxt, prv, ring_of = [], [], [], []
        base = 0
        for k, ring in enumerate((outer,) + holes):
            n = len(ring)
            edges.append(np.hstack([ring, np.roll(ring, -1, axis=0)]))
            nxt.append(base + (np.arange(n) + 1) % n)
            prv.append(base + (np.arange(n) - 1) % n)
            ring_of.append(np.full(n, k))
            base += n
        for name, val in (("edges", np.vstack(edges)), ("nxt", np.concatenate(nxt)),
                          ("prv", np.concatenate(prv)), ("ring_of", np.concatenate(ring_of))):
            val.setflags(write=False)
            object.__setattr__(self, name, val)

    @staticmethod
    def _ring(ring, ccw: bool) -> np.ndarray:
        r = np.array(ring, dtype=float)
        if r.ndim != 2 or r.shape[1] != 2:
            raise InvalidGeometry("ring must be a list of [x, y] pairs")
        if not np.isfinite(r).all():
            raise InvalidGeometry("non-finite vertex coordinate")
        if len(r) >= 2 and np.array_equal(r[0], r[-1]):
            r = r[:-1]
        if len(r) < 3:
            raise InvalidGeometry("ring needs at least 3 vertices")
        area = _ring_area2(r)
        if area == 0.0:
            raise InvalidGeometry("ring has zero area")
        if (area > 0) != ccw:
            r = r[::-1].copy()
        r.setflags(write=False)
        return r

    @classmethod
    def from_rings(cls, outer, holes=(), tol: Tolerances | None = None, validate: bool = True):
        poly = cls(np.asarray(outer, dtype=float), tuple(np.asarray(h, dtype=float) for h in holes))
        if validate:
            poly.validate(tol)
        return poly

    @property
    def rings(self) -> tuple:
        return (self.outer,) + self.holes

    @property
    def vertices(self) -> np.ndarray:
        return np.vstack(self.rings)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def segments(self) -> list[Segment2]:
        return [Segment2(Point2(*e[:2]), Point2(*e[2:])) for e in self.edges]

    def validate(self, tol: Tolerances | None = None) -> None:
        """O(E^2) simplicity check; raises InvalidGeometry."""
        tol = (tol or DEFAULT).resolve(diameter(self.vertices))
        eps = tol.length
        E = self.edges
        n = len(E)
        L = np.hypot(E[:, 2] - E[:, 0], E[:, 3] - E[:, 1])
        if (L <= eps).any():
            raise InvalidGeometry(f"edge {int(np.argmax(L <= eps))} shorter than eps_len (repeated vertex)")
        a, b = E[:, None, :2], E[:, None, 2:]
        c, d = E[None, :, :2], E[None, :, 2:]

        def orient(p, q, r):
            return (q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1]) - (q[..., 1] - p[..., 1]) * (r[..., 0] - p[..., 0])

        o1, o2 = orient(a, b, c), orient(a, b, d)
        o3, o4 = orient(c, d, a), orient(c, d, b)
        proper = (o1 * o2 < 0) & (o3 * o4 < 0)
        shp = (n, n, 2)

        def seg_d2(p, s0, s1):
            p, s0, s1 = (np.broadcast_to(x, shp) for x in (p, s0, s1))
            dd = s1 - s0
            t = np.clip(np.einsum("ijk,ijk->ij", p - s0, dd) / np.einsum("ijk,ijk->ij", dd, dd), 0, 1)
            e = s0 + t[..., None] * dd - p
            return np.einsum("ijk,ijk->ij", e, e)

        close = np.minimum.reduce([seg_d2(a, c, d), seg_d2(b, c, d), seg_d2(c, a, b), seg_d2(d, a, b)]) <= eps * eps
        hit = proper | close
        idx = np.arange(n)
        adjacent = np.zeros((n, n), bool)
        adjacent[idx, idx] = True
        adjacent[idx, self.nxt] = True
        adjacent[idx, self.prv] = True
        bad = hit & ~adjacent
        if bad.any():
            i, j = map(int, np.argwhere(bad)[0])
            raise InvalidGeometry(f"edges {i} and {j} intersect (polygon not simple)")
        # consecutive edges folding back onto each other
        din = E[:, 2:] - E[:, :2]
        dout = din[self.nxt]
        cr = din[:, 0] * dout[:, 1] - din[:, 1] * dout[:, 0]
        dt = np.einsum("ij,ij->i", din, dout)
        fold = (np.abs(cr) <= eps * (L + L[self.nxt])) & (dt < 0)
        if fold.any():
            raise InvalidGeometry(f"ring folds back at the end of edge {int(np.argmax(fold))}")
        outer_edges = E[self.ring_of == 0]
        for k, h in enumerate(self.holes):
            if (K.pip2d(outer_edges, h, eps) != 2).any():
                raise InvalidGeometry(f"hole {k} not strictly inside the outer ring")
            for k2, h2 in enumerate(self.holes):
                if k2 != k and (K.pip2d(E[self.ring_of == k2 + 1], h[:1], eps) != 0).any():
                    raise InvalidGeometry(f"hole {k} lies inside hole {k2}")

    def transformed(self, fn) -> "SimplePolygon":
        """Polygon with every vertex mapped by ``fn`` (an (N,2)->(N,2) rigid map)."""
        return SimplePolygon(fn(self.outer), tuple(fn(h) for h in self.holes))


# --------------------------------------------------------------------------
# 2D predicates


def orientation(a, b, c, tol: Tolerances = DEFAULT) -> Orientation:
    ax, ay = a[0], a[1]
    area2 = (b[0] - ax) * (c[1] - ay) - (b[1] - ay) * (c[0] - ax)
    scale = max(math.dist(a, b), math.dist(a, c), math.dist(b, c))
    if abs(area2) <= tol.eps_area * scale * scale:
        return Orientation.COLLINEAR
    return Orientation.LEFT if area2 > 0 else Orientation.RIGHT


def point_in_polygon(P: SimplePolygon, q, tol: Tolerances | None = None) -> Location:
    eps = (tol or DEFAULT).resolve(diameter(P.vertices)).length
    code = K.pip2d(P.edges, np.asarray([q], dtype=float), eps)[0]
    return Location(int(code))


def points_in_polygon(P: SimplePolygon, pts, eps_len: float) -> np.ndarray:
    """Vectorised closed containment; returns a boolean array."""
    return K.pip2d(P.edges, np.ascontiguousarray(pts, dtype=float).reshape(-1, 2), eps_len) > 0


def circle_segment_intersection(C: Circle2, s: Segment2, tol: Tolerances | None = None):
    """Intersections of C with s as ``[(Point2, tangent), ...]`` ordered from s.u to s.v."""
    tol = (tol or DEFAULT).resolve(diameter([C.center, s.u, s.v]) + 2 * C.radius)
    eps = tol.length
    (ux, uy), (vx, vy) = s.u, s.v
    cx, cy = C.center
    R = C.radius
    dx, dy = vx - ux, vy - uy
    a = dx * dx + dy * dy
    L = math.sqrt(a)
    t0 = -((ux - cx) * dx + (uy - cy) * dy) / a
    hx, hy = ux + t0 * dx - cx, uy + t0 * dy - cy
    h2 = R * R - (hx * hx + hy * hy)
    band = 2.0 * R * eps + max(tol.eps_disc * R * R, eps * eps)
    if h2 < -band:
        return []
    if h2 <= band:
        cands = [(t0, True)]
    else:
        sq = math.sqrt(h2 / a)
        cands = [(t0 - sq, False), (t0 + sq, False)]
    out = []
    for t, tangent in cands:
        if t * L < -eps or (t - 1.0) * L > eps:
            continue
        t = min(1.0, max(0.0, t))
        out.append((Point2(ux + t * dx, uy + t * dy), tangent))
    return out


def circle_circle_intersection(C1: Circle2, C2: Circle2, tol: Tolerances | None = None) -> list[Point2]:
    tol = (tol or DEFAULT).resolve(diameter([C1.center, C2.center]) + 2 * max(C1.radius, C2.radius))
    eps = tol.length
    (x1, y1), (x2, y2) = C1.center, C2.center
    r1, r2 = C1.radius, C2.radius
    dx, dy = x2 - x1, y2 - y1
    d = math.hypot(dx, dy)
    if d <= eps:
        if abs(r1 - r2) <= eps:
            raise CoincidentCircles("circles coincide")
        return []
    if d > r1 + r2 + eps or d < abs(r1 - r2) - eps:
        return []
    a = (d * d + r1 * r1 - r2 * r2) / (2 * d)
    h2 = r1 * r1 - a * a
    bx, by = x1 + a * dx / d, y1 + a * dy / d
    if h2 <= 2 * r1 * eps:
        return [Point2(bx, by)]
    h = math.sqrt(h2)
    px, py = -dy / d * h, dx / d * h
    return [Point2(bx + px, by + py), Point2(bx - px, by - py)]


def angle_of(q, center, tol: Tolerances | None = None) -> float:
    dx, dy = q[0] - center[0], q[1] - center[1]
    eps = (tol or DEFAULT).resolve(diameter([q, center])).length
    if math.hypot(dx, dy) <= eps:
        raise DegenerateRay("angle of a point about itself")
    return math.atan2(dy, dx) % TWO_PI


def rotate_points(pts, center, angle: float) -> np.ndarray:
    """Rotate points counterclockwise by ``angle`` about ``center``."""
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    c = np.asarray(center, dtype=float)
    ca, sa = math.cos(angle), math.sin(angle)
    rel = pts - c
    return c + np.stack([ca * rel[:, 0] - sa * rel[:, 1], sa * rel[:, 0] + ca * rel[:, 1]], axis=1)


# --------------------------------------------------------------------------
# 3D types and predicates


def unit_frame(n) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic orthonormal pair (e1, e2) spanning the plane orthogonal to ``n``."""
    n = np.asarray(n, dtype=float)
    ref = np.array([1.0, 0.0, 0.0]) if abs(n[0]) <= 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = ref - n * np.dot(ref, n)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(n, e1)


@dataclass(frozen=True)
class Plane3:
    normal: Point3
    offset: float

    def __post_init__(self):
        n = Point3.of(self.normal)
        if abs(math.hypot(*n) - 1.0) > EPS_UNIT:
            raise InvalidGeometry("plane normal must be unit length")
        object.__setattr__(self, "normal", n)
        _finite(self.offset)

    def signed_distance(self, q) -> float:
        return float(np.dot(self.normal, q) - self.offset)


@dataclass(frozen=True)
class TangentPoint:
    point: Point3


@dataclass(frozen=True)
class Circle3:
    center: Point3
    radius: float
    normal: Point3

    def __post_init__(self):
        object.__setattr__(self, "center", Point3.of(self.center))
        n = Point3.of(self.normal)
        if abs(math.hypot(*n) - 1.0) > EPS_UNIT:
            raise InvalidGeometry("circle normal must be unit length")
        object.__setattr__(self, "normal", n)
        if not self.radius >= 0:
            raise InvalidGeometry("negative circle radius")

    @property
    def frame(self) -> tuple[np.ndarray, np.ndarray]:
        return unit_frame(self.normal)

    def point_at(self, angle) -> np.ndarray:
        e1, e2 = self.frame
        angle = np.asarray(angle, dtype=float)
        return (np.asarray(self.center) + self.radius * (np.cos(angle)[..., None] * e1
                                                          + np.sin(angle)[..., None] * e2))

    def angle_of(self, q) -> float:
        e1, e2 = self.frame
        rel = np.asarray(q, dtype=float) - np.asarray(self.center)
        return math.atan2(float(rel @ e2), float(rel @ e1)) % TWO_PI


@dataclass(frozen=True)
class Arc3:
    """Counterclockwise arc (about the circle normal) from ``start`` spanning ``extent``."""

    circle: Circle3
    start: float
    extent: float

    def __post_init__(self):
        if not 0.0 < self.extent <= TWO_PI + 1e-12:
            raise InvalidGeometry("arc extent must lie in (0, 2pi]")

    @property
    def end(self) -> float:
        return (self.start + self.extent) % TWO_PI

    @property
    def is_full(self) -> bool:
        return self.extent >= TWO_PI - 1e-12

    def sample(self, k: int) -> np.ndarray:
        return self.circle.point_at(self.start + self.extent * np.linspace(0.0, 1.0, k))


def sphere_plane_intersection(center, radius: float, pl: Plane3, tol: Tolerances | None = None):
    """``None``, a :class:`TangentPoint` or a :class:`Circle3`."""
    c = np.asarray(center, dtype=float)
    eps = (tol or DEFAULT).resolve(2 * radius + np.linalg.norm(c)).length
    n = np.asarray(pl.normal)
    d = float(n @ c - pl.offset)
    foot = c - d * n
    if abs(abs(d) - radius) <= eps:
        return TangentPoint(Point3(*foot))
    if abs(d) > radius:
        return None
    return Circle3(Point3(*foot), math.sqrt(radius * radius - d * d), pl.normal)


@dataclass(frozen=True, eq=False)
class TriMeshPolyhedron:
    """Closed, consistently wound, outward-oriented triangle mesh."""

    vertices: np.ndarray
    facets: np.ndarray
    outward: bool = field(default=True, init=False)

    def __post_init__(self):
        V = np.array(self.vertices, dtype=float)
        F = np.array(self.facets, dtype=np.int64)
        if V.ndim != 2 or V.shape[1] != 3 or not np.isfinite(V).all():
            raise InvalidGeometry("vertices must be finite [x, y, z] triples")
        if F.ndim != 2 or F.shape[1] != 3 or len(F) < 4:
            raise InvalidGeometry("facets must be at least four index triples")
        if F.min() < 0 or F.max() >= len(V):
            raise InvalidGeometry("facet index out of range")
        if (F[:, 0] == F[:, 1]).any() or (F[:, 1] == F[:, 2]).any() or (F[:, 0] == F[:, 2]).any():
            raise InvalidGeometry("facet with repeated vertex")
        directed = np.concatenate([F[:, [0, 1]], F[:, [1, 2]], F[:, [2, 0]]])
        und = np.sort(directed, axis=1)
        _, counts = np.unique(und, axis=0, return_counts=True)
        if (counts != 2).any():
            raise InvalidGeometry("mesh is not a closed 2-manifold (edge not shared by exactly two facets)")
        _, dcounts = np.unique(directed, axis=0, return_counts=True)
        if (dcounts != 1).any():
            raise InvalidGeometry("inconsistent facet winding")
        tris = V[F]
        vol = float(np.einsum("ij,ij->i", tris[:, 0], np.cross(tris[:, 1], tris[:, 2])).sum()) / 6.0
        if vol == 0.0:
            raise InvalidGeometry("mesh encloses zero volume")
        if vol < 0:
            F = F[:, ::-1].copy()
        V.setflags(write=False)
        F.setflags(write=False)
        object.__setattr__(self, "vertices", V)
        object.__setattr__(self, "facets", F)

    @property
    def triangles(self) -> np.ndarray:
        return np.ascontiguousarray(self.vertices[self.facets])

    @property
    def planes(self) -> tuple[np.ndarray, np.ndarray]:
        """Unit outward normals (F, 3) and offsets (F,)."""
        t = self.triangles
        n = np.cross(t[:, 1] - t[:, 0], t[:, 2] - t[:, 0])
        n /= np.linalg.norm(n, axis=1)[:, None]
        return n, np.einsum("ij,ij->i", n, t[:, 0])

    def plane(self, f: int) -> Plane3:
        n, c = self.planes
        return Plane3(Point3(*n[f]), float(c[f]))

    def validate(self, tol: Tolerances | None = None) -> None:
        """Reject self-intersections: no edge of one facet may pierce a non-adjacent facet."""
        tol = (tol or DEFAULT).resolve(diameter(self.vertices))
        eps = tol.length
        t = self.triangles
        F = self.facets
        n, _ = self.planes
        area = 0.5 * np.linalg.norm(np.cross(t[:, 1] - t[:, 0], t[:, 2] - t[:, 0]), axis=1)
        if (area <= eps * eps).any():
            raise InvalidGeometry("degenerate facet")
        edges = {tuple(sorted((int(F[f, k]), int(F[f, (k + 1) % 3])))) for f in range(len(F)) for k in range(3)}
        V = self.vertices
        for a, b in edges:
            p, q = V[a], V[b]
            for f in range(len(F)):
                if a in F[f] or b in F[f]:
                    continue
                da = float(n[f] @ (p - t[f, 0]))
                db = float(n[f] @ (q - t[f, 0]))
                if (da > eps and db > eps) or (da < -eps and db < -eps):
                    continue
                if abs(da - db) <= eps:
                    continue
                s = da / (da - db)
                x = p + s * (q - p)
                if K.pip3d(t[f:f + 1], x[None], eps, K.RAY_DIRS[:0]).item() == 1:
                    raise InvalidGeometry(f"mesh self-intersects (edge {a}-{b} meets facet {f})")

    @classmethod
    def from_arrays(cls, vertices, facets, tol: Tolerances | None = None, validate: bool = True):
        mesh = cls(np.asarray(vertices, dtype=float), np.asarray(facets))
        if validate:
            mesh.validate(tol)
        return mesh


def point_in_polyhedron(M: TriMeshPolyhedron, q, tol: Tolerances | None = None) -> Location:
    eps = (tol or DEFAULT).resolve(diameter(M.vertices)).length
    code = K.pip3d(M.triangles, np.asarray([q], dtype=float), eps, K.RAY_DIRS)[0]
    return Location(int(code))


def points_in_polyhedron(M: TriMeshPolyhedron, pts, eps_len: float, tris=None) -> np.ndarray:
    tris = M.triangles if tris is None else tris
    return K.pip3d(tris, np.ascontiguousarray(pts, dtype=float).reshape(-1, 3), eps_len, K.RAY_DIRS) > 0
