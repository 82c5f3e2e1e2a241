"""SVG figures: the rotated scene, the per-point interval timeline, and omega(x) curves."""
from __future__ import annotations

import math

import numpy as np

from .config import resolve
from .errors import IncompatibleMode
from .fixed import fixed_interval_sets
from .geometry import TWO_PI, points_in_polygon, rotate_points

MODES = ("scene", "events", "curves")
W, H = 640, 480
PAD = 24


def _f(x: float) -> str:
    return f"{x:.6g}"


class _Svg:
    def __init__(self, title: str):
        self.parts = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
            f"<title>{title}</title>",
            '<rect width="100%" height="100%" fill="white"/>',
        ]

    def add(self, s: str):
        self.parts.append(s)

    def done(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


class _Map:
    """Uniform data -> pixel map with the y axis pointing up."""

    def __init__(self, lo, hi, keep_aspect=True):
        lo, hi = np.asarray(lo, float), np.asarray(hi, float)
        span = np.maximum(hi - lo, 1e-12)
        sx, sy = (W - 2 * PAD) / span[0], (H - 2 * PAD) / span[1]
        if keep_aspect:
            sx = sy = min(sx, sy)
        self.lo, self.sx, self.sy = lo, sx, sy

    def __call__(self, p):
        return PAD + (p[0] - self.lo[0]) * self.sx, H - PAD - (p[1] - self.lo[1]) * self.sy

    def path(self, pts, close=False):
        xy = [self(p) for p in pts]
        d = "M " + " L ".join(f"{_f(x)} {_f(y)}" for x, y in xy)
        return d + (" Z" if close else "")


def _witness_2d(inst, result):
    w = (result or {}).get("witness", {})
    c = w.get("center")
    c = np.asarray(c, float) if c is not None else (inst.center if inst.center is not None else np.zeros(2))
    return c, float(w.get("theta", 0.0))


def _scene(inst, result) -> str:
    if inst.kind == "fixed3d":
        return _scene3d(inst, result)
    if inst.kind == "scp":
        from .reduction import reduce_scp_to_mcr

        P, r, S = reduce_scp_to_mcr(inst.doc["A"], inst.doc["B"])
    else:
        P, S = inst.polygon, inst.points
    c, th = _witness_2d(inst, result)
    if inst.kind == "scp":
        c = np.asarray(r, float)
    Q = rotate_points(S, c, th) if len(S) else S
    rad = np.hypot(*(S - c).T) if len(S) else np.zeros(0)
    allp = np.vstack([P.vertices, Q.reshape(-1, 2), c[None]] + ([c + rad.max(), c - rad.max()] if len(S) else []))
    m = _Map(allp.min(0), allp.max(0))
    svg = _Svg(f"scene {inst.kind}")
    for ring in P.rings:
        svg.add(f'<path class="polygon" d="{m.path(ring, True)}" fill="#dde8f5" stroke="#24527a" stroke-width="1.5"/>')
    if inst.kind == "segment2d" and inst.segment is not None:
        svg.add(f'<path class="segment" d="{m.path(inst.segment)}" stroke="#b5651d" stroke-width="2" fill="none"/>')
    if inst.kind == "chain2d" and inst.chain is not None:
        svg.add(f'<path class="segment" d="{m.path(inst.chain)}" stroke="#b5651d" stroke-width="2" fill="none"/>')
    cx, cy = m(c)
    for R in rad:
        svg.add(f'<circle class="orbit" cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(R * m.sx)}" fill="none" stroke="#aaaaaa" stroke-dasharray="3 3"/>')
    tol = resolve(inst.tolerances, P.vertices, S, [c])
    inside = points_in_polygon(P, Q, tol.length) if len(S) else np.zeros(0, bool)
    for q, ok in zip(Q, inside):
        x, y = m(q)
        cls, col = ("inside", "#2a9d41") if ok else ("outside", "#c0392b")
        svg.add(f'<circle class="point {cls}" cx="{_f(x)}" cy="{_f(y)}" r="3.5" fill="{col}"/>')
    svg.add(f'<circle class="center" cx="{_f(cx)}" cy="{_f(cy)}" r="4" fill="black"/>')
    svg.add(f'<text x="{PAD}" y="{PAD - 6}" font-size="12">theta = {_f(th)} rad, inside = {int(inside.sum())}</text>')
    return svg.done()


def _scene3d(inst, result) -> str:
    from .mcr3d import rotation_from_direction
    from .geometry import points_in_polyhedron

    w = (result or {}).get("witness", {})
    R = rotation_from_direction(float(w.get("theta", 0.0)), float(w.get("phi", math.pi / 2)))
    M, r, S = inst.mesh, inst.center, inst.points
    Q = R.apply(S, r) if len(S) else S
    allp = np.vstack([M.vertices[:, :2], Q[:, :2].reshape(-1, 2)])
    m = _Map(allp.min(0), allp.max(0))
    svg = _Svg("scene fixed3d (xy view)")
    for tri in M.triangles:
        svg.add(f'<path class="facet" d="{m.path(tri[:, :2], True)}" fill="none" stroke="#24527a" stroke-width="0.8"/>')
    tol = resolve(inst.tolerances, M.vertices, S, [r])
    inside = points_in_polyhedron(M, Q, tol.length) if len(S) else np.zeros(0, bool)
    for q, ok in zip(Q, inside):
        x, y = m(q[:2])
        cls, col = ("inside", "#2a9d41") if ok else ("outside", "#c0392b")
        svg.add(f'<circle class="point {cls}" cx="{_f(x)}" cy="{_f(y)}" r="3.5" fill="{col}"/>')
    return svg.done()


def depth_profile(sets) -> list[int]:
    """Depth on consecutive arcs and event angles of a set of closed interval sets, starting at angle 0."""
    base = sum(1 for s in sets if s.full_circle)
    ev = []
    for s in sets:
        if s.full_circle:
            continue
        for iv in s.intervals:
            ev.append((iv.start, 0))
            ev.append((iv.end, 1))
            if iv.wraps:
                base += 1
    ev.sort()
    out = [base]
    d = base
    for _, kind in ev:
        d += 1 if kind == 0 else -1
        out.append(d)
    return out


def _events(inst, result) -> str:
    if inst.kind not in ("fixed2d", "scp"):
        raise IncompatibleMode(f"events mode needs a fixed-centre 2D instance, not {inst.kind}")
    if inst.kind == "scp":
        from .reduction import reduce_scp_to_mcr

        P, r, S = reduce_scp_to_mcr(inst.doc["A"], inst.doc["B"])
    else:
        P, r, S = inst.polygon, inst.center, inst.points
    sets, _ = fixed_interval_sets(P, r, S, inst.tolerances)
    prof = depth_profile(sets)
    svg = _Svg("events")
    n = max(len(sets), 1)
    rowh = (H - 3 * PAD) * 0.6 / n
    m = _Map((0.0, 0.0), (TWO_PI, 1.0), keep_aspect=False)
    for j, s in enumerate(sets):
        y = PAD + (j + 0.5) * rowh
        svg.add(f'<line x1="{PAD}" y1="{_f(y)}" x2="{W - PAD}" y2="{_f(y)}" stroke="#dddddd"/>')
        pieces = [(0.0, TWO_PI)] if s.full_circle else []
        for iv in s.intervals:
            if iv.full_circle:
                pieces.append((0.0, TWO_PI))
            elif iv.wraps:
                pieces += [(iv.start, TWO_PI), (0.0, iv.end)]
            else:
                pieces.append((iv.start, iv.end))
        for a, b in pieces:
            x0, _ = m((a, 0))
            x1, _ = m((b, 0))
            svg.add(f'<line class="interval" data-point="{j}" x1="{_f(x0)}" y1="{_f(y)}" x2="{_f(max(x1, x0 + 1))}" y2="{_f(y)}" stroke="#24527a" stroke-width="4"/>')
    # depth step profile along the bottom
    ev = sorted(a for s in sets if not s.full_circle for iv in s.intervals for a in (iv.start, iv.end))
    top = PAD + n * rowh + PAD
    dmax = max(max(prof), 1)
    ys = [H - PAD - (H - PAD - top) * d / dmax for d in prof]
    xs = [m((a, 0))[0] for a in ev]
    pts = [(PAD, ys[0])]
    for x, y0, y1 in zip(xs, ys, ys[1:]):
        pts += [(x, y0), (x, y1)]
    pts.append((W - PAD, ys[-1]))
    d = "M " + " L ".join(f"{_f(x)} {_f(y)}" for x, y in pts)
    svg.add(f'<path class="depth" data-depth="{" ".join(map(str, prof))}" d="{d}" fill="none" stroke="#b5651d" stroke-width="1.5"/>')
    if result and "theta" in result.get("witness", {}):
        x, _ = m((float(result["witness"]["theta"]), 0))
        svg.add(f'<line class="sweep" x1="{_f(x)}" y1="{PAD}" x2="{_f(x)}" y2="{H - PAD}" stroke="#c0392b"/>')
    return svg.done()


def _curves(inst, result, samples: int = 64) -> str:
    if inst.kind != "segment2d":
        raise IncompatibleMode(f"curves mode needs a segment2d instance, not {inst.kind}")
    from .segment import _curves_for_point, canonicalize_frame, critical_x_values, split_edges_at_x_axis

    a, b = inst.segment
    tol = resolve(inst.tolerances, inst.polygon.vertices, inst.points, [a, b])
    F, Q, S2 = canonicalize_frame(a, b, inst.polygon, inst.points, tol)
    Q = split_edges_at_x_axis(Q)
    curves = [c for j, p in enumerate(S2) for c in _curves_for_point(Q, p, j, F.bx, tol)]
    crit = critical_x_values(curves, F.bx, tol)
    m = _Map((0.0, 0.0), (F.bx, TWO_PI), keep_aspect=False)
    svg = _Svg("omega(x) curves")
    for x in crit:
        x0, _ = m((x, 0))
        svg.add(f'<line class="critical" x1="{_f(x0)}" y1="{PAD}" x2="{_f(x0)}" y2="{H - PAD}" stroke="#eeeeee"/>')
    palette = ["#24527a", "#2a9d41", "#b5651d", "#8e44ad", "#c0392b", "#16a085"]
    for c in curves:
        xs = np.linspace(c.x_domain[0], c.x_domain[1], samples)
        ws = c.omega(xs)
        col = palette[c.point_index % len(palette)]
        svg.add(f'<path class="omega-curve" data-point="{c.point_index}" d="{m.path(np.stack([xs, ws], 1))}" fill="none" stroke="{col}"/>')
    if result and "x" in result.get("witness", {}):
        x, y = m((float(result["witness"]["x"]), float(result["witness"].get("theta", 0.0))))
        svg.add(f'<circle class="optimum" cx="{_f(x)}" cy="{_f(y)}" r="4" fill="#c0392b"/>')
    return svg.done()


def render_svg(inst, result: dict | None = None, mode: str = "scene") -> str:
    if mode == "scene":
        return _scene(inst, result)
    if mode == "events":
        return _events(inst, result)
    if mode == "curves":
        return _curves(inst, result)
    raise IncompatibleMode(f"unknown render mode {mode!r}; choose from {', '.join(MODES)}")
