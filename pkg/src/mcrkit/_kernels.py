"""Hot numeric kernels.

Every kernel exists twice: a ``*_nb`` version compiled with numba and a
``*_np`` version written against plain numpy (or, for the two sweep kernels,
the readable reference implementation that lives next to its solver).
The public alias picks one at import time:

    MCRKIT_NO_NUMBA=1    force the numpy path

Tests call both spellings directly so the two paths are checked against each
other regardless of the flag.
"""
from __future__ import annotations

import math
import os

import numpy as np

try:  # pragma: no cover - exercised implicitly
    import numba
except ImportError:  # pragma: no cover
    numba = None

_DISABLED = os.environ.get("MCRKIT_NO_NUMBA", "").strip() not in ("", "0")
USE_NUMBA = numba is not None and not _DISABLED

TWO_PI = 2.0 * math.pi

# fixed, irrational-looking cast directions for ray parity; re-cast walks this list
RAY_DIRS = np.array(
    [
        [0.3391314, 0.7937113, 0.5049813],
        [-0.6212071, 0.2573909, 0.7401339],
        [0.4488817, -0.5297451, 0.7196643],
        [-0.2264217, -0.8414203, -0.4906107],
        [0.8546541, 0.1203491, -0.5050601],
    ]
)
RAY_DIRS /= np.linalg.norm(RAY_DIRS, axis=1)[:, None]
BARY_EPS = 1e-9


def njit(fn):
    if numba is None:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


@njit
def wrap_angle(x):
    y = x % TWO_PI
    if y >= TWO_PI:
        y = 0.0
    return y


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


# --------------------------------------------------------------------------
# closed point-in-polygon, codes: 0 outside, 1 boundary, 2 inside


@njit
def pip2d_nb(edges, pts, eps):
    n = pts.shape[0]
    m = edges.shape[0]
    out = np.zeros(n, np.int8)
    eps2 = eps * eps
    for j in range(n):
        qx = pts[j, 0]
        qy = pts[j, 1]
        on = False
        inside = False
        for i in range(m):
            ux = edges[i, 0]
            uy = edges[i, 1]
            vx = edges[i, 2]
            vy = edges[i, 3]
            dx = vx - ux
            dy = vy - uy
            l2 = dx * dx + dy * dy
            t = 0.0
            if l2 > 0.0:
                t = ((qx - ux) * dx + (qy - uy) * dy) / l2
                if t < 0.0:
                    t = 0.0
                elif t > 1.0:
                    t = 1.0
            ex = ux + t * dx - qx
            ey = uy + t * dy - qy
            if ex * ex + ey * ey <= eps2:
                on = True
                break
            if (uy > qy) != (vy > qy):
                xint = ux + (qy - uy) * dx / dy
                if qx < xint:
                    inside = not inside
        if on:
            out[j] = 1
        elif inside:
            out[j] = 2
    return out


def pip2d_np(edges, pts, eps):
    edges = np.asarray(edges, dtype=float)
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    out = np.zeros(len(pts), np.int8)
    if len(pts) == 0 or len(edges) == 0:
        return out
    ux, uy, vx, vy = (edges[:, k][None, :] for k in range(4))
    qx = pts[:, 0:1]
    qy = pts[:, 1:2]
    dx = vx - ux
    dy = vy - uy
    l2 = dx * dx + dy * dy
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(l2 > 0, ((qx - ux) * dx + (qy - uy) * dy) / l2, 0.0)
        t = np.clip(t, 0.0, 1.0)
        ex = ux + t * dx - qx
        ey = uy + t * dy - qy
        on = (ex * ex + ey * ey <= eps * eps).any(axis=1)
        straddle = (uy > qy) != (vy > qy)
        xint = ux + (qy - uy) * dx / dy
        crossing = straddle & (qx < xint)
    inside = crossing.sum(axis=1) % 2 == 1
    out[inside] = 2
    out[on] = 1
    return out


# --------------------------------------------------------------------------
# closed point-in-polyhedron (triangle soup of a closed mesh)


@njit
def _seg_dist2(qx, qy, qz, ax, ay, az, bx, by, bz):
    dx = bx - ax
    dy = by - ay
    dz = bz - az
    l2 = dx * dx + dy * dy + dz * dz
    t = 0.0
    if l2 > 0.0:
        t = ((qx - ax) * dx + (qy - ay) * dy + (qz - az) * dz) / l2
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    ex = ax + t * dx - qx
    ey = ay + t * dy - qy
    ez = az + t * dz - qz
    return ex * ex + ey * ey + ez * ez


@njit
def _tri_dist2_if_close(tri, qx, qy, qz, eps):
    """Squared distance from q to the triangle, or +inf when the plane is already farther than eps."""
    ax, ay, az = tri[0, 0], tri[0, 1], tri[0, 2]
    e1x, e1y, e1z = tri[1, 0] - ax, tri[1, 1] - ay, tri[1, 2] - az
    e2x, e2y, e2z = tri[2, 0] - ax, tri[2, 1] - ay, tri[2, 2] - az
    nx = e1y * e2z - e1z * e2y
    ny = e1z * e2x - e1x * e2z
    nz = e1x * e2y - e1y * e2x
    nn = nx * nx + ny * ny + nz * nz
    wx, wy, wz = qx - ax, qy - ay, qz - az
    pd = nx * wx + ny * wy + nz * wz
    if nn > 0.0 and pd * pd > eps * eps * nn:
        return np.inf
    if nn > 0.0:
        d00 = e1x * e1x + e1y * e1y + e1z * e1z
        d01 = e1x * e2x + e1y * e2y + e1z * e2z
        d11 = e2x * e2x + e2y * e2y + e2z * e2z
        d20 = wx * e1x + wy * e1y + wz * e1z
        d21 = wx * e2x + wy * e2y + wz * e2z
        den = d00 * d11 - d01 * d01
        v = (d11 * d20 - d01 * d21) / den
        w = (d00 * d21 - d01 * d20) / den
        if v >= 0.0 and w >= 0.0 and v + w <= 1.0:
            return pd * pd / nn
    d = _seg_dist2(qx, qy, qz, tri[0, 0], tri[0, 1], tri[0, 2], tri[1, 0], tri[1, 1], tri[1, 2])
    d = min(d, _seg_dist2(qx, qy, qz, tri[1, 0], tri[1, 1], tri[1, 2], tri[2, 0], tri[2, 1], tri[2, 2]))
    d = min(d, _seg_dist2(qx, qy, qz, tri[2, 0], tri[2, 1], tri[2, 2], tri[0, 0], tri[0, 1], tri[0, 2]))
    return d


@njit
def _ray_parity(tris, qx, qy, qz, rx, ry, rz, bary_eps):
    """Return (hits, degenerate) for the ray q + t*r, t > 0."""
    hits = 0
    for f in range(tris.shape[0]):
        ax, ay, az = tris[f, 0, 0], tris[f, 0, 1], tris[f, 0, 2]
        e1x, e1y, e1z = tris[f, 1, 0] - ax, tris[f, 1, 1] - ay, tris[f, 1, 2] - az
        e2x, e2y, e2z = tris[f, 2, 0] - ax, tris[f, 2, 1] - ay, tris[f, 2, 2] - az
        hx = ry * e2z - rz * e2y
        hy = rz * e2x - rx * e2z
        hz = rx * e2y - ry * e2x
        det = e1x * hx + e1y * hy + e1z * hz
        scale = math.sqrt((e1x * e1x + e1y * e1y + e1z * e1z) * (e2x * e2x + e2y * e2y + e2z * e2z))
        sx, sy, sz = qx - ax, qy - ay, qz - az
        if abs(det) <= 1e-12 * scale:
            # ray parallel to the facet plane: degenerate only if it runs inside the plane
            nx = e1y * e2z - e1z * e2y
            ny = e1z * e2x - e1x * e2z
            nz = e1x * e2y - e1y * e2x
            nn = math.sqrt(nx * nx + ny * ny + nz * nz)
            if nn > 0.0 and abs(nx * sx + ny * sy + nz * sz) <= 1e-9 * nn * math.sqrt(scale):
                return hits, True
            continue
        inv = 1.0 / det
        u = (sx * hx + sy * hy + sz * hz) * inv
        if u < -bary_eps or u > 1.0 + bary_eps:
            continue
        qvx = sy * e1z - sz * e1y
        qvy = sz * e1x - sx * e1z
        qvz = sx * e1y - sy * e1x
        v = (rx * qvx + ry * qvy + rz * qvz) * inv
        if v < -bary_eps or u + v > 1.0 + bary_eps:
            continue
        t = (e2x * qvx + e2y * qvy + e2z * qvz) * inv
        if t <= 0.0:
            continue
        if u < bary_eps or v < bary_eps or u + v > 1.0 - bary_eps:
            return hits, True
        hits += 1
    return hits, False


@njit
def pip3d_nb(tris, pts, eps, dirs):
    n = pts.shape[0]
    out = np.zeros(n, np.int8)
    for j in range(n):
        qx, qy, qz = pts[j, 0], pts[j, 1], pts[j, 2]
        on = False
        for f in range(tris.shape[0]):
            if _tri_dist2_if_close(tris[f], qx, qy, qz, eps) <= eps * eps:
                on = True
                break
        if on:
            out[j] = 1
            continue
        hits = 0
        for k in range(dirs.shape[0]):
            hits, degenerate = _ray_parity(tris, qx, qy, qz, dirs[k, 0], dirs[k, 1], dirs[k, 2], BARY_EPS)
            if not degenerate:
                break
        if hits % 2 == 1:
            out[j] = 2
    return out


def _seg_dist2_np(q, a, b):
    d = b - a
    l2 = np.einsum("...k,...k->...", d, d)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(l2 > 0, np.einsum("...k,...k->...", q - a, d) / l2, 0.0)
    t = np.clip(t, 0.0, 1.0)
    e = a + t[..., None] * d - q
    return np.einsum("...k,...k->...", e, e)


def pip3d_np(tris, pts, eps, dirs):
    tris = np.asarray(tris, dtype=float)
    pts = np.asarray(pts, dtype=float).reshape(-1, 3)
    n = len(pts)
    out = np.zeros(n, np.int8)
    if n == 0:
        return out
    a = tris[None, :, 0, :]
    b = tris[None, :, 1, :]
    c = tris[None, :, 2, :]
    q = pts[:, None, :]
    e1 = b - a
    e2 = c - a
    nrm = np.cross(e1, e2)
    nn = np.einsum("...k,...k->...", nrm, nrm)
    w = q - a
    pd = np.einsum("...k,...k->...", nrm, w)
    near = pd * pd <= eps * eps * nn
    d00 = np.einsum("...k,...k->...", e1, e1)
    d01 = np.einsum("...k,...k->...", e1, e2)
    d11 = np.einsum("...k,...k->...", e2, e2)
    d20 = np.einsum("...k,...k->...", w, e1)
    d21 = np.einsum("...k,...k->...", w, e2)
    den = d00 * d11 - d01 * d01
    with np.errstate(divide="ignore", invalid="ignore"):
        bv = (d11 * d20 - d01 * d21) / den
        bw = (d00 * d21 - d01 * d20) / den
        face = (bv >= 0) & (bw >= 0) & (bv + bw <= 1) & near
        qb = np.broadcast_to(q, w.shape)
        edge_d2 = np.minimum(
            np.minimum(_seg_dist2_np(qb, np.broadcast_to(a, w.shape), np.broadcast_to(b, w.shape)),
                       _seg_dist2_np(qb, np.broadcast_to(b, w.shape), np.broadcast_to(c, w.shape))),
            _seg_dist2_np(qb, np.broadcast_to(c, w.shape), np.broadcast_to(a, w.shape)),
        )
    on = (face | (near & (edge_d2 <= eps * eps))).any(axis=1)
    out[on] = 1
    pending = np.flatnonzero(~on)
    scale = np.sqrt(d00 * d11)[0]
    for r in dirs:
        if len(pending) == 0:
            break
        s = pts[pending][:, None, :] - tris[None, :, 0, :]
        h = np.cross(r, e2[0])[None, :, :]
        det = np.einsum("fk,fk->f", e1[0], h[0])[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / det
            u = np.einsum("nfk,nfk->nf", s, np.broadcast_to(h, s.shape)) * inv
            qv = np.cross(s, np.broadcast_to(e1[0], s.shape))
            v = (qv @ r) * inv
            t = np.einsum("nfk,fk->nf", qv, e2[0]) * inv
        parallel = np.abs(det) <= 1e-12 * scale[None, :]
        in_plane = parallel & (
            np.abs(np.einsum("nfk,fk->nf", s, nrm[0])) <= 1e-9 * np.sqrt(nn[0])[None, :] * np.sqrt(scale)[None, :]
        )
        cand = (~parallel) & (u >= -BARY_EPS) & (u <= 1 + BARY_EPS) & (v >= -BARY_EPS) & (u + v <= 1 + BARY_EPS) & (t > 0)
        grazing = cand & ((u < BARY_EPS) | (v < BARY_EPS) | (u + v > 1 - BARY_EPS))
        degenerate = grazing.any(axis=1) | in_plane.any(axis=1)
        hits = cand.sum(axis=1)
        last = r is dirs[-1]
        settle = ~degenerate | last
        done = pending[settle]
        out[done[hits[settle] % 2 == 1]] = 2
        pending = pending[~settle]
    return out


# --------------------------------------------------------------------------
# real roots of a polynomial on [0, 1]


@njit
def _horner(c, deg, t):
    acc = c[deg]
    for k in range(deg - 1, -1, -1):
        acc = acc * t + c[k]
    return acc


@njit
def _bracket_root(c, dc, pdeg, lo, hi, flo, xtol):
    """Safeguarded Newton on a sign-changing bracket [lo, hi]."""
    x = 0.5 * (lo + hi)
    for _ in range(100):
        fx = _horner(c, pdeg, x)
        if fx == 0.0:
            return x
        if (fx < 0.0) == (flo < 0.0):
            lo = x
        else:
            hi = x
        if hi - lo <= xtol:
            return 0.5 * (lo + hi)
        g = _horner(dc, pdeg - 1, x) if pdeg > 0 else 0.0
        nx = x - fx / g if g != 0.0 else lo - 1.0
        if not (lo < nx < hi):
            nx = 0.5 * (lo + hi)
        elif abs(nx - x) <= 0.25 * xtol:
            return nx
        x = nx
    return x


@njit
def unit_roots_nb(coef, xtol):
    """Roots (and extrema) of sum coef[k] t^k on [0, 1] by derivative-bracketed root search.

    Roots of each derivative split [0, 1] into monotone pieces of the next
    lower one, climbing from the linear derivative to the polynomial itself.
    Returns (roots, extrema): sign-change roots and the roots of the first
    derivative, the latter being candidates for touching zeros.
    """
    n = coef.shape[0]
    big = 0.0
    for k in range(n):
        big = max(big, abs(coef[k]))
    deg = n - 1
    while deg > 0 and abs(coef[deg]) <= 1e-15 * big:
        deg -= 1
    empty = np.empty(0, np.float64)
    extrema = empty
    roots = empty
    if deg <= 0:
        return roots, extrema
    chain = np.zeros((deg + 1, deg + 1))
    for k in range(deg + 1):
        chain[0, k] = coef[k]
    for d in range(1, deg + 1):
        for k in range(deg - d + 1):
            chain[d, k] = chain[d - 1, k + 1] * (k + 1)
    prev = empty
    for d in range(deg - 1, -1, -1):
        pdeg = deg - d
        m = prev.shape[0]
        brk = np.empty(m + 2, np.float64)
        brk[0] = 0.0
        brk[1:m + 1] = prev
        brk[m + 1] = 1.0
        found = np.empty(m + 2, np.float64)
        nf = 0
        c = chain[d]
        dc = chain[d + 1]
        for s in range(m + 1):
            lo = brk[s]
            hi = brk[s + 1]
            if hi <= lo:
                continue
            flo = _horner(c, pdeg, lo)
            fhi = _horner(c, pdeg, hi)
            if flo == 0.0:
                if nf == 0 or found[nf - 1] < lo:
                    found[nf] = lo
                    nf += 1
                continue
            if fhi == 0.0:
                if s == m:
                    found[nf] = hi
                    nf += 1
                continue
            if (flo < 0.0) == (fhi < 0.0):
                continue
            found[nf] = _bracket_root(c, dc, pdeg, lo, hi, flo, xtol)
            nf += 1
        if d == 0:
            roots = found[:nf].copy()
        else:
            if d == 1:
                extrema = found[:nf].copy()
            prev = found[:nf].copy()
    return roots, extrema


@njit
def batch_unit_roots_nb(coefs, xtol):
    """Candidate zeros (roots then extrema) of every row; returns (values, row index)."""
    P = coefs.shape[0]
    vals = np.empty(P * 2 * coefs.shape[1], np.float64)
    own = np.empty(P * 2 * coefs.shape[1], np.int64)
    nv = 0
    for i in range(P):
        r, e = unit_roots_nb(coefs[i], xtol)
        for k in range(r.shape[0]):
            vals[nv] = r[k]
            own[nv] = i
            nv += 1
        for k in range(e.shape[0]):
            vals[nv] = e[k]
            own[nv] = i
            nv += 1
    return vals[:nv].copy(), own[:nv].copy()


def batch_unit_roots_np(coefs, xtol):
    vals, own = [], []
    for i, c in enumerate(np.asarray(coefs, dtype=float)):
        r, e = unit_roots_np(c, xtol)
        v = np.concatenate([r, e])
        vals.append(v)
        own.append(np.full(len(v), i))
    if not vals:
        return np.empty(0), np.empty(0, np.int64)
    return np.concatenate(vals), np.concatenate(own).astype(np.int64)


def unit_roots_np(coef, xtol):
    """Companion-matrix counterpart of :func:`unit_roots_nb` with Newton polish."""
    coef = np.asarray(coef, dtype=float)
    big = np.abs(coef).max() if coef.size else 0.0
    deg = len(coef) - 1
    while deg > 0 and abs(coef[deg]) <= 1e-15 * big:
        deg -= 1
    empty = np.empty(0)
    if deg <= 0:
        return empty, empty
    c = coef[: deg + 1]
    dc = np.polynomial.polynomial.polyder(c)

    def real_in_unit(poly):
        if len(poly) < 2:
            return empty
        r = np.polynomial.polynomial.polyroots(poly)
        r = r[np.abs(r.imag) <= 1e-6 * (1 + np.abs(r.real))].real
        r = r[(r >= -1e-9) & (r <= 1 + 1e-9)]
        return np.sort(np.clip(r, 0.0, 1.0))

    roots = real_in_unit(c)
    for _ in range(3):
        f = np.polynomial.polynomial.polyval(roots, c)
        g = np.polynomial.polynomial.polyval(roots, dc)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(g != 0, f / g, 0.0)
        roots = np.clip(roots - step, 0.0, 1.0)
    extrema = real_in_unit(dc) if deg > 1 else empty
    return np.unique(roots), extrema


# --------------------------------------------------------------------------
# fixed-centre rotational sweep (kernel twin of fixed.point_rotation_intervals
# + fixed.sweep_max_coverage)


@njit
def _vertex_state_after(dinx, diny, doutx, douty, relx, rely, cx, cy, wx, wy, R, tol_h2):
    """Inside-ness just after the orbit passes vertex w moving counterclockwise."""
    # leaving along a cone boundary ray: curvature decides
    tx = -rely
    ty = relx
    lo2 = doutx * doutx + douty * douty
    cr_out = doutx * (cy - wy) - douty * (cx - wx)
    if abs(R * R - cr_out * cr_out / lo2) <= tol_h2 and tx * doutx + ty * douty > 0.0:
        return cr_out > 0.0
    li2 = dinx * dinx + diny * diny
    cr_in = dinx * (cy - wy) - diny * (cx - wx)
    if abs(R * R - cr_in * cr_in / li2) <= tol_h2 and tx * dinx + ty * diny < 0.0:
        return cr_in > 0.0
    a1 = math.atan2(douty, doutx)
    sweep = (math.atan2(-diny, -dinx) - a1) % TWO_PI
    pos = (math.atan2(relx, -rely) - a1) % TWO_PI
    return pos < sweep


@njit
def _point_contacts_nb(edges, nxt, cx, cy, px, py, eps_len, om, st):
    R = math.hypot(px - cx, py - cy)
    phi0 = math.atan2(py - cy, px - cx)
    tol_h2 = 2.0 * R * eps_len + eps_len * eps_len
    cnt = 0
    for i in range(edges.shape[0]):
        ux, uy, vx, vy = edges[i, 0], edges[i, 1], edges[i, 2], edges[i, 3]
        dx = vx - ux
        dy = vy - uy
        a = dx * dx + dy * dy
        L = math.sqrt(a)
        fx = ux - cx
        fy = uy - cy
        t0 = -(fx * dx + fy * dy) / a
        hx = fx + t0 * dx
        hy = fy + t0 * dy
        h2 = R * R - (hx * hx + hy * hy)
        if h2 < -tol_h2:
            continue
        tangent = h2 <= tol_h2
        s = 0.0
        nroots = 1
        if not tangent:
            s = math.sqrt(h2 / a)
            nroots = 2
        for k in range(nroots):
            t = t0 - s if k == 0 else t0 + s
            if t * L <= eps_len or (1.0 - t) * L <= eps_len:
                continue
            relx = ux + t * dx - cx
            rely = uy + t * dy - cy
            if tangent:
                state = dx * (cy - uy) - dy * (cx - ux) > 0.0
            else:
                state = dx * relx + dy * rely > 0.0
            om[cnt] = wrap_angle(math.atan2(rely, relx) - phi0)
            st[cnt] = state
            cnt += 1
        # the end vertex is a contact whenever it lies in the band around the orbit
        relx = vx - cx
        rely = vy - cy
        if abs(relx * relx + rely * rely - R * R) <= tol_h2:
            j = nxt[i]
            om[cnt] = wrap_angle(math.atan2(rely, relx) - phi0)
            st[cnt] = _vertex_state_after(dx, dy, edges[j, 2] - edges[j, 0], edges[j, 3] - edges[j, 1],
                                          relx, rely, cx, cy, vx, vy, R, tol_h2)
            cnt += 1
    return cnt


@njit
def fixed_best_nb(edges, nxt, pts, center, eps_len, eps_ang):
    """Best closed coverage count about ``center``; returns (count, witness angle, k)."""
    n = pts.shape[0]
    E = edges.shape[0]
    cx = center[0]
    cy = center[1]
    om = np.empty(2 * E, np.float64)
    st = np.empty(2 * E, np.bool_)
    ev_ang = np.empty(4 * E * max(n, 1), np.float64)
    ev_typ = np.empty(4 * E * max(n, 1), np.int64)
    ne = 0
    base = 0
    wrap = 0
    cpt = np.empty((1, 2))
    cpt[0, 0] = cx
    cpt[0, 1] = cy
    center_in = pip2d_nb(edges, cpt, eps_len)[0] > 0
    for j in range(n):
        px = pts[j, 0]
        py = pts[j, 1]
        if math.hypot(px - cx, py - cy) <= eps_len:
            if center_in:
                base += 1
            continue
        cnt = _point_contacts_nb(edges, nxt, cx, cy, px, py, eps_len, om, st)
        if cnt == 0:
            q = np.empty((1, 2))
            q[0, 0] = px
            q[0, 1] = py
            if pip2d_nb(edges, q, eps_len)[0] > 0:
                base += 1
            continue
        order = np.argsort(om[:cnt], kind="mergesort")
        # cluster contacts closer than eps_ang; the cluster keeps its first angle
        # and the state after its last member
        ca = np.empty(cnt, np.float64)
        cs = np.empty(cnt, np.bool_)
        K = 0
        for idx in range(cnt):
            o = order[idx]
            if K > 0 and om[o] - ca[K - 1] <= eps_ang:
                cs[K - 1] = st[o]
            else:
                ca[K] = om[o]
                cs[K] = st[o]
                K += 1
        if K >= 2 and (TWO_PI - ca[K - 1]) + ca[0] <= eps_ang:
            K -= 1
        allin = True
        for k in range(K):
            if not cs[k]:
                allin = False
        if allin:
            base += 1
            continue
        if cs[K - 1]:
            wrap += 1
        for k in range(K):
            before = cs[k - 1] if k > 0 else cs[K - 1]
            after = cs[k]
            if before and after:
                continue
            if not before:
                ev_ang[ne] = ca[k]
                ev_typ[ne] = 0
                ne += 1
            if not after:
                ev_ang[ne] = ca[k]
                ev_typ[ne] = 1
                ne += 1
    best, ang = _sweep_events_nb(base, wrap, ev_ang, ev_typ, ne, eps_ang)
    return best, ang, ne


@njit
def _sweep_events_nb(base, wrap, ev_ang, ev_typ, ne, eps_ang):
    """Closed-coverage maximum of a circular event list; returns (count, witness angle)."""
    if ne == 0:
        return base, 0.0
    # sort by angle, ins before outs inside a tolerance group
    order = np.argsort(ev_ang[:ne], kind="mergesort")
    ang = ev_ang[:ne][order]
    typ = ev_typ[:ne][order]
    # distinct-angle groups
    gA = np.empty(ne, np.float64)
    gin = np.zeros(ne, np.int64)
    gout = np.zeros(ne, np.int64)
    G = 0
    for e in range(ne):
        if G > 0 and ang[e] - ang[e - 1] <= eps_ang:
            pass
        else:
            gA[G] = ang[e]
            G += 1
        if typ[e] == 0:
            gin[G - 1] += 1
        else:
            gout[G - 1] += 1
    V = np.empty(G, np.int64)
    W = np.empty(G, np.int64)
    c = base + wrap
    for g in range(G):
        c += gin[g]
        V[g] = c
        c -= gout[g]
        W[g] = c
    best = V.max()
    wbest = W.max()
    if wbest == best:
        allbest = True
        for g in range(G):
            if W[g] != best:
                allbest = False
        if allbest:
            return best, 0.0
        # start scanning just after an arc that is not best
        s0 = 0
        for g in range(G):
            if W[g] != best:
                s0 = g
                break
        best_len = -1.0
        best_mid = 0.0
        g = 1
        while g <= G:
            gi = (s0 + g) % G
            if W[gi] == best:
                run_start = gA[gi]
                h = g
                while W[(s0 + h) % G] == best:
                    h += 1
                run_end = gA[(s0 + h) % G]
                length = (run_end - run_start) % TWO_PI
                if length > best_len:
                    best_len = length
                    best_mid = wrap_angle(run_start + 0.5 * length)
                g = h + 1
            else:
                g += 1
        return best, best_mid
    # only isolated maxima: smallest such angle
    for g in range(G):
        if V[g] == best:
            return best, gA[g]
    return best, 0.0


# --------------------------------------------------------------------------
# fixed-centre brute-force oracle (independent circle/line algebra)


@njit
def oracle_fixed_nb(edges, pts, center, eps_len):
    n = pts.shape[0]
    E = edges.shape[0]
    cx = center[0]
    cy = center[1]
    cand = np.empty(2 * n * E + 1, np.float64)
    nc = 0
    R = np.empty(n)
    phi = np.empty(n)
    for j in range(n):
        R[j] = math.hypot(pts[j, 0] - cx, pts[j, 1] - cy)
        phi[j] = math.atan2(pts[j, 1] - cy, pts[j, 0] - cx)
    for j in range(n):
        if R[j] <= eps_len:
            continue
        for i in range(E):
            ux, uy, vx, vy = edges[i, 0], edges[i, 1], edges[i, 2], edges[i, 3]
            dx = vx - ux
            dy = vy - uy
            L = math.hypot(dx, dy)
            nx = -dy / L
            ny = dx / L
            kap = (nx * ux + ny * uy - (nx * cx + ny * cy)) / R[j]
            if kap > 1.0 + 1e-12 or kap < -1.0 - 1e-12:
                continue
            kap = min(1.0, max(-1.0, kap))
            psi = math.atan2(ny, nx)
            al = math.acos(kap)
            for sgn in (-1.0, 1.0):
                w = wrap_angle(psi + sgn * al - phi[j])
                zx = cx + R[j] * math.cos(phi[j] + w)
                zy = cy + R[j] * math.sin(phi[j] + w)
                t = ((zx - ux) * dx + (zy - uy) * dy) / (L * L)
                if t * L >= -eps_len and (t - 1.0) * L <= eps_len:
                    cand[nc] = w
                    nc += 1
    if nc == 0:
        cand[0] = 0.0
        nc = 1
    ev = np.sort(cand[:nc])
    allc = np.empty(2 * nc, np.float64)
    for k in range(nc):
        allc[2 * k] = ev[k]
        nxt = ev[k + 1] if k + 1 < nc else ev[0] + TWO_PI
        allc[2 * k + 1] = (0.5 * (ev[k] + nxt)) % TWO_PI
    q = np.empty((n, 2))
    best = -1
    best_ang = 0.0
    for k in range(allc.shape[0]):
        w = allc[k]
        for j in range(n):
            q[j, 0] = cx + R[j] * math.cos(phi[j] + w)
            q[j, 1] = cy + R[j] * math.sin(phi[j] + w)
        codes = pip2d_nb(edges, q, eps_len)
        c = 0
        for j in range(n):
            if codes[j] > 0:
                c += 1
        if c > best:
            best = c
            best_ang = w
    return best, best_ang, allc.shape[0]


def oracle_fixed_np(edges, pts, center, eps_len):
    edges = np.asarray(edges, dtype=float)
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    c = np.asarray(center, dtype=float)
    rel = pts - c
    R = np.hypot(rel[:, 0], rel[:, 1])
    phi = np.arctan2(rel[:, 1], rel[:, 0])
    u = edges[:, :2]
    d = edges[:, 2:] - u
    L = np.hypot(d[:, 0], d[:, 1])
    nrm = np.stack([-d[:, 1], d[:, 0]], axis=1) / L[:, None]
    psi = np.arctan2(nrm[:, 1], nrm[:, 0])
    off = np.einsum("ek,ek->e", nrm, u) - nrm @ c
    live = R > eps_len
    with np.errstate(divide="ignore", invalid="ignore"):
        kap = off[None, :] / R[:, None]
    ok = live[:, None] & (np.abs(kap) <= 1.0 + 1e-12)
    al = np.arccos(np.clip(kap, -1.0, 1.0))
    angs = []
    for sgn in (-1.0, 1.0):
        w = np.mod(psi[None, :] + sgn * al - phi[:, None], TWO_PI)
        z = c + R[:, None, None] * np.stack([np.cos(phi[:, None] + w), np.sin(phi[:, None] + w)], axis=-1)
        t = np.einsum("nek,ek->ne", z - u[None], d) / (L * L)[None]
        keep = ok & (t * L >= -eps_len) & ((t - 1.0) * L <= eps_len)
        angs.append(w[keep])
    ev = np.sort(np.concatenate(angs))
    if len(ev) == 0:
        ev = np.zeros(1)
    nxt = np.append(ev[1:], ev[0] + TWO_PI)
    allc = np.empty(2 * len(ev))
    allc[0::2] = ev
    allc[1::2] = np.mod(0.5 * (ev + nxt), TWO_PI)
    best, best_ang = -1, 0.0
    chunk = max(1, 20000 // max(len(pts), 1))
    for s in range(0, len(allc), chunk):
        w = allc[s:s + chunk]
        q = c + R[None, :, None] * np.stack([np.cos(phi[None] + w[:, None]), np.sin(phi[None] + w[:, None])], axis=-1)
        codes = pip2d_np(edges, q.reshape(-1, 2), eps_len).reshape(len(w), len(pts))
        cnt = (codes > 0).sum(axis=1)
        k = int(np.argmax(cnt))
        if cnt[k] > best:
            best, best_ang = int(cnt[k]), float(w[k])
    return best, best_ang, len(allc)


# --------------------------------------------------------------------------
# 3D latitude slice: the orbit Rz(theta) u is a horizontal circle


@njit
def _slice_point_events(tris, normals, offsets, r, ux, uy, uz, eps, out):
    """theta values where the horizontal orbit circle meets the mesh boundary; returns the count."""
    rho = math.hypot(ux, uy)
    psi0 = math.atan2(uy, ux)
    cnt = 0
    for f in range(tris.shape[0]):
        nx, ny, nz = normals[f, 0], normals[f, 1], normals[f, 2]
        cp = offsets[f] - (nx * r[0] + ny * r[1] + nz * r[2]) - nz * uz
        m = math.hypot(nx, ny)
        if m * rho <= eps:
            if abs(cp) > eps:
                continue
            # the orbit lies in the facet plane: cut it with the three triangle sides
            for k in range(3):
                ax, ay = tris[f, k, 0] - r[0], tris[f, k, 1] - r[1]
                bx, by = tris[f, (k + 1) % 3, 0] - r[0], tris[f, (k + 1) % 3, 1] - r[1]
                dx, dy = bx - ax, by - ay
                A = dx * dx + dy * dy
                if A <= 0.0:
                    continue
                Bh = ax * dx + ay * dy
                C = ax * ax + ay * ay - rho * rho
                disc = Bh * Bh - A * C
                if disc < 0.0:
                    continue
                sq = math.sqrt(disc)
                for sgn in (-1.0, 1.0):
                    t = (-Bh + sgn * sq) / A
                    if t < 0.0 or t > 1.0:
                        continue
                    out[cnt] = wrap_angle(math.atan2(ay + t * dy, ax + t * dx) - psi0)
                    cnt += 1
            continue
        if abs(cp) > m * rho + eps:
            continue
        kap = cp / (m * rho)
        kap = min(1.0, max(-1.0, kap))
        a0 = math.atan2(ny, nx)
        dl = math.acos(kap)
        for sgn in (-1.0, 1.0):
            psi = a0 + sgn * dl
            qx = r[0] + rho * math.cos(psi)
            qy = r[1] + rho * math.sin(psi)
            qz = r[2] + uz
            if _tri_dist2_if_close(tris[f], qx, qy, qz, eps) <= eps * eps:
                out[cnt] = wrap_angle(psi - psi0)
                cnt += 1
    return cnt


@njit
def slice3d_nb(tris, normals, offsets, V, r, phi, eps_len, eps_ang, dirs):
    """Best closed coverage over theta for R = Rz(theta) Ry(pi/2 - phi); returns (count, theta, k)."""
    n = V.shape[0]
    F = tris.shape[0]
    sphi, cphi = math.sin(phi), math.cos(phi)
    buf = np.empty(8 * F + 8, np.float64)
    ev_ang = np.empty(2 * (8 * F + 8) * max(n, 1), np.float64)
    ev_typ = np.empty(2 * (8 * F + 8) * max(n, 1), np.int64)
    ne = 0
    base = 0
    wrap = 0
    q = np.empty((1, 3))
    for j in range(n):
        vx, vy, vz = V[j, 0], V[j, 1], V[j, 2]
        ux = sphi * vx + cphi * vz
        uy = vy
        uz = -cphi * vx + sphi * vz
        rho = math.hypot(ux, uy)
        psi0 = math.atan2(uy, ux)
        cnt = 0
        if rho > eps_len:
            cnt = _slice_point_events(tris, normals, offsets, r, ux, uy, uz, eps_len, buf)
        if cnt == 0:
            q[0, 0] = r[0] + ux
            q[0, 1] = r[1] + uy
            q[0, 2] = r[2] + uz
            if pip3d_nb(tris, q, eps_len, dirs)[0] > 0:
                base += 1
            continue
        ev = np.sort(buf[:cnt])
        ca = np.empty(cnt, np.float64)
        K = 0
        for k in range(cnt):
            if K == 0 or ev[k] - ca[K - 1] > eps_ang:
                ca[K] = ev[k]
                K += 1
        if K >= 2 and (TWO_PI - ca[K - 1]) + ca[0] <= eps_ang:
            K -= 1
        mids = np.empty((K, 3))
        for k in range(K):
            nxt = ca[k + 1] if k + 1 < K else ca[0] + TWO_PI
            th = psi0 + 0.5 * (ca[k] + nxt)
            mids[k, 0] = r[0] + rho * math.cos(th)
            mids[k, 1] = r[1] + rho * math.sin(th)
            mids[k, 2] = r[2] + uz
        arc = pip3d_nb(tris, mids, eps_len, dirs) > 0
        allin = True
        for k in range(K):
            if not arc[k]:
                allin = False
        if allin:
            base += 1
            continue
        if arc[K - 1]:
            wrap += 1
        for k in range(K):
            before = arc[k - 1] if k > 0 else arc[K - 1]
            after = arc[k]
            if not before:
                ev_ang[ne] = ca[k]
                ev_typ[ne] = 0
                ne += 1
            if not after:
                ev_ang[ne] = ca[k]
                ev_typ[ne] = 1
                ne += 1
    best, ang = _sweep_events_nb(base, wrap, ev_ang, ev_typ, ne, eps_ang)
    return best, ang, ne


def slice_point_events_np(tris, normals, offsets, r, u, eps):
    """numpy twin of ``_slice_point_events``; returns the sorted raw theta events."""
    ux, uy, uz = float(u[0]), float(u[1]), float(u[2])
    rho = math.hypot(ux, uy)
    psi0 = math.atan2(uy, ux)
    if rho <= eps:
        return np.empty(0)
    n = normals
    cp = offsets - n @ r - n[:, 2] * uz
    m = np.hypot(n[:, 0], n[:, 1])
    out = []
    flat = m * rho <= eps
    for f in np.flatnonzero(flat & (np.abs(cp) <= eps)):
        a = tris[f, :, :2] - r[:2]
        b = np.roll(tris[f, :, :2], -1, axis=0) - r[:2]
        d = b - a
        A = (d * d).sum(1)
        Bh = (a * d).sum(1)
        C = (a * a).sum(1) - rho * rho
        disc = Bh * Bh - A * C
        for k in np.flatnonzero((disc >= 0) & (A > 0)):
            sq = math.sqrt(disc[k])
            for sgn in (-1.0, 1.0):
                t = (-Bh[k] + sgn * sq) / A[k]
                if 0.0 <= t <= 1.0:
                    z = a[k] + t * d[k]
                    out.append(math.atan2(z[1], z[0]) - psi0)
    live = ~flat & (np.abs(cp) <= m * rho + eps)
    fs = np.flatnonzero(live)
    if len(fs):
        kap = np.clip(cp[fs] / (m[fs] * rho), -1.0, 1.0)
        a0 = np.arctan2(n[fs, 1], n[fs, 0])
        dl = np.arccos(kap)
        psi = np.concatenate([a0 - dl, a0 + dl])
        ff = np.concatenate([fs, fs])
        pts = np.stack([r[0] + rho * np.cos(psi), r[1] + rho * np.sin(psi), np.full(len(psi), r[2] + uz)], 1)
        for k in range(len(psi)):
            if _tri_dist2_np(tris[ff[k]], pts[k], eps) <= eps * eps:
                out.append(psi[k] - psi0)
    if not out:
        return np.empty(0)
    out = np.mod(np.array(out), TWO_PI)
    out[out >= TWO_PI] = 0.0
    return np.sort(out)


def _tri_dist2_np(tri, q, eps):
    a, b, c = tri
    e1, e2 = b - a, c - a
    nrm = np.cross(e1, e2)
    nn = nrm @ nrm
    w = q - a
    pd = nrm @ w
    if nn > 0 and pd * pd > eps * eps * nn:
        return np.inf
    d00, d01, d11 = e1 @ e1, e1 @ e2, e2 @ e2
    d20, d21 = w @ e1, w @ e2
    den = d00 * d11 - d01 * d01
    v = (d11 * d20 - d01 * d21) / den
    ww = (d00 * d21 - d01 * d20) / den
    if v >= 0 and ww >= 0 and v + ww <= 1:
        return pd * pd / nn
    return float(min(_seg_dist2_np(q, a, b), _seg_dist2_np(q, b, c), _seg_dist2_np(q, c, a)))


def slice_arcs_np(tris, normals, offsets, r, u, eps_len, eps_ang, dirs):
    """Clustered events ``ca`` and arc states (arc k runs from ca[k] to the next event)."""
    ev = slice_point_events_np(tris, normals, offsets, r, u, eps_len)
    ca = []
    for e in ev:
        if not ca or e - ca[-1] > eps_ang:
            ca.append(float(e))
    if len(ca) >= 2 and (TWO_PI - ca[-1]) + ca[0] <= eps_ang:
        ca.pop()
    rho = math.hypot(u[0], u[1])
    psi0 = math.atan2(u[1], u[0])
    if not ca:
        q = np.asarray(r, float) + np.asarray(u, float)
        return ca, np.array([pip3d_np(tris, q[None], eps_len, dirs)[0] > 0])
    ca_arr = np.array(ca)
    nxt = np.append(ca_arr[1:], ca_arr[0] + TWO_PI)
    th = psi0 + 0.5 * (ca_arr + nxt)
    mids = np.stack([r[0] + rho * np.cos(th), r[1] + rho * np.sin(th), np.full(len(th), r[2] + u[2])], 1)
    return ca, pip3d_np(tris, mids, eps_len, dirs) > 0


def slice3d_np(tris, normals, offsets, V, r, phi, eps_len, eps_ang, dirs):
    from .fixed import _sweep  # shared circular sweep

    sphi, cphi = math.sin(phi), math.cos(phi)
    base = wrap = 0
    events = []
    for j, v in enumerate(np.asarray(V, float)):
        u = np.array([sphi * v[0] + cphi * v[2], v[1], -cphi * v[0] + sphi * v[2]])
        ca, arc = slice_arcs_np(tris, normals, offsets, r, u, eps_len, eps_ang, dirs)
        if not ca:
            base += bool(arc[0])
            continue
        if arc.all():
            base += 1
            continue
        wrap += bool(arc[-1])
        for k in range(len(ca)):
            if not arc[k - 1]:
                events.append((ca[k], 0, j))
            if not arc[k]:
                events.append((ca[k], 1, j))
    events.sort()
    sol, ne = _sweep(base, wrap, events, eps_ang)
    return sol.best_count, sol.witness_angle, ne


pip2d = pip2d_nb if USE_NUMBA else pip2d_np
pip3d = pip3d_nb if USE_NUMBA else pip3d_np
unit_roots = unit_roots_nb if USE_NUMBA else unit_roots_np
batch_unit_roots = batch_unit_roots_nb if USE_NUMBA else batch_unit_roots_np
oracle_fixed_kernel = oracle_fixed_nb if USE_NUMBA else oracle_fixed_np
slice3d = slice3d_nb if USE_NUMBA else slice3d_np
