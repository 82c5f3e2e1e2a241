"""The rotation angle omega(x) as an algebraic function of the centre position.

Work happens in the canonical frame: the rotation centre is ``r = (x, 0)``
with ``x`` in ``[0, bx]``.  For a sub-edge ``u -> v`` and a point ``p`` the
orbit of ``p`` about ``r`` meets the edge line at ``q = u + lam * (v - u)``
with

    lam(x) = alpha(x) +/- sqrt(beta(x))            (deg alpha = 1, deg beta = 2)

and the angle carrying ``p`` to ``q`` satisfies

    cos omega = (gamma(x) + s * sqrt(delta(x))) / eps(x)   (degrees 2, 4, 2).

All polynomials are numpy coefficient arrays in ascending order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import _kernels as K
from .config import Tolerances
from .errors import DegenerateRay, NotCocircular, OverlappingCurves
from .geometry import TWO_PI

CASE_SAME_GE = "same_q_ge_p"
CASE_SAME_LT = "same_q_lt_p"
CASE_OPPOSITE = "opposite"


# --------------------------------------------------------------------------
# half-plane angles


def _upper_half(s, r, eps: float) -> bool:
    """Membership in the half-plane that is above the axis, or on it and right of r."""
    dy = s[1] - r[1]
    if abs(dy) <= eps:
        return s[0] > r[0]
    return dy > 0


def theta_angle(s, r, eps: float = 1e-12) -> float:
    """Angle in [0, pi) from the rightward ray (upper half) or leftward ray (lower half) to r->s."""
    dx, dy = s[0] - r[0], s[1] - r[1]
    d = math.hypot(dx, dy)
    if d <= eps:
        raise DegenerateRay("theta of the centre itself")
    if abs(dy) <= eps:
        return 0.0
    a = math.atan2(dy, dx)
    return a if dy > 0 else a + math.pi


def omega_case(p, q, r, eps: float = 1e-12) -> str:
    if _upper_half(p, r, eps) != _upper_half(q, r, eps):
        return CASE_OPPOSITE
    return CASE_SAME_GE if theta_angle(q, r, eps) >= theta_angle(p, r, eps) else CASE_SAME_LT


def omega_from_positions(p, q, r, eps: float = 1e-9) -> float:
    """Counterclockwise angle about ``r`` carrying ``p`` onto ``q``, via the half-plane angles."""
    dp = math.hypot(p[0] - r[0], p[1] - r[1])
    dq = math.hypot(q[0] - r[0], q[1] - r[1])
    if abs(dp - dq) > eps * max(1.0, dp):
        raise NotCocircular(f"|pr| = {dp} but |qr| = {dq}")
    tp, tq = theta_angle(p, r, eps * 1e-3), theta_angle(q, r, eps * 1e-3)
    case = omega_case(p, q, r, eps * 1e-3)
    if case == CASE_OPPOSITE:
        w = math.pi + tq - tp
    elif case == CASE_SAME_GE:
        w = tq - tp
    else:
        w = TWO_PI + tq - tp
    w %= TWO_PI
    return 0.0 if w >= TWO_PI else w


# --------------------------------------------------------------------------
# curves


def _pmul(a, b):
    return npoly.polymul(a, b)


def _padd(*ps):
    out = np.zeros(max(len(p) for p in ps))
    for p in ps:
        out[: len(p)] += p
    return out


def curve_polynomials(u, v, p) -> dict[str, np.ndarray]:
    """Coefficient arrays (ascending in x) of every polynomial attached to one (sub-edge, point)."""
    ux, uy = float(u[0]), float(u[1])
    dx, dy = float(v[0]) - ux, float(v[1]) - uy
    px, py = float(p[0]), float(p[1])
    L = dx * dx + dy * dy
    B = np.array([-(ux * dx + uy * dy), dx])                      # x*dx - u.d
    C = np.array([ux * ux + uy * uy - px * px - py * py, -2.0 * (ux - px)])
    A0 = np.array([ux * px + uy * py, -(ux + px), 1.0])
    A1 = np.array([dx * px + dy * py, -dx])
    disc = _padd(_pmul(B, B), -L * C)                              # B^2 - L C
    gamma = _padd(L * A0, _pmul(B, A1))
    delta = _pmul(_pmul(A1, A1), disc)
    eps = L * np.array([px * px + py * py, -2.0 * px, 1.0])
    # cross(d, (2x - px, -py) - u) = 0
    x_pi = None
    if abs(dy) > 1e-300:
        x_pi = 0.5 * (px + ux + dx * (-py - uy) / dy)
    return {
        "x_pi": x_pi,
        "alpha": B / L,
        "beta": disc / (L * L),
        "gamma": gamma,
        "delta": delta,
        "eps": eps,
        "A1": A1,
        "B": B,
        "C": C,
        "L": np.array([L]),
    }


@dataclass(frozen=True)
class OmegaCurve:
    """One connected piece of omega(x) for a (sub-edge, point) pair on a fixed lambda branch."""

    u: tuple
    v: tuple
    p: tuple
    point_index: int
    sub_edge: int
    branch_sign: int
    upper: bool                # omega in [pi, 2pi] when True, [0, pi] otherwise
    x_domain: tuple
    case: str
    alpha: np.ndarray = field(repr=False)
    beta: np.ndarray = field(repr=False)
    gamma: np.ndarray = field(repr=False)
    delta: np.ndarray = field(repr=False)
    eps: np.ndarray = field(repr=False)
    A1: np.ndarray = field(repr=False)
    L: float = field(repr=False, default=1.0)

    @property
    def sqrt_sign(self) -> int:
        """Sign in front of sqrt(delta) at the domain midpoint (it flips where A1 vanishes)."""
        xm = 0.5 * (self.x_domain[0] + self.x_domain[1])
        return int(self.branch_sign * (1 if npoly.polyval(xm, self.A1) >= 0 else -1))

    def lam(self, x):
        return npoly.polyval(x, self.alpha) + self.branch_sign * np.sqrt(np.maximum(npoly.polyval(x, self.beta), 0.0))

    def q(self, x):
        lam = self.lam(x)
        u, v = np.asarray(self.u), np.asarray(self.v)
        return u + np.multiply.outer(lam, v - u)

    def cos_omega(self, x):
        x = np.asarray(x, dtype=float)
        sb = np.sqrt(np.maximum(npoly.polyval(x, self.beta), 0.0))
        num = npoly.polyval(x, self.gamma) + self.branch_sign * npoly.polyval(x, self.A1) * self.L * sb
        return num / npoly.polyval(x, self.eps)

    def omega(self, x):
        """Vectorised evaluation ignoring the domain."""
        w = np.arccos(np.clip(self.cos_omega(x), -1.0, 1.0))
        return TWO_PI - w if self.upper else w


def _feasible_pieces(P, s, bx, tol: Tolerances):
    """Maximal x intervals in [0, bx] where the s-branch lambda is real and in [0, 1]."""
    beta, alpha = P["beta"], P["alpha"]
    L = P["L"][0]
    brk = [0.0, bx]
    for poly in (beta, P["C"], _padd(np.array([L]), -2.0 * P["B"], P["C"])):
        c = np.trim_zeros(poly, "b")
        if len(c) >= 2:
            for z in npoly.polyroots(c):
                if abs(z.imag) <= 1e-9 * (1 + abs(z.real)) and 0.0 < z.real < bx:
                    brk.append(float(z.real))
    # omega = pi exactly where the mirror 2r - p meets the edge line; the half-range flips there
    xpi = P.get("x_pi")
    if xpi is not None and 0.0 < xpi < bx:
        brk.append(xpi)
    brk = sorted(set(brk))

    def ok(x):
        b = npoly.polyval(x, beta)
        if b < 0:
            return False
        lam = npoly.polyval(x, alpha) + s * math.sqrt(b)
        return -1e-12 <= lam <= 1.0 + 1e-12

    pieces = []
    for lo, hi in zip(brk, brk[1:]):
        if hi - lo <= 1e-12 * max(bx, 1.0):
            continue
        if ok(0.5 * (lo + hi)):
            if pieces and pieces[-1][1] == lo and lo != xpi:
                pieces[-1][1] = hi
            else:
                pieces.append([lo, hi])
    return [tuple(pc) for pc in pieces]


def build_omega_curve(se, p, bx: float, tol: Tolerances | None = None, point_index: int = 0,
                      sub_edge: int = 0) -> list[OmegaCurve]:
    """All connected curve pieces of one sub-edge for point ``p``; empty when never hit.

    ``se`` is anything with ``u`` and ``v`` attributes (a :class:`SubEdge`) or a
    pair of points.
    """
    tol = tol or Tolerances()
    u, v = (se.u, se.v) if hasattr(se, "u") else se
    u = (float(u[0]), float(u[1]))
    v = (float(v[0]), float(v[1]))
    p = (float(p[0]), float(p[1]))
    P = curve_polynomials(u, v, p)
    out = []
    for s in (-1, 1):
        for lo, hi in _feasible_pieces(P, s, bx, tol):
            xm = 0.5 * (lo + hi)
            b = max(npoly.polyval(xm, P["beta"]), 0.0)
            lam = npoly.polyval(xm, P["alpha"]) + s * math.sqrt(b)
            q = (u[0] + lam * (v[0] - u[0]), u[1] + lam * (v[1] - u[1]))
            r = (xm, 0.0)
            cr = (p[0] - r[0]) * (q[1] - r[1]) - (p[1] - r[1]) * (q[0] - r[0])
            upper = cr < 0
            out.append(OmegaCurve(u, v, p, point_index, sub_edge, s, upper, (lo, hi), omega_case(p, q, r),
                                  P["alpha"], P["beta"], P["gamma"], P["delta"], P["eps"], P["A1"], float(P["L"][0])))
    out.sort(key=lambda c: c.x_domain)
    return out


def eval_omega_curve(c: OmegaCurve, x: float, slack: float = 1e-12):
    lo, hi = c.x_domain
    if x < lo - slack or x > hi + slack:
        return None
    return float(c.omega(min(max(x, lo), hi)))


# --------------------------------------------------------------------------
# pairwise intersections


def _shift(coef, lo, w):
    """Coefficients of c(lo + w t) in t (rows are polynomials, ascending)."""
    coef = np.atleast_2d(coef)
    n = coef.shape[1]
    out = np.zeros_like(coef)
    out[:, 0] = coef[:, -1]
    lin = np.stack([lo, w], axis=1) if np.ndim(lo) else np.array([[lo, w]])
    for k in range(n - 2, -1, -1):
        nxt = np.zeros_like(out)
        nxt[:, 1:] += out[:, :-1] * lin[:, 1:2]
        nxt += out * lin[:, 0:1]
        nxt[:, 0] += coef[:, k]
        out = nxt
    return out


def _bmul(a, b):
    out = np.zeros((a.shape[0], a.shape[1] + b.shape[1] - 1))
    for i in range(a.shape[1]):
        out[:, i:i + b.shape[1]] += a[:, i:i + 1] * b
    return out


def pair_polynomial(g1, d1, e1, g2, d2, e2):
    """Rows of the degree-16 polynomial whose roots contain every cos-omega coincidence."""
    G = _bmul(g1, e2) - _bmul(g2, e1)
    inner = _bmul(G, G) - _bmul(_bmul(e1, e1), d2) - _bmul(_bmul(e2, e2), d1)
    return _bmul(inner, inner) - 4.0 * _bmul(_bmul(_bmul(e1, e1), _bmul(e2, e2)), _bmul(d1, d2))


def _polish(a, b, cand, lo, hi, tol_omega, iters=60):
    """Move rejected candidates onto a bracketed zero of the true omega difference.

    The squared pair polynomial can be flat near a crossing, leaving a root
    a few 1e-7 off in x; a sign change of omega_a - omega_b nearby is a real
    crossing because each piece keeps one half-range.
    """
    cand = np.clip(cand, lo, hi)
    d = a.omega(cand) - b.omega(cand)
    pending = np.flatnonzero(np.abs(d) > tol_omega)
    if len(pending) == 0:
        return cand
    scale = max(hi - lo, 1e-300)
    for rel in (1e-7, 1e-6, 1e-5):
        if len(pending) == 0:
            break
        x = cand[pending]
        L = np.maximum(x - rel * scale, lo)
        R = np.minimum(x + rel * scale, hi)
        dl, dr = a.omega(L) - b.omega(L), a.omega(R) - b.omega(R)
        hit = np.sign(dl) * np.sign(dr) <= 0
        if hit.any():
            L, R, dl = L[hit], R[hit], dl[hit]
            for _ in range(iters):
                M = 0.5 * (L + R)
                dm = a.omega(M) - b.omega(M)
                left = np.sign(dm) * np.sign(dl) <= 0
                R = np.where(left, M, R)
                L = np.where(left, L, M)
                dl = np.where(left, dl, dm)
            cand[pending[hit]] = 0.5 * (L + R)
        pending = pending[~hit]
    return np.unique(cand)


def _probe_overlap(c1, c2, lo, hi, tol_omega):
    xs = np.linspace(lo, hi, 64)
    agree = np.abs(c1.omega(xs) - c2.omega(xs)) <= tol_omega
    return int(agree.sum())


def curve_pair_intersections(c1: OmegaCurve, c2: OmegaCurve, tol: Tolerances | None = None):
    """Crossings ``[(x, omega), ...]`` of two curves over their common x-domain."""
    tol = tol or Tolerances()
    res = batch_pair_intersections([c1], [c2], np.array([0]), np.array([0]), tol, check_overlap=True)
    return res[0]


def batch_pair_intersections(curves_a, curves_b, ia, ib, tol: Tolerances, check_overlap: bool = False):
    """Intersections for the pairs ``(curves_a[ia[k]], curves_b[ib[k]])``; returns a list per pair."""
    npairs = len(ia)
    out = [[] for _ in range(npairs)]
    if npairs == 0:
        return out
    A = [curves_a[i] for i in ia]
    B = [curves_b[i] for i in ib]
    lo = np.array([max(a.x_domain[0], b.x_domain[0]) for a, b in zip(A, B)])
    hi = np.array([min(a.x_domain[1], b.x_domain[1]) for a, b in zip(A, B)])
    same = np.array([a.upper == b.upper for a, b in zip(A, B)])
    live = np.flatnonzero((hi > lo) & same)
    if check_overlap:
        for k in live:
            if _probe_overlap(A[k], B[k], lo[k], hi[k], tol.tol_omega) > 40:
                raise OverlappingCurves("curves agree on more than 40 probe points")
    if len(live) == 0:
        return out
    w = hi[live] - lo[live]

    def stack(curves, name, n):
        rows = np.zeros((len(live), n))
        for j, k in enumerate(live):
            c = getattr(curves[k], name)
            rows[j, : len(c)] = c
        return _shift(rows, lo[live], w)

    g1, d1, e1 = stack(A, "gamma", 3), stack(A, "delta", 5), stack(A, "eps", 3)
    g2, d2, e2 = stack(B, "gamma", 3), stack(B, "delta", 5), stack(B, "eps", 3)
    F = pair_polynomial(g1, d1, e1, g2, d2, e2)
    scale = np.abs(F).max(axis=1, keepdims=True)
    scale[scale == 0] = 1.0
    vals, own = K.batch_unit_roots(np.ascontiguousarray(F / scale), 1e-14)
    if len(vals) == 0:
        return out
    xs = lo[live][own] + w[own] * vals
    for j in np.unique(own):
        k = live[j]
        a, b = A[k], B[k]
        cand = np.unique(xs[own == j])
        cand = _polish(a, b, cand, lo[k], hi[k], tol.tol_omega)
        wa, wb = a.omega(cand), b.omega(cand)
        good = np.abs(wa - wb) <= tol.tol_omega
        seen = []
        for x, om in zip(cand[good], 0.5 * (wa[good] + wb[good])):
            if seen and x - seen[-1][0] <= 1e-12 * max(1.0, abs(x)):
                continue
            seen.append((float(x), float(om)))
        out[k] = seen
    return out
