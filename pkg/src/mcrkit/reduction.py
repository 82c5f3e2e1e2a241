"""Segments-containing-points (SCP) instances turned into fixed-centre MCR instances.

SCP asks whether some shift ``u`` puts every value of ``A + u`` inside the
union of the closed intervals ``B``.  The reals are wrapped onto half of a
circle ``C`` about the origin; the polygon reaches out exactly onto ``C``
over the images of ``B`` and stays well inside ``C`` elsewhere, so a rotation
covers all of ``A`` iff a valid shift exists.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import InvalidSCP
from .geometry import SimplePolygon

# largest angular step of the inner-circle chords
_CHORD_STEP = math.pi / 24
_INNER = 0.5


def _check(A, B):
    A = [float(a) for a in A]
    B = [(float(s), float(e)) for s, e in B]
    if not A or not B:
        raise InvalidSCP("A and B must be nonempty")
    if not all(map(math.isfinite, A + [x for iv in B for x in iv])):
        raise InvalidSCP("non-finite value")
    for s, e in B:
        if s > e:
            raise InvalidSCP(f"interval [{s}, {e}] has start > end")
    Bs = sorted(B)
    for (s1, e1), (s2, e2) in zip(Bs, Bs[1:]):
        if s2 <= e1:
            raise InvalidSCP(f"intervals [{s1}, {e1}] and [{s2}, {e2}] overlap")
    return A, Bs


def scp_window(A, B) -> tuple[float, float]:
    """Padded real window I holding A and B; its image is strictly inside a half circle."""
    vals = list(A) + [x for iv in B for x in iv]
    lo, hi = min(vals), max(vals)
    pad = 0.1 * (hi - lo) if hi > lo else 1.0
    return lo - pad, hi + pad


def reduce_scp_to_mcr(A, B):
    """Return ``(P, r, S)`` with ``r = (0, 0)``; best coverage equals ``len(A)`` iff SCP says yes."""
    A, B = _check(A, B)
    lo, hi = scp_window(A, B)
    width = hi - lo
    Rc = width / math.pi  # perimeter 2|I|
    rin = _INNER * Rc

    def ang(t):
        return math.pi * (t - lo) / width

    def polar(rad, a):
        return (rad * math.cos(a), rad * math.sin(a))

    S = np.array([polar(Rc, ang(a)) for a in A])
    blocks = [(ang(s), ang(e)) for s, e in B]
    # half the smallest angular gap between blocks bounds the spike width of point intervals
    gaps = [b2[0] - b1[1] for b1, b2 in zip(blocks, blocks[1:])]
    gaps.append(blocks[0][0] + 2 * math.pi - blocks[-1][1])
    eta = min(0.25 * min(gaps), 1e-3)

    ring = []
    for k, (s, e) in enumerate(blocks):
        if e > s:
            ring.append(polar(rin, s))
            ring.append(polar(Rc, s))
            half = 0.5 * (e - s)
            ring.append(polar(Rc / math.cos(half), s + half))
            ring.append(polar(Rc, e))
            ring.append(polar(rin, e))
            lo_arc = e
        else:
            ring.append(polar(rin, s - eta))
            ring.append(polar(Rc, s))
            ring.append(polar(rin, s + eta))
            lo_arc = s + eta
        nxt = blocks[(k + 1) % len(blocks)][0]
        nxt -= eta if blocks[(k + 1) % len(blocks)][1] == nxt else 0.0
        if k == len(blocks) - 1:
            nxt += 2 * math.pi
        steps = max(1, math.ceil((nxt - lo_arc) / _CHORD_STEP))
        for i in range(1, steps):
            ring.append(polar(rin, lo_arc + (nxt - lo_arc) * i / steps))
    P = SimplePolygon.from_rings(np.array(ring))
    return P, (0.0, 0.0), S


def scp_brute_force(A, B, tol: float = 1e-12) -> bool:
    """Decide SCP by trying every shift that moves some value of A onto some interval endpoint."""
    A, B = _check(A, B)
    Bs = np.array(B)
    Aa = np.array(A)
    for s, e in B:
        for end in (s, e):
            for a in A:
                x = Aa + (end - a)
                inside = ((x[:, None] >= Bs[None, :, 0] - tol) & (x[:, None] <= Bs[None, :, 1] + tol)).any(axis=1)
                if inside.all():
                    return True
    return False
