import dataclasses
import math
from collections import Counter

import numpy as np
import pytest

from conftest import random_segment_instance, random_star
from mcrkit.errors import DegenerateSegment, PointOnBoundary
from mcrkit.fixed import solve_fixed_baseline
from mcrkit.geometry import SimplePolygon
from mcrkit.omega import build_omega_curve
from mcrkit.oracle import count_at_rotation, oracle_segment
from mcrkit.segment import (
    _curves_for_point,
    canonicalize_frame,
    critical_x_values,
    solve_chain_mcr,
    solve_segment_mcr,
    split_edges_at_x_axis,
    subdivide_for_point,
)

BOX = SimplePolygon.from_rings([[-3, -3], [3, -3], [3, 3], [-3, 3]])


def has_edge(P, u, v):
    return any(np.allclose(e, [*u, *v]) or np.allclose(e, [*v, *u]) for e in P.edges)


def test_canonical_frame_examples():
    F, Q, S = canonicalize_frame((0, 0), (1, 0), BOX, [[0.5, 0.5]])
    assert np.allclose(F.rot, np.eye(2)) and F.bx == 1.0
    F, Q, S = canonicalize_frame((1, 1), (1, 3), BOX, [[1, 3]])
    assert np.allclose(S, [[2, 0]]) and F.bx == pytest.approx(2)
    assert F.determinant == pytest.approx(1)
    assert np.allclose(F.inverse(F.forward(BOX.outer)), BOX.outer)
    with pytest.raises(DegenerateSegment):
        canonicalize_frame((1, 1), (1, 1), BOX, [[0, 0]])


def test_frame_is_rigid():
    rng = np.random.default_rng(0)
    for _ in range(50):
        a, b = rng.uniform(-5, 5, 2), rng.uniform(-5, 5, 2)
        F, _, _ = canonicalize_frame(a, b, BOX, [[0, 0]])
        X = rng.uniform(-5, 5, (10, 2))
        Y = F.forward(X)
        assert np.allclose(np.linalg.norm(X[:, None] - X[None], axis=2), np.linalg.norm(Y[:, None] - Y[None], axis=2))
        assert np.allclose(F.forward(b), (F.bx, 0))


def test_split_at_axis_examples():
    P = SimplePolygon.from_rings([[0, -1], [2, -1], [2, 2], [0, 1]])
    Q = split_edges_at_x_axis(P)
    assert has_edge(Q, (0, 1), (0, 0)) and has_edge(Q, (0, 0), (0, -1))
    assert has_edge(Q, (2, 2), (0, 1))
    T = split_edges_at_x_axis(SimplePolygon.from_rings([[0, 0], [1, 1], [-1, 1]]))
    assert has_edge(T, (0, 0), (1, 1)) and len(T.edges) == 3
    assert len(Q.edges) <= 2 * len(P.edges)


def test_subdivision_disjoint_edge_unchanged():
    P = SimplePolygon.from_rings([[5, 5], [6, 5], [6, 6], [5, 6]])
    subs = subdivide_for_point(P, (0.5, 0.2), 1.0)
    assert len(subs) == 4


def test_subdivision_pp_mirror_example():
    # p = (0,1), a = (0,0), b = (2,0); the edge y = 0.5 crosses p p' at (0, 0.5)
    P = SimplePolygon.from_rings([[-3, 0.5], [5, 0.5], [5, 3], [-3, 3]])
    subs = [s for s in subdivide_for_point(P, (0.0, 1.0), 2.0) if s.parent == 0]
    ends = {round(x, 12) for s in subs for x in (s.u[0], s.v[0])}
    assert 0.0 in ends and len(subs) <= 5
    pts = sorted([s.u, s.v] for s in subs)
    assert math.isclose(sum(math.dist(*uv) for uv in pts), 8.0)


def test_point_on_boundary():
    with pytest.raises(PointOnBoundary):
        subdivide_for_point(BOX, (3.0, 0.5), 1.0)


def subdivision_check(rng, configs):
    two_hit = half_bad = 0
    max_pieces = 0
    done = 0
    while done < configs:
        P = random_star(rng, rng.integers(3, 11), rng.uniform(-1, 1, 2))
        a, b, p = rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 2), rng.uniform(-2, 2, 2)
        F, Q, S2 = canonicalize_frame(a, b, P, p[None])
        Q = split_edges_at_x_axis(Q)
        try:
            subs = subdivide_for_point(Q, S2[0], F.bx)
        except PointOnBoundary:
            continue
        done += 1
        max_pieces = max(max_pieces, max(Counter(s.parent for s in subs).values()))
        xs = rng.uniform(0, F.bx, 1000)
        pp = S2[0]
        R = np.c_[xs, 0 * xs]
        R2 = ((pp - R) ** 2).sum(1)
        for s in subs:
            u, v = np.array(s.u), np.array(s.v)
            d = v - u
            f = u - R
            A, Bh = d @ d, f @ d
            disc = Bh * Bh - A * ((f * f).sum(1) - R2)
            ok = disc >= 0
            sq = np.sqrt(np.where(ok, disc, 0))
            t1, t2 = (-Bh - sq) / A, (-Bh + sq) / A
            two_hit += int((ok & (t1 >= 0) & (t2 <= 1) & ((t2 - t1) * math.sqrt(A) > 1e-9)).sum())
            oms = []
            for t in (t1, t2):
                h = ok & (t >= 0) & (t <= 1)
                q = u + t[h, None] * d
                a_, b_ = pp - R[h], q - R[h]
                oms.extend(np.arctan2(a_[:, 0] * b_[:, 1] - a_[:, 1] * b_[:, 0], (a_ * b_).sum(1)) % (2 * np.pi))
            oms = np.array(oms)
            if len(oms):
                lo_ok = (np.where(oms > 2 * np.pi - 1e-7, 0, oms) <= np.pi + 1e-7).all()
                hi_ok = (np.where(oms < 1e-7, 2 * np.pi, oms) >= np.pi - 1e-7).all()
                half_bad += not (lo_ok or hi_ok)
    return two_hit, half_bad, max_pieces


def test_subdivision_invariants_sampled():
    two_hit, half_bad, max_pieces = subdivision_check(np.random.default_rng(21), 40)
    assert two_hit == 0 and half_bad == 0 and max_pieces <= 5


def test_sub_edges_cover_original():
    rng = np.random.default_rng(4)
    P = split_edges_at_x_axis(random_star(rng, 8))
    subs = subdivide_for_point(P, (0.3, 0.4), 1.0)
    for e, row in enumerate(P.edges):
        L = math.dist(row[:2], row[2:])
        assert sum(math.dist(s.u, s.v) for s in subs if s.parent == e) == pytest.approx(L, abs=1e-9)


def test_mirror_identities():
    rng = np.random.default_rng(6)
    for _ in range(200):
        bx = rng.uniform(0.5, 3)
        p = np.array([rng.uniform(0, bx), rng.uniform(-2, 2)])
        pm = p * [1, -1]
        for x in rng.uniform(0, bx, 3):
            r = np.array([x, 0])
            assert abs(np.linalg.norm(pm - r) - np.linalg.norm(p - r)) < 1e-12
        # p' lies on a'b' when p.x is within [a.x, b.x]
        a2, b2 = -p, np.array([2 * bx, 0]) - p
        cross = (b2 - a2)[0] * (pm - a2)[1] - (b2 - a2)[1] * (pm - a2)[0]
        assert abs(cross) < 1e-9
        assert a2[0] - 1e-12 <= pm[0] <= b2[0] + 1e-12


def test_critical_values_examples():
    assert critical_x_values([], 2.0) == [0.0, 2.0]
    (c,) = build_omega_curve(((-1.0, 0.0), (0.0, 0.0)), (1.0, 0.0), 2.0)
    c = dataclasses.replace(c, x_domain=(0.2, 0.7))
    assert critical_x_values([c], 2.0) == [0.0, 0.2, 0.7, 2.0]


def test_critical_values_cardinality():
    rng = np.random.default_rng(8)
    P, S, a, b = random_segment_instance(rng)
    F, Q, S2 = canonicalize_frame(a, b, P, S)
    Q = split_edges_at_x_axis(Q)
    curves = [c for j, p in enumerate(S2) for c in _curves_for_point(Q, p, j, F.bx, None)]
    xs = critical_x_values(curves, F.bx)
    n = len(curves)
    assert xs == sorted(xs) and xs[0] == 0.0 and xs[-1] == F.bx
    assert len(xs) <= 2 + 2 * n + 32 * n * (n - 1) // 2


def test_segment_degenerate_delegates():
    rng = np.random.default_rng(1)
    P, S, a, _ = random_segment_instance(rng)
    sol = solve_segment_mcr(P, S, a, a)
    assert sol.count == solve_fixed_baseline(P, a, S).best_count


def test_segment_all_inside():
    S = np.array([[0.1, 0.2], [-0.3, 0.1]])
    sol = solve_segment_mcr(BOX, S, (-0.5, 0), (0.5, 0.3))
    assert sol.count == 2


def test_segment_matches_grid_and_recounts():
    rng = np.random.default_rng(33)
    for _ in range(15):
        P, S, a, b = random_segment_instance(rng)
        sol = solve_segment_mcr(P, S, a, b)
        assert count_at_rotation(P, sol.center_star, S, sol.omega_star) == sol.count
        g = oracle_segment(P, S, a, b, 512)
        assert sol.count >= g.best_count


def test_chain_rules():
    rng = np.random.default_rng(5)
    P, S, a, b = random_segment_instance(rng)
    one = solve_segment_mcr(P, S, a, b)
    assert solve_chain_mcr(P, S, [a, b]).count == one.count
    assert solve_chain_mcr(P, S, [(a, b), (a, b)]).count == one.count
    c, d = rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 2)
    chain = solve_chain_mcr(P, S, [a, b, c, d])
    best = max(solve_segment_mcr(P, S, *seg).count for seg in [(a, b), (b, c), (c, d)])
    assert chain.count == best
    assert count_at_rotation(P, chain.center_star, S, chain.omega_star) == chain.count
