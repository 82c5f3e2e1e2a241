import dataclasses
import math

import numpy as np
import pytest

from conftest import ang_dist
from mcrkit.errors import DegenerateRay, NotCocircular, OverlappingCurves
from mcrkit.omega import (
    build_omega_curve,
    curve_pair_intersections,
    eval_omega_curve,
    omega_from_positions,
    theta_angle,
)


def direct_omega(p, q, x):
    a = np.subtract(p, (x, 0.0))
    b = np.subtract(q, (x, 0.0))
    return math.atan2(a[0] * b[1] - a[1] * b[0], a @ b) % (2 * math.pi)


def random_curves(rng, count):
    out = []
    while len(out) < count:
        u, v = rng.uniform(-3, 3, 2), rng.uniform(-3, 3, 2)
        if u[1] * v[1] < 0:
            v[1] = -v[1]
        p = rng.uniform(-3, 3, 2)
        bx = rng.uniform(0.5, 3)
        out.extend((c, bx) for c in build_omega_curve((u, v), p, bx))
    return out[:count]


def test_theta_angle():
    assert theta_angle((3.0, 0.0), (2.0, 0.0)) == 0.0
    assert theta_angle((2.0, 1.0), (2.0, 0.0)) == pytest.approx(math.pi / 2)
    assert theta_angle((2.0, -1.0), (2.0, 0.0)) == pytest.approx(math.pi / 2)
    with pytest.raises(DegenerateRay):
        theta_angle((1, 1), (1, 1))


def test_theta_cos_sin_identity():
    rng = np.random.default_rng(0)
    for s in rng.uniform(-2, 2, (200, 2)):
        t = theta_angle(s, (0.0, 0.0))
        d = math.hypot(*s)
        assert 0 <= t < math.pi
        assert math.cos(t) == pytest.approx(s[0] / d * math.copysign(1, s[1]), abs=1e-12)
        assert math.sin(t) == pytest.approx(abs(s[1]) / d, abs=1e-12)


def test_omega_from_positions():
    assert omega_from_positions((1, 0), (-1, 0), (0, 0)) == pytest.approx(math.pi)
    assert omega_from_positions((0, 1), (0, -1), (0, 0)) == pytest.approx(math.pi)
    assert omega_from_positions((1, 0), (0, 1), (0, 0)) == pytest.approx(math.pi / 2)
    with pytest.raises(NotCocircular):
        omega_from_positions((1, 0), (0, 2), (0, 0))


def test_omega_from_positions_matches_atan2():
    rng = np.random.default_rng(1)
    for _ in range(500):
        r = np.array([rng.uniform(-1, 1), 0.0])
        p = rng.uniform(-2, 2, 2)
        t = rng.uniform(0, 2 * math.pi)
        c, s = math.cos(t), math.sin(t)
        q = r + np.array([[c, -s], [s, c]]) @ (p - r)
        assert ang_dist(omega_from_positions(p, q, r), direct_omega(p, q, r[0])) < 1e-9


def test_diameter_example():
    (c,) = build_omega_curve(((-1.0, 0.0), (0.0, 0.0)), (1.0, 0.0), 2.0)
    assert eval_omega_curve(c, 0.25) == pytest.approx(math.pi, abs=1e-9)
    assert np.allclose(c.q(0.25), (-0.5, 0.0))
    mid = 0.5 * sum(c.x_domain)
    assert eval_omega_curve(c, mid) == pytest.approx(math.pi, abs=1e-9)
    assert eval_omega_curve(c, c.x_domain[1] + 0.1) is None


def test_never_hit_sub_edge_is_empty():
    assert build_omega_curve(((10.0, 5.0), (11.0, 5.0)), (0.5, 0.5), 1.0) == []


def test_clamped_argument():
    (c,) = build_omega_curve(((-1.0, 0.0), (0.0, 0.0)), (1.0, 0.0), 2.0)
    one = dataclasses.replace(c, gamma=c.eps * (1 + 1e-12), A1=0 * c.A1)
    w = eval_omega_curve(one, 0.25)
    assert w in (0.0, 2 * math.pi)


def test_eval_matches_geometry():
    rng = np.random.default_rng(1)
    worst = 0.0
    for c, bx in random_curves(rng, 200):
        for x in np.linspace(*c.x_domain, 20):
            q = c.q(x)
            assert abs(math.dist(c.p, (x, 0)) - math.dist(q, (x, 0))) < 1e-7
            worst = max(worst, ang_dist(eval_omega_curve(c, x), direct_omega(c.p, q, x)))
        # a fixed half-range per piece
        ws = c.omega(np.linspace(*c.x_domain, 50))
        assert (ws >= math.pi - 1e-7).all() if c.upper else (ws <= math.pi + 1e-7).all()
    assert worst <= 1e-7


def test_pair_disjoint_domains():
    (c,) = build_omega_curve(((-1.0, 0.0), (0.0, 0.0)), (1.0, 0.0), 2.0)
    a = dataclasses.replace(c, x_domain=(0.0, 0.4))
    b = dataclasses.replace(c, x_domain=(0.5, 0.9))
    assert curve_pair_intersections(a, b) == []


def test_pair_identical_raises():
    rng = np.random.default_rng(3)
    c, _ = random_curves(rng, 1)[0]
    with pytest.raises(OverlappingCurves):
        curve_pair_intersections(c, c)


def test_pair_crossings_against_sign_scan():
    rng = np.random.default_rng(2)
    pairs = []
    while len(pairs) < 120:
        bx = rng.uniform(0.5, 3)
        cs = []
        for _ in range(2):
            u, v = rng.uniform(-3, 3, 2), rng.uniform(-3, 3, 2)
            if u[1] * v[1] < 0:
                v[1] = -v[1]
            cs.append(build_omega_curve((u, v), rng.uniform(-3, 3, 2), bx))
        pairs += [(a, b) for a in cs[0] for b in cs[1]
                  if a.upper == b.upper and min(a.x_domain[1], b.x_domain[1]) > max(a.x_domain[0], b.x_domain[0])]
    for a, b in pairs:
        res = curve_pair_intersections(a, b)
        assert len(res) <= 32
        for x, w in res:
            assert ang_dist(eval_omega_curve(a, x), w) <= 1e-7
            assert ang_dist(eval_omega_curve(b, x), w) <= 1e-7
        lo, hi = max(a.x_domain[0], b.x_domain[0]), min(a.x_domain[1], b.x_domain[1])
        xs = np.linspace(lo, hi, 10_000)
        d = a.omega(xs) - b.omega(xs)
        h = xs[1] - xs[0]
        for i in np.flatnonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0):
            assert any(xs[i] - h - 1e-12 <= x <= xs[i + 1] + h + 1e-12 for x, _ in res)
