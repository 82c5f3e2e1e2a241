import json
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_mesh_instance, random_star
from mcrkit import _kernels as K
from mcrkit.fixed import fixed_best_reference
from mcrkit.geometry import SimplePolygon

pytestmark = pytest.mark.skipif(K.numba is None, reason="numba not installed")


def test_pip2d_paths_agree():
    rng = np.random.default_rng(0)
    for _ in range(20):
        P = random_star(rng, int(rng.integers(3, 30)))
        Q = rng.uniform(-2, 2, (300, 2))
        # include the vertices and edge midpoints so the boundary code is exercised
        Q = np.vstack([Q, P.edges[:, :2], 0.5 * (P.edges[:, :2] + P.edges[:, 2:])])
        a, b = K.pip2d_nb(P.edges, Q, 1e-9), K.pip2d_np(P.edges, Q, 1e-9)
        assert np.array_equal(a, b)
        assert (a[-2 * len(P.edges):] == 1).all()


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=2, max_size=2))
def test_pip2d_square_property(q):
    E = SimplePolygon.from_rings([[0, 0], [1, 0], [1, 1], [0, 1]]).edges
    x, y = q
    expect = 2 if 0 < x < 1 and 0 < y < 1 else (0 if x < 0 or x > 1 or y < 0 or y > 1 else 1)
    code = K.pip2d_nb(E, np.array([q]), 1e-12)[0]
    if min(abs(x), abs(x - 1), abs(y), abs(y - 1)) > 1e-10:
        assert code == expect
    assert code == K.pip2d_np(E, np.array([q]), 1e-12)[0]


def test_pip3d_paths_agree():
    rng = np.random.default_rng(1)
    for _ in range(10):
        M, r, S = random_mesh_instance(rng)
        Q = np.vstack([rng.uniform(-1.5, 1.5, (400, 3)), M.vertices])
        a = K.pip3d_nb(M.triangles, Q, 1e-9, K.RAY_DIRS)
        b = K.pip3d_np(M.triangles, Q, 1e-9, K.RAY_DIRS)
        assert np.array_equal(a, b)
        assert (a[-len(M.vertices):] == 1).all()


def test_unit_roots_agree_and_are_roots():
    rng = np.random.default_rng(2)
    for _ in range(200):
        true = np.sort(rng.uniform(0.02, 0.98, int(rng.integers(1, 6))))
        c = np.polynomial.polynomial.polyfromroots(np.concatenate([true, rng.uniform(1.5, 3, 2)]))
        ra, _ = K.unit_roots_nb(c, 1e-14)
        rb, _ = K.unit_roots_np(c, 1e-14)
        # distinct true roots closer than this are legitimately merged
        if np.diff(true).min(initial=1) > 1e-4:
            assert np.allclose(np.sort(ra), true, atol=1e-9)
        assert np.allclose(np.sort(ra), np.sort(rb), atol=1e-9)
    coefs = rng.normal(size=(50, 17))
    va, oa = K.batch_unit_roots_nb(coefs, 1e-14)
    vb, ob = K.batch_unit_roots_np(coefs, 1e-14)
    for i in range(50):
        assert np.allclose(np.sort(va[oa == i]), np.sort(vb[ob == i]), atol=1e-9)


def test_fixed_and_oracle_kernels_agree():
    rng = np.random.default_rng(3)
    for _ in range(40):
        P = random_star(rng, int(rng.integers(3, 20)))
        S = rng.uniform(-2, 2, (int(rng.integers(1, 15)), 2))
        c = rng.uniform(-0.1, 0.1, 2)
        a = K.fixed_best_nb(P.edges, P.nxt, S, c, 1e-9, 1e-10)
        b = fixed_best_reference(P.edges, P.nxt, S, c, 1e-9, 1e-10)
        assert a[0] == b[0] and a[2] == b[2]
        o1 = K.oracle_fixed_nb(P.edges, S, c, 1e-9)
        o2 = K.oracle_fixed_np(P.edges, S, c, 1e-9)
        assert o1[0] == o2[0] == a[0]


def test_slice3d_agree():
    rng = np.random.default_rng(4)
    for _ in range(8):
        M, r, S = random_mesh_instance(rng)
        normals, offsets = M.planes
        W = np.ascontiguousarray(S - r)
        for phi in rng.uniform(-1.5, 1.5, 4):
            a = K.slice3d_nb(M.triangles, normals, offsets, W, r, phi, 1e-9, 1e-10, K.RAY_DIRS)
            b = K.slice3d_np(M.triangles, normals, offsets, W, r, phi, 1e-9, 1e-10, K.RAY_DIRS)
            assert a[0] == b[0]


def test_numpy_backend_via_environment(tmp_path):
    from mcrkit.generate import generate

    p = tmp_path / "i.json"
    p.write_text(json.dumps(generate("star", {"m": 12, "n": 15, "segment": True}, 5)))
    code = ("import json,sys; from mcrkit import _kernels as K; from mcrkit.cli import main;"
            "print(K.backend()); main(['solve','segment','--instance',sys.argv[1]])")
    out = {}
    for flag in ("1", "0"):
        env = dict(os.environ, MCRKIT_NO_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", code, str(p)], env=env, capture_output=True, text=True,
                             check=True)
        name, body = res.stdout.split("\n", 1)
        out[name] = json.loads(body)
    assert set(out) == {"numpy", "numba"}
    assert out["numpy"]["count"] == out["numba"]["count"]
