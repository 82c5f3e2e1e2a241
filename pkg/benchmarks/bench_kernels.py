"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--quick]

Both spellings are called directly, so the MCRKIT_NO_NUMBA flag does not
matter here.  The first numba call (compilation, or loading the on-disk cache)
is excluded from the timings.  Each row also checks that the two paths agree.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from mcrkit import _kernels as K
from mcrkit.fixed import fixed_best_reference
from mcrkit.generate import box_mesh, star_polygon
from mcrkit.geometry import SimplePolygon, TriMeshPolyhedron


def best_of(fn, repeat):
    fn()  # warm-up
    t = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        t = min(t, time.perf_counter() - t0)
    return t, out


def cases(quick: bool):
    rng = np.random.default_rng(7)
    m, n = (40, 40) if quick else (200, 200)
    P = SimplePolygon.from_rings(star_polygon(rng, m))
    E, nxt = np.ascontiguousarray(P.edges), np.ascontiguousarray(P.nxt)
    S = rng.uniform(-2, 2, (n, 2))
    c = np.array([0.05, -0.03])
    Q = rng.uniform(-2.5, 2.5, (20 * n, 2))
    eps = 1e-9

    yield ("pip2d", f"m={m} q={len(Q)}",
           lambda: K.pip2d_nb(E, Q, eps), lambda: K.pip2d_np(E, Q, eps), np.array_equal)
    yield ("fixed_best", f"m={m} n={n}",
           lambda: K.fixed_best_nb(E, nxt, S, c, eps, 1e-10)[0],
           lambda: fixed_best_reference(E, nxt, S, c, eps, 1e-10)[0], lambda a, b: a == b)
    small = S[: n // 4]
    yield ("oracle_fixed", f"m={m} n={len(small)}",
           lambda: K.oracle_fixed_nb(E, small, c, eps)[0], lambda: K.oracle_fixed_np(E, small, c, eps)[0],
           lambda a, b: a == b)

    coefs = rng.normal(size=(500 if quick else 2000, 17))
    yield ("batch_unit_roots", f"{len(coefs)} x deg16",
           lambda: K.batch_unit_roots_nb(coefs, 1e-14), lambda: K.batch_unit_roots_np(coefs, 1e-14),
           lambda a, b: all(np.allclose(x, y, atol=1e-9) for x, y in zip(a, b)))

    V, F = box_mesh([-1, -1, -1], [1, 1, 1], 1)
    M = TriMeshPolyhedron.from_arrays(V, F)
    tris = np.ascontiguousarray(M.triangles)
    Q3 = rng.uniform(-1.5, 1.5, (4000 if quick else 20000, 3))
    yield ("pip3d", f"f={len(tris)} q={len(Q3)}",
           lambda: K.pip3d_nb(tris, Q3, eps, K.RAY_DIRS), lambda: K.pip3d_np(tris, Q3, eps, K.RAY_DIRS),
           np.array_equal)

    normals, offsets = (np.ascontiguousarray(a) for a in M.planes)
    r = np.array([0.1, -0.2, 0.05])
    W = rng.uniform(-1.3, 1.3, (10, 3)) - r
    phis = np.linspace(-1.5, 1.5, 16 if quick else 64)
    yield ("slice3d", f"f={len(tris)} n={len(W)} slices={len(phis)}",
           lambda: [K.slice3d_nb(tris, normals, offsets, W, r, p, eps, 1e-10, K.RAY_DIRS)[0] for p in phis],
           lambda: [K.slice3d_np(tris, normals, offsets, W, r, p, eps, 1e-10, K.RAY_DIRS)[0] for p in phis],
           lambda a, b: list(a) == list(b))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args(argv)
    if K.numba is None:
        raise SystemExit("numba is not installed")
    print(f"{'kernel':<18} {'size':<26} {'numba ms':>10} {'numpy ms':>10} {'speedup':>8}  agree")
    rows = []
    for name, size, fnb, fnp, same in cases(args.quick):
        tn, a = best_of(fnb, args.repeat)
        tp, b = best_of(fnp, args.repeat)
        ok = bool(same(a, b))
        rows.append((name, tn, tp, ok))
        print(f"{name:<18} {size:<26} {1e3 * tn:>10.3f} {1e3 * tp:>10.3f} {tp / tn:>7.1f}x  {'yes' if ok else 'NO'}")
    return rows


if __name__ == "__main__":
    main()
