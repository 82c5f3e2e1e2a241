"""mcrkit command line.

    mcrkit gen comb --param teeth=8 --seed 1 --out comb.json
    mcrkit solve fixed --instance comb.json --algo sensitive --out res.json --svg scene.svg
    mcrkit verify --instance comb.json --result res.json
    mcrkit bench --sizes 8,16,32,64

Exit codes: 0 ok, 1 verify mismatch, 2 schema error, 3 degenerate or
infeasible input, 4 internal invariant violation.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .config import Tolerances, resolve
from .errors import DegenerateInput, IncompatibleMode, InvalidGeometry, InvalidParams, InvalidSCP, \
    InvariantViolation, SchemaError
from .generate import KINDS as GEN_KINDS, comb_polygon, generate
from .geometry import SimplePolygon, points_in_polyhedron
from .io import dumps, instance_from_doc, load_instance, load_result, save_result

log = logging.getLogger("mcrkit")

EXIT_OK, EXIT_MISMATCH, EXIT_SCHEMA, EXIT_DEGENERATE, EXIT_INVARIANT = 0, 1, 2, 3, 4

SOLVE_KINDS = {"fixed": ("fixed2d", "scp"), "segment": ("segment2d",), "chain": ("chain2d",), "3d": ("fixed3d",)}


def _setup_logging():
    lvl = os.environ.get("MCRKIT_LOG", "WARNING").strip().upper()
    level = int(lvl) if lvl.isdigit() else getattr(logging, lvl, logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def _tolerances(args, inst) -> Tolerances:
    t = inst.tolerances
    return Tolerances(eps_len=args.eps_len if args.eps_len is not None else t.eps_len,
                      eps_ang=args.eps_ang if args.eps_ang is not None else t.eps_ang)


def _fixed_geometry(inst):
    """(P, r, S) for a fixed-centre 2D instance, building the gadget for SCP documents."""
    if inst.kind == "scp":
        from .reduction import reduce_scp_to_mcr

        return reduce_scp_to_mcr(inst.doc["A"], inst.doc["B"])
    return inst.polygon, inst.center, inst.points


def _need(inst, family):
    if inst.kind not in SOLVE_KINDS[family]:
        raise IncompatibleMode(f"'{family}' needs a {' or '.join(SOLVE_KINDS[family])} instance, got {inst.kind}")
    if inst.kind in ("fixed2d", "fixed3d") and inst.center is None:
        raise SchemaError("missing center", "/center")


def _pair(c):
    return [float(c[0]), float(c[1])]


def _solve(args, inst) -> dict:
    from . import fixed, mcr3d, segment

    fam = args.family
    _need(inst, fam)
    tol = _tolerances(args, inst)
    out = {"kind": inst.kind, "k": None, "answer": None}
    cfg = {"family": fam, "parallel": bool(args.parallel)}
    if fam == "fixed":
        P, r, S = _fixed_geometry(inst)
        tol = resolve(tol, P.vertices, S, [r])
        if args.algo == "sensitive":
            sol, k = fixed.solve_fixed_output_sensitive(P, r, S, tol)
        else:
            sets, tol = fixed.fixed_interval_sets(P, r, S, tol, args.parallel)
            sol = fixed.sweep_max_coverage(sets, tol)
            k = sum(len(s.events) for s in sets)
        cfg["algo"] = args.algo
        out.update(solver=f"fixed-{args.algo}", count=int(sol.best_count), k=int(k),
                   witness={"center": _pair(r), "theta": float(sol.witness_angle)})
        if inst.kind == "scp":
            out["answer"] = bool(sol.best_count == len(inst.doc["A"]))
    elif fam in ("segment", "chain"):
        P, S = inst.polygon, inst.points
        if fam == "segment":
            a, b = inst.segment
            tol = resolve(tol, P.vertices, S, [a, b])
            sol = segment.solve_segment_mcr(P, S, a, b, tol, args.parallel)
        else:
            tol = resolve(tol, P.vertices, S, inst.chain)
            sol = segment.solve_chain_mcr(P, S, inst.chain, tol, args.parallel)
        w = {"center": _pair(sol.center_star), "theta": float(sol.omega_star), "x": float(sol.x_star)}
        if getattr(sol, "segment_index", None) is not None:
            w["segment_index"] = int(sol.segment_index)
        out.update(solver=f"{fam}-arrangement", count=int(sol.count), witness=w)
        cfg.update(n_critical=int(sol.n_critical), n_curves=int(sol.n_curves))
    else:
        M, r, S = inst.mesh, inst.center, inst.points
        tol = resolve(tol, M.vertices, S, [r])
        sol = mcr3d.solve_3d_fixed_mcr(M, r, S, tol, grid=args.grid or 4096, parallel=args.parallel)
        out.update(solver="3d-latitude-scan", count=int(sol.count),
                   witness={"theta": float(sol.theta_star), "phi": float(sol.phi_star)})
        cfg.update(grid=int(args.grid or 4096), n_slices=int(sol.n_slices))
    cfg["tolerances"] = tol.to_dict()
    out["config"] = cfg
    return out


def _oracle(args, inst) -> dict:
    from . import oracle

    fam = args.family
    _need(inst, fam)
    tol = _tolerances(args, inst)
    out = {"kind": inst.kind, "k": None, "answer": None}
    cfg = {"family": fam}
    if fam == "fixed":
        P, r, S = _fixed_geometry(inst)
        rep = oracle.oracle_fixed(P, r, S, tol)
        if inst.kind == "scp":
            out["answer"] = bool(rep.best_count == len(inst.doc["A"]))
        w = {"center": list(rep.witness["center"]), "theta": rep.witness["theta"]}
    elif fam == "segment":
        G = args.grid or 256
        a, b = inst.segment
        rep = oracle.oracle_segment(inst.polygon, inst.points, a, b, G, tol)
        w = {"center": list(rep.witness["center"]), "theta": rep.witness["theta"]}
        cfg["grid"] = G
    else:
        k = args.samples or 100_000
        rep = oracle.oracle_3d(inst.mesh, inst.center, inst.points, k, tol)
        w = dict(rep.witness)
        cfg["samples"] = k
    cfg["n_candidates"] = int(rep.n_candidates)
    out.update(solver=f"oracle-{rep.method}", count=int(rep.best_count), witness=w, config=cfg)
    return out


def recount(inst, result: dict, tol: Tolerances | None = None) -> int:
    """Count of points covered at the witness stored in ``result``."""
    from .mcr3d import rotation_from_direction
    from .oracle import count_at_rotation

    w = result["witness"]
    tol = tol or inst.tolerances
    if inst.kind == "fixed3d":
        R = rotation_from_direction(w["theta"], w["phi"])
        S = inst.points
        t = resolve(tol, inst.mesh.vertices, S, [inst.center])
        return int(points_in_polyhedron(inst.mesh, R.apply(S, inst.center), t.length).sum())
    P, r, S = _fixed_geometry(inst)
    if inst.kind in ("segment2d", "chain2d"):
        r = np.asarray(w["center"], dtype=float)
    return count_at_rotation(P, r, S, float(w["theta"]), tol)


def _ordered(doc: dict) -> dict:
    keys = ("solver", "kind", "count", "witness", "k", "answer", "wall_time", "config")
    return {k: doc[k] for k in keys if k in doc}


def _emit(args, inst, res):
    res = _ordered(res)
    if args.out:
        save_result(args.out, res)
    else:
        sys.stdout.write(dumps(res))
    if getattr(args, "svg", None):
        _write_svg(args.svg, inst, res, "scene")


def _write_svg(path, inst, res, mode):
    from .render import render_svg

    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_svg(inst, res, mode))


def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    t0 = time.perf_counter()
    res = _solve(args, inst)
    res["wall_time"] = time.perf_counter() - t0
    log.info("%s: count %d in %.3fs", res["solver"], res["count"], res["wall_time"])
    _emit(args, inst, res)
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = load_instance(args.instance)
    t0 = time.perf_counter()
    res = _oracle(args, inst)
    res["wall_time"] = time.perf_counter() - t0
    _emit(args, inst, res)
    return EXIT_OK


def _param_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def cmd_gen(args) -> int:
    params = {}
    if args.params:
        params.update(json.loads(args.params))
    for kv in args.param or []:
        if "=" not in kv:
            raise InvalidParams(f"--param expects key=value, got {kv!r}")
        k, v = kv.split("=", 1)
        params[k] = _param_value(v)
    doc = generate(args.kind, params, args.seed)
    instance_from_doc(doc)
    text = dumps(doc)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_render(args) -> int:
    from .render import render_svg

    inst = load_instance(args.instance)
    res = load_result(args.result) if args.result else None
    svg = render_svg(inst, res, args.mode)
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(svg)
    else:
        sys.stdout.write(svg)
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = load_instance(args.instance)
    res = load_result(args.result)
    if res["kind"] != inst.kind:
        raise IncompatibleMode(f"result is for {res['kind']}, instance is {inst.kind}")
    got = recount(inst, res, _tolerances(args, inst))
    ok = got == res["count"]
    print(f"{'OK' if ok else 'MISMATCH'}: stored count {res['count']}, recount {got}")
    return EXIT_OK if ok else EXIT_MISMATCH


def bench_table(sizes, repeat: int = 3, points: int = 1):
    """Best-of-``repeat`` wall times of the two fixed-centre solvers on combs."""
    from .fixed import solve_fixed_baseline, solve_fixed_output_sensitive

    rows = []
    for t in sizes:
        doc = generate("comb", {"teeth": int(t), "points": points}, 0)
        P = SimplePolygon.from_rings(doc["polygon"]["outer"])
        r, S = np.zeros(2), np.asarray(doc["points"])
        tb, ts = math.inf, math.inf
        for _ in range(repeat):
            t0 = time.perf_counter()
            a = solve_fixed_baseline(P, r, S)
            tb = min(tb, time.perf_counter() - t0)
            t0 = time.perf_counter()
            b, k = solve_fixed_output_sensitive(P, r, S)
            ts = min(ts, time.perf_counter() - t0)
        if a.best_count != b.best_count:
            raise InvariantViolation(f"comb t={t}: baseline {a.best_count} != sensitive {b.best_count}")
        rows.append({"teeth": int(t), "m": len(P.vertices), "n": len(S), "k": int(k), "count": int(a.best_count),
                     "baseline_s": tb, "sensitive_s": ts})
    return rows


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    rows = bench_table(sizes, args.repeat, args.points)
    print(f"{'teeth':>6} {'m':>6} {'n':>4} {'k':>7} {'count':>5} {'baseline ms':>12} {'sensitive ms':>13}")
    for r in rows:
        print(f"{r['teeth']:>6} {r['m']:>6} {r['n']:>4} {r['k']:>7} {r['count']:>5} "
              f"{1e3 * r['baseline_s']:>12.3f} {1e3 * r['sensitive_s']:>13.3f}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(dumps({"rows": rows}))
    return EXIT_OK


def _common(p, solve=False):
    p.add_argument("--instance", required=True, help="instance JSON file")
    p.add_argument("--out", help="write the result JSON here instead of stdout")
    p.add_argument("--svg", help="also write a scene SVG")
    p.add_argument("--eps-len", type=float, default=None)
    p.add_argument("--eps-ang", type=float, default=None)
    p.add_argument("--seed", type=int, default=None, help="accepted for symmetry; solvers are deterministic")
    p.add_argument("--grid", type=int, default=None, help="segment oracle grid size G or 3D solver grid")
    if solve:
        p.add_argument("--algo", choices=("baseline", "sensitive"), default="baseline")
        p.add_argument("--parallel", action="store_true")
    else:
        p.add_argument("--samples", type=int, default=None, help="3D oracle direction samples")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mcrkit", description="Maximum cover under rotation")
    ap.add_argument("--version", action="version", version=f"mcrkit {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True)

    ps = sub.add_parser("solve", help="run a solver")
    ps.add_argument("family", choices=tuple(SOLVE_KINDS))
    _common(ps, solve=True)
    ps.set_defaults(fn=cmd_solve)

    po = sub.add_parser("oracle", help="run a brute-force oracle")
    po.add_argument("family", choices=("fixed", "segment", "3d"))
    _common(po)
    po.set_defaults(fn=cmd_oracle)

    pg = sub.add_parser("gen", help="generate an instance")
    pg.add_argument("kind", choices=GEN_KINDS)
    pg.add_argument("--param", action="append", metavar="KEY=VALUE")
    pg.add_argument("--params", help="JSON object of generator parameters")
    pg.add_argument("--seed", type=int, default=0)
    pg.add_argument("--out")
    pg.set_defaults(fn=cmd_gen)

    pr = sub.add_parser("render", help="write an SVG figure")
    pr.add_argument("--instance", required=True)
    pr.add_argument("--result")
    pr.add_argument("--mode", choices=("scene", "events", "curves"), default="scene")
    pr.add_argument("--svg")
    pr.set_defaults(fn=cmd_render)

    pv = sub.add_parser("verify", help="recount a stored result")
    pv.add_argument("--instance", required=True)
    pv.add_argument("--result", required=True)
    pv.add_argument("--eps-len", type=float, default=None)
    pv.add_argument("--eps-ang", type=float, default=None)
    pv.set_defaults(fn=cmd_verify)

    pb = sub.add_parser("bench", help="baseline vs output-sensitive timings on combs")
    pb.add_argument("--sizes", default="8,16,32,64,128")
    pb.add_argument("--repeat", type=int, default=3)
    pb.add_argument("--points", type=int, default=1)
    pb.add_argument("--out")
    pb.set_defaults(fn=cmd_bench)
    return ap


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SchemaError as e:
        print(f"schema error: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    except (DegenerateInput, InvalidGeometry, InvalidSCP, InvalidParams, IncompatibleMode) as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_DEGENERATE
    except InvariantViolation as e:
        print(f"invariant violation: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
