import math
import xml.etree.ElementTree as ET

import pytest

from mcrkit.errors import IncompatibleMode
from mcrkit.fixed import AngularIntervalSet, solve_fixed_baseline
from mcrkit.generate import generate
from mcrkit.geometry import AngularInterval
from mcrkit.io import instance_from_doc
from mcrkit.render import depth_profile, render_svg
from mcrkit.segment import _curves_for_point, canonicalize_frame, split_edges_at_x_axis

NS = "{http://www.w3.org/2000/svg}"
OFF = [[1, -1], [3, -1], [3, 1], [1, 1]]


def nodes(svg, cls):
    root = ET.fromstring(svg)
    assert root.get("version") == "1.1"
    return [e for e in root.iter() if cls in (e.get("class") or "").split()]


def test_depth_profile_toy():
    sets = [AngularIntervalSet(0, [AngularInterval(1, 3)]), AngularIntervalSet(1, [AngularInterval(2, 4)])]
    assert depth_profile(sets) == [0, 1, 2, 1, 0]


def test_events_mode_two_interval_toy():
    pts = [[2 * math.cos(a), 2 * math.sin(a)] for a in (-math.pi / 2, -math.pi / 2 - 0.3)]
    inst = instance_from_doc({"kind": "fixed2d", "polygon": {"outer": OFF}, "center": [0, 0], "points": pts})
    svg = render_svg(inst, None, "events")
    (depth,) = nodes(svg, "depth")
    assert depth.get("data-depth") == "0 1 2 1 0"
    assert len(nodes(svg, "interval")) == 2


def test_scene_recount_matches_result():
    doc = generate("star", {"m": 9, "n": 12}, 3)
    inst = instance_from_doc(doc)
    sol = solve_fixed_baseline(inst.polygon, inst.center, inst.points)
    res = {"witness": {"center": list(inst.center), "theta": sol.witness_angle}, "count": sol.best_count}
    svg = render_svg(inst, res, "scene")
    assert len(nodes(svg, "inside")) == sol.best_count
    assert len(nodes(svg, "point")) == len(inst.points)
    assert len(nodes(svg, "orbit")) == len(inst.points)


def test_scene_3d_and_scp():
    inst = instance_from_doc(generate("box3d", {"n": 4}, 1))
    assert len(nodes(render_svg(inst, {"witness": {"theta": 0.3, "phi": 0.2}}, "scene"), "point")) == 4
    inst = instance_from_doc(generate("scp", {"n": 3}, 1))
    assert len(nodes(render_svg(inst, None, "events"), "depth")) == 1


def test_curves_mode_one_polyline_per_curve():
    doc = {"kind": "segment2d", "polygon": {"outer": [[-2, -1.5], [2.5, -1], [1.5, 2], [-1.5, 1.8]]},
           "segment": [[-0.5, 0.0], [0.8, 0.3]], "points": [[1.8, 0.4]]}
    inst = instance_from_doc(doc)
    F, Q, S2 = canonicalize_frame(*inst.segment, inst.polygon, inst.points)
    curves = _curves_for_point(split_edges_at_x_axis(Q), S2[0], 0, F.bx, None)
    assert curves
    svg = render_svg(inst, {"witness": {"x": 0.2, "theta": 1.0}}, "curves")
    assert len(nodes(svg, "omega-curve")) == len(curves)
    assert len(nodes(svg, "optimum")) == 1


def test_deterministic_and_incompatible():
    inst = instance_from_doc(generate("star", {"m": 7, "n": 5, "segment": True}, 2))
    assert render_svg(inst, None, "curves") == render_svg(inst, None, "curves")
    with pytest.raises(IncompatibleMode):
        render_svg(inst, None, "events")
    with pytest.raises(IncompatibleMode):
        render_svg(inst, None, "movie")
    fixed = instance_from_doc(generate("star", {"m": 7, "n": 5}, 2))
    with pytest.raises(IncompatibleMode):
        render_svg(fixed, None, "curves")
