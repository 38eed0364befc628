"""Component tables, degrees, admission verdicts, and hom dimensions.

The pentagon and hexagon tables below pin every difference bundle of the
preset collections: carrier (in display coordinates), contracting degree,
and the admission verdict with its reason class.  The sweeps iterate the
full candidate label scan, so they also certify that no spurious component
appears at any other label.
"""

import json
from fractions import Fraction

import numpy as np
import pytest

from polymorse import geometry as geo
from polymorse import morse_category as mc
from polymorse.surface_model import preset_exceptional_collection, preset_surface

BL2 = preset_surface("bl2")
BL3 = preset_surface("bl3")
CP2 = preset_surface("cp2")
P1P1 = preset_surface("p1p1")
F1 = preset_surface("f1")


def _sig(surface, comp):
    """Carrier signature: edge names and display-coordinate points."""
    out = []
    for label in comp.carrier_labels():
        if isinstance(label, str):
            out.append(label)
        else:
            d = surface.to_display(label)
            out.append((Fraction(d[0]), Fraction(d[1])))
    return frozenset(out)


def _norm(entry):
    return frozenset(
        x if isinstance(x, str) else (Fraction(x[0]), Fraction(x[1]))
        for x in entry)


# carrier, degree, verdict class per label; every other scanned label must
# yield no component at all
BL2_TABLE = {
    (0, -1, 1): {
        (0, 0): (("E1", "E5"), 0, "GEN"),
        (1, 0): (((4, 0),), 1, "M2"),
        (1, -1): (((4, 2),), 1, "M2"),
    },
    (-1, 0, 1): {
        (0, 0): (("E2", "E3"), 0, "GEN"),
        (0, 1): (((0, 4),), 1, "M2"),
        (-1, 1): (((2, 4),), 1, "M2"),
    },
    (0, 0, 1): {
        (0, 0): ((((0, 0)),), 0, "GEN"),
        (1, 0): (("E3",), 0, "GEN"),
        (0, 1): (("E5",), 0, "GEN"),
    },
    (0, 0, 2): {
        (0, 0): (((0, 0),), 0, "GEN"),
        (1, 0): (((2, 0),), 0, "GEN"),
        (0, 1): (((0, 2),), 0, "GEN"),
        (1, 1): (((3, 3),), 0, "GEN"),
        (2, 0): (("E3",), 0, "GEN"),
        (0, 2): (("E5",), 0, "GEN"),
    },
    (0, 1, 0): {
        (0, 0): (("E2",), 0, "GEN"),
        (0, 1): (("E4", "E5"), 0, "GEN"),
    },
    (1, 0, 0): {
        (0, 0): (("E1",), 0, "GEN"),
        (1, 0): (("E3", "E4"), 0, "GEN"),
    },
    (0, 1, 1): {
        (0, 0): (((0, 0),), 0, "GEN"),
        (1, 0): (((4, 0),), 0, "GEN"),
        (0, 1): (((0, 2),), 0, "GEN"),
        (1, 1): (((4, 2),), 0, "GEN"),
        (0, 2): (("E5",), 0, "GEN"),
    },
    (1, 0, 1): {
        (0, 0): (((0, 0),), 0, "GEN"),
        (1, 0): (((2, 0),), 0, "GEN"),
        (0, 1): (((0, 4),), 0, "GEN"),
        (1, 1): (((2, 4),), 0, "GEN"),
        (2, 0): (("E3",), 0, "GEN"),
    },
    (-1, 1, 0): {
        (0, 1): (((0, 4),), 1, "M2"),
        (-1, 1): (("E4",), "non-constant", "M1"),
        (0, 0): (((0, 0),), 1, "M2"),
        (-1, 0): (((4, 0),), 1, "M2"),
    },
}

BL3_TABLE = {
    (-1, 0, 0, 1): {
        (0, 1): (("E4", "E5", "E6"), 0, "GEN"),
        (0, 0): (((0, 2),), 1, "M2"),
        (-1, 0): (((2, 0),), 1, "M2"),
    },
    (0, -1, 0, 1): {
        (0, 0): (("E1", "E2", "E6"), 0, "GEN"),
        (1, 0): (((6, 2),), 1, "M2"),
        (1, 1): (((6, 0),), 1, "M2"),
    },
    (0, 0, -1, 1): {
        (0, 0): (("E2", "E3", "E4"), 0, "GEN"),
        (0, 1): (((0, 6),), 1, "M2"),
        (-1, 0): (((2, 6),), 1, "M2"),
    },
    (0, 0, 0, 1): {
        (0, 0): (("E2",), 0, "GEN"),
        (0, 1): (("E6",), 0, "GEN"),
        (1, 1): (("E4",), 0, "GEN"),
    },
    (0, 0, 0, 2): {
        (0, 0): (("E2",), 0, "GEN"),
        (0, 1): (((0, 4),), 0, "GEN"),
        (0, 2): (("E6",), 0, "GEN"),
        (1, 1): (((4, 0),), 0, "GEN"),
        (1, 2): (((4, 4),), 0, "GEN"),
        (2, 2): (("E4",), 0, "GEN"),
    },
    (1, -1, 0, 0): {
        (0, -1): (("E6",), "non-constant", "M1"),
        (1, -1): (((6, 2),), 1, "M2"),
        (0, 0): (((0, 2),), 1, "M2"),
        (1, 0): (("E3",), "non-constant", "M1"),
    },
    (1, 0, -1, 0): {
        (0, 0): (("E1",), "non-constant", "M1"),
        (-1, -1): (((2, 6),), 1, "M2"),
        (1, 0): (((2, 0),), 1, "M2"),
        (0, -1): (("E4",), "non-constant", "M1"),
    },
    (0, 1, -1, 0): {
        (0, 1): (((0, 6),), 1, "M2"),
        (-1, 0): (("E5",), "non-constant", "M1"),
        (0, 0): (("E2",), "non-constant", "M1"),
        (-1, -1): (((6, 0),), 1, "M2"),
    },
    (0, 1, 0, 0): {
        (0, 0): (("E2", "E3"), 0, "GEN"),
        (0, 1): (("E5", "E6"), 0, "GEN"),
    },
    (0, 0, 1, 0): {
        (0, 0): (("E1", "E2"), 0, "GEN"),
        (1, 1): (("E4", "E5"), 0, "GEN"),
    },
    (1, 0, 0, 0): {
        (0, 0): (("E1", "E6"), 0, "GEN"),
        (1, 0): (("E3", "E4"), 0, "GEN"),
    },
    (1, 0, 0, 1): {
        (0, 0): (((0, 2),), 0, "GEN"),
        (1, 0): (((2, 0),), 0, "GEN"),
        (0, 1): (("E6",), 0, "GEN"),
        (1, 1): (((4, 4),), 0, "GEN"),
        (2, 1): (("E4",), 0, "GEN"),
    },
    (0, 1, 0, 1): {
        (0, 0): (("E2",), 0, "GEN"),
        (0, 1): (((0, 4),), 0, "GEN"),
        (0, 2): (("E6",), 0, "GEN"),
        (1, 1): (((6, 0),), 0, "GEN"),
        (1, 2): (((6, 2),), 0, "GEN"),
    },
    (0, 0, 1, 1): {
        (0, 0): (("E2",), 0, "GEN"),
        (0, 1): (((0, 6),), 0, "GEN"),
        (1, 1): (((4, 0),), 0, "GEN"),
        (1, 2): (((2, 6),), 0, "GEN"),
        (2, 2): (("E4",), 0, "GEN"),
    },
}


def _check_verdict(v, expected_degree, kind):
    assert v["degree"] == expected_degree
    if kind == "GEN":
        assert v["m1_ok"] and v["m2_ok"]
        assert v["reason"] is None
    elif kind == "M2":
        assert v["m1_ok"] and not v["m2_ok"]
        assert v["reason"].startswith("M2")
    else:
        assert not v["m1_ok"]
        assert v["reason"].startswith("M1")


def _sweep_bundle(surface, c, expected):
    found = {}
    for I in mc.scan_labels(surface, c):
        for comp in mc.intersection_components(surface, c, I):
            found.setdefault(comp.I, []).append(comp)
    assert set(found) == set(expected), (
        f"labels with components for c={c}: {sorted(found)}")
    for I, comps in found.items():
        carrier, deg, kind = expected[I]
        assert len(comps) == 1
        assert _sig(surface, comps[0]) == _norm(carrier)
        _check_verdict(mc.check_conditions(comps[0]), deg, kind)


@pytest.mark.parametrize("c", sorted(BL2_TABLE), ids=str)
def test_pentagon_component_table(c):
    _sweep_bundle(BL2, c, BL2_TABLE[c])


@pytest.mark.parametrize("c", sorted(BL3_TABLE), ids=str)
def test_hexagon_component_table(c):
    _sweep_bundle(BL3, c, BL3_TABLE[c])


# ---------------------------------------------------------------------------
# hom dimensions


def _dims(surface):
    coll = preset_exceptional_collection(surface)
    return [[mc.hom_space(surface, a, b).dim for b in coll] for a in coll]


def test_pentagon_hom_dimensions():
    assert _dims(BL2) == [
        [1, 1, 1, 3, 6],
        [0, 1, 0, 2, 5],
        [0, 0, 1, 2, 5],
        [0, 0, 0, 1, 3],
        [0, 0, 0, 0, 1],
    ]


def test_hexagon_hom_dimensions():
    assert _dims(BL3) == [
        [1, 1, 1, 1, 3, 6],
        [0, 1, 0, 0, 2, 5],
        [0, 0, 1, 0, 2, 5],
        [0, 0, 0, 1, 2, 5],
        [0, 0, 0, 0, 1, 3],
        [0, 0, 0, 0, 0, 1],
    ]


def test_projective_plane_hom_dimensions():
    assert _dims(CP2) == [[1, 3, 6], [0, 1, 3], [0, 0, 1]]


def test_quadric_hom_dimensions():
    assert _dims(P1P1) == [
        [1, 2, 2, 4],
        [0, 1, 0, 2],
        [0, 0, 1, 2],
        [0, 0, 0, 1],
    ]


def test_one_point_blowup_hom_dimensions():
    assert _dims(F1) == [
        [1, 2, 3, 5],
        [0, 1, 1, 3],
        [0, 0, 1, 2],
        [0, 0, 0, 1],
    ]


def test_projective_plane_degree_two_carriers():
    # halved quadratic monomial exponents on the size-2 triangle
    expected = {(0, 0): ((0, 0),), (1, 0): ((1, 0),), (0, 1): ((0, 1),),
                (2, 0): ((2, 0),), (1, 1): ((1, 1),), (0, 2): ((0, 2),)}
    hs = mc.hom_space(CP2, (0,), (2,))
    assert not hs.rejected
    got = {g.I: _sig(CP2, g) for g in hs.generators}
    assert got == {I: _norm(v) for I, v in expected.items()}
    assert all(mc.check_conditions(g)["degree"] == 0 for g in hs.generators)


def test_quadric_full_bundle_corners():
    hs = mc.hom_space(P1P1, (0, 0), (1, 1))
    got = {g.I: _sig(P1P1, g) for g in hs.generators}
    assert got == {(0, 0): _norm(((0, 0),)), (1, 0): _norm(((2, 0),)),
                   (0, 1): _norm(((0, 2),)), (1, 1): _norm(((2, 2),))}


def test_one_point_blowup_exceptional_hom():
    # the morphism between the two middle bundles is carried by one edge
    hs = mc.hom_space(F1, (1, 0), (0, 1))
    assert hs.diff == (-1, 1)
    assert [(g.I, _sig(F1, g)) for g in hs.generators] == [
        ((0, 0), frozenset({"E1"}))]
    assert mc.check_conditions(hs.generators[0])["degree"] == 0
    assert mc.hom_space(F1, (0, 1), (1, 0)).dim == 0


# ---------------------------------------------------------------------------
# identity morphisms


@pytest.mark.parametrize("surface", [BL2, BL3, CP2], ids=["bl2", "bl3", "cp2"])
def test_identity_hom(surface):
    zero = preset_exceptional_collection(surface)[0]
    hs = mc.hom_space(surface, zero, zero)
    assert hs.dim == 1
    comp = hs.generators[0]
    assert comp.whole_polytope
    assert comp.carrier_labels() == ["P"]
    v = mc.check_conditions(comp)
    assert v["degree"] == 0 and v["m1_ok"] and v["m2_ok"]


def test_identity_requires_zero_label():
    assert mc.intersection_components(BL2, (0, 0, 0), (1, 0)) == []


# ---------------------------------------------------------------------------
# rejection detail


def test_pentagon_mixed_direction_rejections():
    # the only collection pair whose both hom directions vanish
    hs = mc.hom_space(BL2, (0, -1, 1), (-1, 0, 1))
    assert hs.dim == 0
    got = {(comp.I, _sig(BL2, comp), reason.split(":")[0])
           for comp, reason in hs.rejected}
    assert got == {
        ((0, 1), _norm(((0, 4),)), "M2"),
        ((-1, 1), frozenset({"E4"}), "M1"),
        ((0, 0), _norm(((0, 0),)), "M2"),
        ((-1, 0), _norm(((4, 0),)), "M2"),
    }


def test_pentagon_reverse_rejections_have_positive_degree():
    for c_from, c_to in [((0, 0, 1), (0, 0, 0)), ((0, -1, 1), (0, 0, 0)),
                         ((0, 0, 2), (0, 0, 1))]:
        hs = mc.hom_space(BL2, c_from, c_to)
        assert hs.dim == 0
        assert hs.rejected
        for comp, reason in hs.rejected:
            v = mc.check_conditions(comp)
            assert v["degree"] != 0
            assert reason.startswith(("M1", "M2"))


def test_hexagon_mixed_direction_rejections():
    for c_from, c_to in [((-1, 0, 0, 1), (0, -1, 0, 1)),
                         ((-1, 0, 0, 1), (0, 0, -1, 1)),
                         ((0, -1, 0, 1), (0, 0, -1, 1))]:
        hs = mc.hom_space(BL3, c_from, c_to)
        assert hs.dim == 0
        reasons = sorted(reason.split(":")[0] for _, reason in hs.rejected)
        assert reasons == ["M1", "M1", "M2", "M2"]


def test_hexagon_degree_split_along_bottom_edge():
    # contracting count flips across the middle of E3 for the mixed bundle
    c = (1, -1, 0, 0)
    for display_x, expected in [(3, 0), (5, 1)]:
        raw = BL3.from_display((Fraction(display_x), Fraction(0)))
        z = geo.edge_param_at(BL3, "E3", raw)
        jd = geo.jacobian_on_edge(BL3, c, "E3", z)
        assert jd.method == "exact-edge"
        assert jd.negative_count() == expected


# ---------------------------------------------------------------------------
# carrier assembly details


def test_edge_union_subsumes_shared_vertices():
    comps = mc.intersection_components(BL2, (0, -1, 1), (0, 0))
    assert len(comps) == 1
    comp = comps[0]
    assert [e.name for e in comp.edges] == ["E1", "E5"]
    assert set(comp.vertices) == {(0, 0), (0, 4), (2, 4)}
    assert comp.standalone_vertices() == []
    assert comp.carrier_labels() == ["E1", "E5"]


def test_point_carrier_is_exact():
    comps = mc.intersection_components(BL2, (0, 0, 2), (1, 1))
    assert len(comps) == 1
    (fp,) = comps[0].points
    assert fp.kind == "edge"
    assert fp.edge == "E4"
    assert fp.coords == (Fraction(3), Fraction(3))


def test_interior_point_carrier():
    comps = mc.intersection_components(CP2, (3,), (1, 1))
    pts = [fp for comp in comps for fp in comp.points]
    assert any(fp.kind == "interior" and fp.st == (1, 1) for fp in pts)


def test_verdict_and_degree_are_cached():
    comp = mc.intersection_components(BL2, (0, 0, 1), (1, 0))[0]
    assert mc.check_conditions(comp) is mc.check_conditions(comp)
    assert mc.degree(comp) == 0


# ---------------------------------------------------------------------------
# zero-set localization: small field norm only happens near the carrier


def _field_grid(surface, c, I, n=41, span=8.0):
    u = np.linspace(-span, span, n)
    uu, vv = np.meshgrid(u, u)
    s, t = np.exp(uu), np.exp(vv)
    f1, f2 = geo.vector_field(surface, c, I)
    norm = np.hypot(f1.eval_float(s, t), f2.eval_float(s, t))
    g = geo.get_geometry(surface)
    x1, x2 = g.moment_float(s, t)
    return norm, x1, x2


def test_zero_set_localized_at_point_carrier():
    norm, x1, x2 = _field_grid(BL2, (0, 0, 2), (1, 1))
    small = norm < 1e-3
    assert small.any()
    d = np.hypot(x1 - 3.0, x2 - 3.0)
    assert d[small].max() < 0.35


def test_zero_set_localized_at_edge_carrier():
    norm, x1, x2 = _field_grid(BL2, (0, -1, 1), (0, 0))
    small = norm < 1e-3
    assert small.any()
    # distance to E1 (x1 = 0) or E5 (x2 = 4)
    d = np.minimum(np.abs(x1), np.abs(4.0 - x2))
    assert d[small].max() < 0.35


# ---------------------------------------------------------------------------
# serialization


def test_hom_space_json_shape():
    hs = mc.hom_space(BL2, (0, 0, 0), (0, -1, 1))
    doc = mc.hom_space_json(hs)
    assert doc["from"] == [0, 0, 0]
    assert doc["to"] == [0, -1, 1]
    assert doc["diff"] == [0, -1, 1]
    assert doc["generators"] == [
        {"I": [0, 0], "carrier": ["E1", "E5"], "degree": 0}]
    rej = {tuple(r["I"]): r for r in doc["rejected"]}
    assert set(rej) == {(1, 0), (1, -1)}
    assert rej[(1, 0)]["carrier"] == [["4", "0"]]
    assert rej[(1, -1)]["carrier"] == [["4", "2"]]
    assert all(r["reason"].startswith("M2") for r in doc["rejected"])
    json.dumps(doc)


def test_identity_json():
    hs = mc.hom_space(BL3, (0, 0, 0, 0), (0, 0, 0, 0))
    doc = mc.hom_space_json(hs)
    assert doc["generators"] == [{"I": [0, 0], "carrier": ["P"], "degree": 0}]
    assert doc["rejected"] == []


def test_json_is_deterministic_across_instances():
    a = preset_surface("bl2")
    b = preset_surface("bl2")
    da = mc.hom_space_json(mc.hom_space(a, (0, 0, 1), (0, 0, 2)))
    db = mc.hom_space_json(mc.hom_space(b, (0, 0, 1), (0, 0, 2)))
    assert json.dumps(da, sort_keys=True) == json.dumps(db, sort_keys=True)


def test_scan_labels_cover_section_lattice():
    from polymorse.surface_model import section_polytope
    for c in [(0, 0, 1), (0, 0, 2), (0, -1, 1)]:
        pts = set(section_polytope(BL2, c).points)
        assert pts <= set(mc.scan_labels(BL2, c))
