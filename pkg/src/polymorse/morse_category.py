"""Stationary components of section differences and the category they span.

For a difference bundle c and integer label I, the solution set of
``y/2pi = I`` over the closed polytope decomposes into connected components.
Each component gets a degree (the contracting dimension of the linearized
flow) and is admitted as a morphism generator when that dimension is
constant (M1) and some generic point of the component is interior to its
contracting manifold within P (M2).
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from . import geometry as geo
from .surface_model import section_polytope
from .symbolic_kernel import DivergentLimit, UniRat, _usub

# edge sample parameters: thirds of the compactified coordinate
# lam = zeta/(1+zeta), so lam in {1/3, 1/2, 2/3}
EDGE_SAMPLES = (Fraction(1, 2), Fraction(1), Fraction(2))
# backup draws at sevenths, disjoint from the base set
EDGE_SAMPLES_EXTRA = (Fraction(1, 6), Fraction(2, 5), Fraction(3, 4),
                      Fraction(4, 3), Fraction(5, 2))


class FacePoint:
    """A point of closure(P) tagged with the face it sits on.

    kind "vertex": coords only.  kind "edge": open-edge point with its face
    parameter.  kind "interior": chart values (s, t) are exact.
    """

    __slots__ = ("kind", "coords", "edge", "zeta", "st")

    def __init__(self, kind, coords, edge=None, zeta=None, st=None):
        self.kind = kind
        self.coords = tuple(coords)
        self.edge = edge
        self.zeta = zeta
        self.st = st

    def key(self):
        return (self.kind, self.coords)

    def __repr__(self):
        if self.kind == "edge":
            return f"FacePoint({self.coords} on {self.edge})"
        return f"FacePoint({self.coords}, {self.kind})"


class Component:
    """One connected piece of the stationary set for (c, I)."""

    __slots__ = ("surface", "c", "I", "edges", "vertices", "points",
                 "whole_polytope", "_degree", "_samples", "_verdict")

    def __init__(self, surface, c, I, edges=(), vertices=(), points=(),
                 whole_polytope=False):
        self.surface = surface
        self.c = c
        self.I = (int(I[0]), int(I[1]))
        self.edges = sorted(edges, key=lambda e: e.name)
        self.vertices = sorted(vertices)
        self.points = sorted(points, key=FacePoint.key)
        self.whole_polytope = whole_polytope
        self._degree = None
        self._samples = None
        self._verdict = None

    # vertices subsumed by a listed closed edge are not repeated
    def carrier_labels(self):
        if self.whole_polytope:
            return ["P"]
        covered = set()
        for e in self.edges:
            covered.add(tuple(e.start))
            covered.add(tuple(e.end))
        out = [e.name for e in self.edges]
        out += [v for v in self.vertices if v not in covered]
        out += [p.coords for p in self.points]
        return out

    def standalone_vertices(self):
        covered = set()
        for e in self.edges:
            covered.add(tuple(e.start))
            covered.add(tuple(e.end))
        return [v for v in self.vertices if v not in covered]

    def __repr__(self):
        return (f"Component(c={self.c}, I={self.I}, "
                f"carrier={self.carrier_labels()})")


def _shift_profile(prof, k):
    """Profile minus the integer constant k."""
    return UniRat(_usub(prof.num, [Fraction(k) * q for q in prof.den]),
                  prof.den)


def _field_edge_profiles(surface, c, I, edge):
    p1, p2 = geo.lagrangian_section(surface, c, edge=edge)
    return _shift_profile(p1, I[0]), _shift_profile(p2, I[1])


def _profile_limit_at(prof, edge, vertex):
    if tuple(edge.start) == tuple(vertex):
        return prof.limit0()
    if tuple(edge.end) == tuple(vertex):
        return prof.limit_inf()
    raise ValueError(f"{vertex} is not an endpoint of {edge.name}")


def intersection_components(surface, c, I):
    """Connected components of {y/2pi = I} over the closed polytope.

    Results are cached per surface, so the degree and verdict work attached
    to each component is shared by every caller.
    """
    c = surface.check_bundle(c)
    I = (int(I[0]), int(I[1]))
    cache_key = ("components", c, I)
    if cache_key in surface._cache:
        return surface._cache[cache_key]
    comps = _intersection_components(surface, c, I)
    surface._cache[cache_key] = comps
    return comps


def _intersection_components(surface, c, I):
    y1, y2 = geo.get_geometry(surface).section(c)
    if y1.is_zero() and y2.is_zero():
        if I == (0, 0):
            return [Component(surface, c, I, whole_polytope=True)]
        return []

    full_edges = []
    edge_points = []
    profs = {}
    for edge in surface.edges:
        q1, q2 = _field_edge_profiles(surface, c, I, edge)
        profs[edge.name] = (q1, q2)
        z1, z2 = q1.is_identically_zero(), q2.is_identically_zero()
        if z1 and z2:
            full_edges.append(edge)
            continue
        roots = None
        if z1:
            roots = q2.positive_roots()
        elif z2:
            roots = q1.positive_roots()
        else:
            roots = sorted(set(q1.positive_roots()) & set(q2.positive_roots()))
        for z in roots:
            edge_points.append(FacePoint(
                "edge", geo.edge_point_at(surface, edge, z),
                edge=edge.name, zeta=z))

    vertices = []
    for v in surface.vertices:
        adjacent = [e for e in surface.edges
                    if tuple(e.start) == tuple(v) or tuple(e.end) == tuple(v)]
        limits = []
        for e in adjacent:
            q1, q2 = profs[e.name]
            limits.append((_profile_limit_at(q1, e, v),
                           _profile_limit_at(q2, e, v)))
        assert limits[0] == limits[1], \
            f"section limits disagree at vertex {v}: {limits}"
        if limits[0] == (0, 0):
            vertices.append(tuple(v))

    interior_points = []
    for s, t in geo.interior_field_zeros(surface, c, I):
        interior_points.append(FacePoint(
            "interior", geo.moment_map_st(surface, s, t), st=(s, t)))

    # connected assembly: closed edges capture their endpoints
    parent = {}

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    def union(a, b):
        parent[find(a)] = find(b)

    nodes = []
    for e in full_edges:
        k = ("E", e.name)
        parent[k] = k
        nodes.append((k, e))
    for v in vertices:
        k = ("V", v)
        parent[k] = k
        nodes.append((k, v))
    for e in full_edges:
        for v in (tuple(e.start), tuple(e.end)):
            if ("V", v) in parent:
                union(("E", e.name), ("V", v))

    groups = {}
    for k, payload in nodes:
        groups.setdefault(find(k), []).append((k, payload))
    comps = []
    for group in groups.values():
        edges = [p for k, p in group if k[0] == "E"]
        verts = [p for k, p in group if k[0] == "V"]
        comps.append(Component(surface, c, I, edges=edges, vertices=verts))
    for fp in edge_points + interior_points:
        comps.append(Component(surface, c, I, points=[fp]))

    def sort_key(comp):
        labels = comp.carrier_labels()
        return tuple(str(x) for x in labels)

    return sorted(comps, key=sort_key)


# ---------------------------------------------------------------------------
# degrees and conditions


def _sample_points(component, extended=False):
    """Deterministic generic FacePoints across the carrier."""
    surface = component.surface
    out = []
    if component.whole_polytope:
        out.append(FacePoint("interior", geo.moment_map_st(surface, 1, 1),
                             st=(Fraction(1), Fraction(1))))
        return out
    zetas = EDGE_SAMPLES + (EDGE_SAMPLES_EXTRA if extended else ())
    for e in component.edges:
        for z in zetas:
            out.append(FacePoint("edge", geo.edge_point_at(surface, e, z),
                                 edge=e.name, zeta=z))
    for v in component.standalone_vertices():
        out.append(FacePoint("vertex", v))
    out.extend(component.points)
    return out


def _jacobian_at_face_point(surface, c, fp):
    if fp.kind == "interior":
        return geo.jacobian_exact_interior(surface, c, *fp.st)
    if fp.kind == "edge":
        return geo.jacobian_on_edge(surface, c, fp.edge, fp.zeta)
    return geo.jacobian_at_vertex(surface, c, fp.coords)


def _collect_samples(component, extended=False):
    out = []
    for fp in _sample_points(component, extended):
        jd = _jacobian_at_face_point(component.surface, component.c, fp)
        out.append((fp, jd))
    return out


def degree(component):
    """Contracting dimension of the flow at the carrier, or "non-constant".

    Raises with "degree undetermined" when no sample yields a conclusive
    eigenvalue sign pattern.
    """
    if component._degree is not None:
        return component._degree
    samples = _collect_samples(component)
    counts = [jd.negative_count() for _, jd in samples
              if jd.method != "fd-unstable"]
    if not counts:
        raise ArithmeticError("degree undetermined")
    if len(set(counts)) > 1:
        samples = _collect_samples(component, extended=True)
        counts = [jd.negative_count() for _, jd in samples
                  if jd.method != "fd-unstable"]
        component._degree = counts[0] if len(set(counts)) == 1 else "non-constant"
    else:
        component._degree = counts[0]
    component._samples = samples
    return component._degree


def check_conditions(component):
    """(M1), (M2) verdicts with reasons; populates the component cache."""
    if component._verdict is not None:
        return component._verdict
    deg = degree(component)
    if deg == "non-constant":
        component._verdict = {
            "degree": deg, "m1_ok": False, "m2_ok": False,
            "reason": "M1: contracting dimension is not constant"}
        return component._verdict
    if deg == 0:
        component._verdict = {"degree": 0, "m1_ok": True, "m2_ok": True,
                              "reason": None}
        return component._verdict
    surface = component.surface
    for fp, jd in component._samples:
        dirs = jd.stable_directions()
        if dirs is None or len(dirs) != deg:
            continue
        x = np.array([float(fp.coords[0]), float(fp.coords[1])])
        ok = True
        for v in dirs:
            for eps in (1e-2, 1e-3, 1e-4):
                for sign in (1.0, -1.0):
                    p = x + sign * eps * v
                    if not surface.contains(p, tol=1e-12):
                        ok = False
        if ok:
            component._verdict = {"degree": deg, "m1_ok": True, "m2_ok": True,
                                  "reason": None}
            return component._verdict
    component._verdict = {
        "degree": deg, "m1_ok": True, "m2_ok": False,
        "reason": "M2: a contracting direction leaves the polytope "
                  "at every sample"}
    return component._verdict


# ---------------------------------------------------------------------------
# morphism spaces


class HomSpace:
    """Generators and rejections for one ordered bundle pair."""

    __slots__ = ("surface", "source", "target", "diff", "generators",
                 "rejected")

    def __init__(self, surface, source, target, diff, generators, rejected):
        self.surface = surface
        self.source = source
        self.target = target
        self.diff = diff
        self.generators = generators
        self.rejected = rejected

    @property
    def dim(self):
        return len(self.generators)

    def generator_labels(self):
        return [comp.I for comp in self.generators]

    def __repr__(self):
        return (f"HomSpace({self.source}->{self.target}, dim {self.dim})")


def scan_labels(surface, c, margin=1):
    """Candidate labels I for a difference bundle: its section lattice
    region dilated by ``margin`` in every support offset."""
    return section_polytope(surface, c).dilated_points(margin)


def hom_space(surface, l_from, l_to):
    c_from = surface.check_bundle(l_from)
    c_to = surface.check_bundle(l_to)
    diff = tuple(a - b for a, b in zip(c_to, c_from))
    generators = []
    rejected = []
    if not any(diff):
        generators.append(Component(surface, diff, (0, 0), whole_polytope=True))
        check_conditions(generators[0])
        return HomSpace(surface, c_from, c_to, diff, generators, rejected)
    for I in scan_labels(surface, diff):
        for comp in intersection_components(surface, diff, I):
            verdict = check_conditions(comp)
            if verdict["m1_ok"] and verdict["m2_ok"]:
                generators.append(comp)
            else:
                rejected.append((comp, verdict["reason"]))
    return HomSpace(surface, c_from, c_to, diff, generators, rejected)


# ---------------------------------------------------------------------------
# serialization helpers


def _coord_str(x):
    q = Fraction(x)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def carrier_json(surface, component):
    out = []
    for label in component.carrier_labels():
        if isinstance(label, str):
            out.append(label)
        else:
            disp = surface.to_display(label)
            out.append([_coord_str(disp[0]), _coord_str(disp[1])])
    return out


def component_json(surface, component):
    verdict = check_conditions(component)
    return {
        "I": list(component.I),
        "carrier": carrier_json(surface, component),
        "degree": verdict["degree"],
    }


def hom_space_json(hs):
    return {
        "from": list(hs.source),
        "to": list(hs.target),
        "diff": list(hs.diff),
        "generators": [component_json(hs.surface, g) for g in hs.generators],
        "rejected": [
            {"I": list(comp.I),
             "carrier": carrier_json(hs.surface, comp),
             "reason": reason}
            for comp, reason in hs.rejected],
    }
