"""Toric surface data built from weighted polygon factors.

A surface is a list of factors ``(C_k, Delta_k)``: a positive rational weight
and a lattice polygon (possibly a segment or a point).  The moment polytope is
the Minkowski combination ``P = 2 * sum_k C_k Delta_k`` and each line bundle
``L(c) = sum c_k L_k`` is described through the support numbers of the same
factors.

Presets carry a display frame (a unimodular matrix plus an offset applied to
raw coordinates before anything is reported), paper-style edge names, a
boundary-divisor table in the factor basis of Pic, and an exceptional
collection.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction

from .symbolic_kernel import Poly2, _as_fraction


class Factor:
    """One weighted lattice polygon."""

    __slots__ = ("coeff", "vertices", "lattice")

    def __init__(self, coeff, points):
        self.coeff = _as_fraction(coeff)
        if self.coeff <= 0:
            raise ValueError("factor weight must be positive")
        pts = []
        for p in points:
            x, y = int(p[0]), int(p[1])
            if (x, y) != (p[0], p[1]):
                raise ValueError("factor polygon must have integer vertices")
            pts.append((x, y))
        if not pts:
            raise ValueError("empty factor polygon")
        self.vertices = _hull(pts)
        self.lattice = _polygon_lattice_points(self.vertices)

    def support(self, m):
        """max over the polygon of <v, m>."""
        return max(v[0] * m[0] + v[1] * m[1] for v in self.vertices)

    def q_poly(self):
        """Sum of monomials over the polygon's lattice points."""
        return Poly2({p: 1 for p in self.lattice})


def _hull(points):
    """Convex hull, ccw, no duplicates.  Degenerate inputs collapse to the
    extreme points of the segment or the single point."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        return [min(pts), max(pts)]
    return hull


def _polygon_lattice_points(verts):
    xs = [v[0] for v in verts]
    ys = [v[1] for v in verts]
    out = []
    for x in range(min(xs), max(xs) + 1):
        for y in range(min(ys), max(ys) + 1):
            if _point_in_hull((x, y), verts):
                out.append((x, y))
    return out


def _point_in_hull(p, verts):
    if len(verts) == 1:
        return p == verts[0]
    if len(verts) == 2:
        (ax, ay), (bx, by) = verts
        cross = (bx - ax) * (p[1] - ay) - (by - ay) * (p[0] - ax)
        if cross != 0:
            return False
        dot = (p[0] - ax) * (bx - ax) + (p[1] - ay) * (by - ay)
        return 0 <= dot <= (bx - ax) ** 2 + (by - ay) ** 2
    n = len(verts)
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        if (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) < 0:
            return False
    return True


def _primitive(v):
    g = math.gcd(abs(v[0]), abs(v[1]))
    return (v[0] // g, v[1] // g) if g else (0, 0)


class Edge:
    """Boundary edge of the raw moment polytope.

    ``normal`` is the primitive outward normal, ``offset`` the support number
    so the edge lies on <x, normal> = offset.  ``start`` and ``end`` are the
    ccw endpoints; the ccw tangent equals the normal rotated by +90 degrees.
    The face parameter zeta runs from 0 at ``start`` to infinity at ``end``.
    """

    __slots__ = ("name", "normal", "offset", "start", "end", "tangent")

    def __init__(self, name, normal, offset, start, end):
        self.name = name
        self.normal = normal
        self.offset = offset
        self.start = start
        self.end = end
        self.tangent = (-normal[1], normal[0])

    def __repr__(self):
        return f"Edge({self.name}, n={self.normal}, {self.start}->{self.end})"


class PolySurface:
    """A toric surface with factor data, raw polytope, and display frame."""

    __slots__ = ("factors", "frame_a", "frame_v", "preset", "edges",
                 "vertices", "_divisors", "_collection", "_cache")

    def __init__(self, factors, frame_a=None, frame_v=None, preset=None,
                 edge_names=None, divisors=None, collection=None):
        self.factors = list(factors)
        if not self.factors:
            raise ValueError("degenerate surface")
        self.frame_a = frame_a or ((1, 0), (0, 1))
        det = (self.frame_a[0][0] * self.frame_a[1][1]
               - self.frame_a[0][1] * self.frame_a[1][0])
        if abs(det) != 1:
            raise ValueError("display frame must be unimodular")
        self.frame_v = tuple(_as_fraction(q) for q in (frame_v or (0, 0)))
        self.preset = preset
        self._divisors = divisors
        self._collection = collection
        self._cache = {}
        self._build_polytope(edge_names)

    # -- construction ------------------------------------------------------

    def _build_polytope(self, edge_names):
        normals = []
        for f in self.factors:
            verts = f.vertices
            n = len(verts)
            if n == 1:
                continue
            if n == 2:
                d = (verts[1][0] - verts[0][0], verts[1][1] - verts[0][1])
                for m in (( d[1], -d[0]), (-d[1], d[0])):
                    m = _primitive(m)
                    if m not in normals:
                        normals.append(m)
            else:
                for i in range(n):
                    a, b = verts[i], verts[(i + 1) % n]
                    m = _primitive((b[1] - a[1], a[0] - b[0]))
                    if m not in normals:
                        normals.append(m)
        if len(normals) < 3:
            raise ValueError("degenerate surface")
        normals.sort(key=lambda m: math.atan2(m[1], m[0]))

        def offset(m):
            return 2 * sum(f.coeff * f.support(m) for f in self.factors)

        offs = [offset(m) for m in normals]
        verts = []
        n = len(normals)
        for i in range(n):
            m1, a1 = normals[i], offs[i]
            m2, a2 = normals[(i + 1) % n], offs[(i + 1) % n]
            det = m1[0] * m2[1] - m1[1] * m2[0]
            if det <= 0:
                raise ValueError("degenerate surface")
            x = (a1 * m2[1] - a2 * m1[1]) / det
            y = (m1[0] * a2 - m2[0] * a1) / det
            verts.append((x, y))
        # vertex i joins normals i and i+1; edge for normal i runs from
        # vertex i-1 to vertex i in ccw order
        for i in range(n):
            if verts[i - 1] == verts[i]:
                raise ValueError("degenerate surface")
        names = {}
        if edge_names:
            names = dict(edge_names)
        edges = []
        for i in range(n):
            m = normals[i]
            name = names.get(m, f"E{i + 1}")
            edges.append(Edge(name, m, offs[i], verts[i - 1], verts[i]))
        self.edges = edges
        self.vertices = [e.start for e in edges]

    # -- basic queries ------------------------------------------------------

    @property
    def nfactors(self):
        return len(self.factors)

    def edge_by_name(self, name):
        for e in self.edges:
            if e.name == name:
                return e
        raise KeyError(f"no edge named {name}")

    def support_numbers(self, c):
        """Support number of L(c) for each edge normal, edge order."""
        c = self.check_bundle(c)
        return [sum(ck * f.support(e.normal) for ck, f in zip(c, self.factors))
                for e in self.edges]

    def check_bundle(self, c):
        c = tuple(int(x) for x in c)
        if len(c) != self.nfactors:
            raise ValueError(
                f"bundle vector has {len(c)} entries, surface has {self.nfactors} factors")
        return c

    def to_display(self, x):
        a, v = self.frame_a, self.frame_v
        return (a[0][0] * x[0] + a[0][1] * x[1] + v[0],
                a[1][0] * x[0] + a[1][1] * x[1] + v[1])

    def from_display(self, x):
        a, v = self.frame_a, self.frame_v
        det = a[0][0] * a[1][1] - a[0][1] * a[1][0]
        u = (x[0] - v[0], x[1] - v[1])
        return ((a[1][1] * u[0] - a[0][1] * u[1]) / det,
                (a[0][0] * u[1] - a[1][0] * u[0]) / det)

    def point_slacks(self, x):
        """Slack offset - <x, normal> per edge; all >= 0 means inside."""
        return [e.offset - (x[0] * e.normal[0] + x[1] * e.normal[1])
                for e in self.edges]

    def contains(self, x, tol=0):
        return all(s >= -tol for s in self.point_slacks(x))

    def is_interior(self, x, tol=0):
        return all(s > tol for s in self.point_slacks(x))

    def bbox(self):
        xs = [v[0] for v in self.vertices]
        ys = [v[1] for v in self.vertices]
        return (min(xs), min(ys)), (max(xs), max(ys))

    def __repr__(self):
        tag = self.preset or "custom"
        return f"PolySurface({tag}, {len(self.edges)} edges)"


# ---------------------------------------------------------------------------
# section polytopes


class SectionPolytope:
    """Lattice H-representation {I : <I, n_e> <= a_e(c)} of the sections of
    L(c), together with its lattice points."""

    __slots__ = ("c", "normals", "offsets", "points")

    def __init__(self, c, normals, offsets):
        self.c = c
        self.normals = normals
        self.offsets = offsets
        self.points = self._lattice_points()

    def contains(self, i, margin=0):
        return all(i[0] * m[0] + i[1] * m[1] <= a + margin
                   for m, a in zip(self.normals, self.offsets))

    def dilated_points(self, margin):
        return _scan_lattice(self.normals, [a + margin for a in self.offsets])

    def _lattice_points(self):
        return _scan_lattice(self.normals, self.offsets)

    def is_empty(self):
        return not self.points

    def __len__(self):
        return len(self.points)


def _scan_lattice(normals, offsets):
    # bounding box from axis support in the four cardinal directions
    bounds = {}
    for d in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        # maximize <I, d> subject to the constraints: LP on a small polygon,
        # evaluate at constraint-pair intersections
        best = None
        n = len(normals)
        for i in range(n):
            for j in range(i + 1, n):
                m1, m2 = normals[i], normals[j]
                det = m1[0] * m2[1] - m1[1] * m2[0]
                if det == 0:
                    continue
                a1, a2 = offsets[i], offsets[j]
                x = Fraction(a1 * m2[1] - a2 * m1[1], det)
                y = Fraction(m1[0] * a2 - m2[0] * a1, det)
                if all(x * m[0] + y * m[1] <= a + Fraction(1, 10**9)
                       for m, a in zip(normals, offsets)):
                    v = x * d[0] + y * d[1]
                    best = v if best is None else max(best, v)
        if best is None:
            return []
        bounds[d] = best
    out = []
    for i1 in range(math.ceil(-bounds[(-1, 0)]), math.floor(bounds[(1, 0)]) + 1):
        for i2 in range(math.ceil(-bounds[(0, -1)]), math.floor(bounds[(0, 1)]) + 1):
            if all(i1 * m[0] + i2 * m[1] <= a for m, a in zip(normals, offsets)):
                out.append((i1, i2))
    return sorted(out)


def section_polytope(surface, c):
    c = surface.check_bundle(c)
    key = ("secpoly", c)
    if key not in surface._cache:
        normals = [e.normal for e in surface.edges]
        offsets = surface.support_numbers(c)
        surface._cache[key] = SectionPolytope(c, normals, offsets)
    return surface._cache[key]


# ---------------------------------------------------------------------------
# presets


def _seg(a, b):
    return [a, b]


_UNIT_TRI = [(0, 0), (1, 0), (0, 1)]

_PRESET_DATA = {
    "bl2": dict(
        factors=[(1, _seg((0, 0), (1, 0))), (1, _seg((0, 0), (0, 1))),
                 (1, _UNIT_TRI)],
        edge_names={(-1, 0): "E1", (0, -1): "E2", (1, 0): "E3",
                    (1, 1): "E4", (0, 1): "E5"},
        divisors={"E1": (1, 0, 0), "E2": (0, 1, 0), "E3": (0, -1, 1),
                  "E4": (1, 1, -1), "E5": (-1, 0, 1)},
        collection=[(0, 0, 0), (0, -1, 1), (-1, 0, 1), (0, 0, 1), (0, 0, 2)],
    ),
    "bl3": dict(
        factors=[(1, _seg((0, 0), (1, 0))), (1, _seg((0, 0), (0, 1))),
                 (1, _seg((0, 0), (1, 1))), (1, [(0, 0), (1, 1), (0, 1)])],
        frame_a=((1, 0), (-1, 1)),
        frame_v=(0, 2),
        edge_names={(-1, 0): "E1", (0, -1): "E2", (1, -1): "E3",
                    (1, 0): "E4", (0, 1): "E5", (-1, 1): "E6"},
        divisors={"E1": (1, 0, 1, -1), "E2": (-1, 0, 0, 1), "E3": (1, 1, 0, -1),
                  "E4": (0, -1, 0, 1), "E5": (0, 1, 1, -1), "E6": (0, 0, -1, 1)},
        collection=[(0, 0, 0, 0), (-1, 0, 0, 1), (0, -1, 0, 1),
                    (0, 0, -1, 1), (0, 0, 0, 1), (0, 0, 0, 2)],
    ),
    "cp2": dict(
        factors=[(1, _UNIT_TRI)],
        edge_names={(-1, 0): "E1", (0, -1): "E2", (1, 1): "E3"},
        divisors={"E1": (1,), "E2": (1,), "E3": (1,)},
        collection=[(0,), (1,), (2,)],
    ),
    "p1p1": dict(
        factors=[(1, _seg((0, 0), (1, 0))), (1, _seg((0, 0), (0, 1)))],
        edge_names={(-1, 0): "E1", (0, -1): "E2", (1, 0): "E3", (0, 1): "E4"},
        divisors={"E1": (1, 0), "E2": (0, 1), "E3": (1, 0), "E4": (0, 1)},
        collection=[(0, 0), (1, 0), (0, 1), (1, 1)],
    ),
    "f1": dict(
        factors=[(1, _seg((0, 0), (0, 1))), (1, _UNIT_TRI)],
        edge_names={(-1, 0): "E1", (0, -1): "E2", (1, 0): "E3", (1, 1): "E4"},
        divisors={"E1": (0, 1), "E2": (1, 0), "E3": (-1, 1), "E4": (1, 0)},
        collection=[(0, 0), (1, 0), (0, 1), (1, 1)],
    ),
}


def preset_surface(name):
    if name not in _PRESET_DATA:
        raise ValueError(f"unknown preset {name!r}; have {sorted(_PRESET_DATA)}")
    d = _PRESET_DATA[name]
    return PolySurface(
        [Factor(c, pts) for c, pts in d["factors"]],
        frame_a=d.get("frame_a"),
        frame_v=d.get("frame_v"),
        preset=name,
        edge_names=d["edge_names"],
        divisors=d["divisors"],
        collection=[tuple(c) for c in d["collection"]],
    )


def build_surface(factors, frame_a=None, frame_v=None):
    """Surface from raw (coeff, polygon) pairs; no preset tables attached."""
    return PolySurface([f if isinstance(f, Factor) else Factor(*f)
                        for f in factors],
                       frame_a=frame_a, frame_v=frame_v)


def load_surface(spec):
    """Surface from a preset name, a config dict, or a JSON file path."""
    if isinstance(spec, PolySurface):
        return spec
    if isinstance(spec, str):
        if spec in _PRESET_DATA:
            return preset_surface(spec)
        with open(spec) as fh:
            spec = json.load(fh)
    if not isinstance(spec, dict):
        raise ValueError("surface config must be a preset name or a mapping")
    if "preset" in spec:
        return preset_surface(spec["preset"])
    if "factors" not in spec:
        raise ValueError("surface config needs 'preset' or 'factors'")
    factors = [Factor(f.get("coeff", 1), f["polygon"]) for f in spec["factors"]]
    frame = spec.get("frame") or {}
    fa = frame.get("A")
    fv = frame.get("v0")
    return PolySurface(factors,
                       frame_a=tuple(tuple(r) for r in fa) if fa else None,
                       frame_v=tuple(fv) if fv else None)


def divisor_to_pic(surface, divisor):
    """Pic class of a boundary divisor, in the factor basis.

    ``divisor`` is an edge name like "E3" or a 1-based edge index.
    """
    if surface._divisors is None:
        raise ValueError("no divisor table")
    if isinstance(divisor, int):
        divisor = f"E{divisor}"
    if divisor not in surface._divisors:
        raise KeyError(f"no divisor {divisor}")
    return tuple(surface._divisors[divisor])


def preset_exceptional_collection(surface_or_name):
    if isinstance(surface_or_name, str):
        surface_or_name = preset_surface(surface_or_name)
    if surface_or_name._collection is None:
        raise ValueError("no preset collection")
    return [tuple(c) for c in surface_or_name._collection]


def load_collection(surface, spec=None):
    """Collection from the surface preset, a JSON file, or an explicit list."""
    if spec is None:
        return preset_exceptional_collection(surface)
    if isinstance(spec, str):
        if spec in _PRESET_DATA:
            return preset_exceptional_collection(spec)
        with open(spec) as fh:
            spec = json.load(fh)
    return [surface.check_bundle(c) for c in spec]
