"""Weighted products of morphism generators and their gradient trees.

The product of two generators V_{c;I} and V_{c';J} lands on the generating
component of (c + c', I + J) and carries the weight e^{-kappa}, where the
area constant kappa is the exact value of f_I + f_J at the target carrier.
The sum f_I + f_J differs from f_{I+J} by the constant kappa (their
gradients agree identically), so the target carrier is the shared minimizer
set and the evaluation point may be chosen anywhere on it.

A tree trace is a secondary verification artifact: both incoming legs follow
the projected downhill flow of f_I + f_J along the closed faces and must
stop within tolerance of the target point.  Every preset tree runs along the
boundary; legs through the interior are out of scope and raise ValueError.
"""

from __future__ import annotations

import math
from fractions import Fraction

from . import geometry as geo
from . import morse_category as mc
from .surface_model import load_collection
from .symbolic_kernel import _umul, _usub

EDGE_STEP = 1e-3        # spatial integration step in raw polytope units
MEETING_TOL = 1e-4      # leg endpoints must agree with the target this well
PATH_CAP = 100.0        # total path length budget per leg
CERT_GRID = 100         # side of the area-certificate sample grid


# ---------------------------------------------------------------------------
# carrier helpers


def _generic_face_point(component):
    """Face-point triples on the carrier for carrier-constant evaluations.

    Two points are returned when the carrier has room, so callers can guard
    the constancy assumption.
    """
    surface = component.surface
    if component.whole_polytope:
        return [("interior", (Fraction(1), Fraction(1)))]
    if component.edges:
        e = component.edges[0]
        return [("edge", e, Fraction(1)), ("edge", e, Fraction(1, 2))]
    if component.points:
        fp = component.points[0]
        if fp.kind == "interior":
            return [("interior", fp.st)]
        return [("edge", surface.edge_by_name(fp.edge), fp.zeta)]
    return [("vertex", component.vertices[0])]


def _carrier_candidate_points(component):
    """Exact raw points that can witness a carrier intersection."""
    pts = []
    for e in component.edges:
        pts.append(tuple(e.start))
        pts.append(tuple(e.end))
    pts.extend(tuple(v) for v in component.vertices)
    pts.extend(fp.coords for fp in component.points)
    return pts


def _on_closed_edge(edge, x):
    n = edge.normal
    if x[0] * n[0] + x[1] * n[1] != edge.offset:
        return False
    d = edge.tangent
    lo = edge.start[0] * d[0] + edge.start[1] * d[1]
    hi = edge.end[0] * d[0] + edge.end[1] * d[1]
    v = x[0] * d[0] + x[1] * d[1]
    return lo <= v <= hi


def _carrier_contains(component, x):
    if component.whole_polytope:
        return component.surface.contains(x)
    for e in component.edges:
        if _on_closed_edge(e, x):
            return True
    if tuple(x) in {tuple(v) for v in component.vertices}:
        return True
    return any(fp.coords == tuple(x) for fp in component.points)


def _carriers_meet(*components):
    """Whether all carriers share a point (exact closed-face test).

    Carriers are unions of closed edges, vertices, and isolated face points,
    so any common point of two distinct pieces is an edge endpoint, a listed
    vertex, or a listed point; checking those candidates is exhaustive.
    """
    candidates = []
    for comp in components:
        candidates.extend(_carrier_candidate_points(comp))
    if not candidates:
        # every carrier is the whole polytope
        return True
    for x in candidates:
        if all(_carrier_contains(comp, x) for comp in components):
            return True
    return False


# ---------------------------------------------------------------------------
# area constants


def _chart_grid(surface, n=CERT_GRID):
    key = ("chart_grid", n)
    if key not in surface._cache:
        _, st = geo.get_geometry(surface).interior_grid(n)
        surface._cache[key] = (st[:, 0], st[:, 1])
    return surface._cache[key]


def _potential_grid(surface, c, I, n=CERT_GRID):
    key = ("potential_grid", tuple(c), tuple(I), n)
    if key not in surface._cache:
        s, t = _chart_grid(surface, n)
        surface._cache[key] = geo.potential(surface, c, I).float_at_st(s, t)
    return surface._cache[key]


def _certify_area(surface, zgen, wgen, kappa):
    """Grid check that f_I + f_J stays above kappa over the polytope."""
    total = (_potential_grid(surface, zgen.c, zgen.I)
             + _potential_grid(surface, wgen.c, wgen.I))
    low = float(total.min())
    if low < kappa.to_float() - 1e-9:
        raise AssertionError(
            f"area certificate violated: grid minimum {low:.3e} under "
            f"kappa {kappa.to_float():.3e}")


def _admitted_component(surface, c, I):
    """The generating component at (c, I), or None."""
    hits = []
    for comp in mc.intersection_components(surface, c, I):
        verdict = mc.check_conditions(comp)
        if verdict["m1_ok"] and verdict["m2_ok"]:
            hits.append(comp)
    if len(hits) > 1:
        raise ArithmeticError(f"several generators share the label {I}")
    return hits[0] if hits else None


class CompositionEntry:
    """One nonzero product: sources, target, exact area, weight, tree."""

    __slots__ = ("surface", "triple", "z", "w", "target", "kappa", "weight",
                 "tree")

    def __init__(self, surface, z, w, target, kappa, triple=None):
        self.surface = surface
        self.triple = triple
        self.z = z
        self.w = w
        self.target = target
        self.kappa = kappa
        self.weight = kappa.exp_neg()
        self.tree = "trivial" if kappa.is_zero() else None

    @property
    def trivial(self):
        return self.kappa.is_zero()

    @property
    def weight_float(self):
        return float(self.weight)

    def __repr__(self):
        return (f"CompositionEntry({self.z.I} * {self.w.I} -> "
                f"{self.target.I}, weight {self.weight})")


def structure_constant(surface, zgen, wgen):
    """Compose two generators: the entry for the target label, or None.

    None means the product coefficient is zero because no generator lives
    at (c + c', I + J).  A nonzero entry carries
    kappa = (f_I + f_J)(target carrier), evaluated exactly, certified
    minimal on a sample grid, and classified trivial exactly when the three
    carriers share a point.
    """
    c_tot = tuple(a + b for a, b in zip(zgen.c, wgen.c))
    I_tot = (zgen.I[0] + wgen.I[0], zgen.I[1] + wgen.I[1])
    target = _admitted_component(surface, c_tot, I_tot)
    if target is None:
        return None

    # the section fields add exactly, so f_I + f_J - f_{I+J} is constant
    z1, z2 = geo.vector_field(surface, zgen.c, zgen.I)
    w1, w2 = geo.vector_field(surface, wgen.c, wgen.I)
    t1, t2 = geo.vector_field(surface, c_tot, I_tot)
    assert (z1 + w1 - t1).is_zero() and (z2 + w2 - t2).is_zero()

    fz = geo.potential(surface, zgen.c, zgen.I)
    fw = geo.potential(surface, wgen.c, wgen.I)
    values = [fz.value_at_face_point(p) + fw.value_at_face_point(p)
              for p in _generic_face_point(target)]
    kappa = values[0]
    assert all(v == kappa for v in values[1:]), \
        "area value varies along the target carrier"
    assert kappa.sign() >= 0
    assert kappa.is_zero() == _carriers_meet(zgen, wgen, target), \
        "trivial classification disagrees with carrier intersection"
    _certify_area(surface, zgen, wgen, kappa)
    return CompositionEntry(surface, zgen, wgen, target, kappa)


# ---------------------------------------------------------------------------
# gradient tree tracing


class _FloatRat:
    """Float horner form of a one-variable rational profile."""

    __slots__ = ("num", "den")

    def __init__(self, ur):
        self.num = [float(q) for q in ur.num] or [0.0]
        self.den = [float(q) for q in ur.den]

    def __call__(self, z):
        n = 0.0
        for q in reversed(self.num):
            n = n * z + q
        d = 0.0
        for q in reversed(self.den):
            d = d * z + q
        return n / d


class _EdgeWalk:
    """Downhill flow data on one closed edge.

    ``g`` is the pairing of the restricted field with the ccw tangent; it is
    the derivative of f in the edge's own flat coordinate, so the flow moves
    with d zeta / d tau = -g / (m' . d), where m is the raw parametrization.
    ``flat`` marks an edge on which g vanishes identically: f is constant
    there and the edge acts as a free connector between its endpoints.
    """

    __slots__ = ("edge", "g1", "g2", "x1f", "x2f", "dx1", "dx2", "d", "dlen",
                 "g0", "ginf", "flat")

    def __init__(self, surface, c, I, edge):
        p1, p2 = mc._field_edge_profiles(surface, c, I, edge)
        m1, m2 = geo.get_geometry(surface).moment_edge_profiles(edge)
        self.edge = edge
        self.g1, self.g2 = _FloatRat(p1), _FloatRat(p2)
        self.x1f, self.x2f = _FloatRat(m1), _FloatRat(m2)
        self.dx1, self.dx2 = _FloatRat(m1.deriv()), _FloatRat(m2.deriv())
        d = edge.tangent
        self.d = (float(d[0]), float(d[1]))
        self.dlen = math.hypot(*self.d)
        # exact tangential limits at the endpoints drive descent decisions
        self.g0 = p1.limit0() * d[0] + p2.limit0() * d[1]
        self.ginf = p1.limit_inf() * d[0] + p2.limit_inf() * d[1]
        # exact numerator of p1*d1 + p2*d2; empty means identically zero
        n1 = [q * d[0] for q in p1.num]
        n2 = [-q * d[1] for q in p2.num]
        self.flat = not _usub(_umul(n1, p2.den), _umul(n2, p1.den))

    def g(self, z):
        return self.g1(z) * self.d[0] + self.g2(z) * self.d[1]

    def x(self, z):
        return (self.x1f(z), self.x2f(z))

    def zdot(self, z):
        return -self.g(z) / (self.dx1(z) * self.d[0] + self.dx2(z) * self.d[1])

    def xspeed(self, z):
        return abs(self.g(z)) / self.dlen


def _edge_walk(surface, c, I, edge):
    key = ("edge_walk", tuple(c), tuple(I), edge.name)
    if key not in surface._cache:
        surface._cache[key] = _EdgeWalk(surface, c, I, edge)
    return surface._cache[key]


def _adjacent_edges(surface, v):
    v = tuple(v)
    return [e for e in surface.edges
            if tuple(e.start) == v or tuple(e.end) == v]


def _descending_edges(surface, c, I, v):
    """Edges along which the flow leaves the vertex, with the entry point.

    The tangential field limit at the vertex itself may degenerate to zero,
    so the decision combines the exact limit (must not be strictly uphill)
    with a probe one step inside the edge.
    """
    out = []
    for e in _adjacent_edges(surface, v):
        walk = _edge_walk(surface, c, I, e)
        if tuple(e.start) == tuple(v):
            z = _entry_parameter(walk, "start", EDGE_STEP)
            if walk.g0 <= 0 and walk.g(z) < -1e-13:
                out.append((e, z))
        else:
            z = _entry_parameter(walk, "end", EDGE_STEP)
            if walk.ginf >= 0 and walk.g(z) > 1e-13:
                out.append((e, z))
    return out


def _entry_parameter(walk, end, dist):
    """Edge parameter at raw distance ``dist`` from the given endpoint.

    Raw distance to either endpoint is strictly monotone in zeta (the edge
    is a straight segment), so bisection on a sign bracket converges.
    """
    v = walk.edge.start if end == "start" else walk.edge.end
    vx, vy = float(v[0]), float(v[1])

    def off(z):
        x, y = walk.x(z)
        return math.hypot(x - vx, y - vy) - dist

    if end == "start":
        a, b = 0.0, 1.0
        while off(b) < 0:
            b *= 2.0
    else:
        b = 1.0
        while off(b) < 0:
            b *= 0.5
        a = 2.0 * b
        while off(a) > 0:
            a *= 2.0
    # invariant: off(a) < 0 <= off(b)
    for _ in range(100):
        m = 0.5 * (a + b)
        if off(m) < 0:
            a = m
        else:
            b = m
    return 0.5 * (a + b)


def _polish_zero(walk, za, zb):
    """Root of the tangential field inside a sign bracket."""
    ga = walk.g(za)
    z = 0.5 * (za + zb)
    for _ in range(100):
        g = walk.g(z)
        if g == 0.0:
            return z
        if (ga > 0) == (g > 0):
            za, ga = z, g
        else:
            zb = z
        eps = 1e-9 * (1.0 + abs(z))
        dg = (walk.g(z + eps) - walk.g(z - eps)) / (2 * eps)
        zn = z - g / dg if dg else 0.5 * (za + zb)
        z = zn if min(za, zb) < zn < max(za, zb) else 0.5 * (za + zb)
        if abs(zb - za) < 1e-15 * (1.0 + abs(z)):
            break
    return z


def _trace_leg(surface, c, I, start, target_raw):
    """Integrate one incoming leg to its stationary endpoint.

    ``start`` is ("edge", edge, zeta) or ("vertex", coords).  Returns the
    per-edge raw segments and the endpoint.  RuntimeError("tree not found")
    when the downhill flow fails to reach the target.
    """
    tx, ty = float(target_raw[0]), float(target_raw[1])

    def near_target(p):
        return math.hypot(p[0] - tx, p[1] - ty) <= MEETING_TOL

    def from_vertex(v, walked, segs, seen):
        vf = (float(v[0]), float(v[1]))
        if near_target(vf):
            return segs, vf
        seen = seen | {tuple(v)}
        err = None
        for edge, z in _descending_edges(surface, c, I, v):
            try:
                return from_edge(edge, z, vf, walked + EDGE_STEP, segs, seen)
            except RuntimeError as exc:
                err = exc
        # flat adjacent edges are zero-cost connectors to their far vertex
        for edge in _adjacent_edges(surface, v):
            walk = _edge_walk(surface, c, I, edge)
            if not walk.flat:
                continue
            u = edge.end if tuple(edge.start) == tuple(v) else edge.start
            if tuple(u) in seen:
                continue
            uf = (float(u[0]), float(u[1]))
            hop = math.hypot(uf[0] - vf[0], uf[1] - vf[1])
            try:
                return from_vertex(u, walked + hop,
                                   segs + [(edge.name, vf, uf)], seen)
            except RuntimeError as exc:
                err = exc
        raise err or RuntimeError("tree not found: flow rests off target")

    def from_edge(edge, z, seg_from, walked, segs, seen):
        walk = _edge_walk(surface, c, I, edge)
        if seg_from is None:
            seg_from = walk.x(z)
        if walk.flat:
            here = walk.x(z)
            if near_target(here):
                return segs + [(edge.name, seg_from, here)], here
            err = None
            ends = sorted(
                (edge.start, edge.end),
                key=lambda v: math.hypot(float(v[0]) - tx, float(v[1]) - ty))
            for v in ends:
                if tuple(v) in seen:
                    continue
                vf = (float(v[0]), float(v[1]))
                slide = math.hypot(here[0] - vf[0], here[1] - vf[1])
                try:
                    return from_vertex(v, walked + slide,
                                       segs + [(edge.name, seg_from, vf)],
                                       seen)
                except RuntimeError as exc:
                    err = exc
            raise err or RuntimeError("tree not found: flow rests off target")
        g = walk.g(z)
        while walked < PATH_CAP:
            if abs(g) < 1e-13:
                end_pt = walk.x(z)
                if near_target(end_pt):
                    return segs + [(edge.name, seg_from, end_pt)], end_pt
                raise RuntimeError("tree not found: flow rests off target")
            v = walk.edge.start if walk.zdot(z) < 0 else walk.edge.end
            vx, vy = float(v[0]), float(v[1])
            here = walk.x(z)
            gap = math.hypot(here[0] - vx, here[1] - vy)
            if gap <= 1.5 * EDGE_STEP:
                return from_vertex(v, walked + gap,
                                   segs + [(edge.name, seg_from, (vx, vy))],
                                   seen)
            dt = EDGE_STEP / walk.xspeed(z)
            k1 = walk.zdot(z)
            k2 = walk.zdot(z + 0.5 * dt * k1)
            k3 = walk.zdot(z + 0.5 * dt * k2)
            k4 = walk.zdot(z + dt * k3)
            zn = z + dt * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
            # the parameter runs off to infinity at the far vertex; clamp it
            # so the profile evaluations stay finite
            if not math.isfinite(zn) or zn > 1e30:
                zn = 1e30
            if zn <= 0.0:
                sv = walk.edge.start
                return from_vertex(sv, walked + EDGE_STEP,
                                   segs + [(edge.name, seg_from,
                                            (float(sv[0]), float(sv[1])))],
                                   seen)
            # a sign change of g across the step or inside the RK4 stencil
            # brackets the stationary point the flow is converging to
            for zc in (zn, z + 0.5 * dt * k1, z + 0.5 * dt * k2,
                       z + dt * k3):
                if zc > 0 and math.isfinite(zc) \
                        and (walk.g(zc) > 0) != (g > 0):
                    zs = _polish_zero(walk, z, zc)
                    end_pt = walk.x(zs)
                    if near_target(end_pt):
                        return segs + [(edge.name, seg_from, end_pt)], end_pt
                    raise RuntimeError(
                        "tree not found: flow rests off target")
            z, g = zn, walk.g(zn)
            walked += EDGE_STEP
        raise RuntimeError("tree not found: path budget exhausted")

    if start[0] == "vertex":
        return from_vertex(start[1], 0.0, [], frozenset())
    _, edge, z = start
    return from_edge(edge, float(z), None, 0.0, [], frozenset())


def _leg_source(component, target_faces):
    """Starting face point of a leg: the carrier piece facing the target.

    Edge sources start at face parameter 1/2, one third of the way along
    the edge in normalized length.
    """
    if component.points:
        fp = component.points[0]
        if fp.kind == "interior":
            raise ValueError("unsupported: tree leg from an interior point")
        return ("edge", component.surface.edge_by_name(fp.edge),
                float(fp.zeta))
    verts = component.standalone_vertices()
    if verts and not component.edges:
        return ("vertex", verts[0])
    target_pts = set()
    for f in target_faces:
        target_pts.add(tuple(f.start))
        target_pts.add(tuple(f.end))
    for e in component.edges:
        if tuple(e.start) in target_pts or tuple(e.end) in target_pts:
            return ("edge", e, 0.5)
    return ("edge", component.edges[0], 0.5)


def _target_point(target):
    """Exact raw meeting point and the closed faces that hold it."""
    surface = target.surface
    if target.points:
        fp = target.points[0]
        faces = [surface.edge_by_name(fp.edge)] if fp.kind == "edge" else []
        return fp.coords, faces
    if target.vertices and not target.edges:
        v = target.vertices[0]
        return tuple(v), _adjacent_edges(surface, v)
    e = target.edges[0]
    m1, m2 = geo.get_geometry(surface).moment_edge_profiles(e)
    return (m1.eval(1), m2.eval(1)), list(target.edges)


class TreeTrace:
    """Traced legs of one product, in display coordinates."""

    __slots__ = ("legs", "meeting", "root")

    def __init__(self, surface, leg_segments, ends, root_raw):
        self.legs = [
            [(name, tuple(map(float, surface.to_display(a))),
              tuple(map(float, surface.to_display(b))))
             for name, a, b in segs]
            for segs in leg_segments]
        mx = sum(e[0] for e in ends) / len(ends)
        my = sum(e[1] for e in ends) / len(ends)
        self.meeting = tuple(map(float, surface.to_display((mx, my))))
        self.root = tuple(surface.to_display(
            (Fraction(root_raw[0]), Fraction(root_raw[1]))))

    def face_path(self):
        return [[name for name, _, _ in leg] for leg in self.legs]

    def __repr__(self):
        return f"TreeTrace(path {self.face_path()}, meet {self.meeting})"


def _leg_sources(component, target_faces, root_raw):
    """Candidate starting points for one leg, preferred first.

    The generic one-third point of the facing carrier edge comes first; the
    carrier's endpoint vertices serve as fallbacks for flows that rest at a
    stationary point in the middle of the carrier itself.
    """
    sources = [_leg_source(component, target_faces)]
    tx, ty = float(root_raw[0]), float(root_raw[1])
    fallbacks = set()
    for e in component.edges:
        fallbacks.add(tuple(e.start))
        fallbacks.add(tuple(e.end))
    for v in sorted(fallbacks,
                    key=lambda p: math.hypot(float(p[0]) - tx,
                                             float(p[1]) - ty)):
        sources.append(("vertex", v))
    return sources


def trace_tree(surface, zgen, wgen, target):
    """Trace both incoming legs of a product to their common endpoint.

    The legs follow the downhill flow of f_I + f_J restricted to the closed
    faces; both must stop within MEETING_TOL of the target carrier point
    and of each other.
    """
    c_tot = tuple(a + b for a, b in zip(zgen.c, wgen.c))
    I_tot = (zgen.I[0] + wgen.I[0], zgen.I[1] + wgen.I[1])
    root_raw, faces = _target_point(target)
    legs = []
    ends = []
    for gen in (zgen, wgen):
        segs = end = err = None
        for src in _leg_sources(gen, faces, root_raw):
            try:
                segs, end = _trace_leg(surface, c_tot, I_tot, src, root_raw)
                break
            except RuntimeError as exc:
                err = exc
        if end is None:
            raise err
        legs.append(segs)
        ends.append(end)
    if math.hypot(ends[0][0] - ends[1][0], ends[0][1] - ends[1][1]) \
            > MEETING_TOL:
        raise RuntimeError("tree not found: legs do not meet")
    return TreeTrace(surface, legs, ends, root_raw)


# ---------------------------------------------------------------------------
# full tables


class CompositionTable:
    """All products over an ordered collection, in deterministic order."""

    __slots__ = ("surface", "collection", "homs", "entries", "_index")

    def __init__(self, surface, collection, homs, entries):
        self.surface = surface
        self.collection = collection
        self.homs = homs
        self.entries = entries
        self._index = {}
        for triple, lst in entries.items():
            for ent in lst:
                self._index[triple + (ent.z.I, ent.w.I)] = ent

    def entry(self, i, j, k, I, J):
        """The product entry, or None when the coefficient is zero."""
        return self._index.get((i, j, k, tuple(I), tuple(J)))

    def nontrivial(self):
        return [e for lst in self.entries.values() for e in lst
                if not e.trivial]

    def __iter__(self):
        for triple in sorted(self.entries):
            yield from self.entries[triple]


def compose_table(surface, collection=None, trace=True):
    """Products of every composable generator pair of the collection."""
    collection = [tuple(c) for c in load_collection(surface, collection)]
    n = len(collection)
    homs = {}
    for i in range(n):
        for j in range(i, n):
            homs[(i, j)] = mc.hom_space(surface, collection[i], collection[j])
    entries = {}
    for i in range(n):
        for j in range(i, n):
            for k in range(j, n):
                lst = []
                for zg in homs[(i, j)].generators:
                    for wg in homs[(j, k)].generators:
                        ent = structure_constant(surface, zg, wg)
                        if ent is None:
                            continue
                        ent.triple = (i, j, k)
                        if trace and not ent.trivial:
                            # a failed trace leaves the entry valid; the
                            # weight stands on the area identity alone
                            try:
                                ent.tree = trace_tree(surface, zg, wg,
                                                      ent.target)
                            except RuntimeError:
                                ent.tree = None
                        lst.append(ent)
                lst.sort(key=lambda e: (e.z.I, e.w.I))
                entries[(i, j, k)] = lst
    return CompositionTable(surface, collection, homs, entries)


def verify_associativity(table):
    """Exact bracketing equality over every composable generator triple.

    Both routes accumulate area constants exactly; a mismatch, including
    one route vanishing while the other does not, raises AssertionError.
    """
    n = len(table.collection)
    checked = 0
    for i in range(n):
        for j in range(i, n):
            for k in range(j, n):
                for l in range(k, n):
                    for a in table.homs[(i, j)].generators:
                        for b in table.homs[(j, k)].generators:
                            for c in table.homs[(k, l)].generators:
                                checked += 1
                                _check_triple(table, (i, j, k, l), a, b, c)
    return {"triples_checked": checked, "ok": True}


def _bracket_left(table, q, a, b, c):
    i, j, k, l = q
    ab = table.entry(i, j, k, a.I, b.I)
    if ab is None:
        return None
    abc = table.entry(i, k, l, (a.I[0] + b.I[0], a.I[1] + b.I[1]), c.I)
    if abc is None:
        return None
    return ab.kappa + abc.kappa


def _bracket_right(table, q, a, b, c):
    i, j, k, l = q
    bc = table.entry(j, k, l, b.I, c.I)
    if bc is None:
        return None
    abc = table.entry(i, j, l, a.I, (b.I[0] + c.I[0], b.I[1] + c.I[1]))
    if abc is None:
        return None
    return bc.kappa + abc.kappa


def _check_triple(table, q, a, b, c):
    left = _bracket_left(table, q, a, b, c)
    right = _bracket_right(table, q, a, b, c)
    if left is None and right is None:
        return
    if left is None or right is None or left != right:
        raise AssertionError(
            f"associativity mismatch on {q}: {a.I} * {b.I} * {c.I} "
            f"gives {left} vs {right}")


# ---------------------------------------------------------------------------
# serialization


def _frac_str(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else \
        f"{q.numerator}/{q.denominator}"


def _round_pt(p, nd=6):
    return [round(float(p[0]), nd), round(float(p[1]), nd)]


def tree_json(tree):
    if tree == "trivial":
        return "trivial"
    if tree is None:
        return None
    return {
        "legs": [
            [{"face": name, "start": _round_pt(a), "end": _round_pt(b)}
             for name, a, b in leg]
            for leg in tree.legs],
        "meeting": _round_pt(tree.meeting),
        "root": [_frac_str(tree.root[0]), _frac_str(tree.root[1])],
    }


def entry_json(entry):
    weight = entry.weight
    return {
        "I": list(entry.z.I),
        "J": list(entry.w.I),
        "target": {
            "I": list(entry.target.I),
            "carrier": mc.carrier_json(entry.surface, entry.target),
        },
        "kappa": {"terms": [[_frac_str(q), p]
                            for q, p in entry.kappa.terms()]},
        "weight": _frac_str(weight) if isinstance(weight, (int, Fraction))
        else repr(float(weight)),
        "weight_float": float(weight),
        "tree": tree_json(entry.tree),
    }


def table_json(table):
    out = []
    for triple in sorted(table.entries):
        i, j, k = triple
        out.append({
            "triple": [list(table.collection[i]), list(table.collection[j]),
                       list(table.collection[k])],
            "entries": [entry_json(e) for e in table.entries[triple]],
        })
    return out
