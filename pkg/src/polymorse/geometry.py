"""Moment-map geometry and normalized potentials.

Everything analytic lives in the positive chart coordinates ``(s, t)`` with
flat coordinates ``x = (x1, x2)``, ``s = e^{2 x1}``, ``t = e^{2 x2}``.  The
moment map is the gradient of the Kahler potential ``psi = sum C_k log Q_k``
taken in ``x``; it identifies the interior of the moment polytope P with the
``(s, t)`` chart.  Polytope-coordinate queries route through the inverse map.

The derivative operators used throughout are ``D1 = s d/ds`` and
``D2 = t d/dt``; in flat coordinates ``d/dx_j = 2 D_j``.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .symbolic_kernel import (
    DivergentLimit,
    LogValue,
    Poly2,
    RatFunc2,
    _as_fraction,
    _usub,
    edge_profile,
    rational_roots_positive,
)


def _is_exact_pair(p):
    return all(isinstance(x, (int, Fraction)) for x in p)


class _FactorData:
    """Per-factor polynomial bundle: Q and its D-derivatives."""

    __slots__ = ("coeff", "q", "d1", "d2", "d11", "d12", "d22",
                 "field_s", "field_t", "mtilde")

    def __init__(self, factor):
        self.coeff = factor.coeff
        q = factor.q_poly()
        self.q = q
        self.d1 = q.dmul_s()
        self.d2 = q.dmul_t()
        self.d11 = self.d1.dmul_s()
        self.d12 = self.d1.dmul_t()
        self.d22 = self.d2.dmul_t()
        self.field_s = RatFunc2(self.d1, q)
        self.field_t = RatFunc2(self.d2, q)
        q2 = q * q
        self.mtilde = (
            RatFunc2(self.d11 * q - self.d1 * self.d1, q2),
            RatFunc2(self.d12 * q - self.d1 * self.d2, q2),
            RatFunc2(self.d22 * q - self.d2 * self.d2, q2),
        )


class Geometry:
    """Cached exact and numeric moment data for one surface."""

    def __init__(self, surface):
        self.surface = surface
        self.factors = [_FactorData(f) for f in surface.factors]
        two = Fraction(2)
        self.moment = (
            _sum_rat(f.field_s.scale(two * f.coeff) for f in self.factors),
            _sum_rat(f.field_t.scale(two * f.coeff) for f in self.factors),
        )
        four = Fraction(4)
        self.metric = tuple(
            _sum_rat(f.mtilde[i].scale(four * f.coeff) for f in self.factors)
            for i in range(3))
        g11, g12, g22 = self.metric
        self.metric_det = g11 * g22 - g12 * g12
        self._sections = {}
        self._section_edge_profiles = {}
        self._hessians = {}
        self._jacs = {}
        self._jac_edge_profiles = {}
        self._moment_edge_profiles = {}
        self._grids = {}

    # -- per-bundle symbolic bundles ---------------------------------------

    def section(self, c):
        """Components of y/2pi for L(c): sum_k c_k * (D_j Q_k / Q_k)."""
        c = self.surface.check_bundle(c)
        if c not in self._sections:
            self._sections[c] = (
                _sum_rat(f.field_s.scale(ck) for ck, f in zip(c, self.factors) if ck),
                _sum_rat(f.field_t.scale(ck) for ck, f in zip(c, self.factors) if ck),
            )
        return self._sections[c]

    def section_edge_profiles(self, c, edge):
        """Tropical restriction of both section components to an edge."""
        key = (self.surface.check_bundle(c), edge.name)
        if key not in self._section_edge_profiles:
            y1, y2 = self.section(key[0])
            try:
                self._section_edge_profiles[key] = (
                    edge_profile(y1, edge.normal), edge_profile(y2, edge.normal))
            except DivergentLimit as exc:
                raise AssertionError(
                    "section components are bounded; divergent face limit") from exc
        return self._section_edge_profiles[key]

    def hessian(self, c):
        """Flat Hessian of f_I (independent of I): 2 sum c_k Mtilde_k."""
        c = self.surface.check_bundle(c)
        if c not in self._hessians:
            self._hessians[c] = tuple(
                _sum_rat(f.mtilde[i].scale(2 * ck)
                         for ck, f in zip(c, self.factors) if ck)
                for i in range(3))
        return self._hessians[c]

    def jac(self, c):
        """Flow linearization J = H G^{-1} in polytope coordinates.

        Returns a dict with the four entries, det, and trace as RatFunc2.
        """
        c = self.surface.check_bundle(c)
        if c not in self._jacs:
            h11, h12, h22 = self.hessian(c)
            g11, g12, g22 = self.metric
            dg = self.metric_det
            self._jacs[c] = {
                "j11": (h11 * g22 - h12 * g12) / dg,
                "j12": (h12 * g11 - h11 * g12) / dg,
                "j21": (h12 * g22 - h22 * g12) / dg,
                "j22": (h22 * g11 - h12 * g12) / dg,
                "det": (h11 * h22 - h12 * h12) / dg,
                "tr": (h11 * g22 - (h12 * g12).scale(2) + h22 * g11) / dg,
            }
        return self._jacs[c]

    def jac_edge_profiles(self, c, edge):
        key = (c, edge.name)
        if key not in self._jac_edge_profiles:
            j = self.jac(self.surface.check_bundle(c))
            prof = {}
            for name in ("j11", "j12", "j21", "j22", "det", "tr"):
                try:
                    prof[name] = edge_profile(j[name], edge.normal)
                except DivergentLimit:
                    prof[name] = None
            self._jac_edge_profiles[key] = prof
        return self._jac_edge_profiles[key]

    def moment_edge_profiles(self, edge):
        """Exact edge parametrization zeta -> raw coordinates."""
        if edge.name not in self._moment_edge_profiles:
            self._moment_edge_profiles[edge.name] = (
                edge_profile(self.moment[0], edge.normal),
                edge_profile(self.moment[1], edge.normal),
            )
        return self._moment_edge_profiles[edge.name]

    # -- numeric evaluation -------------------------------------------------

    def moment_float(self, s, t):
        y1 = 0.0
        y2 = 0.0
        for f in self.factors:
            qv = f.q.eval_float(s, t)
            ck = 2.0 * float(f.coeff)
            y1 = y1 + ck * f.d1.eval_float(s, t) / qv
            y2 = y2 + ck * f.d2.eval_float(s, t) / qv
        return y1, y2

    def metric_float(self, s, t):
        g11 = 0.0
        g12 = 0.0
        g22 = 0.0
        for f in self.factors:
            qv = f.q.eval_float(s, t)
            ck = 4.0 * float(f.coeff)
            d1 = f.d1.eval_float(s, t)
            d2 = f.d2.eval_float(s, t)
            g11 = g11 + ck * (f.d11.eval_float(s, t) * qv - d1 * d1) / qv**2
            g12 = g12 + ck * (f.d12.eval_float(s, t) * qv - d1 * d2) / qv**2
            g22 = g22 + ck * (f.d22.eval_float(s, t) * qv - d2 * d2) / qv**2
        return g11, g12, g22

    def invert_points(self, ys, tol=1e-12, max_iter=200):
        """Vectorized Newton inversion of the moment map.

        ``ys``: array (m, 2) of strictly interior raw points.  Returns the
        flat-log coordinates u = (log s, log t), shape (m, 2).
        """
        ys = np.asarray(ys, dtype=float)
        u = np.zeros_like(ys)
        target1, target2 = ys[:, 0], ys[:, 1]
        for _ in range(max_iter):
            s = np.exp(u[:, 0])
            t = np.exp(u[:, 1])
            y1, y2 = self.moment_float(s, t)
            r1 = y1 - target1
            r2 = y2 - target2
            res = np.maximum(np.abs(r1), np.abs(r2))
            if res.max() <= tol:
                return u
            g11, g12, g22 = self.metric_float(s, t)
            det = g11 * g22 - g12 * g12
            # Newton step: (G/2) du = -r
            du1 = -2.0 * (g22 * r1 - g12 * r2) / det
            du2 = -2.0 * (g11 * r2 - g12 * r1) / det
            lam = np.ones_like(r1)
            active = res > tol
            for _ in range(40):
                s_new = np.exp(u[:, 0] + lam * du1)
                t_new = np.exp(u[:, 1] + lam * du2)
                y1n, y2n = self.moment_float(s_new, t_new)
                res_new = np.maximum(np.abs(y1n - target1), np.abs(y2n - target2))
                bad = active & ~(res_new < res)
                if not bad.any():
                    break
                lam[bad] *= 0.5
            u = u + np.column_stack([lam * du1, lam * du2])
        s = np.exp(u[:, 0])
        t = np.exp(u[:, 1])
        y1, y2 = self.moment_float(s, t)
        res = np.maximum(np.abs(y1 - target1), np.abs(y2 - target2))
        if res.max() > tol:
            raise RuntimeError(
                f"inverse moment map did not converge (worst residual {res.max():.3e})")
        return u

    def interior_grid(self, n):
        """Raw points and (s, t) values for the n x n interior sample grid."""
        if n not in self._grids:
            (x0, y0), (x1, y1) = self.surface.bbox()
            x0, y0, x1, y1 = map(float, (x0, y0, x1, y1))
            xs = x0 + (np.arange(n) + 0.5) * (x1 - x0) / n
            ys = y0 + (np.arange(n) + 0.5) * (y1 - y0) / n
            gx, gy = np.meshgrid(xs, ys)
            pts = np.column_stack([gx.ravel(), gy.ravel()])
            keep = np.ones(len(pts), dtype=bool)
            for e in self.surface.edges:
                slack = float(e.offset) - pts[:, 0] * e.normal[0] - pts[:, 1] * e.normal[1]
                keep &= slack > 1e-9
            pts = pts[keep]
            u = self.invert_points(pts)
            self._grids[n] = (pts, np.exp(u))
        return self._grids[n]


def _sum_rat(items):
    total = None
    for x in items:
        total = x if total is None else total + x
    return RatFunc2.zero() if total is None else total


def get_geometry(surface):
    if "geometry" not in surface._cache:
        surface._cache["geometry"] = Geometry(surface)
    return surface._cache["geometry"]


# ---------------------------------------------------------------------------
# public operations


def moment_map(surface, x_flat):
    """Raw polytope coordinates of the flat point x = (x1, x2)."""
    geo = get_geometry(surface)
    st = []
    exact = True
    for x in x_flat:
        if isinstance(x, (int, Fraction)) and x == 0:
            st.append(Fraction(1))
        else:
            st.append(math.exp(2.0 * float(x)))
            exact = False
    s, t = st
    if exact:
        return (geo.moment[0].eval_frac(s, t), geo.moment[1].eval_frac(s, t))
    s, t = float(s), float(t)
    y1, y2 = geo.moment_float(s, t)
    return (float(y1), float(y2))


def moment_map_st(surface, s, t):
    """Moment map directly in chart coordinates; exact at rational (s, t)."""
    geo = get_geometry(surface)
    if isinstance(s, (int, Fraction)) and isinstance(t, (int, Fraction)):
        return (geo.moment[0].eval_frac(s, t), geo.moment[1].eval_frac(s, t))
    return tuple(map(float, geo.moment_float(float(s), float(t))))


def inverse_moment_map(surface, x_poly, tol=1e-12):
    """Flat coordinates of a strictly interior polytope point."""
    slacks = surface.point_slacks(x_poly)
    if min(slacks) <= 0:
        raise ValueError("not interior")
    geo = get_geometry(surface)
    u = geo.invert_points(np.array([[float(x_poly[0]), float(x_poly[1])]]), tol=tol)
    return (u[0, 0] / 2.0, u[0, 1] / 2.0)


def lagrangian_section(surface, c, st=None, edge=None):
    """The section pair y/2pi of L(c).

    With ``st`` a positive chart point: exact rationals (rational input) or
    floats.  With ``edge``: the pair of face profiles in the edge parameter
    zeta, obtained by tropical restriction.
    """
    geo = get_geometry(surface)
    if edge is not None:
        if isinstance(edge, str):
            edge = surface.edge_by_name(edge)
        return geo.section_edge_profiles(tuple(c), edge)
    y1, y2 = geo.section(tuple(c))
    s, t = st
    if isinstance(s, (int, Fraction)) and isinstance(t, (int, Fraction)):
        return (y1.eval_frac(s, t), y2.eval_frac(s, t))
    return (y1.eval_float(float(s), float(t)), y2.eval_float(float(s), float(t)))


def vector_field(surface, c, I):
    """Gradient field of f_I in polytope coordinates (2pi dropped)."""
    geo = get_geometry(surface)
    y1, y2 = geo.section(tuple(c))
    i1, i2 = I
    return (y1 - RatFunc2.from_frac(i1), y2 - RatFunc2.from_frac(i2))


def edge_point_at(surface, edge, zeta):
    """Raw coordinates of the edge point with face parameter zeta."""
    if isinstance(edge, str):
        edge = surface.edge_by_name(edge)
    m1, m2 = get_geometry(surface).moment_edge_profiles(edge)
    if isinstance(zeta, (int, Fraction)):
        return (m1.eval(zeta), m2.eval(zeta))
    return (m1.eval_float(zeta), m2.eval_float(zeta))


def edge_param_at(surface, edge, point):
    """Face parameter zeta of a raw point on the closed edge.

    Exact for rational points; the endpoints map to 0 and +inf (math.inf).
    """
    if isinstance(edge, str):
        edge = surface.edge_by_name(edge)
    if tuple(point) == tuple(edge.start):
        return Fraction(0)
    if tuple(point) == tuple(edge.end):
        return math.inf
    m1, m2 = get_geometry(surface).moment_edge_profiles(edge)
    d = edge.tangent
    prof = m1 if d[0] else m2
    coord = _as_fraction(point[0] if d[0] else point[1])
    num = _usub(prof.num, [coord * q for q in prof.den])
    if not num:
        raise ValueError(f"point {point} does not pin a parameter on {edge.name}")
    roots = rational_roots_positive(num)
    if not roots:
        raise ValueError(f"point {point} does not lie on edge {edge.name}")
    if len(roots) > 1:
        raise ArithmeticError(f"edge parameter not determined for {point}")
    z = roots[0]
    p1, p2 = m1.eval(z), m2.eval(z)
    if (p1, p2) != (_as_fraction(point[0]), _as_fraction(point[1])):
        raise ValueError(f"point {point} does not lie on edge {edge.name}")
    return z


# ---------------------------------------------------------------------------
# potentials


class PotentialFI:
    """Normalized potential f_I = (1/2) log F + const with min over P = 0.

    F = prod Q_k^{c_k} * s^{-i1} t^{-i2}; the normalization constant is an
    exact LogValue.  Construction fails with "not continuous on P" when
    e^{-f_I} has no continuous extension to the closed polytope, i.e. when F
    has a zero limit on some face.
    """

    __slots__ = ("surface", "c", "I", "F", "const", "min_witness",
                 "_edge_profiles", "_geo")

    def __init__(self, surface, c, I):
        self.surface = surface
        self.c = surface.check_bundle(c)
        self.I = (int(I[0]), int(I[1]))
        self._geo = get_geometry(surface)
        num = Poly2.const(1)
        den = Poly2.const(1)
        for ck, f in zip(self.c, self._geo.factors):
            if ck > 0:
                num = num * f.q.pow(ck)
            elif ck < 0:
                den = den * f.q.pow(-ck)
        i1, i2 = self.I
        num = num * Poly2.monomial(max(0, -i1), max(0, -i2))
        den = den * Poly2.monomial(max(0, i1), max(0, i2))
        self.F = RatFunc2(num, den)
        self._edge_profiles = {}
        self.const, self.min_witness = self._normalize()

    # F restricted to an edge, cached; None marks a divergent profile
    def edge_profile(self, edge):
        if isinstance(edge, str):
            edge = self.surface.edge_by_name(edge)
        if edge.name not in self._edge_profiles:
            try:
                prof = edge_profile(self.F, edge.normal)
            except DivergentLimit:
                prof = None
            self._edge_profiles[edge.name] = prof
        return self._edge_profiles[edge.name]

    def _normalize(self):
        nm, dm = self.F.num.c, self.F.den.c
        if len(nm) == 1 and len(dm) == 1 and next(iter(nm)) == next(iter(dm)):
            # constant F: the potential is identically zero after shifting
            q = next(iter(nm.values())) / next(iter(dm.values()))
            where = ("interior", (Fraction(1), Fraction(1)))
            return LogValue.from_log(q, Fraction(-1, 2)), \
                {"value": q, "where": where}
        candidates = []
        vertex_values = {}
        for edge in self.surface.edges:
            prof = self.edge_profile(edge)
            if prof is None:
                continue
            if prof.is_identically_zero():
                raise ValueError("not continuous on P")
            for vertex, limit in ((edge.start, prof.limit0),
                                  (edge.end, prof.limit_inf)):
                try:
                    v = limit()
                except DivergentLimit:
                    continue
                if v == 0:
                    raise ValueError("not continuous on P")
                vertex_values.setdefault(vertex, v)
                candidates.append((v, ("vertex", vertex)))
            d = prof.deriv()
            if not d.is_identically_zero():
                for z in d.positive_roots():
                    candidates.append((prof.eval(z), ("edge", edge.name, z)))
        for s, t in interior_field_zeros(self.surface, self.c, self.I):
            candidates.append((self.F.eval_frac(s, t), ("interior", (s, t))))
        best = min(candidates, key=lambda kv: kv[0])
        const = LogValue.from_log(best[0], Fraction(-1, 2))
        return const, {"value": best[0], "where": best[1]}

    # -- evaluation ----------------------------------------------------------

    def value_st(self, s, t):
        """Exact f_I value at a rational chart point, as a LogValue."""
        return LogValue.from_log(self.F.eval_frac(s, t), Fraction(1, 2)) + self.const

    def value_on_edge(self, edge, zeta):
        prof = self.edge_profile(edge)
        if prof is None:
            raise DivergentLimit("f_I is +infinity on this face")
        return LogValue.from_log(prof.eval(zeta), Fraction(1, 2)) + self.const

    def value_at_vertex(self, vertex):
        vertex = tuple(vertex)
        for edge in self.surface.edges:
            limit = None
            if tuple(edge.start) == vertex:
                prof = self.edge_profile(edge)
                limit = prof.limit0 if prof is not None else None
            elif tuple(edge.end) == vertex:
                prof = self.edge_profile(edge)
                limit = prof.limit_inf if prof is not None else None
            if limit is None:
                continue
            try:
                return LogValue.from_log(limit(), Fraction(1, 2)) + self.const
            except DivergentLimit:
                continue
        raise DivergentLimit("f_I is +infinity at this vertex")

    def value_at_face_point(self, fp):
        """f_I at a FacePoint-style triple; see morse_category.FacePoint."""
        kind = fp[0]
        if kind == "interior":
            return self.value_st(*fp[1])
        if kind == "edge":
            return self.value_on_edge(fp[1], fp[2])
        if kind == "vertex":
            return self.value_at_vertex(fp[1])
        raise ValueError(f"unknown face point kind {kind!r}")

    def float_at_st(self, s, t):
        """Float f_I on chart values; s, t may be numpy arrays."""
        return 0.5 * np.log(self.F.num.eval_float(s, t) / self.F.den.eval_float(s, t)) \
            + self.const.to_float()

    def __repr__(self):
        return f"PotentialFI(c={self.c}, I={self.I}, const={self.const.pretty()})"


def potential(surface, c, I):
    key = ("potential", tuple(c), tuple(I))
    if key not in surface._cache:
        surface._cache[key] = PotentialFI(surface, c, I)
    return surface._cache[key]


# ---------------------------------------------------------------------------
# interior field zeros


def _interior_zero_possible(surface, c, I):
    """Screen for interior gradient zeros by tropical support numbers.

    Each chart value of D Q_k / Q_k is a convex combination of the exponent
    vectors of Q_k, so the pairing of the field with a direction d is bounded
    above by the signed support numbers minus <I, d>.  When that bound is
    nonpositive in some direction (strictly, or weakly with a factor whose
    exponents actually spread along d) the field cannot vanish in the chart.
    """
    geo = get_geometry(surface)
    dirs = []
    for edge in surface.edges:
        n = (Fraction(edge.normal[0]), Fraction(edge.normal[1]))
        dirs.append(n)
        dirs.append((-n[0], -n[1]))
    for d in dirs:
        bound = -(I[0] * d[0] + I[1] * d[1])
        spread = False
        for ck, f in zip(c, geo.factors):
            if not ck:
                continue
            vals = [a * d[0] + b * d[1] for (a, b) in f.q.c]
            top = max(vals) if ck > 0 else min(vals)
            bound += ck * top
            if min(vals) != max(vals):
                spread = True
        if bound < 0 or (bound == 0 and spread):
            return False
    return True


def interior_field_zeros(surface, c, I):
    """Exact interior zeros of the gradient field of f_I.

    Multi-start root finding in log coordinates, then rational snapping with
    exact verification.  Ambiguous near-zeros raise; a clean empty result is
    a valid outcome.
    """
    c = surface.check_bundle(c)
    I = (int(I[0]), int(I[1]))
    key = ("field_zeros", c, I)
    if key in surface._cache:
        return surface._cache[key]
    geo = get_geometry(surface)
    x1, x2 = vector_field(surface, c, I)
    if x1.is_zero() and x2.is_zero():
        raise ValueError("field vanishes identically")
    if not _interior_zero_possible(surface, c, I):
        surface._cache[key] = []
        return []
    h11, h12, h22 = geo.hessian(c)
    box = 25.0  # |log s|, |log t| beyond this is boundary territory

    def _st(u):
        v = np.clip(u, -3 * box, 3 * box)
        return math.exp(v[0]), math.exp(v[1])

    def fun(u):
        s, t = _st(u)
        return np.array([x1.eval_float(s, t), x2.eval_float(s, t)])

    def jac(u):
        s, t = _st(u)
        return 0.5 * np.array([
            [h11.eval_float(s, t), h12.eval_float(s, t)],
            [h12.eval_float(s, t), h22.eval_float(s, t)]])

    from scipy.optimize import root

    found = []
    stalled = []
    grid = np.linspace(-7.0, 7.0, 9)
    for u1 in grid:
        for u2 in grid:
            sol = root(fun, np.array([u1, u2]), jac=jac, method="hybr",
                       options={"maxfev": 400})
            if np.max(np.abs(sol.x)) > box:
                # runaway toward a face; face and vertex candidates own it
                continue
            r = float(np.max(np.abs(fun(sol.x))))
            if r < 1e-11:
                if not any(np.max(np.abs(sol.x - f)) < 1e-8 for f in found):
                    found.append(sol.x.copy())
            elif r < 1e-6:
                stalled.append((sol.x.copy(), r))
    zeros = []
    for u in found:
        s = Fraction(math.exp(u[0])).limit_denominator(10**8)
        t = Fraction(math.exp(u[1])).limit_denominator(10**8)
        if s > 0 and t > 0 and x1.eval_frac(s, t) == 0 and x2.eval_frac(s, t) == 0:
            zeros.append((s, t))
        else:
            raise ArithmeticError(
                "interior solve inconclusive: converged zero is not rational "
                f"near (s,t)=({math.exp(u[0]):.6g},{math.exp(u[1]):.6g})")
    if stalled and not any(
            any(np.max(np.abs(u - f)) < 1e-6 for f in found)
            for u, _ in stalled):
        u, r = min(stalled, key=lambda p: p[1])
        raise ArithmeticError(
            "interior solve inconclusive: residual stalls at "
            f"{r:.2e} near (s,t)=({math.exp(u[0]):.6g},{math.exp(u[1]):.6g})")
    zeros = sorted(set(zeros))
    surface._cache[key] = zeros
    return zeros


# ---------------------------------------------------------------------------
# jacobian / flow linearization


class JacobianData:
    """Linearization of the gradient flow at a point of closure(P).

    ``det``/``tr`` are exact Fractions on the exact path, floats from the
    finite-difference fallback (method "fd").  ``matrix`` is float, for
    eigen-direction extraction; None when entries were unavailable.
    """

    __slots__ = ("matrix", "det", "tr", "method")

    def __init__(self, matrix, det, tr, method):
        self.matrix = matrix
        self.det = det
        self.tr = tr
        self.method = method

    def negative_count(self, zero_tol=None):
        """Number of negative eigenvalues, by det/trace signs."""
        det, tr = self.det, self.tr
        if zero_tol is None and isinstance(det, Fraction) and isinstance(tr, Fraction):
            ds = (det > 0) - (det < 0)
            ts = (tr > 0) - (tr < 0)
        else:
            zt = 1e-9 if zero_tol is None else zero_tol
            ds = 0 if abs(det) <= zt else (1 if det > 0 else -1)
            ts = 0 if abs(tr) <= zt else (1 if tr > 0 else -1)
        if ds < 0:
            return 1
        if ds > 0:
            return 2 if ts < 0 else 0
        return 1 if ts < 0 else 0

    def stable_directions(self, zero_tol=1e-9):
        """Unit eigenvectors for negative eigenvalues of the float matrix."""
        if self.matrix is None:
            return None
        m = np.asarray(self.matrix, dtype=float)
        lam, vecs = np.linalg.eig(m)
        out = []
        for i in range(2):
            if lam[i].real < -zero_tol and abs(lam[i].imag) < 1e-9:
                v = vecs[:, i].real
                out.append(v / np.linalg.norm(v))
        return out

    def __repr__(self):
        return f"JacobianData(det={self.det}, tr={self.tr}, {self.method})"


def _eval_profile_entry(prof, zeta):
    if prof is None:
        raise DivergentLimit("jacobian entry diverges on this face")
    return prof.eval(zeta)


def jacobian_exact_interior(surface, c, s, t):
    j = get_geometry(surface).jac(tuple(c))
    m = [[float(j["j11"].eval_frac(s, t)), float(j["j12"].eval_frac(s, t))],
         [float(j["j21"].eval_frac(s, t)), float(j["j22"].eval_frac(s, t))]]
    return JacobianData(m, j["det"].eval_frac(s, t), j["tr"].eval_frac(s, t),
                        "exact-interior")


def jacobian_on_edge(surface, c, edge, zeta):
    """Jacobian limit at the edge point with face parameter zeta."""
    if isinstance(edge, str):
        edge = surface.edge_by_name(edge)
    geo = get_geometry(surface)
    prof = geo.jac_edge_profiles(tuple(c), edge)
    if prof["det"] is None or prof["tr"] is None:
        return _fd_jacobian(surface, c, edge_point_at(surface, edge, zeta))
    det = prof["det"].eval(zeta)
    tr = prof["tr"].eval(zeta)
    try:
        m = [[float(_eval_profile_entry(prof["j11"], zeta)),
              float(_eval_profile_entry(prof["j12"], zeta))],
             [float(_eval_profile_entry(prof["j21"], zeta)),
              float(_eval_profile_entry(prof["j22"], zeta))]]
    except DivergentLimit:
        m = None
    return JacobianData(m, det, tr, "exact-edge")


def jacobian_at_vertex(surface, c, vertex):
    vertex = tuple(vertex)
    geo = get_geometry(surface)
    for edge in surface.edges:
        if tuple(edge.start) == vertex:
            end = "start"
        elif tuple(edge.end) == vertex:
            end = "end"
        else:
            continue
        prof = geo.jac_edge_profiles(tuple(c), edge)
        try:
            vals = {}
            for name in ("j11", "j12", "j21", "j22", "det", "tr"):
                p = prof[name]
                if p is None:
                    raise DivergentLimit("entry diverges on the edge")
                vals[name] = p.limit0() if end == "start" else p.limit_inf()
        except DivergentLimit:
            continue
        m = [[float(vals["j11"]), float(vals["j12"])],
             [float(vals["j21"]), float(vals["j22"])]]
        return JacobianData(m, vals["det"], vals["tr"], "exact-vertex")
    return _fd_jacobian(surface, c, vertex)


def _inward_direction(surface, point):
    cx = sum(float(v[0]) for v in surface.vertices) / len(surface.vertices)
    cy = sum(float(v[1]) for v in surface.vertices) / len(surface.vertices)
    d = np.array([cx - float(point[0]), cy - float(point[1])])
    n = np.linalg.norm(d)
    if n == 0:
        return np.array([1.0, 0.0])
    return d / n


def _fd_jacobian(surface, c, point_raw):
    """One-sided finite differences from the interior, Richardson refined.

    Used only when an exact face limit is unavailable; flagged via method.
    """
    geo = get_geometry(surface)
    y1r, y2r = geo.section(tuple(c))
    inward = _inward_direction(surface, point_raw)
    p = np.array([float(point_raw[0]), float(point_raw[1])])

    def field_at(yy):
        u = geo.invert_points(yy.reshape(1, 2))[0]
        s, t = math.exp(u[0]), math.exp(u[1])
        return np.array([y1r.eval_float(s, t), y2r.eval_float(s, t)])

    mats = []
    for delta in (1e-3, 1e-4, 1e-5):
        base = p + delta * inward
        h = delta / 10.0
        cols = []
        for j in range(2):
            e = np.zeros(2)
            e[j] = h
            cols.append((field_at(base + e) - field_at(base - e)) / (2 * h))
        mats.append(np.column_stack(cols))
    # Richardson in the offset: error is O(delta), extrapolate the last pair
    m = mats[-1] + (mats[-1] - mats[-2]) / 9.0
    det = float(np.linalg.det(m))
    tr = float(np.trace(m))
    # accept the sign pattern only if stable across raw offsets
    signs = [(np.sign(np.linalg.det(x)), np.sign(np.trace(x))) for x in mats]
    if len({s for s in signs}) != 1:
        return JacobianData(m.tolist(), det, tr, "fd-unstable")
    return JacobianData(m.tolist(), det, tr, "fd")


def jacobian_at(surface, c, I, point):
    """Flow linearization at a raw polytope point (or face point).

    The label I does not enter the linearization; it is accepted to mirror
    the field signature.  Exact paths need rational data: interior points go
    through the chart, edge points through the face parameter.
    """
    del I
    point = tuple(point)
    exact = _is_exact_pair(point)
    slacks = surface.point_slacks(point)
    if min(slacks) < 0:
        raise ValueError("point outside the polytope")
    tight = [e for e, sl in zip(surface.edges, slacks) if sl == 0]
    if not exact:
        tight = [e for e, sl in zip(surface.edges, slacks) if abs(float(sl)) < 1e-12]
    if len(tight) >= 2:
        return jacobian_at_vertex(surface, c, point)
    if len(tight) == 1:
        edge = tight[0]
        if exact:
            z = edge_param_at(surface, edge, point)
            if z == math.inf:
                return jacobian_at_vertex(surface, c, point)
            return jacobian_on_edge(surface, c, edge, z)
        return _fd_jacobian(surface, c, point)
    if exact:
        # rational raw interior points rarely have rational chart values;
        # invert numerically and evaluate in floats
        pass
    geo = get_geometry(surface)
    u = geo.invert_points(np.array([[float(point[0]), float(point[1])]]))[0]
    s, t = math.exp(u[0]), math.exp(u[1])
    j = geo.jac(tuple(c))
    m = [[j["j11"].eval_float(s, t), j["j12"].eval_float(s, t)],
         [j["j21"].eval_float(s, t), j["j22"].eval_float(s, t)]]
    return JacobianData(m, j["det"].eval_float(s, t), j["tr"].eval_float(s, t),
                        "float-interior")
