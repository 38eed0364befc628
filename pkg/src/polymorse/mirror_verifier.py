"""Holomorphic section bases and the bridge checks to the Morse side.

Every lattice point I of the section lattice polygon of a bundle
difference c names a global section; the normalized representative has
modulus exp(-f_I), so its maximum is 1 exactly because the potential's
minimum is 0, and the normalization constant is the same exact log-value
on both sides.  The verification passes compare the two descriptions pair
by pair: hom dimensions against section counts, product weights against
sums of normalization constants, and vanishing of every reverse-direction
morphism space.
"""

from __future__ import annotations

from fractions import Fraction

from . import composition_engine as ce
from . import geometry as geo
from . import morse_category as mc
from .surface_model import load_collection, section_polytope


def _frac_str(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else \
        f"{q.numerator}/{q.denominator}"


def _weight_json(value):
    if isinstance(value, (int, Fraction)):
        return _frac_str(value)
    return repr(float(value))


class SectionBasis:
    """Basis data for the global sections of one bundle difference.

    ``elements`` lists (I, kappa) with kappa the exact normalization
    constant; ``excluded`` lists lattice points whose normalized section
    does not extend continuously to the closed polytope, with the reason.
    """

    __slots__ = ("surface", "c", "elements", "excluded")

    def __init__(self, surface, c, elements, excluded):
        self.surface = surface
        self.c = c
        self.elements = elements
        self.excluded = excluded

    @property
    def dim(self):
        return len(self.elements)

    def labels(self):
        return [I for I, _ in self.elements]

    def __repr__(self):
        return f"SectionBasis(c={self.c}, dim={self.dim})"


def h0_basis(surface, c):
    """One normalized section per lattice point of the section polygon."""
    c = surface.check_bundle(c)
    elements = []
    excluded = []
    for I in section_polytope(surface, c).points:
        try:
            pot = geo.potential(surface, c, I)
        except ValueError as exc:
            excluded.append((I, str(exc)))
            continue
        elements.append((I, pot.const))
    return SectionBasis(surface, c, elements, excluded)


def section_basis_json(basis):
    return {
        "c": list(basis.c),
        "elements": [
            {"I": list(I),
             "kappa": {"terms": [[_frac_str(q), p]
                                 for q, p in kappa.terms()]}}
            for I, kappa in basis.elements],
        "excluded": [{"I": list(I), "reason": reason}
                     for I, reason in basis.excluded],
    }


def _difference(c_from, c_to):
    return tuple(b - a for a, b in zip(c_from, c_to))


def verify_dim_match(surface, collection=None):
    """Morse hom dimension == section count for every ordered pair.

    Reverse-direction pairs must vanish on both sides.  Any mismatch is a
    hard failure.
    """
    coll = [tuple(c) for c in load_collection(surface, collection)]
    rows = []
    for i, ci in enumerate(coll):
        for j, cj in enumerate(coll):
            morse = mc.hom_space(surface, ci, cj).dim
            sheaf = h0_basis(surface, _difference(ci, cj)).dim
            rows.append({"pair": [i, j], "morse_dim": morse,
                         "sheaf_dim": sheaf, "match": morse == sheaf})
    bad = [r for r in rows if not r["match"]]
    if bad:
        raise AssertionError(f"hom/section dimension mismatch: {bad}")
    return {"pairs": len(rows), "ok": True, "rows": rows}


def verify_functoriality(surface, collection=None, table=None):
    """Morse product weight == sheaf-side constant, exactly, per pair.

    The sheaf side multiplies normalized sections, so its constant is the
    sum of the two normalization constants minus the target's; the Morse
    side evaluates the summed potential at the target carrier.  The two
    exact log-values must agree term by term.
    """
    if table is None:
        table = ce.compose_table(surface, collection, trace=False)
    rows = []
    for ent in table:
        zc, wc, tc = ent.z, ent.w, ent.target
        assert tc.I == (zc.I[0] + wc.I[0], zc.I[1] + wc.I[1])
        sheaf = geo.potential(surface, zc.c, zc.I).const \
            + geo.potential(surface, wc.c, wc.I).const \
            - geo.potential(surface, tc.c, tc.I).const
        equal = sheaf == ent.kappa
        rows.append({
            "pair_of_gens": {"triple": list(ent.triple),
                             "I": list(zc.I), "J": list(wc.I)},
            "weight_morse": _weight_json(ent.weight),
            "weight_sheaf": _weight_json(sheaf.exp_neg()),
            "equal": equal,
        })
        if not equal:
            raise AssertionError(
                f"functoriality mismatch on {ent.triple} "
                f"{zc.I} * {wc.I}: morse {ent.kappa!r} vs sheaf {sheaf!r}")
    return {"pairs_checked": len(rows), "ok": True, "rows": rows}


def verify_exceptionality(surface, collection=None):
    """Reverse hom spaces vanish; endomorphisms are spanned by identity.

    Never raises: the report carries a per-pair account, including the
    rejection reason for every candidate component of a reverse pair.
    """
    coll = [tuple(c) for c in load_collection(surface, collection)]
    reverse_rows = []
    identity_rows = []
    ok = True
    for i, ci in enumerate(coll):
        hs = mc.hom_space(surface, ci, ci)
        good = (hs.dim == 1 and hs.generators[0].whole_polytope
                and hs.generators[0].I == (0, 0))
        ok = ok and good
        identity_rows.append({"object": i, "identity_only": good})
    for j in range(len(coll)):
        for i in range(j):
            hs = mc.hom_space(surface, coll[j], coll[i])
            zero = hs.dim == 0
            ok = ok and zero
            reverse_rows.append({
                "pair": [j, i],
                "zero": zero,
                "rejections": [
                    {"I": list(comp.I),
                     "carrier": mc.carrier_json(surface, comp),
                     "reason": reason}
                    for comp, reason in hs.rejected],
            })
    return {"ok": ok, "identities": identity_rows,
            "reverse_pairs": reverse_rows}
