"""Command-line front end: hom tables, product tables, verification, SVG.

Three commands cover the pipeline.  ``homs`` prints the morphism space of
one ordered bundle pair, with every candidate component and its verdict.
``compose`` prints the full weighted product table of a collection and can
render one SVG figure per composable triple.  ``verify`` runs the whole
verification suite (dimension match, functoriality, exceptionality,
associativity) and exits nonzero on the first failed check.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numeric
failure.  Set POLYMORSE_THREADS to parallelize independent checks and
figures; output ordering does not depend on the schedule.
"""

import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from xml.sax.saxutils import escape

import click

from . import composition_engine as ce
from . import mirror_verifier as mv
from . import morse_category as mc
from .surface_model import load_collection, load_surface


# -- shared plumbing ---------------------------------------------------------

def _thread_count():
    raw = os.environ.get("POLYMORSE_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _parallel_map(fn, items):
    """Order-preserving map, threaded when POLYMORSE_THREADS > 1."""
    items = list(items)
    n = min(_thread_count(), len(items))
    if n <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _get_surface(spec):
    try:
        return load_surface(spec)
    except (OSError, ValueError, KeyError) as exc:
        raise click.UsageError(f"cannot load surface {spec!r}: {exc}")


def _get_collection(surface, spec):
    if spec in (None, "preset"):
        spec = None
    try:
        return [tuple(c) for c in load_collection(surface, spec)]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise click.UsageError(f"cannot load collection {spec!r}: {exc}")


def _parse_vector(surface, text, optname):
    try:
        vec = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise click.UsageError(
            f"{optname} must be a comma list of integers, got {text!r}")
    try:
        return surface.check_bundle(vec)
    except ValueError as exc:
        raise click.UsageError(f"{optname}: {exc}")


def _surface_tag(surface, spec):
    if surface.preset:
        return surface.preset
    return spec if isinstance(spec, str) else "custom"


def _numeric_exit(exc):
    click.echo(f"numeric failure: {exc}", err=True)
    sys.exit(3)


def _emit_json(obj):
    click.echo(json.dumps(obj, indent=2, sort_keys=True))


def _frac(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else \
        f"{q.numerator}/{q.denominator}"


def _bundle_str(c):
    return "O(" + ",".join(str(k) for k in c) + ")"


def _gen_str(I):
    return "V(" + ",".join(str(k) for k in I) + ")"


def _carrier_str(surface, comp):
    parts = []
    for label in mc.carrier_json(surface, comp):
        if isinstance(label, str):
            parts.append(label)
        else:
            parts.append("(" + ",".join(label) + ")")
    return ", ".join(parts)


def _weight_str(entry):
    w = entry.weight
    exact = _frac(w) if isinstance(w, (int, Fraction)) else repr(float(w))
    return f"{exact} (kappa = {entry.kappa.pretty()}) = {float(w):.12f}"


def _num(v):
    s = f"{float(v):.2f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


# -- homs --------------------------------------------------------------------

@click.group()
@click.version_option(package_name="polymorse")
def main():
    """Weighted Morse homotopy on moment polytopes of toric Fano surfaces."""


@main.command("homs")
@click.option("--surface", "surface_spec", required=True,
              metavar="PRESET|FILE", help="Preset name or JSON config path.")
@click.option("--from", "from_spec", required=True, metavar="A,B,C[,D]",
              help="Source bundle vector.")
@click.option("--to", "to_spec", required=True, metavar="A,B,C[,D]",
              help="Target bundle vector.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]),
              default="text", show_default=True)
def cmd_homs(surface_spec, from_spec, to_spec, fmt):
    """Morphism space of one ordered bundle pair.

    Prints every intersection component with its carrier, degree, and
    accept/reject verdict.
    """
    surface = _get_surface(surface_spec)
    c_from = _parse_vector(surface, from_spec, "--from")
    c_to = _parse_vector(surface, to_spec, "--to")
    try:
        hs = mc.hom_space(surface, c_from, c_to)
        blob = mc.hom_space_json(hs)
    except (ArithmeticError, ValueError) as exc:
        _numeric_exit(exc)
    tag = _surface_tag(surface, surface_spec)
    if fmt == "json":
        _emit_json({"surface": tag, **blob})
        return
    click.echo(f"hom {_bundle_str(c_from)} -> {_bundle_str(c_to)} "
               f"on {tag}: dim {hs.dim}")
    for gen, info in zip(hs.generators, blob["generators"]):
        click.echo(f"  generator {_gen_str(gen.I)}  "
                   f"carrier {_carrier_str(surface, gen)}  "
                   f"degree {info['degree']}")
    for comp, reason in hs.rejected:
        click.echo(f"  rejected  {_gen_str(comp.I)}  "
                   f"carrier {_carrier_str(surface, comp)}  [{reason}]")
    if not hs.generators and not hs.rejected:
        click.echo("  (no intersection components)")


# -- compose -----------------------------------------------------------------

def _tree_text(tree):
    if tree == "trivial":
        return "trivial"
    if tree is None:
        return "not traced (weight certified by the area identity)"
    legs = []
    for leg in tree.legs:
        path = []
        for name, _, _ in leg:
            if not path or path[-1] != name:
                path.append(name)
        legs.append(" -> ".join(path))
    mx, my = tree.meeting
    return f"{' | '.join(legs)}, meeting ({_num(mx)}, {_num(my)})"


def _entry_lines(surface, ent):
    yield (f"  {_gen_str(ent.z.I)} * {_gen_str(ent.w.I)} -> "
           f"{_gen_str(ent.target.I)} on {_carrier_str(surface, ent.target)}")
    yield f"    weight {_weight_str(ent)}"
    yield f"    tree: {_tree_text(ent.tree)}"


@main.command("compose")
@click.option("--surface", "surface_spec", required=True,
              metavar="PRESET|FILE", help="Preset name or JSON config path.")
@click.option("--collection", "coll_spec", default="preset",
              show_default=True, metavar="preset|FILE",
              help="Bundle collection: the surface preset or a JSON file.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]),
              default="text", show_default=True)
@click.option("--svg-dir", "svg_dir", default=None, metavar="DIR",
              type=click.Path(file_okay=False),
              help="Write one SVG figure per composable triple.")
@click.option("--no-trace", is_flag=True, default=False,
              help="Skip gradient-tree tracing (weights only).")
def cmd_compose(surface_spec, coll_spec, fmt, svg_dir, no_trace):
    """Weighted product table m2 over an ordered collection."""
    surface = _get_surface(surface_spec)
    collection = _get_collection(surface, coll_spec)
    trace = not no_trace or svg_dir is not None
    try:
        table = ce.compose_table(surface, collection, trace=trace)
    except (ArithmeticError, ValueError) as exc:
        _numeric_exit(exc)
    tag = _surface_tag(surface, surface_spec)

    written = []
    if svg_dir is not None:
        written = _write_svgs(surface, tag, table, svg_dir)

    if fmt == "json":
        _emit_json({
            "surface": tag,
            "collection": [list(c) for c in table.collection],
            "entry_count": sum(1 for _ in table),
            "nontrivial_count": len(table.nontrivial()),
            "table": ce.table_json(table),
            "svg_files": written,
        })
        return

    entries = list(table)
    click.echo(f"composition table on {tag}: "
               f"{len(table.collection)} bundles, {len(entries)} entries "
               f"({len(table.nontrivial())} nontrivial)")
    for triple in sorted(table.entries):
        lst = table.entries[triple]
        if not lst:
            continue
        i, j, k = triple
        chain = " -> ".join(_bundle_str(table.collection[q])
                            for q in (i, j, k))
        click.echo(f"[{i},{j},{k}] {chain}")
        for ent in lst:
            for line in _entry_lines(surface, ent):
                click.echo(line)
    for path in written:
        click.echo(f"wrote {path}")


# -- SVG figures -------------------------------------------------------------

_SVG_SIZE = 800.0
_SVG_PAD = 80.0
_Z_COLOR = "#1f6fb2"
_W_COLOR = "#2a9d3f"
_T_COLOR = "#d03030"


def _svg_frame(surface):
    """Map display coordinates into the 800x800 viewport, y up."""
    pts = [tuple(map(float, surface.to_display(v)))
           for v in surface.vertices]
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    cx, cy = (min(xs) + max(xs)) / 2, (min(ys) + max(ys)) / 2
    span = max(max(xs) - min(xs), max(ys) - min(ys)) or 1.0
    scale = (_SVG_SIZE - 2 * _SVG_PAD) / span

    def at(p):
        return (_SVG_SIZE / 2 + (float(p[0]) - cx) * scale,
                _SVG_SIZE / 2 - (float(p[1]) - cy) * scale)

    return at, pts


def _pt(xy):
    return f"{_num(xy[0])},{_num(xy[1])}"


def _carrier_svg(surface, comp, at, color):
    parts = []
    if comp.whole_polytope:
        ring = " ".join(_pt(at(surface.to_display(v)))
                        for v in surface.vertices)
        parts.append(f'<polygon points="{ring}" fill="{color}" '
                     f'fill-opacity="0.10" stroke="none"/>')
        return parts
    for e in comp.edges:
        a = at(surface.to_display(e.start))
        b = at(surface.to_display(e.end))
        parts.append(f'<line x1="{_num(a[0])}" y1="{_num(a[1])}" '
                     f'x2="{_num(b[0])}" y2="{_num(b[1])}" '
                     f'stroke="{color}" stroke-width="7" '
                     f'stroke-linecap="round" stroke-opacity="0.75"/>')
    dots = [surface.to_display(v) for v in comp.standalone_vertices()]
    dots += [surface.to_display(p.coords) for p in comp.points]
    for d in dots:
        x, y = at(d)
        parts.append(f'<circle cx="{_num(x)}" cy="{_num(y)}" r="6" '
                     f'fill="{color}"/>')
    return parts


def _leg_svg(leg, at, color, marker):
    pts = [leg[0][1]] + [seg[2] for seg in leg]
    coords = " ".join(_pt(at(p)) for p in pts)
    return (f'<polyline points="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="2.5" marker-end="url(#{marker})"/>')


def _triple_svg(surface, tag, table, triple):
    at, _ = _svg_frame(surface)
    i, j, k = triple
    coll = table.collection
    body = [
        f'<rect width="{int(_SVG_SIZE)}" height="{int(_SVG_SIZE)}" '
        f'fill="#ffffff"/>',
        '<defs>'
        '<marker id="az" viewBox="0 0 10 10" refX="8" refY="5" '
        'markerWidth="6" markerHeight="6" orient="auto">'
        f'<path d="M 0 1 L 9 5 L 0 9 z" fill="{_Z_COLOR}"/></marker>'
        '<marker id="aw" viewBox="0 0 10 10" refX="8" refY="5" '
        'markerWidth="6" markerHeight="6" orient="auto">'
        f'<path d="M 0 1 L 9 5 L 0 9 z" fill="{_W_COLOR}"/></marker>'
        '</defs>',
    ]
    ring_pts = [at(surface.to_display(v)) for v in surface.vertices]
    ring = " ".join(_pt(p) for p in ring_pts)
    body.append(f'<polygon points="{ring}" fill="#f8f7f2" '
                f'stroke="#333333" stroke-width="2"/>')

    # edge names sit just outside the midpoint, away from the centroid
    ccx = sum(p[0] for p in ring_pts) / len(ring_pts)
    ccy = sum(p[1] for p in ring_pts) / len(ring_pts)
    for e in surface.edges:
        a = at(surface.to_display(e.start))
        b = at(surface.to_display(e.end))
        mx, my = (a[0] + b[0]) / 2, (a[1] + b[1]) / 2
        dx, dy = mx - ccx, my - ccy
        norm = math.hypot(dx, dy) or 1.0
        lx, ly = mx + 20 * dx / norm, my + 20 * dy / norm
        body.append(f'<text x="{_num(lx)}" y="{_num(ly)}" font-size="15" '
                    f'fill="#555555" text-anchor="middle" '
                    f'dominant-baseline="middle" '
                    f'font-family="sans-serif">{escape(e.name)}</text>')

    entries = table.entries[triple]
    seen = set()
    for ent in entries:
        for comp, color in ((ent.z, _Z_COLOR), (ent.w, _W_COLOR),
                            (ent.target, _T_COLOR)):
            key = (comp.c, comp.I)
            if key in seen:
                continue
            seen.add(key)
            body.extend(_carrier_svg(surface, comp, at, color))
    for ent in entries:
        tree = ent.tree
        if tree in (None, "trivial"):
            continue
        body.append(_leg_svg(tree.legs[0], at, _Z_COLOR, "az"))
        body.append(_leg_svg(tree.legs[1], at, _W_COLOR, "aw"))
        mxy = at(tree.meeting)
        body.append(f'<circle cx="{_num(mxy[0])}" cy="{_num(mxy[1])}" '
                    f'r="4.5" fill="#111111"/>')

    title = (f"{tag} [{i},{j},{k}]: "
             + " -> ".join(_bundle_str(coll[q]) for q in (i, j, k)))
    body.append(f'<text x="20" y="30" font-size="17" fill="#111111" '
                f'font-family="sans-serif">{escape(title)}</text>')
    y = 52
    for ent in entries:
        w = ent.weight
        exact = _frac(w) if isinstance(w, (int, Fraction)) \
            else repr(float(w))
        line = (f"{_gen_str(ent.z.I)} * {_gen_str(ent.w.I)} = "
                f"{exact} {_gen_str(ent.target.I)}")
        if ent.tree is None:
            line += "  (tree not traced)"
        body.append(f'<text x="20" y="{y}" font-size="13" fill="#333333" '
                    f'font-family="sans-serif">{escape(line)}</text>')
        y += 17
    legend = (f'<text x="20" y="{int(_SVG_SIZE) - 20}" font-size="13" '
              f'fill="#666666" font-family="sans-serif">'
              f'<tspan fill="{_Z_COLOR}">first factor</tspan>'
              f'<tspan dx="12" fill="{_W_COLOR}">second factor</tspan>'
              f'<tspan dx="12" fill="{_T_COLOR}">target</tspan>'
              f'<tspan dx="12">arrows follow the downhill flow</tspan>'
              f'</text>')
    body.append(legend)
    inner = "\n".join(body)
    return (f'<svg xmlns="http://www.w3.org/2000/svg" '
            f'width="{int(_SVG_SIZE)}" height="{int(_SVG_SIZE)}" '
            f'viewBox="0 0 {int(_SVG_SIZE)} {int(_SVG_SIZE)}">\n'
            f'{inner}\n</svg>\n')


def _write_svgs(surface, tag, table, svg_dir):
    os.makedirs(svg_dir, exist_ok=True)
    triples = [t for t in sorted(table.entries)
               if t[0] < t[1] < t[2] and table.entries[t]]
    docs = _parallel_map(
        lambda t: _triple_svg(surface, tag, table, t), triples)
    written = []
    for t, doc in zip(triples, docs):
        name = f"{tag}_m2_{t[0]}_{t[1]}_{t[2]}.svg"
        path = os.path.join(svg_dir, name)
        with open(path, "w") as fh:
            fh.write(doc)
        written.append(path)
    return written


# -- verify ------------------------------------------------------------------

def _first_failure(name, report):
    if name == "dim_match":
        for row in report["rows"]:
            if not row["match"]:
                return f"pair {row['pair']}: {row}"
    elif name == "functoriality":
        for row in report["rows"]:
            if not row["equal"]:
                return f"{row['pair_of_gens']}: {row}"
    elif name == "exceptionality":
        for row in report["identities"]:
            if not row["identity_only"]:
                return f"endomorphisms of {row['object']} not identity-only"
        for row in report["reverse_pairs"]:
            if not row["zero"]:
                return f"reverse pair {row['pair']} is nonzero"
    return "see report"


def _run_check(name, thunk):
    try:
        report = thunk()
    except AssertionError as exc:
        return {"name": name, "status": "fail",
                "counterexample": str(exc)[:1000]}
    out = {"name": name, "status": "pass" if report.get("ok") else "fail",
           "report": report}
    if out["status"] == "fail":
        out["counterexample"] = _first_failure(name, report)
    return out


@main.command("verify")
@click.option("--surface", "surface_spec", required=True,
              metavar="PRESET|FILE", help="Preset name or JSON config path.")
@click.option("--collection", "coll_spec", default="preset",
              show_default=True, metavar="preset|FILE")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]),
              default="text", show_default=True)
def cmd_verify(surface_spec, coll_spec, fmt):
    """Full verification suite against the holomorphic side.

    Runs dimension match, functoriality, exceptionality, and
    associativity.  Exit 0 only when every check passes.
    """
    surface = _get_surface(surface_spec)
    collection = _get_collection(surface, coll_spec)
    tag = _surface_tag(surface, surface_spec)
    try:
        table = ce.compose_table(surface, collection, trace=False)
    except (ArithmeticError, ValueError) as exc:
        _numeric_exit(exc)
    checks = [
        ("dim_match",
         lambda: mv.verify_dim_match(surface, collection)),
        ("functoriality",
         lambda: mv.verify_functoriality(surface, collection, table=table)),
        ("exceptionality",
         lambda: mv.verify_exceptionality(surface, collection)),
        ("associativity",
         lambda: ce.verify_associativity(table)),
    ]
    results = _parallel_map(lambda nc: _run_check(nc[0], nc[1]), checks)
    ok = all(r["status"] == "pass" for r in results)

    if fmt == "json":
        _emit_json({
            "surface": tag,
            "collection": [list(c) for c in collection],
            "ok": ok,
            "checks": {r["name"]: {k: v for k, v in r.items()
                                   if k != "name"}
                       for r in results},
        })
    else:
        click.echo(f"verify {tag} ({len(collection)} bundles)")
        for r in results:
            mark = "PASS" if r["status"] == "pass" else "FAIL"
            extra = ""
            rep = r.get("report", {})
            if r["name"] == "dim_match" and rep:
                extra = f"  ({rep['pairs']} ordered pairs)"
            elif r["name"] == "functoriality" and rep:
                extra = f"  ({rep['pairs_checked']} generator pairs)"
            elif r["name"] == "exceptionality" and rep:
                extra = (f"  ({len(rep['identities'])} identities, "
                         f"{len(rep['reverse_pairs'])} reverse pairs)")
            elif r["name"] == "associativity" and rep:
                extra = f"  ({rep['triples_checked']} bracketing triples)"
            click.echo(f"  {r['name']:<15} {mark}{extra}")
            if r["status"] != "pass":
                click.echo(f"    counterexample: "
                           f"{r.get('counterexample', 'see report')}")
        click.echo("all checks passed" if ok else "verification failed")
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
