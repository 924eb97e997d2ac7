"""Command-line front end.

Input documents are line-oriented text with named sections::

    # comment                (anywhere, to end of line)
    field: 2                 (optional, prime, default 2)
    degree: 1                (optional, default 1)
    tour: p0 p1 p0           (optional explicit unfolding tour)

    poset:
      point p0
      point p1
      edge p0 p1             (meaning p0 <= p1)

    complexes:               (variant 1: full simplex list per point)
      at p0: 0 | 1 | 0 1     (simplices split on '|', vertices on spaces)
      at p1: 0 | 1 | 2 | 0 1 | 1 2

    births:                  (variant 2: birth sets, inherited along edges,
      at p0: 0 1             faces added automatically)
      at p1: 1 2

    module:                  (explicit-module input, oracle mode)
      dim p0 2
      dim p1 1
      map p0 p1: 1 0         (rows split on ';', shape dim(q) x dim(p))

Exactly one of ``complexes``/``births``/``module`` must be present.  All
subcommands validate before computing and print nothing but diagnostics on
failure (exit code 2); output is byte-stable across runs.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from .errors import InputError, ValidationError
from .filtration import (
    PFiltration,
    SimplicialComplex,
    closure,
    simplex,
    size_stats,
    unfold_filtration,
    validate_filtration,
)
from .fplinalg import FieldSpec
from .genrank import generalized_rank, genrank_dcomplex, genrank_graph
from .oracle import ExplicitModule, limit_to_colimit_rank, module_from_filtration
from .poset import Poset, partners, unfold, validate_poset
from .randgen import random_connected_poset, random_filtration, random_graph_filtration
from .zigzag import decompose

__all__ = ["main", "parse_document", "InputDocument", "ParseError"]


class ParseError(InputError):
    pass


class InputDocument:
    """Parsed input: field, degree, poset, one payload block, optional tour."""

    __slots__ = ("field", "degree", "poset", "complexes", "births", "module_block", "tour")

    def __init__(self):
        self.field = None
        self.degree = None
        self.poset = None
        self.complexes = None
        self.births = None
        self.module_block = None
        self.tour = None

    def filtration(self) -> PFiltration:
        if self.poset is None:
            raise ParseError("missing poset section")
        degree = 1 if self.degree is None else self.degree
        if self.complexes is not None:
            cxs = {p: SimplicialComplex(s) for p, s in self.complexes.items()}
            return PFiltration(self.poset, cxs, degree)
        if self.births is not None:
            return PFiltration.from_birth_sets(self.poset, self.births, degree)
        raise ParseError("document has no filtration (complexes or births section)")

    def explicit_module(self, field: FieldSpec) -> ExplicitModule:
        if self.poset is None:
            raise ParseError("missing poset section")
        if self.module_block is None:
            raise ParseError("document has no module section")
        dims, maps = self.module_block
        for p in self.poset.points:
            if p not in dims:
                raise ParseError(f"module section misses dim for point {p}")
        for e in self.poset.edges:
            if e not in maps:
                raise ParseError(f"module section misses map for edge {e}")
        return ExplicitModule(self.poset, dims, maps, field)


def _strip(line: str) -> str:
    if "#" in line:
        line = line[: line.index("#")]
    return line.strip()


def parse_document(text: str) -> InputDocument:
    doc = InputDocument()
    points, edges = [], []
    section = None
    complexes: dict = {}
    births: dict = {}
    dims: dict = {}
    maps: dict = {}
    seen_sections = set()

    def err(no, msg):
        raise ParseError(f"line {no}: {msg}")

    for no, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        low = line.lower()
        if low.startswith("field:"):
            try:
                doc.field = int(line.split(":", 1)[1])
            except ValueError:
                err(no, "field must be an integer")
            continue
        if low.startswith("degree:"):
            try:
                doc.degree = int(line.split(":", 1)[1])
            except ValueError:
                err(no, "degree must be an integer")
            continue
        if low.startswith("tour:"):
            doc.tour = line.split(":", 1)[1].split()
            continue
        if low in ("poset:", "complexes:", "births:", "module:"):
            section = low[:-1]
            if section in seen_sections:
                err(no, f"duplicate section {section}")
            seen_sections.add(section)
            continue
        if section == "poset":
            parts = line.split()
            if parts[0] == "point" and len(parts) == 2:
                points.append(parts[1])
            elif parts[0] == "edge" and len(parts) == 3:
                edges.append((parts[1], parts[2]))
            else:
                err(no, f"expected 'point <id>' or 'edge <p> <q>', got {line!r}")
        elif section in ("complexes", "births"):
            if not low.startswith("at ") or ":" not in line:
                err(no, f"expected 'at <point>: ...', got {line!r}")
            head, body = line.split(":", 1)
            pt = head.split()[1]
            simplices = []
            for part in body.split("|"):
                part = part.strip()
                if not part:
                    continue
                try:
                    simplices.append(simplex(part.split()))
                except InputError as exc:
                    err(no, str(exc))
            if section == "complexes":
                complexes.setdefault(pt, []).extend(simplices)
            else:
                births.setdefault(pt, []).extend(simplices)
        elif section == "module":
            parts = line.split()
            if parts[0] == "dim" and len(parts) == 3:
                try:
                    dims[parts[1]] = int(parts[2])
                except ValueError:
                    err(no, "dim must be an integer")
            elif parts[0] == "map" and ":" in line:
                head, body = line.split(":", 1)
                hp = head.split()
                if len(hp) != 3:
                    err(no, f"expected 'map <p> <q>: rows', got {line!r}")
                rows = []
                for row in body.split(";"):
                    row = row.strip()
                    if row:
                        try:
                            rows.append([int(x) for x in row.split()])
                        except ValueError:
                            err(no, "matrix entries must be integers")
                maps[(hp[1], hp[2])] = rows
            else:
                err(no, f"expected 'dim <p> <g>' or 'map <p> <q>: rows', got {line!r}")
        else:
            err(no, f"content outside any section: {line!r}")

    payloads = [name for name, blk in (("complexes", complexes), ("births", births), ("module", dims or maps)) if blk]
    if len(payloads) > 1:
        raise ParseError(f"document mixes {' and '.join(payloads)}; exactly one is allowed")
    if points or edges:
        doc.poset = Poset(points, edges)
        known = set(doc.poset.points)
        for blk in (complexes, births):
            for pt in blk:
                if pt not in known:
                    raise ParseError(f"'at {pt}' references an undeclared point")
    if complexes:
        doc.complexes = complexes
    if births:
        doc.births = births
    if dims or maps:
        for pt in dims:
            if pt not in set(points):
                raise ParseError(f"dim for undeclared point {pt}")
        doc.module_block = (dims, maps)
    return doc


def _load(path: str) -> InputDocument:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_document(fh.read())
    except OSError as exc:
        raise ParseError(str(exc))


def _load_tour(args, doc: InputDocument):
    if getattr(args, "tour", None):
        with open(args.tour, "r", encoding="utf-8") as fh:
            return fh.read().split()
    return doc.tour


def _field(args, doc: InputDocument) -> FieldSpec:
    p = args.field if args.field is not None else (doc.field if doc.field is not None else 2)
    return FieldSpec(p)


def _degree(args, doc: InputDocument) -> int:
    if args.degree is not None:
        return args.degree
    if doc.degree is not None:
        return doc.degree
    return 1


def _emit(payload: dict, as_json: bool, lines):
    if as_json:
        print(json.dumps(payload, sort_keys=True, separators=(",", ": "), indent=2))
    else:
        for line in lines:
            print(line)


def _chain_str(chain: dict) -> str:
    if not chain:
        return "0"
    parts = []
    for s, c in sorted(chain.items()):
        label = "-".join(str(v) for v in s)
        parts.append(label if c == 1 else f"{c}*{label}")
    return " + ".join(parts)


def _chain_json(chain: dict):
    return [{"simplex": list(s), "coeff": int(c)} for s, c in sorted(chain.items())]


def cmd_genrank(args) -> int:
    doc = _load(args.input)
    field = _field(args, doc)
    degree = _degree(args, doc)
    f = doc.filtration()
    f.degree = degree
    tour = _load_tour(args, doc)
    res = generalized_rank(f, degree, field, tour=tour)
    lines = [f"rank: {res.rank}"]
    payload = {"command": "genrank", "field": field.p, "degree": degree, "rank": res.rank}
    if args.audit:
        payload["audit"] = res.audit
        for rec in res.audit:
            lines.append(
                "interval [{}, {}]: foldable={} convertible={} nonzero_alpha={} "
                "invertible={} complete={}".format(
                    rec["interval"][0],
                    rec["interval"][1],
                    rec["foldable"],
                    rec["convertible"],
                    rec["nonzero_alpha"],
                    rec["complement_invertible"],
                    rec["complete"],
                )
            )
    if args.sections:
        payload["sections"] = [
            {pt: _chain_json(ch) for pt, ch in sorted(sec.items())} for sec in res.complete_modules
        ]
        for i, sec in enumerate(res.complete_modules):
            lines.append(f"section {i}:")
            for pt in f.poset.points:
                lines.append(f"  {pt}: {_chain_str(sec[pt])}")
    _emit(payload, args.json, lines)
    return 0


def cmd_oracle(args) -> int:
    doc = _load(args.input)
    field = _field(args, doc)
    degree = _degree(args, doc)
    if doc.module_block is not None:
        mod = doc.explicit_module(field)
    else:
        f = doc.filtration()
        f.degree = degree
        mod = module_from_filtration(f, degree, field)
    diag = mod.validate()
    if diag is not None:
        raise ValidationError(diag)
    r = limit_to_colimit_rank(mod)
    _emit({"command": "oracle", "field": field.p, "rank": r}, args.json, [f"rank: {r}"])
    return 0


def cmd_unfold(args) -> int:
    doc = _load(args.input)
    if doc.poset is None:
        raise ParseError("missing poset section")
    diag = validate_poset(doc.poset)
    if diag is not None:
        raise ValidationError(diag)
    tour = _load_tour(args, doc)
    z = unfold(doc.poset, tour)
    ps = partners(z)
    parts = [z.fold[0]]
    for i in range(z.m):
        parts.append("->" if z.forward[i] else "<-")
        parts.append(z.fold[i + 1])
    lines = [
        "path: " + " ".join(parts),
        "points: " + str(len(z)),
        "bound: " + str(2 * (len(doc.poset.points) + len(doc.poset.edges)) + 1),
        "fold: " + " ".join(f"q{i}={pt}" for i, pt in enumerate(z.fold)),
    ]
    for pt in doc.poset.points:
        idxs = ps.classes[pt]
        leader = ps.leaders.get(pt)
        suffix = f" leader=q{leader}" if leader is not None else ""
        lines.append(f"partners {pt}: {' '.join('q%d' % i for i in idxs)}{suffix}")
    payload = {
        "command": "unfold",
        "fold": list(z.fold),
        "forward": [bool(b) for b in z.forward],
        "points": len(z),
        "partners": {pt: ps.classes[pt] for pt in doc.poset.points},
        "leaders": {pt: ps.leaders[pt] for pt in ps.leaders},
    }
    _emit(payload, args.json, lines)
    return 0


def cmd_zigzag(args) -> int:
    doc = _load(args.input)
    field = _field(args, doc)
    degree = _degree(args, doc)
    f = doc.filtration()
    f.degree = degree
    diag = validate_filtration(f)
    if diag is not None:
        raise ValidationError(diag)
    tour = _load_tour(args, doc)
    z = unfold(f.poset, tour)
    zf = unfold_filtration(f, z)
    d = decompose(zf, degree, field)
    lines = []
    bars = []
    for iv in d.intervals:
        types = f"{iv.endpoint_types[0]}-{iv.endpoint_types[1]}"
        entry = {"birth": iv.birth, "death": iv.death, "types": types}
        line = f"[{iv.birth}, {iv.death}] {types}"
        if args.reps:
            entry["reps"] = {str(q): _chain_json(iv.rep(q)) for q in iv.support()}
            line += "  " + "; ".join(f"q{q}: {_chain_str(iv.rep(q))}" for q in iv.support())
        bars.append(entry)
        lines.append(line)
    _emit(
        {"command": "zigzag", "field": field.p, "degree": degree, "barcode": bars},
        args.json,
        ["barcode:"] + ["  " + l for l in lines],
    )
    return 0


def cmd_fastpath(args) -> int:
    doc = _load(args.input)
    field = _field(args, doc)
    f = doc.filtration()
    if args.graph:
        r = genrank_graph(f)
        mode = "graph"
    else:
        r = genrank_dcomplex(f, args.dcomplex, field)
        mode = f"dcomplex-{args.dcomplex}"
    _emit({"command": "fastpath", "mode": mode, "rank": r}, args.json, [f"rank: {r}"])
    return 0


def _document_text(f: PFiltration, field_p: int) -> str:
    lines = [f"field: {field_p}", f"degree: {f.degree}", "", "poset:"]
    for pt in f.poset.points:
        lines.append(f"  point {pt}")
    for a, b in f.poset.edges:
        lines.append(f"  edge {a} {b}")
    lines.append("")
    lines.append("complexes:")
    for pt in f.poset.points:
        simp = sorted(f.complexes[pt].simplices, key=lambda s: (len(s), s))
        body = " | ".join(" ".join(str(v) for v in s) for s in simp)
        lines.append(f"  at {pt}: {body}")
    return "\n".join(lines) + "\n"


def cmd_random(args) -> int:
    rng = random.Random(args.seed)
    results = []
    for i in range(args.count):
        poset = random_connected_poset(rng)
        if args.graphs:
            f = random_graph_filtration(rng, poset)
        else:
            f = random_filtration(rng, poset, args.degree if args.degree is not None else 1)
        if args.check:
            res = generalized_rank(f)
            ref = limit_to_colimit_rank(module_from_filtration(f))
            results.append({"instance": i, "rank": res.rank, "oracle": ref, "agree": res.rank == ref})
        else:
            sys.stdout.write(_document_text(f, 2))
            if i + 1 < args.count:
                sys.stdout.write("\n")
    if args.check:
        agree = sum(1 for r in results if r["agree"])
        payload = {"command": "random", "seed": args.seed, "checked": len(results), "agree": agree}
        lines = [f"checked: {len(results)}", f"agree: {agree}"]
        if agree != len(results):
            lines.append("DISAGREEMENTS: " + str([r for r in results if not r["agree"]]))
            _emit(payload, args.json, lines)
            return 1
        _emit(payload, args.json, lines)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="posetrank",
        description="Generalized rank of poset-indexed persistence modules via zigzag unfolding.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, tour=True):
        p.add_argument("input", help="input document")
        p.add_argument("--field", type=int, default=None, help="prime field characteristic")
        p.add_argument("--degree", type=int, default=None, help="homology degree")
        if tour:
            p.add_argument("--tour", default=None, help="file with an explicit tour (point ids)")
        p.add_argument("--json", action="store_true", help="machine-readable output")

    g = sub.add_parser("genrank", help="compute the generalized rank")
    common(g)
    g.add_argument("--audit", action="store_true", help="print the per-interval audit trail")
    g.add_argument("--sections", action="store_true", help="print folded complete-module cycles")
    g.set_defaults(func=cmd_genrank)

    o = sub.add_parser("oracle", help="rank via the limit-to-colimit definition")
    common(o, tour=False)
    o.set_defaults(func=cmd_oracle)

    u = sub.add_parser("unfold", help="print the zigzag path, fold map and partner classes")
    u.add_argument("input")
    u.add_argument("--tour", default=None)
    u.add_argument("--json", action="store_true")
    u.set_defaults(func=cmd_unfold)

    zz = sub.add_parser("zigzag", help="print the zigzag barcode")
    common(zz)
    zz.add_argument("--reps", action="store_true", help="include representative cycles")
    zz.set_defaults(func=cmd_zigzag)

    fp = sub.add_parser("fastpath", help="special-case algorithms")
    fp.add_argument("input")
    fp.add_argument("--field", type=int, default=None)
    grp = fp.add_mutually_exclusive_group(required=True)
    grp.add_argument("--graph", action="store_true", help="degree-1 homology of graph filtrations")
    grp.add_argument("--dcomplex", type=int, default=None, metavar="D", help="degree-D homology of D-complexes")
    fp.add_argument("--json", action="store_true")
    fp.set_defaults(func=cmd_fastpath)

    rd = sub.add_parser("random", help="emit or fuzz random instances")
    rd.add_argument("--seed", type=int, required=True)
    rd.add_argument("--count", type=int, default=1)
    rd.add_argument("--degree", type=int, default=None)
    rd.add_argument("--graphs", action="store_true", help="graph filtrations only")
    rd.add_argument("--check", action="store_true", help="cross-check genrank against the oracle")
    rd.add_argument("--json", action="store_true")
    rd.set_defaults(func=cmd_random)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
