"""Command-line interface: ``tametori {classes,kac,classify,alcove-svg,selftest}``.

Group specs are small YAML documents::

    type: C2          # Cartan type, e.g. A2, G2, A1xA1
    isogeny: sc       # sc, ad, or a list of cocharacter basis vectors (coroot coordinates)
    sigma: id         # id, flip, or cycles such as "(1 3)"
    fr: id            # same grammar as sigma
    p: 0              # residue characteristic (optional; implied by q)
    q: [3, 5, 7]      # residue field size(s)

Exit codes: 0 success, 1 a check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import unicodedata
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import yaml

from . import __version__
from .classify import ClassificationReport, full_report
from .errors import (
    CheckError,
    InputError,
    InvalidLattice,
    NoSolution,
    RankTooLarge,
    SpecError,
    TametoriError,
)
from .kac import all_points, class_order
from .rootdata import (
    AlcovePoint,
    GroupContext,
    GroupSpec,
    alcove_vertices,
    build_group,
    fixed_subspace_dimension,
    format_cocharacter,
    parse_cartan_type,
    parse_diagram_aut,
    prime_of_q,
)
from .weyl import (
    DEFAULT_MAX_ORDER,
    class_labels,
    is_elliptic,
    is_tame_class,
    set_max_order,
    sigma_classes,
    solve_w_fr,
)

SPEC_KEYS = ("type", "isogeny", "sigma", "fr", "p", "q")


# ---------------------------------------------------------------------------
# spec files
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LoadedSpec:
    spec: GroupSpec
    qs: tuple[int, ...]


def _mark(node: yaml.Node) -> tuple[int, int]:
    return node.start_mark.line + 1, node.start_mark.column + 1


def parse_spec(text: str) -> LoadedSpec:
    """Parse a YAML group spec; every error carries a line and column."""
    try:
        loader = yaml.SafeLoader(text)
        try:
            root = loader.get_single_node()
            if root is None:
                raise SpecError("empty spec document", 1, 1)
            if not isinstance(root, yaml.MappingNode):
                raise SpecError("spec must be a mapping", *_mark(root))
            values: dict[str, Any] = {}
            nodes: dict[str, yaml.Node] = {}
            for knode, vnode in root.value:
                key = knode.value if isinstance(knode, yaml.ScalarNode) else None
                if key not in SPEC_KEYS:
                    raise SpecError(f"unknown key {key!r} (allowed: {', '.join(SPEC_KEYS)})", *_mark(knode))
                if key in values:
                    raise SpecError(f"duplicate key {key!r}", *_mark(knode))
                values[key] = loader.construct_object(vnode, deep=True)
                nodes[key] = vnode
        finally:
            loader.dispose()
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line, col = (mark.line + 1, mark.column + 1) if mark else (None, None)
        raise SpecError(f"malformed YAML: {exc.problem or exc}", line, col) from None

    if "type" not in values:
        raise SpecError("missing required key 'type'", 1, 1)

    def fail(key: str, message: str):
        raise SpecError(message, *_mark(nodes[key]))

    if not isinstance(values["type"], str):
        fail("type", "type must be a string such as C2 or A1xA1")
    isogeny = values.get("isogeny", "sc")
    if isinstance(isogeny, list):
        if not all(isinstance(row, list) and all(isinstance(x, (int, str)) for x in row) for row in isogeny):
            fail("isogeny", "a lattice is a list of basis vectors")
        try:
            rows = [[Fraction(x) for x in row] for row in isogeny]
        except (ValueError, ZeroDivisionError):
            fail("isogeny", "lattice entries must be integers or fractions")
        if not rows or len({len(r) for r in rows}) != 1:
            fail("isogeny", "a lattice needs equally long basis vectors")
        isogeny = tuple(zip(*rows))  # basis vectors become columns
    elif isogeny not in ("sc", "ad"):
        fail("isogeny", "isogeny must be sc, ad or a list of basis vectors")
    twists = {}
    for key in ("sigma", "fr"):
        v = values.get(key, "id")
        if isinstance(v, list):
            if not all(isinstance(x, int) for x in v):
                fail(key, f"{key} permutation must list integers")
            v = tuple(x - 1 for x in v)  # 1-indexed in documents
        elif not isinstance(v, str):
            fail(key, f"{key} must be id, flip, cycles or a permutation")
        twists[key] = v
    p = values.get("p")
    if p is not None and (not isinstance(p, int) or isinstance(p, bool) or p < 0):
        fail("p", "p must be a non-negative integer")
    q = values.get("q")
    if q is None:
        qs: tuple[int, ...] = ()
    elif isinstance(q, int) and not isinstance(q, bool):
        qs = (q,)
    elif isinstance(q, list) and q and all(isinstance(x, int) and not isinstance(x, bool) for x in q):
        qs = tuple(q)
    else:
        fail("q", "q must be an integer or a non-empty list of integers")
    for x in qs:
        try:
            qp = prime_of_q(x)
        except InputError as exc:
            fail("q", str(exc))
        if p and qp != p:
            fail("q", f"q = {x} is not a power of p = {p}")
    try:
        cartan_type = parse_cartan_type(values["type"])
    except InputError as exc:
        fail("type", str(exc))
    for key in ("sigma", "fr"):
        try:
            parse_diagram_aut(twists[key], cartan_type)
        except InputError as exc:
            fail(key, f"{key}: {exc}")
    spec = GroupSpec(values["type"], isogeny, twists["sigma"], twists["fr"], p or None, None)
    # validate the geometry now so errors point at the document
    try:
        build_group(spec)
    except InputError as exc:
        if isinstance(exc, SpecError) and exc.line is not None:
            raise
        message = str(exc)
        if isinstance(exc, InvalidLattice):
            key = "isogeny"
        else:
            key = next((k for k in ("sigma", "fr", "isogeny") if message.startswith(k)), "type")
        line, column = _mark(nodes.get(key, nodes["type"]))
        raise type(exc)(f"line {line}, column {column}: {message}") from None
    return LoadedSpec(spec, qs)


def load_spec(path: str | Path) -> LoadedSpec:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecError(f"cannot read spec file: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise SpecError("spec file is not UTF-8") from None
    return parse_spec(text)


def _q_list(loaded: LoadedSpec, override: str | None) -> tuple[int, ...]:
    if override:
        try:
            return tuple(int(x) for x in override.split(",") if x.strip())
        except ValueError:
            raise SpecError(f"--q expects a comma-separated list of integers, got {override!r}") from None
    return loaded.qs


def _context(loaded: LoadedSpec, q: int | None = None) -> GroupContext:
    return build_group(loaded.spec, q=q)


# ---------------------------------------------------------------------------
# rendering helpers
# ---------------------------------------------------------------------------


def _frac(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _cycles(perm: Sequence[int]) -> str:
    """1-indexed cycle notation of a diagram permutation, ``id`` for the identity."""
    seen, out = set(), []
    for i in range(len(perm)):
        if i in seen or perm[i] == i:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(str(j + 1))
            j = perm[j]
        out.append("(" + " ".join(cyc) + ")")
    return "".join(out) or "id"


def _describe(ctx: GroupContext) -> str:
    return f"{ctx.name} isogeny={ctx.isogeny} sigma={_cycles(ctx.sigma.perm)} fr={_cycles(ctx.fr.perm)}"


def _width(text: str) -> int:
    return sum(not unicodedata.combining(c) for c in text)


def _pad(text: str, width: int) -> str:
    return text + " " * (width - _width(text))


def _table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [max([_width(h)] + [_width(r[i]) for r in rows]) for i, h in enumerate(header)]
    lines = ["  ".join(_pad(h, w) for h, w in zip(header, widths)).rstrip()]
    lines += ["  ".join(_pad(c, w) for c, w in zip(r, widths)).rstrip() for r in rows]
    return "\n".join(lines)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _machine(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def classes_data(loaded: LoadedSpec, qs: Sequence[int]) -> dict:
    ctx = _context(loaded)
    table = sigma_classes(ctx)
    ids = list(range(len(table.classes)))
    labels = class_labels(ctx, ids)
    contexts = {q: _context(loaded, q) for q in qs}
    rows = []
    for c in ids:
        rep = table.representatives[c]
        elliptic = is_elliptic(ctx, rep)
        row = {
            "class": c,
            "label": labels[c],
            "size": len(table.classes[c]),
            "order": class_order(ctx, c) if elliptic else None,
            "elliptic": elliptic,
            "tame": is_tame_class(ctx, rep),
            "stable": {},
        }
        for q, cq in contexts.items():
            try:
                solve_w_fr(cq, rep, q)
                row["stable"][str(q)] = True
            except NoSolution:
                row["stable"][str(q)] = False
        rows.append(row)
    return {"group": _describe(ctx), "classes": rows}


def render_classes(data: dict) -> str:
    qs = sorted({q for r in data["classes"] for q in r["stable"]}, key=int)
    header = ["class", "label", "size", "order", "elliptic", "tame"] + [f"stable q={q}" for q in qs]
    rows = []
    for r in data["classes"]:
        rows.append(
            [str(r["class"]), r["label"], str(r["size"]), "-" if r["order"] is None else str(r["order"]),
             "yes" if r["elliptic"] else "no", "yes" if r["tame"] else "no"]
            + ["yes" if r["stable"][q] else "no" for q in qs]
        )
    return f"# {data['group']}\n" + _table(header, rows)


def kac_data(loaded: LoadedSpec) -> dict:
    ctx = _context(loaded)
    points = all_points(ctx)
    labels = class_labels(ctx, [kp.class_id for kp in points])
    rows = []
    for kp in points:
        rows.append(
            {
                "class": kp.class_id,
                "label": labels[kp.class_id],
                "order": kp.order,
                "lambda": [_frac(x) for x in kp.lam],
                "point": [_frac(x) for x in kp.point.coords],
                "point_text": kp.point.format(),
                "j": kp.j,
                "kac": list(kp.coords),
            }
        )
    return {"group": _describe(ctx), "points": rows}


def render_kac(data: dict) -> str:
    header = ["class", "label", "order", "lambda", "point", "j", "kac"]
    rows = [
        [str(r["class"]), r["label"], str(r["order"]), format_cocharacter([Fraction(x) for x in r["lambda"]]).removeprefix("x0 + ") if any(Fraction(x) for x in r["lambda"]) else "0",
         r["point_text"], str(r["j"]), "(" + ", ".join(str(x) for x in r["kac"]) + ")"]
        for r in data["points"]
    ]
    return f"# {data['group']}\n" + _table(header, rows)


def report_data(report: ClassificationReport) -> dict:
    rows = []
    for r in report.rows:
        rows.append(
            {
                "label": r.label,
                "point": [_frac(x) for x in r.kac.point.coords],
                "point_text": r.kac.point.format(),
                "order": r.kac.order,
                "stable": r.stable_count,
                "embeddings": list(r.embeddings),
                "rational": "unsupported" if r.rational is None else r.rational,
                "fibers": None if r.fibers is None else [list(f) for f in r.fibers],
            }
        )
    return {"q": report.q, "rows": rows}


def classify_data(loaded: LoadedSpec, qs: Sequence[int]) -> dict:
    if not qs:
        raise SpecError("classify needs at least one q (in the spec or via --q)")
    reports = [report_data(full_report(_context(loaded, q), q)) for q in qs]
    return {"group": _describe(_context(loaded)), "reports": reports}


def render_classify(data: dict) -> str:
    parts = [f"# {data['group']}"]
    for rep in data["reports"]:
        header = ["label", "point", "stable", "embeddings", "rational", "fibers (embeddings:rational)"]
        rows = []
        for r in rep["rows"]:
            fibers = "-" if r["fibers"] is None else " ".join(f"{e}:{f}" for e, f in r["fibers"])
            rows.append([r["label"], r["point_text"], str(r["stable"]), "[" + ", ".join(map(str, r["embeddings"])) + "]", str(r["rational"]), fibers])
        parts.append(f"\nq = {rep['q']}\n" + _table(header, rows))
    return "\n".join(parts)


# --- figures ---------------------------------------------------------------


def _coroot_gram(ctx: GroupContext) -> list[list[Fraction]]:
    """W-invariant inner products of the simple coroots."""
    n = ctx.rank
    unit = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    lengths = [ctx.inner(u, u) for u in unit]
    return [[4 * ctx.inner(unit[i], unit[j]) / (lengths[i] * lengths[j]) for j in range(n)] for i in range(n)]


def _planar(ctx: GroupContext, points: Sequence[Sequence[Fraction]]) -> list[tuple[float, ...]]:
    """Euclidean coordinates of points of the sigma-fixed subspace (dimension <= 2)."""
    from . import intlin

    n = ctx.rank
    basis = intlin.kernel_basis(intlin.mat_sub(ctx.sigma.matrix(), intlin.identity(n)))
    gram = _coroot_gram(ctx)

    def ip(x, y):
        return float(sum(x[i] * gram[i][j] * y[j] for i in range(n) for j in range(n)))

    ortho: list[tuple[float, ...]] = []
    for b in basis:
        v = [float(x) for x in b]
        for e in ortho:
            c = ip(v, e)
            v = [a - c * b_ for a, b_ in zip(v, e)]
        norm = math.sqrt(ip(v, v))
        ortho.append(tuple(a / norm for a in v))
    return [tuple(ip([float(x) for x in p], e) for e in ortho) for p in points]


def alcove_svg(ctx: GroupContext, size: int = 480) -> str:
    """SVG drawing of the closed alcove with the point of every tame elliptic class."""
    dim = fixed_subspace_dimension(ctx)
    if dim > 2:
        raise RankTooLarge(f"the alcove of {ctx.name} has dimension {dim}; figures need dimension <= 2")
    verts = alcove_vertices(ctx)
    points = all_points(ctx)
    labels = class_labels(ctx, [kp.class_id for kp in points])
    vx = _planar(ctx, verts)
    px = _planar(ctx, [kp.point.coords for kp in points])
    if dim == 1:
        vx = [(v[0], 0.0) for v in vx]
        px = [(p[0], 0.0) for p in px]
    cx = sum(v[0] for v in vx) / len(vx)
    cy = sum(v[1] for v in vx) / len(vx)
    order = sorted(range(len(vx)), key=lambda i: (math.atan2(vx[i][1] - cy, vx[i][0] - cx), i))
    xs = [v[0] for v in vx]
    ys = [v[1] for v in vx]
    extent = max(max(xs) - min(xs), max(ys) - min(ys)) or 1.0
    margin = 60
    scale = (size - 2 * margin) / extent

    def sx(x: float) -> float:
        return margin + (x - min(xs)) * scale

    def sy(y: float) -> float:
        return size - margin - (y - min(ys)) * scale

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f"  <title>Alcove of {ctx.name} with elliptic points</title>",
        f'  <rect width="{size}" height="{size}" fill="white"/>',
    ]
    poly = " ".join(f"{sx(vx[i][0]):.3f},{sy(vx[i][1]):.3f}" for i in order)
    if dim == 1:
        out.append(f'  <polyline points="{poly}" fill="none" stroke="black" stroke-width="2"/>')
    else:
        out.append(f'  <polygon points="{poly}" fill="#eef3fb" stroke="black" stroke-width="2"/>')
    for v, coords in zip(vx, verts):
        den = 1
        for x in coords:
            den = math.lcm(den, Fraction(x).denominator)
        text = AlcovePoint.from_cocharacter(tuple(Fraction(x) * den for x in coords), den).format()
        out.append(f'  <circle cx="{sx(v[0]):.3f}" cy="{sy(v[1]):.3f}" r="3" fill="black" class="vertex"/>')
        out.append(f'  <text x="{sx(v[0]) + 6:.3f}" y="{sy(v[1]) + 16:.3f}" font-size="11" fill="#555">{_xml(text)}</text>')
    for p, kp in zip(px, points):
        label = f"{labels[kp.class_id]}: {kp.point.format()}"
        out.append(f'  <circle cx="{sx(p[0]):.3f}" cy="{sy(p[1]):.3f}" r="5" fill="#c0392b" class="point"/>')
        out.append(f'  <text x="{sx(p[0]) + 8:.3f}" y="{sy(p[1]) - 8:.3f}" font-size="13">{_xml(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _xml(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


# --- selftest ----------------------------------------------------------------


def selftest(fault: str | None = None, stream=None) -> bool:
    from . import suites

    stream = stream or sys.stdout
    results = suites.structural_suites(fault=fault)
    results += suites.kac_golden_suite()
    results += suites.count_golden_suite()
    results += suites.fiber_bound_suite()
    results += suites.coxeter_suite()
    for r in results:
        stream.write(r.line() + "\n")
    for d in suites.disputed_values():
        stream.write(d.line() + "\n")
    failed = sum(not r.passed for r in results)
    stream.write(f"{len(results) - failed} passed, {failed} failed\n")
    return failed == 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tametori", description="Tame elliptic tori: classes, Kac points and counts.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, q: bool = True, fmt: bool = True) -> None:
        p.add_argument("--spec", required=True, help="group spec (YAML)")
        if q:
            p.add_argument("--q", help="comma-separated residue field sizes (overrides the spec)")
        if fmt:
            p.add_argument("--format", choices=("text", "machine"), default="text")
        p.add_argument("--out", help="write output to this file instead of stdout")
        p.add_argument("--max-weyl-order", type=int, default=None, help="largest Weyl group to enumerate")

    common(sub.add_parser("classes", help="list sigma-classes, ellipticity and Frobenius stability"))
    common(sub.add_parser("kac", help="alcove points and Kac coordinates of elliptic classes"), q=False)
    common(sub.add_parser("classify", help="stable classes, embeddings and rational classes"))
    svg = sub.add_parser("alcove-svg", help="draw the alcove with the elliptic points")
    common(svg, q=False, fmt=False)
    st = sub.add_parser("selftest", help="run the verification suites")
    st.add_argument("--inject-fault", choices=("structure-constants",), help=argparse.SUPPRESS)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "max_weyl_order", None) is not None:
            try:
                set_max_order(args.max_weyl_order)
            except ValueError as exc:
                raise SpecError(str(exc)) from None
        if args.command == "selftest":
            return 0 if selftest(args.inject_fault) else 1
        loaded = load_spec(args.spec)
        if args.command == "classes":
            data = classes_data(loaded, _q_list(loaded, args.q))
            _emit(_machine(data) if args.format == "machine" else render_classes(data), args.out)
        elif args.command == "kac":
            data = kac_data(loaded)
            _emit(_machine(data) if args.format == "machine" else render_kac(data), args.out)
        elif args.command == "classify":
            data = classify_data(loaded, _q_list(loaded, args.q))
            _emit(_machine(data) if args.format == "machine" else render_classify(data), args.out)
        elif args.command == "alcove-svg":
            if not args.out:
                raise SpecError("alcove-svg needs --out")
            Path(args.out).write_text(alcove_svg(_context(loaded)), encoding="utf-8")
        return 0
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CheckError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1
    except TametoriError as exc:
        print(f"failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    finally:
        set_max_order(DEFAULT_MAX_ORDER)


def main() -> None:
    sys.exit(run())

