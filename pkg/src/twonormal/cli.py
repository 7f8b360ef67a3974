"""Command-line front end.

Exit codes: 0 success, 1 check or constraint failure, 2 parse error,
3 resource guard exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import __version__, curves
from .enumeration import brute_force_rays, enumerate_vertex_surfaces, extreme_rays
from .ghs_order import SurfaceComplexity, SymbolicGHS, compare_ghs
from .matching import AdmissibilityMode
from .pieces import CoordinateLayout, dodecagon_count
from .surface import InconsistencyError, reconstruct, report
from .triangulation import (
    BUILTINS,
    Triangulation,
    TriangulationError,
    builtin,
    compute_skeleton,
    is_closed_manifold,
    parse_triangulation,
)

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_GUARD = 0, 1, 2, 3
CSV_FIELDS = ("vector", "tubes", "class", "chi", "components", "edge_weights")


@dataclass
class RunConfig:
    source: str
    mode: AdmissibilityMode = AdmissibilityMode.NORMAL
    fmt: str = "json"
    max_tets: int = 8
    allow_nested_tubes: bool = False
    require_closed: bool = False


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def load(source: str) -> Triangulation:
    path = Path(source)
    if not path.exists() and source in BUILTINS:
        return builtin(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise CliError(f"{source}: {exc.strerror}", EXIT_PARSE) from None
    try:
        return parse_triangulation(text)
    except TriangulationError as exc:
        raise CliError(f"{source}:{exc}", EXIT_PARSE) from None


# ---------------------------------------------------------------------------
# census records


def census(tri: Triangulation, cfg: RunConfig) -> dict:
    sk = compute_skeleton(tri)
    layout = CoordinateLayout.for_tets(tri.tet_count)
    found = enumerate_vertex_surfaces(tri, cfg.mode, allow_nested_tubes=cfg.allow_nested_tubes)
    surfaces = []
    for s in found:
        rep = report(reconstruct(tri, s.vector, s.tubes, layout, sk))
        surfaces.append(
            {
                "vector": list(s.vector),
                "tubes": [t.as_dict() for t in s.tubes],
                "class": s.surface_class.value,
                "chi": rep.euler_characteristic,
                "components": [
                    {"chi": c.chi, "orientable": c.orientable, "sphere": c.is_sphere}
                    for c in rep.components
                ],
                "edge_weights": rep.edge_weights,
            }
        )
    return {
        "version": __version__,
        "triangulation": {"tets": tri.tet_count, "V": sk.V, "E": sk.E, "F": sk.F, "T": sk.T},
        "mode": cfg.mode.value,
        "layout": layout.labels,
        "surfaces": surfaces,
    }


def to_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def to_csv(doc: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for rec in doc["surfaces"]:
        w.writerow(
            [rec[k] if isinstance(rec[k], (int, str)) else json.dumps(rec[k], sort_keys=True) for k in CSV_FIELDS]
        )
    return buf.getvalue()


def from_csv(text: str) -> list[dict]:
    """Inverse of ``to_csv`` for the record list."""
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        rec = {}
        for k in CSV_FIELDS:
            if k == "class":
                rec[k] = row[k]
            else:
                rec[k] = json.loads(row[k])
        out.append(rec)
    return out


def to_text(doc: dict) -> str:
    tri = doc["triangulation"]
    lines = [
        f"triangulation: T={tri['T']} V={tri['V']} E={tri['E']} F={tri['F']}",
        f"mode: {doc['mode']}  surfaces: {len(doc['surfaces'])}",
    ]
    for i, rec in enumerate(doc["surfaces"]):
        comps = " ".join(
            f"{c['chi']}{'' if c['orientable'] else '*'}" for c in rec["components"]
        )
        tubes = " ".join(f"t{t['tet']}e{t['edge']}[{t['slots'][0]},{t['slots'][1]}]" for t in rec["tubes"])
        nz = " ".join(f"{doc['layout'][j]}={x}" for j, x in enumerate(rec["vector"]) if x)
        lines.append(f"{i:4d} {rec['class']:<16} chi={rec['chi']:<3} comps=[{comps}] {nz} {tubes}".rstrip())
    return "\n".join(lines) + "\n"


FORMATTERS = {"json": to_json, "csv": to_csv, "text": to_text}


# ---------------------------------------------------------------------------
# commands


def cmd_validate(cfg: RunConfig, out) -> int:
    tri = load(cfg.source)
    sk = compute_skeleton(tri)
    closed = tri.closed
    print(f"V={sk.V} E={sk.E} F={sk.F} T={sk.T}", file=out)
    print(f"closed: {'yes' if closed else 'no'}", file=out)
    if closed:
        print(f"manifold: {'yes' if is_closed_manifold(tri) else 'no'}", file=out)
    print("edge degrees: " + " ".join(map(str, sk.degrees)), file=out)
    if cfg.require_closed and not closed:
        print("error: triangulation is not closed", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_enumerate(cfg: RunConfig, out) -> int:
    tri = load(cfg.source)
    if tri.tet_count > cfg.max_tets:
        raise CliError(f"{tri.tet_count} tetrahedra exceeds --max-tets {cfg.max_tets}", EXIT_GUARD)
    if not tri.closed:
        raise CliError("enumeration needs a closed triangulation", EXIT_FAIL)
    out.write(FORMATTERS[cfg.fmt](census(tri, cfg)))
    return EXIT_OK


def _selftest_checks(max_length: int, fault: bool):
    """Yield (name, passed, detail)."""
    t0 = time.perf_counter()
    found = curves.enumerate_curves(max_length)
    lengths = sorted({c.length for c in found if c.is_connected})
    allowed = {3} if not fault else set()
    ok = all(n in allowed or (n % 4 == 0 and n > 0) for n in lengths)
    yield (
        "curve lengths",
        ok,
        f"lengths observed ⊆ {{3}} ∪ 4ℤ⁺ up to {max_length}: {lengths} ({time.perf_counter() - t0:.2f}s)",
    )

    conflicts = curves.long_length_conflicts(found)
    yield "long curves", not conflicts, f"disjoint pairs of distinct long lengths: {len(conflicts)}"

    yield "dodecagon families", dodecagon_count() > 0, f"{dodecagon_count()} (coordinates per tetrahedron: {4 + 3 + 3 + dodecagon_count()})"

    rng = random.Random(0)
    bad = 0
    for _ in range(40):
        n = rng.randint(1, 9)
        rows = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(rng.randint(0, 5))]
        if extreme_rays(rows, dimension=n) != brute_force_rays(rows, dimension=n):
            bad += 1
    yield "extreme rays", bad == 0, f"double description agrees with brute force on 40 systems ({bad} mismatches)"

    tri = builtin("double2")
    layout = CoordinateLayout.for_tets(2)
    sk = compute_skeleton(tri)
    try:
        for s in enumerate_vertex_surfaces(tri, AdmissibilityMode.ALMOST_NORMAL):
            report(reconstruct(tri, s.vector, s.tubes, layout, sk))
        ok, detail = True, "cell and piece Euler characteristics agree on double2"
    except InconsistencyError as exc:
        ok, detail = False, str(exc)
    yield "euler characteristic", ok, detail


def cmd_selftest(max_length: int, fault: bool, out) -> int:
    for name, ok, detail in _selftest_checks(max_length, fault):
        print(f"{'ok  ' if ok else 'FAIL'} {name}: {detail}", file=out)
        if not ok:
            print(f"selftest failed: {name}", file=sys.stderr)
            return EXIT_FAIL
    return EXIT_OK


def parse_ghs(text: str) -> SymbolicGHS:
    """``"0,2;-2"`` is two thick levels, {0, 2} and {-2}; an empty level is ``""``."""
    levels = []
    for part in text.split(";"):
        part = part.strip()
        chis = tuple(int(x) for x in part.split(",") if x.strip()) if part else ()
        levels.append(SurfaceComplexity(chis))
    return SymbolicGHS(tuple(levels))


def cmd_ghs_compare(a: str, b: str, out) -> int:
    try:
        ga, gb = parse_ghs(a), parse_ghs(b)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None
    print(compare_ghs(ga, gb), file=out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="twonormal", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add_input(sp):
        sp.add_argument("triangulation", help=f"file path or built-in name ({', '.join(BUILTINS)})")
        sp.add_argument("--max-tets", type=int, default=8, metavar="N")
        sp.add_argument("--require-closed", action="store_true")

    v = sub.add_parser("validate", help="parse a triangulation and print its skeleton")
    add_input(v)

    e = sub.add_parser("enumerate", help="census of vertex surfaces")
    add_input(e)
    e.add_argument("--mode", choices=[m.value for m in AdmissibilityMode], default="normal")
    e.add_argument("--format", choices=sorted(FORMATTERS), default="json")
    e.add_argument("--allow-nested-tubes", action="store_true")
    e.add_argument("-o", "--output", type=Path, help="write to a file instead of stdout")

    s = sub.add_parser("selftest", help="run the built-in consistency checks")
    s.add_argument("--max-curve-length", type=int, default=curves.DEFAULT_MAX_LENGTH, metavar="L")
    s.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)

    g = sub.add_parser("ghs-compare", help="compare two splittings given by thick-level Euler characteristics")
    g.add_argument("a", help='thick levels, e.g. "0,2;-2"')
    g.add_argument("b")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = sys.stdout
    try:
        if args.command == "selftest":
            return cmd_selftest(args.max_curve_length, args.inject_fault, out)
        if args.command == "ghs-compare":
            return cmd_ghs_compare(args.a, args.b, out)
        cfg = RunConfig(source=args.triangulation, max_tets=args.max_tets, require_closed=args.require_closed)
        if args.command == "validate":
            return cmd_validate(cfg, out)
        cfg.mode = AdmissibilityMode.parse(args.mode)
        cfg.fmt = args.format
        cfg.allow_nested_tubes = args.allow_nested_tubes
        if args.output is not None:
            with args.output.open("w") as fh:
                return cmd_enumerate(cfg, fh)
        return cmd_enumerate(cfg, out)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except curves.CurveBoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD


if __name__ == "__main__":
    raise SystemExit(main())
