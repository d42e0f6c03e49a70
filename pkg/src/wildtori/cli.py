"""Command-line front end: ``wildtori <command> ...``."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from mpmath import mp

from . import __version__
from . import io
from . import numeric as nm
from .census import CensusError, mirror_table, run_algorithm1, run_algorithm2
from .cluster import SymbolError, build_cluster, enumerate_proper_spheres, parse_symbol, surface_of_cluster
from .geometry import GeometryError, embedding_with_lengths, strong_embedding
from .lengths import LengthExpressionError, LengthTriple, NotInLambda, eval_length
from .torus import HalfSpaceViolated, glue_higher_genus, supporting_faces
from .verify import verify_record
from .wild import compute_wild_colouring


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wildtori", description="Toroidal polyhedra from chains of wild tetrahedra.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--precision", type=int, default=50, metavar="DIGITS", help="working decimal digits (default 50)")
    p.add_argument("--seed-grid", choices=("default", "dense"), default="default", help="root-finder seed density")
    p.add_argument("--jobs", type=int, default=1, metavar="N", help="worker processes for census runs")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("embed", help="embed a sphere given by a tetra-symbol or a spheres file")
    src = e.add_mutually_exclusive_group(required=True)
    src.add_argument("--symbol", help='tetra-symbol such as "(1_1 1_2)^(1,1,1)"')
    src.add_argument("--spheres-file", type=Path, help="JSON lines written by enumerate-spheres")
    e.add_argument("--index", type=int, default=0, help="line of the spheres file (default 0)")
    e.add_argument("--x", help='base parameter x ("inf" allowed)')
    e.add_argument("--h", help="base parameter h")
    e.add_argument("--out", type=Path, help="embedding JSON (default: stdout)")
    e.add_argument("--obj", type=Path, help="also write a Wavefront OBJ mesh")
    e.add_argument("--html", type=Path, help="also write a self-contained HTML view")

    s = sub.add_parser("enumerate-spheres", help="proper spheres of chains of K tetrahedra")
    s.add_argument("--tetra", type=int, required=True, metavar="K")
    s.add_argument("--out", type=Path, required=True)

    t = sub.add_parser("search-tori", help="census of toroidal polyhedra from spheres with N faces")
    t.add_argument("--faces", type=int, required=True, metavar="N")
    t.add_argument("--mode", choices=("mirror", "identify"), required=True)
    t.add_argument("--out", type=Path, required=True, metavar="DIR")
    t.add_argument("--no-figures", action="store_true", help="skip the PNG figures")

    v = sub.add_parser("verify", help="re-check a record; exit 1 on failure")
    v.add_argument("--input", type=Path, required=True, nargs="+")
    v.add_argument("--quiet", action="store_true")

    m = sub.add_parser("sommerville", help="disphenoid filling and closed chains through it")
    m.add_argument("--radius", type=int, required=True)
    m.add_argument("--max-cycle", type=int, default=20)
    m.add_argument("--limit", type=int, default=1, help="number of chains to report (default 1)")
    m.add_argument("--lax", action="store_true", help="allow face contacts between non-consecutive cells")
    m.add_argument("--out", type=Path, required=True, metavar="DIR")

    g = sub.add_parser("glue", help="glue two embedded surfaces along supporting faces")
    g.add_argument("--a", type=Path, required=True)
    g.add_argument("--b", type=Path, required=True)
    g.add_argument("--face-a", default="auto", help='index into the supporting faces, or "auto"')
    g.add_argument("--face-b", default="auto")
    g.add_argument("--out", type=Path, help="glued record JSON (default: stdout)")
    return p


def _emit(data: dict, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(io.dumps(data))
    else:
        io.write_json(out, data)


def _cmd_embed(args) -> int:
    if args.symbol is not None:
        if args.x is not None or args.h is not None:
            raise UsageError("--x/--h apply to --spheres-file only; a symbol carries its own lengths")
        try:
            sym = parse_symbol(args.symbol)
        except (SymbolError, LengthExpressionError, NotInLambda) as exc:
            raise UsageError(f"bad symbol: {exc}") from exc
        cs = surface_of_cluster(build_cluster(sym))
        if cs is None:
            raise UsageError("the symbol's cluster does not bound a surface")
        try:
            emb = embedding_with_lengths(cs.surface, cs.colouring, sym.lengths)
        except GeometryError as exc:
            raise UsageError(str(exc)) from exc
    else:
        if args.x is None or args.h is None:
            raise UsageError("--spheres-file needs --x and --h")
        spheres = io.read_surface_lines(args.spheres_file)
        if not 0 <= args.index < len(spheres):
            raise UsageError(f"--index must lie in 0..{len(spheres) - 1}")
        S = spheres[args.index]
        x = mp.inf if args.x.strip().lower() == "inf" else eval_length(args.x)
        try:
            emb = strong_embedding(S, compute_wild_colouring(S), x=x, h=eval_length(args.h))
        except GeometryError as exc:
            raise UsageError(str(exc)) from exc
    _emit(io.embedding_to_json(emb), args.out)
    if args.obj:
        io.write_obj(emb, args.obj)
    if args.html:
        io.write_html(emb, args.html, title=args.symbol or f"sphere {args.index}")
    return 0


def _cmd_enumerate(args) -> int:
    if args.tetra < 1:
        raise UsageError("--tetra must be positive")
    spheres = enumerate_proper_spheres(args.tetra)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text("".join(io.surface_line(sp.surface, sp.label) + "\n" for sp in spheres))
    print(f"{len(spheres)} proper spheres with {2 * args.tetra + 2} faces")
    return 0


def _cmd_search(args) -> int:
    from . import plotting

    with io.Timer() as timer:
        try:
            if args.mode == "mirror":
                census = run_algorithm1(args.faces, args.seed_grid, args.jobs)
            else:
                census = run_algorithm2(args.faces, args.seed_grid, args.jobs)
        except CensusError as exc:
            raise UsageError(str(exc)) from exc
    out: Path = args.out
    rec_dir = out / "records"
    rec_dir.mkdir(parents=True, exist_ok=True)
    manifest = io.RunManifest(
        "search-tori",
        {"faces": args.faces, "mode": args.mode, "seed_grid": args.seed_grid},
    )
    written = []
    for i, rec in enumerate(census.records):
        tag = "selfint" if rec.self_intersecting else "embedded"
        written.append(io.write_json(rec_dir / f"torus_{i:03d}_{tag}.json", io.record_to_json(rec)))
    summary = [
        census.summary_line(),
        f"spheres: {census.spheres}",
        f"certificates: {census.certificates}",
        f"rejected certificates: {len(census.rejected)}",
    ]
    if args.mode == "mirror":
        summary += ["", mirror_table([census]).rstrip()]
    summary += ["", "records (normalised lengths):"]
    for path, rec in zip(written, census.records):
        lens = ", ".join(nm.fmt(t, 12) for t in rec.lengths.normalised())
        summary.append(f"  {path.name}: ({lens})")
    written.append(out / "summary.txt")
    (out / "summary.txt").write_text("\n".join(summary) + "\n")
    if not args.no_figures:
        title = f"{census.torus_faces}-face tori ({args.mode})"
        written.append(plotting.length_scatter(census.records, out / "lengths.png", title))
        written.append(plotting.gallery(census.records, out / "gallery.png", title))
    for path in written:
        manifest.add_output(path, out)
    manifest.wall_time_s = round(timer.elapsed, 3)
    manifest.write(out / "manifest.json")
    print(census.summary_line())
    return 0


def _cmd_verify(args) -> int:
    status = 0
    for path in args.input:
        try:
            data = io.read_json(path)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read {path}: {exc}") from exc
        rep = verify_record(data)
        if not args.quiet:
            for line in rep.lines():
                print(f"{path}: {line}")
        print(f"{path}: {'OK' if rep.ok else 'FAILED'}")
        if not rep.ok:
            status = 1
    return status


def _cmd_sommerville(args) -> int:
    from .sommerville import find_perfect_chains, generate_tiling

    if args.radius < 1 or args.max_cycle < 3:
        raise UsageError("--radius must be >= 1 and --max-cycle >= 3")
    with io.Timer() as timer:
        g = generate_tiling(args.radius)
        chains = find_perfect_chains(g, args.max_cycle, strict=not args.lax, limit=args.limit)
    out: Path = args.out
    manifest = io.RunManifest(
        "sommerville",
        {"radius": args.radius, "max_cycle": args.max_cycle, "limit": args.limit, "lax": args.lax},
    )
    paths = [io.write_json(out / "tiling.json", io.tiling_to_json(g))]
    for i, ch in enumerate(chains):
        paths.append(io.write_json(out / f"chain_{i:03d}.json", io.sommerville_to_json(ch)))
    for p in paths:
        manifest.add_output(p, out)
    manifest.wall_time_s = round(timer.elapsed, 3)
    manifest.write(out / "manifest.json")
    print(f"{len(g.cells)} cells; {len(chains)} closed chains")
    for ch in chains:
        print(
            f"  {len(ch.cycle)} cells, {ch.surface.num_faces} faces, chi={ch.euler_characteristic}, "
            f"self-intersecting={ch.self_intersecting}"
        )
    return 0


def _pick_face(emb, choice: str):
    faces = supporting_faces(emb)
    if not faces:
        raise UsageError("surface has no supporting face")
    if choice == "auto":
        return faces[0]
    try:
        i = int(choice)
    except ValueError as exc:
        raise UsageError(f"face index must be an integer or 'auto', got {choice!r}") from exc
    if not 0 <= i < len(faces):
        raise UsageError(f"face index must lie in 0..{len(faces) - 1}")
    return faces[i]


def _cmd_glue(args) -> int:
    ea = io.embedding_from_json(io.read_json(args.a))
    eb = io.embedding_from_json(io.read_json(args.b))
    # bring both to a common scale
    ratio = min(ea.lengths) / min(eb.lengths)
    if abs(ratio - 1) > nm.EPS_LEN:
        eb = eb.transformed([[ratio, 0, 0], [0, ratio, 0], [0, 0, ratio]], [0, 0, 0])
        eb = replace(eb, lengths=LengthTriple(*(t * ratio for t in eb.lengths)))
    try:
        rec = glue_higher_genus(ea, eb, _pick_face(ea, args.face_a), _pick_face(eb, args.face_b))
    except (HalfSpaceViolated, ValueError) as exc:
        print(f"glue failed: {exc}", file=sys.stderr)
        return 1
    _emit(io.glued_to_json(rec), args.out)
    print(f"genus {rec.genus}, chi {rec.euler_characteristic}", file=sys.stderr)
    return 0


COMMANDS = {
    "embed": _cmd_embed,
    "enumerate-spheres": _cmd_enumerate,
    "search-tori": _cmd_search,
    "verify": _cmd_verify,
    "sommerville": _cmd_sommerville,
    "glue": _cmd_glue,
}


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    if args.precision < 20:
        parser.error("--precision must be at least 20")
    if args.jobs < 1:
        parser.error("--jobs must be positive")
    nm.set_precision(args.precision)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.error(str(exc))
    return 2


if __name__ == "__main__":
    sys.exit(main())
