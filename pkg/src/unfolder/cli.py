"""Command-line front end."""

from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path


from .cut_tree import (CutTree, build_downhill_tree, build_steepest_edge_tree,
                       enumerate_spanning_trees, require_spanning)
from .development import layout_faces
from .errors import (ConvexityError, DomainError, FormatError, GeneralPositionError,
                     InternalError, SearchExhausted, TreeError)
from .geom import TolerancePolicy
from .polyhedron import affine_stretch, as_direction, check_general_position, load_polyhedron, to_off
from .report import RunReport, digest
from .simplicity import oracle_layout_overlap, unfolding_is_simple
from .solids import named_solids, squat_truncated_tetrahedron
from .stretch import stretch_search
from .svg import layout_svg
from .tracing import trace_boundary
from .verify import run_suites

EXIT_OK, EXIT_INTERNAL, EXIT_VALIDATION, EXIT_EXHAUSTED, EXIT_IO = 0, 1, 2, 3, 4


def _builtin(name):
    solids = dict(named_solids(), squat_truncated_tetrahedron=squat_truncated_tetrahedron())
    if name not in solids:
        raise FormatError(f"unknown builtin mesh {name!r}; choose from {sorted(solids)}")
    return solids[name]


def _load(args, tol):
    """Read --mesh; 'builtin:<name>' selects one of the bundled solids."""
    if args.mesh.startswith("builtin:"):
        P = _builtin(args.mesh.split(":", 1)[1])
        return P, digest(to_off(P).encode())
    data = Path(args.mesh).read_bytes()
    return load_polyhedron(data, args.format, tol), digest(data)


def _parse_u(text):
    try:
        parts = [float(x) for x in text.split(",")]
    except ValueError:
        raise DomainError(f"bad direction {text!r}") from None
    if len(parts) != 3:
        raise DomainError(f"direction needs three components, got {text!r}")
    return as_direction(parts)


def _tree(args, P, u, tol):
    src = args.tree
    if src == "downhill":
        return build_downhill_tree(P, u, tol)
    if src == "steepest":
        return build_steepest_edge_tree(P, u, tol)
    T = CutTree.from_text(Path(src).read_text(), P.n_vertices)
    require_spanning(P, T)
    return T


def _write(path, text):
    if path:
        Path(path).write_text(text)


def cmd_info(args, tol):
    P, dg = _load(args, tol)
    angles = [P.total_angle(v) for v in range(P.n_vertices)]
    info = {"V": P.n_vertices, "E": P.n_edges, "F": P.n_faces,
            "gauss_bonnet_residual": P.gauss_bonnet_residual(), "total_angles": angles}
    print(f"V={P.n_vertices} E={P.n_edges} F={P.n_faces}")
    print(f"gauss-bonnet residual: {info['gauss_bonnet_residual']:.3e}")
    for v, a in enumerate(angles):
        print(f"  vertex {v}: total angle {a:.12f} (defect {2 * math.pi - a:.12f})")
    return RunReport("info", dg, info=info)


def _unfold_report(cmd, P, T, u, dg, tol, args):
    gp = check_general_position(P, u, tol)
    TP = trace_boundary(P, T, u, tol)
    rep = unfolding_is_simple(P, T, TP, tol=tol)
    lay = layout_faces(P, T, TP)
    overlap = oracle_layout_overlap(lay, tol)
    _write(args.out_svg, layout_svg(lay, overlapping=not rep.simple))
    tracing = TP.to_dict(P) if gp.is_general else {"vertices": list(TP.vertices)}
    report = RunReport(cmd, dg, u=u.tolist(), tree={"root": T.root, "edges": [list(e) for e in T.edges]},
                       general_position=gp.to_dict(), simplicity=dict(rep.to_dict(), oracle_overlap=overlap),
                       tracing=tracing)
    print(f"unfolding {'simple' if rep.simple else 'OVERLAPPING'} "
          f"(layout oracle: {'overlap' if overlap else 'no overlap'})")
    return report


def cmd_unfold(args, tol):
    P, dg = _load(args, tol)
    u = _parse_u(args.u)
    T = _tree(args, P, u, tol)
    return _unfold_report("unfold", P, T, u, dg, tol, args)


def cmd_stretch(args, tol):
    P, dg = _load(args, tol)
    u = _parse_u(args.u)
    T = _tree(args, P, u, tol)
    res = stretch_search(P, T, u, cap_exponent=args.lambda_cap, refine_steps=args.refine,
                         certify=args.certify, tol=tol)
    Q = affine_stretch(P, u, float(res.lam))
    TP = trace_boundary(Q, T, u, tol)
    lay = layout_faces(Q, T, TP)
    _write(args.out_svg, layout_svg(lay))
    print(f"lambda = {res.lam} simple={res.simple} C1={res.c1_certified} C2={res.c2_certified}")
    return RunReport("stretch", dg, u=u.tolist(), tree={"root": T.root, "edges": [list(e) for e in T.edges]},
                     general_position=check_general_position(P, u, tol).to_dict(), stretch=res.to_dict())


def cmd_verify(args, tol):
    meshes, dg = None, ""
    if args.mesh:
        P, dg = _load(args, tol)
        meshes = [P]
    matrix = run_suites(meshes, args.seed, args.trials)
    for name, row in matrix.items():
        print(f"{name:22s} {'PASS' if row['passed'] else 'FAIL'} ({row['failures']}/{row['trials']} failed)")
    return RunReport("verify", dg, seed=args.seed, verify=matrix)


def cmd_sweep(args, tol):
    P, dg = _load(args, tol)
    stream = enumerate_spanning_trees(P, args.limit)
    simple = overlapping = disagree = 0
    for T in stream:
        TP = trace_boundary(P, T)
        ok = unfolding_is_simple(P, T, TP, tol=tol).simple
        simple += ok
        overlapping += not ok
        if args.oracle:
            disagree += ok == oracle_layout_overlap(layout_faces(P, T, TP), tol)
    sweep = {"trees": stream.count, "simple": simple, "overlapping": overlapping,
             "truncated": stream.truncated}
    if args.oracle:
        sweep["oracle_disagreements"] = disagree
    print(f"{stream.count} trees: {simple} simple, {overlapping} overlapping"
          + (" (truncated)" if stream.truncated else ""))
    return RunReport("sweep", dg, sweep=sweep)


def build_parser():
    p = argparse.ArgumentParser(prog="unfolder", description="Edge unfoldings of convex polyhedra.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, mesh_required=True):
        sp.add_argument("--mesh", required=mesh_required,
                        help="OFF/OBJ file, or builtin:<name> for a bundled solid")
        sp.add_argument("--format", default="off", choices=["off", "obj"])
        sp.add_argument("--out-json", help="write the run report here")
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("info", help="counts, Gauss-Bonnet residual and total angles")
    common(sp)
    for name in ("unfold", "stretch"):
        sp = sub.add_parser(name, help="unfold along a cut tree" if name == "unfold"
                            else "search for a stretch factor giving a simple unfolding")
        common(sp)
        sp.add_argument("--u", default="0,0,1", help="direction x,y,z")
        sp.add_argument("--tree", default="downhill", help="downhill, steepest, or a tree file")
        sp.add_argument("--out-svg")
        if name == "stretch":
            sp.add_argument("--lambda-cap", type=int, default=30, help="cap exponent: lambda <= 2^cap")
            sp.add_argument("--refine", type=int, default=0, help="bisection steps after the first success")
            sp.add_argument("--certify", action="store_true",
                            help="keep doubling until both planar conditions are certified")
    sp = sub.add_parser("verify", help="run the randomized property suites")
    common(sp, mesh_required=False)
    sp.add_argument("--trials", type=int, default=50)
    sp = sub.add_parser("sweep", help="unfold along every spanning tree")
    common(sp)
    sp.add_argument("--limit", type=int, default=None)
    sp.add_argument("--oracle", action="store_true", help="cross-check each tree with the layout oracle")
    return p


COMMANDS = {"info": cmd_info, "unfold": cmd_unfold, "stretch": cmd_stretch,
            "verify": cmd_verify, "sweep": cmd_sweep}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        tol = TolerancePolicy.from_env()
        t0 = time.perf_counter()
        report = COMMANDS[args.command](args, tol)
        report.seed = args.seed
        report.timings = {"total_s": time.perf_counter() - t0}
        _write(args.out_json, report.to_json())
        failed = report.verify and not all(r["passed"] for r in report.verify.values())
        return EXIT_VALIDATION if failed else EXIT_OK
    except SearchExhausted as exc:
        print(f"search exhausted: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED
    except (FormatError, ConvexityError, GeneralPositionError, TreeError, DomainError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
