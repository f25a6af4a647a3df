"""Command-line interface: ``sdpath <command> ...``."""
from __future__ import annotations

import argparse
import sys

from . import io as sio
from .bench import parse_terrain_spec, run_bench
from .discretize import count_edge_nodes, discretize, hybrid_select, scheme_bound
from .errors import (
    EmptyMesh,
    InvalidEpsilon,
    NonTerrainMesh,
    ParseError,
    PointOffTerrain,
    UnreachableTarget,
)
from .oracle import gen_random_terrain, gen_star_pyramid
from .pipeline import SDPSolver
from .terrain import TerrainMesh, dump_terrain, geometry_params, load_terrain, parse_terrain, validate_terrain

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_UNREACHABLE = 3
EXIT_FLAGS = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_FLAGS, f"{self.prog}: error: {message}\n")


def _xy(text):
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y got {text!r}") from None
    return x, y


def _source(text):
    if "," in text:
        return _xy(text)
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a vertex index or x,y, got {text!r}") from None


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _solver(args, mesh):
    return SDPSolver(mesh, args.source, args.eps, args.scheme, args.algo)


def cmd_validate(args):
    verts, faces = parse_terrain(_read(args.terrain))
    report = validate_terrain(TerrainMesh(verts, faces))
    print(report.summary())
    return EXIT_OK if report.ok else EXIT_INPUT


def cmd_params(args):
    mesh = load_terrain(_read(args.terrain))
    gp = geometry_params(mesh)
    out = {
        "n": gp.n, "edges": mesh.n_edges, "faces": mesh.n_faces, "L": gp.L, "h": gp.h,
        "theta": gp.theta, "X": gp.X, "Xprime": gp.Xprime,
    }
    if args.eps is not None:
        ch = hybrid_select(gp, args.eps)
        out.update(
            epsilon=args.eps, uniform_bound=ch.uniform_bound, geometric_bound=ch.geometric_bound,
            hybrid_choice=ch.scheme,
        )
    _emit(sio.dumps(out), args.out)
    return EXIT_OK


def cmd_discretize(args):
    mesh = load_terrain(_read(args.terrain))
    gp = geometry_params(mesh)
    scheme = hybrid_select(gp, args.eps).scheme if args.scheme == "hybrid" else args.scheme
    if args.counts_only:
        counts = count_edge_nodes(mesh, args.eps, scheme, gp)
    else:
        disc = discretize(mesh, args.eps, scheme, gp)
        counts = disc.edge_counts()
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                disc.write_steiner_csv(fh)
    print(f"scheme={scheme} eps={args.eps:g} nodes_total={mesh.n_vertices + int(counts.sum()) - 2 * mesh.n_edges}")
    print(f"max_nodes_per_edge={int(counts.max())} bound_per_edge={scheme_bound(scheme, gp, args.eps):.6g}")
    print("edge,i,j,nodes")
    for e, c in enumerate(counts):
        i, j = mesh.edges[e]
        print(f"{e},{i},{j},{int(c)}")
    return EXIT_OK


def cmd_solve(args):
    mesh = load_terrain(_read(args.terrain))
    solver = _solver(args, mesh)
    _emit(sio.export_tree_json(solver.tree), args.out)
    return EXIT_OK


def _path_json(args, solver):
    path = solver.query(args.point)
    src = solver.source_point
    x, y = args.point
    return sio.export_path_json(
        path,
        source={"x": src.coords.x, "y": src.coords.y, "z": src.coords.z, "on": src.label()},
        target={"x": x, "y": y, "z": path.points[-1].coords.z, "on": path.points[-1].on},
        epsilon=solver.epsilon,
        scheme=solver.scheme,
        algo=solver.algo,
    )


def cmd_query(args):
    mesh = load_terrain(_read(args.terrain))
    _emit(_path_json(args, _solver(args, mesh)), args.out)
    return EXIT_OK


def cmd_export(args):
    if not args.out:
        raise ValueError("export needs --out")
    return cmd_query(args)


def cmd_gen(args):
    if args.kind == "star":
        sp = gen_star_pyramid(args.k, args.r_out, args.r_in, args.height)
        note = (
            f"star pyramid k={args.k}; s=({sp.s.coords.x!r}, {sp.s.coords.y!r}) "
            f"t=({sp.t.coords.x!r}, {sp.t.coords.y!r}) at z={sp.s.coords.z!r}"
        )
        mesh = sp.mesh
    else:
        levels = None if args.levels == 0 else args.levels
        mesh = gen_random_terrain(args.n, args.seed, (args.zmin, args.zmax), levels=levels)
        note = f"random terrain n={args.n} seed={args.seed}"
    _emit(dump_terrain(mesh, note), args.out)
    return EXIT_OK


def cmd_bench(args):
    corpus = [parse_terrain_spec(s) for s in args.terrains]
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            run_bench(corpus, args.eps_list, args.schemes, args.algos, args.queries, args.seed, out=fh)
    else:
        run_bench(corpus, args.eps_list, args.schemes, args.algos, args.queries, args.seed, out=sys.stdout)
    return EXIT_OK


def build_parser():
    p = _Parser(prog="sdpath", description="Approximate shortest descending paths on terrains")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def terrain_arg(sp):
        sp.add_argument("terrain", help="TER file ('-' for stdin)")

    def solve_args(sp, need_point):
        terrain_arg(sp)
        sp.add_argument("--eps", type=float, default=0.5)
        sp.add_argument("--scheme", choices=["uniform", "geometric", "hybrid"], default="hybrid")
        sp.add_argument("--algo", choices=["dijkstra", "bushwhack"], default="bushwhack")
        sp.add_argument("--source", type=_source, required=True, help="vertex index or x,y")
        if need_point:
            sp.add_argument("--point", type=_xy, required=True, help="target x,y")
        sp.add_argument("--out")

    sp = sub.add_parser("validate", help="check the terrain property")
    terrain_arg(sp)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("params", help="print L, h, theta, X and scheme bounds")
    terrain_arg(sp)
    sp.add_argument("--eps", type=float)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_params)

    sp = sub.add_parser("discretize", help="per-edge node counts; --out writes Steiner CSV")
    terrain_arg(sp)
    sp.add_argument("--eps", type=float, default=0.5)
    sp.add_argument("--scheme", choices=["uniform", "geometric", "hybrid"], default="hybrid")
    sp.add_argument("--counts-only", action="store_true", help="count without building nodes")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_discretize)

    sp = sub.add_parser("solve", help="shortest-path tree as JSON")
    solve_args(sp, False)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("query", help="path to a point as JSON")
    solve_args(sp, True)
    sp.set_defaults(func=cmd_query)

    sp = sub.add_parser("export", help="like query, written to --out")
    solve_args(sp, True)
    sp.set_defaults(func=cmd_export)

    sp = sub.add_parser("gen", help="write a generated terrain")
    sp.add_argument("kind", choices=["star", "random"])
    sp.add_argument("--k", type=int, default=5)
    sp.add_argument("--r-out", type=float, default=4.0)
    sp.add_argument("--r-in", type=float, default=1.5)
    sp.add_argument("--height", type=float, default=2.0)
    sp.add_argument("--n", type=int, default=10)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--levels", type=int, default=5, help="height levels (0 = continuous)")
    sp.add_argument("--zmin", type=float, default=0.0)
    sp.add_argument("--zmax", type=float, default=2.0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("bench", help="benchmark CSV")
    sp.add_argument("terrains", nargs="+", help="random:n=10:seed=1, star:k=5 or a TER path")
    sp.add_argument("--eps", dest="eps_list", type=float, nargs="*", default=[1.0, 0.5])
    sp.add_argument("--schemes", nargs="+", choices=["uniform", "geometric", "hybrid"], default=["uniform", "geometric"])
    sp.add_argument("--algos", nargs="+", choices=["dijkstra", "bushwhack"], default=["bushwhack"])
    sp.add_argument("--queries", type=int, default=5)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, NonTerrainMesh, EmptyMesh, PointOffTerrain) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except UnreachableTarget as exc:
        print(f"unreachable: {exc}", file=sys.stderr)
        return EXIT_UNREACHABLE
    except (InvalidEpsilon, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FLAGS
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
