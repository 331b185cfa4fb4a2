"""``fgwkit`` command-line interface.

Exit codes: 0 success, 2 usage or input-file error, 3 solver error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .barycenter import BarycenterProblem, recover_adjacency, solve_barycenter
from .core import SolverParams
from .estimators import MODES, pairwise_fgw
from .exceptions import FGWError
from .fgw import gw_solve, solve_fgw
from .geodesic import geodesic
from .io import read_csv, read_object, read_object_list, write_csv, write_object

EXIT_OK, EXIT_USAGE, EXIT_SOLVER = 0, 2, 3


class InputError(Exception):
    pass


def _jobs_default():
    try:
        return int(os.environ.get("FGWKIT_THREADS", "1"))
    except ValueError:
        return 1


def _load(path):
    try:
        return read_object(path)
    except (OSError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_list(path):
    try:
        return read_object_list(path)
    except (OSError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _params(args, **over):
    kw = dict(alpha=args.alpha, p=args.p, q=args.q, restarts=args.restarts, seed=args.seed)
    kw.update(over)
    return SolverParams(**kw)


def _emit(doc):
    sys.stdout.write(json.dumps(doc, sort_keys=True) + "\n")


def cmd_distance(args):
    src, dst = _load(args.files[0]), _load(args.files[1])
    params = _params(args)
    if args.mode == "w":
        sol = solve_fgw(src, dst, params.replace(alpha=0.0))
    elif args.mode == "gw":
        sol = gw_solve(src, dst, params)
    else:
        sol = solve_fgw(src, dst, params)
    if args.emit_coupling:
        write_csv(args.emit_coupling, sol.coupling.matrix)
    _emit({"distance": sol.value, "objective": sol.objective, "iters": sol.n_iter})


def cmd_matrix(args):
    objs = _load_list(args.file_list)
    D = pairwise_fgw(objs, None, _params(args), args.mode, args.jobs)
    if args.out:
        write_csv(args.out, D)
    else:
        np.savetxt(sys.stdout, D, fmt="%.17g", delimiter=",")


def cmd_barycenter(args):
    objs = _load_list(args.file_list)
    lambdas = None
    if args.lambdas:
        try:
            lambdas = np.array([float(x) for x in args.lambdas.split(",")])
        except ValueError:
            raise InputError(f"--lambdas must be comma-separated numbers, got {args.lambdas!r}") from None
    fixed = None
    if args.fixed_structure:
        try:
            fixed = read_csv(args.fixed_structure)
        except (OSError, ValueError) as exc:
            raise InputError(f"{args.fixed_structure}: {exc}") from None
    size = args.size or objs[0].n
    prob = BarycenterProblem(objs, lambdas, size, params=_params(args, p=1),
                             fixed_structure=fixed)
    sol = solve_barycenter(prob)
    write_object(sol.barycenter, args.out)
    doc = {"objective": sol.objective, "outer_iters": len(sol.objective_trace),
           "converged": sol.converged, "out": str(args.out)}
    if args.recover_graph:
        A, thr, res = recover_adjacency(sol.barycenter.structure)
        path = Path(args.out).with_suffix(".adjacency.csv")
        write_csv(path, A)
        doc.update(adjacency=str(path), threshold=thr, residual=res)
    _emit(doc)


def cmd_interpolate(args):
    src, dst = _load(args.files[0]), _load(args.files[1])
    path = geodesic(src, dst, _params(args))
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "coupling.csv", path.solution.coupling.matrix)
    files = []
    try:
        times = [float(x) for x in args.times.split(",")]
    except ValueError:
        raise InputError(f"--times must be comma-separated numbers, got {args.times!r}") from None
    for t in times:
        f = out / f"t_{t:.4f}.json"
        write_object(path(t).object, f)
        files.append(str(f))
    _emit({"distance": path.distance, "files": files})


def cmd_fixtures(args):
    from .experiments import FIXTURES

    if args.name not in FIXTURES:
        raise InputError(f"unknown fixture {args.name!r}; choose from {sorted(FIXTURES)}")
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for k, obj in enumerate(FIXTURES[args.name](args.seed)):
        f = out / f"{args.name}_{k}.json"
        write_object(obj, f)
        files.append(f.name)
    (out / f"{args.name}.txt").write_text("".join(f + "\n" for f in files))
    _emit({"files": [str(out / f) for f in files], "list": str(out / f"{args.name}.txt")})


def cmd_experiment(args):
    from .experiments import EXPERIMENTS, run_experiment

    if args.name not in EXPERIMENTS:
        raise InputError(f"unknown experiment {args.name!r}; choose from {sorted(EXPERIMENTS)}")
    manifest = run_experiment(args.name, args.seed, args.out_dir, args.jobs)
    _emit(manifest["results"])


def _solver_flags(p, mode=True):
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    if mode:
        p.add_argument("--mode", choices=MODES, default="fgw")


def build_parser():
    ap = argparse.ArgumentParser(prog="fgwkit", description="Fused Gromov-Wasserstein toolkit")
    ap.add_argument("--version", action="version", version=f"fgwkit {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("distance", help="distance between two object files")
    p.add_argument("files", nargs=2)
    _solver_flags(p)
    p.add_argument("--emit-coupling", metavar="PATH")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("matrix", help="pairwise distance matrix of a list of object files")
    p.add_argument("file_list")
    _solver_flags(p)
    p.add_argument("--jobs", type=int, default=_jobs_default())
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("barycenter", help="barycenter of a list of object files")
    p.add_argument("file_list")
    _solver_flags(p, mode=False)
    p.add_argument("--lambdas")
    p.add_argument("--size", type=int)
    p.add_argument("--fixed-structure", metavar="PATH")
    p.add_argument("--out", required=True, metavar="PATH")
    p.add_argument("--recover-graph", action="store_true")
    p.set_defaults(func=cmd_barycenter)

    p = sub.add_parser("interpolate", help="objects along the geodesic between two files")
    p.add_argument("files", nargs=2)
    _solver_flags(p, mode=False)
    p.add_argument("--times", default="0,0.25,0.5,0.75,1")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_interpolate)

    p = sub.add_parser("experiment", help="run a named experiment")
    p.add_argument("name")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--jobs", type=int, default=_jobs_default())
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("fixtures", help="write fixture objects as files")
    p.add_argument("name")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_fixtures)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except InputError as exc:
        print(f"fgwkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FGWError, ValueError) as exc:
        print(f"fgwkit: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
