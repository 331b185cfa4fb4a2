"""Named experiments and fixtures behind ``fgwkit experiment`` / ``fgwkit fixtures``.

Every experiment writes ``manifest.json`` (parameters, seed, package
versions, headline results) plus CSV files with the data needed to redraw
its figure.  Outputs depend only on the seed.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import scipy
import sklearn
from sklearn.metrics import adjusted_rand_score, silhouette_score

from . import __version__
from .barycenter import BarycenterProblem, recover_adjacency, solve_barycenter
from .core import SolverParams
from .estimators import pairwise_fgw
from .fgw import gw_solve, solve_fgw
from .io import write_csv, write_object
from .toolkit.concentration import concentration_experiment
from .toolkit.datasets import (
    graph_objects,
    make_cycle_mesh,
    make_equivalent_objects_pair,
    make_isometric_graphs,
    make_noisy_loop_graphs,
    make_sbm,
    make_shifted_image_pair,
    make_toy_trees,
    make_two_hump_series,
)
from .toolkit.graph import shortest_path_structure
from .toolkit.mds import mds_embed

FIXTURES = {
    "trees": lambda seed: make_toy_trees(),
    "isometric": lambda seed: make_isometric_graphs(),
    "equivalent": lambda seed: make_equivalent_objects_pair(),
    "digits": lambda seed: make_shifted_image_pair(),
    "series": lambda seed: make_two_hump_series(seed=seed),
    "circle": lambda seed: graph_objects(make_noisy_loop_graphs("circle", 10, seed)),
    "eight": lambda seed: graph_objects(make_noisy_loop_graphs("eight", 10, seed)),
    "sbm": lambda seed: [shortest_path_structure(make_sbm(seed=seed))],
    "mesh": lambda seed: [make_cycle_mesh(seed=seed)],
}


def _three_distances(x, y, params, out, tag):
    w = solve_fgw(x, y, params.replace(alpha=0.0))
    g = gw_solve(x, y, params)
    f = solve_fgw(x, y, params)
    write_csv(out / f"{tag}_coupling_fgw.csv", f.coupling.matrix)
    write_csv(out / f"{tag}_coupling_gw.csv", g.coupling.matrix)
    write_csv(out / f"{tag}_coupling_w.csv", w.coupling.matrix)
    return {"w": w.value, "gw": g.value, "fgw": f.value}


def exp_trees(seed, out, jobs):
    x, y = make_toy_trees()
    params = SolverParams(alpha=0.5, p=1, q=1, restarts=5, seed=seed)
    write_csv(out / "tree_features.csv", np.c_[x.features, y.features])
    return {"params": {"alpha": 0.5, "p": 1, "q": 1, "restarts": 5},
            "results": _three_distances(x, y, params, out, "trees")}


def exp_digits(seed, out, jobs):
    x, y = make_shifted_image_pair(12, 3)
    params = SolverParams(alpha=0.1, p=1, q=2, restarts=5, seed=seed)
    write_csv(out / "image_src.csv", x.features.reshape(12, 12))
    write_csv(out / "image_dst.csv", y.features.reshape(12, 12))
    return {"params": {"size": 12, "shift": 3, "alpha": 0.1, "p": 1, "q": 2, "restarts": 5},
            "results": _three_distances(x, y, params, out, "digits")}


def exp_series_mds(seed, out, jobs):
    X, labels = make_two_hump_series(25, seed=seed, return_labels=True)
    write_csv(out / "series.csv", np.array([x.features[:, 0] for x in X]))
    write_csv(out / "labels.csv", labels)
    res = {}
    for alpha in (0.0, 0.5, 1.0):
        D = pairwise_fgw(X, None, SolverParams(alpha=alpha, q=2, restarts=2, seed=seed),
                         "fgw", jobs)
        E = mds_embed(D, 2)
        write_csv(out / f"distances_alpha{alpha:g}.csv", D)
        write_csv(out / f"embedding_alpha{alpha:g}.csv", E)
        res[f"silhouette_alpha{alpha:g}"] = float(silhouette_score(E, labels))
    return {"params": {"count": 25, "alphas": [0.0, 0.5, 1.0], "q": 2, "restarts": 2},
            "results": res}


def exp_barygraph(seed, out, jobs):
    res = {}
    params = SolverParams(alpha=0.5, p=1, q=2, restarts=2, seed=seed)
    for kind in ("circle", "eight"):
        objs = graph_objects(make_noisy_loop_graphs(kind, 10, seed))
        sol = solve_barycenter(BarycenterProblem(objs, target_size=15, params=params))
        A, thr, _ = recover_adjacency(sol.barycenter.structure)
        write_object(sol.barycenter, out / f"{kind}_barycenter.json")
        write_csv(out / f"{kind}_adjacency.csv", A)
        write_csv(out / f"{kind}_features.csv", sol.barycenter.features)
        write_csv(out / f"{kind}_trace.csv", np.array(sol.objective_trace))
        deg = A.sum(1)
        res[kind] = {"objective": sol.objective, "threshold": thr,
                     "degree_histogram": np.bincount(deg).tolist()}
    return {"params": {"count": 10, "size": 15, "alpha": 0.5, "q": 2, "restarts": 2},
            "results": res}


def exp_sbm(seed, out, jobs):
    g = make_sbm(seed=seed)
    obj = shortest_path_structure(g)
    params = SolverParams(alpha=0.5, p=1, q=2, restarts=5, seed=seed)
    sol = solve_barycenter(BarycenterProblem([obj], target_size=4, params=params))
    assign = sol.assignments(0)
    write_csv(out / "adjacency.csv", g.adjacency().astype(int))
    write_csv(out / "labels.csv", np.c_[g.labels, assign])
    write_csv(out / "features.csv", obj.features)
    return {"params": {"blocks": [8, 8, 8, 8], "p_in": 0.8, "p_out": 0.05, "size": 4,
                       "alpha": 0.5, "q": 2},
            "results": {"ari": float(adjusted_rand_score(g.labels, assign))}}


def exp_concentration(seed, out, jobs):
    r = concentration_experiment(seed=seed)
    write_csv(out / "concentration.csv", np.c_[r.sizes, r.means, r.stds],
              header=["n", "mean", "std"])
    return {"params": {"sizes": list(r.sizes), "trials": 20, "reference_size": r.reference_size,
                       "alpha": 0.5, "p": 1, "q": 1},
            "results": {"slope": r.slope, "slope_stderr": r.slope_stderr,
                        "intercept": r.intercept, "means": list(r.means)}}


EXPERIMENTS = {
    "trees": exp_trees,
    "digits": exp_digits,
    "series-mds": exp_series_mds,
    "barygraph": exp_barygraph,
    "sbm": exp_sbm,
    "concentration": exp_concentration,
}


def run_experiment(name: str, seed: int = 0, out_dir=".", jobs: int = 1) -> dict:
    """Run experiment ``name`` and write its files under ``out_dir``; returns the manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    body = EXPERIMENTS[name](seed, out, jobs)
    manifest = {
        "experiment": name,
        "seed": seed,
        "params": body["params"],
        "results": body["results"],
        "versions": {"fgwkit": __version__, "numpy": np.__version__,
                     "scipy": scipy.__version__, "scikit-learn": sklearn.__version__},
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest
