"""
Module: commands.py

Descripción:
    Manejadores de los comandos de la CLI. Cada manejador recibe los argumentos ya parseados y la
    RunConfig resuelta, y devuelve (results, status, figures) con status "ok" o "findings".
"""

import json
import logging
import os

import numpy as np

from geometry.base.errors import NearBoundaryError
from geometry.base.hyperbolic_core import Geodesic, hyp_distance
from geometry.geodesic_lab import (
    NoneFound,
    classify_covering,
    geodesics_cross,
    self_intersection_witness,
)
from geometry.surface_group import SurfaceGroup, axis_of, svarc_milnor_probe
from dynamics.systems.registry import build_system
from dynamics.trajectory import iterate
from horseshoe.audit import (
    affine_horseshoe_model,
    build_horseshoe_certificate,
    group_deck,
    horseshoe_audit,
)
from horseshoe.markov import markovian_check, revalidate_certificate
from horseshoe.rectangles import MarkedRectangle
from rotation.audits import power_inverse_audit, star_shape_audit
from rotation.estimation import (
    annulus_rotation_number,
    direction_set,
    grid_seeds,
    scan_rotation_set,
)
from rotation.periodic import periodic_orbit_search
from utils.file_management.folder_searcher import find_or_create_folder, output_path
from utils.plotting.disk_svg import plot_disk

logger = logging.getLogger(__name__)

PLOT_ORBIT_STEPS = 40
PLOT_ORBITS = 4


def _group(conf: dict) -> SurfaceGroup:
    G = SurfaceGroup(conf["genus"])
    logger.info("Grupo de superficie de género %d construido", G.genus)
    return G


def _system_and_seeds(conf: dict):
    G = _group(conf)
    S = build_system(G, conf["system"])
    seeds = grid_seeds(G, conf["budgets"]["seeds"], conf["seed"])
    return G, S, seeds


def _scan_config(conf: dict) -> dict:
    scan = dict(conf.get("rotation", {}))
    scan["threads"] = conf.get("threads")
    return scan


def _read_rectangle(path: str) -> MarkedRectangle:
    with open(path, encoding="utf-8") as fh:
        return MarkedRectangle.from_dict(json.load(fh))


# -- group / geodesic / covering -------------------------------------------------

def group_build(args, conf):
    G = _group(conf)
    radius = max(1, conf["budgets"]["radius"])
    results = {
        "genus": G.genus,
        "sides": G.n_sides,
        "relator_residual": G.relator_residual(),
        "angle_sum": G.angle_sum(),
        "ball_sizes": {str(r): G.ball_size(r) for r in range(radius + 1)},
        "svarc_milnor_constant": svarc_milnor_probe(G, radius),
    }
    return results, "ok", []


def geodesic_axis(args, conf):
    G = _group(conf)
    axis, length = axis_of(G, G.check_word(args.word))
    return {"word": args.word, "axis": axis.to_dict(), "translation_length": length}, "ok", []


def geodesic_cross(args, conf):
    G = _group(conf)
    axis1, _ = axis_of(G, G.check_word(args.word))
    axis2, _ = axis_of(G, G.check_word(args.other))
    hit = geodesics_cross(axis1, axis2)
    return {"words": [args.word, args.other], "crossing": hit.to_dict() if hit else None}, "ok", []


def geodesic_selfx(args, conf):
    G = _group(conf)
    hit = self_intersection_witness(G, args.word, conf["budgets"]["radius"], threads=conf.get("threads") or 1)
    if isinstance(hit, NoneFound):
        return {"word": args.word, "simple_up_to_radius": hit.radius, "witness": None}, "ok", []
    return {"word": args.word, "witness": hit.to_dict()}, "ok", []


def covering_classify(args, conf):
    G = _group(conf)
    radius = args.covering_radius if args.covering_radius is not None else conf["budgets"]["radius"]
    cls = classify_covering(G, args.word, args.other, radius, threads=conf.get("threads") or 1)
    return cls.to_dict(), "ok", []


# -- rotset ----------------------------------------------------------------------

def _write_samples(conf: dict, command: str, frame) -> str:
    if frame.empty:
        return None
    path = output_path(conf["out"], command, suffix="_samples.parquet")
    frame.to_parquet(path, index=False, engine="pyarrow")
    return path


def rotset_estimate(args, conf):
    _, S, seeds = _system_and_seeds(conf)
    estimate = scan_rotation_set(S, conf["budgets"]["radius"], seeds, conf["budgets"]["n"], _scan_config(conf))
    results = estimate.to_dict()
    results["direction_set"] = direction_set(estimate)
    results["samples_table"] = _write_samples(conf, "rotset estimate", estimate.to_frame())
    return results, "ok", []


def rotset_homology(args, conf):
    _, S, seeds = _system_and_seeds(conf)
    estimate = scan_rotation_set(S, conf["budgets"]["radius"], seeds, conf["budgets"]["n"], _scan_config(conf))
    vectors = np.array([h.v for h in estimate.homology]) if estimate.homology else np.zeros((0, 0))
    results = {
        "vectors": [h.to_dict() for h in estimate.homology],
        "mean": vectors.mean(axis=0).tolist() if vectors.size else None,
        "max_norm": float(np.max(np.linalg.norm(vectors, axis=1))) if vectors.size else 0.0,
    }
    return results, "ok", []


def rotset_annulus(args, conf):
    _, S, seeds = _system_and_seeds(conf)
    estimate = annulus_rotation_number(S, args.word, seeds, conf["budgets"]["n"], threads=conf.get("threads"))
    status = "ok" if estimate.sandwich_holds else "findings"
    return estimate.to_dict(), status, []


def rotset_star_audit(args, conf):
    _, S, seeds = _system_and_seeds(conf)
    estimate = scan_rotation_set(S, conf["budgets"]["radius"], seeds, conf["budgets"]["n"], _scan_config(conf))
    audit_conf = {"n": conf["budgets"]["n"]}
    report = star_shape_audit(estimate, S, grid=args.grid, config=audit_conf)
    return report, "ok" if report["passed"] else "findings", []


def rotset_power_audit(args, conf):
    _, S, seeds = _system_and_seeds(conf)
    report = power_inverse_audit(S, args.power, seeds, conf["budgets"]["n"], conf["budgets"]["radius"],
                                 directions=args.directions, config=_scan_config(conf))
    return report, "ok" if report["passed"] else "findings", []


# -- periodic / horseshoe --------------------------------------------------------

def periodic_search(args, conf):
    G = _group(conf)
    S = build_system(G, conf["system"])
    search_conf = dict(conf.get("periodic", {}))
    search_conf.setdefault("seed", conf["seed"])
    if args.along is not None:
        search_conf["along"] = Geodesic.from_angles(*args.along)
    result = periodic_orbit_search(S, args.word, args.p, args.q, search_conf)
    return result.to_dict(), "ok" if result.found else "findings", []


def horseshoe_check(args, conf):
    R1, R2 = _read_rectangle(args.rect1), _read_rectangle(args.rect2)
    cert = markovian_check(R1, R2)
    if cert is None:
        return {"markovian": False}, "ok", []
    results = {"markovian": True, "revalidated": revalidate_certificate(cert), "certificate": cert.to_dict()}
    return results, "ok" if results["revalidated"] else "findings", []


def horseshoe_audit_command(args, conf):
    hconf = dict(conf.get("horseshoe", {}))
    max_period = hconf.pop("max_period", 6)
    word = hconf.pop("word", None)
    if args.rect is not None:
        G = _group(conf)
        S = build_system(G, conf["system"])
        R = _read_rectangle(args.rect)
        decks = [group_deck(G, w) for w in args.decks]
        cert = build_horseshoe_certificate(R, S, decks, metric="hyperbolic")
    else:
        model = {k: hconf.pop(k) for k in ("contraction", "expansion", "shifts", "words") if k in hconf}
        S, R, decks = affine_horseshoe_model(**model)
        cert = build_horseshoe_certificate(R, S, decks, metric="euclidean")
    hconf["threads"] = conf.get("threads")
    report = horseshoe_audit(S, cert, word=word, n=max_period, config=hconf)
    report["certificate"] = cert.to_dict()
    return report, "ok" if report["passed"] else "findings", []


# -- plot ------------------------------------------------------------------------

def _safe_point(G: SurfaceGroup, located):
    try:
        return G.reconstruct(located)
    except NearBoundaryError:
        return None


def plot_disk_command(args, conf):
    G = _group(conf)
    axes = [axis_of(G, G.check_word(w))[0] for w in (args.words or [])]
    orbits, chords = [], []
    if args.orbits:
        S = build_system(G, conf["system"])
        for seed in grid_seeds(G, PLOT_ORBITS, conf["seed"]):
            traj = iterate(S, seed, PLOT_ORBIT_STEPS)
            pts = [_safe_point(G, lp) for lp in [traj.start] + traj.steps]
            pts = [p for p in pts if p is not None]
            orbits.append(pts)
            if len(pts) > 1:
                speed = hyp_distance(pts[0], pts[-1]) / (len(pts) - 1)
                chords.append((pts[0], pts[-1], speed))
    folder = find_or_create_folder(conf["out"])
    path = os.path.join(folder, args.name)
    plot_disk(G, radius=args.tiling_radius, axes=axes, orbits=orbits, chords=chords, path=path,
              title=f"Género {G.genus}")
    return {"figure": path, "axes": [a.to_dict() for a in axes], "orbits": len(orbits)}, "ok", [path]


COMMANDS = {
    ("group", "build"): group_build,
    ("geodesic", "axis"): geodesic_axis,
    ("geodesic", "cross"): geodesic_cross,
    ("geodesic", "selfx"): geodesic_selfx,
    ("covering", "classify"): covering_classify,
    ("rotset", "estimate"): rotset_estimate,
    ("rotset", "homology"): rotset_homology,
    ("rotset", "annulus"): rotset_annulus,
    ("rotset", "star-audit"): rotset_star_audit,
    ("rotset", "power-audit"): rotset_power_audit,
    ("periodic", "search"): periodic_search,
    ("horseshoe", "check"): horseshoe_check,
    ("horseshoe", "audit"): horseshoe_audit_command,
    ("plot", "disk"): plot_disk_command,
}
