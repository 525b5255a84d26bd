"""
Module: registry.py

Descripción:
    Construcción de sistemas levantados a partir de la descripción {"name", "parameters"}
    de la configuración de ejecución. Los sistemas compuestos se anidan:
    {"name": "compose", "parameters": {"systems": [sistema, sistema, ...]}}.
"""

import logging

from geometry.base.errors import ConfigError
from geometry.base.hyperbolic_core import Geodesic
from geometry.surface_group import SurfaceGroup
from dynamics.base.lifted_system import IdentitySystem, InverseSystem, LiftedSystem
from dynamics.systems.composite import PowerSystem, compose, make_example_f3
from dynamics.systems.drift import make_drift, make_heteroclinic_drift
from dynamics.systems.isometry import IsometrySystem
from dynamics.systems.twist import make_twist

logger = logging.getLogger(__name__)


def _twist(G, p):
    return make_twist(G, p["core"], p["theta"], p["width"], profile=p.get("profile", "mollifier"))


def _drift(G, p):
    if "alpha" in p:
        return make_heteroclinic_drift(G, p["alpha"], p["beta"], p["width"], p["speed"],
                                       p.get("guard_width", 0.14), profile=p.get("profile", "mollifier"))
    a, b = p["path"]
    kwargs = {k: p[k] for k in ("window", "ramp", "profile", "guards") if k in p}
    return make_drift(G, Geodesic.from_angles(a, b), p["width"], p["speed"], **kwargs)


def _compose(G, p):
    return compose(*[build_system(G, entry) for entry in p["systems"]])


def _power(G, p):
    return PowerSystem(build_system(G, p["system"]), int(p["n"]))


def _inverse(G, p):
    return InverseSystem(build_system(G, p["system"]))


SYSTEM_BUILDERS = {
    "identity": lambda G, p: IdentitySystem(G),
    "isometry": lambda G, p: IsometrySystem(G, p["deck"]),
    "twist": _twist,
    "drift": _drift,
    "f3": lambda G, p: make_example_f3(G, **p),
    "compose": _compose,
    "power": _power,
    "inverse": _inverse,
}


def build_system(G: SurfaceGroup, entry: dict) -> LiftedSystem:
    name = entry.get("name")
    if name not in SYSTEM_BUILDERS:
        raise ConfigError(f"Sistema desconocido: {name!r}", {"available": sorted(SYSTEM_BUILDERS)})
    params = entry.get("parameters", {}) or {}
    try:
        system = SYSTEM_BUILDERS[name](G, params)
    except KeyError as e:
        raise ConfigError(f"Falta el parámetro {e} para el sistema {name!r}", {"system": name})
    logger.info("Sistema construido: %s", system.name)
    return system
