"""
Module: lifted_system.py

Descripción:
    Interfaz común de los levantamientos equivariantes f̃ de homeomorfismos de la superficie
    al disco, más las piezas geométricas que comparten los sistemas concretos: perfiles de
    meseta/bump, cartas de Fermi de los trasladados de una geodésica y la enumeración por
    baldosas de los trasladados que pasan cerca del dominio fundamental.

    Un sistema solo necesita definir `local_step` y `local_inverse` para puntos del dominio
    fundamental (o muy cerca de él); `step`, `raw_step` y compañía se derivan por equivarianza.
"""

import logging
import math
from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass

from geometry.base.errors import BudgetExceededError
from geometry.base.hyperbolic_core import (
    Geodesic,
    MobiusTransform,
    _apply_complex as _act,
    _diameter_fermi,
    _diameter_point,
    apply,
    geodesic_frame,
)
from geometry.surface_group import GroupWord, LocatedPoint, SurfaceGroup

logger = logging.getLogger(__name__)

# Holgura en t al elegir un representante por periodo (baldosas en t = kℓ exacto).
_WINDOW_TOL = 1e-7


def mollifier(u: float) -> float:
    """exp(1 - 1/(1 - u²)) en |u| < 1, 0 fuera."""
    u2 = u * u
    if u2 >= 1.0:
        return 0.0
    return math.exp(1.0 - 1.0 / (1.0 - u2))


def plateau(u: float, flat: float = 0.75) -> float:
    """1 en |u| <= flat, rampa C¹ hasta 0 en |u| = 1."""
    a = abs(u)
    if a <= flat:
        return 1.0
    if a >= 1.0:
        return 0.0
    return mollifier((a - flat) / (1.0 - flat))


def smoothstep(x: float) -> float:
    """0 para x <= 0, 1 para x >= 1, C∞ en medio."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    return mollifier(1.0 - x)


PROFILES = {"mollifier": mollifier, "plateau": plateau}


def get_profile(name: str):
    try:
        return PROFILES[name]
    except KeyError:
        raise ValueError(f"Perfil desconocido: {name!r}. Disponibles: {sorted(PROFILES)}")


@dataclass
class TranslateChart:
    """Carta de Fermi del trasladado u·G: coordenadas (s, t) transportadas desde G."""

    deck: GroupWord
    geodesic: Geodesic
    frame: MobiusTransform
    frame_inverse: MobiusTransform

    def coordinates(self, z: complex):
        return _diameter_fermi(_act(self.frame, z))

    def point(self, s: float, t: float) -> complex:
        return _act(self.frame_inverse, _diameter_point(s, t))


def _segment_distance(s: float, t: float, t_range) -> float:
    lo, hi = t_range
    gap = max(0.0, lo - t, t - hi)
    return math.acosh(math.cosh(s) * math.cosh(gap))


def segment_translates(group: SurfaceGroup, geodesic: Geodesic, t_range, reach: float,
                       period: float = None) -> list:
    """
    Trasladados u·G cuyo segmento {t ∈ t_range} pasa a distancia < reach del origen.

    Recorre baldosas v·P vecinas del segmento (BFS por lados); el trasladado es u = v⁻¹.
    Con `period`, G es el eje de un elemento de traslación `period` y se toma un representante
    por trasladado (t del centro en [t0, t0 + period)), midiendo la distancia a toda la geodésica.
    """
    N = geodesic_frame(geodesic)
    lo, hi = t_range
    expand_reach = reach + group.circumradius + 1e-6
    start = group.locate(_act(N.inverse(), _diameter_point(0.0, 0.5 * (lo + hi))))
    queue = deque([(start.word, group.evaluate(start.word))])
    seen = set()
    charts = []
    while queue:
        word, V = queue.popleft()
        center = _act(V, 0j)
        key = (round(center.real, 9), round(center.imag, 9))
        if key in seen:
            continue
        seen.add(key)
        s, t = _diameter_fermi(_act(N, center))
        if _segment_distance(s, t, t_range) > expand_reach:
            continue
        if period is not None:
            keep = abs(s) < reach and lo - _WINDOW_TOL <= t < lo + period - _WINDOW_TOL
        else:
            keep = _segment_distance(s, t, t_range) < reach
        if keep:
            U = V.inverse()
            frame = N @ V
            charts.append(TranslateChart(deck=word.inverse(), geodesic=apply(U, geodesic),
                                         frame=frame, frame_inverse=frame.inverse()))
        for letter in group.alphabet:
            nxt = word * GroupWord((letter,))
            queue.append((nxt, V @ group.generators[letter]))
        if len(seen) > 200_000:
            raise BudgetExceededError("Enumeración de baldosas sin cota", {"visited": len(seen)})
    unique = []
    for chart in charts:
        if not any(chart.geodesic.same_as(c.geodesic, tol=1e-7) for c in unique):
            unique.append(chart)
    logger.debug("Trasladados de %s cerca del origen: %d (baldosas visitadas: %d)",
                 geodesic.to_dict(), len(unique), len(seen))
    return unique


class LiftedSystem(ABC):
    """
    Levantamiento f̃ equivariante de un homeomorfismo de la superficie, con desplazamiento
    acotado (el levantamiento canónico, que se extiende como la identidad al borde).
    """

    def __init__(self, group: SurfaceGroup, name: str, parameters: dict = None):
        self.group = group
        self.name = name
        self.parameters = dict(parameters or {})
        self.metadata = {
            "name": name,
            "genus": group.genus,
            "parameters": self.parameters,
            "displacement_bound": None,
        }

    @abstractmethod
    def local_step(self, z: complex) -> complex:
        """f̃(z) para z en (un entorno de) el dominio fundamental."""

    @abstractmethod
    def local_inverse(self, z: complex) -> complex:
        """f̃⁻¹(z) para z en (un entorno de) el dominio fundamental."""

    @property
    @abstractmethod
    def displacement_bound(self) -> float:
        """Cota de d(z, f̃(z))."""

    def raw_step(self, z: complex) -> complex:
        lp = self.group.locate(z)
        return apply(self.group.evaluate(lp.word), self.local_step(lp.rep))

    def raw_inverse(self, z: complex) -> complex:
        lp = self.group.locate(z)
        return apply(self.group.evaluate(lp.word), self.local_inverse(lp.rep))

    def step(self, point: LocatedPoint) -> LocatedPoint:
        return self.group.reanchor(point, self.local_step(point.rep))

    def inverse_step(self, point: LocatedPoint) -> LocatedPoint:
        return self.group.reanchor(point, self.local_inverse(point.rep))

    def describe(self) -> dict:
        info = dict(self.metadata)
        info["displacement_bound"] = self.displacement_bound
        return info


class IdentitySystem(LiftedSystem):
    def __init__(self, group: SurfaceGroup):
        super().__init__(group, "identity")

    def local_step(self, z):
        return z

    def local_inverse(self, z):
        return z

    @property
    def displacement_bound(self):
        return 0.0


class InverseSystem(LiftedSystem):
    """f̃⁻¹ como sistema propio."""

    def __init__(self, system: LiftedSystem):
        super().__init__(system.group, f"inverse({system.name})", {"of": system.describe()})
        self.system = system

    def local_step(self, z):
        return self.system.local_inverse(z)

    def local_inverse(self, z):
        return self.system.local_step(z)

    @property
    def displacement_bound(self):
        return self.system.displacement_bound
