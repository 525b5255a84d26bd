"""
Module: twist.py

Descripción:
    Sistema de torsión alrededor de una geodésica cerrada simple β: en coordenadas de Fermi
    (s, t) del eje β̃ el levantamiento hace t -> t + θ·perfil(s/width) y deja s fijo; se extiende
    de forma equivariante a todos los trasladados del tubo y es la identidad fuera de ellos.
    Sobre β̃ la dinámica es una traslación exacta de longitud θ.
"""

import logging
from itertools import combinations

from geometry.base.errors import PreconditionError, TubeTooWideError
from geometry.base.hyperbolic_core import geodesic_distance_between, boundary_interleave
from geometry.geodesic_lab import NoneFound, self_intersection_witness
from geometry.surface_group import GroupWord, SurfaceGroup, axis_of
from dynamics.base.lifted_system import LiftedSystem, get_profile, segment_translates

logger = logging.getLogger(__name__)

SIMPLICITY_RADIUS = 4
TRANSLATE_MARGIN = 0.5


class TwistSystem(LiftedSystem):
    def __init__(self, group: SurfaceGroup, core, theta: float, width: float,
                 profile: str = "mollifier", check_simple: bool = True):
        core = group.check_word(core)
        super().__init__(group, "twist", {
            "core": str(core), "theta": theta, "width": width, "profile": profile,
        })
        if width <= 0.0:
            raise PreconditionError("width debe ser positivo", {"width": width})
        self.core = core
        self.theta = float(theta)
        self.width = float(width)
        self.profile_name = profile
        self.profile = get_profile(profile)
        self.axis, self.length = axis_of(group, core)

        if check_simple:
            witness = self_intersection_witness(group, core, SIMPLICITY_RADIUS)
            if not isinstance(witness, NoneFound):
                raise PreconditionError("El núcleo de la torsión no es simple",
                                        {"core": str(core), "deck": str(witness.deck)})

        reach = group.circumradius + self.width + TRANSLATE_MARGIN
        self.charts = segment_translates(group, self.axis, (0.0, self.length), reach, period=self.length)
        self._check_tubes()
        logger.info("Torsión sobre %s: θ=%.6f, ancho=%.4f, ℓ=%.6f, trasladados=%d",
                    core, self.theta, self.width, self.length, len(self.charts))

    def _check_tubes(self):
        for c1, c2 in combinations(self.charts, 2):
            if boundary_interleave(c1.geodesic, c2.geodesic).crosses:
                raise TubeTooWideError("Dos trasladados del núcleo se cruzan",
                                       {"core": str(self.core), "decks": [str(c1.deck), str(c2.deck)]})
            gap = geodesic_distance_between(c1.geodesic, c2.geodesic)
            if gap <= 2.0 * self.width:
                raise TubeTooWideError("Tubos de trasladados solapados",
                                       {"core": str(self.core), "width": self.width, "gap": gap,
                                        "decks": [str(c1.deck), str(c2.deck)]})

    def _shift(self, z: complex, sign: float) -> complex:
        for chart in self.charts:
            s, t = chart.coordinates(z)
            if abs(s) < self.width:
                return chart.point(s, t + sign * self.theta * self.profile(s / self.width))
        return z

    def local_step(self, z):
        return self._shift(z, 1.0)

    def local_inverse(self, z):
        return self._shift(z, -1.0)

    @property
    def displacement_bound(self):
        return abs(self.theta)


def make_twist(G: SurfaceGroup, core, theta: float, width: float, profile: str = "mollifier") -> TwistSystem:
    return TwistSystem(G, GroupWord.coerce(core), theta, width, profile=profile)
