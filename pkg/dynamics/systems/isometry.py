"""
Module: isometry.py

Descripción:
    Sistema de prueba: en cada baldosa u·P actúa como u·T·u⁻¹, de modo que desde el origen
    la trayectoria registra exactamente g_k = T^k. No es el levantamiento canónico (no se
    extiende como la identidad al borde); sirve para calibrar la contabilidad de palabras y
    la velocidad de Eq. de rotación, que debe dar ℓ(T).
"""

import logging

from geometry.base.hyperbolic_core import apply, distance_from_origin
from geometry.surface_group import SurfaceGroup
from dynamics.base.lifted_system import LiftedSystem

logger = logging.getLogger(__name__)


class IsometrySystem(LiftedSystem):
    def __init__(self, group: SurfaceGroup, deck):
        deck = group.check_word(deck)
        super().__init__(group, "isometry", {"deck": str(deck)})
        self.deck = deck
        self.transform = group.evaluate(deck)
        self.transform_inverse = self.transform.inverse()

    def local_step(self, z):
        return apply(self.transform, z)

    def local_inverse(self, z):
        return apply(self.transform_inverse, z)

    @property
    def displacement_bound(self):
        return distance_from_origin(apply(self.transform, 0j)) + 2.0 * self.group.circumradius
