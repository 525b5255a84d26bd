"""
Module: composite.py

Descripción:
    Composición de sistemas levantados (de derecha a izquierda, como la composición de
    funciones), potencias f^n y el ejemplo f₃ = deriva ∘ torsión: torsión de ángulo θ sobre β
    y deriva a lo largo de la heteroclínica de α a β, con α fijo punto a punto.

Funcionalidades:
    - compose(*systems): compose(f, g)(z) = f(g(z)).
    - PowerSystem(system, n): f^n.
    - make_example_f3(G, ...): el ejemplo con sus comprobaciones geométricas.
"""

import logging

from geometry.base.errors import PreconditionError
from geometry.base.hyperbolic_core import geodesic_distance_between
from geometry.surface_group import SurfaceGroup, axis_of
from dynamics.base.lifted_system import IdentitySystem, LiftedSystem
from dynamics.systems.drift import make_heteroclinic_drift
from dynamics.systems.twist import TwistSystem

logger = logging.getLogger(__name__)

# Parámetros por defecto del ejemplo f₃ en género 2
DEFAULT_F3 = {
    "alpha": "a1",
    "beta": "a2",
    "theta": 0.15,
    "twist_width": 0.6,
    "twist_profile": "plateau",
    "drift_width": 0.1,
    "drift_speed": 0.15,
    "guard_width": 0.14,
}


class CompositeSystem(LiftedSystem):
    """systems[0] ∘ systems[1] ∘ ... ∘ systems[-1]."""

    def __init__(self, systems: list, name: str = None):
        if not systems:
            raise ValueError("La composición necesita al menos un sistema")
        group = systems[0].group
        if any(s.group.genus != group.genus for s in systems):
            raise PreconditionError("Sistemas de géneros distintos", {"genus": [s.group.genus for s in systems]})
        name = name or "∘".join(s.name for s in systems)
        super().__init__(group, name, {"systems": [s.describe() for s in systems]})
        self.systems = list(systems)

    def local_step(self, z):
        z = self.systems[-1].local_step(z)
        for system in reversed(self.systems[:-1]):
            z = system.raw_step(z)
        return z

    def local_inverse(self, z):
        z = self.systems[0].local_inverse(z)
        for system in self.systems[1:]:
            z = system.raw_inverse(z)
        return z

    @property
    def displacement_bound(self):
        return sum(s.displacement_bound for s in self.systems)


def compose(*systems) -> LiftedSystem:
    """Aplica de derecha a izquierda; las identidades se descartan."""
    kept = [s for s in systems if not isinstance(s, IdentitySystem)]
    if not kept:
        return systems[0]
    if len(kept) == 1:
        return kept[0]
    return CompositeSystem(kept)


class PowerSystem(CompositeSystem):
    def __init__(self, system: LiftedSystem, n: int):
        if n < 1:
            raise ValueError("La potencia debe ser >= 1")
        super().__init__([system] * n, name=f"({system.name})^{n}")
        self.base = system
        self.power = n
        self.parameters = {"base": system.describe(), "power": n}
        self.metadata["parameters"] = self.parameters


def make_example_f3(G: SurfaceGroup, **overrides) -> CompositeSystem:
    """
    f₃ = deriva ∘ torsión. La torsión actúa en el tubo de β con perfil meseta, de modo que los
    puntos que la deriva deja cerca de β̃ avanzan exactamente θ por paso; las guardas dejan
    α̃ y β̃ fijas para la deriva.
    """
    params = {**DEFAULT_F3, **overrides}
    alpha, beta = G.check_word(params["alpha"]), G.check_word(params["beta"])
    twist = TwistSystem(G, beta, params["theta"], params["twist_width"], profile=params["twist_profile"])

    axis_a, _ = axis_of(G, alpha)
    gap = min(geodesic_distance_between(axis_a, c.geodesic) for c in twist.charts)
    if gap <= twist.width:
        raise PreconditionError("Un trasladado de β̃ pasa dentro del tubo de torsión de α̃",
                                {"gap": gap, "twist_width": twist.width})

    drift = make_heteroclinic_drift(G, alpha, beta, params["drift_width"], params["drift_speed"],
                                    params["guard_width"])
    system = CompositeSystem([drift, twist], name="f3")
    system.parameters = dict(params, alpha=str(alpha), beta=str(beta))
    system.metadata["parameters"] = system.parameters
    logger.info("Ejemplo f3 construido: α=%s, β=%s, θ=%.4f", alpha, beta, params["theta"])
    return system
