"""
Module: drift.py

Descripción:
    Sistema de deriva a lo largo de una geodésica γ̃: en coordenadas de Fermi (s, t) de γ̃ y de
    cada trasladado, t -> t + speed·perfil(s/width)·corte(t)·guardas(z). El corte limita el
    soporte a una ventana de γ̃; las guardas anulan la deriva cerca de las elevaciones de clases
    cerradas dadas (α y β en el ejemplo heteroclínico), que quedan fijas punto a punto.

    El paso es un homeomorfismo mientras speed·|d(peso)/dt| < 1; la inversa se resuelve con
    scipy.optimize.brentq sobre t con s fijo.
"""

import logging
import math
from itertools import combinations

import numpy as np
from scipy.optimize import brentq

from geometry.base.errors import PreconditionError, TubeTooWideError
from geometry.base.hyperbolic_core import Geodesic, distance_from_origin, fermi_coordinates, point_along
from geometry.surface_group import SurfaceGroup, axis_of
from dynamics.base.lifted_system import (
    LiftedSystem,
    get_profile,
    segment_translates,
    smoothstep,
)

logger = logging.getLogger(__name__)

DEFAULT_HALF_WINDOW = 2.0
TRANSLATE_MARGIN = 0.5
INVERSE_TOL = 1e-13


class DriftSystem(LiftedSystem):
    def __init__(self, group: SurfaceGroup, path: Geodesic, width: float, speed: float,
                 window: tuple = None, ramp: tuple = None, profile: str = "mollifier",
                 guards: list = None):
        if width <= 0.0 or speed <= 0.0:
            raise PreconditionError("width y speed deben ser positivos", {"width": width, "speed": speed})
        window = tuple(window) if window is not None else (-DEFAULT_HALF_WINDOW, DEFAULT_HALF_WINDOW)
        if window[1] <= window[0]:
            raise PreconditionError("Ventana vacía", {"window": window})
        if ramp is None:
            # la rampa de salida mantiene t -> t + speed·corte(t) creciente
            ramp = (min(1.0, 0.25 * (window[1] - window[0])), max(2.5 * speed, 0.25 * (window[1] - window[0])))
        guards = [(group.check_word(w), float(gw)) for w, gw in (guards or [])]
        super().__init__(group, "drift", {
            "path": path.to_dict(), "width": width, "speed": speed, "window": list(window),
            "ramp": list(ramp), "profile": profile, "guards": [[str(w), gw] for w, gw in guards],
        })
        self.path = path
        self.width = float(width)
        self.speed = float(speed)
        self.window = window
        self.ramp = tuple(float(r) for r in ramp)
        self.profile = get_profile(profile)

        reach = group.circumradius + self.width + TRANSLATE_MARGIN
        self.charts = segment_translates(group, path, window, reach)
        self.guard_charts = []
        for word, gw in guards:
            axis, length = axis_of(group, word)
            charts = segment_translates(group, axis, (0.0, length), group.circumradius + 2.0 * gw + TRANSLATE_MARGIN,
                                        period=length)
            self.guard_charts.append((gw, charts))
        self._check_overlaps()
        logger.info("Deriva: ancho=%.4f, velocidad=%.4f, ventana=(%.4f, %.4f), trasladados=%d, guardas=%d",
                    self.width, self.speed, window[0], window[1], len(self.charts), len(guards))

    def _cutoff(self, t: float) -> float:
        lo, hi = self.window
        r_in, r_out = self.ramp
        c_in = smoothstep((t - lo) / r_in) if r_in > 0.0 else float(t >= lo)
        c_out = smoothstep((hi - t) / r_out) if r_out > 0.0 else float(t <= hi)
        return c_in * c_out

    def _guard(self, z: complex) -> float:
        factor = 1.0
        for gw, charts in self.guard_charts:
            d = min((abs(c.coordinates(z)[0]) for c in charts), default=math.inf)
            factor *= smoothstep(d / gw - 1.0)
            if factor == 0.0:
                break
        return factor

    def _weight(self, chart, s: float, t: float, z: complex = None) -> float:
        base = self.profile(s / self.width)
        if base == 0.0:
            return 0.0
        base *= self._cutoff(t)
        if base == 0.0 or not self.guard_charts:
            return base
        return base * self._guard(z if z is not None else chart.point(s, t))

    def _check_overlaps(self):
        near = self.group.circumradius + self.width
        lo, hi = self.window
        ts = np.arange(lo, hi + 1e-12, max(self.width, 0.05))
        for c1, c2 in combinations(self.charts, 2):
            for t in ts:
                for s in (-0.9 * self.width, 0.0, 0.9 * self.width):
                    z = c1.point(s, t)
                    if distance_from_origin(z) > near or self._weight(c1, s, t, z) == 0.0:
                        continue
                    s2, t2 = c2.coordinates(z)
                    if abs(s2) < self.width and self._weight(c2, s2, t2, z) > 0.0:
                        raise TubeTooWideError("Tubos de deriva solapados",
                                               {"decks": [str(c1.deck), str(c2.deck)], "t": float(t), "s": s})

    def local_step(self, z):
        for chart in self.charts:
            s, t = chart.coordinates(z)
            if abs(s) >= self.width:
                continue
            w = self._weight(chart, s, t, z)
            if w > 0.0:
                return chart.point(s, t + self.speed * w)
        return z

    def local_inverse(self, z):
        for chart in self.charts:
            s, t_img = chart.coordinates(z)
            if abs(s) >= self.width:
                continue

            def residual(t):
                return t + self.speed * self._weight(chart, s, t) - t_img

            if residual(t_img) == 0.0:
                continue
            t = brentq(residual, t_img - self.speed - 1e-12, t_img, xtol=INVERSE_TOL)
            candidate = chart.point(s, t)
            if abs(self.local_step(candidate) - z) < 1e-9:
                return candidate
        return z

    @property
    def displacement_bound(self):
        return self.speed


def make_drift(G: SurfaceGroup, path: Geodesic, width: float, speed: float, **kwargs) -> DriftSystem:
    return DriftSystem(G, path, width, speed, **kwargs)


def _solve_distance(path: Geodesic, axis: Geodesic, target: float, direction: float) -> float:
    """t sobre `path` donde la distancia a `axis` vale `target`; la distancia crece con direction·t."""

    def gap(t):
        return abs(fermi_coordinates(point_along(path, t), axis)[0]) - target

    t_near = 0.0
    while gap(t_near) > 0.0:
        t_near -= direction
    t_far = 0.0
    while gap(t_far) < 0.0:
        t_far += direction
        if abs(t_far) > 60.0:
            raise PreconditionError("La geodésica no se aleja del eje", {"target": target})
    return brentq(gap, min(t_near, t_far), max(t_near, t_far), xtol=1e-12)


def heteroclinic_path(G: SurfaceGroup, alpha, beta) -> Geodesic:
    """γ̃ del extremo repulsor de eje(α) al extremo atractor de eje(β)."""
    axis_a, _ = axis_of(G, alpha)
    axis_b, _ = axis_of(G, beta)
    return Geodesic(axis_a.a, axis_b.b)


def make_heteroclinic_drift(G: SurfaceGroup, alpha, beta, width: float, speed: float,
                            guard_width: float, profile: str = "mollifier") -> DriftSystem:
    """
    Deriva sobre la heteroclínica γ̃ entre α̃ y β̃, con guardas de ancho `guard_width` en todas
    las elevaciones de α y β. La ventana va de d(·, α̃) = guard_width a d(·, β̃) = guard_width,
    donde las guardas ya anulan la deriva, así que no hace falta rampa.
    """
    alpha, beta = G.check_word(alpha), G.check_word(beta)
    path = heteroclinic_path(G, alpha, beta)
    axis_a, _ = axis_of(G, alpha)
    axis_b, _ = axis_of(G, beta)
    t_start = _solve_distance(path, axis_a, guard_width, 1.0)
    t_end = _solve_distance(path, axis_b, guard_width, -1.0)
    if t_end <= t_start:
        raise PreconditionError("Las guardas cubren toda la heteroclínica",
                                {"t_start": t_start, "t_end": t_end, "guard_width": guard_width})
    return DriftSystem(G, path, width, speed, window=(t_start, t_end), ramp=(0.0, 0.0),
                       profile=profile, guards=[(alpha, guard_width), (beta, guard_width)])


__all__ = ["DriftSystem", "heteroclinic_path", "make_drift", "make_heteroclinic_drift"]
