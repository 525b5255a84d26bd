"""
Module: rectangles.py

Descripción:
    Rectángulos marcados como poligonales cerradas (puntos complejos, del plano o de una carta
    del disco) con cuatro esquinas en orden cíclico. Los lados se recorren como
    R⁻ = c0 -> c1, V_derecho = c1 -> c2, R⁺ = c2 -> c3, V_izquierdo = c3 -> c0.

Funcionalidades:
    - MarkedRectangle.box(...): rectángulo alineado con los ejes, con lados subdivididos.
    - is_simple(): barrido de pares de segmentos (sin autocruces).
    - mapped(f): imagen de la poligonal por un mapa de puntos complejos.
    - densified(k), diameter(metric), to_dict()/from_dict().
    - winding_number(polygon, points): índice de giro, independiente de matplotlib.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from matplotlib.path import Path

from geometry.base.errors import PreconditionError
from geometry.base.hyperbolic_core import hyp_distance

logger = logging.getLogger(__name__)

SIDE_NAMES = ("bottom", "right", "top", "left")


def _cross(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return u.real * v.imag - u.imag * v.real


def segments_intersect(p1: complex, p2: complex, q1: complex, q2: complex) -> bool:
    """Cruce propio o contacto de los segmentos [p1, p2] y [q1, q2]."""
    p1, p2, q1, q2 = complex(p1), complex(p2), complex(q1), complex(q2)
    d1 = _cross(q2 - q1, p1 - q1)
    d2 = _cross(q2 - q1, p2 - q1)
    d3 = _cross(p2 - p1, q1 - p1)
    d4 = _cross(p2 - p1, q2 - p1)
    if d1 * d2 < 0 and d3 * d4 < 0:
        return True

    def on_segment(a, b, c, d):
        return d == 0 and min(a.real, b.real) <= c.real <= max(a.real, b.real) \
            and min(a.imag, b.imag) <= c.imag <= max(a.imag, b.imag)

    return (on_segment(q1, q2, p1, d1) or on_segment(q1, q2, p2, d2)
            or on_segment(p1, p2, q1, d3) or on_segment(p1, p2, q2, d4))


def winding_number(polygon, points) -> np.ndarray:
    """Índice de giro de la poligonal cerrada `polygon` alrededor de cada punto (suma de ángulos)."""
    poly = np.asarray(polygon, dtype=complex)
    pts = np.atleast_1d(np.asarray(points, dtype=complex))
    rel = poly[None, :] - pts[:, None]
    nxt = np.roll(rel, -1, axis=1)
    angles = np.angle(nxt / rel)
    return np.rint(angles.sum(axis=1) / (2.0 * math.pi)).astype(int)


@dataclass
class MarkedRectangle:
    points: np.ndarray
    corners: tuple

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=complex)
        self.corners = tuple(int(c) for c in self.corners)
        if len(self.corners) != 4 or list(self.corners) != sorted(self.corners):
            raise PreconditionError("Se necesitan cuatro esquinas en orden cíclico", {"corners": self.corners})
        if self.corners[0] != 0 or self.corners[-1] >= len(self.points):
            raise PreconditionError("Índices de esquinas fuera de rango", {"corners": self.corners})

    @classmethod
    def box(cls, x0: float, x1: float, y0: float, y1: float, per_side: int = 8) -> "MarkedRectangle":
        corners = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
        pts = []
        for i in range(4):
            a, b = corners[i], corners[(i + 1) % 4]
            pts.extend(a + (b - a) * k / per_side for k in range(per_side))
        return cls(np.array(pts), (0, per_side, 2 * per_side, 3 * per_side))

    def side(self, name: str) -> np.ndarray:
        """Puntos del lado, incluidas ambas esquinas."""
        k = SIDE_NAMES.index(name)
        start = self.corners[k]
        end = self.corners[k + 1] if k < 3 else len(self.points)
        idx = list(range(start, end + 1))
        return self.points[[i % len(self.points) for i in idx]]

    @property
    def closed(self) -> np.ndarray:
        return np.append(self.points, self.points[0])

    def segments(self):
        pts = self.points
        return [(pts[i], pts[(i + 1) % len(pts)]) for i in range(len(pts))]

    def is_simple(self) -> bool:
        """Barrido de cada segmento contra los no adyacentes (vectorizado por filas)."""
        a = self.points
        b = np.roll(a, -1)
        m = len(a)
        for i in range(m - 2):
            j = np.arange(i + 2, m if i > 0 else m - 1)
            if j.size == 0:
                continue
            p1, p2, q1, q2 = a[i], b[i], a[j], b[j]
            d1 = _cross(q2 - q1, p1 - q1)
            d2 = _cross(q2 - q1, p2 - q1)
            d3 = _cross(np.full(j.size, p2 - p1), q1 - p1)
            d4 = _cross(np.full(j.size, p2 - p1), q2 - p1)
            proper = (d1 * d2 < 0) & (d3 * d4 < 0)
            if np.any(proper):
                return False
            touching = (d1 == 0) | (d2 == 0) | (d3 == 0) | (d4 == 0)
            for k in np.flatnonzero(touching):
                if segments_intersect(p1, p2, q1[k], q2[k]):
                    return False
        return True

    def densified(self, factor: int) -> "MarkedRectangle":
        if factor <= 1:
            return self
        pts = []
        for a, b in self.segments():
            pts.extend(a + (b - a) * k / factor for k in range(factor))
        return MarkedRectangle(np.array(pts), tuple(c * factor for c in self.corners))

    def mapped(self, f) -> "MarkedRectangle":
        return MarkedRectangle(np.array([complex(f(z)) for z in self.points]), self.corners)

    def contains(self, points) -> np.ndarray:
        path = Path(np.column_stack([self.points.real, self.points.imag]))
        pts = np.atleast_1d(np.asarray(points, dtype=complex))
        return path.contains_points(np.column_stack([pts.real, pts.imag]))

    def diameter(self, metric: str = "euclidean") -> float:
        pts = self.points
        if metric == "hyperbolic":
            return max(hyp_distance(a, b) for i, a in enumerate(pts) for b in pts[i + 1:])
        return float(np.max(np.abs(pts[:, None] - pts[None, :])))

    def to_dict(self) -> dict:
        return {"points": [[z.real, z.imag] for z in self.points], "corners": list(self.corners)}

    @classmethod
    def from_dict(cls, data: dict) -> "MarkedRectangle":
        return cls(np.array([complex(x, y) for x, y in data["points"]]), tuple(data["corners"]))
