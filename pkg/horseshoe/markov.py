"""
Module: markov.py

Descripción:
    Intersecciones markovianas de rectángulos poligonales. La carta que endereza R2 es un
    homeomorfismo PL radial (en abanico desde un centro de R2): cada vértice del borde de R2 va
    al lado correspondiente del cuadrado unidad por longitud de arco y los rayos desde el centro
    se llevan a rayos desde (0.5, 0.5). En esa carta se comprueban las condiciones:
      - h(R2) = [0, 1]²;
      - h(R1⁺) por encima de y = 1 y h(R1⁻) por debajo de y = 0 (o al revés);
      - h(R1) no toca las franjas laterales {0 <= y <= 1, x < 0 o x > 1}.

Funcionalidades:
    - markovian_check(R1, R2): MarkovCertificate o None.
    - revalidate_certificate(cert): las mismas condiciones con índices de giro.
    - image_certificate(R, f, target): certificado de f(R) ∩ target.
    - chain(c12, c23, f): certificado de f²(R1) ∩ R3.
    - fixed_point_search(R, f): punto fijo de f en R cuando f(R) ∩ R es markoviana.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import root

from geometry.base.errors import AmbiguousPositionError, PreconditionError, ResolutionTooCoarseError
from horseshoe.rectangles import SIDE_NAMES, MarkedRectangle, _cross, winding_number

logger = logging.getLogger(__name__)

EPS_GEOM = 1e-7
SQUARE_CORNERS = (0j, 1 + 0j, 1 + 1j, 1j)
SQUARE_CENTER = 0.5 + 0.5j
CHECK_DENSITY = 4


class RadialChart:
    """Homeomorfismo PL del plano que lleva R2 al cuadrado unidad; R2 debe ser estrellado desde su centro."""

    def __init__(self, rect: MarkedRectangle):
        pts = rect.points
        center = complex(np.mean(pts))
        rel = pts - center
        turns = _cross(rel, np.roll(rel, -1))
        if not (np.all(turns > 0) or np.all(turns < 0)):
            raise PreconditionError("R2 no es estrellado desde su centro; la carta radial no aplica",
                                    {"center": [center.real, center.imag]})
        images = np.empty(len(pts), dtype=complex)
        bounds = list(rect.corners) + [len(pts)]
        for k in range(4):
            lo, hi = bounds[k], bounds[k + 1]
            seg = np.append(pts[lo:hi], pts[hi % len(pts)])
            arc = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(seg)))])
            frac = arc[:-1] / arc[-1]
            a, b = SQUARE_CORNERS[k], SQUARE_CORNERS[(k + 1) % 4]
            images[lo:hi] = a + (b - a) * frac
        angles = np.angle(rel)
        order = np.argsort(angles)
        self.center = center
        self.angles = angles[order]
        self.vertices = pts[order]
        self.images = images[order]

    def __call__(self, points) -> np.ndarray:
        P = np.atleast_1d(np.asarray(points, dtype=complex))
        rel = P - self.center
        phi = np.angle(rel)
        m = len(self.angles)
        j = np.searchsorted(self.angles, phi) % m
        i = (j - 1) % m
        a, b = self.vertices[i], self.vertices[j]
        u = np.exp(1j * phi)
        lam = _cross(a - self.center, u) / _cross(u, b - a)
        boundary = a + lam * (b - a)
        rho = np.abs(boundary - self.center)
        target = self.images[i] + lam * (self.images[j] - self.images[i])
        return SQUARE_CENTER + (np.abs(rel) / rho) * (target - SQUARE_CENTER)

    def to_dict(self) -> dict:
        return {
            "center": [self.center.real, self.center.imag],
            "vertices": [[z.real, z.imag] for z in self.vertices],
            "images": [[z.real, z.imag] for z in self.images],
        }


@dataclass
class MarkovCertificate:
    R1: MarkedRectangle
    R2: MarkedRectangle
    chart: RadialChart
    orientation: str
    source: MarkedRectangle = None
    power: int = 0
    margins: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "R1": self.R1.to_dict(),
            "R2": self.R2.to_dict(),
            "chart": self.chart.to_dict(),
            "orientation": self.orientation,
            "source": self.source.to_dict() if self.source is not None else None,
            "power": self.power,
            "margins": self.margins,
        }


def _strip_distance(h: np.ndarray) -> np.ndarray:
    """Distancia a la unión de las franjas laterales cerradas (0 dentro)."""
    x, y = h.real, h.imag
    dy = np.maximum(np.maximum(-y, y - 1.0), 0.0)
    dx_left = np.maximum(x, 0.0)
    dx_right = np.maximum(1.0 - x, 0.0)
    return np.minimum(np.hypot(dx_left, dy), np.hypot(dx_right, dy))


def _in_strips(h: np.ndarray) -> np.ndarray:
    return (h.imag >= 0.0) & (h.imag <= 1.0) & ((h.real < 0.0) | (h.real > 1.0))


def markovian_check(R1: MarkedRectangle, R2: MarkedRectangle, epsilon: float = EPS_GEOM):
    """
    Certificado de que R1 ∩ R2 es markoviana (R1 cruza R2 de un lado horizontal al otro),
    o None. Lanza AmbiguousPositionError si algún punto queda a menos de epsilon de una
    frontera de la decisión.
    """
    if not R1.is_simple() or not R2.is_simple():
        raise PreconditionError("Los rectángulos deben ser simples")
    chart = RadialChart(R2)
    dense = R1.densified(CHECK_DENSITY)
    top = chart(dense.side("top"))
    bottom = chart(dense.side("bottom"))
    boundary = chart(dense.points)

    strip = _strip_distance(boundary)
    if np.any(_in_strips(boundary)):
        return None
    if np.any(strip < epsilon):
        raise AmbiguousPositionError("Contacto con una franja lateral dentro de la tolerancia",
                                     {"min_distance": float(strip.min())})

    def above(h):
        return np.min(h.imag) - 1.0

    def below(h):
        return -np.max(h.imag)

    dispositions = {"plus_above": (above(top), below(bottom)), "minus_above": (above(bottom), below(top))}
    for name, (m_up, m_down) in dispositions.items():
        if m_up > epsilon and m_down > epsilon:
            margins = {"above": float(m_up), "below": float(m_down), "strip": float(strip.min())}
            return MarkovCertificate(R1=R1, R2=R2, chart=chart, orientation=name, margins=margins)
    for m_up, m_down in dispositions.values():
        if min(m_up, m_down) > -epsilon and (abs(m_up) <= epsilon or abs(m_down) <= epsilon):
            raise AmbiguousPositionError("Lado horizontal tangente al cuadrado",
                                         {"margins": [float(m_up), float(m_down)]})
    return None


def revalidate_certificate(cert: MarkovCertificate, far: float = 1e6) -> bool:
    """
    Vuelve a comprobar las condiciones con índices de giro de las regiones {y > 1}, {y < 0}
    y las franjas laterales (polígonos grandes), sin usar comparaciones de coordenadas.
    """
    dense = cert.R1.densified(CHECK_DENSITY)
    top = cert.chart(dense.side("top"))
    bottom = cert.chart(dense.side("bottom"))
    boundary = cert.chart(dense.points)
    upper = [complex(-far, 1.0), complex(far, 1.0), complex(far, far), complex(-far, far)]
    lower = [complex(-far, -far), complex(far, -far), complex(far, 0.0), complex(-far, 0.0)]
    left = [complex(-far, 0.0), 0j, 1j, complex(-far, 1.0)]
    right = [1 + 0j, complex(far, 0.0), complex(far, 1.0), 1 + 1j]

    def inside(poly, pts):
        return winding_number(poly, pts) != 0

    if np.any(inside(left, boundary)) or np.any(inside(right, boundary)):
        return False
    if cert.orientation == "plus_above":
        up, down = top, bottom
    else:
        up, down = bottom, top
    return bool(np.all(inside(upper, up)) and np.all(inside(lower, down)))


def image_certificate(R: MarkedRectangle, f, target: MarkedRectangle, refine: int = 4):
    """Certificado de f(R) ∩ target (la poligonal de R se refina antes de aplicar f)."""
    image = R.densified(refine).mapped(f)
    cert = markovian_check(image, target)
    if cert is not None:
        cert.source = R
        cert.power = 1
    return cert


def _same_rectangle(a: MarkedRectangle, b: MarkedRectangle, tol: float = 1e-9) -> bool:
    if a is b:
        return True
    corners_a = a.points[list(a.corners)]
    corners_b = b.points[list(b.corners)]
    return bool(np.allclose(corners_a, corners_b, atol=tol))


def chain(c12: MarkovCertificate, c23: MarkovCertificate, f, refine: int = 2) -> MarkovCertificate:
    """
    Con f(R1) ∩ R2 y f(R2) ∩ R3 markovianas, certifica f²(R1) ∩ R3 aplicando f a la poligonal
    de f(R1). `f` es el mapa del segundo certificado; `power` cuenta las aplicaciones acumuladas.
    """
    if c23.source is None or not _same_rectangle(c12.R2, c23.source):
        raise PreconditionError("El rectángulo intermedio no coincide en ambos certificados")
    image = c12.R1.densified(refine)
    for _ in range(max(c23.power, 1)):
        image = image.mapped(f)
    cert = markovian_check(image, c23.R2)
    if cert is None:
        raise ResolutionTooCoarseError("La composición no resultó markoviana; refinar las poligonales",
                                       {"points": len(image.points)})
    cert.source = c12.source
    cert.power = c12.power + c23.power
    logger.debug("Certificado encadenado: potencia %d, orientación %s", cert.power, cert.orientation)
    return cert


@dataclass
class FixedPointResult:
    point: complex = None
    residual: float = math.inf
    evaluations: int = 0

    @property
    def found(self) -> bool:
        return self.point is not None

    def to_dict(self) -> dict:
        return {
            "point": [self.point.real, self.point.imag] if self.point is not None else None,
            "residual": self.residual if math.isfinite(self.residual) else None,
            "evaluations": self.evaluations,
        }


def fixed_point_search(R: MarkedRectangle, f, check_precondition: bool = True, grid: int = 24,
                       tolerance: float = 1e-6, starts: int = 6) -> FixedPointResult:
    """
    Punto de R con |f(z) - z| < tolerancia. Malla sobre la caja de R, luego scipy.optimize.root
    desde los puntos de menor desplazamiento. Con check_precondition se exige que f(R) ∩ R sea
    markoviana y se rehúsa en caso contrario.
    """
    if check_precondition and image_certificate(R, f, R) is None:
        raise PreconditionError("f(R) ∩ R no es markoviana: no hay garantía de punto fijo")
    pts = R.points
    xs = np.linspace(pts.real.min(), pts.real.max(), grid)
    ys = np.linspace(pts.imag.min(), pts.imag.max(), grid)
    cand = np.array([complex(x, y) for x in xs for y in ys])
    cand = cand[R.contains(cand)]
    result = FixedPointResult()
    if cand.size == 0:
        return result
    disp = np.array([abs(complex(f(z)) - z) for z in cand])
    result.evaluations = int(cand.size)

    def field_fn(v):
        z = complex(v[0], v[1])
        w = complex(f(z)) - z
        return [w.real, w.imag]

    for k in np.argsort(disp, kind="stable")[:starts]:
        z0 = cand[k]
        sol = root(field_fn, [z0.real, z0.imag], method="hybr", options={"xtol": 1e-14})
        result.evaluations += int(sol.nfev)
        z = complex(sol.x[0], sol.x[1])
        r = abs(complex(f(z)) - z)
        if r < result.residual and R.contains([z])[0]:
            result.point, result.residual = z, r
        if result.residual < tolerance:
            break
    if result.residual >= tolerance:
        logger.warning("Sin punto fijo bajo la tolerancia: mejor residuo %.3e", result.residual)
        result.point = None
    return result


__all__ = [
    "SIDE_NAMES",
    "EPS_GEOM",
    "FixedPointResult",
    "MarkovCertificate",
    "RadialChart",
    "chain",
    "fixed_point_search",
    "image_certificate",
    "markovian_check",
    "revalidate_certificate",
]
