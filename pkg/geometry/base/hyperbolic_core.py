"""
Module: hyperbolic_core.py

Descripción:
    Aritmética de punto flotante para el modelo del disco de Poincaré: isometrías, distancias,
    geodésicas, proyecciones ortogonales, coordenadas de Fermi y orden en el círculo del borde.

    Los puntos interiores se representan como `complex` (x + iy, |z| < 1). Los puntos del borde son
    `BoundaryPoint` (un ángulo normalizado a [0, 2π)). Las isometrías se guardan como matrices reales
    de SL(2, R) (acción sobre el semiplano superior) y actúan en el disco mediante la transformada de
    Cayley, con los coeficientes SU(1,1) precalculados.

Funcionalidades:
    - apply(M, p): acción de una isometría sobre puntos interiores, puntos del borde o geodésicas.
    - hyp_distance(z, w), geodesic_distance(z, G), point_along(G, t).
    - classify(M): tipo de isometría (hiperbólica con eje y longitud, parabólica, elíptica, identidad).
    - project_onto_geodesic(z, G) en forma cerrada (se conjuga G al diámetro real).
    - fermi_coordinates(z, G) / from_fermi(G, s, t).
    - boundary_interleave(G1, G2): cruce orientado de dos geodésicas por entrelazado en el borde.

Ejemplo:
    >>> M = MobiusTransform.translation(2.0)
    >>> hyp_distance(0j, apply(M, 0j))
    2.0
"""

import cmath
import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from geometry.base.errors import NearBoundaryError, PreconditionError

logger = logging.getLogger(__name__)

EPS_M = 1e-12
EPS_B = 1e-9
INTERIOR_MARGIN = 1e-9
IDENTITY_TOL = 1e-9
TWO_PI = 2.0 * math.pi


def normalize_angle(angle: float) -> float:
    angle = math.fmod(angle, TWO_PI)
    if angle < 0.0:
        angle += TWO_PI
    if angle >= TWO_PI:
        angle = 0.0
    return angle


def circular_distance(x: float, y: float) -> float:
    """Distancia angular en el círculo, en [0, π]."""
    d = abs(normalize_angle(x) - normalize_angle(y))
    return min(d, TWO_PI - d)


def ccw_arc(x: float, y: float) -> float:
    """Longitud del arco recorrido en sentido antihorario de x a y, en [0, 2π)."""
    return normalize_angle(y - x)


@dataclass(frozen=True)
class BoundaryPoint:
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "angle", normalize_angle(float(self.angle)))

    @classmethod
    def from_complex(cls, z: complex) -> "BoundaryPoint":
        return cls(math.atan2(z.imag, z.real))

    @property
    def z(self) -> complex:
        return cmath.exp(1j * self.angle)

    def distinct_from(self, other: "BoundaryPoint") -> bool:
        return circular_distance(self.angle, other.angle) > EPS_B


@dataclass(frozen=True)
class Geodesic:
    """Geodésica orientada de `a` (extremo α) a `b` (extremo ω)."""

    a: BoundaryPoint
    b: BoundaryPoint

    def __post_init__(self):
        if not self.a.distinct_from(self.b):
            raise PreconditionError(
                "Los extremos de la geodésica no son distintos",
                {"a": self.a.angle, "b": self.b.angle},
            )

    @classmethod
    def from_angles(cls, a: float, b: float) -> "Geodesic":
        return cls(BoundaryPoint(a), BoundaryPoint(b))

    def reversed(self) -> "Geodesic":
        return Geodesic(self.b, self.a)

    def same_as(self, other: "Geodesic", tol: float = EPS_B) -> bool:
        return (circular_distance(self.a.angle, other.a.angle) <= tol
                and circular_distance(self.b.angle, other.b.angle) <= tol)

    def same_support(self, other: "Geodesic", tol: float = EPS_B) -> bool:
        return self.same_as(other, tol) or self.same_as(other.reversed(), tol)

    def to_dict(self) -> dict:
        return {"a": self.a.angle, "b": self.b.angle}


class MobiusTransform:
    """
    Isometría que preserva la orientación, como matriz real [[a, b], [c, d]] con det = 1,
    identificada con su opuesta. `A` y `B` son los coeficientes de la acción en el disco
    z -> (A z + B) / (conj(B) z + conj(A)).
    """

    __slots__ = ("a", "b", "c", "d", "A", "B")

    def __init__(self, a: float, b: float, c: float, d: float, normalize: bool = True):
        if normalize:
            det = a * d - b * c
            if det <= 0.0:
                raise PreconditionError("Determinante no positivo", {"det": det})
            s = math.sqrt(det)
            a, b, c, d = a / s, b / s, c / s, d / s
        self.a, self.b, self.c, self.d = float(a), float(b), float(c), float(d)
        self.A = complex(0.5 * (self.a + self.d), 0.5 * (self.b - self.c))
        self.B = complex(0.5 * (self.a - self.d), -0.5 * (self.b + self.c))

    @classmethod
    def identity(cls) -> "MobiusTransform":
        return cls(1.0, 0.0, 0.0, 1.0, normalize=False)

    @classmethod
    def from_disk(cls, A: complex, B: complex) -> "MobiusTransform":
        return cls(A.real + B.real, A.imag - B.imag, -A.imag - B.imag, A.real - B.real)

    @classmethod
    def rotation(cls, phi: float) -> "MobiusTransform":
        """Rotación de ángulo phi alrededor de 0."""
        return cls.from_disk(cmath.exp(0.5j * phi), 0j)

    @classmethod
    def translation(cls, distance: float, direction: float = 0.0) -> "MobiusTransform":
        """Traslación hiperbólica a lo largo del diámetro de ángulo `direction`."""
        h = 0.5 * distance
        return cls.from_disk(complex(math.cosh(h), 0.0), math.sinh(h) * cmath.exp(1j * direction))

    @classmethod
    def to_origin(cls, z: complex) -> "MobiusTransform":
        """Isometría u -> (u - z) / (1 - conj(z) u), que lleva z a 0."""
        k = 1.0 / math.sqrt(1.0 - abs(z) ** 2)
        return cls.from_disk(complex(k, 0.0), -z * k)

    @classmethod
    def along(cls, G: "Geodesic", length: float) -> "MobiusTransform":
        """Traslación de longitud `length` a lo largo de G, en el sentido de a hacia b."""
        N = geodesic_frame(G)
        return N.inverse() @ cls.translation(length) @ N

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> float:
        return self.a + self.d

    def compose(self, other: "MobiusTransform") -> "MobiusTransform":
        """self ∘ other."""
        return MobiusTransform(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __matmul__(self, other: "MobiusTransform") -> "MobiusTransform":
        return self.compose(other)

    def inverse(self) -> "MobiusTransform":
        return MobiusTransform(self.d, -self.b, -self.c, self.a, normalize=False)

    def approx_equal(self, other: "MobiusTransform", tol: float = 1e-8) -> bool:
        m, n = self.matrix, other.matrix
        return bool(min(np.max(np.abs(m - n)), np.max(np.abs(m + n))) <= tol)

    def distance_to_identity(self) -> float:
        m = self.matrix
        eye = np.eye(2)
        return float(min(np.max(np.abs(m - eye)), np.max(np.abs(m + eye))))

    def __repr__(self):
        return f"MobiusTransform({self.a!r}, {self.b!r}, {self.c!r}, {self.d!r})"


def _apply_complex(M: MobiusTransform, z: complex) -> complex:
    return (M.A * z + M.B) / (M.B.conjugate() * z + M.A.conjugate())


def apply(M: MobiusTransform, p):
    """
    Acción de M sobre un punto interior (complex), un BoundaryPoint o una Geodesic.

    Lanza NearBoundaryError si un punto interior cae a menos de INTERIOR_MARGIN del borde:
    el llamador debe re-anclarlo mediante el grupo de superficie.
    """
    if isinstance(p, BoundaryPoint):
        return BoundaryPoint.from_complex(_apply_complex(M, p.z))
    if isinstance(p, Geodesic):
        return Geodesic(apply(M, p.a), apply(M, p.b))
    z = complex(p)
    w = _apply_complex(M, z)
    if abs(z) < 1.0 and 1.0 - abs(w) < INTERIOR_MARGIN:
        raise NearBoundaryError(
            "La imagen quedó demasiado cerca del borde; re-anclar con el grupo",
            {"z": [z.real, z.imag], "modulus": abs(w)},
        )
    return w


def check_interior(z: complex) -> complex:
    z = complex(z)
    if abs(z) > 1.0 - INTERIOR_MARGIN:
        raise NearBoundaryError("Punto fuera del margen interior", {"modulus": abs(z)})
    return z


def hyp_distance(z: complex, w: complex) -> float:
    """Distancia en el disco, 2·artanh(|z - w| / |1 - conj(z) w|)."""
    num = abs(z - w)
    if num == 0.0:
        return 0.0
    den = abs(1.0 - z.conjugate() * w)
    return 2.0 * math.atanh(min(num / den, 1.0 - 1e-16))


def distance_from_origin(z: complex) -> float:
    return 2.0 * math.atanh(min(abs(z), 1.0 - 1e-16))


class Interleave(str, Enum):
    CROSS_POSITIVE = "CrossPositive"
    CROSS_NEGATIVE = "CrossNegative"
    DISJOINT = "Disjoint"
    SHARED_ENDPOINT = "SharedEndpoint"

    @property
    def crosses(self) -> bool:
        return self in (Interleave.CROSS_POSITIVE, Interleave.CROSS_NEGATIVE)


def boundary_interleave(G1: Geodesic, G2: Geodesic) -> Interleave:
    """
    Cruce de G1 y G2 según el orden cíclico antihorario de sus extremos.
    CrossPositive cuando el orden es (a1, a2, b1, b2); CrossNegative cuando es (a1, b2, b1, a2).
    """
    for x in (G1.a, G1.b):
        for y in (G2.a, G2.b):
            if not x.distinct_from(y):
                return Interleave.SHARED_ENDPOINT
    span = ccw_arc(G1.a.angle, G1.b.angle)
    a2_inside = ccw_arc(G1.a.angle, G2.a.angle) < span
    b2_inside = ccw_arc(G1.a.angle, G2.b.angle) < span
    if a2_inside == b2_inside:
        return Interleave.DISJOINT
    return Interleave.CROSS_POSITIVE if a2_inside else Interleave.CROSS_NEGATIVE


@dataclass(frozen=True)
class IsometryClass:
    kind: str
    axis: Geodesic = None
    length: float = 0.0
    fixed: BoundaryPoint = None
    center: complex = None
    degenerate: bool = False

    @property
    def is_hyperbolic(self) -> bool:
        return self.kind == "hyperbolic"


def classify(M: MobiusTransform) -> IsometryClass:
    """Clasifica M por |traza|; los ejes se orientan del punto repulsor al atractor."""
    if M.distance_to_identity() <= IDENTITY_TOL:
        return IsometryClass(kind="identity")
    A, B = M.A, M.B
    re_a = abs(A.real)
    tr = abs(M.trace)
    if tr > 2.0 + EPS_M:
        s = math.sqrt(A.real ** 2 - 1.0)
        bc = B.conjugate()
        z1 = (1j * A.imag + s) / bc
        z2 = (1j * A.imag - s) / bc
        # |derivada| = 1/|conj(B) z + conj(A)|^2 < 1 en el atractor
        if abs(bc * z1 + A.conjugate()) > abs(bc * z2 + A.conjugate()):
            attracting, repelling = z1, z2
        else:
            attracting, repelling = z2, z1
        axis = Geodesic(BoundaryPoint.from_complex(repelling), BoundaryPoint.from_complex(attracting))
        length = 2.0 * math.acosh(tr / 2.0)
        return IsometryClass(kind="hyperbolic", axis=axis, length=length)
    if tr < 2.0 - EPS_M:
        if abs(B) < EPS_M:
            center = 0j
        else:
            root = math.sqrt(max(1.0 - re_a ** 2, 0.0))
            candidates = [1j * (A.imag + root) / B.conjugate(), 1j * (A.imag - root) / B.conjugate()]
            center = min(candidates, key=abs)
        return IsometryClass(kind="elliptic", center=center)
    logger.warning("Traza casi parabólica: |tr| = %.15f", tr)
    if abs(B) < EPS_M:
        return IsometryClass(kind="identity", degenerate=True)
    fixed = BoundaryPoint.from_complex(1j * A.imag / B.conjugate())
    return IsometryClass(kind="parabolic", fixed=fixed, degenerate=True)


def geodesic_frame(G: Geodesic) -> MobiusTransform:
    """
    Isometría N que lleva G al diámetro real orientado de -1 a +1 y el pie de la
    perpendicular desde 0 a G al origen.
    """
    p, q = G.a.z, G.b.z
    mid = p + q
    if abs(mid) < 1e-14:
        M0 = MobiusTransform.identity()
    else:
        phi = math.atan2(mid.imag, mid.real)
        half = 0.5 * circular_distance(G.a.angle, G.b.angle)
        r = (1.0 - math.sin(half)) / math.cos(half)
        rho = 2.0 * math.atanh(r)
        M0 = MobiusTransform.translation(-rho) @ MobiusTransform.rotation(-phi)
    ia = _apply_complex(M0, p)
    turn = math.pi - math.atan2(ia.imag, ia.real)
    return MobiusTransform.rotation(turn) @ M0


def _diameter_fermi(w: complex):
    zeta = 1j * (1.0 + w) / (1.0 - w)
    t = math.log(abs(zeta))
    s = math.asinh(-zeta.real / zeta.imag)
    return s, t


def _diameter_point(s: float, t: float) -> complex:
    zeta = math.exp(t) * (1j - math.sinh(s)) / math.cosh(s)
    return (zeta - 1j) / (zeta + 1j)


def fermi_coordinates(z: complex, G: Geodesic, frame: MobiusTransform = None):
    """
    (s, t): s distancia con signo a G (positiva a la izquierda de a -> b), t longitud de arco
    a lo largo de G medida desde el pie de la perpendicular desde 0.
    """
    N = frame if frame is not None else geodesic_frame(G)
    return _diameter_fermi(_apply_complex(N, z))


def from_fermi(G: Geodesic, s: float, t: float, frame: MobiusTransform = None) -> complex:
    N = frame if frame is not None else geodesic_frame(G)
    return _apply_complex(N.inverse(), _diameter_point(s, t))


def project_onto_geodesic(z: complex, G: Geodesic) -> complex:
    N = geodesic_frame(G)
    _, t = _diameter_fermi(_apply_complex(N, z))
    return _apply_complex(N.inverse(), _diameter_point(0.0, t))


def geodesic_distance(z: complex, G: Geodesic) -> float:
    s, _ = fermi_coordinates(z, G)
    return abs(s)


def point_along(G: Geodesic, t: float) -> complex:
    """Punto de G a longitud de arco t del pie de la perpendicular desde 0."""
    return from_fermi(G, 0.0, t)


def geodesic_through(z: complex, w: complex) -> Geodesic:
    """Geodésica orientada que pasa por z y luego por w."""
    M = MobiusTransform.to_origin(z)
    u = _apply_complex(M, w)
    if abs(u) == 0.0:
        raise PreconditionError("Los puntos coinciden", {"z": [z.real, z.imag]})
    direction = u / abs(u)
    Minv = M.inverse()
    return Geodesic(
        BoundaryPoint.from_complex(_apply_complex(Minv, -direction)),
        BoundaryPoint.from_complex(_apply_complex(Minv, direction)),
    )


def segment_points(z: complex, w: complex, count: int) -> list:
    """`count` puntos equiespaciados (en distancia hiperbólica) del segmento [z, w]."""
    M = MobiusTransform.to_origin(z)
    u = _apply_complex(M, w)
    if abs(u) == 0.0:
        return [z] * count
    direction = u / abs(u)
    d = distance_from_origin(u)
    Minv = M.inverse()
    return [_apply_complex(Minv, math.tanh(0.5 * s) * direction) for s in np.linspace(0.0, d, count)]


def geodesic_distance_between(G1: Geodesic, G2: Geodesic) -> float:
    """Distancia entre dos geodésicas disjuntas (0 si se cruzan o comparten extremo)."""
    if boundary_interleave(G1, G2) != Interleave.DISJOINT:
        return 0.0
    N = geodesic_frame(G1)
    p = _apply_complex(N, G2.a.z)
    q = _apply_complex(N, G2.b.z)
    # extremos de G2 en el semiplano, G1 es el eje imaginario
    P = (1j * (1.0 + p) / (1.0 - p)).real
    Q = (1j * (1.0 + q) / (1.0 - q)).real
    return math.acosh(abs(Q + P) / abs(Q - P))
