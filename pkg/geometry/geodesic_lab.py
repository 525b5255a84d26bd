"""
Module: geodesic_lab.py

Descripción:
    Combinatoria de geodésicas cerradas: cruces transversales entre ejes y sus trasladados,
    testigos de autointersección, reducción de Nielsen de pares de palabras y la clasificación
    del cubrimiento asociado a dos lazos (toro con una punción o esfera con tres punciones).

Funcionalidades:
    - geodesics_cross(G1, G2): punto de cruce y orientación, o None.
    - self_intersection_witness(G, w, radius): primer trasladado u·eje(w) que cruza eje(w).
    - nielsen_reduce(w1, w2): movimientos de Nielsen voraces mientras baja la longitud total.
    - classify_covering(G, w1, w2, radius): decisión acotada con resultado Undetermined honesto.
    - crossing_orientation_sequence(G, T, p0): predicado de orden cíclico (α, p0, T p0, β).
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from geometry.base.errors import (
    AmbiguousCrossingError,
    BudgetExceededError,
    NotRankTwoError,
    PreconditionError,
)
from geometry.base.hyperbolic_core import (
    BoundaryPoint,
    Geodesic,
    Interleave,
    MobiusTransform,
    apply,
    boundary_interleave,
    ccw_arc,
    geodesic_frame,
)
from geometry.surface_group import (
    IDENTITY_WORD,
    MAX_BALL_WORDS,
    GroupWord,
    SurfaceGroup,
    axis_of,
    invert_letter,
    reduce,
)

logger = logging.getLogger(__name__)

DEFAULT_COVERING_RADIUS = 6
MIN_DECISION_RADIUS = 2
TRACE_TOL = 1e-6
SPLICE_RADIUS = 4


@dataclass(frozen=True)
class IntersectionWitness:
    deck: GroupWord
    point: complex
    orientation: Interleave

    def to_dict(self) -> dict:
        return {
            "deck": str(self.deck) if self.deck is not None else None,
            "point": [self.point.real, self.point.imag],
            "orientation": self.orientation.value,
        }


@dataclass(frozen=True)
class NoneFound:
    radius: int


def geodesics_cross(G1: Geodesic, G2: Geodesic):
    """
    Punto de cruce de G1 y G2 (conjugando G1 al diámetro real) con la orientación de
    boundary_interleave. None si son disjuntas.
    """
    relation = boundary_interleave(G1, G2)
    if relation == Interleave.SHARED_ENDPOINT:
        raise AmbiguousCrossingError("Las geodésicas comparten un extremo",
                                     {"G1": G1.to_dict(), "G2": G2.to_dict()})
    if relation == Interleave.DISJOINT:
        return None
    N = geodesic_frame(G1)
    p = apply(N, G2.a)
    q = apply(N, G2.b)
    # en el semiplano G1 es el eje imaginario y G2 el semicírculo [P, Q] con P·Q < 0
    P = -1.0 / math.tan(0.5 * p.angle)
    Q = -1.0 / math.tan(0.5 * q.angle)
    zeta = 1j * math.sqrt(-P * Q)
    w = (zeta - 1j) / (zeta + 1j)
    point = apply(N.inverse(), w)
    return IntersectionWitness(deck=None, point=point, orientation=relation)


def _first_crossing(axis: Geodesic, chunk):
    for word, M in chunk:
        a, b = apply(M, axis.a), apply(M, axis.b)
        if not a.distinct_from(b):
            # trasladado demasiado corto para resolverse en el borde: no puede cruzar
            continue
        image = Geodesic(a, b)
        if image.same_support(axis, tol=1e-7):
            continue
        relation = boundary_interleave(axis, image)
        if relation.crosses:
            hit = geodesics_cross(axis, image)
            return IntersectionWitness(deck=word, point=hit.point, orientation=relation)
    return None


def _search_translates(axis: Geodesic, ball: list, threads: int = 1):
    """Primer elemento de `ball` (en su orden) cuyo trasladado del eje lo cruza."""
    items = [item for item in ball if not item[0].is_identity]
    if threads <= 1 or len(items) < 256:
        return _first_crossing(axis, items)
    size = math.ceil(len(items) / threads)
    chunks = [items[i:i + size] for i in range(0, len(items), size)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for hit in pool.map(lambda c: _first_crossing(axis, c), chunks):
            if hit is not None:
                return hit
    return None


def self_intersection_witness(G: SurfaceGroup, w, radius: int, threads: int = 1):
    """
    Busca, en orden shortlex, u de longitud <= radius con u fuera de <w> (ejes distintos)
    tal que u·eje(w) cruza eje(w). Retorna IntersectionWitness o NoneFound(radius).
    """
    w = G.check_word(w)
    axis, _ = axis_of(G, w)
    hit = _search_translates(axis, G.ball(radius), threads)
    if hit is None:
        logger.debug("Sin autointersección para %s hasta radio %d", w, radius)
        return NoneFound(radius)
    logger.debug("Autointersección de %s con trasladado %s", w, hit.deck)
    return hit


@dataclass
class NielsenResult:
    w1: GroupWord
    w2: GroupWord
    moves: list = field(default_factory=list)
    degenerate: bool = False


def _nielsen_candidates(w1: GroupWord, w2: GroupWord):
    W1, W2 = w1.inverse(), w2.inverse()
    yield "w1 <- w1 w2", w1 * w2, w2
    yield "w1 <- w1 w2^-1", w1 * W2, w2
    yield "w1 <- w2 w1", w2 * w1, w2
    yield "w1 <- w2^-1 w1", W2 * w1, w2
    yield "w2 <- w2 w1", w1, w2 * w1
    yield "w2 <- w2 w1^-1", w1, w2 * W1
    yield "w2 <- w1 w2", w1, w1 * w2
    yield "w2 <- w1^-1 w2", w1, W1 * w2


def nielsen_reduce(w1, w2) -> NielsenResult:
    """
    Aplica movimientos de Nielsen de forma voraz mientras la longitud reducida total baje
    estrictamente. Cada movimiento preserva el subgrupo <w1, w2>.
    """
    w1, w2 = reduce(GroupWord.coerce(w1)), reduce(GroupWord.coerce(w2))
    if w1.is_identity or w2.is_identity:
        raise PreconditionError("Ambas palabras deben ser no triviales", {"w1": str(w1), "w2": str(w2)})
    moves = []
    while not (w1.is_identity or w2.is_identity):
        total = len(w1) + len(w2)
        best = None
        for name, c1, c2 in _nielsen_candidates(w1, w2):
            if len(c1) + len(c2) < total and (best is None or len(c1) + len(c2) < len(best[1]) + len(best[2])):
                best = (name, c1, c2)
        if best is None:
            break
        name, w1, w2 = best
        moves.append(name)
    if len(w2) < len(w1):
        w1, w2 = w2, w1
        moves.append("swap")
    degenerate = w1.is_identity or w2.is_identity
    if degenerate:
        logger.warning("Par de rango 1 tras la reducción de Nielsen: (%s, %s)", w1, w2)
    return NielsenResult(w1=w1, w2=w2, moves=moves, degenerate=degenerate)


def subgroup_ball(G: SurfaceGroup, basis, radius: int) -> list:
    """
    Palabras reducidas de longitud <= radius en los generadores `basis` (y sus inversos),
    en orden shortlex, expandidas a palabras del grupo junto con su evaluación.
    """
    basis = [G.check_word(b) for b in basis]
    symbols = []
    for i, b in enumerate(basis):
        M = G.evaluate(b)
        symbols.append((f"x{i}", b, M))
        symbols.append((f"X{i}", b.inverse(), M.inverse()))
    n = len(symbols)
    size = 1 + sum(n * (n - 1) ** (k - 1) for k in range(1, radius + 1))
    if size > MAX_BALL_WORDS:
        raise BudgetExceededError("Bola del subgrupo demasiado grande", {"radius": radius, "size": size})
    inverse_of = {s[0]: invert_letter(s[0]) for s in symbols}
    out = [((), IDENTITY_WORD, MobiusTransform.identity())]
    level = out[:]
    for _ in range(radius):
        nxt = []
        for syms, word, M in level:
            for name, piece, P in symbols:
                if syms and inverse_of[syms[-1]] == name:
                    continue
                nxt.append((syms + (name,), word * piece, M @ P))
        out.extend(nxt)
        level = nxt
    return [(word, M) for _, word, M in out]


@dataclass
class CoveringClass:
    kind: str
    radius: int
    witnesses: list = field(default_factory=list)
    reduced_pair: tuple = None
    commutator_trace: float = None
    axes_cross: bool = True

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "radius": self.radius,
            "witnesses": [w.to_dict() if w is not None else None for w in self.witnesses],
            "reduced_pair": [str(w) for w in self.reduced_pair] if self.reduced_pair else None,
            "commutator_trace": self.commutator_trace,
            "axes_cross": self.axes_cross,
        }


def commutator_trace(M1: MobiusTransform, M2: MobiusTransform) -> float:
    """tr[M1, M2]; no depende del signo de las matrices ni de la base del subgrupo."""
    K = M1 @ M2 @ M1.inverse() @ M2.inverse()
    return K.a + K.d


def _loops_cross(axis1: Geodesic, axis2: Geodesic, ball: list) -> bool:
    """Algún trasladado u·eje(w2), con u en la bola del subgrupo, cruza eje(w1)."""
    for word, M in ball:
        a, b = apply(M, axis2.a), apply(M, axis2.b)
        if not a.distinct_from(b):
            continue
        image = Geodesic(a, b)
        if not image.same_support(axis1, tol=1e-7) and boundary_interleave(axis1, image).crosses:
            return True
    return False


def classify_covering(G: SurfaceGroup, w1, w2, radius: int = DEFAULT_COVERING_RADIUS,
                      threads: int = 1) -> CoveringClass:
    """
    Clasifica el cubrimiento <w1, w2>\\H²: (i) reducción de Nielsen del par; (ii) prueba de
    simplicidad de cada wᵢ en el cubrimiento buscando u en la bola del subgrupo con u·eje(wᵢ)
    cruzando eje(wᵢ); (iii) ambos con testigo -> ThreePuncturedSphere; ejes cruzados, sin
    testigos y tr[w1, w2] < -2 -> PuncturedTorus; en otro caso Undetermined.

    Los lazos deben cruzarse en la superficie: si los ejes elegidos no se cruzan, se admite el
    par cuando algún trasladado de eje(w2) por el subgrupo (hasta SPLICE_RADIUS) cruza eje(w1),
    como en un lazo partido en una autointersección. La traza del conmutador certifica el tipo
    sin depender del radio: < -2 para el toro con una punción y > 2 para la esfera con tres
    punciones.
    """
    w1, w2 = G.check_word(w1), G.check_word(w2)
    axis1, _ = axis_of(G, w1)
    axis2, _ = axis_of(G, w2)
    if axis1.same_support(axis2, tol=1e-7):
        raise NotRankTwoError("Los ejes coinciden: potencias de un elemento común",
                              {"w1": str(w1), "w2": str(w2)})
    reduced = nielsen_reduce(w1, w2)
    if reduced.degenerate:
        raise NotRankTwoError("Par degenerado tras la reducción de Nielsen",
                              {"w1": str(w1), "w2": str(w2), "moves": reduced.moves})

    pair = (reduced.w1, reduced.w2)
    axes_cross = boundary_interleave(axis1, axis2).crosses
    if not axes_cross and not _loops_cross(axis1, axis2, subgroup_ball(G, pair, SPLICE_RADIUS)):
        raise PreconditionError("Los lazos w1 y w2 no se cruzan",
                                {"w1": str(w1), "w2": str(w2), "radius": SPLICE_RADIUS})
    trace = commutator_trace(G.evaluate(w1), G.evaluate(w2))
    ball = subgroup_ball(G, pair, radius)
    witnesses = [_search_translates(axis, ball, threads) for axis in (axis1, axis2)]
    if all(w is not None for w in witnesses):
        kind = "ThreePuncturedSphere"
        if trace < 2.0 + TRACE_TOL:
            logger.warning("Testigos de esfera con tres punciones con tr[w1, w2] = %.6f", trace)
    elif axes_cross and trace < -2.0 - TRACE_TOL and radius >= MIN_DECISION_RADIUS:
        kind = "PuncturedTorus"
    else:
        kind = "Undetermined"
        logger.warning("Cubrimiento indeterminado para (%s, %s) con radio %d (tr[w1, w2] = %.6f)",
                       w1, w2, radius, trace)
    logger.info("Cubrimiento de (%s, %s) a radio %d: %s", w1, w2, radius, kind)
    return CoveringClass(kind=kind, radius=radius, witnesses=witnesses, reduced_pair=pair,
                         commutator_trace=trace, axes_cross=axes_cross)


def crossing_orientation_sequence(G: Geodesic, T: MobiusTransform, p0: BoundaryPoint) -> bool:
    """Verdadero si (α, p0, T p0, β) es creciente en el orden cíclico antihorario."""
    p1 = apply(T, p0)
    alpha = G.a.angle
    arcs = [ccw_arc(alpha, x.angle) for x in (p0, p1, G.b)]
    return 0.0 < arcs[0] < arcs[1] < arcs[2]
