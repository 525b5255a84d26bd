"""
Module: surface_group.py

Descripción:
    Grupo fuchsiano de una superficie cerrada de género g uniformizada por el 4g-ágono regular
    centrado en 0 con ángulo interior 2π/4g. Incluye la aritmética de palabras (letras `a1`, `b1`
    y sus inversas `A1`, `B1`), la reducción al dominio fundamental con registro de la palabra
    de cubierta y las comparaciones métrica/grupo (cuasi-convexidad y Svarc-Milnor).

Funcionalidades:
    - build_surface_group(g): construye el grupo y verifica el relator y la suma de ángulos.
    - GroupWord, reduce(w), cyclic_reduce(w), is_primitive(w), abelianize / homology_class.
    - SurfaceGroup.evaluate(w), SurfaceGroup.locate(z), SurfaceGroup.ball(radius).
    - quasi_convexity_probe(G, samples), svarc_milnor_probe(G, radius), axis_of(G, w).
    - band_index(G, w, z): índice de banda respecto de los trasladados de la perpendicular al eje.

Ejemplo:
    >>> G = build_surface_group(2)
    >>> lp = G.locate(apply(G.evaluate(GroupWord.parse("a1")), 0j))
    >>> str(lp.word)
    'a1'
"""

import logging
import math
import re
from collections import Counter
from dataclasses import dataclass

import numpy as np

from geometry.base.errors import (
    BudgetExceededError,
    InvalidGenusError,
    InvalidWordError,
    NotHyperbolicError,
    NumericalEscapeError,
)
from geometry.base.hyperbolic_core import (
    Geodesic,
    MobiusTransform,
    apply,
    classify,
    distance_from_origin,
    fermi_coordinates,
    hyp_distance,
    segment_points,
    BoundaryPoint,
)

logger = logging.getLogger(__name__)

EPS_GROUP = 1e-8
LOCATE_TOL = 1e-12
MAX_BALL_WORDS = 1_000_000
MAX_LOCATED_WORD = 64

_LETTER_RE = re.compile(r"([abAB])(\d+)")


def invert_letter(letter: str) -> str:
    head = letter[0]
    return (head.upper() if head.islower() else head.lower()) + letter[1:]


@dataclass(frozen=True)
class GroupWord:
    """Palabra en los generadores; la palabra vacía es la identidad."""

    letters: tuple = ()

    @classmethod
    def parse(cls, text: str) -> "GroupWord":
        text = (text or "").strip()
        if text in ("", "e", "1"):
            return cls(())
        letters = tuple(m.group(0) for m in _LETTER_RE.finditer(text))
        if "".join(letters) != re.sub(r"[\s*·]", "", text):
            raise InvalidWordError(f"Palabra no válida: {text!r}", {"word": text})
        return cls(letters)

    @classmethod
    def coerce(cls, value) -> "GroupWord":
        if isinstance(value, GroupWord):
            return value
        if isinstance(value, str):
            return cls.parse(value)
        return cls(tuple(value))

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __str__(self):
        return " ".join(self.letters) if self.letters else "e"

    def __mul__(self, other: "GroupWord") -> "GroupWord":
        return reduce(GroupWord(self.letters + other.letters))

    def inverse(self) -> "GroupWord":
        return GroupWord(tuple(invert_letter(x) for x in reversed(self.letters)))

    def power(self, n: int) -> "GroupWord":
        base = self if n >= 0 else self.inverse()
        return reduce(GroupWord(base.letters * abs(n)))

    @property
    def is_reduced(self) -> bool:
        return all(invert_letter(x) != y for x, y in zip(self.letters, self.letters[1:]))

    @property
    def is_identity(self) -> bool:
        return not self.letters


IDENTITY_WORD = GroupWord(())


def reduce(w: GroupWord) -> GroupWord:
    """Reducción libre: elimina pares adyacentes x x⁻¹. Idempotente."""
    out = []
    for letter in w.letters:
        if out and out[-1] == invert_letter(letter):
            out.pop()
        else:
            out.append(letter)
    return GroupWord(tuple(out))


def cyclic_reduce(w: GroupWord) -> GroupWord:
    letters = list(reduce(w).letters)
    while len(letters) > 1 and letters[0] == invert_letter(letters[-1]):
        letters = letters[1:-1]
    return GroupWord(tuple(letters))


def is_primitive(w: GroupWord) -> bool:
    """Falso si la reducción cíclica de w es una potencia propia de una palabra más corta."""
    letters = cyclic_reduce(w).letters
    n = len(letters)
    if n == 0:
        return False
    for k in range(1, n):
        if n % k == 0 and letters == letters[:k] * (n // k):
            return False
    return True


def commutator(u: GroupWord, v: GroupWord) -> GroupWord:
    return u * v * u.inverse() * v.inverse()


def abelianize(w: GroupWord) -> Counter:
    """Conteo con signo de cada generador (`a1`, `b1`, ...)."""
    counts = Counter()
    for letter in w.letters:
        key = letter.lower()
        counts[key] += 1 if letter[0].islower() else -1
    return counts


def homology_class(w: GroupWord, genus: int) -> np.ndarray:
    """Clase en H1 = Z^{2g} con el orden (a1, b1, a2, b2, ...)."""
    counts = abelianize(w)
    vec = np.zeros(2 * genus, dtype=np.int64)
    for j in range(genus):
        vec[2 * j] = counts.get(f"a{j + 1}", 0)
        vec[2 * j + 1] = counts.get(f"b{j + 1}", 0)
    return vec


@dataclass(frozen=True)
class LocatedPoint:
    """Punto del disco guardado como palabra de cubierta + representante en el dominio fundamental."""

    word: GroupWord
    rep: complex

    def to_dict(self) -> dict:
        return {"word": str(self.word), "rep": [self.rep.real, self.rep.imag]}


@dataclass(frozen=True)
class FundamentalDomain:
    sides: tuple
    pairing: dict
    side_letters: tuple
    basepoint: complex = 0j


class SurfaceGroup:
    """
    Grupo de la superficie de género g. El lado k del polígono tiene su punto medio en la dirección
    2πk/4g y la letra `side_letters[k]` lleva el polígono P al vecino a través del lado k.
    """

    def __init__(self, genus: int):
        if not isinstance(genus, (int, np.integer)) or genus < 2:
            raise InvalidGenusError("El género debe ser un entero >= 2", {"genus": genus})
        self.genus = int(genus)
        self.n_sides = 4 * self.genus
        n = self.n_sides
        self.vertex_angle = 2.0 * math.pi / n
        self.inradius = math.acosh(1.0 / math.tan(math.pi / n))
        self.circumradius = math.acosh(1.0 / math.tan(math.pi / n) ** 2)
        self.side_directions = tuple(2.0 * math.pi * k / n for k in range(n))

        alphabet = []
        side_letters = []
        pairing = {}
        for j in range(self.genus):
            idx = j + 1
            alphabet += [f"a{idx}", f"b{idx}", f"A{idx}", f"B{idx}"]
            side_letters += [f"a{idx}", f"B{idx}", f"A{idx}", f"b{idx}"]
            base = 4 * j
            pairing.update({base: base + 2, base + 2: base, base + 1: base + 3, base + 3: base + 1})
        self.alphabet = tuple(alphabet)
        self.letter_rank = {x: i for i, x in enumerate(self.alphabet)}
        self.side_letters = tuple(side_letters)
        self.side_of_letter = {x: k for k, x in enumerate(self.side_letters)}
        self.pairing = pairing

        self.generators = {}
        for k in range(n):
            phi_k = self.side_directions[k]
            phi_s = self.side_directions[pairing[k]]
            g_k = (MobiusTransform.rotation(phi_k)
                   @ MobiusTransform.translation(2.0 * self.inradius)
                   @ MobiusTransform.rotation(math.pi - phi_s))
            self.generators[self.side_letters[k]] = g_k
        self.inverses = {x: m.inverse() for x, m in self.generators.items()}

        self.relator = GroupWord(tuple(
            x for j in range(self.genus) for x in (f"a{j + 1}", f"b{j + 1}", f"A{j + 1}", f"B{j + 1}")
        ))
        self.min_translation_length = min(classify(m).length for m in self.generators.values())
        self._side_cos = np.cos(np.array(self.side_directions))
        self._side_sin = np.sin(np.array(self.side_directions))

        residual = self.relator_residual()
        if residual > EPS_GROUP:
            logger.warning("Residuo del relator %.3e supera la tolerancia", residual)
        logger.info("Grupo de superficie construido: género=%d, residuo del relator=%.3e", self.genus, residual)

    # -- palabras ------------------------------------------------------------

    def check_word(self, w) -> GroupWord:
        w = GroupWord.coerce(w)
        bad = [x for x in w.letters if x not in self.letter_rank]
        if bad:
            raise InvalidWordError(f"Letras no válidas para género {self.genus}: {bad}",
                                   {"word": str(w), "letters": bad})
        return w

    def shortlex_key(self, w: GroupWord) -> tuple:
        return (len(w), tuple(self.letter_rank[x] for x in w.letters))

    def evaluate(self, w) -> MobiusTransform:
        w = GroupWord.coerce(w)
        M = MobiusTransform.identity()
        try:
            for letter in w.letters:
                M = M @ self.generators[letter]
        except KeyError:
            self.check_word(w)
            raise
        return M

    def ball_size(self, radius: int) -> int:
        n = len(self.alphabet)
        return 1 + sum(n * (n - 1) ** (k - 1) for k in range(1, radius + 1))

    def ball(self, radius: int, letters=None) -> list:
        """
        Palabras reducidas de longitud <= radius en orden shortlex, con su evaluación.
        `letters` restringe el alfabeto (por ejemplo a los generadores de un subgrupo).
        """
        alphabet = tuple(letters) if letters is not None else self.alphabet
        n = len(alphabet)
        size = 1 + sum(n * max(n - 1, 1) ** (k - 1) for k in range(1, radius + 1))
        if size > MAX_BALL_WORDS:
            raise BudgetExceededError("Bola de palabras demasiado grande",
                                      {"radius": radius, "size": size, "max": MAX_BALL_WORDS})
        out = [(IDENTITY_WORD, MobiusTransform.identity())]
        level = out[:]
        for _ in range(radius):
            nxt = []
            for word, M in level:
                last = word.letters[-1] if word.letters else None
                for x in alphabet:
                    if last is not None and x == invert_letter(last):
                        continue
                    nxt.append((GroupWord(word.letters + (x,)), M @ self.generators[x]))
            out.extend(nxt)
            level = nxt
        return out

    def words(self, radius: int) -> list:
        return [w for w, _ in self.ball(radius)]

    # -- dominio fundamental -------------------------------------------------

    def _side_excess(self, z: complex) -> np.ndarray:
        """Distancia con signo más allá de cada lado (positiva fuera del polígono)."""
        # coordenada t a lo largo del diámetro de cada lado
        w = z * (self._side_cos - 1j * self._side_sin)
        t = np.log(np.abs(1.0 + w) / np.abs(1.0 - w))
        return t - self.inradius

    def contains(self, z: complex, tol: float = LOCATE_TOL) -> bool:
        return bool(np.all(self._side_excess(complex(z)) <= tol))

    def locate(self, z: complex) -> LocatedPoint:
        """
        Descenso voraz por pares de lados: mientras z esté fuera de P se aplica la inversa del
        generador del lado más violado (empates por la letra shortlex menor).
        """
        z = complex(z)
        budget = int(10 * (1 + distance_from_origin(z) / self.min_translation_length))
        letters = []
        for _ in range(budget + 1):
            excess = self._side_excess(z)
            worst = float(np.max(excess))
            if worst <= LOCATE_TOL:
                word = reduce(GroupWord(tuple(letters)))
                if len(word) > MAX_LOCATED_WORD:
                    logger.debug("Palabra localizada de longitud %d", len(word))
                return LocatedPoint(word, z)
            ties = [k for k in range(self.n_sides) if excess[k] >= worst - LOCATE_TOL]
            k = min(ties, key=lambda s: self.letter_rank[self.side_letters[s]])
            letter = self.side_letters[k]
            z = apply(self.inverses[letter], z)
            letters.append(letter)
        raise NumericalEscapeError("locate no terminó dentro del presupuesto",
                                   {"budget": budget, "z": [z.real, z.imag]})

    def reconstruct(self, lp: LocatedPoint) -> complex:
        return apply(self.evaluate(lp.word), lp.rep)

    def reanchor(self, point: LocatedPoint, z_local: complex) -> LocatedPoint:
        """
        Re-expresa el punto point.word·z_local, con z_local cerca de P, sin reconstruirlo: solo se
        localiza z_local y la palabra se extiende por la derecha. Vale para palabras de cualquier
        longitud (las coordenadas del disco dejan de servir mucho antes de MAX_LOCATED_WORD).
        """
        located = self.locate(z_local)
        return LocatedPoint(point.word * located.word, located.rep)

    def vertices(self) -> list:
        n = self.n_sides
        r = math.tanh(0.5 * self.circumradius)
        return [r * complex(math.cos(2.0 * math.pi * (k + 0.5) / n), math.sin(2.0 * math.pi * (k + 0.5) / n))
                for k in range(n)]

    def sides(self) -> list:
        """Lado k como geodésica, orientada en sentido antihorario."""
        n = self.n_sides
        half = math.acos(math.tanh(self.inradius))
        return [Geodesic(BoundaryPoint(self.side_directions[k] - half), BoundaryPoint(self.side_directions[k] + half))
                for k in range(n)]

    @property
    def fundamental_domain(self) -> FundamentalDomain:
        return FundamentalDomain(sides=tuple(self.sides()), pairing=dict(self.pairing),
                                 side_letters=self.side_letters)

    def relator_residual(self) -> float:
        return self.evaluate(self.relator).distance_to_identity()

    def angle_sum(self) -> float:
        """Suma de ángulos del polígono a partir de su geometría (ley de cosenos hiperbólica)."""
        n = self.n_sides
        # triángulo rectángulo (centro, punto medio del lado, vértice): cos β = cosh(d) sen(π/n)
        half_angle = math.acos(min(1.0, math.cosh(self.inradius) * math.sin(math.pi / n)))
        return n * 2.0 * half_angle

    def random_points(self, count: int, seed: int = 0) -> list:
        """Puntos uniformes (en coordenadas euclídeas) dentro de P."""
        rng = np.random.default_rng(seed)
        r_max = math.tanh(0.5 * self.circumradius)
        out = []
        while len(out) < count:
            z = complex(*rng.uniform(-r_max, r_max, size=2))
            if abs(z) < r_max and self.contains(z):
                out.append(z)
        return out


def build_surface_group(g: int) -> SurfaceGroup:
    return SurfaceGroup(g)


def axis_of(G: SurfaceGroup, w) -> tuple:
    """Eje orientado (repulsor -> atractor) y longitud de traslación de evaluate(w)."""
    w = GroupWord.coerce(w)
    cls = classify(G.evaluate(w))
    if not cls.is_hyperbolic:
        raise NotHyperbolicError("La palabra no evalúa a una isometría hiperbólica",
                                 {"word": str(w), "kind": cls.kind})
    return cls.axis, cls.length


def band_index(z: complex, axis: Geodesic, length: float) -> int:
    """Número con signo de trasladados de la perpendicular L (en t = 0) que separan z de L."""
    _, t = fermi_coordinates(z, axis)
    return math.floor(t / length)


def svarc_milnor_probe(G: SurfaceGroup, radius: int) -> float:
    """máx sobre palabras no triviales T de máx(l(T)/d(0,T0), d(0,T0)/l(T))."""
    if radius < 1:
        raise ValueError("radius debe ser >= 1")
    c_hat = 1.0
    for w, M in G.ball(radius)[1:]:
        d = distance_from_origin(apply(M, 0j))
        if d < 1e-9:
            continue
        c_hat = max(c_hat, len(w) / d, d / len(w))
    logger.info("Svarc-Milnor: radio=%d, C_hat=%.6f", radius, c_hat)
    return c_hat


class DeformedDomain:
    """
    Dominio fundamental no convexo: a P se le quita la media bola S = {x en P : d(x, m_k) < radius}
    centrada en el punto medio m_k del lado k, y se agrega g_k⁻¹(S) al otro lado del lado
    emparejado. El hueco deja un borde cóncavo, así que la constante de cuasi-convexidad es > 0.
    """

    def __init__(self, group: SurfaceGroup, side: int = 0, radius: float = 0.8):
        if not 0.0 < radius < group.inradius:
            raise ValueError(f"radius debe estar en (0, {group.inradius:.6f})")
        self.group = group
        self.side = side
        self.radius = radius
        self.letter = group.side_letters[side]
        self.back = group.generators[self.letter].inverse()
        direction = complex(group._side_cos[side], group._side_sin[side])
        self.midpoint = math.tanh(0.5 * group.inradius) * direction

    def _in_dent(self, rep: complex) -> bool:
        return hyp_distance(rep, self.midpoint) < self.radius

    def contains(self, z: complex) -> bool:
        lp = self.group.locate(z)
        if lp.word.is_identity:
            return not self._in_dent(lp.rep)
        if lp.word == GroupWord((invert_letter(self.letter),)):
            return self._in_dent(lp.rep)
        return False

    def fold(self, rep: complex) -> complex:
        """Lleva un punto de P a su representante en este dominio."""
        if self._in_dent(rep):
            return apply(self.back, rep)
        return rep

    def cloud(self, count: int = 6000, seed: int = 0) -> np.ndarray:
        return np.array([self.fold(z) for z in self.group.random_points(count, seed)])


def _distance_to_cloud(z: complex, cloud: np.ndarray) -> float:
    num = np.abs(cloud - z)
    den = np.abs(1.0 - np.conj(z) * cloud)
    return float(2.0 * np.arctanh(np.min(num / den)))


def quasi_convexity_probe(G: SurfaceGroup, samples: int, domain: DeformedDomain = None,
                          seed: int = 0, segment_resolution: int = 32) -> tuple:
    """
    R_hat empírico: máximo de d(x, D) para x en segmentos [p, q] con p, q en D. El par i se
    sortea con la semilla (seed, i), de modo que R_hat no decrece con `samples`.
    Retorna (R_hat, testigo) con el testigo {p, q, x} o None.
    """
    if samples < 1:
        raise ValueError("samples debe ser >= 1")
    contains = domain.contains if domain is not None else (lambda z: G.locate(z).word.is_identity)
    cloud = domain.cloud(seed=seed) if domain is not None else None
    r_max = math.tanh(0.5 * G.circumradius)

    def draw(rng):
        while True:
            z = complex(*rng.uniform(-r_max, r_max, size=2))
            if abs(z) < r_max and G.contains(z):
                return domain.fold(z) if domain is not None else z

    r_hat, witness = 0.0, None
    for i in range(samples):
        rng = np.random.default_rng([seed, i])
        p, q = draw(rng), draw(rng)
        for x in segment_points(p, q, segment_resolution):
            if contains(x):
                continue
            d = _distance_to_cloud(x, cloud) if cloud is not None else min(
                hyp_distance(x, y) for y in (p, q))
            if d > r_hat:
                r_hat, witness = d, {"p": p, "q": q, "x": x}
    logger.info("Cuasi-convexidad: muestras=%d, R_hat=%.6f", samples, r_hat)
    return r_hat, witness
