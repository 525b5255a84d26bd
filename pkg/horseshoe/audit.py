"""
Module: audit.py

Descripción:
    Herraduras rotacionales: un rectángulo R (en el disco o en un modelo plano) y k transformaciones
    de cubierta U_1, ..., U_k tales que f̃(R) ∩ U_i R es markoviana para cada i. Cada intersección
    se certifica en la forma equivalente g_i(R) ∩ R con g_i = U_i⁻¹ ∘ f̃ (el mismo rectángulo R2
    y la misma carta para todas las patas).

Funcionalidades:
    - group_deck / translation_deck: acciones de cubierta con su inversa.
    - build_horseshoe_certificate(R, f, decks): certificados por pata.
    - itinerary_deck_word(cert, word): producto U_{w_1}·...·U_{w_q} en orden de visita.
    - horseshoe_audit(S, cert, word, n): puntos periódicos por itinerario, sombreado de un itinerario
      arbitrario (hasta shadow_steps pasos, acotado por diam(R)) y conteo simbólico. Los fallos se
      registran como hallazgos, no se lanzan.
    - affine_horseshoe_model(...): modelo lineal de referencia (silla en el cuadrado unidad).
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares
from scipy.sparse import lil_matrix

from geometry.base.errors import PreconditionError, RotLabError
from geometry.base.hyperbolic_core import apply, hyp_distance
from geometry.surface_group import IDENTITY_WORD, GroupWord, SurfaceGroup
from dynamics.base.lifted_system import LiftedSystem
from horseshoe.markov import MarkovCertificate, chain, fixed_point_search, image_certificate
from horseshoe.rectangles import MarkedRectangle
from horseshoe.shift import SymbolicShift, entropy_estimate, separated_set_count
from rotation.audits import AuditReport
from utils.config.settings import resolve_threads

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = {
    "tolerance": 1e-5,
    "shadow_steps": 100,
    "shadow_seed": 0,
    "entropy_n": 16,
    "refine": 1,
    "threads": None,
}


@dataclass
class DeckAction:
    word: GroupWord
    forward: object
    inverse: object

    def __call__(self, z: complex) -> complex:
        return self.forward(z)


def group_deck(G: SurfaceGroup, word) -> DeckAction:
    w = G.check_word(word)
    M = G.evaluate(w)
    M_inv = M.inverse()
    return DeckAction(w, lambda z: apply(M, z), lambda z: apply(M_inv, z))


def translation_deck(word, shift: complex) -> DeckAction:
    """Traslación euclídea etiquetada con una palabra (modelos planos de prueba)."""
    shift = complex(shift)
    return DeckAction(GroupWord.coerce(word), lambda z: z + shift, lambda z: z - shift)


@dataclass
class HorseshoeCertificate:
    R: MarkedRectangle
    decks: list
    certificates: list
    metric: str = "hyperbolic"
    legs: list = field(default_factory=list, repr=False)

    @property
    def k(self) -> int:
        return len(self.decks)

    @property
    def words(self) -> list:
        return [d.word for d in self.decks]

    def distance(self, z: complex, w: complex) -> float:
        if self.metric == "hyperbolic":
            return hyp_distance(z, w)
        return abs(z - w)

    @property
    def diameter(self) -> float:
        return self.R.diameter(self.metric)

    def to_dict(self) -> dict:
        return {
            "R": self.R.to_dict(),
            "decks": [str(w) for w in self.words],
            "metric": self.metric,
            "certificates": [c.to_dict() for c in self.certificates],
        }


def _as_map(S):
    if isinstance(S, LiftedSystem):
        return S.raw_step
    if callable(S):
        return S
    raise TypeError(f"Se esperaba un LiftedSystem o un mapa, no {type(S).__name__}")


def _leg(f, deck: DeckAction):
    return lambda z: deck.inverse(f(z))


def build_horseshoe_certificate(R: MarkedRectangle, S, decks, metric: str = "hyperbolic") -> HorseshoeCertificate:
    """
    Certifica f̃(R) ∩ U_i R para cada cubierta. Las palabras deben ser reducidas y distintas
    dos a dos; una pata no markoviana lanza PreconditionError.
    """
    f = _as_map(S)
    words = [d.word for d in decks]
    if not decks:
        raise PreconditionError("Una herradura necesita al menos una transformación de cubierta")
    if any(not w.is_reduced for w in words) or len(set(words)) != len(words):
        raise PreconditionError("Las cubiertas deben ser palabras reducidas y distintas",
                                {"decks": [str(w) for w in words]})
    legs, certificates = [], []
    for index, deck in enumerate(decks, start=1):
        leg = _leg(f, deck)
        cert = image_certificate(R, leg, R)
        if cert is None:
            raise PreconditionError(f"f(R) ∩ U_{index} R no es markoviana", {"deck": str(deck.word)})
        legs.append(leg)
        certificates.append(cert)
    logger.info("Herradura certificada con %d cubiertas: %s", len(decks), ", ".join(map(str, words)))
    return HorseshoeCertificate(R=R, decks=list(decks), certificates=certificates, metric=metric, legs=legs)


def itinerary_deck_word(cert: HorseshoeCertificate, word) -> GroupWord:
    """Producto reducido U_{w_1}·U_{w_2}·...·U_{w_q} (símbolos en 1..k)."""
    product = IDENTITY_WORD
    for symbol in word:
        product = product * cert.decks[symbol - 1].word
    return product


def _deck_product(cert: HorseshoeCertificate, word):
    def product(z):
        for symbol in reversed(word):
            z = cert.decks[symbol - 1].forward(z)
        return z
    return product


def _composite(cert: HorseshoeCertificate, word):
    def composite(z):
        for symbol in word:
            z = cert.legs[symbol - 1](z)
        return z
    return composite


class HorseshoeAuditor:
    def __init__(self, S, cert: HorseshoeCertificate, config: dict = None):
        conf = DEFAULT_CONFIG.copy()
        if config:
            conf.update(config)
        self.system = S
        self.f = _as_map(S)
        self.equivariant = isinstance(S, LiftedSystem)
        self.cert = cert
        self.tolerance = conf["tolerance"]
        self.shadow_steps = conf["shadow_steps"]
        self.shadow_seed = conf["shadow_seed"]
        self.entropy_n = conf["entropy_n"]
        self.refine = conf["refine"]
        self.threads = resolve_threads(conf["threads"])
        self.shift = SymbolicShift(cert.k)
        self.report = AuditReport("horseshoe")

    def _chained(self, word) -> MarkovCertificate:
        current = self.cert.certificates[word[0] - 1]
        for symbol in word[1:]:
            current = chain(current, self.cert.certificates[symbol - 1], self.cert.legs[symbol - 1],
                            refine=self.refine)
        return current

    def _periodic(self, word) -> dict:
        """Punto z de R con g_{w_q}∘...∘g_{w_1}(z) = z, y la órbita intermedia."""
        label = "".join(map(str, word))
        entry = {"word": label, "deck_word": str(itinerary_deck_word(self.cert, word))}
        try:
            self._chained(word)
            fixed = fixed_point_search(self.cert.R, _composite(self.cert, word), check_precondition=False)
        except RotLabError as exc:
            entry["error"] = {"type": type(exc).__name__, **exc.to_dict()}
            return entry
        if not fixed.found:
            entry["error"] = {"type": "BudgetExceeded", "residual": fixed.to_dict()["residual"]}
            return entry
        z = fixed.point
        orbit = [z]
        for symbol in word:
            orbit.append(self.cert.legs[symbol - 1](orbit[-1]))
        entry.update({
            "point": [z.real, z.imag],
            "closure": self.cert.distance(orbit[-1], z),
            "orbit": orbit[:-1],
            "inside": bool(all(self.cert.R.contains(orbit[:-1]))),
        })
        if self.equivariant:
            w = z
            for _ in word:
                w = self.f(w)
            entry["lift_residual"] = self.cert.distance(w, _deck_product(self.cert, word)(z))
        return entry

    def _record_periodic(self, entry: dict):
        label = entry["word"]
        if "error" in entry:
            self.report._add_finding(label, f"Búsqueda de punto periódico fallida: {entry['error']['type']}",
                                     "error", detail=entry["error"])
            return
        if entry["closure"] > self.tolerance:
            self.report._add_finding(label, f"Órbita no cerrada: {entry['closure']:.3e}", "error")
        if entry.get("lift_residual", 0.0) > self.tolerance:
            self.report._add_finding(label, f"f̃^q(z) difiere de U·z en {entry['lift_residual']:.3e}", "error")
        if not entry["inside"]:
            self.report._add_finding(label, "La órbita sale de R", "error")

    def _itinerary(self, word) -> tuple:
        """Itinerario de sombreado: la palabra dada (recortada a shadow_steps) o una aleatoria no periódica."""
        if word:
            itinerary = tuple(int(s) for s in word)
            if len(itinerary) > self.shadow_steps:
                logger.warning("Itinerario de %d símbolos recortado a %d pasos", len(itinerary), self.shadow_steps)
                itinerary = itinerary[:self.shadow_steps]
            return itinerary
        rng = np.random.default_rng(self.shadow_seed)
        return tuple(int(s) for s in rng.integers(1, self.cert.k + 1, size=self.shadow_steps))

    def _shadow_orbit(self, itinerary, anchors: dict) -> np.ndarray:
        """
        Órbita z_0, ..., z_L con U_{w_i}⁻¹ f̃(z_{i-1}) = z_i. Se parte de la pseudo-órbita formada por
        los puntos fijos de cada pata y se corrige con mínimos cuadrados (jacobiano en banda).
        """
        decks = [self.cert.decks[s - 1] for s in itinerary]
        steps = len(itinerary)

        def residual(v):
            z = v[0::2] + 1j * v[1::2]
            r = np.array([decks[i].inverse(self.f(z[i])) - z[i + 1] for i in range(steps)], dtype=complex)
            return np.column_stack([r.real, r.imag]).ravel()

        sparsity = lil_matrix((2 * steps, 2 * (steps + 1)), dtype=int)
        for i in range(steps):
            sparsity[2 * i:2 * i + 2, 2 * i:2 * i + 4] = 1
        guess = np.array([anchors[itinerary[0]]] + [anchors[s] for s in itinerary], dtype=complex)
        fit = least_squares(residual, np.column_stack([guess.real, guess.imag]).ravel(),
                            jac_sparsity=sparsity, method="trf", xtol=1e-12, ftol=1e-12, gtol=1e-12)
        return fit.x[0::2] + 1j * fit.x[1::2]

    def _shadowing(self, itinerary) -> dict:
        """
        Sombreado de un itinerario arbitrario: por equivarianza f̃^i(z_0) = U_{w_1}...U_{w_i} z_i, así que
        la distancia a U_{w_1}...U_{w_i} z_0 es d(z_i, z_0). Cada paso se valida con el mapa f̃ real y
        con el anidamiento z_i ∈ R; `checked` cuenta los pasos validados consecutivos.
        """
        diameter = self.cert.diameter
        label = "".join(map(str, itinerary))
        summary = {"word": label, "steps": len(itinerary), "checked": 0, "diameter": diameter}
        anchors = {}
        for symbol in sorted(set(itinerary)):
            entry = self._periodic((symbol,))
            if "error" in entry:
                self.report._add_finding(label, f"Sin punto fijo para la pata {symbol}", "error")
                return summary
            anchors[symbol] = complex(*entry["point"])
        try:
            orbit = self._shadow_orbit(itinerary, anchors)
        except (RotLabError, ValueError, FloatingPointError) as exc:
            self.report._add_finding(label, f"Sombreado no resuelto: {exc}", "error")
            return summary

        inside = self.cert.R.contains(orbit)
        gaps = [self.cert.distance(self.f(orbit[i]), self.cert.decks[s - 1].forward(orbit[i + 1]))
                for i, s in enumerate(itinerary)]
        checked = 0
        if inside[0]:
            for gap, ok in zip(gaps, inside[1:]):
                if gap > self.tolerance or not ok:
                    break
                checked += 1
        distances = [self.cert.distance(z, orbit[0]) for z in orbit[:checked + 1]]
        worst = max(distances)
        if checked < len(itinerary):
            self.report._add_finding(label, f"Sombreado interrumpido en el paso {checked + 1} de {len(itinerary)}",
                                     "error", detail={"residual": float(max(gaps)), "inside": bool(all(inside))})
        if worst > diameter + self.tolerance:
            self.report._add_finding(label, f"Sombreado {worst:.6f} > diam(R) = {diameter:.6f}", "error")
        logger.debug("Sombreado: %d/%d pasos, distancia máxima %.6f", checked, len(itinerary), worst)
        summary.update({"checked": checked, "residual": float(max(gaps)), "max_distance": worst})
        return summary

    def run(self, word=None, n: int = 6) -> dict:
        words = [tuple(w) for w in self.shift.periodic_words(n)]
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            entries = list(pool.map(self._periodic, words))
        for entry in entries:
            self._record_periodic(entry)
        found = sum(1 for e in entries if "error" not in e)

        if word and any(s < 1 or s > self.cert.k for s in word):
            raise PreconditionError("Símbolos fuera de 1..k", {"word": list(word), "k": self.cert.k})
        shadowing = self._shadowing(self._itinerary(word))

        count = separated_set_count(self.cert.k, self.entropy_n)
        estimate = min(entropy_estimate(self.cert.k, self.entropy_n), self.shift.entropy())
        self.report.details = {
            "k": self.cert.k,
            "decks": [str(w) for w in self.cert.words],
            "metric": self.cert.metric,
            "max_period": n,
            "periodic": {
                "words": len(entries),
                "found": found,
                "points": [{key: e[key] for key in e if key != "orbit"} for e in entries],
            },
            "shadowing": shadowing,
            "symbolic": {
                "n": self.entropy_n,
                "separated_set": str(count),
                "entropy_estimate": estimate,
                "entropy": self.shift.entropy(),
            },
        }
        logger.info("Auditoría de herradura: %d/%d itinerarios periódicos, entropía %.6f, %d hallazgos",
                    found, len(entries), estimate, len(self.report.findings))
        return self.report.to_dict()


def horseshoe_audit(S, cert: HorseshoeCertificate, word=None, n: int = 6, config: dict = None) -> dict:
    return HorseshoeAuditor(S, cert, config).run(word, n)


def affine_horseshoe_model(contraction: float = 0.25, expansion: float = 5.0, shifts=(-1.5, 1.5),
                           words=("a1", "b1"), per_side: int = 8):
    """
    Silla afín que fija el centro del cuadrado unidad: contrae x y expande y. Devuelve (f, R, decks)
    con cubiertas traslaciones verticales.
    """
    if len(shifts) != len(words):
        raise ValueError("Se necesita una palabra por traslación")

    def f(z: complex) -> complex:
        z = complex(z)
        x = 0.5 + contraction * (z.real - 0.5)
        y = 0.5 + expansion * (z.imag - 0.5)
        return complex(x, y)

    R = MarkedRectangle.box(0.0, 1.0, 0.0, 1.0, per_side=per_side)
    decks = [translation_deck(w, complex(0.0, s)) for w, s in zip(words, shifts)]
    return f, R, decks


__all__ = [
    "DeckAction",
    "HorseshoeAuditor",
    "HorseshoeCertificate",
    "affine_horseshoe_model",
    "build_horseshoe_certificate",
    "group_deck",
    "horseshoe_audit",
    "itinerary_deck_word",
    "translation_deck",
]
