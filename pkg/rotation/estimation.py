"""
Module: estimation.py

Descripción:
    Estimación numérica de vectores de rotación de un levantamiento f̃: velocidad proyectada
    sobre una geodésica (α, β), velocidades direccionales vía el cociente anular por un
    elemento T, vectores homológicos y el barrido del conjunto de rotación sobre una bola de
    palabras.

    Los extremos de una órbita nunca se reconstruyen en coordenadas del disco. Cuando G es el
    eje de un elemento de cubierta T, la proyección se lee a nivel de grupo: g = T^m·W con W
    corto y t = m·ℓ(T) + t(W·x), y las bandas cruzadas se cuentan paso a paso. Sin T se usa un
    marco re-centrado tras cada salto, válido para órbitas cortas. La dirección hacia adelante
    y la distancia recorrida salen del producto escalado de las matrices SU(1,1) de los saltos.

Funcionalidades:
    - rotation_sample(traj, G, deck): muestra (x0, n, v) con v = d(π_G(x0), π_G(f̃ⁿx0)) / n.
    - annulus_rotation_number(S, T, seeds, n): intervalo de velocidades por índice de banda.
    - annulus_sandwich(salto, D, ℓ): cota ⌊D/ℓ⌋ <= salto <= ⌈D/ℓ⌉.
    - homological_vector(traj): clase de homología de g_n dividida por n.
    - scan_rotation_set(S, radius, seeds, n): RotationSetEstimate agrupado por ejes.
    - direction_set, metric_rescale, realisation_distance_check.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from geometry.base.errors import BudgetExceededError, PreconditionError
from geometry.base.hyperbolic_core import (
    BoundaryPoint,
    Geodesic,
    MobiusTransform,
    _apply_complex,
    _diameter_fermi,
    circular_distance,
    classify,
    from_fermi,
    geodesic_distance,
    geodesic_frame,
)
from geometry.surface_group import GroupWord, LocatedPoint, SurfaceGroup, axis_of, homology_class
from dynamics.base.lifted_system import LiftedSystem
from dynamics.trajectory import LiftedTrajectory, iterate
from utils.config.settings import resolve_threads

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = {
    "bin_angle": 0.05,
    "bind_reach": None,
    "speed_tol": 1e-3,
    "raw_cluster_angle": 1e-3,
    "threads": None,
}

SANDWICH_TOL = 1e-9
PEEL_BUDGET = 10_000


# -- seguimiento de extremos ---------------------------------------------------

def _track_fermi(group: SurfaceGroup, traj: LiftedTrajectory, G: Geodesic) -> tuple:
    """(s0, t0, s_n, t_n): coordenadas de Fermi respecto de G del inicio y del final de traj."""
    cache = {}
    F = geodesic_frame(G) @ group.evaluate(traj.start.word)
    s0, t0 = _diameter_fermi(_apply_complex(F, traj.start.rep))
    F = MobiusTransform.translation(-t0) @ F
    s, tau = s0, t0
    for hop, rep in zip(traj.hops, traj.reps):
        if hop not in cache:
            cache[hop] = group.evaluate(hop)
        F = F @ cache[hop]
        s, t = _diameter_fermi(_apply_complex(F, rep))
        tau += t
        F = MobiusTransform.translation(-t) @ F
    return s0, t0, s, tau


class _AxisPeeler:
    """
    Coordenadas de Fermi respecto del eje G de un elemento de cubierta T, leídas a nivel de
    grupo: un elemento g se escribe T^m·W con W corto (canónico) y t(g·x) = m·ℓ + t(W·x).
    """

    def __init__(self, group: SurfaceGroup, G: Geodesic, deck):
        T = group.check_word(deck)
        axis, length = axis_of(group, T)
        if axis.same_as(G.reversed()):
            T = T.inverse()
        elif not axis.same_as(G):
            raise PreconditionError("La geodésica no es el eje del elemento de cubierta",
                                    {"deck": str(T), "geodesic": G.to_dict()})
        self.group = group
        self.forward, self.backward = T, T.inverse()
        self.length = length
        self.N = geodesic_frame(G)
        self._cache = {}

    def _frame(self, W: GroupWord) -> MobiusTransform:
        if W not in self._cache:
            self._cache[W] = self.N @ self.group.evaluate(W)
        return self._cache[W]

    def fermi(self, W: GroupWord, rep: complex) -> tuple:
        return _diameter_fermi(_apply_complex(self._frame(W), rep))

    def canonical(self, W: GroupWord) -> GroupWord:
        return self.group.locate(_apply_complex(self.group.evaluate(W), 0j)).word

    def settle(self, W: GroupWord) -> tuple:
        """(W', k) con W = T^k·W' y el centro W'(0) a |t| <= ℓ/2."""
        W, k = self.canonical(W), 0
        half = 0.5 * self.length
        for _ in range(PEEL_BUDGET):
            _, t = self.fermi(W, 0j)
            if t > half:
                W, k = self.canonical(self.backward * W), k + 1
            elif t < -half:
                W, k = self.canonical(self.forward * W), k - 1
            else:
                return W, k
        raise BudgetExceededError("El pelado por el eje no terminó", {"word_length": len(W)})


def _peel_track(group: SurfaceGroup, traj: LiftedTrajectory, G: Geodesic, deck) -> tuple:
    """
    (s0, t0, s_n, t_n, saltos): extremos en coordenadas de Fermi respecto del eje de `deck` y
    el número neto de bandas cruzadas, contado paso a paso en el marco local de cada salto.
    """
    peeler = _AxisPeeler(group, G, deck)
    L = peeler.length
    W, m = peeler.settle(traj.start.word)
    s0, t_local = peeler.fermi(W, traj.start.rep)
    t0 = m * L + t_local
    s, rep, jump = s0, traj.start.rep, 0
    for hop, nxt in zip(traj.hops, traj.reps):
        _, ta = peeler.fermi(W, rep)
        W = W * hop
        s, tb = peeler.fermi(W, nxt)
        jump += math.floor(tb / L) - math.floor(ta / L)
        W, k = peeler.settle(W)
        m += k
        rep = nxt
    s, t_local = peeler.fermi(W, rep)
    return s0, t0, s, m * L + t_local, jump


def _disk_array(M: MobiusTransform) -> np.ndarray:
    return np.array([[M.A, M.B], [M.B.conjugate(), M.A.conjugate()]], dtype=complex)


def _forward_view(group: SurfaceGroup, traj: LiftedTrajectory) -> tuple:
    """
    (x0, E0, z, d): E0 lleva x0 al origen, z = E0(f̃ⁿx0) y d = d(x0, f̃ⁿx0).

    El producto se escala en cada salto y se acumula el logaritmo de la escala, de modo que d
    sale de 1 - |z|² = (1 - |rep|²) / |B̄·rep + Ā|² sin reconstruir puntos cerca del borde.
    """
    x0 = group.reconstruct(traj.start)
    E0 = MobiusTransform.to_origin(x0)
    P = _disk_array(E0 @ group.evaluate(traj.start.word))
    log_scale = 0.0
    cache = {}
    for hop in traj.hops:
        if hop.is_identity:
            continue
        if hop not in cache:
            cache[hop] = _disk_array(group.evaluate(hop))
        P = P @ cache[hop]
        peak = np.max(np.abs(P))
        P /= peak
        log_scale += math.log(peak)
    rep = traj.reps[-1] if traj.reps else traj.start.rep
    z = complex((P[0, 0] * rep + P[0, 1]) / (P[1, 0] * rep + P[1, 1]))
    log_denominator = log_scale + math.log(abs(P[1, 0] * rep + P[1, 1]))
    distance = 2.0 * math.log1p(min(abs(z), 1.0)) - math.log1p(-abs(rep) ** 2) + 2.0 * log_denominator
    return x0, E0, z, max(distance, 0.0)


# -- tipos ---------------------------------------------------------------------

@dataclass
class RotationSample:
    start: LocatedPoint
    n: int
    end: LocatedPoint
    direction: Geodesic
    speed: float
    endpoints_estimate: tuple = None
    displacement: float = 0.0
    offsets: tuple = (0.0, 0.0)
    seed_index: int = None
    word: GroupWord = None

    def to_dict(self) -> dict:
        est = self.endpoints_estimate
        return {
            "seed_index": self.seed_index,
            "start": self.start.to_dict(),
            "end": self.end.to_dict(),
            "n": self.n,
            "direction": self.direction.to_dict() if self.direction is not None else None,
            "word": str(self.word) if self.word is not None else None,
            "speed": self.speed,
            "displacement": self.displacement,
            "offsets": list(self.offsets),
            "endpoints_estimate": [est[0].angle, est[1].angle] if est else None,
        }


@dataclass
class DirectionalSpeedSet:
    direction: GroupWord
    axis: Geodesic
    length: float
    speeds: list = field(default_factory=lambda: [0.0])

    def add(self, speed: float):
        self.speeds.append(float(speed))
        self.speeds.sort()

    @property
    def v_max(self) -> float:
        return max(self.speeds)

    @property
    def interval_gap(self) -> float:
        values = sorted(set([0.0] + self.speeds))
        if len(values) < 2:
            return 0.0
        return float(np.max(np.diff(values)))

    def to_dict(self) -> dict:
        return {
            "direction": str(self.direction),
            "axis": self.axis.to_dict(),
            "length": self.length,
            "speeds": list(self.speeds),
            "v_max": self.v_max,
            "interval_gap": self.interval_gap,
        }


@dataclass
class HomologyVector:
    v: np.ndarray
    n: int
    word_length: int = 0

    def to_dict(self) -> dict:
        return {"v": [float(x) for x in self.v], "n": self.n, "word_length": self.word_length}


@dataclass
class RotationSetEstimate:
    directions: dict = field(default_factory=dict)
    homology: list = field(default_factory=list)
    samples: list = field(default_factory=list)
    unbinned: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def speed_set(self, word) -> DirectionalSpeedSet:
        return self.directions.get(str(GroupWord.coerce(word)))

    def to_dict(self) -> dict:
        return {
            "directions": {k: v.to_dict() for k, v in sorted(self.directions.items())},
            "homology": [h.to_dict() for h in self.homology],
            "samples": [s.to_dict() for s in self.samples],
            "unbinned": self.unbinned,
            "metadata": self.metadata,
        }

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for s in self.samples:
            rows.append({
                "seed_index": s.seed_index,
                "word": str(s.word) if s.word is not None else None,
                "speed": s.speed,
                "n": s.n,
                "alpha_hat": s.endpoints_estimate[0].angle if s.endpoints_estimate else np.nan,
                "beta_hat": s.endpoints_estimate[1].angle if s.endpoints_estimate else np.nan,
            })
        return pd.DataFrame(rows, columns=["seed_index", "word", "speed", "n", "alpha_hat", "beta_hat"])


# -- operaciones ---------------------------------------------------------------

def rotation_sample(traj: LiftedTrajectory, G: Geodesic, seed_index: int = None, deck=None) -> RotationSample:
    """
    Velocidad proyectada sobre G y estimación de los extremos (α̂, β̂) de la dirección de avance.

    Con `deck` (una palabra cuyo eje es G) la proyección se lee a nivel de grupo y vale para
    órbitas largas; sin él se sigue con el marco re-centrado, fiable solo para n corto.
    """
    if traj.n < 1:
        raise ValueError("La trayectoria debe tener al menos un paso")
    group = traj.group
    if deck is not None:
        s0, t0, s1, t1, _ = _peel_track(group, traj, G, deck)
    else:
        s0, t0, s1, t1 = _track_fermi(group, traj, G)
    _, E0, z, _ = _forward_view(group, traj)
    endpoints = None
    if abs(z) > 1e-12:
        u = z / abs(z)
        back = E0.inverse()
        endpoints = (BoundaryPoint.from_complex(_apply_complex(back, -u)),
                     BoundaryPoint.from_complex(_apply_complex(back, u)))
    word = group.check_word(deck) if deck is not None else None
    return RotationSample(start=traj.start, n=traj.n, end=traj.end, direction=G,
                          speed=abs(t1 - t0) / traj.n, endpoints_estimate=endpoints,
                          displacement=t1 - t0, offsets=(s0, s1), seed_index=seed_index, word=word)


def displacement_sample(traj: LiftedTrajectory, seed_index: int = None) -> RotationSample:
    """Muestra respecto de la geodésica de desplazamiento (por x0 y f̃ⁿx0); sin dirección si no se mueve."""
    group = traj.group
    _, E0, z, distance = _forward_view(group, traj)
    if abs(z) <= 1e-12:
        return RotationSample(start=traj.start, n=traj.n, end=traj.end, direction=None, speed=0.0,
                              seed_index=seed_index)
    u = z / abs(z)
    back = E0.inverse()
    a = BoundaryPoint.from_complex(_apply_complex(back, -u))
    b = BoundaryPoint.from_complex(_apply_complex(back, u))
    return RotationSample(start=traj.start, n=traj.n, end=traj.end, direction=Geodesic(a, b),
                          speed=distance / traj.n, endpoints_estimate=(a, b), displacement=distance,
                          offsets=(0.0, 0.0), seed_index=seed_index)


def annulus_sandwich(band_jump: int, displacement: float, length: float, tol: float = SANDWICH_TOL) -> bool:
    """⌊D/ℓ⌋ <= i_y - i_x <= ⌈D/ℓ⌉ para el desplazamiento proyectado D entre x e y."""
    return math.floor((displacement - tol) / length) <= band_jump <= math.ceil((displacement + tol) / length)


@dataclass
class AnnulusEstimate:
    word: GroupWord
    axis: Geodesic
    length: float
    interval: tuple
    samples: list = field(default_factory=list)

    @property
    def forward_speed(self) -> float:
        return max(self.interval[1], 0.0)

    @property
    def reversed_speed(self) -> float:
        return max(-self.interval[0], 0.0)

    @property
    def sandwich_holds(self) -> bool:
        return all(annulus_sandwich(s["band_end"] - s["band_start"], s["displacement"], self.length)
                   for s in self.samples)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.samples)

    def to_dict(self) -> dict:
        return {
            "word": str(self.word),
            "axis": self.axis.to_dict(),
            "length": self.length,
            "interval": list(self.interval),
            "forward": {"direction": self.axis.to_dict(), "speed": self.forward_speed},
            "reversed": {"direction": self.axis.reversed().to_dict(), "speed": self.reversed_speed},
            "sandwich_holds": self.sandwich_holds,
            "samples": self.samples,
        }


def _annulus_seed(S, T, axis, length, n, item):
    index, seed = item
    traj = iterate(S, seed, n)
    _, t0, _, t1, jump = _peel_track(S.group, traj, axis, T)
    i_x = math.floor(t0 / length)
    displacement = t1 - t0
    return {
        "seed_index": index,
        "band_start": i_x,
        "band_end": i_x + jump,
        "rotation_number": jump / n,
        "speed": jump * length / n,
        "displacement": displacement,
        "projected_distance": abs(displacement),
        "sandwich_ok": annulus_sandwich(jump, displacement, length),
    }


def annulus_rotation_number(S: LiftedSystem, T, seeds, n: int, threads: int = None) -> AnnulusEstimate:
    """
    Para cada semilla, desplazamiento de índice de banda i_{f̃ⁿx} - i_x a través de los
    trasladados por T de la perpendicular al eje en t = 0, dividido por n y escalado por ℓ(T).
    """
    T = S.group.check_word(T)
    axis, length = axis_of(S.group, T)
    items = list(enumerate(seeds))
    with ThreadPoolExecutor(max_workers=resolve_threads(threads)) as pool:
        samples = list(pool.map(lambda item: _annulus_seed(S, T, axis, length, n, item), items))
    speeds = [s["speed"] for s in samples] or [0.0]
    interval = (min(speeds), max(speeds))
    logger.info("Rotación anular de %s en dirección %s: [%.6f, %.6f] con %d semillas",
                S.name, T, interval[0], interval[1], len(samples))
    return AnnulusEstimate(word=T, axis=axis, length=length, interval=interval, samples=samples)


def homological_vector(traj: LiftedTrajectory) -> HomologyVector:
    """[g_0⁻¹ g_n]_{H1} / n, sumando las clases de los saltos."""
    if traj.n < 1:
        raise ValueError("La trayectoria debe tener al menos un paso")
    genus = traj.group.genus
    total = np.zeros(2 * genus, dtype=np.int64)
    cache = {}
    for hop in traj.hops:
        if hop not in cache:
            cache[hop] = homology_class(hop, genus)
        total += cache[hop]
    return HomologyVector(v=total / traj.n, n=traj.n, word_length=len(traj.word(traj.n)))


@dataclass(frozen=True)
class AxisCandidate:
    word: GroupWord
    axis: Geodesic
    length: float


def axis_candidates(G: SurfaceGroup, radius: int) -> list:
    """Ejes orientados distintos de las palabras de la bola, en orden shortlex."""
    out = {}
    for w, M in G.ball(radius)[1:]:
        cls = classify(M)
        if not cls.is_hyperbolic:
            continue
        key = (round(cls.axis.a.angle, 7), round(cls.axis.b.angle, 7))
        if key not in out:
            out[key] = AxisCandidate(w, cls.axis, cls.length)
    return list(out.values())


def _bind(sample: RotationSample, x0: complex, candidates: list, bin_angle: float, reach: float):
    beta_hat = sample.endpoints_estimate[1]
    best = None
    for c in candidates:
        if circular_distance(c.axis.b.angle, beta_hat.angle) > bin_angle:
            continue
        d = geodesic_distance(x0, c.axis)
        if d > reach:
            continue
        if best is None or d < best[0] - 1e-12:
            best = (d, c)
    return best[1] if best is not None else None


class RotationScanner:
    """
    Barrido del conjunto de rotación: itera cada semilla, estima la dirección de avance y
    agrupa la muestra en el eje (de la bola de palabras) cuyo extremo atractor está a menos de
    `bin_angle` de β̂ y que pasa más cerca del punto inicial. Las muestras sin eje se agrupan en
    direcciones crudas (α̂, β̂).
    """

    def __init__(self, system: LiftedSystem, word_ball_radius: int, config: dict = None):
        conf = DEFAULT_CONFIG.copy()
        if config:
            conf.update(config)
        self.system = system
        self.group = system.group
        self.radius = word_ball_radius
        self.bin_angle = conf["bin_angle"]
        self.bind_reach = conf["bind_reach"] if conf["bind_reach"] is not None else self.group.circumradius + 1.0
        self.speed_tol = conf["speed_tol"]
        self.raw_cluster_angle = conf["raw_cluster_angle"]
        self.threads = resolve_threads(conf["threads"])
        self.candidates = axis_candidates(self.group, word_ball_radius)

    def _one(self, item, n):
        index, seed = item
        traj = iterate(self.system, seed, n)
        homology = homological_vector(traj)
        rough = displacement_sample(traj, seed_index=index)
        if rough.direction is None or rough.speed < self.speed_tol:
            return rough, None, homology
        x0 = self.group.reconstruct(traj.start)
        candidate = _bind(rough, x0, self.candidates, self.bin_angle, self.bind_reach)
        if candidate is None:
            return rough, None, homology
        sample = rotation_sample(traj, candidate.axis, seed_index=index, deck=candidate.word)
        sample.word = candidate.word
        return sample, candidate, homology

    def _cluster(self, samples: list) -> list:
        clusters = []
        for s in samples:
            a, b = s.endpoints_estimate
            for c in clusters:
                if (circular_distance(c["alpha"], a.angle) <= self.raw_cluster_angle
                        and circular_distance(c["beta"], b.angle) <= self.raw_cluster_angle):
                    c["count"] += 1
                    c["v_max"] = max(c["v_max"], s.speed)
                    break
            else:
                clusters.append({"alpha": a.angle, "beta": b.angle, "count": 1, "v_max": s.speed})
        return clusters

    def run(self, seeds, n: int) -> RotationSetEstimate:
        if n < 1 or not seeds:
            raise ValueError("Se necesitan semillas y n >= 1")
        items = list(enumerate(seeds))
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            results = list(pool.map(lambda item: self._one(item, n), items))

        estimate = RotationSetEstimate(metadata={
            "system": self.system.describe(),
            "n": n,
            "seeds": len(items),
            "word_ball_radius": self.radius,
            "bin_angle": self.bin_angle,
            "speed_tol": self.speed_tol,
            "candidates": len(self.candidates),
        })
        raw = []
        for sample, candidate, homology in results:
            estimate.samples.append(sample)
            estimate.homology.append(homology)
            if candidate is not None:
                key = str(candidate.word)
                if key not in estimate.directions:
                    estimate.directions[key] = DirectionalSpeedSet(candidate.word, candidate.axis, candidate.length)
                estimate.directions[key].add(sample.speed)
            elif sample.endpoints_estimate is not None and sample.speed >= self.speed_tol:
                raw.append(sample)
        estimate.unbinned = self._cluster(raw)
        logger.info("Barrido de %s: %d semillas, %d direcciones, %d direcciones crudas",
                    self.system.name, len(items), len(estimate.directions), len(estimate.unbinned))
        return estimate


def scan_rotation_set(S: LiftedSystem, word_ball_radius: int, seeds, n: int,
                      config: dict = None) -> RotationSetEstimate:
    return RotationScanner(S, word_ball_radius, config).run(seeds, n)


def direction_set(estimate: RotationSetEstimate, tol: float = 2e-2) -> list:
    """Direcciones con velocidad positiva (por encima de tol)."""
    return sorted(k for k, v in estimate.directions.items() if v.v_max > tol)


def metric_rescale(speeds, length_old: float, length_new: float) -> np.ndarray:
    """Las velocidades en la dirección de una geodésica cerrada escalan como v/ℓ."""
    return np.asarray(speeds, dtype=float) * (length_new / length_old)


def realisation_distance_check(sample: RotationSample, R_hat: float, delta: float) -> dict:
    """Distancias de x0 y f̃ⁿx0 a la geodésica de la muestra contra la cota R + 1 + δ."""
    start, end = (abs(x) for x in sample.offsets)
    bound = R_hat + 1.0 + delta
    return {
        "start_distance": start,
        "end_distance": end,
        "bound": bound,
        "ok": start <= bound and end <= bound,
    }


# -- semillas ------------------------------------------------------------------

def grid_seeds(G: SurfaceGroup, count: int, seed: int = 0) -> list:
    return [LocatedPoint(GroupWord(()), z) for z in G.random_points(count, seed)]


def geodesic_seeds(G: SurfaceGroup, geodesic: Geodesic, offsets, t_values, decks=("",)) -> list:
    """Puntos (s, t) en coordenadas de Fermi de u·geodesic para cada u de `decks`."""
    frame = geodesic_frame(geodesic)
    out = []
    for deck in decks:
        u = G.check_word(deck)
        for s in offsets:
            for t in t_values:
                located = G.locate(from_fermi(geodesic, s, t, frame=frame))
                out.append(LocatedPoint(u * located.word, located.rep))
    return out


def axis_seeds(G: SurfaceGroup, word, offsets, count: int, decks=("",)) -> list:
    axis, length = axis_of(G, word)
    t_values = [length * k / count for k in range(count)]
    return geodesic_seeds(G, axis, offsets, t_values, decks=decks)
