"""
Module: periodic.py

Descripción:
    Búsqueda de puntos periódicos que realizan un vector de rotación racional: z̃ con
    f̃^q(z̃) = T^p z̃. El residuo d(f̃^q z, T^p z) se minimiza primero sobre una malla del dominio
    fundamental y luego se refina con Nelder-Mead (scipy.optimize.minimize). Con `along` la
    búsqueda se restringe a una geodésica y se resuelve con minimize_scalar.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from geometry.base.hyperbolic_core import Geodesic, apply, hyp_distance, point_along
from geometry.surface_group import LocatedPoint
from dynamics.base.lifted_system import LiftedSystem

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = {
    "grid_size": 64,
    "refine_best": 4,
    "tolerance": 1e-6,
    "max_iterations": 400,
    "seed": 0,
    "along": None,
}


@dataclass
class PeriodicSearchResult:
    p: int
    q: int
    word: str
    witness: LocatedPoint = None
    residual: float = math.inf
    evaluations: int = 0
    diagnostics: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.witness is not None

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "word": self.word,
            "found": self.found,
            "witness": self.witness.to_dict() if self.witness is not None else None,
            "residual": self.residual if math.isfinite(self.residual) else None,
            "evaluations": self.evaluations,
            "diagnostics": self.diagnostics,
        }


class PeriodicOrbitSearch:
    def __init__(self, system: LiftedSystem, T, p: int, q: int, config: dict = None):
        if q < 1:
            raise ValueError("q debe ser >= 1")
        conf = DEFAULT_CONFIG.copy()
        if config:
            conf.update(config)
        self.system = system
        self.group = system.group
        self.word = self.group.check_word(T)
        self.p, self.q = int(p), int(q)
        self.target = self.group.evaluate(self.word.power(self.p))
        self.grid_size = conf["grid_size"]
        self.refine_best = conf["refine_best"]
        self.tolerance = conf["tolerance"]
        self.max_iterations = conf["max_iterations"]
        self.seed = conf["seed"]
        along = conf["along"]
        if isinstance(along, tuple):
            self.along, self.along_range = along[0], tuple(along[1])
        else:
            self.along, self.along_range = along, (-2.0, 2.0)
        self.evaluations = 0

    def residual(self, z: complex) -> float:
        self.evaluations += 1
        w = z
        for _ in range(self.q):
            w = self.system.raw_step(w)
        return hyp_distance(w, apply(self.target, z))

    def _objective(self, xy) -> float:
        z = complex(xy[0], xy[1])
        if abs(z) >= 0.999:
            return 1e6 + abs(z)
        return self.residual(z)

    def _result(self, z, residual, **diagnostics) -> PeriodicSearchResult:
        result = PeriodicSearchResult(p=self.p, q=self.q, word=str(self.word), residual=residual,
                                      evaluations=self.evaluations, diagnostics=diagnostics)
        if z is not None and residual < self.tolerance:
            result.witness = self.group.locate(z)
            logger.info("Punto %d-periódico encontrado (T=%s, p=%d): residuo %.3e",
                        self.q, self.word, self.p, residual)
        else:
            logger.warning("Sin punto periódico (T=%s, p=%d, q=%d): mejor residuo %.3e tras %d evaluaciones",
                           self.word, self.p, self.q, residual, self.evaluations)
        return result

    def _search_along(self, geodesic: Geodesic) -> PeriodicSearchResult:
        ts = np.linspace(self.along_range[0], self.along_range[1], self.grid_size)
        values = [self.residual(point_along(geodesic, t)) for t in ts]
        i = int(np.argmin(values))
        best_t, best = float(ts[i]), values[i]
        if best >= self.tolerance:
            lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, len(ts) - 1)]
            res = minimize_scalar(lambda t: self.residual(point_along(geodesic, t)), bounds=(lo, hi),
                                  method="bounded", options={"xatol": 1e-12, "maxiter": self.max_iterations})
            if res.fun < best:
                best_t, best = float(res.x), float(res.fun)
        return self._result(point_along(geodesic, best_t), best, mode="geodesic", t=best_t)

    def run(self) -> PeriodicSearchResult:
        if self.along is not None:
            return self._search_along(self.along)

        grid = self.group.random_points(self.grid_size, seed=self.seed)
        scored = sorted(((self.residual(z), i, z) for i, z in enumerate(grid)), key=lambda x: (x[0], x[1]))
        best_value, _, best_z = scored[0]
        if best_value < self.tolerance:
            return self._result(best_z, best_value, mode="grid", refined=0)
        refined = 0
        for _value, _, z in scored[:self.refine_best]:
            res = minimize(self._objective, x0=[z.real, z.imag], method="Nelder-Mead",
                           options={"xatol": 1e-12, "fatol": 1e-12, "maxiter": self.max_iterations})
            refined += 1
            if res.fun < best_value:
                best_value, best_z = float(res.fun), complex(res.x[0], res.x[1])
            if best_value < self.tolerance:
                break
        return self._result(best_z, best_value, mode="grid", refined=refined)


def periodic_orbit_search(S: LiftedSystem, T, p: int, q: int, config: dict = None) -> PeriodicSearchResult:
    """
    Busca z̃ con d(f̃^q z̃, T^p z̃) < tolerancia. `config["along"]` admite una Geodesic o un par
    (Geodesic, (t_min, t_max)) para restringir la búsqueda a esa geodésica.
    """
    return PeriodicOrbitSearch(S, T, p, q, config).run()
