"""
Module: trajectory.py

Descripción:
    Iteración de un sistema levantado con re-anclaje: tras cada paso la imagen se localiza en el
    dominio fundamental y la palabra de anclaje (el "salto") se pliega en la palabra acumulada
    g_k, de modo que f̃^k(x̃) = evaluate(g_k)·rep_k sin guardar nunca coordenadas cerca del borde.

    Solo se guardan los saltos cortos; las palabras acumuladas se reconstruyen a pedido.
"""

import logging
from dataclasses import dataclass, field

import pandas as pd

from geometry.surface_group import GroupWord, LocatedPoint, MAX_LOCATED_WORD, SurfaceGroup
from dynamics.base.lifted_system import LiftedSystem

logger = logging.getLogger(__name__)


@dataclass
class LiftedTrajectory:
    start: LocatedPoint
    reps: list = field(default_factory=list)
    hops: list = field(default_factory=list)
    system_name: str = ""
    group: SurfaceGroup = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return len(self.hops)

    def word(self, k: int) -> GroupWord:
        """g_k; g_0 es la palabra del punto inicial."""
        w = self.start.word
        for hop in self.hops[:k]:
            w = w * hop
        return w

    @property
    def words(self) -> list:
        out = []
        w = self.start.word
        for hop in self.hops:
            w = w * hop
            out.append(w)
        return out

    @property
    def steps(self) -> list:
        return [LocatedPoint(w, rep) for w, rep in zip(self.words, self.reps)]

    @property
    def end(self) -> LocatedPoint:
        if not self.hops:
            return self.start
        return LocatedPoint(self.word(self.n), self.reps[-1])

    def to_frame(self) -> pd.DataFrame:
        words = self.words
        return pd.DataFrame({
            "k": range(1, self.n + 1),
            "hop": [str(h) for h in self.hops],
            "word_length": [len(w) for w in words],
            "rep_re": [z.real for z in self.reps],
            "rep_im": [z.imag for z in self.reps],
        })


def _as_located(group: SurfaceGroup, z0) -> LocatedPoint:
    if isinstance(z0, LocatedPoint):
        return z0
    return group.locate(complex(z0))


def iterate(S: LiftedSystem, z0, n: int) -> LiftedTrajectory:
    """n pasos de S desde z0 (LocatedPoint o punto del disco). Determinista."""
    if n < 1:
        raise ValueError("n debe ser >= 1")
    group = S.group
    start = _as_located(group, z0)
    trajectory = LiftedTrajectory(start=start, system_name=S.name, group=group)
    rep = start.rep
    length = len(start.word)
    for _ in range(n):
        located = group.locate(S.local_step(rep))
        trajectory.hops.append(located.word)
        trajectory.reps.append(located.rep)
        rep = located.rep
        length += len(located.word)
    if length > MAX_LOCATED_WORD:
        logger.debug("Trayectoria de %s: %d pasos, longitud acumulada de saltos %d", S.name, n, length)
    return trajectory

