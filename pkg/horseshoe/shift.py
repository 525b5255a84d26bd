"""
Module: shift.py

Descripción:
    Modelo simbólico del desplazamiento completo sobre {1..k}. Los conteos son enteros de Python
    (sin desbordamiento) y la entropía es log k.
"""

import itertools
import logging
import math
from dataclasses import dataclass

logger = logging.getLogger(__name__)


def _check(k: int, n: int = 0):
    if int(k) < 1:
        raise ValueError(f"El alfabeto necesita al menos un símbolo (k={k})")
    if int(n) < 0:
        raise ValueError(f"n debe ser >= 0 (n={n})")


def shift_count(k: int, n: int) -> int:
    """Palabras periódicas de período que divide a n (k**n)."""
    _check(k, n)
    return int(k) ** int(n)


def shift_entropy(k: int) -> float:
    _check(k)
    return math.log(k)


def separated_set_count(k: int, n: int) -> int:
    """
    Cardinal máximo de un conjunto (n, ε)-separado del desplazamiento completo con ε menor que
    la separación entre cilindros distintos: una palabra por cilindro de longitud n.
    """
    return shift_count(k, n)


def entropy_estimate(k: int, n: int) -> float:
    if n == 0:
        return 0.0
    return math.log(separated_set_count(k, n)) / n


@dataclass(frozen=True)
class SymbolicShift:
    k: int

    def __post_init__(self):
        _check(self.k)

    def count(self, n: int) -> int:
        return shift_count(self.k, n)

    def entropy(self) -> float:
        return shift_entropy(self.k)

    def words(self, n: int):
        """Palabras de longitud n sobre {1..k}, en orden lexicográfico."""
        return itertools.product(range(1, self.k + 1), repeat=n)

    def periodic_words(self, max_period: int):
        for q in range(1, max_period + 1):
            yield from self.words(q)

    def to_dict(self, n: int = None) -> dict:
        out = {"k": self.k, "entropy": self.entropy()}
        if n is not None:
            out.update({"n": n, "separated_set": str(separated_set_count(self.k, n)),
                        "entropy_estimate": entropy_estimate(self.k, n)})
        return out
