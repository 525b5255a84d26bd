"""
Module: errors.py

Descripción:
    Jerarquía de excepciones compartida por todos los módulos de rotlab. Cada excepción
    lleva un mensaje y un diccionario `context` con los datos que permiten reproducir el fallo,
    con la misma forma que `MetadataLogger.log_error(msg, context)`.
"""


class RotLabError(Exception):
    """Raíz de todas las excepciones de rotlab."""

    def __init__(self, message: str, context: dict = None):
        super().__init__(message)
        self.message = message
        self.context = context or {}

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "message": self.message, "context": self.context}


class NearBoundaryError(RotLabError):
    """Un punto interior quedó a menos de la tolerancia del borde; hay que re-anclarlo con el grupo."""


class InvalidGenusError(RotLabError):
    pass


class NumericalEscapeError(RotLabError):
    """La reducción al dominio fundamental no terminó dentro del presupuesto (pérdida de precisión)."""


class BudgetExceededError(RotLabError):
    pass


class NotHyperbolicError(RotLabError):
    pass


class AmbiguousCrossingError(RotLabError):
    """Las geodésicas comparten un extremo; el cruce no está definido."""


class NotRankTwoError(RotLabError):
    pass


class TubeTooWideError(RotLabError):
    """Los tubos de trasladados distintos se solapan."""


class AmbiguousPositionError(RotLabError):
    """Tangencia degenerada entre rectángulos; el llamador debe perturbar."""


class ResolutionTooCoarseError(RotLabError):
    pass


class PreconditionError(RotLabError):
    pass


class ConfigError(RotLabError):
    """Configuración inválida. `context['pointer']` indica el campo ofensivo."""


class InvalidWordError(RotLabError, ValueError):
    """Palabra con letras que no son generadores del grupo (o sus inversos)."""
