"""
Module: audits.py

Descripción:
    Auditorías numéricas sobre estimaciones del conjunto de rotación. No lanzan excepciones por
    resultados negativos: cada incumplimiento se registra como hallazgo con `issue` y `severity`.

Funcionalidades:
    - star_shape_audit: para cada dirección con v_max > tol, cada velocidad v' de una malla en
      [0, v_max] debe estar realizada por alguna muestra a menos de δ_v = 5% de v_max. Si falta,
      se muestrean semillas desplazadas del eje (16 gruesas y luego bisección en la distancia al eje).
    - power_inverse_audit: v_max(f^n) = n·v_max(f) por dirección y v_max(f⁻¹, w⁻¹) = v_max(f, w).
"""

import logging
import uuid
from datetime import datetime, timezone

import numpy as np

from geometry.surface_group import GroupWord
from dynamics.base.lifted_system import InverseSystem, LiftedSystem
from dynamics.systems.composite import PowerSystem
from dynamics.trajectory import iterate
from rotation.estimation import (
    RotationSetEstimate,
    geodesic_seeds,
    rotation_sample,
    scan_rotation_set,
)

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = {
    "speed_tol": 2e-2,
    "delta_fraction": 0.05,
    "grid_points": 21,
    "coarse_seeds": 16,
    "offset_max": 1.0,
    "n": 200,
    "budget": 64,
}


class AuditReport:
    def __init__(self, name: str):
        self.name = name
        self.findings = []
        self.details = {}
        self.execution_id = str(uuid.uuid4())
        self.timestamp = datetime.now(timezone.utc).isoformat()

    def _add_finding(self, direction, issue, severity="warning", **extra):
        self.findings.append({"direction": direction, "issue": issue, "severity": severity, **extra})

    @property
    def passed(self) -> bool:
        return not self.findings

    def to_dict(self) -> dict:
        return {
            "audit": self.name,
            "passed": self.passed,
            "findings": self.findings,
            "details": self.details,
            "execution_id": self.execution_id,
            "timestamp": self.timestamp,
        }


class StarShapeAuditor:
    def __init__(self, estimate: RotationSetEstimate, system: LiftedSystem, config: dict = None):
        conf = DEFAULT_CONFIG.copy()
        if config:
            conf.update(config)
        self.estimate = estimate
        self.system = system
        self.group = system.group
        self.speed_tol = conf["speed_tol"]
        self.delta_fraction = conf["delta_fraction"]
        self.grid_points = conf["grid_points"]
        self.coarse_seeds = conf["coarse_seeds"]
        self.offset_max = conf["offset_max"]
        self.n = conf["n"]
        self.budget = conf["budget"]
        self.report = AuditReport("star_shape")

    def _speed_at(self, speed_set, offset: float) -> float:
        seed = geodesic_seeds(self.group, speed_set.axis, [offset], [0.0])[0]
        traj = iterate(self.system, seed, self.n)
        return rotation_sample(traj, speed_set.axis, deck=speed_set.direction).speed

    def _audit_direction(self, key, speed_set):
        v_max = speed_set.v_max
        delta = self.delta_fraction * v_max
        speeds = list(speed_set.speeds)
        grid = np.linspace(0.0, v_max, self.grid_points)

        def missing():
            return [v for v in grid if min(abs(v - s) for s in speeds) > delta]

        used = 0
        if missing():
            offsets = list(np.linspace(0.0, self.offset_max, self.coarse_seeds))
            profile = [(s, self._speed_at(speed_set, s)) for s in offsets]
            used += len(offsets)
            speeds.extend(v for _, v in profile)
            for target in missing():
                for (s_lo, v_lo), (s_hi, v_hi) in zip(profile, profile[1:]):
                    if (v_lo - target) * (v_hi - target) > 0.0:
                        continue
                    while used < self.budget and min(abs(target - s) for s in speeds) > delta:
                        s_mid = 0.5 * (s_lo + s_hi)
                        v_mid = self._speed_at(speed_set, s_mid)
                        used += 1
                        speeds.append(v_mid)
                        if (v_lo - target) * (v_mid - target) <= 0.0:
                            s_hi, v_hi = s_mid, v_mid
                        else:
                            s_lo, v_lo = s_mid, v_mid
                    break

        gaps = missing()
        for v in gaps:
            self.report._add_finding(key, f"Velocidad {v:.6f} sin muestra a menos de {delta:.6f}",
                                     "warning", v_target=float(v))
        self.report.details[key] = {
            "v_max": v_max,
            "delta": delta,
            "grid_points": self.grid_points,
            "covered": self.grid_points - len(gaps),
            "extra_samples": used,
        }

    def run(self) -> dict:
        for key, speed_set in sorted(self.estimate.directions.items()):
            if speed_set.v_max <= self.speed_tol:
                continue
            self._audit_direction(key, speed_set)
        logger.info("Auditoría de forma estrellada: %d direcciones, %d hallazgos",
                    len(self.report.details), len(self.report.findings))
        return self.report.to_dict()


def star_shape_audit(estimate: RotationSetEstimate, S: LiftedSystem, grid: int = None,
                     config: dict = None) -> dict:
    conf = dict(config or {})
    if grid is not None:
        conf["grid_points"] = grid
    return StarShapeAuditor(estimate, S, conf).run()


def power_inverse_audit(S: LiftedSystem, n: int, seeds, steps: int, word_ball_radius: int = 3,
                        directions=None, config: dict = None) -> dict:
    """
    Compara v_max(S^n) con n·v_max(S) y v_max(S⁻¹) en la dirección invertida con v_max(S),
    sobre las mismas semillas y el mismo número de pasos.
    """
    conf = DEFAULT_CONFIG.copy()
    if config:
        conf.update(config)
    tol = conf["speed_tol"]
    report = AuditReport("power_inverse")
    scan_conf = {k: v for k, v in (config or {}).items() if k in ("bin_angle", "bind_reach", "threads")}

    base = scan_rotation_set(S, word_ball_radius, seeds, steps, scan_conf)
    power = scan_rotation_set(PowerSystem(S, n), word_ball_radius, seeds, steps, scan_conf)
    inverse = scan_rotation_set(InverseSystem(S), word_ball_radius, seeds, steps, scan_conf)

    keys = sorted(directions) if directions is not None else sorted(
        k for k, v in base.directions.items() if v.v_max > tol)
    for key in keys:
        key = str(GroupWord.coerce(key))
        base_set = base.directions.get(key)
        v = base_set.v_max if base_set is not None else 0.0
        p_set = power.directions.get(key)
        v_pow = p_set.v_max if p_set is not None else 0.0
        reversed_key = str(GroupWord.coerce(key).inverse())
        i_set = inverse.directions.get(reversed_key)
        v_inv = i_set.v_max if i_set is not None else 0.0
        report.details[key] = {
            "v_max": v,
            "power": n,
            "v_max_power": v_pow,
            "ratio": v_pow / v if v > 0.0 else None,
            "reversed_direction": reversed_key,
            "v_max_inverse": v_inv,
        }
        if abs(v_pow - n * v) > tol * max(1.0, n * v):
            report._add_finding(key, f"v_max(f^{n}) = {v_pow:.6f} difiere de {n}·v_max(f) = {n * v:.6f}", "error")
        if abs(v_inv - v) > tol:
            report._add_finding(key, f"v_max(f⁻¹) en {reversed_key} = {v_inv:.6f} difiere de {v:.6f}", "error")
    logger.info("Auditoría de potencia/inversa (n=%d): %d direcciones, %d hallazgos",
                n, len(keys), len(report.findings))
    return report.to_dict()
