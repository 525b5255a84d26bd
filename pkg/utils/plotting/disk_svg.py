"""
Module: disk_svg.py

Descripción:
    Figuras estáticas del disco de Poincaré en SVG: teselación por trasladados del polígono
    fundamental, ejes de transformaciones de cubierta, trazas de órbitas y cuerdas de rotación
    (del punto inicial al final de cada muestra) coloreadas por velocidad.
"""

import logging
import math

import numpy as np
from matplotlib.collections import LineCollection
from matplotlib.figure import Figure

from geometry.base.errors import NearBoundaryError
from geometry.base.hyperbolic_core import Geodesic, _apply_complex, point_along, segment_points
from geometry.surface_group import SurfaceGroup

logger = logging.getLogger(__name__)

EDGE_SAMPLES = 24
AXIS_REACH = 7.0


def _xy(points) -> np.ndarray:
    pts = np.asarray(points, dtype=complex)
    return np.column_stack([pts.real, pts.imag])


def tiling_segments(G: SurfaceGroup, radius: int) -> list:
    """Lados de los trasladados w·P para las palabras de la bola de radio `radius`."""
    vertices = G.vertices()
    n = len(vertices)
    edges = [segment_points(vertices[k], vertices[(k + 1) % n], EDGE_SAMPLES) for k in range(n)]
    segments = []
    for _, M in G.ball(radius):
        for edge in edges:
            segments.append(_xy([_apply_complex(M, z) for z in edge]))
    return segments


def geodesic_polyline(G: Geodesic, samples: int = 96) -> np.ndarray:
    ts = np.linspace(-AXIS_REACH, AXIS_REACH, samples)
    pts = [G.a.z] + [point_along(G, t) for t in ts] + [G.b.z]
    return _xy(pts)


def plot_disk(group: SurfaceGroup = None, radius: int = 2, axes=(), orbits=(), chords=(),
              path: str = None, title: str = None) -> Figure:
    """
    Dibuja el disco. `axes` son Geodesic; `orbits` listas de puntos complejos; `chords`
    tuplas (inicio, fin, velocidad). Si se da `path` se guarda en SVG.
    """
    fig = Figure(figsize=(6, 6))
    ax = fig.add_subplot(1, 1, 1)
    theta = np.linspace(0.0, 2.0 * math.pi, 400)
    ax.plot(np.cos(theta), np.sin(theta), color="k", linewidth=1.0)

    if group is not None:
        try:
            ax.add_collection(LineCollection(tiling_segments(group, radius), colors="0.75", linewidths=0.4))
        except NearBoundaryError:
            logger.warning("Teselación truncada: radio %d demasiado grande para la precisión", radius)

    for G in axes:
        xy = geodesic_polyline(G)
        ax.plot(xy[:, 0], xy[:, 1], color="tab:blue", linewidth=1.0)

    for orbit in orbits:
        xy = _xy(orbit)
        ax.plot(xy[:, 0], xy[:, 1], marker=".", markersize=2, linewidth=0.5, color="tab:red")

    if chords:
        lines = [_xy([start, end]) for start, end, _ in chords]
        speeds = np.array([speed for _, _, speed in chords], dtype=float)
        collection = LineCollection(lines, cmap="viridis", linewidths=1.2)
        collection.set_array(speeds)
        ax.add_collection(collection)
        fig.colorbar(collection, ax=ax, label="velocidad")

    ax.set_xlim(-1.05, 1.05)
    ax.set_ylim(-1.05, 1.05)
    ax.set_aspect("equal")
    ax.set_axis_off()
    if title:
        ax.set_title(title)
    if path:
        fig.savefig(path, format="svg")
        logger.info("Figura guardada en %s", path)
    return fig
