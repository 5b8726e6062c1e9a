"""Field of a unit-current straight wire along the z-axis.

B_w = (1 / 2pi) (-y, x, 0) / (x^2 + y^2) is curl-free and divergence-free off
the axis, and its circulation around the axis is 1.
"""
from __future__ import annotations

import numpy as np

from .errors import AxisProximity
from .surface import FourierSurface, MetricData, TangentField


def eval_wire(points, delta_axis: float = 0.0) -> np.ndarray:
    """Evaluate B_w at one point (shape (3,)) or many (shape (..., 3))."""
    p = np.asarray(points, dtype=float)
    r2 = p[..., 0] ** 2 + p[..., 1] ** 2
    if np.any(r2 <= delta_axis ** 2) or np.any(r2 == 0):
        raise AxisProximity(f"point within {delta_axis} of the z-axis")
    out = np.zeros(p.shape)
    out[..., 0] = -p[..., 1] / (2 * np.pi * r2)
    out[..., 1] = p[..., 0] / (2 * np.pi * r2)
    return out


def _delta(surface: FourierSurface) -> float:
    return 0.5 * surface.axis_clearance


def oriented_wire(surface: FourierSurface) -> np.ndarray:
    """B_w on the grid, sign-adjusted so its circulation along increasing phi is +1."""
    return surface.winding * eval_wire(surface.points, _delta(surface))


def wire_normal_trace(surface: FourierSurface, metric: MetricData) -> np.ndarray:
    """B_w . n on the grid (with the winding sign applied)."""
    return (oriented_wire(surface) * metric.n).sum(-1)


def wire_tangential(surface: FourierSurface, metric: MetricData) -> TangentField:
    """Tangential part of B_w in the coordinate frame."""
    Bw = oriented_wire(surface)
    a = (Bw * metric.e_phi).sum(-1)
    b = (Bw * metric.e_theta).sum(-1)
    det = metric.sqrt_g ** 2
    return TangentField((metric.gtt * a - metric.gpt * b) / det, (metric.gpp * b - metric.gpt * a) / det)
