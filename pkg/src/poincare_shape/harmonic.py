"""Boundary trace of the unit-circulation harmonic field and its normalized form.

The harmonic field is built as B = B_w + grad chi, where B_w is the wire field
and chi solves the interior Neumann problem with datum -B_w . n. The result is
tangent to the boundary, curl-free, divergence-free and has the wire's
circulation around the hole, which characterizes it uniquely.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _spectral as sp
from .errors import CirculationDrift, IncompatibleDatum, NotTransverse
from .neumann import NeumannProblem, NeumannSolution, QuadratureOptions, solve_neumann
from .surface import FourierSurface, MetricData, TangentField
from .wire import wire_normal_trace, wire_tangential


@dataclass(frozen=True, eq=False)
class HarmonicBoundaryField:
    B: TangentField
    chi_correction: NeumannSolution
    b_phi_min: float
    circulation: np.ndarray


@dataclass(frozen=True)
class AdmissibilityReport:
    b_phi_min: float
    admissible: bool
    argmin: tuple[float, float]


@dataclass(frozen=True, eq=False)
class NormalizedField:
    """X = d_phi + X_theta d_theta; ``b_phi`` keeps the toroidal component of B."""

    X_theta: np.ndarray
    dX_theta_dtheta: np.ndarray
    b_phi: np.ndarray


def circulation(B: TangentField, metric: MetricData) -> np.ndarray:
    """Line integral of B along each theta = const toroidal loop."""
    return (B.v_phi * metric.gpp + B.v_theta * metric.gpt).mean(axis=0)


def compute_harmonic(
    surface: FourierSurface,
    metric: MetricData,
    opts: QuadratureOptions | None = None,
    circulation_tol: float = 1e-6,
    flux_tol: float = 1e-6,
) -> HarmonicBoundaryField:
    datum = -wire_normal_trace(surface, metric)
    # the flux of B_w vanishes exactly; on coarse grids the trapezoid rule leaves
    # a small remainder, which is removed after checking it is small
    flux = metric.weighted_mean(datum)
    scale = 1.0 / (2 * np.pi * surface.axis_clearance)
    if abs(flux) > flux_tol * scale:
        raise IncompatibleDatum(f"wire flux {flux:.3e} through the surface is not negligible")
    datum = datum - flux
    chi = solve_neumann(NeumannProblem(surface, metric, datum), opts)
    B = wire_tangential(surface, metric) + chi.grad_tangential
    circ = circulation(B, metric)
    if np.abs(circ - 1).max() > circulation_tol:
        raise CirculationDrift(f"circulation deviates from 1 by {np.abs(circ - 1).max():.3e}")
    return HarmonicBoundaryField(B, chi, float(B.v_phi.min()), circ)


def check_admissible(field: HarmonicBoundaryField) -> AdmissibilityReport:
    bp = field.B.v_phi
    a, b = np.unravel_index(np.argmin(bp), bp.shape)
    n1, n2 = bp.shape
    return AdmissibilityReport(float(bp[a, b]), bool(bp[a, b] > 0), (a / n1, b / n2))


def normalize_toroidal(field: HarmonicBoundaryField | TangentField) -> NormalizedField:
    B = field.B if isinstance(field, HarmonicBoundaryField) else field
    if not np.all(B.v_phi > 0):
        raise NotTransverse("toroidal component of B is not positive everywhere")
    xt = B.v_theta / B.v_phi
    return NormalizedField(xt, sp.diff(xt, 1), B.v_phi)


def detect_linearized(normalized: NormalizedField, tol: float = 1e-8) -> tuple[np.ndarray, float] | None:
    """Return (chi, omega) when X_theta is constant to ``tol``, otherwise None."""
    xt = normalized.X_theta
    omega = float(xt.mean())
    if np.abs(xt - omega).max() <= tol:
        return normalized.b_phi, omega
    return None
