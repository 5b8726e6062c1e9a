"""Shape derivative of the boundary Poincare map.

For a deformation V = f n + V_Gamma the derivative of the normalized field is

    X'_theta = [2 f II(B, B^perp) + B^perp . [V_Gamma, B] + B^perp . grad u_V] / (sqrt_g (B^phi)^2)

where u_V is harmonic with normal derivative div_Gamma(f B). The derivative of
the Poincare map then follows from the variational equation along trajectories.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Hashable, Mapping

import numpy as np

from . import _spectral as sp
from .dynamics import (
    CircleMap,
    FlowTable,
    IntegratorOptions,
    along_flow,
    clenshaw_curtis_weights,
    poincare_map,
    transition_factor,
)
from .errors import ImmersionFailure, NotLinearized, NotTransverse
from .harmonic import HarmonicBoundaryField, NormalizedField, compute_harmonic, detect_linearized, normalize_toroidal
from .neumann import NeumannProblem, NeumannSolution, QuadratureOptions, solve_neumann
from .surface import (
    AmbientField,
    DeformationField,
    FourierSurface,
    MetricData,
    TangentField,
    apply_ambient,
    compute_metric,
    decompose_deformation,
    ii_bilinear,
    lie_bracket,
    perp,
    surface_divergence,
    surface_from_samples,
)


@dataclass(frozen=True, eq=False)
class ShapeDerivativeResult:
    uV: NeumannSolution
    X_prime_theta: np.ndarray
    Pi_prime: np.ndarray
    method_tag: str
    theta: np.ndarray


def uV_datum(metric: MetricData, B: TangentField, V: DeformationField) -> np.ndarray:
    """Neumann datum div_Gamma(f B)."""
    return surface_divergence(metric, B.scale(V.f))


def solve_uV(surface, metric, B, V, opts: QuadratureOptions | None = None) -> NeumannSolution:
    g = uV_datum(metric, B, V)
    # remove the roundoff-level mean so the compatibility check is not tripped by FFT noise
    g = g - metric.weighted_mean(g)
    return solve_neumann(NeumannProblem(surface, metric, g), opts)


def _cross_b(B: TangentField, w: TangentField) -> np.ndarray:
    """B^perp . w / sqrt_g, i.e. B^phi w^theta - B^theta w^phi."""
    return B.v_phi * w.v_theta - B.v_theta * w.v_phi


def x_prime_terms(metric: MetricData, B: TangentField, V: DeformationField, uV: NeumannSolution) -> dict[str, np.ndarray]:
    """The normal, tangential and potential contributions to X'_theta."""
    if not np.all(B.v_phi > 0):
        raise NotTransverse("toroidal component of B is not positive everywhere")
    denom = B.v_phi ** 2
    normal = 2 * V.f * ii_bilinear(metric, B, perp(B, metric)) / (metric.sqrt_g * denom)
    tangential = _cross_b(B, lie_bracket(V.tangential, B)) / denom
    potential = _cross_b(B, uV.grad_tangential) / denom
    return {"normal": normal, "tangential": tangential, "potential": potential}


def x_prime_theta(metric: MetricData, B: TangentField, V: DeformationField, uV: NeumannSolution) -> np.ndarray:
    t = x_prime_terms(metric, B, V, uV)
    return t["normal"] + t["tangential"] + t["potential"]


def pi_prime_duhamel(flow: FlowTable, T: np.ndarray, x_prime: np.ndarray) -> np.ndarray:
    """int_0^1 T(phi, theta) X'(phi, Pi^phi(theta)) dphi on the flow's theta samples."""
    vals = along_flow(x_prime, flow)
    w = clenshaw_curtis_weights(flow.phi.size)
    return w @ (T * vals)


def pi_prime_linearized(omega: float, x_prime: np.ndarray, theta: np.ndarray | None = None) -> np.ndarray:
    """int_0^1 X'(phi, theta + omega phi) dphi, evaluated mode by mode."""
    kp, kt, C = sp.symmetric_modes_2d(x_prime)
    coef = (C * sp.averaging_factor(kp[:, None] + omega * kt[None, :])).sum(axis=0)
    theta = sp.grid(x_prime.shape[1]) if theta is None else np.asarray(theta, float)
    return np.real(np.exp(2j * np.pi * np.multiply.outer(theta, kt)) @ coef)


@dataclass(frozen=True)
class PipelineOptions:
    quadrature: QuadratureOptions = field(default_factory=QuadratureOptions)
    integrator: IntegratorOptions = field(default_factory=IntegratorOptions)
    n_theta: int | None = None
    linearized_tol: float = 1e-8


@dataclass(frozen=True, eq=False)
class BaseState:
    """Everything about the undeformed surface that the derivative reuses."""

    surface: FourierSurface
    metric: MetricData
    harmonic: HarmonicBoundaryField
    normalized: NormalizedField
    poincare: CircleMap
    flow: FlowTable
    transition: np.ndarray
    opts: PipelineOptions


def prepare(surface: FourierSurface, opts: PipelineOptions | None = None) -> BaseState:
    opts = opts or PipelineOptions()
    metric = compute_metric(surface)
    h = compute_harmonic(surface, metric, opts.quadrature)
    nf = normalize_toroidal(h)
    P, flow = poincare_map(nf, opts.n_theta, opts.integrator)
    T = transition_factor(nf, flow)
    return BaseState(surface, metric, h, nf, P, flow, T, opts)


def shape_derivative(
    state: BaseState, V: AmbientField | DeformationField, method: str = "duhamel"
) -> ShapeDerivativeResult:
    """Analytic Pi'(E; V); ``method`` is 'duhamel', 'linearized' or 'auto'."""
    if not isinstance(V, DeformationField):
        V = decompose_deformation(V, state.surface, state.metric)
    B = state.harmonic.B
    uV = solve_uV(state.surface, state.metric, B, V, state.opts.quadrature)
    xp = x_prime_theta(state.metric, B, V, uV)
    theta = state.flow.theta0
    lin = detect_linearized(state.normalized, state.opts.linearized_tol)
    if method == "auto":
        method = "linearized" if lin is not None else "duhamel"
    if method == "linearized":
        if lin is None:
            raise NotLinearized("X_theta is not constant on this surface")
        pp = pi_prime_linearized(lin[1], xp, theta)
    elif method == "duhamel":
        pp = pi_prime_duhamel(state.flow, state.transition, xp)
    else:
        raise ValueError(f"unknown method {method!r}")
    return ShapeDerivativeResult(uV, xp, pp, method, theta)


def deform_surface(surface: FourierSurface, V: AmbientField, t: float) -> FourierSurface:
    """Refit (id + t V)(E) on the surface grid."""
    if t == 0:
        return surface
    E = surface.points
    moved = E + t * apply_ambient(V, E)
    out = surface_from_samples(moved, surface.grid_size)
    if out.theta_flipped:
        raise ImmersionFailure("deformation reversed the surface orientation")
    return out


def poincare_samples(surface: FourierSurface, opts: PipelineOptions) -> np.ndarray:
    metric = compute_metric(surface)
    nf = normalize_toroidal(compute_harmonic(surface, metric, opts.quadrature))
    P, _ = poincare_map(nf, opts.n_theta, opts.integrator)
    return P.samples


@dataclass(frozen=True)
class FDReport:
    t_list: tuple[float, ...]
    estimates: np.ndarray
    extrapolated: np.ndarray
    observed_order: float
    increments: tuple[float, ...]
    analytic: np.ndarray | None = None
    errors: tuple[float, ...] | None = None
    error_orders: tuple[float, ...] | None = None
    extrapolated_error: float | None = None


def _central(plus: np.ndarray, minus: np.ndarray, t: float) -> np.ndarray:
    d = plus - minus
    d = d - np.round(d[0])
    return d / (2 * t)


def fd_pi_prime(
    surface: FourierSurface,
    V: AmbientField,
    t_list=(4e-3, 2e-3, 1e-3),
    opts: PipelineOptions | None = None,
    analytic: np.ndarray | None = None,
    max_workers: int = 1,
) -> FDReport:
    """Central-difference estimates of Pi' with Richardson analysis.

    ``t_list`` must be decreasing; the observed order uses the last three entries.
    """
    opts = opts or PipelineOptions()
    t_list = tuple(float(t) for t in t_list)
    if len(t_list) < 3 or any(b >= a for a, b in zip(t_list, t_list[1:])):
        raise ValueError("t_list needs at least three decreasing step sizes")
    jobs = {(t, s): (lambda t=t, s=s: poincare_samples(deform_surface(surface, V, s * t), opts))
            for t in t_list for s in (1, -1)}
    res = run_jobs(jobs, max_workers)
    est = np.stack([_central(res[(t, 1)], res[(t, -1)], t) for t in t_list])
    incs = tuple(float(np.abs(a - b).max()) for a, b in zip(est, est[1:]))
    r1 = t_list[-3] / t_list[-2]
    order = float(np.log(incs[-2] / incs[-1]) / np.log(r1)) if incs[-1] > 0 else np.inf
    r = t_list[-2] / t_list[-1]
    extrap = (r ** 2 * est[-1] - est[-2]) / (r ** 2 - 1)
    if analytic is None:
        return FDReport(t_list, est, extrap, order, incs)
    errs = tuple(float(np.abs(e - analytic).max()) for e in est)
    eord = tuple(float(np.log(a / b) / np.log(ta / tb)) if b > 0 else np.inf
                 for a, b, ta, tb in zip(errs, errs[1:], t_list, t_list[1:]))
    return FDReport(t_list, est, extrap, order, incs, analytic, errs, eord,
                    float(np.abs(extrap - analytic).max()))


def run_jobs(jobs: Mapping[Hashable, Callable[[], object]], max_workers: int | None = None) -> dict:
    """Run independent jobs with bounded parallelism; results keyed and ordered by job key."""
    keys = sorted(jobs, key=repr)
    workers = max(1, min(max_workers or 1, os.cpu_count() or 1, len(keys) or 1))
    if workers == 1:
        return {k: jobs[k]() for k in keys}
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {k: pool.submit(jobs[k]) for k in keys}
        return {k: futures[k].result() for k in keys}
