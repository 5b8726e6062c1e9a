"""Circle dynamics of the normalized boundary field.

The Poincare map integrates d theta / d phi = X_theta(phi, theta) over one
toroidal turn. Trajectories are kept as lifts (never reduced mod 1), so the
map comes with the lift that is homotopic to the identity through the
partial flows.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
from numpy.polynomial import chebyshev as cheb
from scipy.integrate import solve_ivp

from . import _spectral as sp
from .errors import StepFailure
from .harmonic import NormalizedField


@dataclass(frozen=True)
class IntegratorOptions:
    rtol: float = 1e-11
    atol: float = 1e-13
    method: str = "DOP853"
    checkpoints: int | None = None


class CircleMap:
    """Degree-one circle map stored as lift samples F(theta_j) on a uniform grid."""

    def __init__(self, samples: np.ndarray):
        self.samples = np.asarray(samples, dtype=float)
        self.samples.setflags(write=False)

    @classmethod
    def from_function(cls, F: Callable[[np.ndarray], np.ndarray], n: int = 256) -> "CircleMap":
        return cls(F(sp.grid(n)))

    @property
    def theta(self) -> np.ndarray:
        return sp.grid(self.samples.size)

    @property
    def displacement(self) -> np.ndarray:
        return self.samples - self.theta

    @cached_property
    def _interp(self) -> sp.TrigInterpolant1D:
        return sp.TrigInterpolant1D(self.displacement)

    def __call__(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        return theta + self._interp(theta)

    def derivative(self, theta=None) -> np.ndarray:
        theta = self.theta if theta is None else np.asarray(theta, dtype=float)
        return 1.0 + self._interp.derivative(theta)

    def is_monotone(self) -> bool:
        s = self.samples
        return bool(np.all(np.diff(np.append(s, s[0] + 1)) > 0))

    def compose(self, other: "CircleMap") -> "CircleMap":
        """self o other, sampled on other's grid."""
        return CircleMap(self(other.samples))

    def distance(self, other: "CircleMap") -> float:
        """Sup distance between lifts, after matching them at theta = 0."""
        d = self.samples - other(self.theta)
        shift = np.round(d[0])
        return float(np.abs(d - shift).max())

    def iterate(self, theta0: float, count: int) -> np.ndarray:
        orbit = np.empty(count + 1)
        orbit[0] = theta0
        x = theta0
        for k in range(count):
            x = float(self(x))
            orbit[k + 1] = x
        return orbit


@dataclass(frozen=True, eq=False)
class FlowTable:
    """Partial flows Pi^phi(theta_j) at Chebyshev checkpoints phi_i in [0, 1]."""

    phi: np.ndarray
    theta0: np.ndarray
    values: np.ndarray

    @property
    def final(self) -> np.ndarray:
        return self.values[-1]


def chebyshev_points(n: int) -> np.ndarray:
    """Chebyshev-Lobatto points on [0, 1], increasing, endpoints included."""
    return 0.5 * (1 - np.cos(np.pi * np.arange(n) / (n - 1)))


def _cheb_coeffs(values: np.ndarray) -> np.ndarray:
    n = values.shape[0]
    x = 2 * chebyshev_points(n) - 1
    return cheb.chebfit(x, values, n - 1)


def clenshaw_curtis_weights(n: int) -> np.ndarray:
    """Weights integrating the Chebyshev interpolant over [0, 1]."""
    c = _cheb_coeffs(np.eye(n))
    ci = cheb.chebint(c, lbnd=-1)
    return 0.5 * cheb.chebval(1.0, ci)


def cumulative_from_end(values: np.ndarray) -> np.ndarray:
    """int_{phi_i}^1 of the Chebyshev interpolant of ``values`` (axis 0)."""
    c = _cheb_coeffs(values)
    ci = cheb.chebint(c, lbnd=-1)
    n = values.shape[0]
    x = 2 * chebyshev_points(n) - 1
    prim = 0.5 * cheb.chebval(x, ci)
    if prim.ndim > 1:
        prim = prim.T
    return prim[-1] - prim


def default_checkpoints(n_phi: int) -> int:
    return max(65, 2 * n_phi + 33)


def _integrate(interp: sp.TrigInterpolant2D, theta0: np.ndarray, phi_span, t_eval, opts: IntegratorOptions):
    def rhs(phi, y):
        return interp.at_phi(phi, y)

    sol = solve_ivp(rhs, phi_span, np.asarray(theta0, float), method=opts.method, t_eval=t_eval,
                    rtol=opts.rtol, atol=opts.atol)
    if sol.status != 0:
        raise StepFailure(sol.message)
    return sol.y.T


def poincare_map(
    normalized: NormalizedField,
    n_theta: int | None = None,
    opts: IntegratorOptions | None = None,
) -> tuple[CircleMap, FlowTable]:
    opts = opts or IntegratorOptions()
    n_phi, n_th = normalized.X_theta.shape
    n_theta = n_theta or n_th
    theta0 = sp.grid(n_theta)
    n_ck = opts.checkpoints or default_checkpoints(n_phi)
    phis = chebyshev_points(n_ck)
    interp = sp.TrigInterpolant2D(normalized.X_theta)
    if np.all(normalized.X_theta == 0):
        values = np.tile(theta0, (n_ck, 1))
    else:
        values = _integrate(interp, theta0, (0.0, 1.0), phis, opts)
    values[0] = theta0
    return CircleMap(values[-1]), FlowTable(phis, theta0, values)


def integrate_between(normalized: NormalizedField, phi0: float, phi1: float, theta0, opts: IntegratorOptions | None = None):
    """Flow of X from phi0 to phi1 applied to theta0."""
    opts = opts or IntegratorOptions()
    interp = sp.TrigInterpolant2D(normalized.X_theta)
    return _integrate(interp, theta0, (phi0, phi1), [phi1], opts)[-1]


def along_flow(field: np.ndarray, flow: FlowTable) -> np.ndarray:
    """Values of a grid function at (phi_i, Pi^phi_i(theta_j))."""
    interp = sp.TrigInterpolant2D(field)
    return np.stack([interp.at_phi(p, row) for p, row in zip(flow.phi, flow.values)])


def transition_factor(normalized: NormalizedField, flow: FlowTable) -> np.ndarray:
    """T(phi_i, theta_j) = exp(int_{phi_i}^1 d_theta X_theta along the trajectory)."""
    a = along_flow(normalized.dX_theta_dtheta, flow)
    return np.exp(cumulative_from_end(a))


def rotation_number(F: CircleMap, iterates: int = 2 ** 14, window: str = "hann", theta0: float = 0.0) -> float:
    """Weighted Birkhoff average of the one-step displacement along an orbit."""
    orbit = F.iterate(theta0, iterates)
    steps = np.diff(orbit)
    t = (np.arange(iterates) + 0.5) / iterates
    if window == "hann":
        w = np.sin(np.pi * t) ** 2
    elif window == "bump":
        w = np.exp(-1.0 / (t * (1 - t)))
    elif window == "flat":
        w = np.ones_like(t)
    else:
        raise ValueError(f"unknown window {window!r}")
    return float((w * steps).sum() / w.sum())
