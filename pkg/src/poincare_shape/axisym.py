"""Closed forms on the circular axisymmetric torus and checks of its symmetry properties.

E = ((R_T + r_P cos 2pi theta) cos 2pi phi, (R_T + r_P cos 2pi theta) sin 2pi phi, r_P sin 2pi theta),
R(theta) = R_T + r_P cos 2pi theta.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _spectral as sp
from .errors import ConfigError
from .harmonic import HarmonicBoundaryField
from .neumann import NeumannSolution
from .surface import DeformationField, FourierSurface, MetricData, TangentField, axisymmetric_surface


@dataclass(frozen=True, eq=False)
class AxisymTorus:
    R_T: float = 2.0
    r_P: float = 1.0
    grid_size: tuple[int, int] | int = 64

    def __post_init__(self):
        if not 0 < self.r_P < self.R_T:
            raise ConfigError(f"need 0 < r_P < R_T, got r_P={self.r_P}, R_T={self.R_T}")
        if np.isscalar(self.grid_size):
            object.__setattr__(self, "grid_size", (int(self.grid_size), int(self.grid_size)))

    @cached_property
    def surface(self) -> FourierSurface:
        return axisymmetric_surface(self.R_T, self.r_P, self.grid_size)

    @cached_property
    def _angles(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(sp.grid(self.grid_size[0]), sp.grid(self.grid_size[1]), indexing="ij")

    def R(self, theta=None) -> np.ndarray:
        th = self._angles[1] if theta is None else np.asarray(theta, float)
        return self.R_T + self.r_P * np.cos(2 * np.pi * th)

    def exact_metric(self) -> MetricData:
        P, T = self._angles
        c2, s2 = np.cos(2 * np.pi * T), np.sin(2 * np.pi * T)
        cp, spp = np.cos(2 * np.pi * P), np.sin(2 * np.pi * P)
        R, r = self.R(), self.r_P
        k = 4 * np.pi ** 2
        z = np.zeros_like(R)
        return MetricData(
            gpp=k * R ** 2,
            gpt=z,
            gtt=np.full_like(R, k * r ** 2),
            sqrt_g=k * r * R,
            n=np.stack([c2 * cp, c2 * spp, s2], -1),
            iipp=-k * R * c2,
            iipt=z.copy(),
            iitt=np.full_like(R, -k * r),
            e_phi=2 * np.pi * R[..., None] * np.stack([-spp, cp, z], -1),
            e_theta=2 * np.pi * r * np.stack([-s2 * cp, -s2 * spp, c2], -1),
        )

    def exact_harmonic(self) -> HarmonicBoundaryField:
        R = self.R()
        bp = 1.0 / (4 * np.pi ** 2 * R ** 2)
        z = np.zeros_like(R)
        chi = NeumannSolution(z, z.copy(), TangentField(z.copy(), z.copy()))
        return HarmonicBoundaryField(TangentField(bp, z.copy()), chi, float(bp.min()), np.ones(self.grid_size[1]))


def exact_fields(torus: AxisymTorus) -> tuple[MetricData, HarmonicBoundaryField]:
    return torus.exact_metric(), torus.exact_harmonic()


def closed_form_pi_prime(torus: AxisymTorus, uV: NeumannSolution) -> np.ndarray:
    """(R^2 / r_P^2) int_0^1 d_theta u_V dphi on the theta grid."""
    dtu = sp.diff(uV.trace, 1).mean(axis=0)
    return torus.R(sp.grid(torus.grid_size[1])) ** 2 / torus.r_P ** 2 * dtu


def axisym_x_prime(torus: AxisymTorus, V: DeformationField, uV: NeumannSolution) -> np.ndarray:
    """-d_phi V_Gamma^theta + (R^2 / r_P^2) d_theta u_V."""
    return -sp.diff(V.vg_theta, 0) + torus.R() ** 2 / torus.r_P ** 2 * sp.diff(uV.trace, 1)


def normal_flux_average(uV: NeumannSolution) -> float:
    """max_theta |int_0^1 du_V/dn dphi| with the normal derivative taken from the layer density."""
    return float(np.abs(uV.normal_derivative().mean(axis=0)).max())


def gaussian_peak(theta: np.ndarray, theta0: float, eps: float, R: np.ndarray) -> np.ndarray:
    """Periodized Gaussian of width eps around theta0, divided by R(theta)."""
    k = np.arange(-3, 4)
    d = np.asarray(theta)[..., None] - theta0 - k
    return np.exp(-(d ** 2) / (2 * eps ** 2)).sum(-1) / R


def toroidal_averaging_residuals(
    uV: NeumannSolution, metric: MetricData, f_values: dict[str, np.ndarray], u_floor: float = 1e-8
) -> dict[str, float]:
    """Residuals |int f u - avg(f) int u| / (||f|| max(||u||, u_floor)) for theta-only f on the theta grid.

    The floor keeps the ratio meaningful when u_V vanishes identically (for instance V = e_z),
    where the plain relative residual would be roundoff divided by roundoff.
    """
    w = metric.weights
    u = uV.trace
    area = w.sum()
    un = np.sqrt((u ** 2 * w).sum())
    out = {}
    for name, f1 in f_values.items():
        f = np.broadcast_to(np.asarray(f1, float)[None, :], u.shape)
        lhs = (f * u * w).sum()
        rhs = (f * w).sum() / area * (u * w).sum()
        fn = np.sqrt((f ** 2 * w).sum())
        out[name] = float(abs(lhs - rhs) / (fn * max(un, u_floor)))
    return out


def default_test_functions(torus: AxisymTorus, theta0: float = 0.3) -> dict[str, np.ndarray]:
    th = sp.grid(torus.grid_size[1])
    R = torus.R(th)
    fs = {"cos(2pi theta)": np.cos(2 * np.pi * th), "sin(4pi theta)": np.sin(4 * np.pi * th)}
    for eps in (0.5, 0.2, 0.1):
        fs[f"peak eps={eps}"] = gaussian_peak(th, theta0, eps, R)
    return fs
