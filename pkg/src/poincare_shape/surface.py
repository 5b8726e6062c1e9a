"""Toroidal surfaces given by double Fourier series and their differential geometry.

Angles live on R/Z. An embedding is

    E(phi, theta) = sum_{(m, n)} c_mn cos 2pi(m phi + n theta) + s_mn sin 2pi(m phi + n theta)

with ``c_mn, s_mn`` in R^3, ``phi`` the toroidal and ``theta`` the poloidal angle.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Mapping

import numpy as np

from . import _spectral as sp
from .errors import AxisIntersection, ConfigError, ImmersionFailure, SingularFrame

Coeffs = Mapping[tuple[int, int], np.ndarray]
AmbientField = Callable[[np.ndarray], np.ndarray]

DEFAULT_AXIS_FRACTION = 0.05


def _normalize_coeffs(coeffs: Coeffs) -> dict[tuple[int, int], np.ndarray]:
    out: dict[tuple[int, int], np.ndarray] = {}
    for key, val in coeffs.items():
        m, n = (int(k) for k in key)
        arr = np.asarray(val, dtype=float)
        if arr.shape == (3,):
            arr = np.stack([arr, np.zeros(3)])
        if arr.shape != (2, 3):
            raise ConfigError(f"mode {(m, n)}: expected cosine and sine 3-vectors, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ConfigError(f"mode {(m, n)}: non-finite coefficient")
        # fold (m, n) and (-m, -n) together so each mode is stored once
        if m < 0 or (m == 0 and n < 0):
            m, n = -m, -n
            arr = arr * np.array([[1.0], [-1.0]])
        if (m, n) == (0, 0):
            arr = arr * np.array([[1.0], [0.0]])
        out[(m, n)] = out.get((m, n), np.zeros((2, 3))) + arr
    return out


def evaluate_embedding(coeffs: Coeffs, phi: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """E at broadcast arrays ``phi``, ``theta``; result has a trailing axis of length 3."""
    phi, theta = np.broadcast_arrays(np.asarray(phi, float), np.asarray(theta, float))
    out = np.zeros(phi.shape + (3,))
    for (m, n), cs in coeffs.items():
        arg = 2 * np.pi * (m * phi + n * theta)
        out += np.cos(arg)[..., None] * cs[0] + np.sin(arg)[..., None] * cs[1]
    return out


def _winding(xy_loop: np.ndarray) -> float:
    ang = np.unwrap(np.arctan2(xy_loop[:, 1], xy_loop[:, 0]))
    closing = np.angle(np.exp(1j * (np.arctan2(xy_loop[0, 1], xy_loop[0, 0]) - ang[-1])))
    return (ang[-1] - ang[0] + closing) / (2 * np.pi)


@dataclass(frozen=True, eq=False)
class FourierSurface:
    """Immutable toroidal surface around the z-axis.

    ``winding`` is +1 when increasing ``phi`` turns counterclockwise around
    the z-axis and -1 otherwise. ``theta_flipped`` records whether the
    poloidal angle was reversed at construction to make the frame
    (d_phi E, d_theta E) positively oriented with respect to the outward normal.
    """

    coeffs: dict[tuple[int, int], np.ndarray]
    grid_size: tuple[int, int]
    axis_clearance: float
    winding: int = 1
    theta_flipped: bool = False

    @property
    def phi(self) -> np.ndarray:
        return sp.grid(self.grid_size[0])

    @property
    def theta(self) -> np.ndarray:
        return sp.grid(self.grid_size[1])

    @cached_property
    def points(self) -> np.ndarray:
        """E on the grid, shape (N_phi, N_theta, 3)."""
        P, T = np.meshgrid(self.phi, self.theta, indexing="ij")
        pts = evaluate_embedding(self.coeffs, P, T)
        pts.setflags(write=False)
        return pts

    def evaluate(self, phi, theta) -> np.ndarray:
        return evaluate_embedding(self.coeffs, phi, theta)

    def with_grid(self, grid_size: tuple[int, int]) -> "FourierSurface":
        return build_surface(self.coeffs, grid_size, _keep_theta=True)

    @property
    def mean_radius(self) -> float:
        return float(np.hypot(self.points[..., 0], self.points[..., 1]).mean())


def build_surface(
    coeffs: Coeffs,
    grid_size: tuple[int, int] | int,
    delta_axis: float | None = None,
    immersion_tol: float = 1e-10,
    _keep_theta: bool = False,
) -> FourierSurface:
    """Validate coefficients and return a positively oriented surface.

    ``delta_axis`` defaults to 5% of the mean cylindrical radius.
    """
    if np.isscalar(grid_size):
        grid_size = (int(grid_size), int(grid_size))
    nphi, ntheta = (int(g) for g in grid_size)
    if nphi % 2 or ntheta % 2 or nphi < 16 or ntheta < 16:
        raise ConfigError(f"grid size must be even and at least 16 in each angle, got {(nphi, ntheta)}")
    cf = _normalize_coeffs(coeffs)
    probe = FourierSurface(cf, (nphi, ntheta), axis_clearance=np.nan)
    E = probe.points
    Ep = sp.diff(E, 0)
    Et = sp.diff(E, 1)
    cross = np.cross(Ep, Et)
    area_el = np.linalg.norm(cross, axis=-1)
    scale = np.sqrt((Ep ** 2).sum(-1).max() * (Et ** 2).sum(-1).max())
    if not area_el.min() > immersion_tol * scale:
        raise ImmersionFailure(f"|d_phi E x d_theta E| reaches {area_el.min():.3e} on the grid")

    rho_cyl = np.hypot(E[..., 0], E[..., 1])
    clearance = float(rho_cyl.min())
    if delta_axis is None:
        delta_axis = DEFAULT_AXIS_FRACTION * float(rho_cyl.mean())
    if clearance <= delta_axis:
        raise AxisIntersection(f"axis clearance {clearance:.3e} is below {delta_axis:.3e}")
    windings = np.array([_winding(E[:, j, :2]) for j in range(ntheta)])
    w = int(np.rint(windings[0]))
    if abs(w) != 1 or np.any(np.abs(windings - w) > 1e-6):
        raise AxisIntersection("toroidal coordinate loops must wind once around the z-axis")

    # signed enclosed volume; positive when d_phi E x d_theta E points outward
    volume = (E * cross).sum() / (3 * nphi * ntheta)
    flipped = False
    if volume < 0:
        if _keep_theta:
            raise ImmersionFailure("surface orientation is inconsistent")
        cf = {(m, -n): cs for (m, n), cs in cf.items()}
        cf = _normalize_coeffs(cf)
        flipped = True
    return FourierSurface(cf, (nphi, ntheta), clearance, winding=w, theta_flipped=flipped)


def surface_from_samples(
    samples: np.ndarray, grid_size: tuple[int, int] | None = None, drop_tol: float = 0.0, **kw
) -> FourierSurface:
    """Fit Fourier coefficients to E sampled on a uniform grid, then build."""
    samples = np.asarray(samples, dtype=float)
    nphi, ntheta = samples.shape[:2]
    coeffs: dict[tuple[int, int], np.ndarray] = {}
    mats = [sp.symmetric_modes_2d(samples[..., c]) for c in range(3)]
    kp, kt = mats[0][0], mats[0][1]
    C = np.stack([m[2] for m in mats], -1)
    scale = np.abs(C).max()
    for a, m in enumerate(kp):
        for b, n in enumerate(kt):
            m_i, n_i = int(m), int(n)
            if m_i < 0 or (m_i == 0 and n_i < 0):
                continue
            c = C[a, b]
            if np.abs(c).max() <= drop_tol * scale:
                continue
            if m_i == 0 and n_i == 0:
                cs = np.stack([c.real, np.zeros(3)])
            else:
                cs = np.stack([2 * c.real, -2 * c.imag])
            coeffs[(m_i, n_i)] = coeffs.get((m_i, n_i), np.zeros((2, 3))) + cs
    return build_surface(coeffs, grid_size or (nphi, ntheta), **kw)


def axisymmetric_coeffs(R_T: float, r_P: float) -> dict[tuple[int, int], np.ndarray]:
    """Coefficients of ((R_T + r cos 2pi theta) cos 2pi phi, ..., r sin 2pi theta)."""
    h = 0.5 * r_P
    return {
        (1, 0): np.array([[R_T, 0, 0], [0, R_T, 0]], dtype=float),
        (1, 1): np.array([[h, 0, 0], [0, h, 0]], dtype=float),
        (1, -1): np.array([[h, 0, 0], [0, h, 0]], dtype=float),
        (0, 1): np.array([[0, 0, 0], [0, 0, r_P]], dtype=float),
    }


def axisymmetric_surface(R_T: float = 2.0, r_P: float = 1.0, grid_size=64, **kw) -> FourierSurface:
    return build_surface(axisymmetric_coeffs(R_T, r_P), grid_size, **kw)


def perturbed_torus(
    R_T: float = 2.0, r_P: float = 1.0, amplitude: float = 0.1, mode: tuple[int, int] = (2, 1), grid_size=64, **kw
) -> FourierSurface:
    """Torus whose cross-section radius is r_P + amplitude cos 2pi(m phi + n theta)."""
    m, n = mode
    fit = 4 * (abs(m) + abs(n) + 2)
    fit += fit % 2
    s = sp.grid(fit)
    P, T = np.meshgrid(s, s, indexing="ij")
    rho = r_P + amplitude * np.cos(2 * np.pi * (m * P + n * T))
    R = R_T + rho * np.cos(2 * np.pi * T)
    E = np.stack([R * np.cos(2 * np.pi * P), R * np.sin(2 * np.pi * P), rho * np.sin(2 * np.pi * T)], -1)
    return surface_from_samples(E, _as_pair(grid_size), drop_tol=1e-15, **kw)


def _as_pair(g) -> tuple[int, int]:
    return (int(g), int(g)) if np.isscalar(g) else (int(g[0]), int(g[1]))


@dataclass(frozen=True, eq=False)
class MetricData:
    """First and second fundamental forms on the surface grid."""

    gpp: np.ndarray
    gpt: np.ndarray
    gtt: np.ndarray
    sqrt_g: np.ndarray
    n: np.ndarray
    iipp: np.ndarray
    iipt: np.ndarray
    iitt: np.ndarray
    e_phi: np.ndarray
    e_theta: np.ndarray

    @property
    def grid_size(self) -> tuple[int, int]:
        return self.gpp.shape

    @property
    def weights(self) -> np.ndarray:
        """Trapezoid area weights: sqrt_g dphi dtheta."""
        return self.sqrt_g / self.gpp.size

    @property
    def area(self) -> float:
        return float(self.weights.sum())

    def inverse(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        det = self.sqrt_g ** 2
        return self.gtt / det, -self.gpt / det, self.gpp / det

    def weighted_mean(self, f: np.ndarray) -> float:
        return float((f * self.weights).sum() / self.area)

    def ambient(self, u: "TangentField") -> np.ndarray:
        return u.v_phi[..., None] * self.e_phi + u.v_theta[..., None] * self.e_theta

    def inner(self, u: "TangentField", v: "TangentField") -> np.ndarray:
        return (
            self.gpp * u.v_phi * v.v_phi
            + self.gpt * (u.v_phi * v.v_theta + u.v_theta * v.v_phi)
            + self.gtt * u.v_theta * v.v_theta
        )


def compute_metric(surface: FourierSurface) -> MetricData:
    E = surface.points
    Ep = sp.diff(E, 0)
    Et = sp.diff(E, 1)
    Epp = sp.diff(E, 0, 2)
    Ett = sp.diff(E, 1, 2)
    Ept = sp.diff(Ep, 1)
    cross = np.cross(Ep, Et)
    sqrt_g = np.linalg.norm(cross, axis=-1)
    n = cross / sqrt_g[..., None]
    return MetricData(
        gpp=(Ep * Ep).sum(-1),
        gpt=(Ep * Et).sum(-1),
        gtt=(Et * Et).sum(-1),
        sqrt_g=sqrt_g,
        n=n,
        iipp=(Epp * n).sum(-1),
        iipt=(Ept * n).sum(-1),
        iitt=(Ett * n).sum(-1),
        e_phi=Ep,
        e_theta=Et,
    )


@dataclass(frozen=True, eq=False)
class TangentField:
    """Contravariant components in the (d_phi, d_theta) frame."""

    v_phi: np.ndarray
    v_theta: np.ndarray

    def __add__(self, other: "TangentField") -> "TangentField":
        return TangentField(self.v_phi + other.v_phi, self.v_theta + other.v_theta)

    def __sub__(self, other: "TangentField") -> "TangentField":
        return TangentField(self.v_phi - other.v_phi, self.v_theta - other.v_theta)

    def scale(self, s) -> "TangentField":
        return TangentField(s * self.v_phi, s * self.v_theta)

    __mul__ = scale
    __rmul__ = scale

    @classmethod
    def zeros(cls, shape) -> "TangentField":
        return cls(np.zeros(shape), np.zeros(shape))


@dataclass(frozen=True, eq=False)
class DeformationField:
    """Boundary decomposition V = f n + V_Gamma of an ambient deformation."""

    f: np.ndarray
    vg_phi: np.ndarray
    vg_theta: np.ndarray
    ambient_eval: AmbientField | None = field(default=None)

    @property
    def tangential(self) -> TangentField:
        return TangentField(self.vg_phi, self.vg_theta)

    def reconstruct(self, metric: MetricData) -> np.ndarray:
        return self.f[..., None] * metric.n + metric.ambient(self.tangential)


def perp(u: TangentField, metric: MetricData) -> TangentField:
    """n x u expressed in the coordinate frame."""
    sg = metric.sqrt_g
    return TangentField(
        -(metric.gpt * u.v_phi + metric.gtt * u.v_theta) / sg,
        (metric.gpp * u.v_phi + metric.gpt * u.v_theta) / sg,
    )


def ii_bilinear(metric: MetricData, u: TangentField, v: TangentField) -> np.ndarray:
    return (
        metric.iipp * u.v_phi * v.v_phi
        + metric.iipt * (u.v_phi * v.v_theta + u.v_theta * v.v_phi)
        + metric.iitt * u.v_theta * v.v_theta
    )


def apply_ambient(V: AmbientField, points: np.ndarray) -> np.ndarray:
    flat = points.reshape(-1, 3)
    return np.asarray(V(flat), dtype=float).reshape(points.shape)


def decompose_deformation(
    V: AmbientField, surface: FourierSurface, metric: MetricData, frame_tol: float = 1e-12
) -> DeformationField:
    Vg = apply_ambient(V, surface.points)
    f = (Vg * metric.n).sum(-1)
    a = (Vg * metric.e_phi).sum(-1)
    b = (Vg * metric.e_theta).sum(-1)
    det = metric.gpp * metric.gtt - metric.gpt ** 2
    if np.any(det <= frame_tol * metric.gpp * metric.gtt):
        raise SingularFrame("tangential Gram matrix is numerically singular")
    vp = (metric.gtt * a - metric.gpt * b) / det
    vt = (metric.gpp * b - metric.gpt * a) / det
    return DeformationField(f, vp, vt, ambient_eval=V)


def surface_divergence(metric: MetricData, u: TangentField) -> np.ndarray:
    sg = metric.sqrt_g
    return (sp.diff(sg * u.v_phi, 0) + sp.diff(sg * u.v_theta, 1)) / sg


def surface_gradient(metric: MetricData, f: np.ndarray) -> TangentField:
    """Tangential gradient g^{ij} d_j f."""
    fp = sp.diff(f, 0)
    ft = sp.diff(f, 1)
    ipp, ipt, itt = metric.inverse()
    return TangentField(ipp * fp + ipt * ft, ipt * fp + itt * ft)


def lie_bracket(v: TangentField, w: TangentField) -> TangentField:
    """Coordinate Lie bracket [v, w]^i = v^j d_j w^i - w^j d_j v^i."""

    def along(a: TangentField, c: np.ndarray) -> np.ndarray:
        return a.v_phi * sp.diff(c, 0) + a.v_theta * sp.diff(c, 1)

    return TangentField(
        along(v, w.v_phi) - along(w, v.v_phi),
        along(v, w.v_theta) - along(w, v.v_theta),
    )


def integrate(metric: MetricData, f: np.ndarray) -> float:
    """Integral of f against the area form."""
    return float((f * metric.weights).sum())
