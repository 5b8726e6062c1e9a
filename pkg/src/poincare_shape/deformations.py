"""Ambient deformation fields R^3 -> R^3 acting on arrays of shape (M, 3)."""
from __future__ import annotations

from typing import Any, Mapping

import numpy as np

from .errors import ConfigError
from .surface import AmbientField


def constant(vector=(0.0, 0.0, 1.0)) -> AmbientField:
    v = np.asarray(vector, dtype=float)

    def V(x):
        return np.broadcast_to(v, np.shape(x)).copy()

    return V


def rigid_rotation(axis=(0.0, 0.0, 1.0), center=(0.0, 0.0, 0.0)) -> AmbientField:
    """Infinitesimal rotation a x (x - c)."""
    a = np.asarray(axis, dtype=float)
    c = np.asarray(center, dtype=float)

    def V(x):
        return np.cross(a, np.asarray(x) - c)

    return V


def radial_bump(center=(3.0, 0.0, 0.0), width=0.5, amplitude=1.0) -> AmbientField:
    """Gaussian bump pushing away from the z-axis: A exp(-|x - c|^2 / 2 w^2) e_R."""
    c = np.asarray(center, dtype=float)

    def V(x):
        x = np.asarray(x, dtype=float)
        rho = np.hypot(x[:, 0], x[:, 1])
        g = amplitude * np.exp(-((x - c) ** 2).sum(-1) / (2 * width ** 2))
        out = np.zeros_like(x)
        out[:, 0] = g * x[:, 0] / rho
        out[:, 1] = g * x[:, 1] / rho
        return out

    return V


def fourier_normal_bump(m: int = 1, n: int = 1, amplitude: float = 0.1, R_T: float = 2.0, phase: float = 0.0) -> AmbientField:
    """A cos 2pi(m phi + n theta + phase) e_r in toroidal coordinates about the circle of radius R_T.

    On a torus of major radius R_T this is a Fourier mode of the normal displacement.
    """

    def V(x):
        x = np.asarray(x, dtype=float)
        rho = np.hypot(x[:, 0], x[:, 1])
        cphi, sphi = x[:, 0] / rho, x[:, 1] / rho
        dr, dz = rho - R_T, x[:, 2]
        s = np.hypot(dr, dz)
        ct, st = dr / s, dz / s
        phi = np.arctan2(x[:, 1], x[:, 0]) / (2 * np.pi)
        th = np.arctan2(dz, dr) / (2 * np.pi)
        a = amplitude * np.cos(2 * np.pi * (m * phi + n * th + phase))
        return a[:, None] * np.stack([ct * cphi, ct * sphi, st], -1)

    return V


def random_polynomial(seed: int, degree: int = 2, scale: float = 3.0, amplitude: float = 1.0) -> AmbientField:
    """Vector field with seeded Gaussian coefficients on monomials of x / scale up to ``degree``."""
    rng = np.random.default_rng(seed)
    exps = [(i, j, k) for i in range(degree + 1) for j in range(degree + 1 - i) for k in range(degree + 1 - i - j)]
    coef = rng.standard_normal((len(exps), 3)) * amplitude / np.sqrt(len(exps))
    E = np.array(exps)

    def V(x):
        y = np.asarray(x, dtype=float) / scale
        mono = np.prod(y[:, None, :] ** E[None, :, :], axis=-1)
        return mono @ coef

    return V


def add(*fields: AmbientField) -> AmbientField:
    def V(x):
        return sum(f(x) for f in fields)

    return V


def scaled(field: AmbientField, s: float) -> AmbientField:
    return lambda x: s * field(x)


_BUILDERS = {
    "constant": (constant, {"vector"}),
    "rigid_rotation": (rigid_rotation, {"axis", "center"}),
    "radial_bump": (radial_bump, {"center", "width", "amplitude"}),
    "fourier_normal_bump": (fourier_normal_bump, {"m", "n", "amplitude", "R_T", "phase"}),
    "random": (random_polynomial, {"seed", "degree", "scale", "amplitude"}),
}


def from_spec(spec: Mapping[str, Any]) -> AmbientField:
    """Build a field from a mapping such as ``{"type": "radial_bump", "width": 0.4}``."""
    if not isinstance(spec, Mapping) or "type" not in spec:
        raise ConfigError(f"deformation spec needs a 'type' key: {spec!r}")
    kind = spec["type"]
    if kind not in _BUILDERS:
        raise ConfigError(f"unknown deformation type {kind!r}; expected one of {sorted(_BUILDERS)}")
    fn, allowed = _BUILDERS[kind]
    params = {k: v for k, v in spec.items() if k not in ("type", "name")}
    extra = set(params) - allowed
    if extra:
        raise ConfigError(f"{kind}: unexpected parameters {sorted(extra)}")
    return fn(**params)
