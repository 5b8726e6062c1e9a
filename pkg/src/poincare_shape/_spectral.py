"""FFT utilities on uniform periodic grids with period 1.

Even grid sizes carry a Nyquist mode; it is treated symmetrically (split
between +N/2 and -N/2) so interpolants of real data stay real and derivatives
of the interpolant are consistent with the values it reproduces.
"""
from __future__ import annotations

import numpy as np


def wavenumbers(n: int) -> np.ndarray:
    """Integer wavenumbers in FFT order."""
    return np.fft.fftfreq(n, 1.0 / n)


def diff(f: np.ndarray, axis: int = 0, order: int = 1) -> np.ndarray:
    """Spectral derivative of a real periodic grid function along ``axis``."""
    n = f.shape[axis]
    k = wavenumbers(n)
    if order % 2 == 1 and n % 2 == 0:
        k = k.copy()
        k[n // 2] = 0.0
    shape = [1] * f.ndim
    shape[axis] = n
    mult = ((2j * np.pi * k) ** order).reshape(shape)
    return np.real(np.fft.ifft(np.fft.fft(f, axis=axis) * mult, axis=axis))


def grid(n: int) -> np.ndarray:
    return np.arange(n) / n


def _split_nyquist(c: np.ndarray, axis: int) -> tuple[np.ndarray, np.ndarray]:
    """Reorder FFT coefficients along ``axis`` to wavenumbers -N/2..N/2.

    For even N the Nyquist coefficient appears twice with half weight.
    Returns (wavenumbers, coefficients).
    """
    n = c.shape[axis]
    c = np.moveaxis(c, axis, 0)
    if n % 2 == 0:
        half = n // 2
        k = np.arange(-half, half + 1)
        out = np.concatenate([0.5 * c[half:half + 1], c[half + 1:], c[:half], 0.5 * c[half:half + 1]])
    else:
        half = n // 2
        k = np.arange(-half, half + 1)
        out = np.concatenate([c[half + 1:], c[:half + 1]])
    return k.astype(float), np.moveaxis(out, 0, axis)


def symmetric_modes_2d(f: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Fourier coefficients of a (Nphi, Ntheta) grid function.

    Returns ``(kphi, ktheta, C)`` with ``f(phi, theta) = Re sum C[a, b]
    exp(2 pi i (kphi[a] phi + ktheta[b] theta))`` reproducing the grid values.
    """
    c = np.fft.fft2(f) / f.size
    kp, c = _split_nyquist(c, 0)
    kt, c = _split_nyquist(c, 1)
    return kp, kt, c


def symmetric_modes_1d(f: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    c = np.fft.fft(f) / f.size
    return _split_nyquist(c, 0)


class TrigInterpolant2D:
    """Trigonometric interpolant of a doubly periodic grid function."""

    def __init__(self, values: np.ndarray, dphi: int = 0, dtheta: int = 0):
        self.kphi, self.ktheta, coeffs = symmetric_modes_2d(np.asarray(values, dtype=float))
        self.coeffs = coeffs * (2j * np.pi * self.kphi[:, None]) ** dphi * (2j * np.pi * self.ktheta[None, :]) ** dtheta

    def derivative(self, dphi: int = 0, dtheta: int = 0) -> "TrigInterpolant2D":
        out = object.__new__(TrigInterpolant2D)
        out.kphi, out.ktheta = self.kphi, self.ktheta
        out.coeffs = self.coeffs * (2j * np.pi * self.kphi[:, None]) ** dphi * (2j * np.pi * self.ktheta[None, :]) ** dtheta
        return out

    def theta_coefficients(self, phi: float) -> np.ndarray:
        return np.exp(2j * np.pi * self.kphi * phi) @ self.coeffs

    def at_phi(self, phi: float, theta: np.ndarray) -> np.ndarray:
        """Evaluate at a single ``phi`` and an array of ``theta`` values."""
        a = self.theta_coefficients(phi)
        theta = np.asarray(theta, dtype=float)
        basis = np.exp(2j * np.pi * np.multiply.outer(theta, self.ktheta))
        return np.real(basis @ a)

    def __call__(self, phi, theta) -> np.ndarray:
        """Pointwise evaluation at broadcast arrays ``phi``, ``theta``."""
        phi, theta = np.broadcast_arrays(np.asarray(phi, float), np.asarray(theta, float))
        bp = np.exp(2j * np.pi * np.multiply.outer(phi.ravel(), self.kphi))
        bt = np.exp(2j * np.pi * np.multiply.outer(theta.ravel(), self.ktheta))
        vals = np.einsum("pa,ab,pb->p", bp, self.coeffs, bt)
        return np.real(vals).reshape(phi.shape)


class TrigInterpolant1D:
    """Trigonometric interpolant of a periodic grid function on [0, 1)."""

    def __init__(self, values: np.ndarray):
        self.k, self.coeffs = symmetric_modes_1d(np.asarray(values, dtype=float))

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.real(np.exp(2j * np.pi * np.multiply.outer(x, self.k)) @ self.coeffs)

    def derivative(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.real(np.exp(2j * np.pi * np.multiply.outer(x, self.k)) @ (2j * np.pi * self.k * self.coeffs))


def dirichlet_weights(x: np.ndarray, n: int) -> np.ndarray:
    """Weights w[j] with sum_j w[j] f(j/n) = symmetric trig interpolant at x.

    ``x`` is an array of offsets; the result has shape ``x.shape + (n,)``.
    """
    s = grid(n)
    d = np.asarray(x, dtype=float)[..., None] - s
    if n % 2 == 0:
        k = np.arange(1, n // 2)
        out = 1.0 + 2.0 * np.cos(2 * np.pi * d[..., None] * k).sum(-1) + np.cos(np.pi * n * d)
    else:
        k = np.arange(1, n // 2 + 1)
        out = 1.0 + 2.0 * np.cos(2 * np.pi * d[..., None] * k).sum(-1)
    return out / n


def shift_grid_values(fhat: np.ndarray, dphi: float, dtheta: float) -> np.ndarray:
    """Values of the interpolant at every grid point shifted by (dphi, dtheta).

    ``fhat`` is ``fft2`` of the grid data over the first two axes.
    """
    nphi, ntheta = fhat.shape[:2]
    sp = _shift_factor(nphi, dphi)
    st = _shift_factor(ntheta, dtheta)
    extra = (None,) * (fhat.ndim - 2)
    return np.real(np.fft.ifft2(fhat * sp[(slice(None), None) + extra] * st[(None, slice(None)) + extra], axes=(0, 1)))


def _shift_factor(n: int, d: float) -> np.ndarray:
    k = wavenumbers(n)
    f = np.exp(2j * np.pi * k * d)
    if n % 2 == 0:
        f[n // 2] = np.cos(np.pi * n * d)
    return f


def averaging_factor(s: np.ndarray) -> np.ndarray:
    """(e^{2 pi i s} - 1) / (2 pi i s), equal to 1 at s = 0."""
    s = np.asarray(s, dtype=float)
    out = np.ones(s.shape, dtype=complex)
    nz = s != 0
    out[nz] = np.expm1(2j * np.pi * s[nz]) / (2j * np.pi * s[nz])
    return out
