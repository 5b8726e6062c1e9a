"""Diophantine rotation numbers and the cohomological equation on T^2.

Functions on T^2 are stored as centred complex Fourier coefficients
``coeffs[m + M, n + N]`` for |m| <= M, |n| <= N, with the reality constraint
coeffs[-m, -n] = conj(coeffs[m, n]). Functions on S^1 use the slice m = 0.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _spectral as sp
from .errors import NonzeroAverage, NotDiophantineUpTo, SmallDivisorOverflow
from .surface import DeformationField, MetricData, TangentField

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class DiophantineWitness:
    omega: float
    C: float
    tau: float
    q_max: int
    C_discrete: float


def check_diophantine(omega: float, C: float = 0.1, tau: float = 1.0, q_max: int = 10_000) -> DiophantineWitness:
    """Verify |omega - p/q| >= C q^-(tau+1) for 1 <= q <= q_max.

    Also reports the largest C' with |e^{2 pi i omega q} - 1| >= C' q^-tau on the same range.
    """
    if q_max < 1:
        raise ValueError("q_max must be at least 1")
    q = np.arange(1, q_max + 1, dtype=float)
    # exact nearest-integer distance of q * omega, using the float product
    qw = q * omega
    dist = np.abs(qw - np.rint(qw))
    bad = np.nonzero(dist / q < C * q ** -(tau + 1))[0]
    if bad.size:
        raise NotDiophantineUpTo(int(q[bad[0]]))
    disc = np.abs(np.expm1(2j * np.pi * qw))
    c_disc = float((disc * q ** tau).min())
    return DiophantineWitness(float(omega), float(C), float(tau), int(q_max), c_disc)


@dataclass(frozen=True, eq=False)
class TorusFunction:
    coeffs: np.ndarray

    @property
    def band(self) -> tuple[int, int]:
        a, b = self.coeffs.shape
        return (a - 1) // 2, (b - 1) // 2

    @property
    def modes(self) -> tuple[np.ndarray, np.ndarray]:
        M, N = self.band
        return np.arange(-M, M + 1), np.arange(-N, N + 1)

    def mean(self) -> complex:
        M, N = self.band
        return complex(self.coeffs[M, N])

    def is_real(self, tol: float = 1e-14) -> bool:
        c = self.coeffs
        return bool(np.abs(c - np.conj(c[::-1, ::-1])).max() <= tol * max(1.0, np.abs(c).max()))

    def evaluate(self, phi, theta) -> np.ndarray:
        m, n = self.modes
        phi, theta = np.broadcast_arrays(np.asarray(phi, float), np.asarray(theta, float))
        bp = np.exp(2j * np.pi * np.multiply.outer(phi.ravel(), m))
        bt = np.exp(2j * np.pi * np.multiply.outer(theta.ravel(), n))
        return np.real(np.einsum("pa,ab,pb->p", bp, self.coeffs, bt)).reshape(phi.shape)

    def on_grid(self, n_phi: int, n_theta: int) -> np.ndarray:
        P, T = np.meshgrid(sp.grid(n_phi), sp.grid(n_theta), indexing="ij")
        return self.evaluate(P, T)

    def derivative(self, dphi: int = 0, dtheta: int = 0) -> "TorusFunction":
        m, n = self.modes
        return TorusFunction(self.coeffs * (2j * np.pi * m[:, None]) ** dphi * (2j * np.pi * n[None, :]) ** dtheta)

    def __add__(self, other: "TorusFunction") -> "TorusFunction":
        return TorusFunction(self.coeffs + other.coeffs)

    def scale(self, s: float) -> "TorusFunction":
        return TorusFunction(s * self.coeffs)

    @classmethod
    def from_circle(cls, mu: np.ndarray, m_band: int = 0) -> "TorusFunction":
        """Embed centred circle coefficients mu[n + N] as a theta-only function."""
        mu = np.asarray(mu, dtype=complex)
        out = np.zeros((2 * m_band + 1, mu.size), dtype=complex)
        out[m_band] = mu
        return cls(out)

    @classmethod
    def from_grid(cls, values: np.ndarray) -> "TorusFunction":
        """Coefficients of the symmetric trigonometric interpolant of grid data."""
        _, _, C = sp.symmetric_modes_2d(values)
        return cls(C)

    @classmethod
    def random(cls, seed: int, band: tuple[int, int], decay: float = 0.0) -> "TorusFunction":
        """Seeded real band-limited zero-mean function, coefficient size ~ exp(-decay |k|)."""
        rng = np.random.default_rng(seed)
        M, N = band
        c = rng.standard_normal((2 * M + 1, 2 * N + 1)) + 1j * rng.standard_normal((2 * M + 1, 2 * N + 1))
        m, n = np.arange(-M, M + 1), np.arange(-N, N + 1)
        c *= np.exp(-decay * np.hypot(m[:, None], n[None, :]))
        c = 0.5 * (c + np.conj(c[::-1, ::-1]))
        c[M, N] = 0
        return cls(c)


def _divisor(tf: TorusFunction, omega: float) -> np.ndarray:
    m, n = tf.modes
    return m[:, None] + omega * n[None, :]


def solve_cohomological(Phi: TorusFunction, omega: float, floor: float = 1e-8, avg_tol: float = 1e-14) -> TorusFunction:
    """psi with d_phi psi + omega d_theta psi = Phi and zero mean."""
    scale = max(1.0, np.abs(Phi.coeffs).max())
    if abs(Phi.mean()) > avg_tol * scale:
        raise NonzeroAverage(f"Phi has mean {Phi.mean():.3e}")
    s = _divisor(Phi, omega)
    M, N = Phi.band
    s_nz = s.copy()
    s_nz[M, N] = np.inf
    small = np.abs(s_nz) < floor
    if np.any(small & (Phi.coeffs != 0)):
        i, j = np.argwhere(small & (Phi.coeffs != 0))[0]
        raise SmallDivisorOverflow(f"|m + n omega| below {floor} at (m, n) = ({i - M}, {j - N})")
    with np.errstate(divide="ignore", invalid="ignore"):
        psi = np.where(small, 0.0, Phi.coeffs / (2j * np.pi * s_nz))
    psi[M, N] = 0
    return TorusFunction(psi)


def transport(psi: TorusFunction, omega: float) -> TorusFunction:
    """<(1, omega), grad psi>."""
    return TorusFunction(psi.coeffs * 2j * np.pi * _divisor(psi, omega))


def cohomological_residual(psi: TorusFunction, Phi: TorusFunction, omega: float, grid: int = 128) -> float:
    """Sup over a uniform grid of |<(1, omega), grad psi> - Phi|."""
    diff = TorusFunction(transport(psi, omega).coeffs - Phi.coeffs)
    return float(np.abs(diff.on_grid(grid, grid)).max())


def _check_circle_mean(mu: np.ndarray, tol: float = 1e-14):
    N = (mu.size - 1) // 2
    if abs(mu[N]) > tol * max(1.0, np.abs(mu).max()):
        raise NonzeroAverage(f"mu has mean {mu[N]:.3e}")


def mu_to_Phi(mu: np.ndarray, omega: float) -> TorusFunction:
    """theta-only Phi whose average along the (1, omega) flow segment is mu.

    ``mu`` holds centred coefficients mu[n + N]; Phi_n = 2 pi i n omega / (e^{2 pi i n omega} - 1) mu_n.
    """
    mu = np.asarray(mu, dtype=complex)
    _check_circle_mean(mu)
    N = (mu.size - 1) // 2
    n = np.arange(-N, N + 1)
    s = n * omega
    phi = np.zeros_like(mu)
    nz = n != 0
    phi[nz] = 2j * np.pi * s[nz] / np.expm1(2j * np.pi * s[nz]) * mu[nz]
    return TorusFunction.from_circle(phi)


def averaging_operator(Phi: TorusFunction, omega: float) -> np.ndarray:
    """Centred circle coefficients of theta -> int_0^1 Phi(phi, theta + omega phi) dphi."""
    return (Phi.coeffs * sp.averaging_factor(_divisor(Phi, omega))).sum(axis=0)


def circle_evaluate(mu: np.ndarray, theta) -> np.ndarray:
    N = (len(mu) - 1) // 2
    n = np.arange(-N, N + 1)
    return np.real(np.exp(2j * np.pi * np.multiply.outer(np.asarray(theta, float), n)) @ mu)


def circle_from_samples(values: np.ndarray) -> np.ndarray:
    """Centred coefficients of the symmetric interpolant of uniform samples."""
    return sp.symmetric_modes_1d(values)[1]


def tangential_deformation_from_mu(
    grid_size: tuple[int, int], mu: np.ndarray, omega: float, floor: float = 1e-8
) -> tuple[DeformationField, TorusFunction, TorusFunction]:
    """V_Gamma = -psi d_theta with <(1, omega), grad psi> = mu_to_Phi(mu).

    Returns the deformation on the grid together with Phi and psi.
    """
    Phi = mu_to_Phi(mu, omega)
    psi = solve_cohomological(Phi, omega, floor)
    vals = psi.on_grid(*grid_size)
    z = np.zeros(grid_size)
    return DeformationField(z, z.copy(), -vals), Phi, psi


def normal_average_generator(metric: MetricData, chi: np.ndarray) -> DeformationField:
    """Normal deformation f = 1 / (sqrt_g chi), which makes div_Gamma(f B) vanish for B = chi X."""
    if not np.all(chi > 0):
        raise ValueError("chi must be positive")
    z = np.zeros_like(chi)
    return DeformationField(1.0 / (metric.sqrt_g * chi), z, z.copy())


def synthetic_linearized_metric(grid_size: tuple[int, int], R_T: float = 2.0, r_P: float = 1.0) -> tuple[MetricData, np.ndarray]:
    """Axisymmetric metric data with chi = 1, for fields B = chi (d_phi + omega d_theta).

    Such a B is synthetic: it is not the harmonic field of the torus unless omega = 0
    and chi = 1 / (4 pi^2 R^2).
    """
    from .axisym import AxisymTorus

    metric = AxisymTorus(R_T, r_P, grid_size).exact_metric()
    return metric, np.ones(grid_size)


def synthetic_pi_prime(
    grid_size: tuple[int, int], mu: np.ndarray, omega: float, R_T: float = 2.0, r_P: float = 1.0
) -> tuple[np.ndarray, np.ndarray, DeformationField]:
    """Pi' produced by the tangential deformation built from mu, on synthetic linearized data.

    Runs the general X' assembly with B = d_phi + omega d_theta and the mode-wise
    averaging along the linear flow. Returns (theta, Pi', deformation).
    """
    from .neumann import NeumannSolution
    from .shape_derivative import pi_prime_linearized, x_prime_theta

    metric, chi = synthetic_linearized_metric(grid_size, R_T, r_P)
    B = TangentField(chi, omega * chi)
    V, _, _ = tangential_deformation_from_mu(grid_size, mu, omega)
    # the Neumann datum div(f B) vanishes for a purely tangential V, so u_V = 0
    z = np.zeros(grid_size)
    uV = NeumannSolution(z, z.copy(), TangentField(z.copy(), z.copy()))
    xp = x_prime_theta(metric, B, V, uV)
    theta = sp.grid(grid_size[1])
    return theta, pi_prime_linearized(omega, xp, theta), V
