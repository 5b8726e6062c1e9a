"""Interior Laplace-Neumann solver on toroidal surfaces.

The potential is a single layer u = S sigma with G(x, y) = 1 / (4 pi |x - y|).
Its interior normal derivative is (1/2 + K') sigma, so the Neumann problem
becomes a second-kind equation for sigma. The constant nullspace is removed
by bordering the system with the constraint  int sigma dA = 0.

Quadrature: a smooth partition of unity splits each row into a far part,
integrated with the periodic trapezoid rule, and a near part integrated in
polar coordinates centred on the target, where the Jacobian rho cancels the
1/r singularity. Off-grid source values are obtained by trigonometric
interpolation, so the near part is folded back onto the grid unknowns.
"""
from __future__ import annotations

import weakref
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lapack, lu_factor, lu_solve

from . import _spectral as sp
from .errors import ConfigError, IllConditioned, IncompatibleDatum, TooCloseToBoundary
from .surface import FourierSurface, MetricData, TangentField, surface_gradient


@dataclass(frozen=True)
class QuadratureOptions:
    patch_radius: float = 0.4
    radial_nodes: int = 24
    angular_nodes: int = 48
    row_chunk: int = 256
    max_condition: float = 1e10


def _cutoff(x: np.ndarray) -> np.ndarray:
    """C-infinity bump equal to 1 at 0, vanishing with all derivatives at 1."""
    out = np.zeros_like(x)
    out[x <= 0] = 1.0
    m = (x > 0) & (x < 1)
    xm = x[m]
    out[m] = np.exp(2 * np.exp(-1 / xm) / (xm - 1))
    return out


class NeumannOperator:
    """Discretized layer operators for one surface, with a cached factorization."""

    def __init__(self, surface: FourierSurface, metric: MetricData, opts: QuadratureOptions | None = None):
        # no reference to the surface is kept: the operator cache is keyed weakly on it
        self.grid_size = surface.grid_size
        self.metric = metric
        self.opts = opts = opts or QuadratureOptions()
        n1, n2 = surface.grid_size
        M = n1 * n2
        self.points = surface.points.reshape(M, 3)
        self.normals = metric.n.reshape(M, 3)
        self.w = metric.weights.ravel()
        aug = np.zeros((M + 1, M + 1))
        self.single = self._assemble(surface.points, aug[:M, :M])
        aug[:M, :M] += 0.5 * np.eye(M)
        aug[:M, M] = 1.0
        # constraint row scaled to O(1) entries
        aug[M, :M] = self.w / self.w.mean()
        self._aug = aug
        self.system = aug[:M, :M]
        self._lu = lu_factor(aug, check_finite=False)
        anorm = np.abs(aug).sum(0).max()
        rcond, info = lapack.dgecon(self._lu[0], anorm, norm="1")
        self.condition = np.inf if rcond == 0 else 1.0 / rcond
        if self.condition > opts.max_condition:
            raise IllConditioned(f"estimated condition number {self.condition:.3e}")

    def _assemble(self, E: np.ndarray, K: np.ndarray) -> np.ndarray:
        """Return the single-layer matrix and write the adjoint double-layer matrix into ``K``."""
        o = self.opts
        n1, n2 = self.grid_size
        M = n1 * n2
        X, nn, w = self.points, self.normals, self.w
        ii, jj = np.divmod(np.arange(M), n2)
        S = np.empty((M, M))
        for r0 in range(0, M, o.row_chunk):
            rows = slice(r0, min(r0 + o.row_chunk, M))
            dphi = (ii[None, :] - ii[rows, None]) / n1
            dphi -= np.round(dphi)
            dth = (jj[None, :] - jj[rows, None]) / n2
            dth -= np.round(dth)
            far = 1.0 - _cutoff(np.hypot(dphi, dth) / o.patch_radius)
            D = X[None, :, :] - X[rows, None, :]
            r = np.sqrt((D ** 2).sum(-1))
            r[far == 0] = 1.0
            S[rows] = far * w[None, :] / (4 * np.pi * r)
            K[rows] = far * (D * nn[rows, None, :]).sum(-1) / (4 * np.pi * r ** 3) * w[None, :]

        xg, wg = np.polynomial.legendre.leggauss(o.radial_nodes)
        rho = 0.5 * (xg + 1) * o.patch_radius
        wr = 0.5 * wg * o.patch_radius
        alpha = 2 * np.pi * np.arange(o.angular_nodes) / o.angular_nodes
        RR, AA = np.meshgrid(rho, alpha, indexing="ij")
        dp = (RR * np.cos(AA)).ravel()
        dt = (RR * np.sin(AA)).ravel()
        wq = (wr[:, None] * (2 * np.pi / o.angular_nodes) * RR * _cutoff(RR / o.patch_radius)).ravel()
        nq = dp.size

        geo = np.concatenate([E, sp.diff(E, 0), sp.diff(E, 1)], -1)
        geo_hat = np.fft.fft2(geo, axes=(0, 1))
        CS = np.empty((M, nq))
        CK = np.empty((M, nq))
        for q in range(nq):
            vals = sp.shift_grid_values(geo_hat, dp[q], dt[q]).reshape(M, 9)
            jac = np.linalg.norm(np.cross(vals[:, 3:6], vals[:, 6:9]), axis=-1)
            d = vals[:, :3] - X
            rq = np.linalg.norm(d, axis=-1)
            CS[:, q] = wq[q] * jac / (4 * np.pi * rq)
            CK[:, q] = wq[q] * jac * (d * nn).sum(-1) / (4 * np.pi * rq ** 3)

        Wp = sp.dirichlet_weights(dp, n1)
        Wt = sp.dirichlet_weights(dt, n2)
        W = (Wp[:, :, None] * Wt[:, None, :]).reshape(nq, M)
        sa, sb = np.divmod(np.arange(M), n2)
        rows = np.arange(M)[:, None]
        for r0 in range(0, M, o.row_chunk):
            blk = slice(r0, min(r0 + o.row_chunk, M))
            cols = ((ii[blk, None] + sa[None, :]) % n1) * n2 + (jj[blk, None] + sb[None, :]) % n2
            S[rows[blk], cols] += CS[blk] @ W
            K[rows[blk], cols] += CK[blk] @ W
        return S

    def solve_density(self, g: np.ndarray) -> tuple[np.ndarray, float, float]:
        """Return (sigma, multiplier, relative residual) for a flattened datum."""
        M = g.size
        rhs = np.concatenate([g, [0.0]])
        sol = lu_solve(self._lu, rhs, check_finite=False)
        res = rhs - self._aug @ sol
        # one step of iterative refinement
        sol += lu_solve(self._lu, res, check_finite=False)
        res = rhs - self._aug @ sol
        scale = max(np.abs(rhs).max(), 1e-300)
        return sol[:M], float(sol[M]), float(np.abs(res).max() / scale)


_OPERATORS: "weakref.WeakKeyDictionary[FourierSurface, NeumannOperator]" = weakref.WeakKeyDictionary()


def neumann_operator(surface: FourierSurface, metric: MetricData, opts: QuadratureOptions | None = None) -> NeumannOperator:
    """Operator for ``surface``, reused across solves while the surface is alive."""
    op = _OPERATORS.get(surface)
    if op is None or (opts is not None and op.opts != opts):
        op = NeumannOperator(surface, metric, opts)
        _OPERATORS[surface] = op
    return op


@dataclass(frozen=True, eq=False)
class NeumannProblem:
    surface: FourierSurface
    metric: MetricData
    datum: np.ndarray

    def compatibility_residual(self) -> float:
        return float((self.datum * self.metric.weights).sum())


@dataclass(frozen=True, eq=False)
class NeumannSolution:
    """Single-layer solution; ``trace`` has zero weighted mean."""

    density: np.ndarray
    trace: np.ndarray
    grad_tangential: TangentField
    offset: float = 0.0
    residual: float = 0.0
    operator: NeumannOperator | None = field(default=None, repr=False)

    def normal_derivative(self) -> np.ndarray:
        """Interior normal derivative (1/2 + K') sigma on the grid."""
        if self.operator is None:
            return np.zeros_like(self.trace)
        return (self.operator.system @ self.density.ravel()).reshape(self.trace.shape)


def solve_neumann(
    problem: NeumannProblem,
    opts: QuadratureOptions | None = None,
    compat_tol: float = 1e-10,
    residual_tol: float = 1e-10,
) -> NeumannSolution:
    surface, metric = problem.surface, problem.metric
    g = np.asarray(problem.datum, dtype=float)
    if g.shape != tuple(surface.grid_size):
        raise ConfigError(f"datum shape {g.shape} does not match grid {surface.grid_size}")
    gmax = np.abs(g).max()
    if abs(problem.compatibility_residual()) > compat_tol * max(gmax, 1e-300) * metric.area:
        raise IncompatibleDatum(f"weighted mean of the datum is {problem.compatibility_residual():.3e}")
    shape = g.shape
    if gmax == 0:
        z = np.zeros(shape)
        return NeumannSolution(z, z.copy(), TangentField.zeros(shape))
    op = neumann_operator(surface, metric, opts)
    sigma, _, res = op.solve_density(g.ravel())
    if res > residual_tol:
        raise IllConditioned(f"linear-system residual {res:.3e} exceeds {residual_tol:.1e}")
    u = (op.single @ sigma).reshape(shape)
    offset = metric.weighted_mean(u)
    trace = u - offset
    return NeumannSolution(
        density=sigma.reshape(shape),
        trace=trace,
        grad_tangential=surface_gradient(metric, trace),
        offset=offset,
        residual=res,
        operator=op,
    )


def evaluate_interior(solution: NeumannSolution, point, min_spacings: float = 2.0) -> float:
    """Single-layer potential at an interior point, shifted by the trace offset."""
    op = solution.operator
    x = np.asarray(point, dtype=float)
    if op is None:
        return 0.0
    n1, n2 = op.grid_size
    h = max(
        np.linalg.norm(op.metric.e_phi, axis=-1).max() / n1,
        np.linalg.norm(op.metric.e_theta, axis=-1).max() / n2,
    )
    d = op.points - x
    r = np.linalg.norm(d, axis=-1)
    if r.min() < min_spacings * h:
        raise TooCloseToBoundary(f"distance {r.min():.3e} below {min_spacings} grid spacings ({h:.3e})")
    solid = float(((d * op.normals).sum(-1) / (4 * np.pi * r ** 3) * op.w).sum())
    if solid < 0.5:
        raise ConfigError("point lies outside the domain")
    return float((op.w * solution.density.ravel() / (4 * np.pi * r)).sum() - solution.offset)
