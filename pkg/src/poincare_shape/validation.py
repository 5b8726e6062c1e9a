"""Validation suites shared by the command line and the acceptance tests."""
from __future__ import annotations

import time
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from . import deformations as deform
from .axisym import (
    AxisymTorus,
    axisym_x_prime,
    closed_form_pi_prime,
    default_test_functions,
    normal_flux_average,
    toroidal_averaging_residuals,
)
from .dynamics import IntegratorOptions, rotation_number
from .shape_derivative import PipelineOptions, fd_pi_prime, prepare, shape_derivative
from .surface import AmbientField, FourierSurface, decompose_deformation


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tolerance: float
    passed: bool
    relation: str = "<="

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: {self.value:.3e} {self.relation} {self.tolerance:.1e}"


def check(name: str, value: float, tol: float, relation: str = "<=") -> Check:
    value = float(value)
    ok = value <= tol if relation == "<=" else value >= tol
    return Check(name, value, float(tol), bool(ok), relation)


def fd_options(base: PipelineOptions | None = None) -> PipelineOptions:
    """Options with tighter integrator tolerances, so FD quotients are not dominated by ODE error."""
    base = base or PipelineOptions()
    return PipelineOptions(base.quadrature, IntegratorOptions(rtol=1e-12, atol=1e-14), base.n_theta, base.linearized_tol)


def random_fields(seed: int, count: int) -> list[tuple[str, AmbientField]]:
    return [(f"random[{seed + k}]", deform.random_polynomial(seed + k)) for k in range(count)]


def validate_axisym(
    R_T: float = 2.0,
    r_P: float = 1.0,
    grid: int = 64,
    n_random: int = 5,
    seed: int = 0,
    fd: bool = False,
    t_list: Sequence[float] = (4e-3, 2e-3, 1e-3),
    opts: PipelineOptions | None = None,
) -> tuple[list[Check], dict]:
    opts = opts or PipelineOptions()
    torus = AxisymTorus(R_T, r_P, grid)
    state = prepare(torus.surface, opts)
    exact = torus.exact_harmonic().B
    checks = []
    bscale = np.abs(exact.v_phi).max()
    berr = max(np.abs(state.harmonic.B.v_phi - exact.v_phi).max(), np.abs(state.harmonic.B.v_theta).max()) / bscale
    checks.append(check("B matches closed form (sup rel)", berr, 1e-8))
    checks.append(check("Poincare map is identity (sup)", np.abs(state.poincare.displacement).max(), 1e-10))
    checks.append(check("rotation number is 0", abs(rotation_number(state.poincare)), 1e-8))

    fields = [("e_z", deform.constant((0, 0, 1)))] + random_fields(seed, n_random)
    curves = {"theta": state.flow.theta0}
    fnames = default_test_functions(torus)
    for name, V in fields:
        Vd = decompose_deformation(V, torus.surface, state.metric)
        res = shape_derivative(state, Vd)
        cf = closed_form_pi_prime(torus, res.uV)
        curves[f"{name} general"] = res.Pi_prime
        curves[f"{name} closed form"] = cf
        checks.append(check(f"{name}: sup |Pi'| general pipeline", np.abs(res.Pi_prime).max(), 1e-4))
        checks.append(check(f"{name}: sup |Pi'| axisymmetric formula", np.abs(cf).max(), 1e-4))
        checks.append(check(f"{name}: general vs axisymmetric formula", np.abs(res.Pi_prime - cf).max(), 1e-8))
        xa = axisym_x_prime(torus, Vd, res.uV)
        checks.append(check(f"{name}: X' general vs closed-form assembly", np.abs(xa - res.X_prime_theta).max(), 1e-10))
        checks.append(check(f"{name}: toroidal average of du/dn", normal_flux_average(res.uV), 1e-6))
        for fname, r in toroidal_averaging_residuals(res.uV, state.metric, fnames).items():
            checks.append(check(f"{name}: toroidal averaging residual, f = {fname}", r, 1e-5))

    if fd:
        fopts = fd_options(opts)
        for name, V in fields[1:]:
            rep = fd_pi_prime(torus.surface, V, t_list, fopts)
            sups = [float(np.abs(e).max()) for e in rep.estimates]
            ratios = [np.log(a / b) / np.log(ta / tb) for a, b, ta, tb in zip(sups, sups[1:], t_list, t_list[1:])]
            checks.append(check(f"{name}: FD quotients decay like t^2 (min order)", min(ratios), 1.9, ">="))
            checks.append(check(f"{name}: FD extrapolated to t = 0 (sup)", np.abs(rep.extrapolated).max(), 1e-8))
            curves[f"{name} fd"] = rep.estimates[-1]
    return checks, curves


def validate_fd(
    surface: FourierSurface,
    fields: Sequence[tuple[str, AmbientField]],
    t_list: Sequence[float] = (4e-3, 2e-3, 1e-3),
    opts: PipelineOptions | None = None,
    workers: int = 1,
    order_tol: float = 1.9,
    discrepancy_tol: float = 1e-3,
) -> tuple[list[Check], dict]:
    opts = fd_options(opts)
    t0 = time.perf_counter()
    state = prepare(surface, opts)
    checks = []
    report = {"theta": state.flow.theta0, "fields": {}}
    for name, V in fields:
        res = shape_derivative(state, V)
        rep = fd_pi_prime(surface, V, t_list, opts, analytic=res.Pi_prime, max_workers=workers)
        checks.append(check(f"{name}: Richardson order of FD quotients", rep.observed_order, order_tol, ">="))
        checks.append(check(f"{name}: |extrapolated FD - analytic Pi'| (sup)", rep.extrapolated_error, discrepancy_tol))
        report["fields"][name] = {
            "analytic": res.Pi_prime,
            "fd": rep.estimates[-1],
            "extrapolated": rep.extrapolated,
            "observed_order": rep.observed_order,
            "increments": rep.increments,
            "errors": rep.errors,
            "error_orders": rep.error_orders,
            "extrapolated_error": rep.extrapolated_error,
            "sup_analytic": float(np.abs(res.Pi_prime).max()),
        }
    report["seconds"] = time.perf_counter() - t0
    return checks, report


def checks_json(checks: Sequence[Check]) -> list[dict]:
    return [asdict(c) for c in checks]
