"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 a check failed.
"""
from __future__ import annotations

import argparse
import sys
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import deformations as deform
from .cohomology import (
    GOLDEN,
    averaging_operator,
    check_diophantine,
    circle_evaluate,
    cohomological_residual,
    mu_to_Phi,
    solve_cohomological,
    synthetic_pi_prime,
)
from .dynamics import CircleMap, IntegratorOptions, poincare_map, rotation_number
from .errors import ConfigError, NumericalError, NotDiophantineUpTo
from .harmonic import check_admissible, compute_harmonic, normalize_toroidal
from .io import RunConfig, load_circle_coeffs, load_deformations, load_surface, write_csv, write_json
from .neumann import QuadratureOptions
from .shape_derivative import PipelineOptions, prepare, shape_derivative
from .surface import compute_metric, perturbed_torus
from .validation import check, checks_json, fd_options, random_fields, validate_axisym, validate_fd
from . import _spectral as sp

EXIT_CONFIG, EXIT_NUMERICAL, EXIT_ACCEPTANCE = 2, 3, 4


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="YAML run configuration; command-line flags take precedence")
    p.add_argument("--surface", help="surface description file (YAML)")
    p.add_argument("--grid", type=int, help="grid points per angle (even, >= 16)")
    p.add_argument("--solver-tol", type=float, help="residual bound for the boundary integral solve")
    p.add_argument("--output-dir", help="output directory (default: $POINCARE_SHAPE_OUTPUT or ./poincare_shape_out)")
    p.add_argument("--seed", type=int, help="seed for random deformations")
    p.add_argument("--workers", type=int, help="parallel jobs for FD sweeps")
    p.add_argument("--quiet", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="poincare-shape", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    c = _common()

    sub.add_parser("harmonic", parents=[c], help="boundary harmonic field and admissibility")

    p = sub.add_parser("poincare", parents=[c], help="Poincare map samples and rotation number")
    p.add_argument("--section-samples", type=int, help="number of theta samples of the map")

    p = sub.add_parser("rotation", parents=[c], help="rotation number of a surface map or an Arnold-family map")
    p.add_argument("--omega", type=float, help="Arnold map theta + omega + eps sin(2 pi theta) / (2 pi)")
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--iterates", type=int, default=2 ** 14)

    p = sub.add_parser("shape-derivative", parents=[c], help="analytic Pi' for deformation specs")
    p.add_argument("--deformation", required=True, help="deformation spec file (YAML)")
    p.add_argument("--fd", action="store_true", help="also compute finite-difference estimates")
    p.add_argument("--t-list", type=float, nargs="+", help="FD step sizes, decreasing")

    p = sub.add_parser("validate-axisym", parents=[c], help="symmetry checks on the circular torus")
    p.add_argument("--RT", type=float, default=2.0)
    p.add_argument("--rp", type=float, default=1.0)
    p.add_argument("--n-random", type=int, default=5)
    p.add_argument("--fd", action="store_true", help="include the finite-difference cross-check")

    p = sub.add_parser("validate-fd", parents=[c], help="FD convergence against the analytic Pi'")
    p.add_argument("--deformation", help="deformation spec file; default: three seeded random fields")
    p.add_argument("--t-list", type=float, nargs="+")

    p = sub.add_parser("cohomology", parents=[c], help="tangential deformation reproducing a target Pi'")
    p.add_argument("--omega", type=float, help="rotation number (default: golden mean or the file's value)")
    p.add_argument("--mu", required=True, help="YAML file with the Fourier modes of mu")
    p.add_argument("--q-max", type=int, default=10_000)
    return parser


def _config(args) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    for flag, attr in [("surface", "surface"), ("grid", "grid"), ("solver_tol", "solver_tol"),
                       ("output_dir", "output_dir"), ("seed", "seed"), ("workers", "workers")]:
        val = getattr(args, flag, None)
        if val is not None:
            setattr(cfg, attr, val)
    if getattr(args, "t_list", None):
        cfg.t_list = tuple(args.t_list)
    return cfg.validate()


def _opts(cfg: RunConfig) -> PipelineOptions:
    return PipelineOptions(integrator=IntegratorOptions(rtol=cfg.rtol, atol=cfg.atol))


def _surface(cfg: RunConfig, required: bool = True):
    if cfg.surface is None:
        if required:
            raise ConfigError("--surface is required for this command")
        return None
    return load_surface(cfg.surface, cfg.grid)


class _Run:
    def __init__(self, command: str, cfg: RunConfig, quiet: bool):
        self.command, self.cfg, self.quiet = command, cfg, quiet
        self.out = Path(cfg.output_dir)
        self.checks, self.scalars, self.files = [], {}, []

    def csv(self, name, header, rows):
        self.files.append(str(write_csv(self.out / name, header, rows)))

    def finish(self) -> int:
        ok = all(c.passed for c in self.checks)
        doc = {
            "command": self.command,
            "status": "pass" if ok else "fail",
            "checks": checks_json(self.checks),
            "scalars": self.scalars,
            "files": self.files,
            "config": asdict(self.cfg),
        }
        path = write_json(self.out / f"{self.command}_summary.json", doc)
        if not self.quiet:
            for c in self.checks:
                print(c.line())
            for k, v in self.scalars.items():
                if not isinstance(v, (list, tuple, np.ndarray)):
                    print(f"{k} = {v}")
            print(f"summary: {path}")
        return 0 if ok else EXIT_ACCEPTANCE


def cmd_harmonic(args, run: _Run):
    s = _surface(run.cfg)
    m = compute_metric(s)
    h = compute_harmonic(s, m, QuadratureOptions())
    rep = check_admissible(h)
    nf = normalize_toroidal(h) if rep.admissible else None
    P, T = np.meshgrid(s.phi, s.theta, indexing="ij")
    xt = nf.X_theta if nf is not None else np.full(P.shape, np.nan)
    run.csv("harmonic_field.csv", ["phi [turns]", "theta [turns]", "B_phi [1/length^2]", "B_theta [1/length^2]", "X_theta [1]"],
            zip(P.ravel(), T.ravel(), h.B.v_phi.ravel(), h.B.v_theta.ravel(), xt.ravel()))
    run.scalars.update(b_phi_min=rep.b_phi_min, admissible=rep.admissible, argmin=list(rep.argmin),
                       circulation_max_deviation=float(np.abs(h.circulation - 1).max()))
    run.checks.append(check("B^phi positive (admissibility)", rep.b_phi_min, 0.0, ">="))


def cmd_poincare(args, run: _Run):
    s = _surface(run.cfg)
    m = compute_metric(s)
    nf = normalize_toroidal(compute_harmonic(s, m))
    opts = _opts(run.cfg)
    P, _ = poincare_map(nf, args.section_samples, opts.integrator)
    rho = rotation_number(P)
    run.csv("poincare_map.csv", ["theta [turns]", "Pi(theta) [turns, lift]", "Pi(theta)-theta [turns]"],
            zip(P.theta, P.samples, P.displacement))
    run.scalars.update(rotation_number=rho, monotone=P.is_monotone())


def cmd_rotation(args, run: _Run):
    if args.omega is not None:
        om, eps = args.omega, args.eps
        F = CircleMap.from_function(lambda x: x + om + eps * np.sin(2 * np.pi * x) / (2 * np.pi))
        run.scalars.update(map="arnold", omega=om, eps=eps)
    else:
        s = _surface(run.cfg)
        nf = normalize_toroidal(compute_harmonic(s, compute_metric(s)))
        F, _ = poincare_map(nf, None, _opts(run.cfg).integrator)
        run.scalars.update(map="surface")
    run.scalars.update(rotation_number=rotation_number(F, args.iterates), iterates=args.iterates)


def _fields_from(cfg: RunConfig, path: str | None):
    if path:
        specs = load_deformations(path)
        return [(d.get("name", f"{d['type']}[{i}]"), deform.from_spec(d)) for i, d in enumerate(specs)]
    if cfg.deformations:
        return [(d.get("name", f"{d['type']}[{i}]"), deform.from_spec(d)) for i, d in enumerate(cfg.deformations)]
    return None


def cmd_shape_derivative(args, run: _Run):
    from .shape_derivative import fd_pi_prime

    s = _surface(run.cfg)
    fields = _fields_from(run.cfg, args.deformation)
    opts = fd_options(_opts(run.cfg)) if args.fd else _opts(run.cfg)
    state = prepare(s, opts)
    for name, V in fields:
        res = shape_derivative(state, V)
        slug = "".join(ch if ch.isalnum() else "_" for ch in name)
        if args.fd:
            rep = fd_pi_prime(s, V, run.cfg.t_list, opts, analytic=res.Pi_prime, max_workers=run.cfg.workers)
            fdv = rep.extrapolated
            run.scalars[f"{name} observed_order"] = rep.observed_order
            run.scalars[f"{name} extrapolated_error"] = rep.extrapolated_error
            run.scalars[f"{name} increments"] = list(rep.increments)
        else:
            fdv = np.full_like(res.Pi_prime, np.nan)
        run.csv(f"pi_prime_{slug}.csv", ["theta [turns]", "Pi_prime [turns/length]", "fd_estimate [turns/length]", "difference [turns/length]"],
                zip(res.theta, res.Pi_prime, fdv, fdv - res.Pi_prime))
        run.scalars[f"{name} sup_pi_prime"] = float(np.abs(res.Pi_prime).max())
        run.scalars[f"{name} mean_pi_prime"] = float(res.Pi_prime.mean())


def cmd_validate_axisym(args, run: _Run):
    checks, curves = validate_axisym(args.RT, args.rp, run.cfg.grid or 64, args.n_random, run.cfg.seed,
                                     fd=args.fd, t_list=run.cfg.t_list, opts=_opts(run.cfg))
    run.checks.extend(checks)
    keys = [k for k in curves if k != "theta"]
    run.csv("axisym_pi_prime.csv", ["theta [turns]"] + [f"{k} [turns/length]" for k in keys],
            zip(curves["theta"], *[curves[k] for k in keys]))


def cmd_validate_fd(args, run: _Run):
    s = _surface(run.cfg, required=False) or perturbed_torus(grid_size=run.cfg.grid or 64)
    fields = _fields_from(run.cfg, args.deformation) or random_fields(run.cfg.seed, 3)
    checks, rep = validate_fd(s, fields, run.cfg.t_list, _opts(run.cfg), run.cfg.workers)
    run.checks.extend(checks)
    run.scalars["seconds"] = rep["seconds"]
    for name, r in rep["fields"].items():
        slug = "".join(ch if ch.isalnum() else "_" for ch in name)
        run.scalars[f"{name} observed_order"] = r["observed_order"]
        run.scalars[f"{name} extrapolated_error"] = r["extrapolated_error"]
        run.csv(f"fd_{slug}.csv", ["theta [turns]", "Pi_prime [turns/length]", "fd_smallest_t [turns/length]", "fd_extrapolated [turns/length]"],
                zip(rep["theta"], r["analytic"], r["fd"], r["extrapolated"]))


def cmd_cohomology(args, run: _Run):
    mu, file_omega = load_circle_coeffs(args.mu)
    omega = args.omega if args.omega is not None else (file_omega if file_omega is not None else GOLDEN)
    wit = check_diophantine(omega, q_max=args.q_max)
    Phi = mu_to_Phi(mu, omega)
    psi = solve_cohomological(Phi, omega)
    back = averaging_operator(Phi, omega)
    run.checks.append(check("cohomological residual", cohomological_residual(psi, Phi, omega), 1e-10))
    run.checks.append(check("averaging o mu_to_Phi round trip", np.abs(back - mu).max(), 1e-12))
    N = (mu.size - 1) // 2
    g = max(run.cfg.grid or 64, 2 * N + 2)
    g += g % 2
    th_s, pp, _ = synthetic_pi_prime((g, g), mu, omega)
    run.checks.append(check("synthetic Pi' reproduces mu (sup)", np.abs(pp - circle_evaluate(mu, th_s)).max(), 1e-9))
    run.scalars.update(omega=omega, C_discrete=wit.C_discrete, q_max=wit.q_max, band=N)
    run.csv("cohomology_pi_prime.csv", ["theta [turns]", "mu [turns/length]", "Pi_prime [turns/length]"],
            zip(th_s, circle_evaluate(mu, th_s), pp))
    th = sp.grid(256)
    run.csv("cohomology.csv", ["theta [turns]", "mu [1]", "Phi [1]", "psi(phi=0) [turns]"],
            zip(th, circle_evaluate(mu, th), Phi.evaluate(0.0, th), psi.evaluate(0.0, th)))
    n = np.arange(-N, N + 1)
    run.csv("cohomology_modes.csv", ["n [1]", "Re mu_n", "Im mu_n", "Re Phi_n", "Im Phi_n", "Re psi_n", "Im psi_n"],
            zip(n, mu.real, mu.imag, Phi.coeffs[0].real, Phi.coeffs[0].imag, psi.coeffs[0].real, psi.coeffs[0].imag))


COMMANDS = {
    "harmonic": cmd_harmonic,
    "poincare": cmd_poincare,
    "rotation": cmd_rotation,
    "shape-derivative": cmd_shape_derivative,
    "validate-axisym": cmd_validate_axisym,
    "validate-fd": cmd_validate_fd,
    "cohomology": cmd_cohomology,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        run = _Run(args.command, cfg, args.quiet)
        t0 = time.perf_counter()
        COMMANDS[args.command](args, run)
        run.scalars.setdefault("wall_seconds", round(time.perf_counter() - t0, 3))
        return run.finish()
    except NotDiophantineUpTo as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
