import numpy as np
import pytest

from poincare_shape.shape_derivative import PipelineOptions, prepare
from poincare_shape.surface import axisymmetric_surface, compute_metric, perturbed_torus


@pytest.fixture(scope="session")
def axisym32():
    return axisymmetric_surface(2.0, 1.0, 32)


@pytest.fixture(scope="session")
def axisym64():
    return axisymmetric_surface(2.0, 1.0, 64)


@pytest.fixture(scope="session")
def perturbed32():
    return perturbed_torus(2.0, 1.0, 0.1, (2, 1), 32)


@pytest.fixture(scope="session")
def axisym_state32(axisym32):
    return prepare(axisym32, PipelineOptions())


@pytest.fixture(scope="session")
def perturbed_state32(perturbed32):
    return prepare(perturbed32, PipelineOptions())


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def harmonic_oracles():
    """(name, u, grad u) for harmonic polynomials."""
    return [
        ("z", lambda p: p[..., 2], lambda p: np.stack([0 * p[..., 0], 0 * p[..., 0], 1 + 0 * p[..., 0]], -1)),
        (
            "x2-y2",
            lambda p: p[..., 0] ** 2 - p[..., 1] ** 2,
            lambda p: np.stack([2 * p[..., 0], -2 * p[..., 1], 0 * p[..., 0]], -1),
        ),
    ]


def oracle_error(surface, name):
    from poincare_shape.neumann import NeumannProblem, solve_neumann

    metric = compute_metric(surface)
    _, u, grad = next(o for o in harmonic_oracles() if o[0] == name)
    E = surface.points
    g = (grad(E) * metric.n).sum(-1)
    sol = solve_neumann(NeumannProblem(surface, metric, g - metric.weighted_mean(g)))
    exact = u(E) - metric.weighted_mean(u(E))
    w = metric.weights
    return float(np.sqrt(((sol.trace - exact) ** 2 * w).sum() / (exact ** 2 * w).sum())), sol, metric


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def record():
    """Print one PASS/FAIL line per acceptance criterion and keep it for the terminal summary."""

    def _record(criterion: str, passed: bool, detail: str) -> bool:
        line = f"{'PASS' if passed else 'FAIL'}  {criterion}: {detail}"
        print(line)
        ACCEPTANCE_LINES.append(line)
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
