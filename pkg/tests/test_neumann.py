import numpy as np
import pytest

from conftest import oracle_error
from poincare_shape.errors import ConfigError, IncompatibleDatum, TooCloseToBoundary
from poincare_shape.neumann import NeumannProblem, evaluate_interior, solve_neumann
from poincare_shape.surface import compute_metric


def test_zero_datum(axisym32):
    m = compute_metric(axisym32)
    sol = solve_neumann(NeumannProblem(axisym32, m, np.zeros(m.grid_size)))
    assert not sol.density.any() and not sol.trace.any() and not sol.grad_tangential.v_phi.any()


def test_incompatible_datum(axisym32):
    m = compute_metric(axisym32)
    with pytest.raises(IncompatibleDatum):
        solve_neumann(NeumannProblem(axisym32, m, np.ones(m.grid_size)))


def test_wrong_shape(axisym32):
    m = compute_metric(axisym32)
    with pytest.raises(ConfigError):
        solve_neumann(NeumannProblem(axisym32, m, np.zeros((16, 16))))


@pytest.mark.parametrize("name, tol", [("z", 5e-5), ("x2-y2", 5e-4)])
def test_oracles_at_32(axisym32, name, tol):
    err, _, _ = oracle_error(axisym32, name)
    assert err < tol


def test_oracle_on_perturbed_surface(perturbed32):
    err, _, _ = oracle_error(perturbed32, "z")
    assert err < 1e-4


def test_gradient_is_tangential_projection(axisym32):
    _, sol, m = oracle_error(axisym32, "z")
    ez = np.array([0.0, 0.0, 1.0])
    proj = ez - m.n[..., 2:3] * m.n
    assert np.abs(m.ambient(sol.grad_tangential) - proj).max() < 1e-3


def test_normal_derivative_reproduces_datum(axisym32):
    _, sol, m = oracle_error(axisym32, "z")
    assert np.abs(sol.normal_derivative() - m.n[..., 2]).max() < 1e-9


def test_interior_evaluation(axisym64):
    _, sol, _ = oracle_error(axisym64, "z")
    assert abs(evaluate_interior(sol, [2.0, 0.0, 0.0]) - 0.0) < 1e-4
    assert abs(evaluate_interior(sol, [0.0, 2.2, 0.3]) - 0.3) < 1e-4
    p, h = np.array([2.1, 0.2, 0.1]), 1e-3
    u0 = evaluate_interior(sol, p)
    lap = sum(evaluate_interior(sol, p + h * e) + evaluate_interior(sol, p - h * e) - 2 * u0 for e in np.eye(3)) / h ** 2
    assert abs(lap) < 1e-5
    with pytest.raises(TooCloseToBoundary):
        evaluate_interior(sol, [2.9, 0.0, 0.0])
    with pytest.raises(ConfigError):
        evaluate_interior(sol, [0.0, 0.0, 0.0])
