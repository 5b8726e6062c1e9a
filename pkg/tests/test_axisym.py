import numpy as np
import pytest

from poincare_shape import deformations as deform
from poincare_shape.axisym import (
    AxisymTorus,
    closed_form_pi_prime,
    default_test_functions,
    gaussian_peak,
    normal_flux_average,
    toroidal_averaging_residuals,
)
from poincare_shape.errors import ConfigError
from poincare_shape.shape_derivative import prepare, shape_derivative
from poincare_shape.surface import DeformationField, build_surface, compute_metric
from poincare_shape.validation import validate_axisym

PI2 = np.pi ** 2


@pytest.fixture(scope="module")
def torus():
    return AxisymTorus(2.0, 1.0, 32)


def test_invalid_radii():
    with pytest.raises(ConfigError):
        AxisymTorus(1.0, 1.0)


def test_exact_fields(torus, axisym_state32):
    em = torus.exact_metric()
    m = compute_metric(torus.surface)
    for a in ("gpp", "gpt", "gtt", "sqrt_g", "iipp", "iipt", "iitt"):
        ref = getattr(em, a)
        assert np.abs(getattr(m, a) - ref).max() < 1e-10 * max(1.0, np.abs(ref).max())
    assert np.allclose(m.n, em.n, atol=1e-12)
    assert np.abs(em.iipp[:, 8]).max() < 1e-12
    B = torus.exact_harmonic().B
    assert B.v_phi[0, 0] == pytest.approx(1 / (36 * PI2))
    assert np.abs(axisym_state32.harmonic.B.v_phi - B.v_phi).max() < 1e-10 * B.v_phi.max()


def _tangential(shape, rng):
    return DeformationField(np.zeros(shape), rng.standard_normal(shape), rng.standard_normal(shape))


def test_formula_examples(torus, axisym_state32, rng):
    shape = axisym_state32.metric.grid_size
    res = shape_derivative(axisym_state32, _tangential(shape, rng))
    assert not closed_form_pi_prime(torus, res.uV).any()
    assert normal_flux_average(res.uV) == 0
    unit = DeformationField(np.ones(shape), np.zeros(shape), np.zeros(shape))
    assert np.abs(closed_form_pi_prime(torus, shape_derivative(axisym_state32, unit).uV)).max() < 1e-12
    for seed in range(2):
        res = shape_derivative(axisym_state32, deform.random_polynomial(seed))
        assert np.abs(closed_form_pi_prime(torus, res.uV)).max() < 1e-4
        assert np.abs(closed_form_pi_prime(torus, res.uV) - res.Pi_prime).max() < 1e-8


def test_lemmas(torus, axisym_state32):
    ez = shape_derivative(axisym_state32, deform.constant((0, 0, 1)))
    assert normal_flux_average(ez.uV) < 1e-6
    r1 = shape_derivative(axisym_state32, deform.random_polynomial(1))
    both = shape_derivative(axisym_state32, deform.add(deform.constant((0, 0, 1)), deform.random_polynomial(1)))
    nd = both.uV.normal_derivative() - ez.uV.normal_derivative() - r1.uV.normal_derivative()
    assert np.abs(nd).max() < 1e-10
    fs = default_test_functions(torus)
    fs["const"] = np.ones(32)
    res = toroidal_averaging_residuals(r1.uV, axisym_state32.metric, fs)
    assert res["const"] < 1e-14
    assert all(v < 1e-5 for v in res.values())
    assert toroidal_averaging_residuals(ez.uV, axisym_state32.metric, {"cos": fs["cos(2pi theta)"]})["cos"] < 1e-6


def test_gaussian_peak_width():
    th = np.linspace(0, 1, 400, endpoint=False)
    R = np.ones_like(th)
    wide = gaussian_peak(th, 0.3, 0.2, R)
    narrow = gaussian_peak(th, 0.3, 0.05, R)
    assert th[np.argmax(narrow)] == pytest.approx(0.3, abs=3e-3)
    assert (narrow > 0.5).mean() < (wide > 0.5).mean()


def test_noncircular_axisymmetric_cross_section():
    # elliptic cross-section, semi-axes 0.8 (radial) and 1.2 (vertical)
    a, b, R_T = 0.8, 1.2, 2.0
    cf = {
        (1, 0): np.array([[R_T, 0, 0], [0, R_T, 0]]),
        (1, 1): np.array([[a / 2, 0, 0], [0, a / 2, 0]]),
        (1, -1): np.array([[a / 2, 0, 0], [0, a / 2, 0]]),
        (0, 1): np.array([[0, 0, 0], [0, 0, b]]),
    }
    state = prepare(build_surface(cf, 32))
    assert np.abs(state.poincare.displacement).max() < 1e-10
    for seed in range(2):
        assert np.abs(shape_derivative(state, deform.random_polynomial(seed)).Pi_prime).max() < 1e-3


def test_validate_axisym_suite():
    checks, curves = validate_axisym(2.0, 1.0, 32, n_random=2)
    assert all(c.passed for c in checks), [c.line() for c in checks if not c.passed]
    assert "e_z general" in curves
