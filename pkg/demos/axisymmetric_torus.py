"""Circular torus: the boundary field is purely toroidal and the Poincare map does not move.

Run with ``python3 demos/axisymmetric_torus.py``; takes about ten seconds.
"""
import numpy as np

from poincare_shape import deformations as deform
from poincare_shape.axisym import AxisymTorus, closed_form_pi_prime
from poincare_shape.shape_derivative import prepare, shape_derivative

torus = AxisymTorus(R_T=2.0, r_P=1.0, grid_size=48)
state = prepare(torus.surface)

exact = torus.exact_harmonic().B
print("B^phi at theta = 0:", state.harmonic.B.v_phi[0, 0], " closed form 1/(36 pi^2):", 1 / (36 * np.pi ** 2))
print("max |B - closed form| / max |B|:", np.abs(state.harmonic.B.v_phi - exact.v_phi).max() / exact.v_phi.max())
print("max |Pi(theta) - theta|:", np.abs(state.poincare.displacement).max())

for seed in range(3):
    res = shape_derivative(state, deform.random_polynomial(seed))
    print(f"random field {seed}: sup |Pi'| = {np.abs(res.Pi_prime).max():.2e}, "
          f"closed-form route = {np.abs(closed_form_pi_prime(torus, res.uV)).max():.2e}")
