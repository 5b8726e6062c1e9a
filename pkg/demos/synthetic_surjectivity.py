"""Linear flow with golden-mean rotation: any zero-average target Pi' is reached by a tangential deformation.

Run with ``python3 demos/synthetic_surjectivity.py``.
"""
import numpy as np

from poincare_shape.cohomology import GOLDEN, check_diophantine, circle_evaluate, synthetic_pi_prime
from poincare_shape.io import load_circle_coeffs

print("Diophantine constant of the golden mean up to q = 1e4:", check_diophantine(GOLDEN).C_discrete)
mu, omega = load_circle_coeffs("demos/inputs/mu.yaml")
theta, pp, V = synthetic_pi_prime((64, 64), mu, omega)
print("sup |Pi' - mu|:", np.abs(pp - circle_evaluate(mu, theta)).max())
print("size of the tangential deformation, sup |V^theta|:", np.abs(V.vg_theta).max())
