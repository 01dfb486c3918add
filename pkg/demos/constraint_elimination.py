# constraint_elimination.py
#
# Walk through the constraint-elimination machinery on the constraint
# theta1 = theta2: the particular solution, the null-space basis, the
# projector identity, and the lift/retract round trip that every update
# law relies on.

import numpy as np

from eqadapt import build_constraint, lift, retract

np.set_printoptions(precision=4, suppress=True)

# Prior knowledge: the first two parameters are equal, written as A theta = d.
A = np.array([[1.0, -1.0, 0.0, 0.0]])
d = np.array([0.0])
spec = build_constraint(A, d)

print("constraint A theta = d with")
print("  A =", A[0], " d =", d)
print("minimum-norm particular solution theta0 =", spec.theta0)
print("null-space basis F (columns):")
print(spec.F)
print("eigenvalue bounds on A A^T: kappa1 =", spec.kappa1, " kappa2 =", spec.kappa2)

# Any estimate of the form theta0 + F z satisfies the constraint identically.
rng = np.random.default_rng(0)
z = rng.normal(scale=10.0, size=3)
theta_hat = lift(spec, z)
print("\nlift of a random z:", theta_hat)
print("constraint violation:", spec.constraint_violation(theta_hat))

# F F^T is the orthogonal projector onto null(A): it fixes feasible error
# directions, which is the identity that makes the stability analysis work.
P = spec.projector()
v = lift(spec, rng.normal(size=3)) - lift(spec, rng.normal(size=3))  # in null(A)
print("\nprojector fixes feasible differences:  |P v - v| =", np.linalg.norm(P @ v - v))
print("projector is idempotent:               |P P - P| =", np.max(np.abs(P @ P - P)))

# Initial estimates supplied in full coordinates are mapped to z by retract
# and recovered exactly by lift.
theta_init = np.array([4.5, 4.5, 4.5, 15.0])
z0 = retract(spec, theta_init)
print("\nretract of the benchmark initial estimate:", z0)
print("lift(retract(.)) recovers it:", lift(spec, z0))

# A constraint with a nonzero offset: theta1 + theta2 = 2.
spec2 = build_constraint([[1.0, 1.0]], [2.0])
print("\noffset constraint theta1 + theta2 = 2:")
print("  theta0 =", spec2.theta0, " (the symmetric minimum-norm point)")
print("  A theta0 - d =", spec2.A @ spec2.theta0 - spec2.d)
