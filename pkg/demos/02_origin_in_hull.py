"""
Is the origin inside the hull?
==============================

The EL ratio is finite exactly when the origin lies in the interior of the
convex hull of the estimating-function values.  ``contains_origin``
answers that question and returns a certificate you can check yourself.
"""

import numpy as np

from elbounds.geometry import ShiftedGaussian, contains_origin, project_to_sphere, sample

# three points surrounding the origin: the certificate is a set of convex weights
X = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])
v = contains_origin(X)
print(v.status.value, "weights", v.weights, "check", v.weights @ X)

# shift everything to the right and a separating direction comes back instead
Z = X + [1.5, 0.0]
v = contains_origin(Z)
print(v.status.value, "direction", v.direction, "all d.x >= 0:", bool(np.all(Z @ v.direction >= -1e-12)))

# radial projection to the sphere never changes the verdict
Y = sample(ShiftedGaussian((0.5, 0.0, 0.0)), 6, seed=6)
print("raw:", contains_origin(Y).status.value,
      " projected:", contains_origin(project_to_sphere(Y)).status.value)
