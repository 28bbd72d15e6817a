"""The curvature engine on classical surfaces: circle, sphere, saddle.

Any map from parameters to an ambient space becomes a Chart; the engine
produces tangent frames, normal projections, and the mean curvature vector,
using analytic derivative backends when available and central finite
differences otherwise.

Run:  python demos/02_chart_curvature.py
"""

import numpy as np

from tensorcurv import (
    Chart,
    finite_difference_derivatives,
    mean_curvature,
    normal_project,
    second_fundamental_form,
    tangent_frame,
)

# The unit circle, parametrized by arc length: the mean curvature vector is
# the inward normal of length 1.
circle = Chart(param_dim=1, value=lambda u: np.array([np.cos(u[0]), np.sin(u[0])]))
h = mean_curvature(circle, np.array([0.0]))
print("circle H at angle 0:", np.round(h.vector, 10), " |H| =", round(h.norm, 10))

# The unit sphere: |H| = 2 (sum of the principal curvatures), pointing inward.
def sphere_value(u):
    theta, phi = u
    return np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])

sphere = Chart(param_dim=2, value=sphere_value)
point = np.array([1.0, 0.7])
h = mean_curvature(sphere, point)
print("sphere |H|:", round(h.norm, 8), " H + 2r:", np.round(h.vector + 2 * sphere_value(point), 8))

# The helicoid (x, y) -> (x cos y, x sin y, y) is a classical minimal
# surface: H vanishes even though the surface is curved.
helicoid = Chart(
    param_dim=2,
    value=lambda u: np.array([u[0] * np.cos(u[1]), u[0] * np.sin(u[1]), u[1]]),
)
h = mean_curvature(helicoid, np.array([0.8, 0.3]))
print("helicoid |H| / curvature scale:", f"{h.ratio:.2e}")

# The second fundamental form of the saddle z = x^2 - y^2 at the origin has
# opposite signs along the two axes; their trace cancels.
saddle = Chart(param_dim=2, value=lambda u: np.array([u[0], u[1], u[0] ** 2 - u[1] ** 2]))
origin = np.zeros(2)
bxx = second_fundamental_form(saddle, origin, [1, 0], [1, 0])
byy = second_fundamental_form(saddle, origin, [0, 1], [0, 1])
print("saddle b(ex,ex):", np.round(bxx, 8), "  b(ey,ey):", np.round(byy, 8))
print("saddle |H|:", round(mean_curvature(saddle, origin).norm, 10))

# Normal projection splits any ambient vector against a tangent frame.
frame = tangent_frame(sphere, point)
v = np.array([0.3, -1.0, 0.5])
normal = normal_project(v, frame)
print("\nsplit of a random vector on the sphere: |normal| =", round(np.linalg.norm(normal), 6))
for b in frame.basis:
    print("  <normal, basis> =", f"{np.dot(normal, b):+.2e}")

# Finite differences double as an oracle for analytic backends.
first, second = finite_difference_derivatives(circle, np.array([0.3]))
print("\nFD first derivative of the circle at 0.3:", np.round(first[0], 8))
print("exact:", np.round([-np.sin(0.3), np.cos(0.3)], 8))
