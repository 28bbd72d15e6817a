"""Linear functionals have no local extrema on the rank-one manifold:
normal levels, probe curves, and two-sided witness points.

Run:  python demos/04_segre_witnesses.py
"""

import numpy as np

from tensorcurv import (
    curve_pairings,
    decompose_functional,
    extremum_witness,
    frobenius_inner,
    normal_frame,
    probe_curve,
    sff_degeneracy_check,
    slice_reduce,
    canonical_segre_point,
)

shape = (2, 2, 2)
frame = normal_frame(shape)

# The ambient space at the base point e1 x e1 x e1 splits into levels by how
# many indices leave the leading axis; levels 0 and 1 form the tangent space.
print("level sizes:", frame.level_sizes, "(total", sum(frame.level_sizes), ")")

# A functional supported on e2 x e2 x e1 is normal, with lowest level 2.
ell = np.zeros(shape)
ell[1, 1, 0] = 1.0
dec = decompose_functional(ell, frame)
print("\nlowest normal level k* =", dec.kstar, " witness index:", dec.witness_index)

# The probe curve rotates modes 0 and 1 toward the witness index.  Pairing
# derivatives vanish below order k*, and order k* equals k*! times the
# coefficient; flipping one rotation sign flips the value.
gamma = probe_curve(frame, modes=(0, 1), targets=(1, 1))
tilde = probe_curve(frame, modes=(0, 1), targets=(1, 1), signs=(-1, 1))
print("pairing derivatives of gamma:", curve_pairings(gamma, ell, 2))
print("pairing derivatives of tilde:", curve_pairings(tilde, ell, 2))

# Witness points: rank-one tensors arbitrarily close to the base on both
# sides of the hyperplane <ell, . - base> = 0, so the functional has neither
# a local maximum nor a local minimum there.
w = extremum_witness(ell, frame, eps=0.1)
print("\nwitness u+ =", w.u_plus, " pairing", f"{w.pairing_plus:+.6e}")
print("witness u- =", w.u_minus, " pairing", f"{w.pairing_minus:+.6e}")

# The same conclusion transfers to hyperplane slices: shift the functional
# by a multiple of the slice normal so it vanishes on the base point, then
# run the witness construction for the shifted functional.
rng = np.random.default_rng(1)
point = canonical_segre_point(shape)
a = rng.standard_normal(shape)
normal_part = rng.standard_normal(shape)
for idx in frame.levels[0] + frame.levels[1]:
    normal_part[idx] = 0.0
functional = normal_part - 0.7 * a
red = slice_reduce(functional, a, offset=1.0, point=point)
print("\nslice reduction: mu =", round(red.mu, 6),
      " <v, T> =", frobenius_inner(red.v, point.tensor()))
w = extremum_witness(red.v, frame)
print("reduced functional admits witnesses:",
      w.pairing_plus > 0 > w.pairing_minus)

# The second fundamental form pairs trivially with functionals above level 2
# (chart second derivatives never reach those levels), so witnesses for them
# genuinely need the higher-order curve argument.
ell3 = np.zeros(shape)
ell3[1, 1, 1] = 1.0
print("\nform pairings with a level-3 functional:",
      np.max(np.abs(sff_degeneracy_check(frame, ell3))))
print("form pairings with the level-2 functional:",
      np.max(np.abs(sff_degeneracy_check(frame, ell))))
