"""Triplets, the positive/negative split and the return trip to masses.

The spectral coefficients become a Levy-type triplet with a signed
spectral measure.  Splitting that measure by sign gives two compound
Poisson laws F_pos, F_neg with F_pos = F * F_neg.
"""

import math

import numpy as np

from qidlaw import (bernoulli, cumulative, detect_lattice, is_infinitely_divisible, jordan_split,
                    reconstruct_lattice_law, spectrum_lattice, to_triplet, verify_factorization)

law = bernoulli(0.25)
trip = to_triplet(spectrum_lattice(law))
print("gamma =", trip.gamma, " closed form:", math.atan2(math.sin(1) / 3, 1 + math.cos(1) / 3))
print("infinitely divisible:", is_infinitely_divisible(trip))
print("spectral function at -0.5, 0.5, 1.5:", [cumulative(trip, x) for x in (-0.5, 0.5, 1.5)])

pos, neg = jordan_split(trip)
print(f"pos: {pos.u.size} atoms, mass {pos.total_variation:.6f};  neg: {neg.u.size} atoms, mass {neg.total_variation:.6f}")
res = verify_factorization(law, pos, neg, np.linspace(0, 2 * np.pi, 1024))
print("max |f f_neg - f_pos| =", res.max_residual)

back = reconstruct_lattice_law(trip, detect_lattice(law))
print("reconstructed masses:", back.atoms, " tail:", back.tail_mass)
