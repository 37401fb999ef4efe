"""The ratio psi_tau(t) = f(t+tau) f(t-tau) / f(t)^2.

If f has a Levy-type triplet, |psi_tau| is bounded by a constant depending
only on tau and the triplet.  Poisson laws reach that constant.  Near a
zero of f, or along minima that tend to zero, the ratio explodes instead.
"""

import math

import numpy as np

from qidlaw import (bernoulli, divergence_probe, poisson, psi_scan, spectrum_lattice, to_triplet,
                    uniform)

law = poisson(1.5)
trip = to_triplet(spectrum_lattice(law))
rep = psi_scan(law, trip, tau=math.pi, window=math.pi)
print(f"Poisson(1.5), tau = pi: sup |psi| = {rep.sup_observed:.10f}, bound = {rep.bound:.10f} -> {rep.verdict_hint.value}")

rep = psi_scan(bernoulli(0.5), tau=1.0)
print(f"Bernoulli(0.5), tau = 1: sup |psi| = {rep.sup_observed:.3e} at t = {rep.t_at_sup:.6f} -> {rep.verdict_hint.value}")

# the sqrt2 law has no zeros, but its record minima go to zero; psi follows them up
probe = divergence_probe(uniform([0.0, 1.0, math.sqrt(2.0)]))
print("uniform{0,1,sqrt2}: best tau", round(probe.best_tau, 4))
for (t, m), g in zip(probe.trail, probe.growth[probe.best_tau]):
    print(f"  t = {t:14.4f}  |f| = {m:.3e}  |psi| = {g:.3e}")
