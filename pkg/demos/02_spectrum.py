"""Log of a zero-free characteristic function as an absolutely summable series.

For a lattice law, log f(t) = i t gamma0 + sum_u lam_u (exp(i t u) - 1).  The
coefficients come from an FFT of the unwrapped logarithm.  Bernoulli laws
give alternating geometric-harmonic coefficients, Poisson a single one.
"""

import numpy as np

from qidlaw import bernoulli, eval_cf, eval_from_spectrum, geometric, poisson, spectrum_lattice

spec = spectrum_lattice(bernoulli(0.25))
print("Bernoulli(0.25): gamma0 =", spec.gamma0, " winding =", spec.winding)
for n in range(1, 6):
    print(f"  lam_{n} = {spec.at_index(n): .15f}   (-1)^(n+1) 3^-n / n = {(-1) ** (n + 1) / 3 ** n / n: .15f}")

# with p > 1/2 the phase winds once per period: gamma0 picks up the span and
# the coefficients move to negative frequencies
spec = spectrum_lattice(bernoulli(0.75))
print("Bernoulli(0.75): gamma0 =", spec.gamma0, " winding =", spec.winding)
print("  lam_-1 =", spec.at_index(-1), " lam_+1 =", spec.at_index(1))

spec = spectrum_lattice(poisson(2.0))
big = np.abs(spec.lam) > 1e-12
print("Poisson(2): nonnegligible coefficients", dict(zip(spec.u[big].tolist(), spec.lam[big].tolist())))

spec = spectrum_lattice(geometric(0.5))
print("geometric(0.5): all coefficients >= 0:", bool(np.all(spec.lam >= 0)), " lam_3 =", spec.at_index(3))

t = np.linspace(0, 2 * np.pi, 4096)
law = poisson(2.0)
print("Poisson(2) reconstruction error:", np.abs(eval_from_spectrum(spectrum_lattice(law), t) - eval_cf(law, t)).max())
print("truncation bound of the series:", spec.truncation_bound)
