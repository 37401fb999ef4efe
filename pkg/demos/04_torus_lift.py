"""A law on {0, 1, sqrt2}: no lattice, but a two-dimensional torus.

f(t) = Phi(t, sqrt2 t) where Phi lives on the 2-torus.  The line t -> (t,
sqrt2 t) is dense there, so inf over the reals of |f| is min of |Phi|, which
a Lipschitz branch-and-bound certifies.  The log of Phi then has a
bivariate Fourier series.
"""

import math
import time

import numpy as np

from qidlaw import (detect_generating_basis, eval_cf, eval_from_spectrum, make_law, qid_verdict,
                    spectrum_torus)

r2 = math.sqrt(2.0)
law = make_law([(0.0, 0.8), (1.0, 0.1), (r2, 0.1)])
basis = detect_generating_basis(law)
print("generators:", basis.generators, " coordinates:", basis.coords.tolist())

start = time.perf_counter()
v = qid_verdict(law)
print(f"{v.tag.value}: min|Phi| = {v.mu:.12f} at theta = {v.report.theta_star}  ({time.perf_counter() - start:.2f}s)")

spec = spectrum_torus(law, basis, mu=v.mu, n_grid=1024)
# log(1 + (a + b)/8) expanded in a = e^{it}, b = e^{i sqrt2 t}
for label, u, oracle in [("1", 1.0, 1 / 8), ("sqrt2", r2, 1 / 8), ("1+sqrt2", 1 + r2, -1 / 64), ("2", 2.0, -1 / 128)]:
    print(f"  lam_{label:8s} = {spec.coefficient(u): .12f}   series: {oracle: .12f}")

t = np.linspace(-50, 50, 20001)
print("max reconstruction error on [-50, 50]:", np.abs(eval_from_spectrum(spec, t) - eval_cf(law, t)).max())
