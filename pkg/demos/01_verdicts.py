"""Which discrete laws keep their characteristic function away from zero?

Runs the three-valued check on a few small laws and prints what the
search found: a certified lower bound, an exact zero, or a trail of ever
smaller minima that never reaches zero.
"""

import math

from qidlaw import Tag, bernoulli, dirac, poisson, qid_verdict, uniform

laws = {
    "Bernoulli(0.3)": bernoulli(0.3),
    "Bernoulli(0.5)": bernoulli(0.5),
    "point mass at 3": dirac(3.0),
    "uniform{0,1,2}": uniform([0, 1, 2]),
    "Poisson(2)": poisson(2.0),
    "uniform{0,1,sqrt2}": uniform([0.0, 1.0, math.sqrt(2.0)]),
}

for name, law in laws.items():
    v = qid_verdict(law)
    print(f"{name:20s} {v.tag.value:13s}", end="")
    if v.tag is Tag.QID:
        # mu is the attained minimum, lower_bound the certified one
        print(f"inf|f| = {v.mu:.12g} (certified >= {v.report.lower_bound:.12g})")
    elif v.tag is Tag.NOT_QID:
        print(f"f vanishes at t = {v.witness:.12g}")
    else:
        trail = v.report.record_minima
        print(f"{len(trail)} record minima, smallest {trail[-1][1]:.3g} at t = {trail[-1][0]:.6g}")

# |1 - 2p| is the minimum for a Bernoulli law, reached at t = pi
print("closed form for Bernoulli(0.3):", abs(1 - 2 * 0.3))
