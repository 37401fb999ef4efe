"""Quasi-infinite divisibility of discrete probability laws.

Decide whether a discrete law's characteristic function stays away from
zero, and when it does, compute its spectral decomposition, Levy-type
triplet and the split into two infinitely divisible factors.
"""

from .charfn import (InfimumReport, SearchBudget, Tag, Verdict, derivative_bound, eval_cf,
                     eval_cf_grid, find_zero, modulus_infimum, qid_verdict, torus_values)
from .diagnostics import (Hint, ProbeReport, PsiReport, divergence_probe, psi_bound, psi_scan,
                          psi_tau, psi_values)
from .errors import *  # noqa: F401,F403
from .law import (DiscreteLaw, LatticeStructure, ModuleBasis, bernoulli, detect_generating_basis,
                  detect_lattice, dirac, geometric, make_law, poisson, uniform)
from .spectral import (SpectralDecomposition, bohr_coefficient, decompose, eval_from_spectrum,
                       spectrum_lattice, spectrum_torus)
from .triplet import (FactorizationResidual, QuasiLevyTriplet, cumulative, eval_levy_exponent,
                      is_infinitely_divisible, jordan_split, reconstruct_lattice_law, to_triplet,
                      verify_factorization)

__version__ = "0.1.0"
