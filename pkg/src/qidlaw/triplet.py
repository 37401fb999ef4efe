"""Levy-type triplets with a finite signed atomic spectral function.

The exponent uses the compensator ``i t sin(u)``::

    f(t) = exp(i t gamma - sigma2 t^2 / 2
               + sum_u w_u (exp(i t u) - 1 - i t sin u))

which is what makes ``gamma = gamma0 + sum_u lam_u sin u`` turn a spectral
decomposition into a triplet.  Splitting the weights by sign gives two
compound-Poisson-with-drift triplets whose characteristic functions satisfy
``f = f_pos / f_neg``.
"""

from dataclasses import dataclass
import math

import numpy as np

from .charfn import eval_cf
from .errors import NotAProbabilityLaw, NotOnLattice, SigmaNotZero, XIsZero
from .law import make_law

__all__ = [
    "QuasiLevyTriplet",
    "FactorizationResidual",
    "to_triplet",
    "cumulative",
    "eval_levy_exponent",
    "jordan_split",
    "verify_factorization",
    "reconstruct_lattice_law",
    "is_infinitely_divisible",
]

NEGATIVE_MASS_TOL = 1e-9
MASS_FLOOR = 1e-15


@dataclass(frozen=True, eq=False)
class QuasiLevyTriplet:
    """``(gamma, sigma2, Lambda)`` with ``Lambda`` given by atoms ``(u, w)``."""

    gamma: float
    sigma2: float
    u: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        u = np.array(self.u, dtype=float).ravel()
        w = np.array(self.w, dtype=float).ravel()
        if u.shape != w.shape:
            raise ValueError("u and w must have the same length")
        if self.sigma2 < 0:
            raise ValueError("sigma2 must be nonnegative")
        if np.any(u == 0.0):
            raise ValueError("spectral function cannot have an atom at 0")
        order = np.argsort(u, kind="stable")
        u, w = u[order], w[order]
        if np.any(np.diff(u) == 0.0):
            raise ValueError("atom positions must be distinct")
        u.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "sigma2", float(self.sigma2))

    @property
    def atoms(self):
        return list(zip(self.u.tolist(), self.w.tolist()))

    @property
    def total_variation(self):
        return float(np.abs(self.w).sum())

    def small_jump_moment(self, delta=1.0):
        """``sum_{0<|u|<delta} u^2 |w_u|``, finite for any finite atom list."""
        near = np.abs(self.u) < delta
        return float(np.sum(self.u[near] ** 2 * np.abs(self.w[near])))

    def validate(self):
        """Check the finite-atom forms of the conditions on ``Lambda``."""
        tv = self.total_variation
        return (
            math.isfinite(tv)
            and math.isfinite(self.small_jump_moment())
            and not np.any(self.u == 0.0)
            and bool(np.all(np.diff(self.u) > 0))
            and self.sigma2 >= 0.0
        )


def is_infinitely_divisible(trip):
    """True when every spectral weight is nonnegative."""
    return bool(np.all(trip.w >= 0.0))


def to_triplet(spec):
    """Triplet of a spectral decomposition: ``gamma = gamma0 + sum lam_u sin(u)``, ``sigma2 = 0``."""
    gamma = spec.gamma0 + math.fsum(spec.lam * np.sin(spec.u))
    return QuasiLevyTriplet(gamma, 0.0, spec.u, spec.lam)


def cumulative(trip, x):
    """Spectral function at ``x``.

    ``sum_{u <= x} w_u`` for ``x < 0`` and ``-sum_{u > x} w_u`` for ``x > 0``;
    undefined at 0.
    """
    if x == 0:
        raise XIsZero("the spectral function is not defined at 0")
    if x < 0:
        return math.fsum(trip.w[trip.u <= x])
    return -math.fsum(trip.w[trip.u > x])


def eval_levy_exponent(trip, t):
    """Characteristic function of the triplet at scalar or array ``t``."""
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=float))
    flat = t.ravel()
    expo = 1j * flat * trip.gamma - 0.5 * trip.sigma2 * flat ** 2
    if trip.u.size:
        step = max(1, (1 << 22) // trip.u.size)
        sin_u = np.sin(trip.u)
        parts = []
        for s in range(0, flat.size, step):
            tt = flat[s:s + step, None]
            parts.append((np.exp(1j * tt * trip.u) - 1.0 - 1j * tt * sin_u) @ trip.w)
        expo = expo + np.concatenate(parts)
    out = np.exp(expo).reshape(t.shape)
    return complex(out[0]) if scalar else out


def jordan_split(trip):
    """Split into nonnegative parts ``(pos, neg)`` with ``f = f_pos / f_neg``.

    The drift is shared so that ``pos.gamma - neg.gamma == trip.gamma`` with
    the whole ``gamma0`` part on ``pos``.
    """
    if trip.sigma2 != 0.0:
        raise SigmaNotZero("Jordan split is defined here for sigma2 = 0 only")
    pos = trip.w > 0
    neg = trip.w < 0
    gamma_neg = math.fsum(-trip.w[neg] * np.sin(trip.u[neg]))
    gamma_pos = trip.gamma + gamma_neg
    return (
        QuasiLevyTriplet(gamma_pos, 0.0, trip.u[pos], trip.w[pos]),
        QuasiLevyTriplet(gamma_neg, 0.0, trip.u[neg], -trip.w[neg]),
    )


@dataclass(frozen=True)
class FactorizationResidual:
    max_residual: float
    t_at_max: float
    n_points: int


def verify_factorization(law, pos, neg, grid):
    """Max over ``grid`` of ``|f(t) f_neg(t) - f_pos(t)|``."""
    grid = np.asarray(grid, dtype=float).ravel()
    if grid.size == 0:
        raise ValueError("grid must be nonempty")
    r = np.abs(eval_cf(law, grid) * eval_levy_exponent(neg, grid) - eval_levy_exponent(pos, grid))
    k = int(np.argmax(r))
    return FactorizationResidual(float(r[k]), float(grid[k]), grid.size)


def reconstruct_lattice_law(trip, structure, n_fft=4096, tol=1e-9):
    """Invert the triplet's characteristic function on the lattice ``structure``.

    Masses come from an inverse FFT of the exponent sampled over one
    period.  Negative masses below ``-1e-9`` raise
    :class:`NotAProbabilityLaw`; smaller ones are treated as noise and the
    clipped remainder is recorded as ``tail_mass``.
    """
    if trip.sigma2 != 0.0:
        raise SigmaNotZero("lattice reconstruction needs sigma2 = 0")
    h, a = structure.span, structure.offset
    if trip.u.size:
        k = trip.u / h
        if np.any(np.abs(k - np.rint(k)) > tol * np.maximum(1.0, np.abs(k))):
            raise NotOnLattice("spectral atoms are not multiples of the lattice span")
    n = int(n_fft)
    t = np.arange(n) * (2.0 * math.pi / (h * n))
    g = eval_levy_exponent(trip, t) * np.exp(-1j * a * t)
    masses = np.fft.fft(g) / n
    idx = np.fft.fftfreq(n, 1.0 / n).astype(np.int64)
    order = np.argsort(idx)
    idx, masses = idx[order], masses[order]
    re = masses.real
    if re.min() < -NEGATIVE_MASS_TOL:
        j = int(np.argmin(re))
        raise NotAProbabilityLaw(f"mass {re[j]:.3g} at position {a + idx[j] * h!r}")
    keep = re > MASS_FLOOR
    kept = re[keep]
    total = math.fsum(kept)
    tail = max(0.0, 1.0 - total)
    if total > 1.0:
        kept = kept / total
    return make_law(zip(a + idx[keep] * h, kept), tail_mass=tail)
