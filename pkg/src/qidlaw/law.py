"""Discrete laws and the arithmetic structure of their support.

A :class:`DiscreteLaw` is a finite list of atoms ``x_k`` with masses ``p_k``
plus an explicit ``tail_mass`` for laws with infinite support that were cut
off.  The support module (all integer combinations of atoms) is described
either by a :class:`LatticeStructure` (``x_k = a + n_k h``) or by a
:class:`ModuleBasis` of at most a few rationally independent generators.
"""

from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
import math

import numpy as np
from scipy.special import gammaln

from .errors import DuplicateAtom, EmptySupport, LawError, MassNotNormalized

__all__ = [
    "DiscreteLaw",
    "LatticeStructure",
    "ModuleBasis",
    "make_law",
    "detect_lattice",
    "detect_generating_basis",
    "dirac",
    "bernoulli",
    "uniform",
    "poisson",
    "geometric",
]

NORMALIZATION_TOL = 1e-9
EXACT_TOL = 1e-12
DEFAULT_TOL = 1e-9
DEFAULT_DENOM_BOUND = 10**6


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DiscreteLaw:
    """Finite atomic probability law.

    Build instances with :func:`make_law`; the constructor does not
    validate.
    """

    x: np.ndarray
    p: np.ndarray
    tail_mass: float = 0.0

    @property
    def atoms(self):
        return [(float(a), float(b)) for a, b in zip(self.x, self.p)]

    @property
    def size(self):
        return len(self.x)

    @cached_property
    def dense_lattice(self):
        """``(offset, span, coeffs)`` with ``p`` laid out on ``offset + span * range(len(coeffs))``.

        Only for lattice laws whose atoms sit on the lattice to rounding
        accuracy and whose index range is at most a few times the atom
        count; None otherwise.  Used for Horner evaluation of ``f``.
        """
        lat = detect_lattice(self)
        if lat is None:
            return None
        idx = np.asarray(lat.indices, dtype=np.int64)
        if idx[-1] > max(64, 4 * self.size):
            return None
        scale = max(1.0, float(np.abs(self.x).max()))
        if np.max(np.abs(lat.offset + idx * lat.span - self.x)) > 4 * np.finfo(float).eps * scale:
            return None
        coeffs = np.zeros(idx[-1] + 1)
        coeffs[idx] = self.p
        return lat.offset, lat.span, coeffs

    def __eq__(self, other):
        if not isinstance(other, DiscreteLaw):
            return NotImplemented
        return (
            np.array_equal(self.x, other.x)
            and np.array_equal(self.p, other.p)
            and self.tail_mass == other.tail_mass
        )

    def __repr__(self):
        body = ", ".join(f"{a:.6g}: {b:.6g}" for a, b in self.atoms[:6])
        more = ", ..." if self.size > 6 else ""
        return f"DiscreteLaw({{{body}{more}}}, tail_mass={self.tail_mass:.3g})"


@dataclass(frozen=True)
class LatticeStructure:
    """Support contained in ``offset + span * Z``."""

    offset: float
    span: float
    indices: tuple

    def positions(self):
        return self.offset + self.span * np.asarray(self.indices, dtype=float)


@dataclass(frozen=True, eq=False)
class ModuleBasis:
    """Generators ``beta_j`` with integer ``coords`` such that ``x = coords @ beta``.

    ``independence_bound`` records the coefficient bound up to which no
    integer relation among the generators was found.
    """

    generators: np.ndarray
    coords: np.ndarray
    independence_bound: int

    @property
    def dim(self):
        return len(self.generators)

    def reconstruct(self):
        return self.coords @ self.generators


def make_law(pairs, tail_mass=0.0):
    """Validate ``(position, mass)`` pairs and build a :class:`DiscreteLaw`.

    Zero-mass pairs are dropped and positions sorted.  Duplicate positions
    raise :class:`DuplicateAtom`.  Masses within ``1e-9`` of summing to
    ``1 - tail_mass`` are rescaled so the total is exact to ``1e-12``.
    """
    pairs = [(float(x), float(m)) for x, m in pairs]
    tail_mass = float(tail_mass)
    if -EXACT_TOL <= tail_mass < 0.0:
        tail_mass = 0.0
    if tail_mass < 0.0 or tail_mass >= 1.0:
        raise LawError(f"tail_mass must lie in [0, 1), got {tail_mass!r}")
    for x, m in pairs:
        if not (math.isfinite(x) and math.isfinite(m)):
            raise LawError(f"non-finite atom ({x!r}, {m!r})")
        if m < 0.0:
            raise LawError(f"negative mass {m!r} at position {x!r}")
    pairs = [(x, m) for x, m in pairs if m > 0.0]
    if not pairs:
        raise EmptySupport("law has no atom with positive mass")
    pairs.sort(key=lambda xm: xm[0])
    xs = np.array([x for x, _ in pairs])
    ps = np.array([m for _, m in pairs])
    dup = np.nonzero(np.diff(xs) == 0.0)[0]
    if dup.size:
        raise DuplicateAtom(f"position {xs[dup[0]]!r} appears more than once")

    total = math.fsum(ps) + tail_mass
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise MassNotNormalized(f"masses plus tail sum to {total!r}, not 1")
    # Rescale only when needed so that make_law(law.atoms) is the identity.
    if abs(total - 1.0) > 1e-14:
        ps = ps * ((1.0 - tail_mass) / math.fsum(ps))
    return DiscreteLaw(_frozen(xs), _frozen(ps), tail_mass)


# -- convenience constructors ------------------------------------------------


def dirac(a):
    return make_law([(a, 1.0)])


def bernoulli(p, low=0.0, high=1.0):
    return make_law([(low, 1.0 - p), (high, p)])


def uniform(points):
    points = list(points)
    return make_law([(x, 1.0 / len(points)) for x in points])


def poisson(lam, kmax=None):
    """Poisson(lam) truncated to ``0..kmax``; the cut-off mass goes to tail_mass."""
    if kmax is None:
        kmax = int(lam + 12 * math.sqrt(lam) + 30)
    k = np.arange(kmax + 1)
    pmf = np.exp(k * math.log(lam) - lam - gammaln(k + 1))
    return make_law(zip(k, pmf), tail_mass=max(0.0, 1.0 - math.fsum(pmf)))


def geometric(p, kmax=None):
    """Law of the number of failures before the first success, truncated."""
    q = 1.0 - p
    if kmax is None:
        kmax = int(math.ceil(40 * math.log(10) / -math.log(q)))
    k = np.arange(kmax + 1)
    pmf = p * q**k
    return make_law(zip(k, pmf), tail_mass=max(0.0, 1.0 - math.fsum(pmf)))


# -- lattice detection -------------------------------------------------------


def detect_lattice(law, denom_bound=DEFAULT_DENOM_BOUND, tol=DEFAULT_TOL):
    """Return the maximal-span lattice ``a + h Z`` containing every atom, or None.

    Ratios of atom differences are approximated by continued fractions with
    denominators at most ``denom_bound``.  A candidate is accepted only if
    every atom sits within ``tol`` of a lattice point measured in units of
    the span, which is what separates 1.5 from sqrt(2).
    A single atom gets span 1 by convention.
    """
    if denom_bound < 1:
        raise ValueError("denom_bound must be >= 1")
    x = law.x
    a = float(x[0])
    if law.size == 1:
        return LatticeStructure(a, 1.0, (0,))
    d = x - a
    ref = float(d[1])
    ratios = d[1:] / ref
    nums, dens = [], []
    for r in ratios:
        fr = Fraction(float(r)).limit_denominator(denom_bound)
        nums.append(fr.numerator)
        dens.append(fr.denominator)
    common = math.lcm(*dens)
    if common > denom_bound:
        return None
    idx = [0] + [n * (common // q) for n, q in zip(nums, dens)]
    g = math.gcd(*idx)
    idx = [i // g for i in idx]
    n = np.array(idx, dtype=float)
    # least-squares span through the fixed offset
    h = float(np.dot(n, d) / np.dot(n, n))
    resid_units = np.abs(d / h - n)
    resid_abs = np.abs(d - n * h)
    if np.any(resid_units > tol) or np.any(resid_abs > tol * np.maximum(1.0, np.abs(x))):
        return None
    return LatticeStructure(a, h, tuple(idx))


# -- generating basis --------------------------------------------------------


def _find_relation(x, gens, bound, tol, m0_max):
    """Smallest ``m0`` in ``1..m0_max`` with ``m0*x = sum m_j gens_j`` exactly in integers.

    Coefficients are bounded by ``bound``.  Returns ``(m0, m)`` or None.
    """
    d = len(gens)
    if d == 0:
        return None
    gens = np.asarray(gens, dtype=float)
    last = gens[-1]
    if d == 1:
        free = np.zeros((1, 0), dtype=np.int64)
    else:
        axis = np.arange(-bound, bound + 1, dtype=np.int64)
        free = np.stack(np.meshgrid(*([axis] * (d - 1)), indexing="ij"), -1).reshape(-1, d - 1)
    partial = free @ gens[:-1]
    for m0 in range(1, m0_max + 1):
        target = m0 * x
        solved = np.rint((target - partial) / last)
        ok = np.abs(solved) <= bound
        resid = np.abs(target - partial - solved * last)
        scale = max(1.0, abs(target))
        ok &= resid <= tol * scale
        if np.any(ok):
            cand = np.nonzero(ok)[0]
            m = np.column_stack([free[cand], solved[cand].astype(np.int64)])
            order = np.lexsort((resid[cand], np.abs(m).sum(axis=1)))
            best = order[0]
            return m0, m[best]
    return None


def _integer_basis(rows):
    """Basis (as columns) of the integer lattice spanned by integer ``rows``."""
    from sympy import Matrix
    from sympy.matrices.normalforms import hermite_normal_form

    H = hermite_normal_form(Matrix(rows).T)
    return H


def detect_generating_basis(law, d_max=3, relation_bound=1000, tol=DEFAULT_TOL,
                            denom_bound=DEFAULT_DENOM_BOUND, m0_max=12):
    """Find a small set of generators for the support module, or None.

    Lattice supports give a one-generator basis (two when the offset is
    not a rational multiple of the span).  Otherwise atoms are processed in
    order; each one is either written as a rational combination of the
    current generators (bounded integer relation search) or becomes a new
    generator.  The rational coordinates are then turned into an integer
    basis by Hermite normal form.  More than ``d_max`` generators gives None.
    """
    if d_max < 1:
        raise ValueError("d_max must be >= 1")
    lat = detect_lattice(law, denom_bound, tol)
    if lat is not None:
        return _basis_from_lattice(lat, relation_bound, tol, denom_bound)

    gens = []
    rat_coords = []  # one list of Fractions per atom, padded later
    for x in law.x:
        x = float(x)
        if x == 0.0:
            rat_coords.append([])
            continue
        rel = _find_relation(x, gens, relation_bound, tol, m0_max)
        if rel is None:
            if len(gens) == d_max:
                return None
            gens.append(x)
            rat_coords.append([Fraction(0)] * (len(gens) - 1) + [Fraction(1)])
        else:
            m0, m = rel
            rat_coords.append([Fraction(int(mj), m0) for mj in m])
    d = len(gens)
    if d == 0:
        # law concentrated at 0
        return ModuleBasis(_frozen([1.0]), _frozen(np.zeros((law.size, 1)), np.int64),
                           relation_bound)
    padded = [row + [Fraction(0)] * (d - len(row)) for row in rat_coords]
    denom = math.lcm(*(c.denominator for row in padded for c in row))
    beta = np.array(gens)
    if denom == 1:
        coords = np.array([[int(c) for c in row] for row in padded], dtype=np.int64)
        return _checked_basis(law, beta, coords, relation_bound, tol)

    from sympy import Matrix

    int_rows = [[int(c * denom) for c in row] for row in padded]
    H = _integer_basis(int_rows)  # d x d, columns are new generators in units beta/denom
    new_beta = np.array([float(sum(int(H[j, i]) * gens[j] for j in range(d))) / denom
                         for i in range(d)])
    Hinv = H.inv()
    coords = np.array([[int(v) for v in (Hinv * Matrix(r))] for r in int_rows], dtype=np.int64)
    return _checked_basis(law, new_beta, coords, relation_bound, tol)


def _checked_basis(law, beta, coords, relation_bound, tol):
    err = np.abs(coords @ beta - law.x)
    if np.any(err > tol * np.maximum(1.0, np.abs(law.x))):
        return None
    return ModuleBasis(_frozen(beta), _frozen(coords, np.int64), relation_bound)


def _basis_from_lattice(lat, relation_bound, tol, denom_bound):
    n = np.asarray(lat.indices, dtype=np.int64)
    h, a = lat.span, lat.offset
    r = a / h
    fr = Fraction(r).limit_denominator(denom_bound)
    p, q = fr.numerator, fr.denominator
    # residual in units of the would-be generator h/q, as in detect_lattice
    if abs(q * r - p) <= tol:
        c = p + q * n
        g = math.gcd(*(int(v) for v in c)) or 1
        beta = np.array([h * g / q])
        coords = (c // g).reshape(-1, 1)
    else:
        beta = np.array([h, a])
        coords = np.column_stack([n, np.ones_like(n)])
    return ModuleBasis(_frozen(beta), _frozen(coords, np.int64), relation_bound)
