"""Characteristic functions of discrete laws and the infimum of their modulus.

The QID test for a discrete law reduces to deciding whether
``inf_t |f(t)| > 0``.  Three search regimes are used:

* lattice support: ``|f|`` is periodic, a Lipschitz branch-and-bound over
  one period gives a certified global lower bound;
* support generated by ``d <= 3`` independent generators: the same
  branch-and-bound runs on the ``d``-torus, where ``min |Phi|`` equals the
  infimum over the real line;
* anything else: a growing-window scan that can only produce evidence
  (a strictly decreasing trail of record minima), never a certificate.
"""

from dataclasses import dataclass, field, replace
from enum import Enum
import itertools
import math

import numpy as np
from scipy.optimize import minimize

from .errors import BudgetExhausted
from .law import detect_generating_basis, detect_lattice

__all__ = [
    "SearchBudget",
    "InfimumReport",
    "Tag",
    "Verdict",
    "eval_cf",
    "eval_cf_grid",
    "derivative_bound",
    "modulus_infimum",
    "find_zero",
    "qid_verdict",
    "torus_values",
]

TWO_PI = 2.0 * math.pi
_CHUNK = 1 << 22  # max elements of a (points x atoms) phase block


@dataclass(frozen=True)
class SearchBudget:
    """Knobs for the infimum search.

    ``window0=None`` starts the uncertified scan at ``100 * 2*pi / min_gap``.
    ``seed != 0`` shifts the scan grid by a reproducible random fraction of
    a step.
    """

    max_evals: int = 8_000_000
    window0: float = None
    growth: float = 4.0
    n_windows: int = 4
    zero_tol: float = 1e-10
    tol_cert: float = 1e-6
    seed: int = 0
    d_max: int = 3
    relation_bound: int = 1000
    denom_bound: int = 10**6
    struct_tol: float = 1e-9


@dataclass(frozen=True)
class InfimumReport:
    """Outcome of :func:`modulus_infimum`.

    ``mu_estimate`` is the smallest modulus found and ``t_star`` where it
    was found.  For the torus regime the infimum is generally not attained
    on the real line, so ``t_star`` is None and ``theta_star`` holds the
    torus minimizer.  ``lower_bound`` is the rigorous Lipschitz bound when
    the search is certified.
    """

    mu_estimate: float
    t_star: float
    certified: bool
    window: float
    record_minima: tuple = ()
    lower_bound: float = None
    method: str = "scan"
    theta_star: tuple = None
    torus_min: float = None
    evaluations: int = 0


class Tag(str, Enum):
    QID = "QID"
    NOT_QID = "NOT_QID"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class Verdict:
    tag: Tag
    mu: float = None
    witness: float = None
    report: InfimumReport = field(default=None, repr=False)


# -- evaluation --------------------------------------------------------------


def eval_cf(law, t):
    """Characteristic function ``sum_k p_k exp(i t x_k)``.

    ``t`` may be a scalar (returns a complex) or an array.  Lattice laws
    with dense support are evaluated by Horner's rule in ``exp(i h t)``.
    """
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=float))
    dense = law.dense_lattice
    if dense is not None:
        a, h, coeffs = dense
        z = np.exp(1j * h * t)
        acc = np.full(t.shape, coeffs[-1], dtype=complex)
        for c in coeffs[-2::-1]:
            acc *= z
            acc += c
        out = acc * np.exp(1j * a * t) if a != 0.0 else acc
        return complex(out[0]) if scalar else out
    out = np.empty(t.shape, dtype=complex)
    flat_t, flat_out = t.ravel(), out.reshape(-1)
    step = max(1, _CHUNK // law.size)
    for s in range(0, flat_t.size, step):
        flat_out[s:s + step] = np.exp(1j * np.outer(flat_t[s:s + step], law.x)) @ law.p
    return complex(out[0]) if scalar else out


def eval_cf_grid(law, t0, t1, n):
    """Values of ``f`` at ``n`` equispaced points of ``[t0, t1]`` (endpoints included)."""
    if n < 2 or not t0 < t1:
        raise ValueError("need n >= 2 and t0 < t1")
    return eval_cf(law, np.linspace(t0, t1, n))


def derivative_bound(law):
    """Lipschitz constant ``sum_k p_k |x_k|`` of ``f``."""
    return float(np.dot(law.p, np.abs(law.x)))


def _weighted_median(values, weights):
    order = np.argsort(values, kind="stable")
    cum = np.cumsum(weights[order])
    return values[order][np.searchsorted(cum, 0.5 * cum[-1])]


def torus_values(coords, p, theta):
    """``Phi(theta) = sum_k p_k exp(i <c_k, theta>)`` at rows of ``theta``."""
    theta = np.atleast_2d(theta)
    out = np.empty(len(theta), dtype=complex)
    step = max(1, _CHUNK // len(p))
    for s in range(0, len(theta), step):
        out[s:s + step] = np.exp(1j * (theta[s:s + step] @ coords.T)) @ p
    return out


# -- certified branch-and-bound on the d-torus --------------------------------


@dataclass
class _BnB:
    best: np.ndarray
    ub: float
    lower_bound: float
    evals: int
    coarse_centers: np.ndarray
    coarse_values: np.ndarray
    n0: int
    exhausted: bool = False


def _torus_bnb(coords, p, n0, zero_tol, tol_cert, max_evals):
    """Lipschitz branch-and-bound for ``min |Phi|`` over ``[0, 2pi)^d``.

    Cells are cubes of half-width ``hw``; on a cell ``|Phi| >= |Phi(center)|
    - hw * sum_j L_j`` with ``L_j = sum_k p_k |c_kj - m_j|`` (``m_j`` a
    weighted median; the phase shift does not change the modulus).
    """
    d = coords.shape[1]
    med = np.array([_weighted_median(coords[:, j], p) for j in range(d)])
    c = coords - med
    lip = float(np.sum(p[:, None] * np.abs(c)))
    hw = math.pi / n0
    axis = (np.arange(n0) + 0.5) * 2.0 * hw
    centers = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), -1).reshape(-1, d)
    vals = np.abs(torus_values(c, p, centers))
    evals = len(centers)
    coarse_centers, coarse_values = centers, vals
    i = int(np.argmin(vals))
    ub, best = float(vals[i]), centers[i].copy()
    lower = math.inf
    signs = np.array(list(itertools.product((-0.5, 0.5), repeat=d)))
    while True:
        lb = vals - lip * hw
        if ub <= zero_tol:
            # a zero is already in hand; nothing left to certify
            lower = min(lower, float(lb.min()))
            break
        keep = lb < ub - tol_cert
        if np.any(~keep):
            lower = min(lower, float(lb[~keep].min()))
        if not np.any(keep):
            break
        parents = centers[keep]
        n_new = len(parents) * len(signs)
        if evals + n_new > max_evals:
            lower = min(lower, float(lb[keep].min()))
            return _BnB(best, ub, lower, evals, coarse_centers, coarse_values, n0, True)
        centers = (parents[:, None, :] + signs[None, :, :] * hw).reshape(-1, d)
        hw *= 0.5
        vals = np.abs(torus_values(c, p, centers))
        evals += len(centers)
        i = int(np.argmin(vals))
        if vals[i] < ub:
            ub, best = float(vals[i]), centers[i].copy()
    return _BnB(best, ub, min(lower, ub), evals, coarse_centers, coarse_values, n0)


INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden(fun, lo, hi, iters=90):
    """Vectorized golden-section search of ``fun`` on the intervals ``[lo, hi]``.

    ``fun`` maps an array of abscissae to an array of values.
    """
    a = np.array(lo, dtype=float, ndmin=1)
    b = np.array(hi, dtype=float, ndmin=1)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        left = fc < fd
        # keep [a, d] where f(c) < f(d), else [c, b]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        nc = np.where(left, b - INV_PHI * (b - a), d)
        nd = np.where(left, c, a + INV_PHI * (b - a))
        new = np.where(left, nc, nd)
        fnew = fun(new)
        fc, fd, c, d = (np.where(left, fnew, fd), np.where(left, fc, fnew),
                        nc, nd)
        if np.all(b - a <= 4e-16 * np.maximum(1.0, np.abs(a))):
            break
    return np.where(fc < fd, c, d)


def _polish_nd(fun2, start, size):
    d = len(start)
    simplex = np.vstack([start] + [start + size * np.eye(d)[j] for j in range(d)])
    res = minimize(fun2, start, method="Nelder-Mead",
                   options={"initial_simplex": simplex, "xatol": 1e-13, "fatol": 1e-20,
                            "maxiter": 4000})
    return np.asarray(res.x, dtype=float)


def _lattice_infimum(law, lat, budget, zero_tol):
    n = np.asarray(lat.indices, dtype=float).reshape(-1, 1)
    p = np.asarray(law.p)
    span_idx = int(n.max() - n.min())
    n0 = int(min(max(256, 8 * span_idx), max(16, budget.max_evals // 4)))
    bnb = _torus_bnb(n, p, n0, zero_tol, budget.tol_cert, budget.max_evals)
    med = _weighted_median(n[:, 0], p)
    nc = n[:, 0] - med

    def mod2(theta):
        return np.abs(np.exp(1j * np.outer(theta, nc)) @ p) ** 2

    # candidates: coarse local minima (periodic neighbours) plus the B&B best
    cv = bnb.coarse_values
    is_min = (cv <= np.roll(cv, 1)) & (cv <= np.roll(cv, -1))
    cand = bnb.coarse_centers[is_min, 0]
    cand = cand[np.argsort(cv[is_min], kind="stable")][:64]
    step = TWO_PI / bnb.n0
    cand = np.append(cand, bnb.best[0])
    thetas = _golden(mod2, cand - step, cand + step)
    thetas = np.mod(np.append(thetas, bnb.best[0]), TWO_PI)
    values = np.sqrt(mod2(thetas))
    zeros = values <= zero_tol
    if np.any(zeros):
        theta = float(thetas[zeros].min())
    else:
        order = np.lexsort((thetas, values))
        theta = float(thetas[order[0]])
    t_star = theta / lat.span
    mu = abs(eval_cf(law, t_star))
    report = InfimumReport(
        mu_estimate=mu,
        t_star=t_star,
        certified=not bnb.exhausted,
        window=TWO_PI / lat.span,
        record_minima=((t_star, mu),),
        lower_bound=min(bnb.lower_bound, mu),
        method="lattice",
        evaluations=bnb.evals + 92 * len(thetas),
    )
    if bnb.exhausted:
        raise BudgetExhausted("lattice search exceeded max_evals", report)
    return report


def _torus_infimum(law, basis, budget, zero_tol):
    coords = np.asarray(basis.coords, dtype=float)
    p = np.asarray(law.p)
    d = basis.dim
    spread = int(max(np.ptp(coords, axis=0).max(), 1))
    n0 = int(max(8, min(4 * spread, 64)))
    bnb = _torus_bnb(coords, p, n0, zero_tol, budget.tol_cert, budget.max_evals)
    med = np.array([_weighted_median(coords[:, j], p) for j in range(d)])
    c = coords - med

    def mod2(theta):
        return float(abs(np.dot(p, np.exp(1j * (c @ theta)))) ** 2)

    theta = _polish_nd(mod2, bnb.best.copy(), TWO_PI / n0 / 4)
    if mod2(theta) > bnb.ub ** 2:
        theta = bnb.best
    theta = np.mod(theta, TWO_PI)
    mu = math.sqrt(mod2(theta))
    report = InfimumReport(
        mu_estimate=mu,
        t_star=None,
        certified=not bnb.exhausted,
        window=math.inf,
        record_minima=(),
        lower_bound=min(bnb.lower_bound, mu),
        method="torus",
        theta_star=tuple(float(v) for v in theta),
        torus_min=mu,
        evaluations=bnb.evals,
    )
    if bnb.exhausted:
        raise BudgetExhausted("torus search exceeded max_evals", report)
    return report


# -- uncertified scan --------------------------------------------------------


def _line_scan(law, budget, zero_tol):
    x = np.asarray(law.x)
    spread = float(x[-1] - x[0])
    step = math.pi / (8.0 * spread)
    min_gap = float(np.diff(x).min())
    w = budget.window0 if budget.window0 else 100.0 * TWO_PI / min_gap
    shift = 0.0
    if budget.seed:
        shift = float(np.random.default_rng(budget.seed).uniform(0.0, step))

    def mod2(t):
        return np.abs(eval_cf(law, t)) ** 2

    lip = float(np.dot(law.p, np.abs(x - _weighted_median(x, law.p))))
    slack = 0.5 * lip * step

    records = []
    record = math.inf
    evals = 0
    lo = 0.0
    scanned = 0.0
    stop = False
    block = 1 << 18
    for _ in range(max(1, budget.n_windows)):
        k0 = int(math.floor((lo - shift) / step))
        k1 = int(math.ceil((w - shift) / step))
        for ks in range(k0, k1 + 1, block):
            ke = min(ks + block + 1, k1 + 2)  # one point overlap between blocks
            if evals + (ke - ks + 1) > budget.max_evals:
                stop = True
                break
            ts = shift + step * np.arange(ks - 1, ke + 1)
            v = np.abs(eval_cf(law, ts))
            evals += len(ts)
            inner = (v[1:-1] <= v[:-2]) & (v[1:-1] <= v[2:]) & (ts[1:-1] > 0)
            idx = np.nonzero(inner)[0] + 1
            if idx.size == 0:
                continue
            # a dip between grid points can sit up to lip*step/2 below the grid value
            sel = idx[v[idx] - slack < record]
            if sel.size == 0:
                continue
            tp = _golden(mod2, ts[sel - 1], ts[sel + 1])
            vp = np.sqrt(mod2(tp))
            evals += 92 * sel.size
            better = vp > v[sel]
            tp = np.where(better, ts[sel], tp)
            vp = np.where(better, v[sel], vp)
            for t, val in zip(tp, vp):
                if val < record:
                    record = float(val)
                    records.append((float(t), record))
                    if val <= zero_tol:
                        stop = True
                        break
            if stop:
                break
        scanned = w
        if stop:
            break
        lo, w = w, w * budget.growth
    if not records:
        t0 = 0.0
        records.append((t0, abs(eval_cf(law, t0))))
    t_star, mu = records[-1]
    return InfimumReport(
        mu_estimate=mu,
        t_star=t_star,
        certified=False,
        window=scanned,
        record_minima=tuple(records),
        method="scan",
        evaluations=evals,
    )


def modulus_infimum(law, budget=None):
    """Estimate ``inf_t |f(t)|``.

    Returns an :class:`InfimumReport`; raises
    :class:`~qidlaw.errors.BudgetExhausted` (with the partial report) when a
    certified search runs out of evaluations.
    """
    budget = budget or SearchBudget()
    zero_tol = budget.zero_tol + law.tail_mass
    lat = detect_lattice(law, budget.denom_bound, budget.struct_tol)
    if lat is not None:
        return _lattice_infimum(law, lat, budget, zero_tol)
    basis = detect_generating_basis(law, budget.d_max, budget.relation_bound,
                                    budget.struct_tol, budget.denom_bound)
    if basis is not None and basis.dim <= 3:
        rep = _torus_infimum(law, basis, budget, zero_tol)
        if rep.lower_bound > zero_tol:
            return rep
        # inf on the torus is (numerically) zero: look for evidence on the line
        scan = _line_scan(law, budget, zero_tol)
        return replace(scan, theta_star=rep.theta_star, torus_min=rep.mu_estimate,
                       evaluations=scan.evaluations + rep.evaluations)
    return _line_scan(law, budget, zero_tol)


def find_zero(law, budget=None):
    """A real ``t`` with ``|f(t)| <= zero_tol`` found by the infimum search, else None."""
    budget = budget or SearchBudget()
    try:
        rep = modulus_infimum(law, budget)
    except BudgetExhausted as exc:
        rep = exc.report
    if rep.t_star is not None and rep.mu_estimate <= budget.zero_tol + law.tail_mass:
        return rep.t_star
    return None


def qid_verdict(law, budget=None):
    """Three-valued quasi-infinite-divisibility decision for a discrete law.

    QID needs a certified lower bound above ``zero_tol``; NOT_QID needs a
    real witness with ``|f| <= zero_tol``.  ``zero_tol`` is widened by the
    law's ``tail_mass``.  Everything else is INCONCLUSIVE.
    """
    budget = budget or SearchBudget()
    zero_tol = budget.zero_tol + law.tail_mass
    try:
        rep = modulus_infimum(law, budget)
    except BudgetExhausted as exc:
        return Verdict(Tag.INCONCLUSIVE, report=exc.report)
    if rep.t_star is not None and rep.mu_estimate <= zero_tol:
        return Verdict(Tag.NOT_QID, witness=rep.t_star, report=rep)
    if rep.certified and rep.lower_bound is not None and rep.lower_bound > zero_tol:
        return Verdict(Tag.QID, mu=rep.mu_estimate, report=rep)
    return Verdict(Tag.INCONCLUSIVE, report=rep)
