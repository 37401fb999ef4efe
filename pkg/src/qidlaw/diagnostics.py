"""Ratio diagnostic ``psi_tau(t) = f(t+tau) f(t-tau) / f(t)^2``.

For a law with a Levy-type triplet the modulus of ``psi_tau`` is bounded
uniformly in ``t`` by ``exp(-sigma2 tau^2 + 2 sum_u (1 - cos(tau u)) |w_u|)``.
If ``|f(t_m)| -> 0`` along a sequence while the numerator stays away from
zero, ``psi_tau`` blows up, which is how a zero-free law with vanishing
infimum fails to have such a triplet.
"""

from dataclasses import dataclass, field
from enum import Enum
import math

import numpy as np

from .charfn import SearchBudget, eval_cf, modulus_infimum
from .errors import AllPointsSkipped, BudgetExhausted, DenominatorNearZero, NoRecordMinima

__all__ = [
    "Hint",
    "PsiReport",
    "ProbeReport",
    "psi_tau",
    "psi_bound",
    "psi_scan",
    "psi_values",
    "divergence_probe",
]

ZERO_TOL = 1e-10
BLOWUP = 1e3


class Hint(str, Enum):
    BOUND_RESPECTED = "BOUND_RESPECTED"
    BOUND_VIOLATED = "BOUND_VIOLATED"
    UNBOUNDED_EVIDENCE = "UNBOUNDED_EVIDENCE"


@dataclass(frozen=True)
class PsiReport:
    tau: float
    sup_observed: float
    t_at_sup: float
    bound: float
    samples: int
    skipped: int
    verdict_hint: Hint


@dataclass(frozen=True)
class ProbeReport:
    """Growth of ``|psi_tau|`` along the record-minimum trail, per candidate ``tau``."""

    taus: tuple
    trail: tuple
    growth: dict = field(repr=False)
    best_tau: float = None
    best_max: float = None
    bounds: dict = None
    trivial: bool = False


def psi_tau(law, tau, t, zero_tol=ZERO_TOL):
    """``f(t+tau) f(t-tau) / f(t)^2`` (scalar or array ``t``)."""
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=float))
    den = eval_cf(law, t)
    if np.any(np.abs(den) <= zero_tol):
        bad = t[np.argmin(np.abs(den))]
        raise DenominatorNearZero(f"|f(t)| <= {zero_tol:g} at t = {bad!r}")
    out = eval_cf(law, t + tau) * eval_cf(law, t - tau) / den ** 2
    return complex(out[0]) if scalar else out


def psi_values(law, tau, window, n, zero_tol=ZERO_TOL):
    """``(t, |psi_tau(t)|, skipped)`` on ``n`` points of ``[-window, window]``.

    Skipped points (``|f(t)| <= zero_tol``) carry ``nan``.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    t = np.linspace(-window, window, int(n))
    den = eval_cf(law, t)
    skip = np.abs(den) <= zero_tol
    vals = np.full(t.shape, np.nan)
    ok = ~skip
    vals[ok] = np.abs(eval_cf(law, t[ok] + tau) * eval_cf(law, t[ok] - tau) / den[ok] ** 2)
    return t, vals, skip


def psi_bound(trip, tau):
    """``exp(-sigma2 tau^2 + 2 sum_u (1 - cos(tau u)) |w_u|)``."""
    s = math.fsum(2.0 * (1.0 - np.cos(tau * trip.u)) * np.abs(trip.w))
    return math.exp(-trip.sigma2 * tau * tau + s)


def psi_scan(law, trip=None, tau=1.0, window=10 * math.pi, n=100_001, zero_tol=ZERO_TOL,
             blowup=BLOWUP):
    """Scan ``|psi_tau|`` on ``n`` points of ``[-window, window]``.

    Points where ``|f(t)| <= zero_tol`` are skipped and counted.  With a
    triplet the observed supremum is compared with :func:`psi_bound`;
    without one, a supremum above ``blowup`` is flagged as unbounded
    evidence and anything else gets no hint.
    """
    t, vals, skip = psi_values(law, tau, window, n, zero_tol)
    skipped = int(skip.sum())
    if skipped == len(t):
        raise AllPointsSkipped("every scan point has |f(t)| <= zero_tol")
    ts, vals = t[~skip], vals[~skip]
    k = int(np.argmax(vals))
    sup = float(vals[k])
    bound = None
    if trip is not None:
        bound = psi_bound(trip, tau)
        hint = Hint.BOUND_VIOLATED if sup > bound * (1.0 + 1e-9) else Hint.BOUND_RESPECTED
    else:
        hint = Hint.UNBOUNDED_EVIDENCE if sup > blowup else None
    return PsiReport(float(tau), sup, float(ts[k]), bound, int(n), skipped, hint)


def divergence_probe(law, budget=None, trip=None, taus=None, n_tau=32):
    """Evaluate ``|psi_tau(t_m)|`` along the record minima ``t_m`` of ``|f|``.

    ``taus`` defaults to ``n_tau`` points of ``(0, pi]``.  The tau with the
    largest value is reported with its growth sequence.  This is evidence,
    not a certificate.
    """
    budget = budget or SearchBudget()
    try:
        rep = modulus_infimum(law, budget)
    except BudgetExhausted as exc:
        rep = exc.report
    trail = tuple(rep.record_minima)
    if not trail:
        raise NoRecordMinima("the infimum search produced no record minima")
    if taus is None:
        taus = np.linspace(math.pi / n_tau, math.pi, n_tau)
    taus = tuple(float(v) for v in taus)
    tm = np.array([t for t, _ in trail])
    fm = np.array([v for _, v in trail])
    trivial = bool(np.all(fm >= 1.0 - 1e-12))
    zero_tol = budget.zero_tol + law.tail_mass
    usable = fm > zero_tol
    if not usable.any():
        raise NoRecordMinima("every record minimum is a numerical zero")
    tm = tm[usable]
    growth = {}
    for tau in taus:
        num = np.abs(eval_cf(law, tm + tau) * eval_cf(law, tm - tau))
        growth[tau] = tuple((num / fm[usable] ** 2).tolist())
    best_tau = max(taus, key=lambda s: (max(growth[s]), -s))
    bounds = {tau: psi_bound(trip, tau) for tau in taus} if trip is not None else None
    return ProbeReport(taus, trail, growth, best_tau, max(growth[best_tau]), bounds, trivial)
