"""JSON and CSV formats for laws, verdicts, spectra, triplets and scans."""

import csv
import json
import math

import numpy as np

from .errors import LawError
from .law import LatticeStructure, ModuleBasis, make_law
from .spectral import SpectralDecomposition
from .triplet import QuasiLevyTriplet

__all__ = [
    "LawFileError",
    "law_from_dict",
    "law_to_dict",
    "load_law",
    "save_law",
    "verdict_to_dict",
    "spectrum_to_dict",
    "spectrum_from_dict",
    "triplet_to_dict",
    "triplet_from_dict",
    "probe_to_dict",
    "dumps",
    "write_cf_csv",
    "write_psi_csv",
]


class LawFileError(LawError):
    """Malformed law file; the message names the offending field."""


def _num(v):
    """Finite floats pass through; inf/nan become null."""
    if v is None:
        return None
    v = float(v)
    return v if math.isfinite(v) else None


def dumps(obj):
    # repr of a float round-trips the double exactly
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


# -- laws --------------------------------------------------------------------


def law_from_dict(d):
    if not isinstance(d, dict):
        raise LawFileError("top level: expected an object with an 'atoms' list")
    if "atoms" not in d:
        raise LawFileError("atoms: missing")
    atoms = d["atoms"]
    if not isinstance(atoms, list):
        raise LawFileError("atoms: expected a list")
    pairs = []
    for i, a in enumerate(atoms):
        if not isinstance(a, dict):
            raise LawFileError(f"atoms[{i}]: expected an object with 'x' and 'p'")
        for key in ("x", "p"):
            if key not in a:
                raise LawFileError(f"atoms[{i}].{key}: missing")
            v = a[key]
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise LawFileError(f"atoms[{i}].{key}: expected a number, got {v!r}")
        pairs.append((a["x"], a["p"]))
    tail = d.get("tail_mass", 0.0)
    if isinstance(tail, bool) or not isinstance(tail, (int, float)):
        raise LawFileError(f"tail_mass: expected a number, got {tail!r}")
    try:
        return make_law(pairs, tail)
    except LawFileError:
        raise
    except LawError as exc:
        raise LawFileError(f"atoms: {exc}") from exc


def law_to_dict(law):
    return {
        "atoms": [{"x": x, "p": p} for x, p in law.atoms],
        "tail_mass": float(law.tail_mass),
    }


def load_law(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise LawFileError(f"{path}: invalid JSON ({exc})") from exc
    return law_from_dict(data)


def save_law(law, path):
    with open(path, "w") as fh:
        fh.write(dumps(law_to_dict(law)))


# -- verdicts and reports ----------------------------------------------------


def verdict_to_dict(verdict):
    rep = verdict.report
    return {
        "tag": verdict.tag.value,
        "mu": _num(verdict.mu),
        "witness": _num(verdict.witness),
        "certified": bool(rep.certified),
        "window": _num(rep.window),
        "record_minima": [[float(t), float(v)] for t, v in rep.record_minima],
        "mu_estimate": _num(rep.mu_estimate),
        "lower_bound": _num(rep.lower_bound),
        "method": rep.method,
        "t_star": _num(rep.t_star),
        "theta_star": None if rep.theta_star is None else [float(v) for v in rep.theta_star],
    }


def _structure_to_dict(s):
    if isinstance(s, LatticeStructure):
        return {"type": "lattice", "offset": s.offset, "span": s.span,
                "indices": [int(i) for i in s.indices]}
    return {"type": "basis", "generators": [float(g) for g in s.generators],
            "coords": np.asarray(s.coords).tolist(),
            "independence_bound": int(s.independence_bound)}


def _structure_from_dict(d):
    if d["type"] == "lattice":
        return LatticeStructure(float(d["offset"]), float(d["span"]), tuple(d["indices"]))
    return ModuleBasis(np.array(d["generators"], dtype=float),
                       np.array(d["coords"], dtype=np.int64),
                       int(d["independence_bound"]))


def spectrum_to_dict(spec):
    order = np.lexsort((spec.u, -np.abs(spec.lam)))
    return {
        "gamma0": float(spec.gamma0),
        "coeffs": [{"u": float(spec.u[k]), "lambda": float(spec.lam[k]),
                    "index": [int(v) for v in spec.index[k]]} for k in order],
        "l1_norm": float(spec.l1_norm),
        "truncation_bound": float(spec.truncation_bound),
        "winding": [int(w) for w in spec.winding],
        "n_grid": int(spec.n_grid),
        "structure": _structure_to_dict(spec.structure),
    }


def spectrum_from_dict(d):
    coeffs = sorted(d["coeffs"], key=lambda c: c["u"])
    u = np.array([c["u"] for c in coeffs], dtype=float)
    lam = np.array([c["lambda"] for c in coeffs], dtype=float)
    structure = _structure_from_dict(d["structure"])
    dim = 1 if isinstance(structure, LatticeStructure) else len(structure.generators)
    index = np.array([c.get("index", []) for c in coeffs], dtype=np.int64).reshape(len(coeffs), dim)
    return SpectralDecomposition(
        gamma0=float(d["gamma0"]), u=u, lam=lam, index=index,
        l1_norm=float(d["l1_norm"]), truncation_bound=float(d["truncation_bound"]),
        structure=structure, winding=tuple(d.get("winding", ())), n_grid=int(d.get("n_grid", 0)),
    )


def triplet_to_dict(trip):
    return {
        "gamma": float(trip.gamma),
        "sigma2": float(trip.sigma2),
        "atoms": [{"u": u, "w": w} for u, w in trip.atoms],
    }


def triplet_from_dict(d):
    atoms = d.get("atoms", [])
    return QuasiLevyTriplet(float(d["gamma"]), float(d.get("sigma2", 0.0)),
                            [a["u"] for a in atoms], [a["w"] for a in atoms])


def probe_to_dict(probe):
    return {
        "taus": list(probe.taus),
        "trail": [[float(t), float(v)] for t, v in probe.trail],
        "growth": [{"tau": tau, "values": list(probe.growth[tau])} for tau in probe.taus],
        "best_tau": _num(probe.best_tau),
        "best_max": _num(probe.best_max),
        "bounds": None if probe.bounds is None else [probe.bounds[t] for t in probe.taus],
        "trivial": probe.trivial,
    }


# -- CSV ---------------------------------------------------------------------


def _g17(v):
    return format(float(v), ".17g")


def write_cf_csv(fh, t, f):
    """Columns ``t, re_f, im_f, abs_f`` with 17 significant digits."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["t", "re_f", "im_f", "abs_f"])
    for ti, fi in zip(np.asarray(t), np.asarray(f)):
        w.writerow([_g17(ti), _g17(fi.real), _g17(fi.imag), _g17(abs(fi))])


def write_psi_csv(fh, t, abs_psi, skipped):
    """Columns ``t, abs_psi, skipped_flag``; skipped rows carry ``nan``."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["t", "abs_psi", "skipped_flag"])
    for ti, vi, si in zip(np.asarray(t), np.asarray(abs_psi), np.asarray(skipped)):
        w.writerow([_g17(ti), "nan" if si else _g17(vi), int(bool(si))])
