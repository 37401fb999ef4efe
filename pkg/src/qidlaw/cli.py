"""``qid`` command line.

Exit codes: 0 success (QID / check passed), 1 input error, 2 a numerical
acceptance check failed (factor residual or round-trip discrepancy at or
above 1e-6), 10 NOT_QID, 20 INCONCLUSIVE, 30 grid too coarse after the
maximal refinement.
"""

import argparse
from contextlib import contextmanager
import math
import os
import sys

import numpy as np

from .charfn import SearchBudget, Tag, eval_cf_grid, qid_verdict
from .diagnostics import psi_values
from .errors import GridTooCoarse, NotLattice, NotQID, QIDError
from .io import (LawFileError, dumps, load_law, spectrum_to_dict, triplet_to_dict,
                 verdict_to_dict, write_cf_csv, write_psi_csv)
from .law import detect_lattice
from .spectral import decompose
from .triplet import jordan_split, reconstruct_lattice_law, to_triplet, verify_factorization

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_CHECK_FAILED = 2
EXIT_NOT_QID = 10
EXIT_INCONCLUSIVE = 20
EXIT_GRID = 30

TAG_EXIT = {Tag.QID: EXIT_OK, Tag.NOT_QID: EXIT_NOT_QID, Tag.INCONCLUSIVE: EXIT_INCONCLUSIVE}

FACTOR_TOL = 1e-6
ROUNDTRIP_TOL = 1e-6


def _positive(kind):
    def parse(s):
        v = kind(s)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {s}")
        return v
    return parse


def build_parser():
    parser = argparse.ArgumentParser(prog="qid", description="Quasi-infinite divisibility of discrete laws")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", required=True, help="law JSON file")
    common.add_argument("--out", help="output file (prefix for commands writing two files)")
    common.add_argument("--zero-tol", type=_positive(float), default=1e-10)
    common.add_argument("--max-evals", type=_positive(int), default=8_000_000)
    common.add_argument("--window", type=_positive(float), default=None,
                        help="initial scan window (check) or psi scan half-width")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--n-fft", type=_positive(int), default=None)

    sub.add_parser("check", parents=[common], help="decide QID / NOT_QID / INCONCLUSIVE")
    sub.add_parser("spectrum", parents=[common], help="spectral decomposition and triplet")
    sub.add_parser("factor", parents=[common], help="split into two infinitely divisible factors")
    sub.add_parser("roundtrip", parents=[common], help="law -> triplet -> law discrepancy")
    psi = sub.add_parser("psi", parents=[common], help="CSV scan of |psi_tau|")
    psi.add_argument("--tau", type=float, default=1.0)
    psi.add_argument("--n", type=_positive(int), default=10_001)
    dump = sub.add_parser("dump-cf", parents=[common], help="CSV of the characteristic function")
    dump.add_argument("--t0", type=float, default=0.0)
    dump.add_argument("--t1", type=float, default=2 * math.pi)
    dump.add_argument("--n", type=_positive(int), default=1025)
    return parser


def _budget(args):
    return SearchBudget(max_evals=args.max_evals, window0=args.window, zero_tol=args.zero_tol,
                        seed=args.seed)


@contextmanager
def _sink(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _say(args, text):
    # stdout carries the JSON when no --out is given
    print(text, file=sys.stdout if args.out else sys.stderr)


def cmd_check(args):
    law = load_law(args.input)
    verdict = qid_verdict(law, _budget(args))
    with _sink(args.out) as fh:
        fh.write(dumps(verdict_to_dict(verdict)))
    return TAG_EXIT[verdict.tag]


def _decompose(args):
    law = load_law(args.input)
    verdict, spec = decompose(law, _budget(args), n_fft=args.n_fft)
    return law, verdict, spec, to_triplet(spec)


def cmd_spectrum(args):
    law, verdict, spec, trip = _decompose(args)
    if args.out:
        with open(f"{args.out}.spectrum.json", "w") as fh:
            fh.write(dumps(spectrum_to_dict(spec)))
        with open(f"{args.out}.triplet.json", "w") as fh:
            fh.write(dumps(triplet_to_dict(trip)))
    else:
        sys.stdout.write(dumps({"spectrum": spectrum_to_dict(spec), "triplet": triplet_to_dict(trip)}))
    _say(args, f"l1_norm {spec.l1_norm!r}")
    _say(args, f"truncation_bound {spec.truncation_bound!r}")
    _say(args, f"gamma0 {spec.gamma0!r}")
    _say(args, f"gamma {trip.gamma!r}")
    return EXIT_OK


def _period_grid(law, spec, n=4096):
    lat = detect_lattice(law)
    if lat is not None:
        return np.linspace(0.0, 2 * math.pi / lat.span, n)
    return np.linspace(-50.0, 50.0, n)


def cmd_factor(args):
    law, verdict, spec, trip = _decompose(args)
    pos, neg = jordan_split(trip)
    res = verify_factorization(law, pos, neg, _period_grid(law, spec))
    if args.out:
        with open(f"{args.out}.pos.json", "w") as fh:
            fh.write(dumps(triplet_to_dict(pos)))
        with open(f"{args.out}.neg.json", "w") as fh:
            fh.write(dumps(triplet_to_dict(neg)))
    else:
        sys.stdout.write(dumps({"pos": triplet_to_dict(pos), "neg": triplet_to_dict(neg)}))
    _say(args, f"residual {res.max_residual!r}")
    return EXIT_OK if res.max_residual < FACTOR_TOL else EXIT_CHECK_FAILED


def cmd_roundtrip(args):
    law = load_law(args.input)
    lat = detect_lattice(law)
    if lat is None:
        raise NotLattice("roundtrip needs a lattice law")
    _, _, spec, trip = _decompose(args)
    back = reconstruct_lattice_law(trip, lat, n_fft=args.n_fft or 4096)
    a = dict(zip(law.x.tolist(), law.p.tolist()))
    b = dict(zip(back.x.tolist(), back.p.tolist()))
    # positions are recomputed as offset + n*span; match them on the lattice index
    ka = {round((x - lat.offset) / lat.span): p for x, p in a.items()}
    kb = {round((x - lat.offset) / lat.span): p for x, p in b.items()}
    disc = max(abs(ka.get(k, 0.0) - kb.get(k, 0.0)) for k in set(ka) | set(kb))
    report = {"max_mass_discrepancy": disc, "atoms_in": law.size, "atoms_out": back.size,
              "tail_mass_out": back.tail_mass}
    with _sink(args.out) as fh:
        fh.write(dumps(report))
    return EXIT_OK if disc < ROUNDTRIP_TOL else EXIT_CHECK_FAILED


def cmd_psi(args):
    law = load_law(args.input)
    window = args.window if args.window is not None else 10 * math.pi
    t, vals, skip = psi_values(law, args.tau, window, args.n, args.zero_tol)
    with _sink(args.out) as fh:
        write_psi_csv(fh, t, vals, skip)
    return EXIT_OK


def cmd_dump_cf(args):
    law = load_law(args.input)
    t = np.linspace(args.t0, args.t1, args.n)
    f = eval_cf_grid(law, args.t0, args.t1, args.n)
    with _sink(args.out) as fh:
        write_cf_csv(fh, t, f)
    return EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "spectrum": cmd_spectrum,
    "factor": cmd_factor,
    "roundtrip": cmd_roundtrip,
    "psi": cmd_psi,
    "dump-cf": cmd_dump_cf,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    # Library code is single-threaded; QID_THREADS is validated only.
    threads = os.environ.get("QID_THREADS")
    if threads is not None and not (threads.strip().isdigit() and int(threads) > 0):
        print(f"error: QID_THREADS must be a positive integer, got {threads!r}", file=sys.stderr)
        return EXIT_INPUT
    try:
        return COMMANDS[args.command](args)
    except (LawFileError, NotLattice, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NotQID as exc:
        print(f"error: {exc}", file=sys.stderr)
        tag = exc.verdict.tag if exc.verdict is not None else Tag.NOT_QID
        return TAG_EXIT.get(tag, EXIT_NOT_QID)
    except GridTooCoarse as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GRID
    except QIDError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
