"""Command-line entry point: ``tripartite <command> [options]``.

Exit codes: 0 success, 1 unreadable state file, 2 inconclusive result or
other domain error, 3 a verification suite found a violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

import numpy as np

from . import measures as ms
from . import multiparty as mp
from . import slocc
from .classify import SloccLabel, classify, ghz_canonical, w_canonical
from .config import Tolerances
from .errors import NotGhzClass, NotWClass, ParseError, TripartiteError
from .states import (
    PureState,
    load_state,
    make_rng,
    product_state,
    random_amplitudes,
    random_ghz_params,
    random_w_params,
    state_from_ghz_params,
    state_from_w_params,
)

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_DOMAIN = 2
EXIT_VIOLATION = 3

RANDOM_LABELS = ("a-b-c", "a-bc", "b-ac", "c-ab", "w", "ghz", "generic")
SUITES = ("tangle-monotone", "rank-monotone", "etau-bound", "f-grid", "wn")
EXPERIMENTS = ("ef-average", "wn-search")
MONOTONE_TOL = 1e-9
WN_TOL = 1e-12
SEED_MASK = (1 << 64) - 1


class Violation(Exception):
    """Raised after printing a report that failed its check."""


# -- output ----------------------------------------------------------------------------


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _text_lines(obj, prefix: str = "") -> list[str]:
    if isinstance(obj, dict):
        out = []
        for k in sorted(obj):
            out += _text_lines(obj[k], f"{prefix}{k}." if isinstance(obj[k], dict) else f"{prefix}{k}")
        return out
    if isinstance(obj, list) and obj and isinstance(obj[0], dict):
        out = []
        for i, item in enumerate(obj):
            out += _text_lines(item, f"{prefix}[{i}].")
        return out
    return [f"{prefix.rstrip('.')}: {obj}"]


def emit(report, fmt: str, stream=None) -> None:
    stream = sys.stdout if stream is None else stream
    report = _plain(report)
    if fmt == "text":
        stream.write("\n".join(_text_lines(report)) + "\n")
    else:
        stream.write(json.dumps(report, sort_keys=True, indent=2) + "\n")


def _seed(args) -> int:
    """Explicit ``--seed`` or a fresh one (reported so the run can be replayed)."""
    if args.seed is None:
        args.seed = int(np.random.SeedSequence().entropy) & SEED_MASK
    return int(args.seed) & SEED_MASK


# -- commands --------------------------------------------------------------------------


def _canonical_dict(psi: PureState, label: SloccLabel, tol: Tolerances):
    if label == SloccLabel.GHZ:
        return ghz_canonical(psi, tol).to_dict()
    if label == SloccLabel.W:
        return w_canonical(psi, tol).to_dict()
    return None


def cmd_classify(args, tol: Tolerances) -> dict:
    psi = load_state(args.file)
    c = classify(psi, tol)
    out = c.to_dict()
    try:
        out["canonical"] = _canonical_dict(psi, c.label, tol)
    except (NotGhzClass, NotWClass):
        # label and product-vector structure disagree at these tolerances
        out["canonical"] = None
    return out


def cmd_measures(args, tol: Tolerances) -> dict:
    psi = load_state(args.file)
    if psi.dims == (2, 2):
        sd = slocc.schmidt(psi, tol.eps_rank)
        out = {"concurrence": ms.pure_concurrence(psi), "schmidt_coefficients": sd.coefficients,
               "schmidt_number": sd.schmidt_number}
        if sd.schmidt_number == 2:
            epr = slocc.epr_conversion_probability(psi, tol.eps_rank)
            out["epr_conversion"] = {"e2_smaller_schmidt_weight": epr.e2,
                                     "optimal_probability_2_e2": epr.probability}
        return out
    return ms.measure_report(psi, tol.eps_rank).to_dict()


def cmd_canonical(args, tol: Tolerances) -> dict:
    psi = load_state(args.file)
    label = classify(psi, tol).label
    canon = _canonical_dict(psi, label, tol)
    if canon is None:
        raise NotGhzClass(f"class {label.value} has no GHZ- or W-class canonical form")
    return {"class": label.value, "canonical": canon}


def cmd_residual(args, tol: Tolerances) -> dict:
    return mp.residual_report(load_state(args.file), args.measure).to_dict()


def _dress(rng, amps: np.ndarray) -> np.ndarray:
    """Random local unitaries on each qubit; keeps the class and all LU invariants."""
    u = [slocc.haar_unitary(rng) for _ in range(3)]
    t = amps.reshape(2, 2, 2)
    return np.einsum("ai,bj,ck,ijk->abc", u[0], u[1], u[2], t).reshape(-1)


def random_state_for(label: str, rng: np.random.Generator) -> PureState:
    """One draw of a state in the requested class (no self-check)."""
    if label == "generic":
        return PureState((2, 2, 2), random_amplitudes(rng, 8))
    if label == "ghz":
        return PureState((2, 2, 2), _dress(rng, state_from_ghz_params(random_ghz_params(rng)).amplitudes))
    if label == "w":
        return PureState((2, 2, 2), _dress(rng, state_from_w_params(random_w_params(rng)).amplitudes))
    if label == "a-b-c":
        return product_state(*(random_amplitudes(rng, 2) for _ in range(3)))
    single = random_amplitudes(rng, 2)
    pair = random_amplitudes(rng, 4).reshape(2, 2)
    subscripts = {"a-bc": "a,bc->abc", "b-ac": "b,ac->abc", "c-ab": "c,ab->abc"}[label]
    return PureState((2, 2, 2), np.einsum(subscripts, single, pair).reshape(-1))


def cmd_random(args, tol: Tolerances) -> dict:
    seed = _seed(args)
    rng = make_rng(seed)
    want = "GHZ" if args.label == "generic" else args.label.upper()
    for _ in range(100):
        psi = random_state_for(args.label, rng)
        try:
            got = classify(psi, tol).label.value
        except TripartiteError:
            continue
        if got == want:
            break
    else:
        raise TripartiteError(f"could not draw a {want} state in 100 attempts")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(psi.to_dict(), sort_keys=True, indent=1) + "\n")
        return {"class": want, "seed": seed, "out": args.out}
    out = psi.to_dict()
    print(f"seed: {seed}", file=sys.stderr)
    return out


def _verify(args) -> tuple[dict, bool]:
    seed = _seed(args)
    suite = args.suite
    if suite == "tangle-monotone":
        trials = args.trials or 10_000
        reports = slocc.tangle_monotonicity_sweep(trials, tuple(args.eta), seed, args.workers)
        ok = all(r["max_violation"] <= MONOTONE_TOL for r in reports)
        return {"suite": suite, "seed": seed, "tolerance": MONOTONE_TOL, "reports": reports}, ok
    if suite == "rank-monotone":
        rep = slocc.rank_monotonicity_sweep(args.trials or 1000, seed, args.workers)
        return {"suite": suite, "seed": seed, **rep}, rep["violations"] == 0
    if suite == "etau-bound":
        rep = mp.etau_bound_sampling(args.trials or 100_000, seed, args.workers, refine=not args.no_refine)
        return {"suite": suite, "seed": seed, **rep}, rep["ok"]
    if suite == "f-grid":
        best, arg = mp.grid_max_f(args.resolution)
        f0 = mp.appendix_c_f(0.0, 0.0, 0.0)
        rep = {"suite": suite, "resolution": args.resolution, "max": best, "argmax": arg, "f_origin": f0}
        return rep, best < 0.0 and f0 == -4.0
    # wn
    rows, worst = [], 0.0
    for n in range(3, args.max_n + 1):
        analytic = mp.wn_pair_concurrence(n)
        reduced = mp.pair_concurrences_n(mp.w_n(n))
        avg_c2 = float(np.mean([c * c for c in reduced.values()]))
        err = max(abs(analytic - 2.0 / n), max(abs(c - 2.0 / n) for c in reduced.values()),
                  abs(avg_c2 - 4.0 / n**2))
        worst = max(worst, err)
        rows.append({"n": n, "expected": 2.0 / n, "analytic": analytic,
                     "reduced_min": min(reduced.values()), "reduced_max": max(reduced.values()),
                     "average_c2": avg_c2, "max_error": err})
    return {"suite": suite, "tolerance": WN_TOL, "max_error": worst, "rows": rows}, worst <= WN_TOL


def cmd_verify(args, tol: Tolerances) -> dict:
    rep, ok = _verify(args)
    rep["passed"] = ok
    if not ok:
        raise Violation(rep)
    return rep


def cmd_experiment(args, tol: Tolerances) -> dict:
    seed = _seed(args)
    if args.name == "ef-average":
        rep = mp.ef_average_sampling(args.samples or 20_000, seed, args.workers)
    else:
        rep = mp.wn_conjecture_search(args.n, args.samples or 2000, seed)
    return {"experiment": args.name, "seed": seed, **rep}


def cmd_dimcount(args, tol: Tolerances) -> dict:
    return mp.class_count_lower_bound(args.dims).to_dict()


# -- parser ----------------------------------------------------------------------------


def _global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--seed", type=int, default=d(None), help="master seed for randomized commands")
    parser.add_argument("--workers", type=int, default=d(1), help="worker processes for sweeps")
    parser.add_argument("--format", choices=("json", "text"), default=d("json"))
    parser.add_argument("--eps-rank", type=float, default=d(None), help="vanishing-determinant threshold")
    parser.add_argument("--eps-tau", type=float, default=d(None), help="vanishing-tangle threshold")
    parser.add_argument("--eps-disc", type=float, default=d(None), help="double-root discriminant threshold")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tripartite", description="Three-qubit entanglement classification toolkit.")
    _global_options(p, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)
    sub = p.add_subparsers(dest="command", required=True)

    for name, fn, help_ in (("classify", cmd_classify, "SLOCC class of a state file"),
                            ("measures", cmd_measures, "entropies, ranks, concurrences and tangle"),
                            ("canonical", cmd_canonical, "canonical-form parameters (GHZ or W class)")):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("file")
        s.set_defaults(func=fn)

    s = sub.add_parser("residual", parents=[common], help="average and worst-case pairwise entanglement")
    s.add_argument("file")
    s.add_argument("--measure", choices=mp.MEASURES, default="concurrence2")
    s.set_defaults(func=cmd_residual)

    s = sub.add_parser("random", parents=[common], help="write a random state of the given class")
    s.add_argument("label", choices=RANDOM_LABELS)
    s.add_argument("--out", help="output path (default: stdout)")
    s.set_defaults(func=cmd_random)

    s = sub.add_parser("verify", parents=[common], help="run a verification suite")
    s.add_argument("suite", choices=SUITES)
    s.add_argument("--trials", type=int, default=None, help="trial or sample count")
    s.add_argument("--eta", type=float, nargs="+", default=[0.25, 0.5, 1.0])
    s.add_argument("--resolution", type=int, default=201)
    s.add_argument("--max-n", type=int, default=10)
    s.add_argument("--no-refine", action="store_true", help="skip the local ascent from the sampled maximum")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("experiment", parents=[common], help="report-only sampling experiments")
    s.add_argument("name", choices=EXPERIMENTS)
    s.add_argument("--samples", type=int, default=None)
    s.add_argument("--n", type=int, default=4, help="party count for wn-search")
    s.set_defaults(func=cmd_experiment)

    s = sub.add_parser("dimcount", parents=[common], help="parameter-count lower bound for SLOCC classes")
    s.add_argument("dims", type=int, nargs="+")
    s.set_defaults(func=cmd_dimcount)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        tol = Tolerances.from_env(eps_rank=args.eps_rank, eps_tau=args.eps_tau, eps_disc=args.eps_disc)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    try:
        report = args.func(args, tol)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except Violation as v:
        emit(v.args[0], args.format)
        return EXIT_VIOLATION
    except TripartiteError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    emit(report, args.format)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
