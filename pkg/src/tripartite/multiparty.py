"""Residual entanglement bounds, W_N pair structure and SLOCC parameter counting."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from itertools import combinations
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from ._runner import run_chunked, trial_seed
from .errors import BadDims, BadPartyCount, OutOfRange
from .measures import (
    batch_e_tau,
    batch_pair_concurrences,
    concurrence_mixed,
    e2_monotone,
    ent_formation,
    measure_report,
    pair_concurrence,
    reduce_tensor,
)
from .states import GhzCanonicalParams, PureState, make_rng, random_amplitudes, w, w_n

MEASURES = ("concurrence2", "ef", "e2")
ETAU_MAX = 4.0 / 3.0
C2MIN_MAX = 4.0 / 9.0
SAMPLE_CHUNK = 4096


@dataclass(frozen=True)
class ResidualReport:
    measure: str
    e_bar: float
    e_min: float
    e_tau: float
    c2_min: float

    def to_dict(self) -> dict:
        return asdict(self)


def _pair_measure(c: float, measure: str) -> float:
    if measure == "concurrence2":
        return c * c
    if measure == "ef":
        return ent_formation(c)
    if measure == "e2":
        return e2_monotone(c)
    raise ValueError(f"unknown measure {measure!r}; choose from {MEASURES}")


def residual_report(psi: PureState, measure: str = "concurrence2") -> ResidualReport:
    """Average and worst-case pairwise entanglement of a three-qubit state."""
    if measure not in MEASURES:
        raise ValueError(f"unknown measure {measure!r}; choose from {MEASURES}")
    if psi.dims != (2, 2, 2):
        raise BadPartyCount(f"expected three qubits, got dims {psi.dims}")
    cs = [float(c) for c in batch_pair_concurrences(psi.amplitudes)]
    vals = [_pair_measure(c, measure) for c in cs]
    c2 = [c * c for c in cs]
    return ResidualReport(measure, sum(vals) / 3.0, min(vals), sum(c2), min(c2))


# -- GHZ-class closed forms ------------------------------------------------------------


def etau_from_ghz_params(p: GhzCanonicalParams) -> float:
    """Closed-form ``C_AB^2 + C_AC^2 + C_BC^2`` on the GHZ-class standard form."""
    p.validate()
    cd, sd = math.cos(p.delta), math.sin(p.delta)
    sa2, sb2, sg2 = (math.sin(x) ** 2 for x in (p.alpha, p.beta, p.gamma))
    bracket = sa2 * sb2 + sa2 * sg2 + sb2 * sg2 - 3.0 * sa2 * sb2 * sg2
    den = 1.0 + 2.0 * cd * sd * math.cos(p.alpha) * math.cos(p.beta) * math.cos(p.gamma) * math.cos(p.phi)
    return 4.0 * cd * cd * sd * sd * bracket / den**2


def etau_ghz_bound(alpha: float, beta: float, gamma: float) -> float:
    """Upper bound on the GHZ-class E_tau for fixed angles (delta = pi/4, phi = pi).

    The denominator is ``(1 - c_a c_b c_g)^2``; this is what substituting
    ``phi = pi`` gives, and what the polynomial ``appendix_c_f`` is built on.
    """
    x, y, z = math.cos(alpha), math.cos(beta), math.cos(gamma)
    num = (x * x + y * y + z * z) - 2 * (x * x * y * y + x * x * z * z + y * y * z * z) + 3 * x * x * y * y * z * z
    return num / (1.0 - x * y * z) ** 2


def _f(x, y, z):
    x2, y2, z2 = x * x, y * y, z * z
    return (3 * (x2 + y2 + z2) - 6 * (x2 * y2 + x2 * z2 + y2 * z2)
            + 5 * x2 * y2 * z2 - 4 + 8 * x * y * z)


def appendix_c_f(x: float, y: float, z: float) -> float:
    """``3(x^2+y^2+z^2) - 6(x^2y^2+x^2z^2+y^2z^2) + 5x^2y^2z^2 - 4 + 8xyz`` on ``[0, 1)^3``.

    ``E_tau < 4/3`` on the GHZ class is equivalent to this being negative.
    """
    for v in (x, y, z):
        if not (0.0 <= v < 1.0):
            raise OutOfRange(f"argument {v} outside [0, 1)")
    return float(_f(x, y, z))


def grid_max_f(resolution: int = 201) -> tuple[float, tuple[float, float, float]]:
    """Maximum of ``appendix_c_f`` over the grid ``linspace(0, 1 - 1/resolution, resolution)^3``."""
    if resolution < 2:
        raise OutOfRange("resolution must be at least 2")
    g = np.linspace(0.0, 1.0 - 1.0 / resolution, resolution)
    y, z = np.meshgrid(g, g, indexing="ij")
    best, arg = -np.inf, (0.0, 0.0, 0.0)
    for x in g:
        vals = _f(x, y, z)
        k = int(np.argmax(vals))
        if vals.flat[k] > best:
            best = float(vals.flat[k])
            arg = (float(x), float(y.flat[k]), float(z.flat[k]))
    return best, arg


# -- W_N -------------------------------------------------------------------------------


def _check_n(n: int) -> int:
    if int(n) != n or n < 3:
        raise BadPartyCount(f"W_N needs N >= 3, got {n}")
    return int(n)


def wn_pair_state(n: int) -> np.ndarray:
    """Two-party reduction ``(2|Psi+><Psi+| + (N-2)|00><00|) / N`` of ``W_N``."""
    n = _check_n(n)
    psi_plus = np.array([0, 1, 1, 0], dtype=complex) / math.sqrt(2.0)
    rho = 2.0 * np.outer(psi_plus, psi_plus.conj())
    rho[0, 0] += n - 2
    return rho / n


def wn_pair_concurrence(n: int) -> float:
    return float(concurrence_mixed(wn_pair_state(n)))


def pair_concurrences_n(psi: PureState) -> dict[tuple[int, int], float]:
    """Concurrence of every qubit pair of an N-qubit state."""
    if any(d != 2 for d in psi.dims):
        raise BadDims(f"all parties must be qubits, got {psi.dims}")
    pairs = list(combinations(range(psi.n_parties), 2))
    rhos = np.stack([reduce_tensor(psi.tensor, p) for p in pairs])
    cs = np.atleast_1d(concurrence_mixed(rhos))
    return {p: float(c) for p, c in zip(pairs, cs)}


def average_pair_c2(psi: PureState) -> float:
    cs = pair_concurrences_n(psi)
    return float(np.mean([c * c for c in cs.values()]))


def wn_average_c2(n: int) -> float:
    """Average squared pair concurrence of ``W_N`` from its reduced states."""
    return average_pair_c2(w_n(_check_n(n)))


# -- parameter counting ----------------------------------------------------------------


@dataclass(frozen=True)
class DimCount:
    dims: tuple[int, ...]
    state_params: int
    group_params: int
    lower_bound: int

    @property
    def infinitely_many_classes(self) -> bool:
        return self.lower_bound > 0

    def to_dict(self) -> dict:
        return {"dims": list(self.dims), "state_params": self.state_params,
                "group_params": self.group_params, "lower_bound": self.lower_bound,
                "infinitely_many_classes": self.infinitely_many_classes}


def class_count_lower_bound(dims: Sequence[int]) -> DimCount:
    """Real parameters of pure states minus those of the local group ``SL(n_1) x ...``."""
    try:
        dims = tuple(int(d) for d in dims)
    except (TypeError, ValueError) as exc:
        raise BadDims(f"dims must be integers: {dims!r}") from exc
    if len(dims) < 2 or any(d < 2 for d in dims):
        raise BadDims(f"need at least two parties of dimension >= 2, got {dims}")
    state = 2 * (math.prod(dims) - 1)
    group = 2 * sum(d * d - 1 for d in dims)
    return DimCount(dims, state, group, state - group)


# -- sampling experiments --------------------------------------------------------------


def _amps_from_real(x: np.ndarray) -> np.ndarray:
    z = x[:8] + 1j * x[8:]
    return z / np.linalg.norm(z)


def _refine(amps: np.ndarray, objective, maxiter: int = 200) -> np.ndarray:
    """Local BFGS ascent of ``objective`` over normalized 3-qubit amplitudes."""
    x0 = np.concatenate([amps.real, amps.imag])
    res = minimize(lambda x: -objective(_amps_from_real(x)), x0, method="BFGS",
                   options={"maxiter": maxiter, "gtol": 1e-10})
    return _amps_from_real(res.x)


def _invariant_vector(amps: np.ndarray) -> np.ndarray:
    """LU invariants that are insensitive to party order: sorted entropies and pair concurrences, tau."""
    r = measure_report(PureState((2, 2, 2), amps))
    return np.concatenate([np.sort(r.entropies), np.sort([r.c_ab, r.c_ac, r.c_bc]), [r.tau]])


def distance_to_w_orbit(amps: np.ndarray) -> float:
    return float(np.max(np.abs(_invariant_vector(amps) - _invariant_vector(w().amplitudes))))


def _etau_chunk(start: int, stop: int, seed: int):
    best = (-np.inf, -1)
    best_c2min = (-np.inf, -1)
    for c in range(start, stop):
        s = trial_seed(seed, c)
        amps = random_amplitudes(make_rng(s), 8, size=SAMPLE_CHUNK)
        cs = batch_pair_concurrences(amps)
        etau = np.sum(cs**2, axis=1)
        c2min = np.min(cs**2, axis=1)
        k, j = int(np.argmax(etau)), int(np.argmax(c2min))
        if etau[k] > best[0]:
            best = (float(etau[k]), c, k, amps[k])
        if c2min[j] > best_c2min[0]:
            best_c2min = (float(c2min[j]), c)
    return best, best_c2min


def _n_chunks(samples: int) -> int:
    return -(-samples // SAMPLE_CHUNK)


def etau_bound_sampling(samples: int = 100_000, seed: int = 0, workers: int = 1, refine: bool = True) -> dict:
    """Maximum of E_tau and of the smallest squared pair concurrence over Haar samples.

    Samples are drawn in fixed blocks of ``SAMPLE_CHUNK`` states, block ``c``
    seeded with ``trial_seed(seed, c)``, so the result does not depend on
    ``workers``; the block count is rounded up. The argmax state is
    optionally refined by a local ascent and compared with W through LU
    invariants.
    """
    parts = run_chunked(_etau_chunk, _n_chunks(samples), workers, (seed,))
    best = max((p[0] for p in parts), key=lambda b: b[0])
    best_c2 = max((p[1] for p in parts), key=lambda b: b[0])
    report = {
        "samples": _n_chunks(samples) * SAMPLE_CHUNK,
        "max_e_tau": best[0],
        "max_c2_min": best_c2[0],
        "bound_e_tau": ETAU_MAX,
        "bound_c2_min": C2MIN_MAX,
        "ok": bool(best[0] <= ETAU_MAX + 1e-9 and best_c2[0] <= C2MIN_MAX + 1e-9),
        "worst_seed": trial_seed(seed, best[1]),
        "worst_index": best[2],
        "argmax_w_distance": distance_to_w_orbit(best[3]),
    }
    if refine:
        refined = _refine(best[3], lambda a: float(batch_e_tau(a)))
        report["refined_e_tau"] = float(batch_e_tau(refined))
        report["refined_w_distance"] = distance_to_w_orbit(refined)
    return report


def _ef_bar(amps: np.ndarray) -> np.ndarray:
    cs = np.clip(batch_pair_concurrences(amps), 0.0, 1.0)
    x = 0.5 + 0.5 * np.sqrt(1.0 - cs**2)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -x * np.log2(x) - (1 - x) * np.log2(np.where(x < 1.0, 1 - x, 1.0))
    return np.mean(np.where(x < 1.0, h, 0.0), axis=-1)


def _ef_chunk(start: int, stop: int, seed: int):
    best = (-np.inf,)
    for c in range(start, stop):
        amps = random_amplitudes(make_rng(trial_seed(seed, c)), 8, size=SAMPLE_CHUNK)
        vals = _ef_bar(amps)
        k = int(np.argmax(vals))
        if vals[k] > best[0]:
            best = (float(vals[k]), amps[k])
    return best


def ef_average_sampling(samples: int = 20_000, seed: int = 0, workers: int = 1, refine: bool = True) -> dict:
    """Report-only experiment: largest average pairwise E_f over Haar samples versus W."""
    parts = run_chunked(_ef_chunk, _n_chunks(samples), workers, (seed,))
    best = max(parts, key=lambda b: b[0])
    report = {
        "samples": _n_chunks(samples) * SAMPLE_CHUNK,
        "max_e_bar_ef": best[0],
        "w_e_bar_ef": residual_report(w(), "ef").e_bar,
        "argmax_w_distance": distance_to_w_orbit(best[1]),
    }
    if refine:
        refined = _refine(best[1], lambda a: float(_ef_bar(a)))
        report["refined_e_bar_ef"] = float(_ef_bar(refined))
        report["refined_w_distance"] = distance_to_w_orbit(refined)
    return report


def wn_conjecture_search(n: int = 4, samples: int = 2000, seed: int = 0) -> dict:
    """Random search for N-qubit states whose average squared pair concurrence beats ``4/N^2``.

    Half the samples are Haar random, half are random superpositions of the
    single-excitation basis states (the family containing W_N). This is a
    falsification attempt, not a proof; ``exceeded`` flags a counterexample.
    """
    n = _check_n(n)
    rng = make_rng(seed)
    dims = (2,) * n
    singles = [1 << (n - 1 - k) for k in range(n)]
    best, family = -np.inf, None
    for i in range(samples):
        if i % 2 == 0:
            amps = random_amplitudes(rng, 2**n)
            fam = "haar"
        else:
            amps = np.zeros(2**n, dtype=complex)
            amps[singles] = random_amplitudes(rng, n)
            fam = "single-excitation"
        val = average_pair_c2(PureState(dims, amps))
        if val > best:
            best, family = val, fam
    target = 4.0 / n**2
    return {"n": n, "samples": samples, "best_average_c2": best, "best_family": family,
            "w_n_value": target, "exceeded": bool(best > target + 1e-12)}
