"""Local operations: invertible local operators, Schmidt form, two-outcome POVMs.

Operators act on one tensor axis per party, so everything here works for
any number of parties and local dimensions, except the tangle checks which
need three qubits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg
from ._runner import run_chunked, trial_seed
from .errors import (
    Annihilated,
    BadPartyCount,
    BadRange,
    DimensionMismatch,
    IncompletePovm,
    NotEntangled,
    OutOfRange,
)
from .measures import EPS_RANK, batch_three_tangle, local_rank, party_index, reduce_tensor
from .states import (
    GhzCanonicalParams,
    PureState,
    SchmidtDecomposition,
    WCanonicalParams,
    make_rng,
    random_amplitudes,
)

INVERTIBLE_TOL = 1e-10
ANNIHILATED_TOL = 1e-12
COMPLETENESS_TOL = 1e-10
POVM_RANGE = (0.05, 0.95)


def _invertible(op: np.ndarray) -> bool:
    top = np.max(np.abs(op))
    if top == 0.0:
        return False
    return bool(abs(np.linalg.det(op / top)) > INVERTIBLE_TOL)


@dataclass(frozen=True)
class LocalOperatorTriple:
    """One square operator per party (the name reflects the usual three-party case)."""

    ops: tuple[np.ndarray, ...]
    invertible: tuple[bool, ...] = field(init=False)

    def __post_init__(self):
        ops = tuple(np.asarray(o, dtype=complex) for o in self.ops)
        for o in ops:
            if o.ndim != 2 or o.shape[0] != o.shape[1]:
                raise DimensionMismatch(f"local operators must be square, got {o.shape}")
        object.__setattr__(self, "ops", ops)
        object.__setattr__(self, "invertible", tuple(_invertible(o) for o in ops))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(o.shape[0] for o in self.ops)

    @property
    def is_ilo(self) -> bool:
        return all(self.invertible)

    def matrix(self) -> np.ndarray:
        return linalg.kron(*self.ops)


def _apply_on_axis(tensor: np.ndarray, op: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(op, tensor, axes=([1], [axis])), 0, axis)


def _normalized_image(dims, tensor: np.ndarray) -> tuple[PureState, float]:
    norm = float(np.linalg.norm(tensor))
    if norm < ANNIHILATED_TOL:
        raise Annihilated(f"image norm {norm:.3e} below {ANNIHILATED_TOL}")
    return PureState(tuple(dims), tensor.reshape(-1) / norm), norm * norm


def apply_local(psi: PureState, ops) -> tuple[PureState, float]:
    """``(A (x) B (x) ...) psi`` normalized, with the squared norm of the raw image."""
    t = ops if isinstance(ops, LocalOperatorTriple) else LocalOperatorTriple(tuple(ops))
    if t.dims != psi.dims:
        raise DimensionMismatch(f"operator dims {t.dims} do not match state dims {psi.dims}")
    tensor = psi.tensor
    for k, op in enumerate(t.ops):
        tensor = _apply_on_axis(tensor, op, k)
    return _normalized_image(psi.dims, tensor)


def apply_on_party(psi: PureState, op, party) -> tuple[PureState, float]:
    """Act with ``op`` on a single party and the identity elsewhere."""
    k = party_index(party, psi.n_parties)
    op = np.asarray(op, dtype=complex)
    if op.shape != (psi.dims[k], psi.dims[k]):
        raise DimensionMismatch(f"operator shape {op.shape} does not match party dim {psi.dims[k]}")
    return _normalized_image(psi.dims, _apply_on_axis(psi.tensor, op, k))


def ilo_for_ghz_class(p: GhzCanonicalParams) -> LocalOperatorTriple:
    """Upper-triangular operators taking GHZ to the standard form with parameters ``p``."""
    p.validate()
    cd, sd = math.cos(p.delta), math.sin(p.delta)
    ca, sa = math.cos(p.alpha), math.sin(p.alpha)
    ph = np.exp(1j * p.phi)
    a = math.sqrt(2 * p.K) * np.array([[cd, sd * ca * ph], [0.0, sd * sa * ph]])
    b = np.array([[1.0, math.cos(p.beta)], [0.0, math.sin(p.beta)]])
    c = np.array([[1.0, math.cos(p.gamma)], [0.0, math.sin(p.gamma)]])
    return LocalOperatorTriple((a, b, c))


def ilo_for_w_class(q: WCanonicalParams) -> LocalOperatorTriple:
    """Operators taking W to ``sqrt(a)|001> + sqrt(b)|010> + sqrt(c)|100> + sqrt(d)|000>``."""
    q.validate()
    a = np.array([[math.sqrt(q.a), math.sqrt(max(q.d, 0.0))], [0.0, math.sqrt(q.c)]])
    b = np.array([[math.sqrt(3.0), 0.0], [0.0, math.sqrt(3.0 * q.b / q.a)]])
    return LocalOperatorTriple((a, b, np.eye(2)))


# -- bipartite pure states -------------------------------------------------------------


def schmidt(psi: PureState, eps_rank: float = EPS_RANK) -> SchmidtDecomposition:
    """Schmidt decomposition from the eigenvectors of ``Psi Psi^dagger``.

    Coefficients are the squared Schmidt weights ``lambda_i`` in descending
    order; those at or below ``eps_rank`` are dropped.
    """
    if psi.n_parties != 2:
        raise BadPartyCount(f"Schmidt decomposition needs two parties, got {psi.n_parties}")
    m = psi.tensor
    eig = linalg.eig_hermitian(m @ linalg.dagger(m))
    keep = eig.eigenvalues > eps_rank
    lam = eig.eigenvalues[keep]
    left = eig.eigenvectors[:, keep]
    right = (m.T @ left.conj()) / np.sqrt(lam)
    return SchmidtDecomposition(lam, left, right)


@dataclass(frozen=True)
class EprConversion:
    """``e2`` is the smaller Schmidt weight; ``probability`` is ``min(1, 2 e2)``."""

    e2: float
    probability: float

    def to_dict(self) -> dict:
        return {"e2": self.e2, "probability": self.probability}


def epr_conversion_probability(psi: PureState, eps_rank: float = EPS_RANK) -> EprConversion:
    if psi.dims != (2, 2):
        raise BadPartyCount(f"expected two qubits, got dims {psi.dims}")
    sd = schmidt(psi, eps_rank)
    if sd.schmidt_number < 2:
        raise NotEntangled("product state cannot be converted to EPR")
    e2 = float(sd.coefficients[1])
    return EprConversion(e2, min(1.0, 2.0 * e2))


# -- two-outcome POVMs -----------------------------------------------------------------


def haar_unitary(rng: np.random.Generator, n: int = 2) -> np.ndarray:
    """Haar unitary from the QR factorization of a complex Gaussian matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


@dataclass(frozen=True)
class TwoOutcomePovm:
    """``A1 = U1 diag(a, b) V`` and ``A2 = U2 diag(sqrt(1-a^2), sqrt(1-b^2)) V``."""

    a: float
    b: float
    V: np.ndarray
    U1: np.ndarray
    U2: np.ndarray

    def __post_init__(self):
        if not (0.0 <= self.a <= 1.0 and 0.0 <= self.b <= 1.0):
            raise BadRange(f"a={self.a}, b={self.b} must lie in [0, 1]")
        res = self.completeness_residual()
        if res > COMPLETENESS_TOL:
            raise IncompletePovm(f"completeness residual {res:.3e}")

    @property
    def A1(self) -> np.ndarray:
        return self.U1 @ np.diag([self.a, self.b]) @ self.V

    @property
    def A2(self) -> np.ndarray:
        d = np.sqrt(np.maximum(0.0, 1.0 - np.array([self.a, self.b]) ** 2))
        return self.U2 @ np.diag(d) @ self.V

    def completeness_residual(self) -> float:
        a1, a2 = self.A1, self.A2
        s = linalg.dagger(a1) @ a1 + linalg.dagger(a2) @ a2
        return float(np.linalg.norm(s - np.eye(2)))


def random_povm(rng: np.random.Generator) -> TwoOutcomePovm:
    a, b = rng.uniform(*POVM_RANGE, size=2)
    return TwoOutcomePovm(float(a), float(b), haar_unitary(rng), haar_unitary(rng), haar_unitary(rng))


@dataclass(frozen=True)
class PovmOutcome:
    """Normalized branches and their probabilities; a branch with ``p = 0`` is ``None``."""

    phi1: PureState | None
    phi2: PureState | None
    p1: float
    p2: float


def _branch(psi: PureState, op: np.ndarray, k: int) -> tuple[PureState | None, float]:
    tensor = _apply_on_axis(psi.tensor, op, k)
    p = float(np.vdot(tensor, tensor).real)
    if math.sqrt(p) < ANNIHILATED_TOL:
        return None, 0.0
    return PureState(psi.dims, tensor.reshape(-1) / math.sqrt(p)), p


def apply_povm(psi: PureState, povm: TwoOutcomePovm, party) -> PovmOutcome:
    k = party_index(party, psi.n_parties)
    if psi.dims[k] != 2:
        raise DimensionMismatch(f"two-outcome POVM needs a qubit, party {k} has dim {psi.dims[k]}")
    phi1, p1 = _branch(psi, povm.A1, k)
    phi2, p2 = _branch(psi, povm.A2, k)
    if abs(p1 + p2 - 1.0) > COMPLETENESS_TOL:
        raise IncompletePovm(f"branch probabilities sum to {p1 + p2}")
    return PovmOutcome(phi1, phi2, p1, p2)


def tau_power(tau, eta: float):
    """``tau**eta`` with the continuous extension ``0**eta = 0``."""
    tau = np.maximum(np.asarray(tau, dtype=float), 0.0)
    out = np.where(tau > 0.0, np.power(np.where(tau > 0.0, tau, 1.0), eta), 0.0)
    return float(out) if out.ndim == 0 else out


def _check_eta(eta: float) -> float:
    eta = float(eta)
    if not (0.0 < eta <= 1.0):
        raise OutOfRange(f"eta={eta} outside (0, 1]")
    return eta


def tangle_monotonicity_trial(psi: PureState, povm: TwoOutcomePovm, party, eta: float) -> tuple[float, float]:
    """Average ``p1 tau(phi1)^eta + p2 tau(phi2)^eta`` and the baseline ``tau(psi)^eta``."""
    eta = _check_eta(eta)
    if psi.dims != (2, 2, 2):
        raise BadPartyCount(f"the 3-tangle needs three qubits, got dims {psi.dims}")
    out = apply_povm(psi, povm, party)
    rows = [psi.amplitudes] + [b.amplitudes for b in (out.phi1, out.phi2) if b is not None]
    taus = batch_three_tangle(np.stack(rows))
    weights = [p for b, p in ((out.phi1, out.p1), (out.phi2, out.p2)) if b is not None]
    avg = sum(w * tau_power(t, eta) for w, t in zip(weights, taus[1:]))
    return float(avg), tau_power(taus[0], eta)


def _draw_trial(seed: int):
    rng = make_rng(seed)
    amps = random_amplitudes(rng, 8)
    povm = random_povm(rng)
    party = int(rng.integers(3))
    return amps, povm, party


def _monotonicity_chunk(start: int, stop: int, seed: int, etas: tuple[float, ...]):
    n = stop - start
    seeds = np.array([trial_seed(seed, i) for i in range(start, stop)], dtype=np.uint64)
    base = np.empty((n, 8), dtype=complex)
    branches = np.zeros((n, 2, 8), dtype=complex)
    probs = np.zeros((n, 2))
    for j, s in enumerate(seeds):
        amps, povm, party = _draw_trial(int(s))
        base[j] = amps
        t = amps.reshape(2, 2, 2)
        for i, op in enumerate((povm.A1, povm.A2)):
            img = _apply_on_axis(t, op, party).reshape(-1)
            p = float(np.vdot(img, img).real)
            probs[j, i] = p
            if p > ANNIHILATED_TOL**2:
                branches[j, i] = img / math.sqrt(p)
    tau0 = batch_three_tangle(base)
    live = probs > ANNIHILATED_TOL**2
    taus = np.zeros((n, 2))
    taus[live] = batch_three_tangle(branches[live])
    out = {}
    for eta in etas:
        avg = np.sum(probs * np.where(live, tau_power(taus, eta), 0.0), axis=1)
        out[eta] = avg - tau_power(tau0, eta)
    return seeds, out


def tangle_monotonicity_sweep(trials: int, etas: Sequence[float] = (0.25, 0.5, 1.0), seed: int = 0,
                              workers: int = 1) -> list[dict]:
    """Random (state, POVM, party) triples; one report per ``eta``.

    ``max_violation`` is the largest ``<tau^eta> - tau(psi)^eta`` seen (a
    negative number when the inequality holds everywhere) and ``worst_seed``
    is the trial seed achieving it.
    """
    etas = tuple(_check_eta(e) for e in etas)
    parts = run_chunked(_monotonicity_chunk, trials, workers, (seed, etas))
    seeds = np.concatenate([p[0] for p in parts])
    reports = []
    for eta in etas:
        gap = np.concatenate([p[1][eta] for p in parts])
        j = int(np.argmax(gap))
        reports.append({"trials": int(trials), "eta": eta, "max_violation": float(gap[j]),
                        "worst_seed": int(seeds[j])})
    return reports


def replay_monotonicity_trial(trial_seed_value: int, eta: float) -> tuple[float, float]:
    """Rebuild and rerun the trial behind a reported ``worst_seed``."""
    amps, povm, party = _draw_trial(trial_seed_value)
    return tangle_monotonicity_trial(PureState((2, 2, 2), amps), povm, party, eta)


# -- local rank monotonicity -----------------------------------------------------------


def local_ranks(psi: PureState, eps_rank: float = EPS_RANK) -> tuple[int, ...]:
    return tuple(local_rank(reduce_tensor(psi.tensor, (k,)), eps_rank) for k in range(psi.n_parties))


@dataclass(frozen=True)
class RankReport:
    before: tuple[int, ...]
    after: tuple[int, ...]
    invertible: bool

    @property
    def ok(self) -> bool:
        if any(a > b for a, b in zip(self.after, self.before)):
            return False
        return not self.invertible or self.after == self.before

    def to_dict(self) -> dict:
        return {"before": list(self.before), "after": list(self.after),
                "invertible": self.invertible, "ok": self.ok}


def verify_rank_monotonicity(psi: PureState, op, party, eps_rank: float = EPS_RANK) -> RankReport:
    """Local ranks before and after acting with ``op`` on one party."""
    image, _ = apply_on_party(psi, op, party)
    return RankReport(local_ranks(psi, eps_rank), local_ranks(image, eps_rank),
                      _invertible(np.asarray(op, dtype=complex)))


def random_local_op(rng: np.random.Generator, invertible: bool, d: int = 2) -> np.ndarray:
    """Gaussian matrix (invertible with probability one) or a random rank-one projector."""
    if invertible:
        return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    v = random_amplitudes(rng, d)
    return np.outer(v, v.conj())


def _rank_chunk(start: int, stop: int, seed: int):
    bad, worst = 0, None
    for i in range(start, stop):
        s = trial_seed(seed, i)
        rng = make_rng(s)
        psi = PureState((2, 2, 2), random_amplitudes(rng, 8))
        invertible = bool(rng.integers(2))
        op = random_local_op(rng, invertible)
        party = int(rng.integers(3))
        if not verify_rank_monotonicity(psi, op, party).ok:
            bad += 1
            worst = s if worst is None else worst
    return bad, worst


def rank_monotonicity_sweep(trials: int, seed: int = 0, workers: int = 1) -> dict:
    parts = run_chunked(_rank_chunk, trials, workers, (seed,))
    bad = sum(p[0] for p in parts)
    worst = next((p[1] for p in parts if p[1] is not None), None)
    return {"trials": int(trials), "violations": int(bad), "worst_seed": worst}
