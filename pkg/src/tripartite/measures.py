"""Reduced states and entanglement quantities for pure states.

Functions whose names start with ``batch_`` take raw amplitude arrays of
shape ``(n, 8)`` (three qubits, party A most significant) and return one
value per row; the rest take :class:`~tripartite.states.PureState`.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable

import numpy as np

from . import linalg
from .errors import BadDimension, BadPartyCount, BadSubset, OutOfRange
from .states import PureState

PARTY_NAMES = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
TAU_CLAMP = 1e-9
# roundoff in the tangle of W-class states stays below ~5e-15; values under
# this floor are reported as exact zeros so powers tau**eta stay meaningful
TAU_ZERO = 1e-13
EPS_RANK = 1e-9
# relative roundoff floor for squared pair concurrences
C2_FLOOR = 1e-14

# sigma_y (x) sigma_y
_YY = np.array([[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=complex)


def party_index(party, n_parties: int | None = None) -> int:
    if isinstance(party, str):
        if len(party) != 1 or party.upper() not in PARTY_NAMES:
            raise BadSubset(f"unknown party {party!r}")
        idx = PARTY_NAMES.index(party.upper())
    else:
        idx = int(party)
    if idx < 0 or (n_parties is not None and idx >= n_parties):
        raise BadSubset(f"party {party!r} out of range")
    return idx


def _keep_indices(keep, n: int) -> tuple[int, ...]:
    if isinstance(keep, str):
        keep = list(keep)
    elif isinstance(keep, (int, np.integer)):
        keep = [keep]
    idx = sorted({party_index(k, n) for k in keep})
    if not idx or len(idx) >= n:
        raise BadSubset(f"keep must be a nonempty proper subset of {n} parties, got {keep!r}")
    return tuple(idx)


def _require_three_qubits(psi: PureState) -> np.ndarray:
    if psi.dims != (2, 2, 2):
        raise BadPartyCount(f"expected three qubits, got dims {psi.dims}")
    return psi.amplitudes


def reduce_tensor(tensor: np.ndarray, keep: tuple[int, ...], n_batch_axes: int = 0) -> np.ndarray:
    """Partial trace of ``|t><t|`` keeping the listed parties (array form)."""
    n = tensor.ndim - n_batch_axes
    batch = tensor.shape[:n_batch_axes]
    dims = tensor.shape[n_batch_axes:]
    traced = [i for i in range(n) if i not in keep]
    order = list(range(n_batch_axes)) + [n_batch_axes + i for i in keep] + [n_batch_axes + i for i in traced]
    d_keep = math.prod(dims[i] for i in keep)
    mat = np.transpose(tensor, order).reshape(batch + (d_keep, -1))
    return mat @ linalg.dagger(mat)


def reduce(psi: PureState, keep: Iterable) -> np.ndarray:
    """Reduced density matrix of the parties in ``keep`` (e.g. ``"AB"`` or ``{0, 1}``).

    Kept parties appear in ascending order in the result.
    """
    idx = _keep_indices(keep, psi.n_parties)
    return reduce_tensor(psi.tensor, idx)


def local_entropy(rho) -> float:
    """Von Neumann entropy in bits, with ``0 log 0 = 0``."""
    w = linalg.eigvals_hermitian(rho)
    w = w[w > 0.0]
    return float(max(0.0, -np.sum(w * np.log2(w))))


def binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def local_rank(rho, eps_rank: float = EPS_RANK) -> int:
    """Number of eigenvalues above ``eps_rank`` times the largest one."""
    w = linalg.eigvals_hermitian(rho)
    top = w[0]
    if top <= 0.0:
        return 0
    return int(np.sum(w > eps_rank * top))


def concurrence_mixed(rho) -> np.ndarray | float:
    """Two-qubit concurrence ``max(0, l1 - l2 - l3 - l4)`` (stack-aware).

    The ``l_i`` are square roots of the spectrum of ``rho rho~`` with
    ``rho~ = (Y x Y) rho* (Y x Y)``. That spectrum is read off the
    Hermitian matrix ``sqrt(rho) rho~ sqrt(rho)``, which is similar to
    ``rho rho~``.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[-2:] != (4, 4):
        raise BadDimension(f"concurrence needs 4x4 density matrices, got {rho.shape}")
    root = linalg.psd_sqrt(rho)
    flipped = _YY @ rho.conj() @ _YY
    m = root @ flipped @ root
    # Hermitian in exact arithmetic; for rank-deficient rho the product is pure
    # roundoff and can fail the relative hermiticity check, so symmetrize
    m = 0.5 * (m + linalg.dagger(m))
    mu = linalg.clamp_spectrum(np.maximum(linalg.eigvals_hermitian(m), 0.0))
    # the spectrum scales like rho^2; anything below roundoff of that is zero
    floor = linalg.CLAMP_REL * linalg.frobenius(rho)[..., None] ** 2
    mu = np.where(mu <= floor, 0.0, mu)
    lam = np.sqrt(mu)
    c = np.maximum(0.0, lam[..., 0] - lam[..., 1] - lam[..., 2] - lam[..., 3])
    return float(c) if c.ndim == 0 else c


def pure_concurrence(psi: PureState) -> float:
    """``2 |a d - b c|`` for a two-qubit pure state."""
    if psi.dims != (2, 2):
        raise BadDimension(f"expected two qubits, got {psi.dims}")
    return float(2.0 * abs(linalg.det2(psi.tensor)))


# -- batched three-qubit internals ---------------------------------------------------


def _as_tensors(amps) -> np.ndarray:
    amps = np.asarray(amps, dtype=complex)
    if amps.shape[-1] != 8:
        raise BadPartyCount(f"expected 8 amplitudes per state, got {amps.shape}")
    return amps.reshape(amps.shape[:-1] + (2, 2, 2))


def batch_single_rho(amps, party: int) -> np.ndarray:
    t = _as_tensors(amps)
    return reduce_tensor(t, (party,), n_batch_axes=t.ndim - 3)


def batch_pair_rho(amps, pair: tuple[int, int]) -> np.ndarray:
    t = _as_tensors(amps)
    return reduce_tensor(t, tuple(sorted(pair)), n_batch_axes=t.ndim - 3)


def batch_det_rho(amps) -> np.ndarray:
    """``det rho_k`` for k = A, B, C from the closed 2x2 formula; shape (..., 3)."""
    out = []
    for k in range(3):
        r = batch_single_rho(amps, k)
        out.append((r[..., 0, 0].real * r[..., 1, 1].real - np.abs(r[..., 0, 1]) ** 2))
    return np.maximum(np.stack(out, axis=-1), 0.0)


def batch_cut_c2(amps) -> np.ndarray:
    """Squared one-vs-rest concurrences ``4 det rho_k``; shape (..., 3)."""
    return np.minimum(4.0 * batch_det_rho(amps), 1.0)


def batch_pair_concurrences(amps) -> np.ndarray:
    """Concurrences (C_AB, C_AC, C_BC); shape (..., 3).

    For a pure three-qubit state ``rho_AB = Phi Phi^dagger`` with ``Phi`` the
    4 x 2 reshape of psi, so the nonzero spectrum of ``rho rho~`` is that of
    ``T T^dagger`` with ``T = Phi^T (Y x Y) Phi``. That gives
    ``C^2 = ||T||^2 - 2 |det T|`` in closed form, which stays accurate when
    ``rho_AB`` is close to rank one (where the square-root route loses
    about half the digits of the small eigenvalue).
    """
    t = _as_tensors(amps)
    nb = t.ndim - 3
    out = []
    for keep, rest in (((0, 1), 2), ((0, 2), 1), ((1, 2), 0)):
        order = list(range(nb)) + [nb + keep[0], nb + keep[1], nb + rest]
        phi = np.transpose(t, order).reshape(t.shape[:nb] + (4, 2))
        tm = np.swapaxes(phi, -1, -2) @ _YY @ phi
        n2 = np.sum(np.abs(tm) ** 2, axis=(-2, -1))
        c2 = n2 - 2.0 * np.abs(linalg.det2(tm))
        c2 = np.where(c2 <= C2_FLOOR * n2, 0.0, c2)
        out.append(np.sqrt(np.maximum(c2, 0.0)))
    return np.minimum(np.stack(out, axis=-1), 1.0)


def _tangle_from(cut_c2: np.ndarray, pair_c: np.ndarray, focus: int) -> np.ndarray:
    pair_of = {(0, 1): 0, (0, 2): 1, (1, 2): 2}
    others = [k for k in range(3) if k != focus]
    c2 = pair_c**2
    tau = cut_c2[..., focus]
    for o in others:
        tau = tau - c2[..., pair_of[tuple(sorted((focus, o)))]]
    return tau


def clamp_tangle(tau: np.ndarray) -> np.ndarray:
    tau = np.where((tau < 0.0) & (tau >= -TAU_CLAMP), 0.0, tau)
    tau = np.where(np.abs(tau) <= TAU_ZERO, 0.0, tau)
    return np.minimum(tau, 1.0)


def batch_three_tangle(amps, focus: int = 0) -> np.ndarray:
    """3-tangle ``C^2_{k(rest)} - C^2_{kl} - C^2_{km}`` with focus party ``k``."""
    return clamp_tangle(_tangle_from(batch_cut_c2(amps), batch_pair_concurrences(amps), focus))


def batch_e_tau(amps) -> np.ndarray:
    return np.sum(batch_pair_concurrences(amps) ** 2, axis=-1)


# -- single-state API ---------------------------------------------------------------


def cut_concurrence(psi: PureState, kappa) -> float:
    """Concurrence between party ``kappa`` and the other two, ``2 sqrt(det rho_kappa)``."""
    amps = _require_three_qubits(psi)
    k = party_index(kappa, 3)
    det = float(batch_det_rho(amps)[k])
    return float(min(1.0, 2.0 * math.sqrt(det)))


def three_tangle(psi: PureState, focus="A") -> float:
    amps = _require_three_qubits(psi)
    return float(batch_three_tangle(amps, party_index(focus, 3)))


def pair_concurrence(psi: PureState, pair) -> float:
    amps = _require_three_qubits(psi)
    idx = _keep_indices(pair, 3)
    if len(idx) != 2:
        raise BadSubset(f"need exactly two parties, got {pair!r}")
    return float(batch_pair_concurrences(amps)[{(0, 1): 0, (0, 2): 1, (1, 2): 2}[idx]])


def _check_concurrence(c: float) -> float:
    if not (-1e-12 <= c <= 1.0 + 1e-12) or math.isnan(c):
        raise OutOfRange(f"concurrence {c} outside [0, 1]")
    return min(max(c, 0.0), 1.0)


def ent_formation(c: float) -> float:
    """Entanglement of formation ``h(1/2 + sqrt(1 - C^2)/2)`` in bits."""
    c = _check_concurrence(c)
    return binary_entropy(0.5 + 0.5 * math.sqrt(1.0 - c * c))


def e2_monotone(c: float) -> float:
    """Single-copy monotone ``1/2 - sqrt(1 - C^2)/2``."""
    c = _check_concurrence(c)
    return 0.5 - 0.5 * math.sqrt(1.0 - c * c)


@dataclass(frozen=True)
class MeasureReport:
    s_a: float
    s_b: float
    s_c: float
    rank_a: int
    rank_b: int
    rank_c: int
    c_ab: float
    c_ac: float
    c_bc: float
    c_a_bc: float
    c_b_ac: float
    c_c_ab: float
    tau: float
    e_tau: float

    @property
    def entropies(self) -> tuple[float, float, float]:
        return (self.s_a, self.s_b, self.s_c)

    @property
    def ranks(self) -> tuple[int, int, int]:
        return (self.rank_a, self.rank_b, self.rank_c)

    def tangle_residuals(self) -> tuple[float, float, float]:
        """``tau`` minus each of the three focus-dependent tangle expressions."""
        cut = (self.c_a_bc, self.c_b_ac, self.c_c_ab)
        pair = {(0, 1): self.c_ab, (0, 2): self.c_ac, (1, 2): self.c_bc}
        out = []
        for k in range(3):
            o = [j for j in range(3) if j != k]
            t = cut[k] ** 2 - pair[tuple(sorted((k, o[0])))] ** 2 - pair[tuple(sorted((k, o[1])))] ** 2
            out.append(self.tau - t)
        return tuple(out)

    def to_dict(self) -> dict:
        return asdict(self)


def measure_report(psi: PureState, eps_rank: float = EPS_RANK) -> MeasureReport:
    amps = _require_three_qubits(psi)
    singles = [batch_single_rho(amps, k) for k in range(3)]
    s = [local_entropy(r) for r in singles]
    ranks = [local_rank(r, eps_rank) for r in singles]
    pair_c = batch_pair_concurrences(amps)
    cut_c2 = batch_cut_c2(amps)
    tau = float(clamp_tangle(_tangle_from(cut_c2, pair_c, 0)))
    return MeasureReport(
        s_a=s[0], s_b=s[1], s_c=s[2],
        rank_a=ranks[0], rank_b=ranks[1], rank_c=ranks[2],
        c_ab=float(pair_c[0]), c_ac=float(pair_c[1]), c_bc=float(pair_c[2]),
        c_a_bc=float(math.sqrt(cut_c2[0])), c_b_ac=float(math.sqrt(cut_c2[1])), c_c_ab=float(math.sqrt(cut_c2[2])),
        tau=tau,
        e_tau=float(np.sum(pair_c**2)),
    )
