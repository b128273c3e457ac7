"""SLOCC class identification and canonical forms for three-qubit pure states.

Two complementary routes are provided:

* :func:`classify` checks the three one-party determinants and, when all
  are nonzero, the 3-tangle.
* :func:`product_vectors_in_range` counts product vectors in the range of
  ``rho_BC``; two of them mean GHZ class, exactly one means W class.

:func:`ghz_canonical` and :func:`w_canonical` bring a state to its standard
form by local unitaries and return the invariant parameters.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import BadPartyCount, DegenerateRange, Inconclusive, NotGhzClass, NotWClass
from .measures import batch_det_rho, batch_pair_rho, batch_three_tangle
from .states import GhzCanonicalParams, PureState, WCanonicalParams

GRAM_COND_CAP = 1e8
W_RESIDUAL_TOL = 1e-6
TIE_TOL = 1e-12
# structural thresholds for the product-vector route; far below eps_rank so
# canonical forms can still be read off states close to a class boundary
RANGE_RANK_REL = 1e-13
PRODUCT_RANGE_TOL = 1e-12


class SloccLabel(str, enum.Enum):
    A_B_C = "A-B-C"
    A_BC = "A-BC"
    B_AC = "B-AC"
    C_AB = "C-AB"
    W = "W"
    GHZ = "GHZ"

    def __str__(self):
        return self.value


TENSOR_RANK = {
    SloccLabel.A_B_C: 1,
    SloccLabel.A_BC: 2,
    SloccLabel.B_AC: 2,
    SloccLabel.C_AB: 2,
    SloccLabel.GHZ: 2,
    SloccLabel.W: 3,
}

LOCAL_RANKS = {
    SloccLabel.A_B_C: (1, 1, 1),
    SloccLabel.A_BC: (1, 2, 2),
    SloccLabel.B_AC: (2, 1, 2),
    SloccLabel.C_AB: (2, 2, 1),
    SloccLabel.W: (2, 2, 2),
    SloccLabel.GHZ: (2, 2, 2),
}


@dataclass(frozen=True)
class SloccClass:
    label: SloccLabel
    local_ranks: tuple[int, int, int]
    tensor_rank: int
    tau: float
    dets: tuple[float, float, float]

    def to_dict(self) -> dict:
        return {
            "class": self.label.value,
            "ranks": list(self.local_ranks),
            "tau": self.tau,
            "tensor_rank": self.tensor_rank,
        }


def _three_qubit_amps(psi: PureState) -> np.ndarray:
    if psi.dims != (2, 2, 2):
        raise BadPartyCount(f"classification needs three qubits, got dims {psi.dims}")
    return psi.amplitudes


def label_from_dets(dets, tau: float, tol: Tolerances = DEFAULT_TOLERANCES) -> SloccLabel:
    """Table lookup from the vanishing pattern of ``det rho_k`` and the tangle."""
    dets = [abs(float(d)) for d in dets]
    for k, d in enumerate(dets):
        if tol.eps_rank < d < 10 * tol.eps_rank:
            raise Inconclusive(f"det rho_{'ABC'[k]} = {d:.3e} is inside the guard band "
                               f"({tol.eps_rank:.1e}, {10 * tol.eps_rank:.1e})")
    vanishing = tuple(d <= tol.eps_rank for d in dets)
    if all(vanishing):
        return SloccLabel.A_B_C
    if sum(vanishing) == 2:
        raise Inconclusive(f"two vanishing determinants {dets} cannot occur for a pure state")
    if vanishing[0]:
        return SloccLabel.A_BC
    if vanishing[1]:
        return SloccLabel.B_AC
    if vanishing[2]:
        return SloccLabel.C_AB
    return SloccLabel.GHZ if tau > tol.eps_tau else SloccLabel.W


def classify(psi: PureState, tol: Tolerances = DEFAULT_TOLERANCES) -> SloccClass:
    """Assign one of the six SLOCC classes.

    Step 1 checks ``det rho_A``, ``det rho_B``, ``det rho_C`` against
    ``tol.eps_rank``. Only if none vanishes is the 3-tangle computed and
    compared with ``tol.eps_tau``.

    Raises
    ------
    Inconclusive
        If a determinant lies in ``(eps_rank, 10 eps_rank)``.
    """
    amps = _three_qubit_amps(psi)
    dets = batch_det_rho(amps)
    vanishing = dets <= tol.eps_rank
    tau = 0.0 if vanishing.any() else float(batch_three_tangle(amps))
    label = label_from_dets(dets, tau, tol)
    return SloccClass(label, LOCAL_RANKS[label], TENSOR_RANK[label], tau, tuple(float(d) for d in dets))


def classify_batch(amps: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> list[SloccLabel]:
    """Labels for a stack of amplitude rows (same rules as :func:`classify`)."""
    amps = np.asarray(amps, dtype=complex).reshape(-1, 8)
    dets = batch_det_rho(amps)
    full = np.all(dets > tol.eps_rank, axis=-1)
    tau = np.zeros(len(amps))
    if full.any():
        tau[full] = batch_three_tangle(amps[full])
    return [label_from_dets(d, t, tol) for d, t in zip(dets, tau)]


# -- product vectors in R(rho_BC) -------------------------------------------------


@dataclass(frozen=True)
class ProductVectorSet:
    """Product vectors spanning part of ``R(rho_BC)``.

    ``roots`` are the projective solutions ``(s, t)`` of
    ``det(s M1 + t M2) = 0``, where ``M1``, ``M2`` are the 2x2 reshapes of
    the range basis ``basis[:, 0]``, ``basis[:, 1]``. ``vectors`` are the
    corresponding normalized product vectors and ``factors`` their
    ``(b, c)`` factorizations.
    """

    count: int
    vectors: list[np.ndarray]
    factors: list[tuple[np.ndarray, np.ndarray]]
    roots: list[tuple[complex, complex]]
    basis: np.ndarray = field(repr=False)
    discriminant: float = 0.0


def _range_basis_bc(amps: np.ndarray) -> np.ndarray:
    rho_bc = batch_pair_rho(amps, (1, 2))
    eig = linalg.eig_hermitian(rho_bc)
    if eig.eigenvalues[1] <= RANGE_RANK_REL * eig.eigenvalues[0]:
        raise DegenerateRange("rho_BC has rank < 2")
    return eig.eigenvectors[:, :2]


def _quadratic(m1: np.ndarray, m2: np.ndarray) -> tuple[complex, complex, complex]:
    """Coefficients of ``det(s M1 + t M2) = c0 s^2 + c1 s t + c2 t^2``."""
    c0 = linalg.det2(m1)
    c2 = linalg.det2(m2)
    c1 = m1[0, 0] * m2[1, 1] + m2[0, 0] * m1[1, 1] - m1[0, 1] * m2[1, 0] - m2[0, 1] * m1[1, 0]
    return complex(c0), complex(c1), complex(c2)


def _solve_homogeneous(c0: complex, c1: complex, c2: complex, double: bool) -> list[tuple[complex, complex]]:
    """Projective roots ``(s, t)`` of ``c0 s^2 + c1 s t + c2 t^2``; one root when ``double``.

    Written without divisions so roots at ``t/s = 0`` or ``infinity`` need no
    special casing.
    """
    if double:
        # the mean of the two roots is well conditioned; the split is not
        return [(2 * c2, -c1)] if abs(c2) >= abs(c0) else [(-c1, 2 * c0)]
    sq = np.sqrt(complex(c1 * c1 - 4 * c0 * c2))
    if (c1.conjugate() * sq).real < 0:
        sq = -sq
    q = -(c1 + sq) / 2  # |q| >= |c1| / 2 and q != 0 for distinct roots
    return [(c2, q), (q, c0)]


def _factor_product(v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split a (near) product vector of two qubits into unit factors ``b``, ``c``."""
    m = v.reshape(2, 2)
    col = np.argmax(np.linalg.norm(m, axis=0))
    b = m[:, col] / np.linalg.norm(m[:, col])
    c = b.conj() @ m
    return b, c / np.linalg.norm(c)


def product_vectors_in_range(psi: PureState, tol: Tolerances = DEFAULT_TOLERANCES) -> ProductVectorSet:
    """Find the product vectors contained in the range of ``rho_BC``.

    Requires ``rho_BC`` of rank 2 whose range is not made up entirely of
    product vectors (which happens when B or C factors out). Generic states
    give two product vectors; the W class is exactly the case of a double
    root.
    """
    amps = _three_qubit_amps(psi)
    basis = _range_basis_bc(amps)
    m1, m2 = basis[:, 0].reshape(2, 2), basis[:, 1].reshape(2, 2)
    c0, c1, c2 = _quadratic(m1, m2)
    scale = max(abs(c0), abs(c1), abs(c2))
    if scale <= PRODUCT_RANGE_TOL:
        raise DegenerateRange("every vector in R(rho_BC) is a product vector")
    disc = abs(c1 * c1 - 4 * c0 * c2) / scale**2
    double = disc <= tol.eps_disc
    roots = _solve_homogeneous(c0, c1, c2, double)
    vectors, factors = [], []
    for s, t in roots:
        v = s * basis[:, 0] + t * basis[:, 1]
        v = v / np.linalg.norm(v)
        b, c = _factor_product(v)
        # re-expand so the stored vector is exactly a product
        vectors.append(np.kron(b, c) * (np.vdot(np.kron(b, c), v) / abs(np.vdot(np.kron(b, c), v))))
        factors.append((b, c))
    return ProductVectorSet(len(roots), vectors, factors, roots, basis, float(disc))


# -- canonical forms -----------------------------------------------------------------


def _split_unit(vec: np.ndarray) -> tuple[np.ndarray, float]:
    n = float(np.linalg.norm(vec))
    return vec / n, n


def ghz_decomposition(psi: PureState, tol: Tolerances = DEFAULT_TOLERANCES):
    """Two-term product decomposition ``psi = sum_i a_i (x) b_i (x) c_i``.

    Returns a list of two ``(a, b, c)`` triples with ``b``, ``c`` unit
    vectors and ``a`` carrying the weight. The ``a_i`` are overlaps of psi
    with the vectors of ``R(rho_BC)`` biorthonormal to the product states.
    """
    pv = product_vectors_in_range(psi, tol)
    if pv.count != 2:
        raise NotGhzClass("range of rho_BC holds a single product vector")
    prods = np.stack(pv.vectors, axis=1)  # 4 x 2
    gram = linalg.dagger(prods) @ prods
    if np.linalg.cond(gram) > GRAM_COND_CAP:
        raise Inconclusive("product vectors are nearly parallel (Gram condition number above 1e8)")
    dual = prods @ np.linalg.inv(gram)
    mat = psi.amplitudes.reshape(2, 4)
    a = mat @ dual.conj()  # column i = <xi_i|psi>
    return [(a[:, i], pv.factors[i][0], pv.factors[i][1]) for i in range(2)]


def _overlap(x1: np.ndarray, x2: np.ndarray) -> tuple[float, float]:
    """``|<x1|x2>|`` and its phase (0 for orthogonal vectors)."""
    ov = np.vdot(x1, x2)
    c = min(abs(ov), 1.0)
    theta = float(np.angle(ov)) if c > 0 else 0.0
    return c, theta


def ghz_canonical(psi: PureState, tol: Tolerances = DEFAULT_TOLERANCES) -> GhzCanonicalParams:
    """Standard-form parameters of a GHZ-class state.

    Membership is decided by the product vectors of ``R(rho_BC)``: exactly
    two are needed, otherwise ``NotGhzClass`` or ``DegenerateRange`` is
    raised.

    The two product terms are rotated by local unitaries to ``|000>`` and
    ``|phi_A phi_B phi_C>``; the heavier term becomes ``|000>`` so that
    ``delta <= pi/4``. When both terms carry equal weight the ordering
    with ``phi <= pi`` is chosen. ``phi`` is set to 0 when one of the
    angles is ``pi/2``, where it can be absorbed locally.
    """
    try:
        terms = ghz_decomposition(psi, tol)
    except DegenerateRange as exc:
        raise NotGhzClass(str(exc)) from exc
    units, weights = [], []
    for a, b, c in terms:
        x, na = _split_unit(a)
        units.append((x, b, c))
        weights.append(na)

    def params_for(first: int) -> tuple[float, float, float, float, float]:
        second = 1 - first
        mu1, mu2 = weights[first], weights[second]
        overlaps = [_overlap(units[first][k], units[second][k]) for k in range(3)]
        angles = [math.acos(min(1.0, c)) for c, _ in overlaps]
        phase = sum(th for _, th in overlaps)
        delta = math.atan2(mu2, mu1)
        if min(math.cos(x) for x in angles) <= 1e-14:
            phi = 0.0
        else:
            phi = phase % (2 * math.pi)
            if phi >= 2 * math.pi - 1e-15:
                phi = 0.0
        return delta, angles[0], angles[1], angles[2], phi

    if abs(weights[0] - weights[1]) <= TIE_TOL * max(weights):
        cands = [params_for(0), params_for(1)]
        chosen = min(cands, key=lambda p: (p[4] > math.pi + 1e-12, p[4]))
    else:
        chosen = params_for(0 if weights[0] >= weights[1] else 1)
    delta, alpha, beta, gamma, phi = chosen
    return GhzCanonicalParams(min(delta, math.pi / 4), alpha, beta, gamma, phi)


@dataclass(frozen=True)
class WStructure:
    """``psi = a1 (x) |b1 c1> + a2 (x) |phi_BC>`` with ``phi_BC`` orthogonal to ``|b1 c1>``."""

    a1: np.ndarray
    a2: np.ndarray
    b1: np.ndarray
    c1: np.ndarray
    b1_perp: np.ndarray
    c1_perp: np.ndarray
    x: complex
    y: complex
    z: complex


def _perp(v: np.ndarray) -> np.ndarray:
    return np.array([-v[1].conjugate(), v[0].conjugate()])


def w_structure(psi: PureState, tol: Tolerances = DEFAULT_TOLERANCES) -> WStructure:
    pv = product_vectors_in_range(psi, tol)
    if pv.count != 1:
        raise NotWClass("range of rho_BC holds two product vectors")
    p1 = pv.vectors[0]
    b1, c1 = pv.factors[0]
    # pick the basis vector with the largest component orthogonal to p1
    resid = [pv.basis[:, k] - np.vdot(p1, pv.basis[:, k]) * p1 for k in range(2)]
    phi_bc = max(resid, key=np.linalg.norm)
    phi_bc = phi_bc / np.linalg.norm(phi_bc)
    mat = psi.amplitudes.reshape(2, 4)
    a1 = mat @ p1.conj()
    a2 = mat @ phi_bc.conj()
    b1p, c1p = _perp(b1), _perp(c1)
    x = np.vdot(np.kron(b1, c1p), phi_bc)
    y = np.vdot(np.kron(b1p, c1), phi_bc)
    z = np.vdot(np.kron(b1p, c1p), phi_bc)
    return WStructure(a1, a2, b1, c1, b1p, c1p, complex(x), complex(y), complex(z))


def w_canonical(psi: PureState, tol: Tolerances = DEFAULT_TOLERANCES) -> WCanonicalParams:
    """Weights ``(a, b, c, d)`` of the W-class standard form reachable by local unitaries.

    Membership is decided structurally: ``R(rho_BC)`` must hold exactly one
    product vector.
    """
    try:
        s = w_structure(psi, tol)
    except DegenerateRange as exc:
        raise NotWClass(str(exc)) from exc
    if abs(s.z) > W_RESIDUAL_TOL:
        raise NotWClass(f"|11> component {abs(s.z):.2e} of phi_BC does not vanish")
    e0, n2 = _split_unit(s.a2)
    proj = np.vdot(e0, s.a1)
    perp = s.a1 - proj * e0
    a = (n2 * abs(s.x)) ** 2
    b = (n2 * abs(s.y)) ** 2
    c = float(np.vdot(perp, perp).real)
    d = abs(proj) ** 2
    total = a + b + c + d
    return WCanonicalParams(float(a / total), float(b / total), float(c / total), float(d / total))


# -- tensor rank ------------------------------------------------------------------------


@dataclass(frozen=True)
class TensorRankResult:
    rank: int
    terms: list[tuple[np.ndarray, np.ndarray, np.ndarray]]
    label: SloccLabel

    def reconstruct(self) -> np.ndarray:
        out = np.zeros(8, dtype=complex)
        for a, b, c in self.terms:
            out += np.kron(np.kron(a, b), c)
        return out


def _split_off(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rank-one split ``mat ~ u v^T`` with ``u`` a unit vector."""
    col = np.argmax(np.linalg.norm(mat, axis=0))
    u = mat[:, col] / np.linalg.norm(mat[:, col])
    return u, u.conj() @ mat


def _schmidt_terms(mat: np.ndarray):
    """Two-term Schmidt expansion of a 2 x 2 coefficient matrix."""
    eig = linalg.eig_hermitian(mat @ linalg.dagger(mat))
    out = []
    for i in range(2):
        u = eig.eigenvectors[:, i]
        v = u.conj() @ mat
        out.append((u, v))
    return out


def tensor_rank(psi: PureState, tol: Tolerances = DEFAULT_TOLERANCES) -> TensorRankResult:
    """Minimal number of product terms, with an explicit decomposition.

    Returns rank 1 for A-B-C, 2 for the bipartite classes and GHZ, 3 for W.
    """
    label = classify(psi, tol).label
    t = psi.tensor
    if label == SloccLabel.A_B_C:
        a, rest = _split_off(t.reshape(2, 4))
        b, c = _split_off(rest.reshape(2, 2))
        return TensorRankResult(1, [(a, b, c)], label)
    if label == SloccLabel.A_BC:
        a, rest = _split_off(t.reshape(2, 4))
        terms = [(a, u, v) for u, v in _schmidt_terms(rest.reshape(2, 2))]
        return TensorRankResult(2, terms, label)
    if label == SloccLabel.B_AC:
        b, rest = _split_off(np.transpose(t, (1, 0, 2)).reshape(2, 4))
        terms = [(u, b, v) for u, v in _schmidt_terms(rest.reshape(2, 2))]
        return TensorRankResult(2, terms, label)
    if label == SloccLabel.C_AB:
        c, rest = _split_off(np.transpose(t, (2, 0, 1)).reshape(2, 4))
        terms = [(u, v, c) for u, v in _schmidt_terms(rest.reshape(2, 2))]
        return TensorRankResult(2, terms, label)
    if label == SloccLabel.GHZ:
        return TensorRankResult(2, ghz_decomposition(psi, tol), label)
    s = w_structure(psi, tol)
    terms = [(s.a1, s.b1, s.c1), (s.x * s.a2, s.b1, s.c1_perp), (s.y * s.a2, s.b1_perp, s.c1)]
    return TensorRankResult(3, terms, label)
