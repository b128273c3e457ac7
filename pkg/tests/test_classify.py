import math

import numpy as np
import pytest
from hypothesis import given

from tripartite import classify as cl
from tripartite.classify import SloccLabel
from tripartite.config import Tolerances
from tripartite.errors import BadPartyCount, Inconclusive, NotGhzClass, NotWClass
from tripartite.measures import measure_report
from tripartite.states import (
    GhzCanonicalParams,
    PureState,
    WCanonicalParams,
    basis_state,
    bipartite_representative,
    from_amplitudes,
    ghz,
    make_rng,
    random_ghz_params,
    random_pure,
    random_w_params,
    state_from_ghz_params,
    state_from_w_params,
    w,
    w_n,
)

from conftest import lu_dress, seeds

TABLE = [
    (basis_state((0, 0, 0)), SloccLabel.A_B_C, (1, 1, 1), 1),
    (bipartite_representative("A-BC"), SloccLabel.A_BC, (1, 2, 2), 2),
    (bipartite_representative("B-AC"), SloccLabel.B_AC, (2, 1, 2), 2),
    (bipartite_representative("C-AB"), SloccLabel.C_AB, (2, 2, 1), 2),
    (w(), SloccLabel.W, (2, 2, 2), 3),
    (ghz(), SloccLabel.GHZ, (2, 2, 2), 2),
]


@pytest.mark.parametrize("psi,label,ranks,trank", TABLE, ids=[t[1].value for t in TABLE])
def test_representatives(psi, label, ranks, trank):
    c = cl.classify(psi)
    assert c.label == label
    assert c.local_ranks == ranks
    assert c.tensor_rank == trank
    assert measure_report(psi).ranks == ranks
    tr = cl.tensor_rank(psi)
    assert tr.rank == trank
    assert np.allclose(tr.reconstruct(), psi.amplitudes, atol=1e-8)


def test_to_dict_shape():
    d = cl.classify(ghz()).to_dict()
    assert d["class"] == "GHZ" and d["ranks"] == [2, 2, 2] and d["tensor_rank"] == 2
    assert d["tau"] == pytest.approx(1.0)


def test_label_table_edges():
    tol = Tolerances()
    assert cl.label_from_dets((0.0, 0.0, 0.0), 0.0, tol) == SloccLabel.A_B_C
    assert cl.label_from_dets((0.1, 0.1, 0.1), 0.5, tol) == SloccLabel.GHZ
    assert cl.label_from_dets((0.1, 0.1, 0.1), 0.0, tol) == SloccLabel.W
    with pytest.raises(Inconclusive):
        cl.label_from_dets((0.1, 5e-9, 0.1), 0.0, tol)
    with pytest.raises(Inconclusive):
        cl.label_from_dets((0.0, 0.0, 0.1), 0.0, tol)


def test_guard_band_state_is_inconclusive():
    # sin^2(eps) cos^2(eps) ~ 3e-9 sits inside (eps_rank, 10 eps_rank)
    eps = math.sqrt(3e-9)
    psi = from_amplitudes((2, 2, 2), [math.cos(eps), 0, 0, 0, 0, 0, 0, math.sin(eps)])
    with pytest.raises(Inconclusive):
        cl.classify(psi)
    # tightening the tolerance resolves it
    assert cl.classify(psi, Tolerances(eps_rank=1e-10)).label == SloccLabel.GHZ


def test_wrong_party_count():
    with pytest.raises(BadPartyCount):
        cl.classify(w_n(4))


def test_ghz_product_vectors_are_00_and_11():
    pv = cl.product_vectors_in_range(ghz())
    assert pv.count == 2
    got = sorted(int(np.argmax(np.abs(v))) for v in pv.vectors)
    assert got == [0, 3]
    for v in pv.vectors:
        assert np.max(np.abs(v)) == pytest.approx(1.0)


def test_w_has_single_product_vector():
    pv = cl.product_vectors_in_range(w())
    assert pv.count == 1
    assert np.abs(pv.vectors[0][0]) == pytest.approx(1.0)  # |00>


@given(seed=seeds)
def test_product_vectors_lie_in_range(seed):
    psi = random_pure((2, 2, 2), seed)
    pv = cl.product_vectors_in_range(psi)
    assert pv.count == 2
    for v in pv.vectors:
        assert abs(np.linalg.det(v.reshape(2, 2))) <= 1e-9
        resid = v - pv.basis @ (pv.basis.conj().T @ v)
        assert np.linalg.norm(resid) <= 1e-9


def test_structure_agrees_with_classifier():
    rng = make_rng(101)
    for _ in range(1000):
        psi = PureState((2, 2, 2), state_from_ghz_params(random_ghz_params(rng)).amplitudes)
        psi = lu_dress(psi, rng)
        try:
            label = cl.classify(psi).label
        except Inconclusive:
            continue
        if label == SloccLabel.GHZ:
            assert cl.product_vectors_in_range(psi).count == 2
    for _ in range(500):
        psi = lu_dress(state_from_w_params(random_w_params(rng)), rng)
        assert cl.classify(psi).label == SloccLabel.W
        assert cl.product_vectors_in_range(psi).count == 1


def test_ghz_canonical_of_ghz():
    p = cl.ghz_canonical(ghz())
    assert p.delta == pytest.approx(math.pi / 4)
    assert (p.alpha, p.beta, p.gamma) == pytest.approx((math.pi / 2,) * 3)
    assert p.phi == 0.0
    assert p.K == pytest.approx(1.0)


def test_w_canonical_of_w():
    q = cl.w_canonical(w())
    assert q.as_tuple() == pytest.approx((1 / 3, 1 / 3, 1 / 3, 0.0), abs=1e-12)


def test_canonical_wrong_class():
    with pytest.raises(NotGhzClass):
        cl.ghz_canonical(w())
    with pytest.raises(NotWClass):
        cl.w_canonical(ghz())
    for label in ("A-BC", "B-AC", "C-AB"):
        with pytest.raises(NotGhzClass):
            cl.ghz_canonical(bipartite_representative(label))
        with pytest.raises(NotWClass):
            cl.w_canonical(bipartite_representative(label))


@given(seed=seeds)
def test_canonical_is_lu_invariant(seed):
    rng = make_rng(seed)
    base = state_from_ghz_params(random_ghz_params(rng))
    a = cl.ghz_canonical(lu_dress(base, rng)).as_tuple()
    b = cl.ghz_canonical(lu_dress(base, rng)).as_tuple()
    assert a == pytest.approx(b, abs=1e-7)
    wb = state_from_w_params(random_w_params(rng))
    assert cl.w_canonical(lu_dress(wb, rng)).as_tuple() == pytest.approx(cl.w_canonical(lu_dress(wb, rng)).as_tuple(), abs=1e-8)


def test_equal_weight_tie_prefers_small_phase():
    # delta = pi/4 with phi > pi is the same orbit as the swapped ordering with 2pi - phi
    p = GhzCanonicalParams(math.pi / 4, 0.7, 0.9, 1.1, 4.0)
    q = cl.ghz_canonical(state_from_ghz_params(p))
    assert q.phi <= math.pi
    assert q.phi == pytest.approx(2 * math.pi - 4.0, abs=1e-7)
    assert (q.alpha, q.beta, q.gamma) == pytest.approx((0.7, 0.9, 1.1), abs=1e-7)


def test_right_angle_drops_phase():
    p = GhzCanonicalParams(0.5, math.pi / 2, 0.4, 0.8, 2.0)
    q = cl.ghz_canonical(state_from_ghz_params(p))
    assert q.phi == 0.0
    assert q.delta == pytest.approx(0.5, abs=1e-9)


def test_tensor_rank_of_ghz_terms():
    terms = cl.tensor_rank(ghz()).terms
    products = sorted((int(np.argmax(np.abs(np.kron(np.kron(a, b), c)))) for a, b, c in terms))
    assert products == [0, 7]
    for a, b, c in terms:
        assert np.linalg.norm(np.kron(np.kron(a, b), c)) == pytest.approx(1 / math.sqrt(2))


@given(seed=seeds)
def test_tensor_rank_decomposition_reconstructs(seed):
    rng = make_rng(seed)
    for psi in (random_pure((2, 2, 2), seed), lu_dress(state_from_w_params(random_w_params(rng)), rng)):
        tr = cl.tensor_rank(psi)
        assert np.allclose(tr.reconstruct(), psi.amplitudes, atol=1e-8)


def test_generic_states_are_ghz_class():
    labels = cl.classify_batch(np.stack([random_pure((2, 2, 2), s).amplitudes for s in range(300)]))
    assert all(l == SloccLabel.GHZ for l in labels)
