import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tripartite import linalg, measures
from tripartite.errors import BadPartyCount, BadSubset, OutOfRange
from tripartite.states import (
    basis_state,
    bipartite_representative,
    epr,
    from_amplitudes,
    ghz,
    make_rng,
    random_amplitudes,
    random_pure,
    w,
    w_n,
)

from conftest import hyperdeterminant_tangle, lu_dress, seeds


def test_ghz_and_w_values():
    assert measures.three_tangle(ghz()) == pytest.approx(1.0, abs=1e-12)
    assert measures.three_tangle(w()) == pytest.approx(0.0, abs=1e-12)
    for pair in ("AB", "AC", "BC"):
        assert measures.pair_concurrence(ghz(), pair) == pytest.approx(0.0, abs=1e-12)
        assert measures.pair_concurrence(w(), pair) == pytest.approx(2 / 3, abs=1e-12)
    assert measures.cut_concurrence(ghz(), "A") == pytest.approx(1.0)


@given(seed=seeds, focus=st.sampled_from("ABC"))
def test_tangle_matches_hyperdeterminant(seed, focus):
    psi = random_pure((2, 2, 2), seed)
    assert measures.three_tangle(psi, focus) == pytest.approx(hyperdeterminant_tangle(psi.amplitudes), abs=1e-10)


def test_batch_tangle_matches_hyperdeterminant():
    amps = random_amplitudes(make_rng(3), 8, size=2000)
    tau = measures.batch_three_tangle(amps)
    ref = np.array([hyperdeterminant_tangle(a) for a in amps])
    assert np.max(np.abs(tau - ref)) <= 1e-10


@given(seed=seeds)
def test_focus_independence(seed):
    r = measures.measure_report(random_pure((2, 2, 2), seed))
    assert max(abs(x) for x in r.tangle_residuals()) <= 1e-10


@given(seed=seeds)
def test_report_is_lu_invariant(seed):
    rng = make_rng(seed)
    psi = random_pure((2, 2, 2), seed)
    a = measures.measure_report(psi).to_dict()
    b = measures.measure_report(lu_dress(psi, rng)).to_dict()
    for k in a:
        assert a[k] == pytest.approx(b[k], abs=1e-9), k


@given(seed=seeds, keep=st.sampled_from(["A", "B", "C", "AB", "AC", "BC"]))
def test_reduced_states_are_density_matrices(seed, keep):
    rho = measures.reduce(random_pure((2, 2, 2), seed), keep)
    assert np.trace(rho).real == pytest.approx(1.0)
    assert np.allclose(rho, linalg.dagger(rho))
    assert linalg.eigvals_hermitian(rho)[-1] >= -1e-12


def test_reduce_keeps_ascending_order():
    # |0>_A |1>_B |0>_C: the AB block must be |01><01| whichever way it is requested
    psi = basis_state((0, 1, 0))
    expected = np.zeros((4, 4))
    expected[1, 1] = 1.0
    assert np.allclose(measures.reduce(psi, "BA"), expected)
    assert np.allclose(measures.reduce(psi, {1, 0}), expected)


def test_reduce_rejects_bad_subsets():
    with pytest.raises(BadSubset):
        measures.reduce(ghz(), "ABC")
    with pytest.raises(BadSubset):
        measures.reduce(ghz(), "D")
    with pytest.raises(BadSubset):
        measures.reduce(ghz(), "")


@given(seed=seeds)
def test_mixed_concurrence_on_pure_states_matches_closed_form(seed):
    psi = random_pure((2, 2), seed)
    rho = np.outer(psi.amplitudes, psi.amplitudes.conj())
    assert measures.concurrence_mixed(rho) == pytest.approx(measures.pure_concurrence(psi), abs=1e-7)


def test_concurrence_of_werner_like_mixture():
    # p |Psi+><Psi+| + (1-p) I/4 has C = max(0, (3p-1)/2)
    psi = np.array([0, 1, 1, 0]) / math.sqrt(2)
    for p in (0.2, 1 / 3, 0.6, 0.9):
        rho = p * np.outer(psi, psi) + (1 - p) * np.eye(4) / 4
        assert measures.concurrence_mixed(rho) == pytest.approx(max(0.0, (3 * p - 1) / 2), abs=1e-12)


def test_entropies_and_ranks():
    r = measures.measure_report(basis_state((0, 0, 0)))
    assert r.entropies == (0.0, 0.0, 0.0)
    assert r.ranks == (1, 1, 1)
    g = measures.measure_report(ghz())
    assert g.entropies == pytest.approx((1.0, 1.0, 1.0))
    assert g.e_tau == pytest.approx(0.0, abs=1e-12)
    assert measures.measure_report(w()).e_tau == pytest.approx(4 / 3, abs=1e-12)


def test_ent_formation_and_e2():
    assert measures.ent_formation(0.0) == 0.0
    assert measures.ent_formation(1.0) == pytest.approx(1.0)
    assert measures.e2_monotone(1.0) == pytest.approx(0.5)
    assert measures.e2_monotone(0.0) == 0.0
    with pytest.raises(OutOfRange):
        measures.ent_formation(1.5)
    with pytest.raises(OutOfRange):
        measures.e2_monotone(-0.2)


@given(c=st.floats(0.0, 1.0))
def test_ef_monotone_in_c(c):
    assert 0.0 <= measures.ent_formation(c) <= measures.ent_formation(min(1.0, c + 1e-3)) + 1e-12


def test_three_qubit_only():
    with pytest.raises(BadPartyCount):
        measures.three_tangle(w_n(4))


def test_near_product_concurrence_is_exactly_zero():
    psi = bipartite_representative("A-BC")
    assert measures.pair_concurrence(psi, "AB") == 0.0
    assert measures.pair_concurrence(psi, "AC") == 0.0
    assert measures.pair_concurrence(psi, "BC") == pytest.approx(1.0)


@given(seed=seeds)
def test_pure_state_pair_route_matches_mixed_route(seed):
    psi = random_pure((2, 2, 2), seed)
    fast = measures.batch_pair_concurrences(psi.amplitudes)
    for k, pair in enumerate(("AB", "AC", "BC")):
        assert fast[k] == pytest.approx(measures.concurrence_mixed(measures.reduce(psi, pair)), abs=1e-7)


def test_w_reduction_and_mixed_route():
    rho = measures.reduce(w(), "AB")
    psi_plus = np.array([0, 1, 1, 0]) / math.sqrt(2)
    expected = (2 / 3) * np.outer(psi_plus, psi_plus)
    expected[0, 0] += 1 / 3
    assert np.allclose(rho, expected)
    assert measures.concurrence_mixed(rho) == pytest.approx(2 / 3, abs=1e-12)
