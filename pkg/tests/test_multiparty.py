import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tripartite import multiparty as mp
from tripartite.errors import BadDims, BadPartyCount, OutOfRange
from tripartite.measures import concurrence_mixed, measure_report, reduce
from tripartite.states import (
    GhzCanonicalParams,
    WCanonicalParams,
    basis_state,
    bipartite_representative,
    ghz,
    make_rng,
    random_amplitudes,
    random_ghz_params,
    random_w_params,
    state_from_ghz_params,
    state_from_w_params,
    w,
    w_n,
)

from conftest import lu_dress, seeds


def test_residual_examples():
    r = mp.residual_report(w())
    assert r.e_tau == pytest.approx(4 / 3, abs=1e-12)
    assert r.e_bar == pytest.approx(4 / 9, abs=1e-12)
    assert r.c2_min == pytest.approx(4 / 9, abs=1e-12)
    assert mp.residual_report(ghz()).e_tau == pytest.approx(0.0, abs=1e-12)
    for m in mp.MEASURES:
        r = mp.residual_report(basis_state((0, 0, 0)), m)
        assert (r.e_bar, r.e_min, r.e_tau, r.c2_min) == (0.0, 0.0, 0.0, 0.0)


def test_residual_measures_differ_but_agree_on_ordering():
    ef = mp.residual_report(w(), "ef")
    e2 = mp.residual_report(w(), "e2")
    assert 0 < e2.e_bar < ef.e_bar < 1
    assert ef.e_tau == e2.e_tau
    with pytest.raises(ValueError):
        mp.residual_report(w(), "negativity")


def test_etau_closed_form_matches_numeric():
    rng = make_rng(21)
    for _ in range(500):
        p = random_ghz_params(rng)
        assert mp.etau_from_ghz_params(p) == pytest.approx(mp.residual_report(state_from_ghz_params(p)).e_tau, abs=1e-8)


def test_etau_ghz_params_zero():
    p = GhzCanonicalParams(math.pi / 4, math.pi / 2, math.pi / 2, math.pi / 2, 0.0)
    assert mp.etau_from_ghz_params(p) == pytest.approx(0.0, abs=1e-15)


@given(a=st.floats(0.05, math.pi / 2), b=st.floats(0.05, math.pi / 2), c=st.floats(0.05, math.pi / 2),
       d=st.floats(0.01, math.pi / 4), phi=st.floats(0.0, 2 * math.pi - 1e-9))
def test_delta_quarter_phi_pi_maximizes(a, b, c, d, phi):
    best = mp.etau_from_ghz_params(GhzCanonicalParams(math.pi / 4, a, b, c, math.pi))
    assert mp.etau_from_ghz_params(GhzCanonicalParams(d, a, b, c, phi)) <= best + 1e-12


def test_bound_specialization():
    rng = make_rng(4)
    for _ in range(500):
        a, b, c = rng.uniform(1e-3, math.pi / 2, size=3)
        p = GhzCanonicalParams(math.pi / 4, a, b, c, math.pi)
        assert mp.etau_from_ghz_params(p) == pytest.approx(mp.etau_ghz_bound(a, b, c), abs=1e-9)
        assert mp.etau_ghz_bound(a, b, c) < 4 / 3


@given(seed=seeds)
def test_w_class_closed_form(seed):
    rng = make_rng(seed)
    q = random_w_params(rng)
    e = mp.residual_report(lu_dress(state_from_w_params(q), rng)).e_tau
    assert e == pytest.approx(4 * (q.a * q.b + q.a * q.c + q.b * q.c), abs=1e-8)


def test_w_class_value_ignores_d():
    vals = [mp.residual_report(state_from_w_params(WCanonicalParams.from_abc(0.2 * s, 0.3 * s, 0.1 * s))).e_tau
            / (4 * (0.06 + 0.02 + 0.03) * s * s) for s in (1.0, 0.8, 0.5)]
    assert vals == pytest.approx([1.0, 1.0, 1.0], abs=1e-8)


@given(seed=seeds, label=st.sampled_from(["a-bc", "b-ac", "c-ab"]))
def test_bipartite_class_bound(seed, label):
    rng = make_rng(seed)
    single = random_amplitudes(rng, 2)
    pair = random_amplitudes(rng, 4).reshape(2, 2)
    subscripts = {"a-bc": "a,bc->abc", "b-ac": "b,ac->abc", "c-ab": "c,ab->abc"}[label]
    from tripartite.states import PureState
    psi = PureState((2, 2, 2), np.einsum(subscripts, single, pair).reshape(-1))
    assert mp.residual_report(psi).e_tau <= 1 + 1e-9


def test_f_values():
    assert mp.appendix_c_f(0.0, 0.0, 0.0) == -4.0
    g = np.linspace(0, 1 - 1 / 201, 201)
    y, z = np.meshgrid(g, g)
    face = 3 * (y**2 + z**2) - 6 * y**2 * z**2 - 4
    assert np.max(face) <= -1 + 1e-12
    assert mp.appendix_c_f(0.0, 0.5, 0.5) == pytest.approx(3 * 0.5 - 6 * 0.0625 - 4)
    with pytest.raises(OutOfRange):
        mp.appendix_c_f(1.0, 0.0, 0.0)
    with pytest.raises(OutOfRange):
        mp.appendix_c_f(-0.1, 0.0, 0.0)


@given(x=st.floats(0, 0.999), y=st.floats(0, 0.999), z=st.floats(0, 0.999))
def test_f_negative_iff_bound_below_four_thirds(x, y, z):
    bound = mp.etau_ghz_bound(math.acos(x), math.acos(y), math.acos(z))
    f = mp.appendix_c_f(x, y, z)
    assert f < 0
    # f = 3 num - 4 (1 - xyz)^2, so the two statements are the same inequality
    assert f == pytest.approx(3 * bound * (1 - x * y * z) ** 2 - 4 * (1 - x * y * z) ** 2, abs=1e-9)


def test_grid_max_is_negative():
    best, arg = mp.grid_max_f(201)
    assert best < 0
    assert all(0 <= v < 1 for v in arg)
    assert mp.grid_max_f(11)[0] < 0


def test_wn_pair_state():
    rho = mp.wn_pair_state(4)
    assert rho[0, 0].real == pytest.approx(0.5)
    assert np.trace(rho).real == pytest.approx(1.0)
    assert mp.wn_pair_concurrence(3) == pytest.approx(2 / 3, abs=1e-12)
    assert mp.wn_pair_concurrence(4) == pytest.approx(0.5, abs=1e-12)
    assert mp.wn_average_c2(5) == pytest.approx(4 / 25, abs=1e-12)
    with pytest.raises(BadPartyCount):
        mp.wn_pair_state(2)


@pytest.mark.parametrize("n", range(3, 11))
def test_wn_routes_agree(n):
    rho = mp.wn_pair_state(n)
    assert np.allclose(rho, reduce(w_n(n), (0, n - 1)), atol=1e-14)
    assert concurrence_mixed(reduce(w_n(n), (1, 2))) == pytest.approx(2 / n, abs=1e-12)


def test_dimcount():
    assert mp.class_count_lower_bound((2, 2, 2)).lower_bound == -4
    d = mp.class_count_lower_bound((2, 2, 2, 2))
    assert (d.state_params, d.group_params, d.lower_bound) == (30, 24, 6)
    assert d.infinitely_many_classes
    assert mp.class_count_lower_bound((2, 2, 3)).lower_bound == -6
    for bad in ((2,), (2, 1), ("x", 2)):
        with pytest.raises(BadDims):
            mp.class_count_lower_bound(bad)


@given(dims=st.lists(st.integers(2, 5), min_size=2, max_size=5))
def test_dimcount_is_exact_integer(dims):
    d = mp.class_count_lower_bound(dims)
    assert isinstance(d.lower_bound, int)
    assert d.lower_bound == 2 * (math.prod(dims) - 1) - 2 * sum(n * n - 1 for n in dims)


def test_etau_sampling_small_run():
    rep = mp.etau_bound_sampling(8192, seed=3, refine=True)
    assert rep["ok"]
    assert rep["max_e_tau"] <= 4 / 3 + 1e-9
    assert rep["refined_e_tau"] <= 4 / 3 + 1e-9
    assert rep["refined_w_distance"] < rep["argmax_w_distance"]
    assert rep == mp.etau_bound_sampling(8192, seed=3, workers=2, refine=True)


def test_experiments_report():
    ef = mp.ef_average_sampling(4096, seed=1, refine=False)
    assert ef["max_e_bar_ef"] <= ef["w_e_bar_ef"] + 1e-9
    rep = mp.wn_conjecture_search(4, 200, seed=1)
    assert rep["w_n_value"] == 0.25
    assert set(rep) >= {"best_average_c2", "exceeded"}
