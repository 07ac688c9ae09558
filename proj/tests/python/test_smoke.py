import json

import numpy as np
import pytest

import hsbm


def small_instance(seed=4):
    params = hsbm.ModelParams(n=300, d=3, a=10.0, b=2.0, seed=seed)
    return params, *hsbm.sample_hsbm(params)


def test_rates_and_depth():
    rates = hsbm.derive_rates(hsbm.ModelParams(n=2000, d=3, a=10.0, b=2.0))
    assert rates["alpha"] == pytest.approx(8.0)
    assert rates["beta"] == pytest.approx(4.0)
    assert rates["e_delta_inf_sq"] == pytest.approx(2.5)
    assert hsbm.recommended_depth(hsbm.ModelParams(n=2000, d=3, a=10.0, b=2.0)) == 1
    assert sum(hsbm.type_probabilities(3, 10.0, 2.0)) == pytest.approx(1.0)


def test_invalid_params_raise():
    with pytest.raises(ValueError):
        hsbm.ModelParams(n=100, d=3, a=1.0, b=2.0)


def test_sampling_is_seeded():
    _, h1, s1 = small_instance(7)
    _, h2, s2 = small_instance(7)
    assert h1 == h2 and s1 == s2
    assert set(s1) <= {1, -1}


def test_saw_length_one_is_adjacency():
    _, h, _ = small_instance()
    rows, cols, vals = hsbm.saw_matrix(h, 1)
    arows, acols, avals = hsbm.adjacency_triplets(h)
    assert np.array_equal(rows, arows) and np.array_equal(cols, acols) and np.array_equal(vals, avals)


def test_trace_matches_circuits():
    h = hsbm.Hypergraph(8, 3, [[0, 1, 2], [2, 3, 4], [4, 5, 0], [5, 6, 7]])
    a = hsbm.saw_matrix_dense(h, 1)
    for k in range(1, 5):
        assert np.trace(np.linalg.matrix_power(a, k)) == hsbm.circuit_count(h, k)


def test_detect_above_threshold():
    _, h, spins = small_instance()
    result = hsbm.detect(h, 1, truth=spins)
    assert abs(result["overlap"]) > 0.15
    assert len(result["labels"]) == h.n
    assert result["eigenvalues"][0] >= abs(result["eigenvalues"][1])


def test_profiles_and_statistic():
    _, h, spins = small_instance()
    prof = hsbm.bfs_profile(h, spins, 0, 2)
    assert prof["S"][0] == 1 and prof["D"][0] == spins[0]
    assert hsbm.thresholding_statistic(h, spins, 4.0, 1) > 0.0


def test_json_round_trip():
    _, h, spins = small_instance()
    text = hsbm.hypergraph_to_json(h, spins)
    assert json.loads(text)["schema"] == 1
    h2, s2 = hsbm.hypergraph_from_json(text)
    assert h2 == h and s2 == spins


def test_gw_and_tv():
    st = hsbm.martingale_stats(10.0, 2.0, depth=3, samples=5000, seed=2)
    assert st["rows"][0]["mean_M"] == 1.0
    assert abs(st["rows"][1]["mean_M"] - 1.0) < 5 * st["rows"][1]["se_M"]
    assert hsbm.binom_pois_tv(1000, 1000, 1.0) < 5.0 / 1000
    assert hsbm.binom_pois_tv(10, 10, 0.0) == 0.0


def test_neighborhood_form():
    h = hsbm.Hypergraph(5, 3, [[0, 1, 2], [0, 3, 4]])
    form = hsbm.canonical_form_of_neighborhood(h, [1, 1, -1, -1, 1], 0, 1)
    assert form is not None and form.startswith("+")
