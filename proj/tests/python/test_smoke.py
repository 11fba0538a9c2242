import math

import pytest

import scout


def test_analytic_times_closed_form():
    at = scout.analytic_times(150000, 2, 150)
    assert at["gpr"] == 1500.0
    assert at["base"] == pytest.approx(150000 * scout.harmonic(300), rel=0, abs=0)
    assert at["speedup"] == pytest.approx(at["base"] / at["gpr"])


def test_simulate_discovery_pairs_with_analytic():
    at = scout.analytic_times(200, 2, 10)
    base = scout.simulate_discovery(200, 2, 10, mode="base", trials=400, seed=0)
    gpr = scout.simulate_discovery(200, 2, 10, mode="gpr", trials=400, seed=0)
    assert abs(base["mean"] - at["base"]) <= 4 * base["std_error"]
    assert abs(gpr["mean"] - at["gpr"]) <= 4 * gpr["std_error"]
    assert gpr["mean"] <= base["mean"]


def test_image_reward_and_concept_score():
    targets = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]]
    assert scout.image_reward([2.0, 0.0], targets, k=1) == pytest.approx(1.0)
    # top-2 of cos = {1, 0, -1} -> mean 0.5
    assert scout.image_reward([2.0, 0.0], targets, k=2) == pytest.approx(0.5)
    assert scout.concept_score([0.1, 0.9, 0.5], top_n=2) == pytest.approx(0.7)


def test_infonce_symmetric_is_ln2():
    q, k_plus = [1.0, 2.0], [0.3, -0.4]
    assert scout.infonce_loss(q, k_plus, [k_plus], tau=0.7) == pytest.approx(
        math.log(2.0), abs=1e-12
    )


def test_gpr_interpolates_observations():
    xs = [[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]]
    ys = [0.2, 0.8, -0.1]
    g = scout.Gpr.fit(xs, ys, jitter=1e-10)
    assert g.observation_count == 3
    for x, y in zip(xs, ys):
        mean, std = g.predict(x)
        assert mean == pytest.approx(y, abs=1e-4)
        assert 0.0 <= std <= 1e-3
    means, stds = g.predict_batch(xs)
    assert means == pytest.approx(ys, abs=1e-4)
    far_mean, far_std = g.predict([50.0, 50.0])
    assert far_mean == pytest.approx(g.prior_mean, abs=1e-6)
    assert far_std == pytest.approx(1.0, abs=1e-6)


def test_tiered_sampling_masses():
    scores = sorted((math.sin(i * 0.7) for i in range(1000)), reverse=True)
    tau = scout.temperature_from_smr(scores, 3.0)
    pre = scout.softmax_distribution(scores, tau)
    assert max(pre) / min(pre) == pytest.approx(math.exp(3.0), abs=1e-6)
    post = scout.tiered_distribution(pre)
    assert sum(post[:250]) == pytest.approx(8.0 / 9.0, abs=1e-12)
    assert sum(post[250:]) == pytest.approx(1.0 / 9.0, abs=1e-12)


def test_prune_vocabulary_keeps_nearest():
    emb = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.7, 0.7]]
    kept = scout.prune_vocabulary(emb, labels=[[1.0, 0.0]], fraction=0.5)
    assert kept == [0, 3]


def test_search_index_retrieves_itself():
    vecs = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.6, 0.8, 0.0]]
    ix = scout.SearchIndex.build(list(range(4)), vecs)
    assert ix.size == 4 and ix.dimension == 3
    hits = ix.query([0.0, 1.0, 0.0], top_k=2)
    assert hits[0][0] == 1
    assert hits[0][1] == pytest.approx(1.0)


def test_dhash_properties():
    flat = [[128.0] * 16 for _ in range(12)]
    assert scout.dhash(flat) == 0
    img = [[float((r * 31 + c * 17) % 211) for c in range(20)] for r in range(14)]
    shifted = [[p + 33.5 for p in row] for row in img]
    assert scout.dhash(img) == scout.dhash(shifted) != 0
    rep = scout.count_collisions([1, 2, 3], [3, 4, 5, 6], max_hamming=0)
    assert rep["count"] == 1
    assert rep["formatted"] == "1 (25.00%)"


def test_sim_episode_runs_and_is_deterministic():
    kwargs = dict(
        mode="ours",
        seed=3,
        iterations=2,
        queries_per_iteration=8,
        results_per_query=10,
        min_results=3,
        eval_k=5,
        vocab_size=400,
        clusters=2,
        cluster_size=15,
        latent_dim=8,
    )
    a = scout.run_sim_episode(**kwargs)
    b = scout.run_sim_episode(**kwargs)
    assert len(a) == 2

    def same(x, y):  # == except NaN matches NaN (unqueried categories)
        if isinstance(x, float) and isinstance(y, float):
            return x == y or (math.isnan(x) and math.isnan(y))
        if isinstance(x, list):
            return len(x) == len(y) and all(same(p, q) for p, q in zip(x, y))
        return x == y

    assert all(
        x.keys() == y.keys() and all(same(x[k], y[k]) for k in x)
        for x, y in zip(a, b)
    )
    assert a[-1]["queries_issued"] == 16
    assert 0.0 <= a[-1]["accuracy"] <= 1.0
    assert 0.0 <= a[-1]["fidelity"] <= 1.0
