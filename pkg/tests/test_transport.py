import numpy as np
import pytest

from oracles import emd_oracle, ground, histogram, random_histogram
from reamp.transport import cost_matrix, emd, ground_distance_matrix

A = histogram([0.5, 0.5], [0.3, 0.7])
B = histogram([0.5, 0.5], [0.4, 0.6])


def test_ground_matrix_example():
    np.testing.assert_allclose(ground_distance_matrix(A, B, "manhattan"),
                               [[0.1, 0.3], [0.3, 0.1]], atol=1e-15)


def test_ground_matrix_pythagoras():
    a = histogram([1.0], [[0.0, 0.0]])
    b = histogram([1.0], [[3.0, 4.0]])
    assert ground_distance_matrix(a, b, "euclidean")[0, 0] == 5.0


def test_ground_matrix_self_has_zero_diagonal():
    rng = np.random.default_rng(0)
    h = random_histogram(rng, 5, 2)
    assert np.all(np.diag(ground_distance_matrix(h, h)) == 0)


def test_shape_mismatch():
    with pytest.raises(ValueError):
        ground_distance_matrix(A, histogram([1 / 3] * 3, [0, 1, 2]))
    with pytest.raises(ValueError):
        emd(A, B, "chebyshev")


def test_example_one():
    plan = emd(A, B, "manhattan")
    assert plan.cost == pytest.approx(0.1, abs=1e-12)
    np.testing.assert_allclose(plan.flows, np.diag([0.5, 0.5]), atol=1e-15)
    assert np.abs(A.features - B.features).sum() == pytest.approx(0.2, abs=1e-12)
    permuted = histogram([0.5, 0.5], [0.6, 0.4])
    assert emd(A, permuted, "manhattan").cost == pytest.approx(0.1, abs=1e-12)


def test_identity_plan_is_diagonal():
    rng = np.random.default_rng(1)
    h = random_histogram(rng, 6, 2)
    plan = emd(h, h)
    assert plan.cost == 0.0
    np.testing.assert_allclose(plan.flows, np.diag(h.weights), atol=1e-15)


def test_weights_must_sum_to_one():
    with pytest.raises(ValueError):
        emd(histogram([0.5, 0.4], [0, 1]), A)


@pytest.mark.parametrize("metric", ["manhattan", "euclidean"])
def test_plan_invariants(metric):
    rng = np.random.default_rng(2)
    for _ in range(50):
        p = int(rng.integers(2, 12))
        a = random_histogram(rng, p, 2, zero_prob=0.3)
        b = random_histogram(rng, p, 2, zero_prob=0.3)
        plan = emd(a, b, metric)
        assert plan.flows.min() >= 0
        assert np.abs(plan.flows.sum(axis=1) - a.weights).max() < 1e-9
        assert np.abs(plan.flows.sum(axis=0) - b.weights).max() < 1e-9
        direct = float((ground(a.features, b.features, metric) * plan.flows).sum())
        assert plan.cost == pytest.approx(direct, abs=1e-9)


@pytest.mark.parametrize("metric", ["manhattan", "euclidean"])
def test_matches_vertex_enumeration(metric):
    rng = np.random.default_rng(3)
    for _ in range(60):
        p = int(rng.integers(1, 4))
        q = int(rng.integers(1, 3))
        a = random_histogram(rng, p, q, zero_prob=0.2)
        b = random_histogram(rng, p, q, zero_prob=0.2)
        assert abs(emd(a, b, metric).cost - emd_oracle(a, b, metric)) <= 1e-9


def test_larger_instances_match_linprog():
    from scipy.optimize import linprog
    rng = np.random.default_rng(4)
    for _ in range(20):
        p = int(rng.integers(5, 30))
        a = random_histogram(rng, p, 2, zero_prob=0.4)
        b = random_histogram(rng, p, 2, zero_prob=0.4)
        c = ground(a.features, b.features, "euclidean")
        eq = np.vstack([np.kron(np.eye(p), np.ones(p)), np.kron(np.ones(p), np.eye(p))])
        ref = linprog(c.ravel(), A_eq=eq, b_eq=np.concatenate([a.weights, b.weights]),
                      method="highs")
        assert emd(a, b).cost == pytest.approx(ref.fun, abs=1e-9)


def test_symmetry_is_exact():
    rng = np.random.default_rng(5)
    for _ in range(100):
        a = random_histogram(rng, 8, 2, zero_prob=0.3)
        b = random_histogram(rng, 8, 2, zero_prob=0.3)
        assert emd(a, b).cost == emd(b, a).cost


def test_cost_matrix_small_cases():
    same = cost_matrix([A, A])
    np.testing.assert_array_equal(same.values, np.zeros((2, 2)))
    cm = cost_matrix([A, B], ground="manhattan")
    assert cm.values[0, 1] == pytest.approx(0.1, abs=1e-12)
    assert cm.metric == "emd"
    with pytest.raises(ValueError):
        cost_matrix([A])
    with pytest.raises(ValueError):
        cost_matrix([A, B], mode="sinkhorn")


@pytest.mark.parametrize("metric", ["manhattan", "euclidean"])
def test_cost_matrix_matches_pairwise_calls(metric):
    rng = np.random.default_rng(6)
    hs = [random_histogram(rng, 10, 2, zero_prob=0.3) for _ in range(7)]
    cm = cost_matrix(hs, ground=metric).values
    assert np.array_equal(cm, cm.T)
    assert np.all(np.diag(cm) == 0)
    for i in range(7):
        for j in range(7):
            if i != j:
                assert cm[i, j] == emd(hs[i], hs[j], metric).cost


def test_cost_matrix_threads_do_not_change_values():
    rng = np.random.default_rng(7)
    hs = [random_histogram(rng, 12, 2, zero_prob=0.2) for _ in range(15)]
    one = cost_matrix(hs, threads=1).values
    many = cost_matrix(hs, threads=8).values
    assert one.tobytes() == many.tobytes()


def test_ground_mode_flattens_features():
    a = histogram([0.5, 0.5], [[0, 1], [2, 3]])
    b = histogram([0.5, 0.5], [[1, 1], [2, 5]])
    cm = cost_matrix([a, b], ground="euclidean", mode="ground")
    assert cm.values[0, 1] == pytest.approx(np.sqrt(1 + 4))
    cm = cost_matrix([a, b], ground="manhattan", mode="ground")
    assert cm.values[1, 0] == pytest.approx(3.0)
    assert cm.metric == "ground"
