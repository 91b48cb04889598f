import math

import numpy as np
import pytest
from scipy.integrate import quad

from difnet import combination, topology
from difnet.errors import EtaTooSmall, InvalidParams

from conftest import complete_graph, explicit_graph, path_graph


def test_single_node_matrix():
    cm = combination.uniform_combination(complete_graph(1))
    assert cm.weights == pytest.approx(np.array([[1.0]]))


def test_two_node_matrix():
    cm = combination.uniform_combination(path_graph(2))
    assert cm.weights == pytest.approx(np.full((2, 2), 0.5))


def test_three_path_middle_column():
    cm = combination.uniform_combination(path_graph(3))
    # middle node consults all three, end nodes split between self and middle
    assert cm.weights[:, 1] == pytest.approx([1 / 3, 1 / 3, 1 / 3])
    assert cm.weights[:, 0] == pytest.approx([0.5, 0.5, 0.0])
    assert cm.weights[:, 2] == pytest.approx([0.0, 0.5, 0.5])


def test_left_stochastic_and_support(rng):
    for seed in range(20):
        g = topology.gen_erdos_renyi(int(rng.integers(5, 40)), 0.4, seed=seed)
        cm = combination.uniform_combination(g)
        assert cm.weights.sum(axis=0) == pytest.approx(np.ones(g.n_nodes), abs=1e-12)
        assert np.array_equal(cm.weights > 0, g.adjacency())


def test_complete3_eigenvalues():
    sd = combination.spectral_decompose(
        combination.uniform_combination(complete_graph(3))
    )
    assert sd.eigenvalues == pytest.approx([1.0, 0.0, 0.0], abs=1e-12)


def test_perron_pair(rng):
    for seed in range(10):
        g = topology.gen_erdos_renyi(int(rng.integers(4, 30)), 0.5, seed=seed)
        sd = combination.spectral_decompose(combination.uniform_combination(g))
        assert sd.eigenvalues[0] == pytest.approx(1.0, abs=1e-10)
        assert (np.abs(sd.eigenvalues[1:]) < 1).all()
        assert (sd.right_vectors[:, 0] > 0).all()
        assert (sd.left_vectors[:, 0] > 0).all()


def test_eigvec_degree_mapping():
    g = topology.gen_erdos_renyi(25, 0.4, seed=8)
    sd = combination.spectral_decompose(combination.uniform_combination(g))
    root_deg = np.sqrt(g.degrees.astype(float))
    assert sd.right_vectors == pytest.approx(sd.sym_vectors / root_deg[:, None])
    # left vectors are rescaled to unit bi-orthogonal products afterwards
    assert sd.left_vectors == pytest.approx(
        sd.sym_vectors * root_deg[:, None], rel=1e-9
    )


def test_biorthonormality(rng):
    g = topology.gen_erdos_renyi(30, 0.3, seed=12)
    sd = combination.spectral_decompose(combination.uniform_combination(g))
    gram = sd.left_vectors.T @ sd.right_vectors
    assert gram == pytest.approx(np.eye(30), abs=1e-8)


def test_eigendecomposition_reconstructs_a_transpose():
    g = topology.gen_erdos_renyi(40, 0.25, seed=3)
    cm = combination.uniform_combination(g)
    sd = combination.spectral_decompose(cm)
    rebuilt = (sd.right_vectors * sd.eigenvalues[None, :]) @ sd.left_vectors.T
    assert np.linalg.norm(rebuilt - cm.weights.T) < 1e-8


def test_right_vectors_approximately_orthogonal():
    g = topology.gen_erdos_renyi(200, 0.075, seed=21, max_attempts=500)
    sd = combination.spectral_decompose(combination.uniform_combination(g))
    gram = sd.right_vectors.T @ sd.right_vectors
    norms = np.diag(gram)
    off = np.abs(gram - np.diag(norms))
    assert (off <= 0.2 * norms[None, :]).all()
    # same statistic for a scale-free graph, recorded but not asserted: the
    # near-equal-degree argument behind the bound does not hold there
    g_sf = topology.gen_scale_free(200, 2, 10, seed=21)
    sd_sf = combination.spectral_decompose(combination.uniform_combination(g_sf))
    gram_sf = sd_sf.right_vectors.T @ sd_sf.right_vectors
    worst = (np.abs(gram_sf - np.diag(np.diag(gram_sf))) / np.diag(gram_sf)).max()
    print(f"scale-free orthogonality ratio (not asserted): {worst:.3f}")


def test_lambda2_tracks_support_radius():
    lam2s, etas = [], []
    for seed in range(30):
        g = topology.gen_erdos_renyi(200, 0.075, seed=200 + seed, max_attempts=500)
        sd = combination.spectral_decompose(combination.uniform_combination(g))
        lam2s.append(abs(sd.eigenvalues[1]))
        etas.append(g.degrees.mean())
    radius = 2.0 / math.sqrt(np.mean(etas))
    assert abs(np.mean(lam2s) - radius) / radius < 0.10


def test_bulk_spectrum_moments():
    # The bulk (non-Perron) spectrum sits on a support of radius 2/sqrt(eta).
    # Its mean is fixed by the trace: every self-loop contributes 1/n_k, so
    # the bulk center sits near 1/eta rather than at zero; the variance about
    # that center matches the quarter-square of the support radius.
    pooled = []
    etas = []
    for seed in range(10):
        g = topology.gen_erdos_renyi(200, 0.075, seed=40 + seed, max_attempts=500)
        sd = combination.spectral_decompose(combination.uniform_combination(g))
        trace_mean = (np.sum(1.0 / g.degrees) - 1.0) / (g.n_nodes - 1)
        assert sd.eigenvalues[1:].mean() == pytest.approx(trace_mean, abs=1e-10)
        pooled.append(sd.eigenvalues[1:])
        etas.append(g.degrees.mean())
    bulk = np.concatenate(pooled)
    eta = float(np.mean(etas))
    assert bulk.mean() == pytest.approx(1.0 / eta, abs=0.02)
    quarter_square = (2.0 / math.sqrt(eta)) ** 2 / 4.0
    assert abs(bulk.var() - quarter_square) / quarter_square < 0.15


def test_semicircle_density_pointwise():
    assert combination.semicircle_density(2.0 / math.sqrt(9.0), 9.0) == 0.0
    assert combination.semicircle_density(0.0, 4.0) == pytest.approx(2.0 / math.pi)
    assert combination.semicircle_density(5.0, 4.0) == 0.0
    vals = combination.semicircle_density(np.array([-2.0, 0.0, 2.0]), 4.0)
    assert vals == pytest.approx([0.0, 2.0 / math.pi, 0.0])


def test_semicircle_density_normalization():
    for eta in (4.0, 5.13, 16.0):
        radius = 2.0 / math.sqrt(eta)
        total, _ = quad(lambda x: combination.semicircle_density(x, eta), -radius, radius)
        assert abs(total - 1.0) < 1e-8


def test_lambda_k_theory_boundaries():
    # vanishing tail fraction pushes the estimate to the support edge
    eta = 25.0
    near_edge = combination.lambda_k_theory(2, 10**6, eta, "exact_g")
    assert near_edge == pytest.approx(2.0 / math.sqrt(eta), abs=1e-2)
    assert combination.lambda_k_theory(200, 200, eta, "linear") == 0.0


def test_lambda_k_theory_bisection_matches_quadrature_oracle():
    # independent oracle: integrate the density numerically and root-find
    eta, x = 5.13, 0.5
    expected = 0.35671665541190994  # frozen from quad + brentq on the density
    got = combination.lambda_k_theory(100, 200, eta, "exact_g")
    assert got == pytest.approx(expected, abs=1e-10)

    radius = 2.0 / math.sqrt(eta)

    def tail_fraction(y):
        mass, _ = quad(
            lambda lam: combination.semicircle_density(lam, eta),
            -y,
            y,
            epsabs=1e-13,
            epsrel=1e-13,
        )
        return 1.0 - mass

    lo, hi = 0.0, radius
    while hi - lo > 1e-13:
        mid = 0.5 * (lo + hi)
        if tail_fraction(mid) > x:
            lo = mid
        else:
            hi = mid
    assert got == pytest.approx(0.5 * (lo + hi), abs=1e-10)


def test_lambda_k_theory_monotone_and_linear_gap():
    n = 200
    for eta in (6.25, 15.8):
        exact = np.array(
            [combination.lambda_k_theory(k, n, eta, "exact_g") for k in range(2, n + 1)]
        )
        assert (np.diff(exact) <= 1e-12).all()
        ks = np.arange(2, n + 1)
        mask = (ks / n >= 0.05) & (ks / n <= 0.95)
        linear = np.array(
            [combination.lambda_k_theory(k, n, eta, "linear") for k in range(2, n + 1)]
        )
        assert np.abs(exact[mask] - linear[mask]).max() <= 0.1


def test_lambda_k_theory_guards():
    with pytest.raises(EtaTooSmall):
        combination.lambda_k_theory(2, 10, 3.0)
    with pytest.raises(InvalidParams):
        combination.lambda_k_theory(1, 10, 9.0)
    with pytest.raises(InvalidParams):
        combination.lambda_k_theory(11, 10, 9.0)


def test_spectral_decompose_requires_uniform_rule():
    g = path_graph(3)
    cm = combination.uniform_combination(g)
    skewed = cm.weights.copy()
    skewed[:, 1] = [0.5, 0.25, 0.25]
    with pytest.raises(InvalidParams):
        combination.spectral_decompose(combination.CombinationMatrix(skewed, g))


def test_combination_csv_roundtrip(tmp_path):
    g = topology.gen_erdos_renyi(12, 0.4, seed=2)
    cm = combination.uniform_combination(g)
    path = tmp_path / "weights.csv"
    combination.save_combination_csv(cm, path)
    loaded = combination.load_combination_csv(path)
    assert loaded.weights == pytest.approx(cm.weights, abs=1e-15)
    assert loaded.graph.neighbors == g.neighbors


def test_combination_csv_loader_validates(tmp_path):
    bad = tmp_path / "bad.csv"
    np.savetxt(bad, np.array([[0.9, 0.5], [0.0, 0.5]]), delimiter=",")
    with pytest.raises(InvalidParams):
        combination.load_combination_csv(bad)  # column sum and asymmetric support
