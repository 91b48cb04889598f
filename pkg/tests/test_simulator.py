import numpy as np
import pytest

from difnet import combination, signal_model, simulator, theory, topology
from difnet.errors import Divergence, NotConverged

from conftest import complete_graph, path_graph, ring_graph


def _setup(g, m=3, mu=0.01, noise=0.01, informed=None, rng_seed=0):
    rng = np.random.default_rng(rng_seed)
    profile = signal_model.SignalProfile(
        ru_diag=rng.uniform(0.8, 1.8, m),
        noise_vars=np.full(g.n_nodes, noise),
        w_true=rng.uniform(-1, 1, m),
    )
    informed = tuple(range(g.n_nodes)) if informed is None else tuple(informed)
    cfg = signal_model.AdaptationConfig(informed, signal_model.uniform_step(mu))
    return combination.uniform_combination(g), profile, cfg


def test_single_node_zero_noise_contracts():
    g = complete_graph(1)
    profile = signal_model.SignalProfile(
        ru_diag=np.array([0.8, 1.2, 1.8]),
        noise_vars=np.array([1e-300]),
        w_true=np.array([0.4, -0.7, 0.2]),
    )
    cfg = signal_model.AdaptationConfig((0,), signal_model.uniform_step(0.02))
    cm = combination.uniform_combination(g)
    traj = simulator.atc_run(g, cm, profile, cfg, 3000, seed=5)
    assert (np.diff(traj) <= 1e-15).all(), "zero-noise LMS error must not grow"
    assert traj[-1] < 1e-8 * traj[0]


def test_single_informed_node_diffuses_to_whole_chain():
    # only node 0 senses data; node 1 still converges through combination
    g = path_graph(2)
    cm, profile, cfg = _setup(g, m=2, mu=0.05, noise=0.02, informed=(0,), rng_seed=3)
    es = theory.build_error_system(cm, profile, cfg, g)
    predicted_db = 10 * np.log10(theory.exact_msd(es))
    tr = simulator.monte_carlo(g, cm, profile, cfg, 3000, 400, base_seed=100)
    est = simulator.steady_state_estimate(tr, 0.1)
    assert est.db == pytest.approx(predicted_db, abs=1.0)


def test_identical_seeds_identical_trajectories():
    g = ring_graph(6)
    cm, profile, cfg = _setup(g)
    a = simulator.atc_run(g, cm, profile, cfg, 500, seed=11)
    b = simulator.atc_run(g, cm, profile, cfg, 500, seed=11)
    assert np.array_equal(a, b)


def test_single_run_monte_carlo_equals_atc_run():
    g = ring_graph(6)
    cm, profile, cfg = _setup(g)
    tr = simulator.monte_carlo(g, cm, profile, cfg, 400, n_runs=1, base_seed=21)
    single = simulator.atc_run(g, cm, profile, cfg, 400, seed=21)
    assert np.array_equal(tr.msd_linear, single)


def test_divergence_guard():
    g = complete_graph(1)
    profile = signal_model.SignalProfile(
        ru_diag=np.array([1.0]), noise_vars=np.array([1.0]), w_true=np.array([1.0])
    )
    # mean-stable (mu * rho < 2) but far outside the mean-square regime
    cfg = signal_model.AdaptationConfig((0,), signal_model.uniform_step(1.9))
    cm = combination.uniform_combination(g)
    with pytest.raises(Divergence):
        simulator.atc_run(g, cm, profile, cfg, 5000, seed=0)
    with pytest.raises(Divergence) as exc_info:
        simulator.monte_carlo(g, cm, profile, cfg, 5000, n_runs=3, base_seed=50)
    assert exc_info.value.run_index in (0, 1, 2)


def test_steady_state_estimate_constant_and_window():
    const = np.full(20000, 2.5e-4)
    tr = simulator.TransientResult(
        msd_linear=const,
        msd_db=simulator.to_db(const),
        n_runs=1,
        n_iters=20000,
        base_seed=0,
    )
    est = simulator.steady_state_estimate(tr, 0.1)
    assert est.window == 2000
    assert est.linear == pytest.approx(2.5e-4)


def test_steady_state_estimate_rejects_decaying():
    decaying = np.linspace(1.0, 0.1, 5000)
    tr = simulator.TransientResult(
        msd_linear=decaying,
        msd_db=simulator.to_db(decaying),
        n_runs=1,
        n_iters=5000,
        base_seed=0,
    )
    with pytest.raises(NotConverged):
        simulator.steady_state_estimate(tr, 0.1)


def test_transient_slope_matches_exact_rate():
    # all-informed ring: dB decay per iteration tracks 10*log10(rate)
    g = ring_graph(10)
    cm, profile, cfg = _setup(g, m=3, mu=0.01, noise=1e-12, rng_seed=1)
    es = theory.build_error_system(cm, profile, cfg, g)
    rate = theory.exact_rate(es)
    tr = simulator.monte_carlo(g, cm, profile, cfg, 1000, 50, base_seed=7)
    lo, hi = 200, 800
    slope = np.polyfit(np.arange(lo, hi), tr.msd_db[lo:hi], 1)[0]
    theory_slope = 10 * np.log10(rate)
    assert abs(slope - theory_slope) / abs(theory_slope) < 0.2


def test_enlarging_informed_set_never_slows_convergence():
    g = topology.gen_erdos_renyi(12, 0.4, seed=6)
    order = signal_model.select_informed(g, "top_degree", 12)
    cm = combination.uniform_combination(g)
    rng = np.random.default_rng(2)
    profile = signal_model.SignalProfile(
        ru_diag=rng.uniform(0.8, 1.8, 3),
        noise_vars=np.full(12, 0.01),
        w_true=rng.uniform(-1, 1, 3),
    )
    hit_times = []
    for count in (1, 3, 6, 9, 12):
        cfg = signal_model.AdaptationConfig(
            order[:count], signal_model.uniform_step(0.02)
        )
        es = theory.build_error_system(cm, profile, cfg, g)
        target_db = 10 * np.log10(theory.exact_msd(es)) + 3.0
        tr = simulator.monte_carlo(g, cm, profile, cfg, 6000, 50, base_seed=400)
        below = np.nonzero(tr.msd_db <= target_db)[0]
        assert below.size, f"count={count} never reached steady+3dB"
        hit_times.append(below[0])
    assert (np.diff(hit_times) <= 0).all(), hit_times


def test_steady_state_invariant_under_relabeling():
    g = topology.gen_erdos_renyi(10, 0.5, seed=14)
    cm, profile, cfg = _setup(g, m=3, mu=0.05, noise=0.01, rng_seed=4)
    tr = simulator.monte_carlo(g, cm, profile, cfg, 1500, 200, base_seed=900)
    est = simulator.steady_state_estimate(tr, 0.1)

    perm = np.random.default_rng(8).permutation(10)
    g2 = topology.graph_from_adjacency(g.adjacency()[np.ix_(perm, perm)])
    cm2 = combination.uniform_combination(g2)
    inv = np.argsort(perm)
    cfg2 = signal_model.AdaptationConfig(
        tuple(int(inv[k]) for k in cfg.informed), cfg.step_rule
    )
    tr2 = simulator.monte_carlo(g2, cm2, profile, cfg2, 1500, 200, base_seed=900)
    est2 = simulator.steady_state_estimate(tr2, 0.1)
    assert est2.db == pytest.approx(est.db, abs=0.3)


def test_variance_halves_with_four_times_the_runs():
    # group means over 25 vs 100 runs at a fixed steady-state index
    g = ring_graph(3)
    profile = signal_model.SignalProfile(
        ru_diag=np.array([1.0]), noise_vars=np.full(3, 0.1), w_true=np.array([0.6])
    )
    cfg = signal_model.AdaptationConfig((0, 1, 2), signal_model.uniform_step(0.2))
    cm = combination.uniform_combination(g)
    total = 24_000
    traj = simulator._run_batch(g, cm, profile, cfg, 400, list(range(1000, 1000 + total)))
    at_index = traj[:, -1]
    small = at_index[: total // 2].reshape(-1, 25).mean(axis=1)
    large = at_index[total // 2 :].reshape(-1, 100).mean(axis=1)
    ratio = small.var(ddof=1) / large.var(ddof=1)
    assert 4.0 * 0.7 <= ratio <= 4.0 * 1.3, ratio


def test_transient_csv_roundtrip(tmp_path):
    g = ring_graph(5)
    cm, profile, cfg = _setup(g, m=2, mu=0.05)
    tr = simulator.with_steady_state(
        simulator.monte_carlo(g, cm, profile, cfg, 2000, 100, base_seed=3), 0.1
    )
    path = tmp_path / "transient.csv"
    simulator.save_transient_csv(tr, path, {"scenario": "ring5"})
    meta, body = simulator.load_transient_csv(path)
    assert meta["scenario"] == "ring5"
    assert int(meta["n_runs"]) == 100
    assert body.shape == (2000, 3)
    assert body[:, 1] == pytest.approx(tr.msd_linear)
    assert float(meta["steady_state_db"]) == pytest.approx(tr.steady_state_db)
