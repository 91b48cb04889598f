"""Shared builders and independent oracles for the test suite."""

import numpy as np
import pytest

from difnet import combination, signal_model, theory, topology


def explicit_graph(adjacency) -> topology.Graph:
    return topology.graph_from_adjacency(np.asarray(adjacency, dtype=bool))


def ring_graph(n: int) -> topology.Graph:
    c = np.zeros((n, n), dtype=bool)
    idx = np.arange(n)
    c[idx, (idx + 1) % n] = True
    c[(idx + 1) % n, idx] = True
    np.fill_diagonal(c, True)
    return explicit_graph(c)


def path_graph(n: int) -> topology.Graph:
    c = np.zeros((n, n), dtype=bool)
    for i in range(n - 1):
        c[i, i + 1] = c[i + 1, i] = True
    np.fill_diagonal(c, True)
    return explicit_graph(c)


def star_graph(n: int) -> topology.Graph:
    c = np.zeros((n, n), dtype=bool)
    c[0, :] = c[:, 0] = True
    np.fill_diagonal(c, True)
    return explicit_graph(c)


def complete_graph(n: int) -> topology.Graph:
    return explicit_graph(np.ones((n, n), dtype=bool))


def circulant_graph(n: int, width: int) -> topology.Graph:
    """Regular graph linking each node to its ``width`` nearest ring neighbors."""
    c = np.zeros((n, n), dtype=bool)
    for off in range(1, width + 1):
        idx = np.arange(n)
        c[idx, (idx + off) % n] = True
        c[(idx + off) % n, idx] = True
    np.fill_diagonal(c, True)
    return explicit_graph(c)


def random_connected_graph(rng: np.random.Generator, n_max: int = 15) -> topology.Graph:
    n = int(rng.integers(3, n_max + 1))
    p = float(rng.uniform(0.3, 0.8))
    return topology.gen_erdos_renyi(n, p, int(rng.integers(2**31)), max_attempts=500)


def make_profile(n, m, rng, noise=None):
    return signal_model.SignalProfile(
        ru_diag=rng.uniform(0.8, 1.8, m),
        noise_vars=np.full(n, 0.01) if noise is None else noise,
        w_true=rng.uniform(-1, 1, m),
    )


def dense_rate_oracle(b: np.ndarray) -> float:
    """Spectral radius squared via a full dense eigensolve."""
    return float(np.abs(np.linalg.eigvals(b)).max()) ** 2


def kron_msd_oracle(es: theory.ErrorSystem) -> float:
    """Steady-state MSD from the vectorized-inverse expression.

    Solves ``(I - B^T (x) B^T) sigma = vec(I)`` and contracts with
    ``vec(Y^T)`` (column-major stacking); independent of the trace-series
    path under test.
    """
    b, y = es.b_matrix, es.y_matrix
    nm = b.shape[0]
    f = np.kron(b.T, b.T)
    sigma = np.linalg.solve(np.eye(nm * nm) - f, np.eye(nm).ravel(order="F"))
    return float(y.T.ravel(order="F") @ sigma) / es.dims[0]


def uniform_system(g, profile, informed, mu):
    cm = combination.uniform_combination(g)
    cfg = signal_model.AdaptationConfig(
        informed=tuple(informed), step_rule=signal_model.uniform_step(mu)
    )
    return cm, cfg, theory.build_error_system(cm, profile, cfg, g)


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
