"""Random network topologies with self-inclusive neighborhoods.

Every node is a neighbor of itself, so the degree ``n_k`` counts the node
itself and is always at least one.  All generated graphs are undirected,
connected, and deterministic for a given seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import InvalidParams, NotConnected

ER_KIND = "erdos_renyi"
SF_KIND = "scale_free"
EXPLICIT_KIND = "explicit"


@dataclass(frozen=True)
class Graph:
    """Undirected graph over nodes ``0..N-1`` with self-inclusive neighbor sets."""

    n_nodes: int
    neighbors: tuple[tuple[int, ...], ...]
    kind: str = EXPLICIT_KIND
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "params", MappingProxyType(dict(self.params)))

    @property
    def degrees(self) -> np.ndarray:
        """Self-inclusive degree ``n_k`` per node."""
        return np.array([len(nb) for nb in self.neighbors], dtype=np.int64)

    def adjacency(self) -> np.ndarray:
        """Dense boolean adjacency with a True diagonal (self-loops)."""
        c = np.zeros((self.n_nodes, self.n_nodes), dtype=bool)
        for k, nb in enumerate(self.neighbors):
            c[k, list(nb)] = True
        return c


@dataclass(frozen=True)
class DegreeStats:
    """Realized and model-predicted degree summary of a graph."""

    eta: float
    eta_expected: float | None
    n_min: int
    n_max: int
    degree_histogram: Mapping[int, int]

    def __post_init__(self):
        object.__setattr__(
            self, "degree_histogram", MappingProxyType(dict(self.degree_histogram))
        )


def _is_connected(c: np.ndarray) -> bool:
    """Breadth-first reachability from node 0 over a boolean adjacency."""
    n = c.shape[0]
    seen = np.zeros(n, dtype=bool)
    frontier = np.zeros(n, dtype=bool)
    seen[0] = frontier[0] = True
    while frontier.any():
        nxt = c[frontier].any(axis=0) & ~seen
        seen |= nxt
        frontier = nxt
    return bool(seen.all())


def graph_from_adjacency(
    c: np.ndarray, kind: str = EXPLICIT_KIND, params: Mapping[str, float] | None = None
) -> Graph:
    """Build a validated Graph from a boolean adjacency matrix.

    The matrix must be square and symmetric; the diagonal is forced to True
    so that every neighborhood contains its own node.
    """
    c = np.asarray(c, dtype=bool)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise InvalidParams(f"adjacency must be square, got shape {c.shape}")
    if not np.array_equal(c, c.T):
        raise InvalidParams("adjacency must be symmetric")
    c = c.copy()
    np.fill_diagonal(c, True)
    neighbors = tuple(tuple(np.nonzero(row)[0].tolist()) for row in c)
    return Graph(
        n_nodes=c.shape[0], neighbors=neighbors, kind=kind, params=params or {}
    )


def gen_erdos_renyi(n: int, p: float, seed: int, max_attempts: int = 100) -> Graph:
    """Sample a connected Erdos-Renyi graph G(n, p) with self-loops added.

    Each unordered pair of distinct nodes is linked independently with
    probability ``p``.  Disconnected samples are discarded and redrawn, up
    to ``max_attempts`` times.

    Parameters
    ----------
    n : int
        Node count, at least 1.
    p : float
        Edge probability in [0, 1].
    seed : int
        Seed of the counter-based generator; the resampling loop consumes
        a single stream, so results are reproducible.
    max_attempts : int
        Full resamplings allowed before giving up.  At densities near the
        connectivity threshold most draws are disconnected, so sweeps at
        small ``p`` should pass a larger value.

    Raises
    ------
    NotConnected
        If no connected sample appears within ``max_attempts`` draws.
    InvalidParams
        For ``n < 1`` or ``p`` outside [0, 1].
    """
    if n < 1:
        raise InvalidParams(f"n must be >= 1, got {n}")
    if not 0.0 <= p <= 1.0:
        raise InvalidParams(f"p must be in [0, 1], got {p}")
    rng = np.random.Generator(np.random.Philox(seed))
    for _ in range(max_attempts):
        upper = np.triu(rng.random((n, n)) < p, 1)
        c = upper | upper.T
        np.fill_diagonal(c, True)
        if _is_connected(c):
            return graph_from_adjacency(c, kind=ER_KIND, params={"p": p})
    raise NotConnected(
        f"no connected G({n}, {p}) sample in {max_attempts} attempts; "
        "p is likely below the connectivity threshold for this n"
    )


def _seed_cycle(n0: int) -> np.ndarray:
    """Adjacency of the connected seed graph: a cycle over ``n0`` nodes."""
    c = np.zeros((n0, n0), dtype=bool)
    if n0 >= 2:
        idx = np.arange(n0)
        c[idx, (idx + 1) % n0] = True
        c[(idx + 1) % n0, idx] = True
    np.fill_diagonal(c, True)
    return c


def gen_scale_free(n: int, m: int, n0: int, seed: int) -> Graph:
    """Grow a preferential-attachment (scale-free) graph with self-loops.

    Starts from a cycle over ``n0`` nodes; each arriving node attaches to
    ``m`` distinct existing nodes drawn without replacement with probability
    proportional to their current self-inclusive degree.  Connected by
    construction.
    """
    if not 1 <= m <= n0 <= n:
        raise InvalidParams(f"need 1 <= m <= n0 <= n, got m={m}, n0={n0}, n={n}")
    rng = np.random.Generator(np.random.Philox(seed))
    c = np.zeros((n, n), dtype=bool)
    c[:n0, :n0] = _seed_cycle(n0)
    np.fill_diagonal(c[:n0, :n0], True)
    deg = np.zeros(n, dtype=np.int64)
    deg[:n0] = c[:n0, :n0].sum(axis=1)
    for new in range(n0, n):
        weights = deg[:new].astype(float)
        targets = rng.choice(new, size=m, replace=False, p=weights / weights.sum())
        c[new, targets] = True
        c[targets, new] = True
        c[new, new] = True
        deg[targets] += 1
        deg[new] = m + 1
    return graph_from_adjacency(c, kind=SF_KIND, params={"m": m, "n0": n0})


def degree_stats(g: Graph) -> DegreeStats:
    """Realized network degree, extremes, histogram, and the model prediction.

    The prediction is ``(N-1)p + 1`` for Erdos-Renyi graphs and ``2m + 1``
    for scale-free graphs; explicit graphs carry no prediction.
    """
    deg = g.degrees
    if g.kind == ER_KIND:
        expected = (g.n_nodes - 1) * g.params["p"] + 1.0
    elif g.kind == SF_KIND:
        expected = 2.0 * g.params["m"] + 1.0
    else:
        expected = None
    values, counts = np.unique(deg, return_counts=True)
    return DegreeStats(
        eta=float(deg.mean()),
        eta_expected=expected,
        n_min=int(deg.min()),
        n_max=int(deg.max()),
        degree_histogram={int(v): int(c) for v, c in zip(values, counts)},
    )


def save_edge_list(g: Graph, path) -> None:
    """Write the graph as ``N <n>`` followed by one ``k l`` line per edge.

    Self-loops are omitted; they are implicit and restored on load.
    """
    lines = [f"N {g.n_nodes}"]
    for k, nb in enumerate(g.neighbors):
        lines.extend(f"{k} {l}" for l in nb if l > k)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_edge_list(path) -> Graph:
    """Read a graph written by :func:`save_edge_list` (kind becomes explicit)."""
    with open(path) as fh:
        tokens = fh.read().split()
    if len(tokens) < 2 or tokens[0] != "N":
        raise InvalidParams(f"{path}: expected header 'N <count>'")
    n = int(tokens[1])
    c = np.zeros((n, n), dtype=bool)
    np.fill_diagonal(c, True)
    pairs = tokens[2:]
    if len(pairs) % 2:
        raise InvalidParams(f"{path}: odd number of edge endpoints")
    for k, l in zip(pairs[::2], pairs[1::2]):
        k, l = int(k), int(l)
        if not (0 <= k < n and 0 <= l < n):
            raise InvalidParams(f"{path}: edge ({k}, {l}) out of range")
        c[k, l] = c[l, k] = True
    return graph_from_adjacency(c, kind=EXPLICIT_KIND)
