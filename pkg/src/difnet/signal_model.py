"""Data statistics, informed-node assignment, step-size rules, stability.

The linear regression model is ``d_k(i) = u_{k,i} w_true + v_k(i)`` with
zero-mean Gaussian regressors of diagonal covariance ``diag(ru_diag)``
(identical across nodes) and independent zero-mean Gaussian noise of
per-node variance ``noise_vars[k]``.  Informed nodes adapt with a common
step-size; uninformed nodes have step zero and only combine.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import BadList, InvalidCount, InvalidParams, StabilityViolation
from .topology import Graph

UNIFORM_RULE = "uniform"
NORMALIZED_RULE = "normalized"

# Streams draw normals in fixed-size blocks; simulation code replays the
# same block layout so batched runs reproduce per-stream draws exactly.
def stream_block_size(n_nodes: int, m_dim: int) -> int:
    return int(min(1024, max(1, 2**18 // (n_nodes * m_dim))))


def _readonly(array) -> np.ndarray:
    out = np.array(array, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class SignalProfile:
    """Filter length, regressor covariance diagonal, noise variances, target.

    ``ru_diag`` has one positive entry per filter tap; ``noise_vars`` one
    positive entry per node; ``w_true`` is the vector every node estimates.
    """

    ru_diag: np.ndarray
    noise_vars: np.ndarray
    w_true: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "ru_diag", _readonly(self.ru_diag))
        object.__setattr__(self, "noise_vars", _readonly(self.noise_vars))
        object.__setattr__(self, "w_true", _readonly(self.w_true))
        if self.ru_diag.ndim != 1 or self.ru_diag.size == 0:
            raise InvalidParams("ru_diag must be a nonempty vector")
        if (self.ru_diag <= 0).any():
            raise InvalidParams("ru_diag entries must be positive")
        if (self.noise_vars <= 0).any():
            raise InvalidParams("noise variances must be positive")
        if self.w_true.shape != self.ru_diag.shape:
            raise InvalidParams("w_true must match the filter length")

    @property
    def m_dim(self) -> int:
        return self.ru_diag.size

    @property
    def n_nodes(self) -> int:
        return self.noise_vars.size


@dataclass(frozen=True)
class StepRule:
    """Uniform step ``mu`` or normalized budget ``mu0`` split by informed degree."""

    kind: str
    value: float

    def __post_init__(self):
        if self.kind not in (UNIFORM_RULE, NORMALIZED_RULE):
            raise InvalidParams(f"unknown step rule {self.kind!r}")
        if self.value <= 0:
            raise InvalidParams("step-size parameter must be positive")


def uniform_step(mu: float) -> StepRule:
    return StepRule(UNIFORM_RULE, mu)


def normalized_step(mu0: float) -> StepRule:
    return StepRule(NORMALIZED_RULE, mu0)


@dataclass(frozen=True)
class AdaptationConfig:
    """Ordered informed-node set plus the step-size rule."""

    informed: tuple[int, ...]
    step_rule: StepRule

    def __post_init__(self):
        object.__setattr__(self, "informed", tuple(int(k) for k in self.informed))
        if len(self.informed) == 0:
            raise InvalidParams("at least one node must be informed")
        if len(set(self.informed)) != len(self.informed):
            raise InvalidParams("informed set contains duplicates")

    @property
    def n_informed(self) -> int:
        return len(self.informed)


def select_informed(
    g: Graph,
    rule: str,
    count: int,
    seed: int | None = None,
    nodes: list[int] | None = None,
) -> tuple[int, ...]:
    """Pick an ordered informed set of ``count`` nodes.

    ``top_degree`` takes the highest-degree nodes (degree ties broken by
    ascending node index); ``bottom_degree`` walks that same ordering from
    the back; ``random`` samples uniformly without replacement using
    ``seed``; ``explicit`` validates the ``nodes`` list as given.
    """
    n = g.n_nodes
    if not 1 <= count <= n:
        raise InvalidCount(f"count must be in [1, {n}], got {count}")
    if rule == "explicit":
        if nodes is None:
            raise BadList("explicit rule requires a node list")
        chosen = [int(k) for k in nodes]
        if len(chosen) != count:
            raise InvalidCount(f"explicit list has {len(chosen)} nodes, count={count}")
        if len(set(chosen)) != len(chosen):
            raise BadList("explicit list contains duplicates")
        bad = [k for k in chosen if not 0 <= k < n]
        if bad:
            raise BadList(f"explicit indices out of range: {bad}")
        return tuple(chosen)
    deg = g.degrees
    by_degree = sorted(range(n), key=lambda k: (-deg[k], k))
    if rule == "top_degree":
        return tuple(by_degree[:count])
    if rule == "bottom_degree":
        return tuple(by_degree[::-1][:count])
    if rule == "random":
        rng = np.random.default_rng(seed)
        return tuple(int(k) for k in rng.choice(n, size=count, replace=False))
    raise InvalidParams(f"unknown informed-selection rule {rule!r}")


def resolved_mu(cfg: AdaptationConfig, g: Graph) -> float:
    """Common step-size of the informed nodes under the config's rule."""
    if cfg.step_rule.kind == UNIFORM_RULE:
        return cfg.step_rule.value
    informed_degree = int(g.degrees[list(cfg.informed)].sum())
    return cfg.step_rule.value / informed_degree


def resolve_steps(
    cfg: AdaptationConfig, g: Graph, profile: SignalProfile | None = None
) -> np.ndarray:
    """Per-node step vector: ``mu`` on the informed set, zero elsewhere.

    When a profile is supplied, the small-step bound
    ``0 < mu * max(ru_diag) < 1`` is enforced.
    """
    if max(cfg.informed) >= g.n_nodes:
        raise BadList("informed set references nodes outside the graph")
    mu = resolved_mu(cfg, g)
    if profile is not None:
        product = mu * float(profile.ru_diag.max())
        if not 0.0 < product < 1.0:
            raise StabilityViolation(
                f"mu * rho(R_u) = {product:.4g} outside (0, 1); "
                "reduce the step-size"
            )
    steps = np.zeros(g.n_nodes)
    steps[list(cfg.informed)] = mu
    return steps


@dataclass(frozen=True)
class StabilityVerdict:
    stable: bool
    reason: str | None = None


def check_mean_stability(
    profile: SignalProfile, cfg: AdaptationConfig, g: Graph
) -> StabilityVerdict:
    """Mean-stability verdict: step bound plus reachability of every node.

    Stable iff ``0 < mu * rho(R_u) < 2`` for the informed step and the graph
    is connected (connectivity guarantees a path from an informed node to
    every other node).
    """
    mu = resolved_mu(cfg, g)
    product = mu * float(profile.ru_diag.max())
    if not 0.0 < product < 2.0:
        return StabilityVerdict(False, f"mu * rho(R_u) = {product:.4g} not in (0, 2)")
    if not _reaches_all(g, cfg.informed):
        return StabilityVerdict(
            False, "no path from any informed node to some node (graph disconnected)"
        )
    return StabilityVerdict(True)


def _reaches_all(g: Graph, sources: tuple[int, ...]) -> bool:
    seen = set(sources)
    stack = list(sources)
    while stack:
        k = stack.pop()
        for l in g.neighbors[k]:
            if l not in seen:
                seen.add(l)
                stack.append(l)
    return len(seen) == g.n_nodes


def sample_blocks(
    profile: SignalProfile, n_nodes: int, rng: np.random.Generator, n_iters: int
) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield blocks ``(u, d)`` of shapes ``(b, N, M)`` and ``(b, N)``.

    The block layout depends only on ``(N, M, n_iters)``, so any consumer
    seeded identically reproduces the exact same draws.
    """
    m_dim = profile.m_dim
    scale_u = np.sqrt(profile.ru_diag)
    scale_v = np.sqrt(profile.noise_vars[:n_nodes])
    block = stream_block_size(n_nodes, m_dim)
    produced = 0
    while produced < n_iters:
        b = min(block, n_iters - produced)
        u = rng.standard_normal((b, n_nodes, m_dim)) * scale_u
        v = rng.standard_normal((b, n_nodes)) * scale_v
        d = u @ profile.w_true + v
        produced += b
        yield u, d


def sample_stream(
    profile: SignalProfile, n_nodes: int, seed: int, n_iters: int | None = None
) -> Iterator[tuple[np.ndarray, float]]:
    """Per-iteration data ``(u_i, d_i)`` with ``u_i`` of shape ``(N, M)``.

    Deterministic for a given seed.  ``n_iters=None`` streams forever.
    """
    rng = np.random.default_rng(seed)
    remaining = np.inf if n_iters is None else n_iters
    while remaining > 0:
        chunk = int(min(remaining, 2**30))
        for u, d in sample_blocks(profile, n_nodes, rng, chunk):
            for i in range(u.shape[0]):
                yield u[i], d[i]
        remaining -= chunk
