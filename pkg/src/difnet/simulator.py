"""Adapt-then-Combine recursion and Monte-Carlo MSD estimation.

Each iteration performs the two-step update: informed nodes run one LMS
adaptation on their own data, then every node averages its neighborhood's
intermediate estimates with the combination weights.  Runs start from zero
estimates, so the trajectory starts at ``||w_true||^2``.

Monte-Carlo repetitions are executed as one vectorized batch (runs along
the leading axis) while each run keeps its own seeded stream; a single run
through :func:`atc_run` reproduces run ``j`` of a batch bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .combination import CombinationMatrix
from .errors import Divergence, NotConverged, StabilityViolation
from .signal_model import (
    AdaptationConfig,
    SignalProfile,
    check_mean_stability,
    resolve_steps,
    sample_blocks,
)
from .topology import Graph

DB_FLOOR = 1e-30
DIVERGENCE_GUARD = 1e12
FLATNESS_DB = 0.5


def to_db(linear) -> np.ndarray:
    """10*log10 with a floor that keeps zero-noise runs finite."""
    return 10.0 * np.log10(np.maximum(np.asarray(linear, dtype=float), DB_FLOOR))


@dataclass(frozen=True)
class TransientResult:
    """Run-averaged network MSD trajectory with its provenance."""

    msd_linear: np.ndarray
    msd_db: np.ndarray
    n_runs: int
    n_iters: int
    base_seed: int
    steady_state_db: float | None = None
    steady_window: int | None = None

    def __post_init__(self):
        for name in ("msd_linear", "msd_db"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class SteadyStateEstimate:
    linear: float
    db: float
    window: int


def _run_batch(
    g: Graph,
    cm: CombinationMatrix,
    profile: SignalProfile,
    cfg: AdaptationConfig,
    n_iters: int,
    seeds: list[int],
) -> np.ndarray:
    """Per-run network squared-error trajectories, shape ``(runs, n_iters)``."""
    verdict = check_mean_stability(profile, cfg, g)
    if not verdict.stable:
        raise StabilityViolation(verdict.reason)
    n, m = g.n_nodes, profile.m_dim
    steps = resolve_steps(cfg, g)[None, :, None]
    a_t = np.ascontiguousarray(cm.weights.T)
    w_true = profile.w_true
    runs = len(seeds)
    w = np.zeros((runs, n, m))
    traj = np.empty((runs, n_iters))
    gens = [
        sample_blocks(profile, n, np.random.default_rng(seed), n_iters)
        for seed in seeds
    ]
    t = 0
    while t < n_iters:
        blocks = [next(gen) for gen in gens]
        u_blk = np.stack([b[0] for b in blocks])  # (runs, b, N, M)
        d_blk = np.stack([b[1] for b in blocks])  # (runs, b, N)
        for i in range(u_blk.shape[1]):
            u = u_blk[:, i]
            err = d_blk[:, i] - np.einsum("rnm,rnm->rn", u, w)
            psi = w + steps * err[:, :, None] * u
            w = np.matmul(a_t, psi)
            diff = w - w_true
            traj[:, t] = np.einsum("rnm,rnm->r", diff, diff) / n
            if traj[:, t].max() > DIVERGENCE_GUARD:
                j = int(np.argmax(traj[:, t]))
                raise Divergence(
                    f"network squared error exceeded {DIVERGENCE_GUARD:.0e} at "
                    f"iteration {t} (run index {j}, seed {seeds[j]})",
                    run_index=j,
                )
            t += 1
    return traj


def atc_run(
    g: Graph,
    cm: CombinationMatrix,
    profile: SignalProfile,
    cfg: AdaptationConfig,
    n_iters: int,
    seed: int,
) -> np.ndarray:
    """One seeded ATC run; returns the per-iteration network squared error."""
    return _run_batch(g, cm, profile, cfg, n_iters, [seed])[0]


def monte_carlo(
    g: Graph,
    cm: CombinationMatrix,
    profile: SignalProfile,
    cfg: AdaptationConfig,
    n_iters: int,
    n_runs: int,
    base_seed: int,
) -> TransientResult:
    """Average independent runs seeded ``base_seed + j`` for ``j < n_runs``."""
    if n_runs < 1:
        raise StabilityViolation(f"n_runs must be >= 1, got {n_runs}")
    traj = _run_batch(g, cm, profile, cfg, n_iters, [base_seed + j for j in range(n_runs)])
    msd = traj.mean(axis=0)
    return TransientResult(
        msd_linear=msd,
        msd_db=to_db(msd),
        n_runs=n_runs,
        n_iters=n_iters,
        base_seed=base_seed,
    )


def steady_state_estimate(
    tr: TransientResult, window_fraction: float = 0.1
) -> SteadyStateEstimate:
    """Mean of the trailing window, guarded by a flatness check.

    Raises NotConverged when the two halves of the window differ by more
    than 0.5 dB, which indicates the transient has not finished.
    """
    if not 0.0 < window_fraction < 1.0:
        raise NotConverged(f"window_fraction must be in (0, 1), got {window_fraction}")
    window = math.ceil(window_fraction * tr.n_iters)
    tail = tr.msd_linear[-window:]
    if window >= 2:
        half = window // 2
        first = float(to_db(tail[:half].mean()))
        second = float(to_db(tail[half:].mean()))
        if abs(first - second) > FLATNESS_DB:
            raise NotConverged(
                f"window halves differ by {abs(first - second):.2f} dB "
                f"(> {FLATNESS_DB}); transient not finished"
            )
    linear = float(tail.mean())
    return SteadyStateEstimate(linear=linear, db=float(to_db(linear)), window=window)


def with_steady_state(
    tr: TransientResult, window_fraction: float = 0.1
) -> TransientResult:
    """Copy of the result with the steady-state fields filled in."""
    est = steady_state_estimate(tr, window_fraction)
    return replace(tr, steady_state_db=est.db, steady_window=est.window)


def save_transient_csv(tr: TransientResult, path, metadata: dict | None = None) -> None:
    """Write ``iter,msd_linear,msd_db`` rows under ``#``-prefixed metadata."""
    meta = dict(metadata or {})
    meta.setdefault("n_runs", tr.n_runs)
    meta.setdefault("n_iters", tr.n_iters)
    meta.setdefault("base_seed", tr.base_seed)
    if tr.steady_state_db is not None:
        meta.setdefault("steady_state_db", repr(tr.steady_state_db))
        meta.setdefault("steady_window", tr.steady_window)
    with open(path, "w") as fh:
        for key, value in meta.items():
            fh.write(f"# {key} = {value}\n")
        fh.write("iter,msd_linear,msd_db\n")
        for i in range(tr.n_iters):
            fh.write(f"{i},{tr.msd_linear[i]:.17g},{tr.msd_db[i]:.17g}\n")


def load_transient_csv(path) -> tuple[dict, np.ndarray]:
    """Read back metadata and the numeric body of a transient CSV."""
    meta: dict[str, str] = {}
    rows = []
    header = None
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].partition("=")
                meta[key.strip()] = value.strip()
            elif header is None:
                header = line.split(",")
            else:
                rows.append([float(x) for x in line.split(",")])
    body = np.array(rows)
    return meta, body
