"""Uniform combination weights and the spectrum of the consultation matrix.

The combination matrix ``A`` is left stochastic: column ``k`` holds the
weights node ``k`` places on its neighbors' intermediate estimates.  For the
uniform rule every in-neighbor of ``k`` (including ``k`` itself) receives
weight ``1/n_k``.  Because the topology is symmetric, ``A^T`` is similar to
the symmetric matrix ``A_s = D^{-1/2} C D^{-1/2}``, which makes the whole
eigen-system real and computable with a symmetric solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EtaTooSmall, InvalidParams, NoRoot, NumericalFailure
from .topology import EXPLICIT_KIND, Graph, graph_from_adjacency

LEFT_STOCHASTIC_TOL = 1e-9


@dataclass(frozen=True)
class CombinationMatrix:
    """Dense left-stochastic weight matrix ``a[l, k]`` tied to its graph."""

    weights: np.ndarray
    graph: Graph

    @property
    def n_nodes(self) -> int:
        return self.graph.n_nodes


@dataclass(frozen=True)
class SpectralData:
    """Eigen-system of ``A^T`` ordered by descending eigenvalue magnitude.

    ``right_vectors[:, k]`` and ``left_vectors[:, k]`` are the right/left
    eigenvectors ``r_k``/``s_k`` of ``A^T`` normalized to ``s_k @ r_k = 1``;
    ``sym_vectors[:, k]`` are the orthonormal eigenvectors of ``A_s`` they
    derive from (``r = r_s / sqrt(n)``, ``s = r_s * sqrt(n)`` entrywise).
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    sym_vectors: np.ndarray


def uniform_combination(g: Graph) -> CombinationMatrix:
    """Uniform rule: ``a[l, k] = 1/n_k`` for every ``l`` in ``N_k``, else 0."""
    c = g.adjacency()
    weights = c.astype(float) / g.degrees[None, :]
    return CombinationMatrix(weights=weights, graph=g)


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """First significant entry of every column made positive (reproducibility)."""
    v = vectors.copy()
    for k in range(v.shape[1]):
        col = v[:, k]
        idx = np.nonzero(np.abs(col) > 1e-12 * np.abs(col).max())[0]
        if idx.size and col[idx[0]] < 0:
            v[:, k] = -col
    return v


def spectral_decompose(cm: CombinationMatrix) -> SpectralData:
    """Full eigen-system of ``A^T`` via the symmetric similarity ``A_s``.

    Only the uniform rule is supported: the similarity transform requires
    ``A^T = D^{-1} C``.  Eigenvalues are sorted by descending magnitude
    (ties broken by descending signed value, then index), so index 0 is the
    Perron pair with eigenvalue 1 and strictly positive eigenvectors.
    """
    g = cm.graph
    deg = g.degrees.astype(float)
    c = g.adjacency().astype(float)
    if not np.allclose(cm.weights, c / deg[None, :], atol=1e-12):
        raise InvalidParams("spectral_decompose requires the uniform rule matrix")
    d_half = np.sqrt(deg)
    a_s = c / np.outer(d_half, d_half)
    try:
        eigvals, u_s = np.linalg.eigh(a_s)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"symmetric eigensolver failed: {exc}") from exc
    order = sorted(range(g.n_nodes), key=lambda i: (-abs(eigvals[i]), -eigvals[i], i))
    eigvals = eigvals[order]
    u_s = _fix_signs(u_s[:, order])
    if u_s[:, 0].min() <= 0:
        # Perron vector of a connected graph is strictly one-signed
        raise NumericalFailure("Perron eigenvector of A_s is not entrywise positive")
    right = u_s / d_half[:, None]
    left = u_s * d_half[:, None]
    left = left / np.einsum("ik,ik->k", left, right)[None, :]
    return SpectralData(
        eigenvalues=eigvals, right_vectors=right, left_vectors=left, sym_vectors=u_s
    )


def semicircle_density(lam, eta_bar: float):
    """Limiting eigenvalue density on ``[-R, R]`` with ``R = 2/sqrt(eta_bar)``.

    Accepts scalars or arrays; zero outside the support.
    """
    if eta_bar <= 0:
        raise InvalidParams(f"eta_bar must be positive, got {eta_bar}")
    radius = 2.0 / math.sqrt(eta_bar)
    lam = np.asarray(lam, dtype=float)
    inside = np.abs(lam) <= radius
    vals = np.zeros_like(lam)
    x = np.where(inside, lam / radius, 0.0)
    vals = np.where(inside, (2.0 / (math.pi * radius)) * np.sqrt(1.0 - x * x), 0.0)
    return vals if vals.ndim else float(vals)


def _bulk_fraction_above(u: float) -> float:
    """Fraction of the semicircle bulk with magnitude above ``u = y/R``."""
    return 1.0 - (2.0 / math.pi) * math.asin(u) - (2.0 / math.pi) * u * math.sqrt(
        1.0 - u * u
    )


def lambda_k_theory(k: int, n: int, eta: float, method: str = "exact_g") -> float:
    """Predicted magnitude of the k-th largest eigenvalue of ``A`` (k >= 2).

    ``exact_g`` inverts the semicircle tail-mass function by bisection;
    ``linear`` uses the straight-line tail ``(2/sqrt(eta)) * (1 - k/n)``.
    Valid for ``eta > 4`` so that the support radius stays below one.
    """
    if not 2 <= k <= n:
        raise InvalidParams(f"need 2 <= k <= n, got k={k}, n={n}")
    if eta <= 4.0:
        raise EtaTooSmall(f"eta must exceed 4 for a sub-unit support, got {eta}")
    radius = 2.0 / math.sqrt(eta)
    x = k / n
    if method == "linear":
        return radius * (1.0 - x)
    if method != "exact_g":
        raise InvalidParams(f"unknown method {method!r}")
    lo, hi = 0.0, 1.0
    f_lo, f_hi = _bulk_fraction_above(lo) - x, _bulk_fraction_above(hi) - x
    if f_lo < -1e-12 or f_hi > 1e-12:
        raise NoRoot(f"no root of g(y) = {x} in [0, R]")
    while hi - lo > 1e-14:
        mid = 0.5 * (lo + hi)
        if _bulk_fraction_above(mid) - x > 0.0:
            lo = mid
        else:
            hi = mid
    return radius * 0.5 * (lo + hi)


def save_combination_csv(cm: CombinationMatrix, path) -> None:
    """Dense CSV dump; row ``l``, column ``k`` holds ``a[l, k]``."""
    np.savetxt(path, cm.weights, delimiter=",", fmt="%.17g")


def load_combination_csv(path) -> CombinationMatrix:
    """Load a dense weight matrix, validating left-stochastic structure.

    Column sums must equal one within ``1e-9``, entries must be nonnegative,
    and the sparsity pattern must be symmetric with a positive diagonal so
    that a valid neighborhood structure can be reconstructed.
    """
    weights = np.atleast_2d(np.loadtxt(path, delimiter=",", dtype=float))
    n = weights.shape[0]
    if weights.shape != (n, n):
        raise InvalidParams(f"{path}: matrix must be square, got {weights.shape}")
    if weights.min() < 0:
        raise InvalidParams(f"{path}: negative combination weight")
    col_err = np.abs(weights.sum(axis=0) - 1.0).max()
    if col_err > LEFT_STOCHASTIC_TOL:
        raise InvalidParams(
            f"{path}: columns must sum to 1 (worst deviation {col_err:.3e})"
        )
    pattern = weights > 0
    if not np.array_equal(pattern, pattern.T):
        raise InvalidParams(f"{path}: sparsity pattern must be symmetric")
    if not pattern.diagonal().all():
        raise InvalidParams(f"{path}: every node must consult itself (diagonal > 0)")
    graph = graph_from_adjacency(pattern, kind=EXPLICIT_KIND)
    return CombinationMatrix(weights=weights, graph=graph)
