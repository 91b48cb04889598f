"""Figure rendering for difnet experiment CSV logs.

Each experiment kind has a fixed column schema; simulation series are drawn
solid and closed-form (theory) series dashed.  Inputs are read-only and the
output is deterministic: fixed figure geometry, text vectorized to paths,
and a pinned SVG hash salt, so identical inputs give identical bytes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
matplotlib.rcParams.update(
    {
        "svg.fonttype": "path",
        "svg.hashsalt": "difnet-plot",
        "figure.figsize": (8.0, 4.5),
        "figure.dpi": 100,
        "axes.grid": True,
        "grid.alpha": 0.3,
    }
)

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


class SchemaMismatch(Exception):
    """CSV columns or metadata do not match the requested plot kind."""


KINDS = ("transient", "informed_sweep", "eigen_dist", "fixed_rate_sweep", "table2")

_REQUIRED_COLUMNS = {
    "transient": ("iter", "msd_linear", "msd_db"),
    "informed_sweep": (
        "n_i",
        "rate_exact",
        "rate_approx",
        "msd_exact_db",
        "msd_approx_db",
        "msd_k1_db",
        "msd_kgt1_db",
    ),
    "fixed_rate_sweep": (
        "n_i",
        "rate_exact",
        "rate_approx",
        "msd_exact_db",
        "msd_approx_db",
        "msd_k1_db",
        "msd_kgt1_db",
    ),
    "eigen_dist": ("k", "lambda_abs", "lambda_exact_g", "lambda_linear"),
    "eigen_hist": ("bin_center", "density_empirical", "density_semicircle"),
    "table2": ("model", "param", "eta_mean", "lambda2_mean"),
}


@dataclass(frozen=True)
class PlotSpec:
    """What to draw: experiment kind, input CSV path(s), output image path."""

    kind: str
    inputs: tuple[str, ...]
    output: str
    options: dict = field(default_factory=dict)


def read_csv(path) -> tuple[dict, list[str], list[list[str]]]:
    """Parse ``#`` metadata lines, the header row, and raw body cells."""
    meta: dict[str, str] = {}
    header: list[str] | None = None
    rows: list[list[str]] = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            meta[key.strip()] = value.strip()
        elif header is None:
            header = line.split(",")
        else:
            rows.append(line.split(","))
    if header is None:
        raise SchemaMismatch(f"{path}: no header row found")
    return meta, header, rows


def _validated(path, schema_key: str, kind: str) -> tuple[dict, dict[str, list[str]]]:
    meta, header, rows = read_csv(path)
    tag = meta.get("experiment")
    if tag != kind:
        raise SchemaMismatch(
            f"{path}: metadata experiment tag {tag!r} does not match kind {kind!r}"
        )
    for column in _REQUIRED_COLUMNS[schema_key]:
        if column not in header:
            raise SchemaMismatch(f"{path}: missing column '{column}' for kind {kind}")
    columns = {name: [row[i] for row in rows] for i, name in enumerate(header)}
    return meta, columns


def _floats(columns, name) -> np.ndarray:
    return np.array([float(v) for v in columns[name]])


def _save(fig, output: str) -> None:
    fig.savefig(output, metadata={"Date": None} if output.endswith(".svg") else None)
    plt.close(fig)


def _render_transient(spec: PlotSpec) -> None:
    meta, cols = _validated(spec.inputs[0], "transient", "transient")
    it = _floats(cols, "iter")
    fig, ax = plt.subplots()
    ax.plot(it, _floats(cols, "msd_db"), "-", color="C0", label="simulation")
    if "msd_theory_db" in cols:
        ax.plot(
            it, _floats(cols, "msd_theory_db"), "--", color="C1", label="theory"
        )
    ax.set_xlabel("iteration")
    ax.set_ylabel("network MSD (dB)")
    ax.set_title(f"Transient MSD, {meta.get('topology', '')}")
    ax.legend()
    _save(fig, spec.output)


def _render_sweep(spec: PlotSpec, kind: str) -> None:
    meta, cols = _validated(spec.inputs[0], kind, kind)
    n_i = _floats(cols, "n_i")
    fig, (ax_rate, ax_msd) = plt.subplots(1, 2)
    ax_rate.plot(n_i, _floats(cols, "rate_exact"), "-", color="C0", label="exact")
    ax_rate.plot(
        n_i, _floats(cols, "rate_approx"), "--", color="C1", label="approximation"
    )
    ax_rate.set_xlabel("informed nodes")
    ax_rate.set_ylabel("convergence rate")
    ax_rate.legend()
    ax_msd.plot(n_i, _floats(cols, "msd_exact_db"), "-", color="C0", label="exact")
    ax_msd.plot(
        n_i, _floats(cols, "msd_approx_db"), "--", color="C1", label="approximation"
    )
    ax_msd.plot(
        n_i, _floats(cols, "msd_k1_db"), "--", color="C2", alpha=0.7, label="first term"
    )
    finite = np.isfinite(_floats(cols, "msd_kgt1_db"))
    ax_msd.plot(
        n_i[finite],
        _floats(cols, "msd_kgt1_db")[finite],
        "--",
        color="C3",
        alpha=0.7,
        label="second term",
    )
    ax_msd.set_xlabel("informed nodes")
    ax_msd.set_ylabel("steady-state MSD (dB)")
    ax_msd.legend(fontsize=8)
    order = meta.get("order", "")
    fig.suptitle(f"{kind} ({order}), {meta.get('topology', '')}", fontsize=10)
    _save(fig, spec.output)


def _render_eigen_dist(spec: PlotSpec) -> None:
    meta, cols = _validated(spec.inputs[0], "eigen_dist", "eigen_dist")
    k = _floats(cols, "k")
    n_panels = 2 if len(spec.inputs) > 1 else 1
    fig, axes = plt.subplots(1, n_panels, squeeze=False)
    ax = axes[0][0]
    ax.plot(k, _floats(cols, "lambda_abs"), ".", color="C0", label="realized")
    ax.plot(k, _floats(cols, "lambda_exact_g"), "--", color="C1", label="tail inverse")
    ax.plot(k, _floats(cols, "lambda_linear"), "-.", color="C2", label="linear tail")
    ax.set_xlabel("eigenvalue index")
    ax.set_ylabel("|eigenvalue|")
    ax.legend()
    if n_panels == 2:
        _, hist = _validated(spec.inputs[1], "eigen_hist", "eigen_dist")
        axh = axes[0][1]
        centers = _floats(hist, "bin_center")
        width = centers[1] - centers[0] if centers.size > 1 else 0.05
        axh.bar(
            centers,
            _floats(hist, "density_empirical"),
            width=0.9 * width,
            color="C0",
            label="realized",
        )
        axh.plot(
            centers,
            _floats(hist, "density_semicircle"),
            "--",
            color="C1",
            label="semicircle",
        )
        axh.set_xlabel("eigenvalue")
        axh.set_ylabel("density")
        axh.legend()
    fig.suptitle(f"eigenvalue distribution, {meta.get('topology', '')}", fontsize=10)
    _save(fig, spec.output)


def _render_table2(spec: PlotSpec) -> None:
    meta, cols = _validated(spec.inputs[0], "table2", "table2")
    labels = [f"{m}({p})" for m, p in zip(cols["model"], cols["param"])]
    x = np.arange(len(labels))
    fig, (ax_eta, ax_lam) = plt.subplots(1, 2)
    ax_eta.bar(x, _floats(cols, "eta_mean"), color="C0")
    ax_eta.set_xticks(x, labels, rotation=20, fontsize=8)
    ax_eta.set_ylabel("network degree")
    ax_lam.bar(x, _floats(cols, "lambda2_mean"), color="C1")
    ax_lam.set_xticks(x, labels, rotation=20, fontsize=8)
    ax_lam.set_ylabel("|second eigenvalue|")
    fig.suptitle(f"degree and spectral gap, {meta.get('realizations', '?')} realizations", fontsize=10)
    _save(fig, spec.output)


def render(spec: PlotSpec) -> str:
    """Render one figure for the spec; returns the output path."""
    if spec.kind not in KINDS:
        raise SchemaMismatch(f"unknown plot kind {spec.kind!r}")
    if not spec.inputs:
        raise SchemaMismatch("at least one input CSV is required")
    if spec.kind == "transient":
        _render_transient(spec)
    elif spec.kind in ("informed_sweep", "fixed_rate_sweep"):
        _render_sweep(spec, spec.kind)
    elif spec.kind == "eigen_dist":
        _render_eigen_dist(spec)
    else:
        _render_table2(spec)
    return spec.output
