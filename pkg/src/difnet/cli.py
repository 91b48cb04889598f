"""Configuration-driven experiment dispatch with CSV artifacts.

Configs are JSON objects with the sections documented in the README
(``experiment``, ``topology``, ``signal``, ``adaptation``, ``sim``,
``seed``, ``output``, plus optional ``sweep``, ``table2`` and
``window_fraction``).  Parsing is strict: unknown keys are rejected with
their dotted path.  All outputs are deterministic functions of the
effective config; CSV headers carry a config hash instead of timestamps so
re-runs are byte identical.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import combination, signal_model, simulator, theory, topology
from .errors import ConfigError, DifnetError

EXPERIMENTS = ("transient", "informed_sweep", "eigen_dist", "fixed_rate_sweep", "table2")

# Sub-stream tags for deriving independent seeds from the experiment seed.
_TAG_GRAPH = 1
_TAG_PROFILE = 2
_TAG_INFORMED = 3
_TAG_SIM = 4

# Density sweeps near the connectivity threshold discard most samples, so
# experiment-level generation allows far more redraws than the library default.
DEFAULT_MAX_ATTEMPTS = 1000

DEFAULT_RUNS = 30
DEFAULT_N0 = 10
DEFAULT_WINDOW_FRACTION = 0.1
TABLE2_P_VALUES = (0.02, 0.075)
TABLE2_M_VALUES = (2, 8)


@dataclass(frozen=True)
class TopologySpec:
    kind: str
    n: int
    p: float | None = None
    m: int | None = None
    n0: int = DEFAULT_N0
    max_attempts: int = DEFAULT_MAX_ATTEMPTS


@dataclass(frozen=True)
class SignalSpec:
    m_dim: int
    ru_range: tuple[float, float] | None
    ru_diag: tuple[float, ...] | None
    noise_var: float | tuple[float, ...]


@dataclass(frozen=True)
class AdaptationSpec:
    step_kind: str
    step_value: float
    rule: str | None = None
    count: int | None = None
    nodes: tuple[int, ...] | None = None


@dataclass(frozen=True)
class SimSpec:
    iters: int = 0
    runs: int = DEFAULT_RUNS


@dataclass(frozen=True)
class Table2Spec:
    p_values: tuple[float, ...] = TABLE2_P_VALUES
    m_values: tuple[int, ...] = TABLE2_M_VALUES
    n0: int = DEFAULT_N0


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    topology: TopologySpec | None
    signal: SignalSpec | None
    adaptation: AdaptationSpec | None
    sim: SimSpec
    seed: int
    output: str
    sweep_counts: tuple[int, ...] | None
    table2: Table2Spec
    window_fraction: float

    def config_hash(self) -> str:
        # identifies the experiment definition; the output location is
        # environmental and must not perturb reproducible headers
        fields = {
            k: getattr(self, k) for k in self.__dataclass_fields__ if k != "output"
        }
        payload = json.dumps(fields, default=_as_jsonable, sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _as_jsonable(obj):
    if hasattr(obj, "__dataclass_fields__"):
        return {k: getattr(obj, k) for k in obj.__dataclass_fields__}
    raise TypeError(f"not jsonable: {obj!r}")


def _require(mapping: dict, key: str, path: str):
    if key not in mapping:
        raise ConfigError(f"missing required key {path}.{key}")
    return mapping[key]


def _check_keys(mapping: dict, allowed: set, path: str) -> None:
    for key in mapping:
        if key not in allowed:
            raise ConfigError(f"unknown key {path}.{key}" if path else f"unknown key {key}")


def _as_int(value, path: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path} must be an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{path} must be >= {minimum}, got {value}")
    return value


def _as_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path} must be a number, got {value!r}")
    return float(value)


def _parse_topology(section, path="topology") -> TopologySpec:
    if not isinstance(section, dict):
        raise ConfigError(f"{path} must be an object")
    _check_keys(section, {"kind", "n", "p", "m", "n0", "max_attempts"}, path)
    kind = _require(section, "kind", path)
    n = _as_int(_require(section, "n", path), f"{path}.n", minimum=1)
    max_attempts = _as_int(
        section.get("max_attempts", DEFAULT_MAX_ATTEMPTS), f"{path}.max_attempts", 1
    )
    if kind == "erdos_renyi":
        p = _as_number(_require(section, "p", path), f"{path}.p")
        if not 0.0 <= p <= 1.0:
            raise ConfigError(f"{path}.p must be in [0, 1], got {p}")
        return TopologySpec(kind=kind, n=n, p=p, max_attempts=max_attempts)
    if kind == "scale_free":
        m = _as_int(_require(section, "m", path), f"{path}.m", minimum=1)
        n0 = _as_int(section.get("n0", DEFAULT_N0), f"{path}.n0", minimum=1)
        if not m <= n0 <= n:
            raise ConfigError(f"{path}: need m <= n0 <= n, got m={m}, n0={n0}, n={n}")
        return TopologySpec(kind=kind, n=n, m=m, n0=n0, max_attempts=max_attempts)
    raise ConfigError(f"{path}.kind must be 'erdos_renyi' or 'scale_free', got {kind!r}")


def _parse_signal(section, n_nodes: int, path="signal") -> SignalSpec:
    if not isinstance(section, dict):
        raise ConfigError(f"{path} must be an object")
    _check_keys(section, {"m", "ru_range", "ru_diag", "noise_var"}, path)
    m_dim = _as_int(_require(section, "m", path), f"{path}.m", minimum=1)
    ru_range = None
    ru_diag = None
    if "ru_diag" in section:
        diag = section["ru_diag"]
        if not isinstance(diag, list) or len(diag) != m_dim:
            raise ConfigError(f"{path}.ru_diag must be a list of {m_dim} numbers")
        ru_diag = tuple(_as_number(v, f"{path}.ru_diag") for v in diag)
        if any(v <= 0 for v in ru_diag):
            raise ConfigError(f"{path}.ru_diag entries must be positive")
    else:
        rng = section.get("ru_range", [0.8, 1.8])
        if not isinstance(rng, list) or len(rng) != 2:
            raise ConfigError(f"{path}.ru_range must be [lo, hi]")
        lo, hi = (_as_number(v, f"{path}.ru_range") for v in rng)
        if not 0 < lo <= hi:
            raise ConfigError(f"{path}.ru_range must satisfy 0 < lo <= hi")
        ru_range = (lo, hi)
    noise = _require(section, "noise_var", path)
    if isinstance(noise, list):
        if len(noise) != n_nodes:
            raise ConfigError(f"{path}.noise_var list must have {n_nodes} entries")
        noise_var = tuple(_as_number(v, f"{path}.noise_var") for v in noise)
        if any(v <= 0 for v in noise_var):
            raise ConfigError(f"{path}.noise_var entries must be positive")
    else:
        noise_var = _as_number(noise, f"{path}.noise_var")
        if noise_var <= 0:
            raise ConfigError(f"{path}.noise_var must be positive")
    return SignalSpec(m_dim=m_dim, ru_range=ru_range, ru_diag=ru_diag, noise_var=noise_var)


def _parse_adaptation(section, n_nodes: int, need_rule: bool, path="adaptation") -> AdaptationSpec:
    if not isinstance(section, dict):
        raise ConfigError(f"{path} must be an object")
    _check_keys(section, {"rule", "count", "nodes", "step"}, path)
    step = _require(section, "step", path)
    if not isinstance(step, dict):
        raise ConfigError(f"{path}.step must be an object")
    _check_keys(step, {"kind", "mu", "mu0"}, f"{path}.step")
    kind = _require(step, "kind", f"{path}.step")
    if kind == "uniform":
        value = _as_number(_require(step, "mu", f"{path}.step"), f"{path}.step.mu")
    elif kind == "normalized":
        value = _as_number(_require(step, "mu0", f"{path}.step"), f"{path}.step.mu0")
    else:
        raise ConfigError(f"{path}.step.kind must be 'uniform' or 'normalized'")
    if value <= 0:
        raise ConfigError(f"{path}.step: step-size must be positive, got {value}")
    rule = section.get("rule")
    count = section.get("count")
    nodes = section.get("nodes")
    if need_rule:
        if rule not in ("top_degree", "bottom_degree", "random", "explicit"):
            raise ConfigError(f"{path}.rule must name an informed-selection rule")
        if rule == "explicit":
            if not isinstance(nodes, list) or not nodes:
                raise ConfigError(f"{path}.nodes must be a nonempty list for explicit rule")
            nodes = tuple(_as_int(v, f"{path}.nodes") for v in nodes)
            count = len(nodes) if count is None else _as_int(count, f"{path}.count", 1)
        else:
            count = _as_int(_require(section, "count", path), f"{path}.count", minimum=1)
        if count is not None and count > n_nodes:
            raise ConfigError(f"{path}.count must be <= {n_nodes}, got {count}")
    return AdaptationSpec(
        step_kind=kind,
        step_value=value,
        rule=rule,
        count=count,
        nodes=tuple(nodes) if isinstance(nodes, (list, tuple)) else None,
    )


def parse_config(text: str) -> ExperimentConfig:
    """Strictly parse a JSON experiment config, applying documented defaults."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    _check_keys(
        raw,
        {
            "experiment",
            "topology",
            "signal",
            "adaptation",
            "sim",
            "seed",
            "output",
            "sweep",
            "table2",
            "window_fraction",
        },
        "",
    )
    experiment = _require(raw, "experiment", "config")
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {experiment!r}")
    seed = _as_int(_require(raw, "seed", "config"), "seed")

    topo = _parse_topology(_require(raw, "topology", "config"))

    sim_raw = raw.get("sim", {})
    if not isinstance(sim_raw, dict):
        raise ConfigError("sim must be an object")
    _check_keys(sim_raw, {"iters", "runs"}, "sim")
    sim = SimSpec(
        iters=_as_int(sim_raw.get("iters", 0), "sim.iters", minimum=0),
        runs=_as_int(sim_raw.get("runs", DEFAULT_RUNS), "sim.runs", minimum=1),
    )

    signal = None
    if experiment in ("transient", "informed_sweep", "fixed_rate_sweep"):
        signal = _parse_signal(_require(raw, "signal", "config"), topo.n)
    elif "signal" in raw:
        signal = _parse_signal(raw["signal"], topo.n)

    adaptation = None
    if experiment == "transient":
        adaptation = _parse_adaptation(_require(raw, "adaptation", "config"), topo.n, True)
        if sim.iters < 1:
            raise ConfigError("sim.iters must be >= 1 for transient experiments")
    elif experiment in ("informed_sweep", "fixed_rate_sweep"):
        adaptation = _parse_adaptation(_require(raw, "adaptation", "config"), topo.n, False)
        if experiment == "fixed_rate_sweep" and adaptation.step_kind != "normalized":
            raise ConfigError("adaptation.step.kind must be 'normalized' for fixed_rate_sweep")
    elif "adaptation" in raw:
        adaptation = _parse_adaptation(raw["adaptation"], topo.n, False)

    sweep_counts = None
    if "sweep" in raw:
        sweep = raw["sweep"]
        if not isinstance(sweep, dict):
            raise ConfigError("sweep must be an object")
        _check_keys(sweep, {"counts"}, "sweep")
        counts = _require(sweep, "counts", "sweep")
        if not isinstance(counts, list) or not counts:
            raise ConfigError("sweep.counts must be a nonempty list")
        sweep_counts = tuple(
            _as_int(v, "sweep.counts", minimum=1) for v in counts
        )
        if any(v > topo.n for v in sweep_counts):
            raise ConfigError(f"sweep.counts entries must be <= {topo.n}")

    table2 = Table2Spec()
    if "table2" in raw:
        t2 = raw["table2"]
        if not isinstance(t2, dict):
            raise ConfigError("table2 must be an object")
        _check_keys(t2, {"p_values", "m_values", "n0"}, "table2")
        p_values = tuple(
            _as_number(v, "table2.p_values") for v in t2.get("p_values", TABLE2_P_VALUES)
        )
        m_values = tuple(
            _as_int(v, "table2.m_values", minimum=1) for v in t2.get("m_values", TABLE2_M_VALUES)
        )
        table2 = Table2Spec(
            p_values=p_values,
            m_values=m_values,
            n0=_as_int(t2.get("n0", DEFAULT_N0), "table2.n0", minimum=1),
        )

    window_fraction = raw.get("window_fraction", DEFAULT_WINDOW_FRACTION)
    window_fraction = _as_number(window_fraction, "window_fraction")
    if not 0.0 < window_fraction < 1.0:
        raise ConfigError(f"window_fraction must be in (0, 1), got {window_fraction}")

    output = raw.get("output", "difnet-out")
    if not isinstance(output, str):
        raise ConfigError("output must be a string path")

    return ExperimentConfig(
        experiment=experiment,
        topology=topo,
        signal=signal,
        adaptation=adaptation,
        sim=sim,
        seed=seed,
        output=output,
        sweep_counts=sweep_counts,
        table2=table2,
        window_fraction=window_fraction,
    )


def _sub_seed(seed: int, *tags: int) -> int:
    return int(np.random.SeedSequence([seed, *tags]).generate_state(1)[0])


def _build_graph(cfg: ExperimentConfig, trial: int = 0) -> topology.Graph:
    topo = cfg.topology
    seed = _sub_seed(cfg.seed, _TAG_GRAPH, trial)
    if topo.kind == "erdos_renyi":
        return topology.gen_erdos_renyi(topo.n, topo.p, seed, topo.max_attempts)
    return topology.gen_scale_free(topo.n, topo.m, topo.n0, seed)


def _build_profile(cfg: ExperimentConfig) -> signal_model.SignalProfile:
    sig = cfg.signal
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, _TAG_PROFILE]))
    if sig.ru_diag is not None:
        ru = np.array(sig.ru_diag)
    else:
        ru = rng.uniform(sig.ru_range[0], sig.ru_range[1], sig.m_dim)
    w_true = rng.uniform(-1.0, 1.0, sig.m_dim)
    if isinstance(sig.noise_var, tuple):
        noise = np.array(sig.noise_var)
    else:
        noise = np.full(cfg.topology.n, sig.noise_var)
    return signal_model.SignalProfile(ru_diag=ru, noise_vars=noise, w_true=w_true)


def _step_rule(adapt: AdaptationSpec) -> signal_model.StepRule:
    if adapt.step_kind == "uniform":
        return signal_model.uniform_step(adapt.step_value)
    return signal_model.normalized_step(adapt.step_value)


def _sweep_grid(cfg: ExperimentConfig) -> list[int]:
    if cfg.sweep_counts is not None:
        return sorted(set(cfg.sweep_counts))
    n = cfg.topology.n
    stride = math.ceil(n / 40)
    counts = sorted({1, *range(stride, n + 1, stride), n})
    return counts


def _meta(cfg: ExperimentConfig, **extra) -> dict:
    meta = {"experiment": cfg.experiment, "config_hash": cfg.config_hash(), "seed": cfg.seed}
    topo = cfg.topology
    meta["topology"] = (
        f"{topo.kind}(n={topo.n}, p={topo.p})"
        if topo.kind == "erdos_renyi"
        else f"{topo.kind}(n={topo.n}, m={topo.m}, n0={topo.n0})"
    )
    meta.update(extra)
    return meta


def _write_manifest(out: Path, cfg: ExperimentConfig, files: list[str]) -> None:
    lines = [f"# config_hash = {cfg.config_hash()}"] + files
    (out / "manifest.txt").write_text("\n".join(lines) + "\n")


def _run_transient(cfg: ExperimentConfig, out: Path) -> tuple[list[str], str]:
    g = _build_graph(cfg)
    profile = _build_profile(cfg)
    adapt = cfg.adaptation
    informed = signal_model.select_informed(
        g,
        adapt.rule,
        adapt.count,
        seed=_sub_seed(cfg.seed, _TAG_INFORMED),
        nodes=list(adapt.nodes) if adapt.nodes else None,
    )
    acfg = signal_model.AdaptationConfig(informed=informed, step_rule=_step_rule(adapt))
    cm = combination.uniform_combination(g)
    result = simulator.monte_carlo(
        g, cm, profile, acfg, cfg.sim.iters, cfg.sim.runs, _sub_seed(cfg.seed, _TAG_SIM)
    )
    es = theory.build_error_system(cm, profile, acfg, g)
    rate = theory.exact_rate(es)
    msd = theory.exact_msd(es)
    msd0 = float(profile.w_true @ profile.w_true)
    iters = np.arange(cfg.sim.iters)
    theory_lin = np.maximum(msd, msd0 * rate**iters)
    steady_note = "not_converged"
    try:
        result = simulator.with_steady_state(result, cfg.window_fraction)
        steady_note = f"{result.steady_state_db:.4f}"
    except DifnetError:
        pass
    meta = _meta(
        cfg,
        n_runs=result.n_runs,
        n_iters=result.n_iters,
        base_seed=result.base_seed,
        n_informed=acfg.n_informed,
        rate_exact=repr(rate),
        msd_exact_db=repr(10 * math.log10(msd)),
        steady_state_db=steady_note,
    )
    path = out / "transient.csv"
    with open(path, "w") as fh:
        for key, value in meta.items():
            fh.write(f"# {key} = {value}\n")
        fh.write("iter,msd_linear,msd_db,msd_theory_linear,msd_theory_db\n")
        theory_db = simulator.to_db(theory_lin)
        for i in iters:
            fh.write(
                f"{i},{result.msd_linear[i]:.17g},{result.msd_db[i]:.17g},"
                f"{theory_lin[i]:.17g},{theory_db[i]:.17g}\n"
            )
    summary = (
        f"transient: {cfg.sim.runs} runs x {cfg.sim.iters} iters, "
        f"steady {steady_note} dB (exact theory {10 * math.log10(msd):.3f} dB)"
    )
    return ["transient.csv"], summary


def _run_informed_sweep(cfg: ExperimentConfig, out: Path) -> tuple[list[str], str]:
    g = _build_graph(cfg)
    profile = _build_profile(cfg)
    cm = combination.uniform_combination(g)
    rule = _step_rule(cfg.adaptation)
    reports = []
    for count in _sweep_grid(cfg):
        informed = signal_model.select_informed(g, "top_degree", count)
        acfg = signal_model.AdaptationConfig(informed=informed, step_rule=rule)
        reports.append(theory.compute_report(g, cm, profile, acfg))
    path = out / "informed_sweep.csv"
    theory.save_theory_csv(reports, path, _meta(cfg, order="top_degree"))
    summary = f"informed_sweep: {len(reports)} informed-set sizes written"
    return ["informed_sweep.csv"], summary


def _run_fixed_rate_sweep(cfg: ExperimentConfig, out: Path) -> tuple[list[str], str]:
    g = _build_graph(cfg)
    profile = _build_profile(cfg)
    cm = combination.uniform_combination(g)
    rule = _step_rule(cfg.adaptation)
    reports = []
    for count in _sweep_grid(cfg):
        informed = signal_model.select_informed(g, "bottom_degree", count)
        acfg = signal_model.AdaptationConfig(informed=informed, step_rule=rule)
        reports.append(theory.compute_report(g, cm, profile, acfg))
    path = out / "fixed_rate_sweep.csv"
    theory.save_theory_csv(reports, path, _meta(cfg, order="bottom_degree"))
    summary = f"fixed_rate_sweep: {len(reports)} informed-set sizes written"
    return ["fixed_rate_sweep.csv"], summary


def _run_eigen_dist(cfg: ExperimentConfig, out: Path) -> tuple[list[str], str]:
    n = cfg.topology.n
    abs_sorted = np.zeros(n)
    bulk = []
    etas = []
    for trial in range(cfg.sim.runs):
        g = _build_graph(cfg, trial)
        sd = combination.spectral_decompose(combination.uniform_combination(g))
        abs_sorted += np.abs(sd.eigenvalues)
        bulk.append(sd.eigenvalues[1:])
        etas.append(float(g.degrees.mean()))
    abs_sorted /= cfg.sim.runs
    eta = float(np.mean(etas))
    radius = 2.0 / math.sqrt(eta)
    meta = _meta(cfg, realizations=cfg.sim.runs, eta_mean=repr(eta))

    dist_path = out / "eigen_dist.csv"
    with open(dist_path, "w") as fh:
        for key, value in meta.items():
            fh.write(f"# {key} = {value}\n")
        fh.write("k,lambda_abs,lambda_exact_g,lambda_linear\n")
        for k in range(1, n + 1):
            if k == 1:
                exact_g = linear = 1.0
            else:
                exact_g = combination.lambda_k_theory(k, n, eta, "exact_g")
                linear = combination.lambda_k_theory(k, n, eta, "linear")
            fh.write(f"{k},{abs_sorted[k - 1]:.17g},{exact_g:.17g},{linear:.17g}\n")

    pooled = np.concatenate(bulk)
    edges = np.linspace(-1.1 * radius, 1.1 * radius, 45)
    counts, _ = np.histogram(pooled, bins=edges)
    density = counts / (pooled.size * np.diff(edges))
    centers = 0.5 * (edges[:-1] + edges[1:])
    hist_path = out / "eigen_hist.csv"
    with open(hist_path, "w") as fh:
        for key, value in meta.items():
            fh.write(f"# {key} = {value}\n")
        fh.write("bin_center,density_empirical,density_semicircle\n")
        for c, d in zip(centers, density):
            fh.write(
                f"{c:.17g},{d:.17g},{combination.semicircle_density(c, eta):.17g}\n"
            )
    summary = (
        f"eigen_dist: {cfg.sim.runs} realizations, eta={eta:.3f}, "
        f"support radius {radius:.3f}"
    )
    return ["eigen_dist.csv", "eigen_hist.csv"], summary


def _run_table2(cfg: ExperimentConfig, out: Path) -> tuple[list[str], str]:
    n = cfg.topology.n
    rows = []
    scenario = 0
    for model, params in (("erdos_renyi", cfg.table2.p_values), ("scale_free", cfg.table2.m_values)):
        for param in params:
            etas, lam2s = [], []
            for trial in range(cfg.sim.runs):
                seed = _sub_seed(cfg.seed, _TAG_GRAPH, scenario, trial)
                if model == "erdos_renyi":
                    g = topology.gen_erdos_renyi(n, param, seed, cfg.topology.max_attempts)
                else:
                    g = topology.gen_scale_free(n, param, cfg.table2.n0, seed)
                sd = combination.spectral_decompose(combination.uniform_combination(g))
                etas.append(float(g.degrees.mean()))
                lam2s.append(abs(float(sd.eigenvalues[1])))
            rows.append((model, param, float(np.mean(etas)), float(np.mean(lam2s))))
            scenario += 1
    path = out / "table2.csv"
    with open(path, "w") as fh:
        for key, value in _meta(cfg, realizations=cfg.sim.runs).items():
            fh.write(f"# {key} = {value}\n")
        fh.write("model,param,eta_mean,lambda2_mean\n")
        for model, param, eta, lam2 in rows:
            fh.write(f"{model},{param},{eta:.17g},{lam2:.17g}\n")
    summary = "table2: " + "; ".join(
        f"{model}({param}): eta={eta:.2f}, |lambda2|={lam2:.3f}"
        for model, param, eta, lam2 in rows
    )
    return ["table2.csv"], summary


_RUNNERS = {
    "transient": _run_transient,
    "informed_sweep": _run_informed_sweep,
    "eigen_dist": _run_eigen_dist,
    "fixed_rate_sweep": _run_fixed_rate_sweep,
    "table2": _run_table2,
}


def run_experiment(cfg: ExperimentConfig) -> tuple[list[Path], str]:
    """Execute the configured experiment; returns artifact paths and a summary."""
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    try:
        files, summary = _RUNNERS[cfg.experiment](cfg, out)
    except DifnetError as exc:
        raise type(exc)(f"[{cfg.experiment}] {exc}") from exc
    _write_manifest(out, cfg, files)
    return [out / f for f in files] + [out / "manifest.txt"], summary


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="difnet",
        description="Diffusion-LMS network experiments (simulation + closed-form theory)",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        sp = sub.add_parser(name, help=f"run the {name} experiment")
        sp.add_argument("--config", required=True, help="JSON experiment config")
        sp.add_argument("--seed", type=int, default=None, help="override config seed")
        sp.add_argument("--out", default=None, help="override output directory")
    args = parser.parse_args(argv)
    try:
        cfg = parse_config(Path(args.config).read_text())
        if cfg.experiment != args.experiment:
            raise ConfigError(
                f"config declares experiment {cfg.experiment!r}, "
                f"command line requests {args.experiment!r}"
            )
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
        if args.out is not None:
            cfg = replace(cfg, output=args.out)
        files, summary = run_experiment(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DifnetError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    print(summary)
    for path in files:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
