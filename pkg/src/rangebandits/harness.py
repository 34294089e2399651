"""Experiment runner: composes environments and learners, runs seeded replicas,
and emits regret traces and summaries as reproducible CSV.

Config files are flat ``key = value`` text. Recognized keys:

    experiment.name        free-form label
    environment.kind       bandit_lower | fullinfo_lower | octopus |
                           smooth_random | oscillating | interval_random |
                           multicomponent_smooth
    environment.<param>    kind-specific parameters (eps, C, k, d, delta,
                           graph, anchor_mode, sizes, m_low, m_high)
    learner.kind           exp3 | hedge | reduction | anchored-exp3 | multicomponent
    learner.eta            step size, or the word "doubling"
    learner.feedback       bandit | full        (reduction only)
    learner.mode           any-arm | min-loss   (anchored-exp3 only)
    run.T  run.K  run.seed  run.replicas
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .anchor import anchored_exp3_round, multicomponent_sideinfo
from .core import RegretTrace, RngHandle, regret, sample
from .environments import (
    ENVIRONMENT_KINDS,
    EnvironmentInstance,
    bandit_lower_bound_env,
    fullinfo_lower_bound_env,
    interval_random_env,
    multicomponent_smooth_env,
    octopus_adversary,
    oscillating_env,
    smooth_random_env,
)
from .learners import bandit_observe, doubling_init, exp3_init, hedge_step
from .reduction import meta_round
from .spectral import GraphSpec

TRACE_HEADER = ["replica", "t", "arm", "loss", "anchor", "cum_regret"]
SUMMARY_HEADER = ["experiment", "learner", "environment", "replica", "final_regret", "seconds"]


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    name: str
    env_kind: str
    env_params: dict
    learner_kind: str
    eta: float | None
    doubling: bool
    feedback: str
    mode: str
    T: int
    K: int
    seed: int
    replicas: int
    raw: dict = field(default_factory=dict)


def parse_config_text(text: str) -> ExperimentConfig:
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        raw[key] = value

    def need(key):
        if key not in raw:
            raise ConfigError(f"missing required key {key!r}")
        return raw[key]

    env_kind = need("environment.kind")
    if env_kind not in ENVIRONMENT_KINDS:
        raise ConfigError(f"unknown environment kind {env_kind!r}")
    learner_kind = need("learner.kind")
    if learner_kind not in ("exp3", "hedge", "reduction", "anchored-exp3", "multicomponent"):
        raise ConfigError(f"unknown learner kind {learner_kind!r}")

    eta_raw = raw.get("learner.eta", "doubling")
    doubling = eta_raw.strip().lower() == "doubling"
    eta = None if doubling else float(eta_raw)
    if not doubling and eta <= 0:
        raise ConfigError(f"learner.eta must be positive, got {eta}")
    if doubling and learner_kind == "hedge":
        raise ConfigError("the doubling wrapper is bandit-only; hedge needs a fixed eta")

    env_params = {
        k.split(".", 1)[1]: v for k, v in raw.items()
        if k.startswith("environment.") and k != "environment.kind"
    }

    try:
        cfg = ExperimentConfig(
            name=raw.get("experiment.name", "experiment"),
            env_kind=env_kind,
            env_params=env_params,
            learner_kind=learner_kind,
            eta=eta,
            doubling=doubling,
            feedback=raw.get("learner.feedback", "bandit"),
            mode=raw.get("learner.mode", "min-loss"),
            T=int(need("run.T")),
            K=int(raw.get("run.K", "0")),
            seed=int(need("run.seed")),
            replicas=int(raw.get("run.replicas", "1")),
            raw=raw,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.T < 1 or cfg.replicas < 1:
        raise ConfigError("run.T and run.replicas must be >= 1")
    return cfg


def load_config(path) -> ExperimentConfig:
    return parse_config_text(Path(path).read_text())


def _floats(value: str) -> list[float]:
    return [float(x) for x in value.split(",")]


def _resolve_graph(spec: str, K: int) -> GraphSpec:
    if spec == "clique":
        return GraphSpec(K, tuple((i, j) for i in range(K) for j in range(i + 1, K)))
    if spec == "path":
        return GraphSpec(K, tuple((i, i + 1) for i in range(K - 1)))
    if spec.startswith("octopus:"):
        k, d = (int(x) for x in spec.split(":", 1)[1].split(","))
        from .spectral import octopus
        return octopus(k, d)
    if os.path.exists(spec):
        return GraphSpec.from_text(Path(spec).read_text())
    raise ConfigError(f"unknown graph spec {spec!r}")


def build_environment(cfg: ExperimentConfig, rng: RngHandle) -> EnvironmentInstance:
    p = cfg.env_params
    kind = cfg.env_kind
    try:
        if kind == "bandit_lower":
            eps = _floats(p["eps"])
            if len(eps) == 1:
                eps = eps * cfg.K
            return bandit_lower_bound_env(eps, cfg.T, rng)
        if kind == "fullinfo_lower":
            eps = _floats(p["eps"])
            if len(eps) == 1:
                eps = eps * cfg.K
            return fullinfo_lower_bound_env(eps, cfg.T, rng)
        if kind == "octopus":
            return octopus_adversary(int(p["k"]), int(p["d"]), float(p["C"]), cfg.T, rng)
        if kind == "smooth_random":
            g = _resolve_graph(p.get("graph", "clique"), cfg.K)
            return smooth_random_env(g, float(p["C"]), cfg.T, rng,
                                     anchor_mode=p.get("anchor_mode", "min-loss"))
        if kind == "oscillating":
            delta = float(p["delta"]) if "delta" in p else None
            return oscillating_env(cfg.K, cfg.T, delta, rng)
        if kind == "interval_random":
            return interval_random_env(cfg.K, cfg.T, float(p["eps"]), rng,
                                       m_low=float(p.get("m_low", 0.4)),
                                       m_high=float(p.get("m_high", 0.6)),
                                       per_round_centers=p.get("centers", "round") == "round")
        if kind == "multicomponent_smooth":
            sizes = [int(x) for x in p["sizes"].split(",")]
            return multicomponent_smooth_env(sizes, float(p["C"]), cfg.T, rng)
    except KeyError as exc:
        raise ConfigError(f"environment {kind!r} missing parameter {exc}") from exc
    raise ConfigError(f"unknown environment kind {kind!r}")


def _check_compat(cfg: ExperimentConfig, env: EnvironmentInstance) -> None:
    if cfg.learner_kind == "hedge" and not env.full_info:
        raise ConfigError(f"hedge needs full-information feedback; {env.kind} is bandit-only")
    if cfg.learner_kind == "reduction" and env.side_m is None:
        raise ConfigError(f"reduction needs interval side information; {env.kind} has none")
    if cfg.learner_kind == "reduction" and cfg.feedback == "full" and not env.full_info:
        raise ConfigError(f"full-feedback reduction needs a full-information environment")
    if cfg.learner_kind == "anchored-exp3" and env.anchors is None:
        raise ConfigError(f"anchored-exp3 needs anchor values; {env.kind} publishes none")
    if cfg.learner_kind == "multicomponent" and env.component_anchors is None:
        raise ConfigError(f"multicomponent needs per-component anchors; {env.kind} has none")


def _make_bandit_learner(cfg: ExperimentConfig, n_arms: int):
    if cfg.doubling:
        return doubling_init(n_arms)
    return exp3_init(n_arms, cfg.eta)


def run_replica(cfg: ExperimentConfig, replica: int) -> tuple[RegretTrace, EnvironmentInstance, dict]:
    """One seeded replica: separate environment and learner streams, so the
    environment draws are untouched by the learner's sampling."""
    seed = cfg.seed + replica
    env = build_environment(cfg, RngHandle(seed, stream=0))
    env.seed = seed
    _check_compat(cfg, env)
    lrng = RngHandle(seed, stream=1)
    K = env.n_arms
    trace = RegretTrace(K)
    diagnostics = {}

    kind = cfg.learner_kind
    if kind == "exp3":
        learner = _make_bandit_learner(cfg, K)
        for t in range(cfg.T):
            dist = learner.distribution()
            arm = sample(dist, lrng)
            loss = env.loss(t, arm)
            learner = bandit_observe(learner, arm, loss, dist)
            trace.record(t, arm, loss, env.loss_vector(t))
    elif kind == "hedge":
        state = exp3_init(K, cfg.eta)
        for t in range(cfg.T):
            state, played = hedge_step(state, env.loss_vector(t))
            arm = sample(played, lrng)
            trace.record(t, arm, env.loss(t, arm), env.loss_vector(t))
    elif kind == "reduction":
        learner = (_make_bandit_learner(cfg, K) if cfg.feedback == "bandit"
                   else exp3_init(K, cfg.eta))
        for t in range(cfg.T):
            arm, learner = meta_round(learner, env.side_info(t), t, env, lrng,
                                      feedback=cfg.feedback)
            trace.record(t, arm, env.loss(t, arm), env.loss_vector(t))
    elif kind == "anchored-exp3":
        learner = _make_bandit_learner(cfg, K)
        bounds = []
        for t in range(cfg.T):
            arm, learner, diag = anchored_exp3_round(learner, t, env, cfg.mode, lrng)
            trace.record(t, arm, env.loss(t, arm), env.loss_vector(t), anchor=diag["anchor"])
            if "bound_min" in diag:
                bounds.append(diag["bound_min"])
        if bounds:
            diagnostics["mean_round_bound"] = float(np.mean(bounds))
    elif kind == "multicomponent":
        learner = _make_bandit_learner(cfg, K)
        for t in range(cfg.T):
            side = multicomponent_sideinfo(env.graph, env.component_anchors[t], env.budget)
            arm, learner = meta_round(learner, side, t, env, lrng, feedback="bandit")
            trace.record(t, arm, env.loss(t, arm), env.loss_vector(t))
    else:
        raise ConfigError(f"unknown learner kind {kind!r}")
    return trace, env, diagnostics


def _atomic_write(path: Path, body: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(body)
    os.replace(tmp, path)


def _fmt(x) -> str:
    if x is None:
        return ""
    return repr(float(x))


def run(cfg: ExperimentConfig, outdir=None) -> list[dict]:
    """Run all replicas; optionally write trace and summary CSVs.

    Reruns with the same config produce byte-identical CSV bodies; wall-clock
    readings live only in the JSON sidecar and the summary's seconds column.
    """
    rows = []
    trace_buf = io.StringIO()
    tw = csv.writer(trace_buf, lineterminator="\n")
    tw.writerow(TRACE_HEADER)
    for r in range(cfg.replicas):
        t0 = time.perf_counter()
        trace, env, diag = run_replica(cfg, r)
        seconds = time.perf_counter() - t0
        for (t, arm, loss, anchor), cum in zip(trace.rounds, trace.cum_regret):
            tw.writerow([r, t, arm, _fmt(loss), _fmt(anchor), _fmt(cum)])
        rows.append({
            "experiment": cfg.name,
            "learner": cfg.learner_kind + (":doubling" if cfg.doubling else f":eta={cfg.eta}"),
            "environment": env.kind,
            "replica": r,
            "final_regret": regret(trace),
            "seconds": seconds,
            **diag,
        })
    if outdir is not None:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        _atomic_write(outdir / f"{cfg.name}.trace.csv", trace_buf.getvalue())
        sbuf = io.StringIO()
        sw = csv.writer(sbuf, lineterminator="\n")
        sw.writerow(SUMMARY_HEADER)
        for row in rows:
            sw.writerow([row["experiment"], row["learner"], row["environment"],
                         row["replica"], _fmt(row["final_regret"]), f"{row['seconds']:.3f}"])
        _atomic_write(outdir / f"{cfg.name}.summary.csv", sbuf.getvalue())
        meta = {"config": cfg.raw, "written_at": time.time()}
        _atomic_write(outdir / f"{cfg.name}.meta.json", json.dumps(meta, indent=1))
    return rows


def sweep(configs: list[ExperimentConfig], outdir=None, slope_param: str | None = None) -> list[dict]:
    """Run a list of configs and aggregate final regret per cell.

    When ``slope_param`` names a config key (e.g. ``environment.eps``), a
    log-log least-squares slope of mean final regret against that parameter is
    attached to every row. When the sweep varies ``learner.eta``, the row with
    the smallest mean regret is flagged as best.
    """
    if not configs:
        raise ConfigError("sweep needs at least one config")
    cells = []
    for cfg in configs:
        rows = run(cfg, outdir=None)
        finals = np.array([row["final_regret"] for row in rows])
        se = float(finals.std(ddof=1) / math.sqrt(len(finals))) if len(finals) > 1 else 0.0
        cells.append({
            "experiment": cfg.name,
            "learner": rows[0]["learner"],
            "environment": rows[0]["environment"],
            "sweep_value": cfg.raw.get(slope_param, "") if slope_param else "",
            "replicas": len(finals),
            "mean_final_regret": float(finals.mean()),
            "se_final_regret": se,
            "slope": "",
            "best": "",
        })

    if slope_param:
        vals = [float(c["sweep_value"]) for c in cells if c["sweep_value"] != ""]
        means = [c["mean_final_regret"] for c in cells if c["sweep_value"] != ""]
        if len(set(vals)) >= 2 and all(v > 0 for v in vals) and all(m > 0 for m in means):
            slope = float(np.polyfit(np.log(vals), np.log(means), 1)[0])
            for c in cells:
                c["slope"] = slope
    etas = {cfg.raw.get("learner.eta") for cfg in configs}
    if len(etas) > 1:
        best = min(range(len(cells)), key=lambda i: cells[i]["mean_final_regret"])
        cells[best]["best"] = "best"

    if outdir is not None:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["experiment", "learner", "environment", "sweep_value", "replicas",
                    "mean_final_regret", "se_final_regret", "slope", "best"])
        for c in cells:
            w.writerow([c["experiment"], c["learner"], c["environment"], c["sweep_value"],
                        c["replicas"], _fmt(c["mean_final_regret"]), _fmt(c["se_final_regret"]),
                        _fmt(c["slope"]) if c["slope"] != "" else "", c["best"]])
        _atomic_write(outdir / "sweep.csv", buf.getvalue())
    return cells


# -- command line interface ---------------------------------------------------

def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    rows = run(cfg, outdir=args.out)
    for row in rows:
        print(f"{cfg.name} replica {row['replica']}: final regret {row['final_regret']:.6g}")
    return 0


def _cmd_sweep(args) -> int:
    paths = sorted(Path(args.config_dir).glob("*.cfg"))
    if not paths:
        raise ConfigError(f"no .cfg files under {args.config_dir}")
    cells = sweep([load_config(p) for p in paths], outdir=args.out, slope_param=args.slope_param)
    for c in cells:
        extra = f" slope={c['slope']:.3f}" if c["slope"] != "" else ""
        extra += " [best]" if c["best"] else ""
        print(f"{c['experiment']}: mean regret {c['mean_final_regret']:.6g} "
              f"+/- {c['se_final_regret']:.3g}{extra}")
    return 0


def _cmd_validate_env(args) -> int:
    cfg = load_config(args.config)
    env = build_environment(cfg, RngHandle(cfg.seed, stream=0))
    ok = True
    for name, passed, detail in env.validate():
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
        ok = ok and passed
    return 0 if ok else 1


def _cmd_export_env(args) -> int:
    cfg = load_config(args.config)
    env = build_environment(cfg, RngHandle(cfg.seed, stream=0))
    env.export_csv(args.out)
    print(f"wrote {args.out} and sidecar metadata")
    return 0


def _cmd_import_env(args) -> int:
    env = EnvironmentInstance.import_csv(args.csv)
    print(f"imported {env.kind}: T={env.T} K={env.n_arms}, validation passed")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="rangebandits",
                                     description="regret-minimization experiment runner")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one experiment config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("sweep", help="run every .cfg in a directory and aggregate")
    p.add_argument("--config-dir", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--slope-param", default=None)
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("validate-env", help="run environment truthfulness validators only")
    p.add_argument("--config", required=True)
    p.set_defaults(fn=_cmd_validate_env)

    p = sub.add_parser("export-env", help="export an environment instance as CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_export_env)

    p = sub.add_parser("import-env", help="import and validate a CSV environment instance")
    p.add_argument("--csv", required=True)
    p.set_defaults(fn=_cmd_import_env)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (AssertionError, ValueError) as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
