import numpy as np
import pytest

from rangebandits.harness import (
    ConfigError,
    main,
    parse_config_text,
    run,
    run_replica,
    sweep,
)

BASIC = """
# a minimal bandit experiment
experiment.name = demo
environment.kind = interval_random
environment.eps = 0.1
learner.kind = exp3
learner.eta = 0.2
run.T = 30
run.K = 3
run.seed = 5
run.replicas = 2
"""


def test_parse_basic_config():
    cfg = parse_config_text(BASIC)
    assert cfg.name == "demo"
    assert cfg.env_kind == "interval_random"
    assert cfg.env_params == {"eps": "0.1"}
    assert cfg.learner_kind == "exp3"
    assert cfg.eta == 0.2 and not cfg.doubling
    assert (cfg.T, cfg.K, cfg.seed, cfg.replicas) == (30, 3, 5, 2)


def test_parse_doubling_eta():
    cfg = parse_config_text(BASIC.replace("learner.eta = 0.2", "learner.eta = doubling"))
    assert cfg.doubling and cfg.eta is None


@pytest.mark.parametrize("mangle", [
    lambda s: s.replace("environment.kind = interval_random", ""),
    lambda s: s.replace("run.T = 30", ""),
    lambda s: s.replace("interval_random", "lottery"),
    lambda s: s.replace("exp3", "ucb"),
    lambda s: s.replace("learner.eta = 0.2", "learner.eta = -1"),
    lambda s: s + "\nthis line has no equals sign",
    lambda s: s.replace("run.T = 30", "run.T = zero"),
])
def test_parse_rejects_bad_configs(mangle):
    with pytest.raises(ConfigError):
        parse_config_text(mangle(BASIC))


def test_parse_rejects_doubling_hedge():
    text = BASIC.replace("learner.kind = exp3", "learner.kind = hedge")
    text = text.replace("learner.eta = 0.2", "learner.eta = doubling")
    with pytest.raises(ConfigError):
        parse_config_text(text)


def test_incompatible_learner_environment_pairs():
    # hedge on a bandit-only environment
    text = BASIC.replace("interval_random", "oscillating")
    text = text.replace("environment.eps = 0.1", "environment.delta = 0.1")
    text = text.replace("learner.kind = exp3", "learner.kind = hedge")
    with pytest.raises(ConfigError):
        run_replica(parse_config_text(text), 0)
    # anchored-exp3 where no anchors are published
    text = BASIC.replace("learner.kind = exp3", "learner.kind = anchored-exp3")
    with pytest.raises(ConfigError):
        run_replica(parse_config_text(text), 0)


def test_run_writes_deterministic_trace(tmp_path):
    cfg = parse_config_text(BASIC)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    rows1 = run(cfg, outdir=out1)
    rows2 = run(cfg, outdir=out2)
    assert (out1 / "demo.trace.csv").read_bytes() == (out2 / "demo.trace.csv").read_bytes()
    assert [r["final_regret"] for r in rows1] == [r["final_regret"] for r in rows2]
    # summaries agree except for the wall-clock column
    s1 = [ln.rsplit(",", 1)[0] for ln in (out1 / "demo.summary.csv").read_text().splitlines()]
    s2 = [ln.rsplit(",", 1)[0] for ln in (out2 / "demo.summary.csv").read_text().splitlines()]
    assert s1 == s2


def test_replicas_vary_but_reseed_reproducibly():
    cfg = parse_config_text(BASIC)
    t0, _, _ = run_replica(cfg, 0)
    t1, _, _ = run_replica(cfg, 1)
    t0b, _, _ = run_replica(cfg, 0)
    arms = lambda tr: [arm for (_, arm, _, _) in tr.rounds]
    assert arms(t0) == arms(t0b)
    assert arms(t0) != arms(t1)


def test_reduction_on_unit_interval_side_info_matches_plain_exp3():
    # Side information m = 1/2, eps = 1/2 says only "losses lie in [0, 1]":
    # the reduction must then behave exactly like the inner algorithm.
    common = BASIC.replace("environment.eps = 0.1",
                           "environment.eps = 0.5\n"
                           "environment.m_low = 0.5\nenvironment.m_high = 0.5")
    plain = parse_config_text(common)
    reduc = parse_config_text(common.replace("learner.kind = exp3",
                                             "learner.kind = reduction"))
    for rep in range(2):
        tp, ep, _ = run_replica(plain, rep)
        tr, er, _ = run_replica(reduc, rep)
        assert np.array_equal(ep.losses, er.losses)
        assert [a for (_, a, _, _) in tp.rounds] == [a for (_, a, _, _) in tr.rounds]


def test_sweep_single_cell_has_no_slope(tmp_path):
    cells = sweep([parse_config_text(BASIC)], outdir=tmp_path,
                  slope_param="environment.eps")
    assert len(cells) == 1 and cells[0]["slope"] == ""
    assert (tmp_path / "sweep.csv").exists()


def test_sweep_eta_grid_flags_exactly_one_best():
    configs = [
        parse_config_text(BASIC.replace("learner.eta = 0.2", f"learner.eta = {eta}")
                          .replace("experiment.name = demo", f"experiment.name = demo{j}"))
        for j, eta in enumerate((0.05, 0.2, 0.8))
    ]
    cells = sweep(configs)
    assert sum(1 for c in cells if c["best"] == "best") == 1


def test_sweep_slope_over_parameter():
    configs = []
    for eps in (0.05, 0.1, 0.2):
        text = BASIC.replace("environment.eps = 0.1", f"environment.eps = {eps}")
        text = text.replace("experiment.name = demo", f"experiment.name = e{eps}")
        configs.append(parse_config_text(text))
    cells = sweep(configs, slope_param="environment.eps")
    slopes = {c["slope"] for c in cells}
    assert len(slopes) == 1
    assert isinstance(next(iter(slopes)), float)


# -- command line -------------------------------------------------------------


def write_cfg(tmp_path, text, name="exp.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_cli_run_and_outputs(tmp_path, capsys):
    cfgpath = write_cfg(tmp_path, BASIC)
    assert main(["run", "--config", cfgpath, "--out", str(tmp_path / "out")]) == 0
    assert (tmp_path / "out" / "demo.trace.csv").exists()
    assert (tmp_path / "out" / "demo.summary.csv").exists()
    assert "final regret" in capsys.readouterr().out


def test_cli_validate_env_passes(tmp_path, capsys):
    cfgpath = write_cfg(tmp_path, BASIC)
    assert main(["validate-env", "--config", cfgpath]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out


def test_cli_missing_config_exits_2(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "nope.cfg")]) == 2


def test_cli_bad_config_exits_2(tmp_path, capsys):
    cfgpath = write_cfg(tmp_path, BASIC.replace("run.T = 30", ""))
    assert main(["run", "--config", cfgpath]) == 2


def test_cli_export_import_round_trip(tmp_path, capsys):
    cfgpath = write_cfg(tmp_path, BASIC)
    csvpath = str(tmp_path / "inst.csv")
    assert main(["export-env", "--config", cfgpath, "--out", csvpath]) == 0
    assert main(["import-env", "--csv", csvpath]) == 0
    assert "imported interval_random" in capsys.readouterr().out


def test_cli_import_tampered_instance_exits_1(tmp_path, capsys):
    cfgpath = write_cfg(tmp_path, BASIC)
    csvpath = tmp_path / "inst.csv"
    assert main(["export-env", "--config", cfgpath, "--out", str(csvpath)]) == 0
    lines = csvpath.read_text().splitlines()
    lines[1] = lines[1].rsplit(",", 1)[0] + ",7.0"  # loss far outside [0, 1]
    csvpath.write_text("\n".join(lines) + "\n")
    assert main(["import-env", "--csv", str(csvpath)]) == 1


def test_cli_sweep_over_directory(tmp_path, capsys):
    for j, eta in enumerate((0.1, 0.4)):
        text = BASIC.replace("learner.eta = 0.2", f"learner.eta = {eta}")
        text = text.replace("experiment.name = demo", f"experiment.name = demo{j}")
        write_cfg(tmp_path, text, name=f"demo{j}.cfg")
    assert main(["sweep", "--config-dir", str(tmp_path), "--out", str(tmp_path / "out")]) == 0
    assert (tmp_path / "out" / "sweep.csv").exists()
    assert "[best]" in capsys.readouterr().out
