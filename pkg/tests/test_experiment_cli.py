import numpy as np
import pytest

from wealthex import cli
from wealthex.config import DEFAULT_CONFIG, SimConfig, load_config, parse_flat, write_config
from wealthex.engine import ExchangeRule
from wealthex.experiment import run_experiment, stream, sweep
from wealthex.presets import figure_preset

SMALL = SimConfig(n=40, mcs_budget=4000, realizations=3, stride=500, snapshot_times=(2000,))


def read_bundle(path):
    return {p.name: p.read_bytes() for p in sorted(path.iterdir())}


def test_bundle_is_deterministic(tmp_path):
    run_experiment(SMALL.with_(k_max=3), tmp_path / "a")
    run_experiment(SMALL.with_(k_max=3), tmp_path / "b")
    run_experiment(SMALL.with_(k_max=3, workers=2), tmp_path / "c")
    a = read_bundle(tmp_path / "a")
    assert a == read_bundle(tmp_path / "b")
    c = read_bundle(tmp_path / "c")
    # meta records the worker count; everything else must match byte for byte
    assert {k: v for k, v in a.items() if k != "meta"} == {k: v for k, v in c.items() if k != "meta"}
    assert set(a) == {"series.csv", "snapshot_2000.csv", "snapshot_4000.csv", "tc.csv",
                      "fits.csv", "meta"}
    run_experiment(SMALL.with_(k_max=3, seed=1), tmp_path / "d")
    assert read_bundle(tmp_path / "d")["series.csv"] != a["series.csv"]


def test_bundle_contents(tmp_path):
    res = run_experiment(SMALL.with_(kind="multiplicative"), tmp_path)
    assert res.conserved
    series = (tmp_path / "series.csv").read_text().splitlines()
    assert series[0] == "t,entropy,poverty" and len(series) == 1 + 9
    snap = (tmp_path / "snapshot_4000.csv").read_text().splitlines()
    assert snap[0] == "wealth,count,wealth_over_mean"
    rows = [tuple(map(float, r.split(","))) for r in snap[1:]]
    assert sum(c for _, c, _ in rows) == 3 * 40
    assert sum(w * c for w, c, _ in rows) == 3 * 40 * 100
    meta = (tmp_path / "meta").read_text()
    assert "code_version = " in meta and "conserved = True" in meta and "seed = 0" in meta
    assert load_config(tmp_path / "meta").with_(workers=1) == SMALL.with_(kind="multiplicative")
    assert (tmp_path / "tc.csv").read_text().startswith("realization,t_c,mean_degree\n")
    assert b"\r" not in (tmp_path / "series.csv").read_bytes()


def test_degenerate_bundle(tmp_path):
    res = run_experiment(SimConfig(n=10, mcs_budget=0, realizations=1), tmp_path)
    assert res.final_histogram.counts == {100: 10}
    assert (tmp_path / "snapshot_0.csv").read_text().splitlines()[1:] == ["100,10,1"]


def test_sub_streams_are_distinct():
    firsts = [stream(0, r, 1).random(10_000) for r in range(100)]
    seen = set()
    for arr in firsts:
        vals = set(arr.tolist())
        assert not vals & seen
        seen |= vals
    assert not np.array_equal(stream(0, 0, 0).random(10), stream(0, 0, 1).random(10))


def test_sweep_rows_do_not_depend_on_order():
    base = SimConfig(n=20, mcs_budget=2_000_000, realizations=4, stride=100_000)
    a = sweep(base, "dw", [34, 40, 50])
    b = sweep(base, "dw", [50, 34, 40])
    by_value = {r.value: r for r in b.rows}
    for r in a.rows:
        assert by_value[r.value] == r
    assert [r.min_ex for r in a.rows] == [2, 2, 2]
    assert all(r.n_reached == 4 for r in a.rows)


def test_sweep_n_fits_scaling(tmp_path):
    base = SimConfig(n=20, mcs_budget=5_000_000, realizations=5, stride=100_000)
    res = sweep(base, "n", [10, 20, 40], tmp_path)
    assert res.scaling is not None and 1.0 < res.scaling.p2 < 3.0
    assert (tmp_path / "sweep.csv").exists() and (tmp_path / "fits.csv").exists()


def test_sweep_flags_unreached_rows(caplog):
    base = SimConfig(n=30, mcs_budget=50, realizations=2, stride=50)
    res = sweep(base, "n", [10, 20, 30])
    assert all(r.flagged for r in res.rows)
    assert res.scaling is None
    assert "did not condense" in caplog.text


def test_sweep_kmax_reports_b():
    res = sweep(SimConfig(n=60, mcs_budget=20000, realizations=2), "kmax", [3, 20])
    assert all(r.b is not None and r.b > 0 for r in res.rows)


def test_multiplicative_dw_maps_to_nu():
    res = sweep(SimConfig(n=10, mcs_budget=2_000_000, realizations=2, stride=10**5,
                          rule=ExchangeRule("multiplicative")), "dw", [40])
    assert res.rows[0].min_ex is None and res.rows[0].n_reached == 2


def test_unknown_sweep_param():
    with pytest.raises(ValueError):
        sweep(SMALL, "temperature", [1])


def test_config_file_round_trip(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("# comment\nn = 50\nrule = multiplicative\nnu = 0.3\nnetwork = 4\n"
                 "bankruptcy = yes\nsnapshot_times = 100,200\nmcs_budget = 1e3\n")
    cfg = load_config(p)
    assert (cfg.n, cfg.rule.kind, cfg.rule.nu, cfg.k_max) == (50, "multiplicative", 0.3, 4)
    assert cfg.rule.bankruptcy and cfg.snapshot_times == (100, 200) and cfg.mcs_budget == 1000
    write_config(cfg, tmp_path / "out.cfg")
    assert load_config(tmp_path / "out.cfg") == cfg
    assert parse_flat({"network": "full"}) == {"k_max": None}
    with pytest.raises(ValueError):
        parse_flat({"colour": "red"})


@pytest.mark.parametrize("bad", [dict(n=1), dict(mean_w=0), dict(mcs_budget=-1), dict(realizations=0),
                                 dict(k_max=500), dict(snapshot_times=(10**7,))])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        DEFAULT_CONFIG.with_(**bad)


def test_presets():
    fig8 = figure_preset("fig8")
    k2 = dict(fig8.runs)["kmax2"]
    assert k2.k_max == 2 and k2.rule.kind == "additive" and 399000 in k2.snapshot_times
    fig3 = dict(figure_preset("fig3").runs)
    assert {c.rule.kind for c in fig3.values()} == {"additive", "multiplicative"}
    assert all(c.rule.bankruptcy and c.fully_connected for c in fig3.values())
    assert figure_preset("tables").kind == "tables"
    for cfg in dict(figure_preset("fig2").runs).values():
        assert (cfg.n, cfg.mean_w, cfg.realizations, cfg.mcs_budget) == (500, 100, 100, 400_000)
    with pytest.raises(ValueError):
        figure_preset("fig99")


def test_cli_simulate_config_and_overrides(tmp_path, capsys):
    cfgf = tmp_path / "c.cfg"
    cfgf.write_text("n = 30\nmcs_budget = 2000\nrealizations = 2\nseed = 5\n")
    out = tmp_path / "run"
    rc = cli.main(["simulate", "--config", str(cfgf), "--seed", "6", "--kmax", "3",
                   "--snapshots", "1000", "--out", str(out)])
    assert rc == 0
    meta = (out / "meta").read_text()
    assert "seed = 6" in meta and "network = 3" in meta and "n = 30" in meta
    assert (out / "snapshot_1000.csv").exists()
    assert "conserved=True" in capsys.readouterr().out


def test_cli_sweep(tmp_path, capsys):
    rc = cli.main(["sweep", "--param", "dw", "--values", "34,50", "--n", "15",
                   "--realizations", "2", "--mcs", "1000000", "--stride", "100000",
                   "--out", str(tmp_path)])
    assert rc == 0
    text = capsys.readouterr().out
    assert text.startswith("value,mean_t_c") and "\n34," in text and "\n50," in text


def test_cli_tables(tmp_path, capsys):
    assert cli.main(["tables", "--kmax", "2,3"]) == 0
    out = capsys.readouterr().out
    assert "2,3/2,1," in out and "3,2,8/3," in out and "2,7,56/729,8/729," in out
    assert cli.main(["tables", "--out", str(tmp_path)]) == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["table_ps.csv", "table_u.csv", "table_z.csv"]
    u = (tmp_path / "table_u.csv").read_text()
    assert "\n3,0.333333333333,1/3," in u


def test_cli_preset_components(tmp_path):
    assert cli.main(["preset", "fig12", "--realizations", "2", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "fig12" / "components.csv").read_text().splitlines()
    assert lines[0] == "k_max,mean_degree,s,count,chi_emp"
    assert {ln.split(",")[0] for ln in lines[1:]} == {"2", "3", "4", "20"}


def test_cli_errors(capsys):
    assert cli.main(["simulate", "--n", "1"]) == 2
    assert "error:" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        cli.main(["preset", "fig99"])
