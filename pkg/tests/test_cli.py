import time

import pytest

from icsrs.cli import EXIT_COMPUTE, EXIT_CONFIG, EXIT_IO, EXIT_OK, main
from icsrs.config import RECIPE_NAMES


def read_table(path):
    lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
    header = lines[0].split(",")
    rows = [[float(x) for x in l.split(",")] for l in lines[1:]]
    return header, rows


def column(header, rows, name):
    i = header.index(name)
    return [r[i] for r in rows]


def test_run_fig4_writes_csv(tmp_path, capsys):
    out = tmp_path / "fig4.csv"
    assert main(["run", "fig4", str(out)]) == EXIT_OK
    text = out.read_text()
    assert text.startswith("# icsrs ")
    assert "# name = fig4" in text
    header, rows = read_table(out)
    assert header[0] == "length_km"
    assert "forward_icsrs_mw_per_nm" in header and "forward_icsrs_dbm_per_nm" in header
    assert len(rows) == 100
    fwd = column(header, rows, "forward_icsrs_mw_per_nm")
    peak_at = rows[fwd.index(max(fwd))][0]
    assert 37 <= peak_at <= 43
    assert "100 rows" in capsys.readouterr().out


def test_run_fig7_single_core_peak(tmp_path):
    out = tmp_path / "fig7.csv"
    assert main(["run", "fig7", str(out), "--quiet"]) == EXIT_OK
    header, rows = read_table(out)
    fsrs = column(header, rows, "forward_srs_mw_per_nm")
    assert 19 <= rows[fsrs.index(max(fsrs))][0] <= 21


def test_step_override(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["run", "fig4", str(out), "--step", "0.5", "--quiet"]) == EXIT_OK
    _, rows = read_table(out)
    assert len(rows) == 199
    assert rows[1][0] - rows[0][0] == pytest.approx(0.5)


def test_step_rejected_on_log_sweep(tmp_path, capsys):
    assert main(["run", "fig3", str(tmp_path / "x.csv"), "--step", "0.1"]) == EXIT_CONFIG
    assert "--step" in capsys.readouterr().err
    assert main(["run", "fig4", str(tmp_path / "x.csv"), "--step", "-1"]) == EXIT_CONFIG


def test_gnuplot_script(tmp_path):
    out = tmp_path / "fig3.csv"
    assert main(["run", "fig3", str(out), "--gnuplot", "--quiet"]) == EXIT_OK
    gp = (tmp_path / "fig3.gp").read_text()
    assert "set logscale x" in gp and "'fig3.csv' using 1:" in gp


def test_deterministic_bytes(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["run", "fig5", str(a), "--quiet"])
    main(["run", "fig5", str(b), "--quiet"])
    assert a.read_bytes() == b.read_bytes()


def test_bad_config_exit_code(tmp_path, capsys):
    cfg = tmp_path / "bad.toml"
    cfg.write_text("[link]\nlength_km = -1\n")
    assert main(["run", str(cfg), str(tmp_path / "o.csv")]) == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "link.length_km" in err and "sweep: missing section" in err
    assert not (tmp_path / "o.csv").exists()


def test_unknown_target(tmp_path):
    assert main(["run", "nothing-here", str(tmp_path / "o.csv")]) == EXIT_CONFIG


def test_compute_failure_exit_code(tmp_path, capsys):
    cfg = tmp_path / "dead.toml"
    cfg.write_text(
        "[link]\nlength_km = 10.0\nalpha_c_per_km = 0.05\nalpha_q_per_km = 0.05\nh_ij_per_m = 1e-6\n"
        "[receiver]\ndet_efficiency = 0.0\ndark_count_prob = 0.0\n"
        "[plan]\nquantum_wavelength_nm = 1550.0\nchannels = [{ wavelength_nm = 1530.0, power_mw = 0.0 }]\n"
        "[profile]\neta_per_km_nm = 6e-9\n"
        "[sweep]\nvariable = \"length\"\nlo = 1.0\nhi = 2.0\npoints = 2\n"
    )
    assert main(["run", str(cfg), str(tmp_path / "o.csv")]) == EXIT_COMPUTE
    assert "computation failed" in capsys.readouterr().err


def test_io_failure_exit_code(tmp_path):
    assert main(["run", "fig4", str(tmp_path / "missing" / "o.csv"), "--quiet"]) == EXIT_IO


def test_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2


def test_list_recipes(capsys):
    assert main(["list-recipes"]) == EXIT_OK
    out = capsys.readouterr().out
    for name in RECIPE_NAMES:
        assert name in out


def test_validate(tmp_path, capsys):
    assert main(["validate", "fig6"]) == EXIT_OK
    assert "16 channel(s)" in capsys.readouterr().out
    cfg = tmp_path / "c.toml"
    cfg.write_text("[sweep]\npoints = 0\n")
    assert main(["validate", str(cfg)]) == EXIT_CONFIG


def test_lenient_flag(tmp_path, capsys):
    from icsrs.config import recipe_text
    cfg = tmp_path / "x.toml"
    cfg.write_text(recipe_text("fig4").replace("[link]", "[link]\nnote = 'x'"))
    assert main(["validate", str(cfg)]) == EXIT_CONFIG
    assert main(["validate", str(cfg), "--lenient"]) == EXIT_OK
    assert "unknown key (ignored)" in capsys.readouterr().err


def test_regime_warning_in_output(tmp_path, capsys):
    out = tmp_path / "fig6.csv"
    assert main(["run", "fig6", str(out)]) == EXIT_OK
    assert "# warning = noise click probability above 0.1" in out.read_text()
    assert "exceeded 0.1" in capsys.readouterr().err


@pytest.mark.parametrize("name", RECIPE_NAMES)
def test_each_recipe_is_fast(tmp_path, name):
    start = time.perf_counter()
    assert main(["run", name, str(tmp_path / f"{name}.csv"), "--quiet"]) == EXIT_OK
    assert time.perf_counter() - start < 10.0
