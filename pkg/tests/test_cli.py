import json

import pytest

from twinpol.cli import RunConfig, main, run
from twinpol.errors import ConfigError

THREE_LEVEL_HEADER = """\
[three_level]
e1 = 2e-3 au
e2 = 10e-3 au

[cavity]
omega_c = 1e-2 au
g = 2e-4 au
dse = off
n_fock_max = 2
"""


def write(tmp_path, body, name="run.cfg"):
    path = tmp_path / name
    path.write_text(body)
    return path


def test_validate_resolves_defaults(tmp_path, capsys):
    cfg = write(tmp_path, THREE_LEVEL_HEADER + "\n[protocol]\nframework = quantum_static\n")
    assert main(["validate", str(cfg)]) == 0
    resolved = json.loads(capsys.readouterr().out)
    assert resolved["cavity"]["n_fock_max"] == 2
    assert resolved["cavity"]["dse"] is False
    assert resolved["protocol"]["initial"] == "ground"


def test_unknown_key_is_config_error(tmp_path, capsys):
    cfg = write(tmp_path, THREE_LEVEL_HEADER + "\n[protocol]\nframwork = typo\n")
    assert main(["validate", str(cfg)]) == 2
    assert "framwork" in capsys.readouterr().err


def test_unit_mismatch_is_config_error(tmp_path):
    cfg = write(tmp_path, "[three_level]\ne1 = 2e-3 parsec\n")
    with pytest.raises(ConfigError, match="parsec"):
        RunConfig.from_file(cfg)


def test_unknown_initial_names_valid_labels(tmp_path, capsys):
    cfg = write(tmp_path, THREE_LEVEL_HEADER
                + "\n[protocol]\nframework = quantum_td\ninitial = psi_3\n")
    assert main(["validate", str(cfg)]) == 2
    err = capsys.readouterr().err
    assert "psi_3" in err and "psi0" in err


def test_sweep_requires_g_list(tmp_path, capsys):
    cfg = write(tmp_path, THREE_LEVEL_HEADER + "\n[protocol]\nframework = quantum_static\n")
    assert main(["sweep", str(cfg)]) == 2


def test_static_run_and_determinism(tmp_path):
    cfg = write(tmp_path, THREE_LEVEL_HEADER + """
[protocol]
framework = quantum_static
initial = ground

[output]
directory = out
""")
    assert main(["run", str(cfg), "--out-dir", str(tmp_path / "a")]) == 0
    assert main(["run", str(cfg), "--out-dir", str(tmp_path / "b")]) == 0
    a = (tmp_path / "a" / "sticks.csv").read_bytes()
    b = (tmp_path / "b" / "sticks.csv").read_bytes()
    assert a == b
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert manifest["outputs"] == ["sticks.csv"]
    assert len(manifest["model_hash"]) == 40


def test_manifest_reruns_identically(tmp_path):
    cfg = write(tmp_path, THREE_LEVEL_HEADER + """
[protocol]
framework = classical
initial = psi_1
t_end = 2e4 au
dt = 1.0 au
record_stride = 20
""")
    run(RunConfig.from_file(cfg), tmp_path / "first")
    manifest = json.loads((tmp_path / "first" / "manifest.json").read_text())
    run(RunConfig.from_manifest(manifest), tmp_path / "second")
    for name in ("trajectory.csv", "spectrum.csv", "peaks.json"):
        assert (tmp_path / "first" / name).read_bytes() == \
               (tmp_path / "second" / name).read_bytes()


def test_quantum_td_run_outputs(tmp_path):
    cfg = write(tmp_path, THREE_LEVEL_HEADER + """
[protocol]
framework = quantum_td
initial = psi_0
t_end = 1e4 au
dt = 1.0 au
record_stride = 10
""")
    assert main(["run", str(cfg), "--out-dir", str(tmp_path / "o")]) == 0
    header = (tmp_path / "o" / "trajectory.csv").read_text().splitlines()[0]
    assert header.startswith("t,mu,q_expect,q2_expect,p_psi0;N0")
    peaks = json.loads((tmp_path / "o" / "peaks.json").read_text())
    assert "bin_width_au" in peaks


def test_g_sweep_table_and_fit(tmp_path):
    cfg = write(tmp_path, """\
[three_level]
e1 = 2e-3 au
e2 = 10e-3 au

[cavity]
omega_c = 1e-2 au
g_sweep = 0.5e-4 au, 1e-4 au, 1.5e-4 au, 2e-4 au
dse = off

[protocol]
framework = quantum_static
initial = ground
""")
    assert main(["sweep", str(cfg), "--out-dir", str(tmp_path / "sw")]) == 0
    table = (tmp_path / "sw" / "sweep_table.csv").read_text().splitlines()
    assert table[0] == "g,r_splitting,p_splitting"
    assert len(table) == 5
    summary = json.loads((tmp_path / "sw" / "sweep_summary.json").read_text())
    assert summary["fit"]["slope_r"] == pytest.approx(2.0, rel=0.01)
    assert summary["fit"]["r2_r"] > 0.999
    assert (tmp_path / "sw" / "g_003" / "sticks.csv").exists()


def test_manymol_frameworks(tmp_path):
    cfg = write(tmp_path, THREE_LEVEL_HEADER + """
[protocol]
framework = manymol_analytic
initial = thermal
n0 = 2
n_mol = 4
""")
    assert main(["run", str(cfg), "--out-dir", str(tmp_path / "mm")]) == 0
    header = (tmp_path / "mm" / "sticks.csv").read_text().splitlines()[0]
    assert header == ("omega_cm1,omega_au,intensity,label_i,label_f,"
                      "n_mol,n0,branch,mechanism")


def test_plot_data_flag(tmp_path):
    cfg = write(tmp_path, THREE_LEVEL_HEADER + """
[protocol]
framework = quantum_static
initial = ground
""")
    assert main(["run", str(cfg), "--out-dir", str(tmp_path / "pd"),
                 "--plot-data"]) == 0
    lines = (tmp_path / "pd" / "sticks_plot.dat").read_text().splitlines()
    assert all(len(line.split()) == 2 for line in lines)
    assert max(float(line.split()[1]) for line in lines) == 1.0


def test_thermo_limit_framework(tmp_path):
    cfg = write(tmp_path, THREE_LEVEL_HEADER + """
[protocol]
framework = thermo_limit
initial = thermal
r0 = 0.5
""")
    assert main(["run", str(cfg), "--out-dir", str(tmp_path / "tl")]) == 0
    rows = (tmp_path / "tl" / "sticks.csv").read_text().splitlines()
    assert len(rows) == 4    # dark stick plus the split resonant doublet


def test_export_model(tmp_path, capsys):
    cfg = write(tmp_path, THREE_LEVEL_HEADER)
    assert main(["export-model", str(cfg), "--out-dir", str(tmp_path / "m")]) == 0
    doc = json.loads((tmp_path / "m" / "model.json").read_text())
    assert doc["energies"] == [0.0, 2e-3, 10e-3]


def test_numerical_failure_exit_code(tmp_path, capsys):
    # dt far too coarse for the fastest phase -> numerical failure, code 3
    cfg = write(tmp_path, THREE_LEVEL_HEADER + """
[protocol]
framework = classical
initial = psi_0
t_end = 1e3 au
dt = 50.0 au
""")
    assert main(["run", str(cfg), "--out-dir", str(tmp_path / "x")]) == 3
    assert (tmp_path / "x" / "error.txt").exists()


def test_seedless_check(tmp_path, capsys):
    cfg = write(tmp_path, THREE_LEVEL_HEADER + """
[protocol]
framework = manymol_analytic
initial = symmetric
n_mol = 3
""")
    assert main(["run", str(cfg), "--out-dir", str(tmp_path / "sc"),
                 "--seedless-check"]) == 0
    assert "determinism check passed" in capsys.readouterr().out
