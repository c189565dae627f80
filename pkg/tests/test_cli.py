from adrcsim.cli import EXIT_ASSERTION, EXIT_CONFIG, EXIT_DIVERGED, EXIT_OK, main

QUICK = """
name = quick
grid.tf = 0.5
grid.dt = 1e-3
observer.kind = {kind}
controller.td_bypass = true
initial.xhat1 = 0.5
"""


def test_list_scenarios(capsys):
    assert main(["list-scenarios"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "peaking-nleso" in out
    assert "disturbance-leso" in out


def test_run_scenario_file(tmp_path, capsys):
    cfg = tmp_path / "quick.cfg"
    cfg.write_text(QUICK.format(kind="nleso"), encoding="utf-8")
    assert main(["run", "--scenario", str(cfg), "--out", str(tmp_path)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "scenario: quick" in out
    assert (tmp_path / "quick.csv").exists()
    assert (tmp_path / "quick.report.txt").exists()
    assert (tmp_path / "quick.report.json").exists()
    header = (tmp_path / "quick.csv").read_text().splitlines()[0]
    assert header == "t,x1,x2,x3,xhat1,xhat2,xhat3,u0,v,y,yn,r,TL,d"


def test_run_rejects_unknown_scenario(capsys):
    assert main(["run", "--scenario", "does-not-exist"]) == EXIT_CONFIG
    assert "error:" in capsys.readouterr().err


def test_run_rejects_bad_file(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("plant.mass = 1.0\n", encoding="utf-8")
    assert main(["run", "--scenario", str(cfg)]) == EXIT_CONFIG


def test_run_overrides(tmp_path, capsys):
    cfg = tmp_path / "quick.cfg"
    cfg.write_text(QUICK.format(kind="nleso"), encoding="utf-8")
    code = main([
        "run", "--scenario", str(cfg), "--observer", "leso",
        "--omega0", "20", "--seed", "9", "--out", str(tmp_path),
    ])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "observer: leso" in out
    assert "omega0: 20" in out


def test_run_divergence_exit_code(tmp_path, capsys):
    cfg = tmp_path / "blow.cfg"
    cfg.write_text(
        "name = blow\ngrid.tf = 2\ngrid.dt = 1e-3\n"
        "observer.kind = leso\nobserver.omega0 = 3000\n",
        encoding="utf-8",
    )
    assert main(["run", "--scenario", str(cfg), "--out", str(tmp_path)]) == EXIT_DIVERGED
    out = capsys.readouterr().out
    assert "diverged: true" in out


def _write_reports(tmp_path, capsys):
    for kind in ("leso", "nleso"):
        cfg = tmp_path / f"q-{kind}.cfg"
        body = QUICK.format(kind=kind).replace("name = quick", f"name = q-{kind}")
        cfg.write_text(body, encoding="utf-8")
        assert main(["run", "--scenario", str(cfg), "--out", str(tmp_path)]) == EXIT_OK
    capsys.readouterr()
    return tmp_path / "q-nleso.report.txt", tmp_path / "q-leso.report.json"


def test_compare_reports(tmp_path, capsys):
    a_path, b_path = _write_reports(tmp_path, capsys)
    assert main(["compare", "--a", str(a_path), "--b", str(b_path)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "itae_ratio:" in out
    assert "verdict.itae:" in out


def test_compare_assertion_failure(tmp_path, capsys):
    a_path, b_path = _write_reports(tmp_path, capsys)
    code = main([
        "compare", "--a", str(a_path), "--b", str(b_path),
        "--max-ratio", "itae=1e-9",
    ])
    assert code == EXIT_ASSERTION
    assert "FAILED" in capsys.readouterr().out


def test_compare_incompatible_reports(tmp_path, capsys):
    a_path, _ = _write_reports(tmp_path, capsys)
    other = tmp_path / "other.cfg"
    other.write_text(
        "name = other\ngrid.tf = 0.5\ngrid.dt = 1e-3\ndisturbance.amplitude = 2\n"
        "disturbance.t_on = 0.25\n",
        encoding="utf-8",
    )
    assert main(["run", "--scenario", str(other), "--out", str(tmp_path)]) == EXIT_OK
    code = main([
        "compare", "--a", str(a_path), "--b", str(tmp_path / "other.report.txt")
    ])
    assert code == EXIT_CONFIG


def test_verify_transform(capsys):
    assert main(["verify-transform", "--dt", "1e-3"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "example.passed: true" in out
    assert "motor.passed: true" in out


def test_finite_time(capsys):
    assert main(["finite-time", "--k", "1", "--alpha", "0.5", "--e0", "1"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "analytic_settling: 2" in out
    assert "empirical_settling:" in out
