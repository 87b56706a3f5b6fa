import json
import math
import xml.etree.ElementTree as ET
from dataclasses import replace

import pytest
import yaml

from safeherd.batch import run_batch
from safeherd.cli import main, parse_seeds
from safeherd.export import csv_columns, fmt, outcome_dict, read_csv, write_csv, write_outcome
from safeherd.scenario import ScenarioError, dump_scenario, load_reference, load_scenario, parse_scenario, reference_path, to_dict
from safeherd.geometry import Vec2
from safeherd.sim import DONE, ESCORT, run, with_seed
from safeherd.svg import Style, apollonius_circles, emit_snapshots, render

SVG = "{http://www.w3.org/2000/svg}"


@pytest.fixture(scope="module")
def ref():
    return load_reference()


@pytest.fixture(scope="module")
def ref_run(ref):
    return run(ref)


def _write(tmp_path, doc, name="s.yaml"):
    p = tmp_path / name
    p.write_text(yaml.safe_dump(doc, sort_keys=False))
    return p


def test_reference_matches_parameter_table(ref):
    assert (ref.n, ref.eps_p, ref.k_p, ref.alpha_hat) == (3, 0.5, 2.0, 0.65)
    assert (ref.V_D, ref.V_A, ref.dt) == (3.0, 1.2, 0.05)
    assert ref.x_Pc == Vec2(5.0, 20.0) and ref.x_Tc == Vec2(20.0, 20.0)
    assert (ref.game.kappa, ref.game.K_inf) == (1.0, 0.8)
    assert ref.attacker.escape_range == 0.8
    assert ref.plan.Gamma_ect == ref.capture.Gamma_cap == 8.0


def test_round_trip_identity(ref):
    text = dump_scenario(ref)
    again = parse_scenario(text)
    assert again == ref
    assert dump_scenario(again) == text


def test_unknown_key_is_error():
    text = "sim:\n  dt: 0.05\n  epsilon_Q: 1.0\n"
    with pytest.raises(ScenarioError) as ei:
        parse_scenario(text)
    assert "epsilon_Q" in str(ei.value)
    assert ei.value.line == 3


def test_syntax_error_has_position():
    with pytest.raises(ScenarioError) as ei:
        parse_scenario("sim:\n  dt: [0.05\n")
    assert ei.value.line is not None and ei.value.column is not None


def test_infeasible_speed_ratio(tmp_path, ref):
    doc = to_dict(ref)
    doc["formation"]["alpha_hat"] = 0.3
    with pytest.raises(ScenarioError) as ei:
        load_scenario(_write(tmp_path, doc))
    assert "V_A/V_D" in str(ei.value)


def test_partial_file_takes_defaults(tmp_path):
    cfg = load_scenario(_write(tmp_path, {"speeds": {"V_D": 3.0, "V_A": 1.2}}))
    assert cfg.dt == 0.05 and cfg.n == 3


def test_csv_export(tmp_path, ref, ref_run):
    log, _ = ref_run
    p = write_csv(log, tmp_path / "traj.csv")
    rows = read_csv(p)
    assert len(rows) == len(log)
    assert list(rows[0]) == csv_columns(ref.n)
    for rec, row in zip(log.records, rows):
        assert row["stage"] == rec.stage
        for key, val in (("t", rec.t), ("xA.x", rec.attacker.x), ("D2.y", rec.defenders[2].y), ("vFc.x", rec.v_fc.x)):
            assert row[key] == float(fmt(val))
            assert math.isclose(row[key], val, rel_tol=1e-8, abs_tol=1e-300)
        if rec.J is not None:
            assert all(math.isclose(row[f"J{i}"], j, rel_tol=1e-8, abs_tol=1e-300) for i, j in enumerate(rec.J))
        else:
            assert row["J0"] is None


def test_csv_locale_independent_format():
    assert fmt(1234567.891234) == "1234567.89"
    assert fmt(0.1 + 0.2) == "0.3"
    assert "," not in fmt(1e20)


def test_outcome_json(tmp_path, ref_run):
    _, out = ref_run
    p = write_outcome(out, tmp_path / "o.json")
    d = json.loads(p.read_text())
    assert d["status"] == DONE and d["T_f1"] == out.T_f1 and d["T_f2"] == out.T_f2
    assert d["violations"] == [] and d["min_J"] == out.min_J
    assert outcome_dict(replace(out, min_clearance=math.inf))["min_clearance"] is None


def test_snapshots(tmp_path, ref, ref_run):
    log, out = ref_run
    assert emit_snapshots(log, [], ref, tmp_path / "none") == []
    assert not (tmp_path / "none").exists()
    with pytest.raises(ValueError):
        emit_snapshots(log, [out.T_f2 + 10.0], ref, tmp_path)
    paths = emit_snapshots(log, [0.0, out.T_f1, 30.0], ref, tmp_path)
    assert [p.name for p in paths] == ["snapshot_t00000.00.svg", "snapshot_t00006.75.svg", "snapshot_t00030.00.svg"]


def test_snapshot_at_formation_shows_ring(ref, ref_run):
    log, out = ref_run
    style = Style()
    root = ET.fromstring(render(log, out.T_f1, ref, style))
    circles = root.findall(f"{SVG}circle")
    prot = circles[0]
    px, py = float(prot.get("cx")), float(prot.get("cy"))
    rec = log.at_time(out.T_f1)
    eps_d = ref.formation().eps_d
    dots = [c for c in circles if c.get("r") == "4" and c.get("fill") == style.defender]
    assert len(dots) == ref.n
    for c in dots:
        x = ref.x_Pc.x + (float(c.get("cx")) - px) / style.scale
        y = ref.x_Pc.y - (float(c.get("cy")) - py) / style.scale
        assert abs(Vec2(x, y).dist(rec.pc_center) - eps_d) < ref.arrival_tol + 1e-3


def test_apollonius_circles_clear_their_edges(ref, ref_run):
    log, _ = ref_run
    for rec in log.records:
        if rec.stage != ESCORT:
            continue
        n = len(rec.beacons)
        for i, c in enumerate(apollonius_circles(rec, ref.alpha_hat)):
            a, b = rec.beacons[i], rec.beacons[(i + 1) % n]
            d = b - a
            dist = abs(d.cross(Vec2(c.cx, c.cy) - a)) / d.norm()
            assert dist > c.r


def test_batch_same_seed_identical(ref):
    cfg = replace(ref, max_time=20.0)
    s = run_batch(cfg, [7, 7])
    assert s.outcomes[0] == s.outcomes[1]


def test_batch_seed_order_invariant(ref):
    cfg = replace(ref, max_time=12.0)
    a, b = run_batch(cfg, [3, 1, 2]), run_batch(cfg, [2, 3, 1])
    assert a.outcomes == b.outcomes
    assert (a.n_done, a.min_J, a.max_funnel) == (b.n_done, b.min_J, b.max_funnel)


def test_batch_rejects_empty(ref):
    with pytest.raises(ValueError):
        run_batch(ref, [])


def test_free_space_escort_is_faster(ref, ref_run):
    _, obstructed = ref_run
    _, free = run(replace(ref, obstacles=()))
    assert obstructed.status == free.status == DONE
    assert free.T_f2 < obstructed.T_f2


def test_parse_seeds():
    assert parse_seeds("1..4") == [1, 2, 3, 4]
    assert parse_seeds("5,2") == [5, 2]
    with pytest.raises(ValueError):
        parse_seeds("4..1")


def test_cli_exit_codes(tmp_path, ref, capsys):
    good = str(reference_path())
    assert main(["validate", good]) == 0
    assert main(["params", good]) == 0
    assert "eps_D        1.315903" in capsys.readouterr().out
    bad = tmp_path / "bad.yaml"
    bad.write_text("sim:\n  bogus: 1\n")
    assert main(["validate", str(bad)]) == 1
    assert main(["validate", str(tmp_path / "missing.yaml")]) == 3
    doc = to_dict(ref)
    doc["attacker"]["start"] = [5.0, 17.3]
    assert main(["run", str(_write(tmp_path, doc, "entry.yaml"))]) == 2
    assert '"failure": "protected_area_entry"' in capsys.readouterr().out


def test_cli_run_exports(tmp_path, ref):
    doc = to_dict(ref)
    doc["sim"]["max_time"] = 10.0
    scen = _write(tmp_path, doc)
    out_dir = tmp_path / "out"
    code = main(["run", str(scen), "--seed", "4", "--export-dir", str(out_dir), "--snapshots", "0,5"])
    assert code == 2  # stops at max_time before reaching the target
    assert (out_dir / "trajectory.csv").exists() and (out_dir / "outcome.json").exists()
    assert len(list(out_dir.glob("snapshot_*.svg"))) == 2
    assert json.loads((out_dir / "outcome.json").read_text())["status"] == "timeout"


def test_cli_batch(tmp_path, ref, capsys):
    doc = to_dict(ref)
    doc["sim"]["max_time"] = 5.0
    assert main(["batch", str(_write(tmp_path, doc)), "--seeds", "1..2"]) == 2
    assert "done 0/2" in capsys.readouterr().out
    assert main(["batch", str(reference_path()), "--seeds", "3..1"]) == 1


def test_validated_scenarios_can_step(ref):
    for seed in (1, 2):
        log, _ = run(replace(with_seed(ref, seed), max_time=1.0))
        assert len(log) == 21
