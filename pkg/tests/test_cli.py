import csv
import json

import pytest

from alignmech.agents import TieBreak
from alignmech.cli import main
from alignmech.config import ConfigError, ScenarioConfig, parse_config
from alignmech.core import CostFamily, Grid
from alignmech.engine import Scenario, run_game
from alignmech.mechanism import SchemeKind
from alignmech.report import OUTCOME_COLUMNS, render_outcomes, render_report, write_report
from alignmech.verify import VerificationReport


def test_parse_minimal_config_gives_defaults():
    cfg = parse_config("{}")
    assert cfg == ScenarioConfig()
    assert cfg.n_agents == 3 and cfg.theta_max == 4.0
    assert cfg.theta_grid == Grid(0, 4, 0.25) and cfg.gamma_grid == Grid(0, 4, 0.05)
    assert cfg.scheme.kind is SchemeKind.SECOND_PRICE_LINEAR
    assert cfg.cost.family is CostFamily.LINEAR
    assert str(cfg.profit) == "QuadraticDecreasing(4,1)"
    assert cfg.tie_break is TieBreak.PRO_SOCIAL


@pytest.mark.parametrize("doc,key", [
    ({"gammaGrid": {"step": 0}}, "gammaGrid.step"),
    ({"thetaGrid": {"step": -1}}, "thetaGrid.step"),
    ({"bogus": 1}, "bogus"),
    ({"gammaGrid": {"stride": 1}}, "gammaGrid.stride"),
    ({"nAgents": 1}, "nAgents"),
    ({"scheme": "Nope"}, "scheme"),
    ({"cost": "Power(0.5)"}, "cost.p"),
    ({"profit": {"family": "LinearDecreasing", "slope": 0}}, "profit.slope"),
    ({"seeds": [1, -2]}, "seeds[1]"),
    ({"format": "xml"}, "format"),
    ({"sweep": {"nosuch": [1]}}, "sweep.nosuch"),
])
def test_parse_errors_name_the_key(doc, key):
    with pytest.raises(ConfigError) as exc:
        parse_config(json.dumps(doc))
    assert exc.value.key == key
    assert key in str(exc.value)


def test_parse_malformed_document():
    with pytest.raises(ConfigError):
        parse_config("{not json")


def test_vcg_scheme_keeps_default_profit():
    cfg = parse_config('{"scheme": "VCGStyle"}')
    assert cfg.scheme.kind is SchemeKind.VCG_STYLE
    assert cfg.profit == ScenarioConfig().profit


def test_parse_parameterized_names_and_seeds():
    cfg = parse_config(json.dumps({
        "scheme": "RealizationOnly(1, -1)", "cost": "Power(3)",
        "profit": "LinearDecreasing(10,2)", "seeds": {"count": 3, "base": 5},
        "thetaMax": 2}))
    assert (cfg.scheme.intercept, cfg.scheme.slope) == (1.0, -1.0)
    assert cfg.cost.power == 3.0
    assert cfg.profit.s0 == 10 and cfg.profit.slope == 2
    assert cfg.seeds == (5, 6, 7)
    assert cfg.theta_grid.hi == 2 and cfg.gamma_grid.hi == 2


def test_worked_example_row():
    text = render_outcomes([run_game(Scenario.truthful([2, 3, 4]))])
    rows = list(csv.DictReader(text.splitlines()))
    assert tuple(rows[0]) == OUTCOME_COLUMNS
    r = rows[0]
    assert (r["theta_bar"], r["gamma_realized"], r["social_welfare"], r["welfare_gap"]) == (
        "3", "0.5", "2.25", "0")


def test_empty_outcomes_header_only():
    assert render_outcomes([]) == ",".join(OUTCOME_COLUMNS) + "\n"


def test_report_json_has_witness_array():
    rep = VerificationReport("IC", counterexamples=[{"a": 1}, {"a": 2}])
    doc = json.loads(render_report(rep, "json"))
    assert doc["passed"] is False
    assert doc["counterexamples"] == [{"a": 1}, {"a": 2}]
    lines = render_report(rep, "csv").splitlines()
    assert lines == ["index,a", "0,1", "1,2"]


def test_outcome_json_is_lossless():
    out = run_game(Scenario.truthful([0.1, 1 / 3, 2.2]))
    doc = json.loads(render_outcomes([out], "json"))[0]
    assert doc["theta_bar"] == out.theta_bar
    assert doc["social_welfare"] == out.social_welfare
    assert doc["bids"][0] == {"agent_id": 1, "reported_theta": 0.1}


def test_unwritable_path(tmp_path):
    with pytest.raises(OSError):
        write_report([], str(tmp_path / "missing" / "x.csv"))
    assert main(["run", "--seeds", "1", "--out", str(tmp_path / "missing" / "x.csv")]) == 2


def test_cli_run_is_deterministic(tmp_path):
    a, b, c = (tmp_path / n for n in ("a.csv", "b.csv", "c.csv"))
    assert main(["run", "--seeds=10", "--out", str(a)]) == 0
    assert main(["run", "--seeds=10", "--out", str(b)]) == 0
    assert main(["run", "--seeds=10", "--workers", "2", "--out", str(c)]) == 0
    assert a.read_bytes() == b.read_bytes() == c.read_bytes()
    assert len(a.read_text().splitlines()) == 11


def test_cli_run_json_and_seed_list(tmp_path):
    out = tmp_path / "o.json"
    assert main(["run", "--seed-list", "3,9", "--format", "json", "--out", str(out)]) == 0
    assert [o["seed"] for o in json.loads(out.read_text())] == [3, 9]


def test_cli_verify_ic_defaults(tmp_path):
    out = tmp_path / "ic.json"
    assert main(["verify", "ic", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["passed"] is True and doc["property"] == "IC"


def test_cli_verify_so_lazy_fails(tmp_path):
    out = tmp_path / "so.json"
    assert main(["verify", "so", "--seeds", "50", "--tiebreak", "Lazy", "--out", str(out)]) == 1
    assert json.loads(out.read_text())["passed"] is False


def test_cli_payment_check_vcg(tmp_path):
    out = tmp_path / "pp.json"
    assert main(["payment-check", "--scheme=VCGStyle", "--out", str(out)]) == 1
    doc = json.loads(out.read_text())
    assert doc["condition2_holds"] is False and doc["condition1_holds"] is True


def test_cli_counterexample(tmp_path, capsys):
    assert main(["counterexample", "--property", "IC", "--scheme", "ClaimedEffort"]) == 1
    doc = json.loads(capsys.readouterr().out)
    assert doc["status"] == "found"
    assert main(["counterexample", "--property", "IC", "--budget", "10"]) == 1
    assert json.loads(capsys.readouterr().out)["status"] == "inconclusive"


def test_cli_sweep(tmp_path):
    out = tmp_path / "sweep.csv"
    code = main(["sweep", "--axis", "tieBreak=ProSocial,Lazy", "--axis", "nAgents=2,3",
                 "--seeds", "20", "--out", str(out)])
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert [(r["tieBreak"], r["nAgents"]) for r in rows] == [
        ("ProSocial", "2"), ("ProSocial", "3"), ("Lazy", "2"), ("Lazy", "3")]
    assert [r["so_passed"] for r in rows] == ["true", "true", "false", "false"]
    assert code == 1


def test_cli_usage_errors(tmp_path, capsys):
    assert main(["frobnicate"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"gammaGrid": {"step": 0}}')
    assert main(["run", "--config", str(bad)]) == 2
    assert "gammaGrid.step" in capsys.readouterr().err
    assert main(["sweep"]) == 2


def test_cli_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"nAgents": 2, "seeds": [1, 2, 3], "format": "csv"}))
    out = tmp_path / "r.csv"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 4
