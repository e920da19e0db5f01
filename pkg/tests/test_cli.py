"""Command surface: exit codes, JSON determinism, config and env wiring."""

from __future__ import annotations

import json

import pytest

from milnork.cli import main

pytestmark = pytest.mark.usefixtures("capsys")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_equal_exit_codes(capsys):
    code, out, _ = run(capsys, "equal", "--field", "GF(5)(t,u) mod 2", "--lhs", "{t,u}", "--rhs", "-{u,t}")
    assert code == 0 and out.strip() == "equal"
    code, out, _ = run(capsys, "equal", "--field", "GF(7) mod 2", "--lhs", "{-1}", "--rhs", "{1}")
    assert code == 1 and out.strip() == "not equal"


def test_residue_example(capsys):
    code, out, _ = run(capsys, "residue", "--field", "GF(5)(t)", "--expr", "{t, t-2}", "--at", "t=0")
    assert code == 0 and out.strip() == "{g^3}"


def test_normalize_human_and_json(capsys):
    code, out, _ = run(capsys, "normalize", "--field", "GF(5)(t)", "--expr", "{t, 1}")
    assert code == 0 and out.strip() == "zero"
    code, out, _ = run(capsys, "normalize", "--field", "GF(5)(t)", "--expr", "{t}", "--json")
    payload = json.loads(out)
    assert payload["normal_form"] == {"base": {"K1": 0}, "residues": {"a=zero": {"K0": 1}}}
    assert payload["field"]["s_infinity_uniformizer"] == "t^-1"


def test_domain_errors_exit_2(capsys):
    code, _, err = run(capsys, "normalize", "--field", "GF(5)(t)", "--expr", "{t, 0}")
    assert code == 2 and "zero is not a unit" in err
    code, _, err = run(capsys, "residue", "--field", "GF(5)(t,u)", "--expr", "{t}", "--at", "t=0")
    assert code == 2 and "outermost" in err
    code, _, err = run(capsys, "normalize", "--expr", "{t}")
    assert code == 2 and "no field" in err


def test_specialize_and_gamma(capsys):
    code, out, _ = run(
        capsys, "specialize", "--field", "GF(5)(t)", "--expr", "{t * 3}", "--at", "t=0"
    )
    assert code == 0 and out.strip() == "{g^3}"  # 3 = g^3 in GF(5)
    code, out, _ = run(
        capsys, "gamma", "--field", "GF(5)(t1,t2,t3,t4) mod 3", "-n", "2",
        "--pres", "[{t1,t2}; {t3,t4}]",
    )
    assert code == 0 and out.strip() == "{t1, t2, t3, t4}"


def test_sw_command(capsys):
    code, out, _ = run(capsys, "sw", "--field", "GF(5)(t,u,v) mod 2", "--form", "t, u, v", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["identities"]["w1*w2=w3"] is True


def test_validate_op_command(tmp_path, capsys):
    ok_spec = tmp_path / "ok.json"
    ok_spec.write_text(json.dumps({"field": "GF(7)", "mode": 2, "i": 2, "coeffs": {"2": "{-1}"}}))
    code, out, _ = run(capsys, "validate-op", "--op-spec", str(ok_spec))
    assert code == 0 and out.strip() == "ok"
    # over a finite base, tau_2 of any degree >= 1 class dies in K_2 = 0, so
    # the discriminating rejection is the degree-0 unit coefficient
    bad_spec = tmp_path / "bad.json"
    bad_spec.write_text(json.dumps({"field": "GF(7)", "mode": 2, "i": 2, "coeffs": {"2": "1"}}))
    code, out, _ = run(capsys, "validate-op", "--op-spec", str(bad_spec), "--json")
    assert code == 1
    assert "ker tau_2" in json.loads(out)["violations"][0]
    odd_spec = tmp_path / "odd.json"
    odd_spec.write_text(json.dumps({"field": "GF(7)", "mode": 3, "i": 3, "coeffs": {"2": "{g}"}}))
    code, out, _ = run(capsys, "validate-op", "--op-spec", str(odd_spec), "--json")
    assert code == 1 and "odd" in json.loads(out)["violations"][0]


def test_suite_json_is_byte_deterministic(capsys):
    args = [
        "suite", "--profile", "commutativity", "--field", "GF(5)(t,u) mod 2",
        "--cases", "5", "--seed", "42", "--json",
    ]
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2
    assert json.loads(out1)["seed"] == 42


def test_suite_seed_from_env_and_config(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "mk.cfg"
    cfg.write_text("field = GF(5)(t,u) mod 2\nseed = 9\ncases = 4\n")
    code, out, _ = run(capsys, "--config", str(cfg), "suite", "--profile", "commutativity", "--json")
    assert code == 0 and json.loads(out)["seed"] == 9
    monkeypatch.setenv("MK_SEED", "33")
    code, out, _ = run(capsys, "--config", str(cfg), "suite", "--profile", "commutativity", "--json")
    assert json.loads(out)["seed"] == 33


def test_suite_report_dir(tmp_path, capsys):
    out_dir = tmp_path / "rep"
    code, _, _ = run(
        capsys, "suite", "--profile", "steinberg", "--field", "GF(5)(t,u,v) mod 2",
        "--cases", "4", "--seed", "1", "--report-dir", str(out_dir),
    )
    assert code == 0
    assert (out_dir / "report.json").exists()
    assert (out_dir / "laws.csv").read_text().startswith("law,status")
    assert (out_dir / "laws.png").stat().st_size > 1000


def test_run_script(tmp_path, capsys):
    script = tmp_path / "demo.mk"
    script.write_text(
        """
        field GF(5)(t,u) mod 2
        let w = g^2 * (t-1)
        equal {t,u} ; -{u,t}
        residue {w, u} at u=0
        gamma 2 [{t,u}; {t,u-1}]
        support {u}
        """
    )
    code, out, _ = run(capsys, "run", str(script))
    assert code == 0
    assert "equal: yes" in out
    assert "support: u=0" in out


def test_run_script_unequal_exit(tmp_path, capsys):
    script = tmp_path / "demo.mk"
    script.write_text("field GF(7) mod 2\nequal {-1} ; {1}\n")
    code, out, _ = run(capsys, "run", str(script))
    assert code == 1 and "equal: no" in out
