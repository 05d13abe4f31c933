import json

import pytest

from fsmdiag import load_fsm, parse_fsm
from fsmdiag.cli import main
from conftest import fixture_path


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


M1 = fixture_path("m1.fsm")
M2 = fixture_path("m2.fsm")
FORK = fixture_path("fork.fsm")
SILENT = fixture_path("silent.fsm")


class TestValidate:
    def test_ok(self, capsys):
        code, out, _ = run(capsys, "validate", M1)
        assert code == 0
        assert "ok" in out

    def test_silent_machine_fails_analysis(self, capsys):
        code, out, _ = run(capsys, "validate", SILENT)
        assert code == 1
        assert "epsilon-output" in out

    def test_silent_machine_passes_desilent(self, capsys):
        code, out, _ = run(capsys, "validate", SILENT, "--mode", "desilent")
        assert code == 0

    def test_json(self, capsys):
        code, out, _ = run(capsys, "validate", M1, "--json")
        assert json.loads(out)["ok"] is True


class TestCheck:
    def test_eventual_holds(self, capsys):
        code, out, _ = run(capsys, "check", M1, "--property", "eventual")
        assert code == 0
        assert "tau=1 delta=1 gamma1=0 gamma2=0" in out

    def test_diag_fails_with_witness(self, capsys):
        code, out, _ = run(capsys, "check", M1, "--property", "diag")
        assert code == 1
        assert "witness: (3, 5)" in out

    def test_json_payload(self, capsys):
        code, out, _ = run(capsys, "check", M1, "--property", "eventual", "--json")
        payload = json.loads(out)
        assert payload["holds"] is True
        assert payload["params"]["tau"] == 1
        assert payload["bfgl"] == [2, 2, 1, 1]

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "check", "no-such-file.fsm",
                           "--property", "diag")
        assert code == 2
        assert "error" in err

    def test_initial_override(self, capsys):
        # all-initial fails critically, restricted to state 1 it holds
        code, _, _ = run(capsys, "check", M2, "--property", "critical")
        assert code == 1
        code, _, _ = run(capsys, "check", M2, "--property", "critical",
                         "--initial", "1")
        assert code == 0

    def test_critical_override(self, capsys):
        code, _, _ = run(capsys, "check", M1, "--property", "diag",
                         "--critical", "")
        assert code == 0


class TestSets:
    def test_single_set(self, capsys):
        code, out, _ = run(capsys, "sets", M1, "--set", "Lambda")
        assert code == 0
        assert "Lambda (converges at 2): (3,5) (5,3)" in out

    def test_all_sets_json(self, capsys):
        code, out, _ = run(capsys, "sets", M1, "--json")
        payload = json.loads(out)
        assert set(payload) == {"Pi", "S", "Stilde", "F", "B", "Lambda", "Gamma"}
        assert payload["F"]["convergence_step"] == 2

    def test_steps(self, capsys):
        code, out, _ = run(capsys, "sets", M1, "--set", "F", "--steps")
        assert "step 1:" in out and "step 2:" in out


class TestDesilent:
    def test_writes_output(self, capsys, tmp_path):
        out_file = tmp_path / "out.fsm"
        prov_file = tmp_path / "prov.json"
        code, out, _ = run(capsys, "desilent", SILENT,
                           "-o", str(out_file), "--provenance", str(prov_file))
        assert code == 0
        mh = load_fsm(out_file)
        assert not mh.silent_states
        prov = json.loads(prov_file.read_text())
        assert prov["3~1+"] == {"q": "3", "w": "1", "crossed": True}


class TestObserve:
    def test_trace_event(self, capsys):
        code, out, _ = run(capsys, "observe", M1, "--property", "eventual",
                           "--trace", "c b a b")
        assert code == 0
        assert "EVENT step=4 window=[3,3] exact=true" in out

    def test_no_events(self, capsys):
        code, out, _ = run(capsys, "observe", M1, "--property", "eventual",
                           "--trace", "c a b")
        assert code == 0
        assert "no events" in out

    def test_failing_property_refused(self, capsys):
        code, _, err = run(capsys, "observe", M1, "--property", "diag",
                           "--trace", "c")
        assert code == 1

    def test_inconsistent_stream(self, capsys):
        code, _, err = run(capsys, "observe", M1, "--property", "eventual",
                           "--trace", "c c")
        assert code == 1
        assert "error" in err

    def test_stdin(self, capsys, monkeypatch):
        import io
        monkeypatch.setattr("sys.stdin", io.StringIO("c\nb\na\nb\n"))
        code, out, _ = run(capsys, "observe", M1, "--property", "eventual")
        assert code == 0
        assert "EVENT step=4" in out

    def test_json(self, capsys):
        code, out, _ = run(capsys, "observe", M1, "--property", "eventual",
                           "--trace", "c b a b", "--json")
        payload = json.loads(out)
        assert payload["events"] == [{"step": 4, "window": [3, 3], "exact": True}]


class TestOracle:
    def test_consistent_at_checker_params(self, capsys):
        code, out, _ = run(capsys, "oracle", M1, "--property", "eventual",
                           "--horizon", "12")
        assert code == 0
        assert "consistent-up-to-horizon" in out

    def test_violated_with_explicit_params(self, capsys):
        code, out, _ = run(capsys, "oracle", M1, "--property", "eventual",
                           "--horizon", "12", "--params", "0,5,0,0")
        assert code == 1
        assert "violated" in out
        assert "execution:" in out and "partner:" in out

    def test_bad_params(self, capsys):
        code, _, err = run(capsys, "oracle", M1, "--property", "eventual",
                           "--horizon", "12", "--params", "1,2")
        assert code == 2

    def test_failing_property_needs_params(self, capsys):
        code, _, err = run(capsys, "oracle", FORK, "--property", "parametric",
                           "--horizon", "10")
        assert code == 1
        assert "--params" in err


def test_round_trip_via_serializer(tmp_path):
    m = load_fsm(M2)
    from fsmdiag import fsm_to_text
    p = tmp_path / "copy.fsm"
    p.write_text(fsm_to_text(m))
    assert load_fsm(p) == m


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "fsmdiag" in capsys.readouterr().out


def test_parse_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.fsm"
    bad.write_text("not a machine\n")
    code = main(["check", str(bad), "--property", "diag"])
    assert code == 2
