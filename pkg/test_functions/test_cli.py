#!/usr/bin/env python3

import json
import logging
import sys

import pytest

from adelic_gates import cli
from adelic_gates.cli import GateToolkit, build_parser, combined_exit_code, main
from adelic_gates.decorators import command_schema
from adelic_gates.qsim import AdelicCoefficient, AdelicGate, AdelicState, PadicState, apply_adelic, apply_padic

logger = logging.getLogger("test_cli")

DIAG_2_1 = {"p": 5, "k": 2, "n": 2, "entries": [[2, 0], [0, 1]]}
DIAG_5_1 = {"p": 5, "k": 1, "n": 2, "entries": [[5, 0], [0, 1]]}
DIAG_1_5 = {"p": 5, "k": 3, "n": 2, "entries": [[1, 0], [0, 5]]}


def run_cli(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_parser_lists_every_subcommand():
    parser = build_parser()
    for argv in (["synth", "m.json"], ["glnz", "m.json"], ["snf", "m.json"], ["sim", "c.json"],
                 ["oracle", "--p", "3", "--k", "1"], ["verify", "m.json", "--word", "X"]):
        assert parser.parse_args(argv).command == argv[0]
    with pytest.raises(SystemExit):
        parser.parse_args(["oracle", "--p", "3"])


def test_every_command_has_a_schema():
    toolkit = GateToolkit()
    assert set(toolkit.commands) == {"synth", "glnz", "snf", "sim", "oracle", "verify"}
    for fn in toolkit.commands.values():
        assert command_schema(fn)["type"] == "object"


def test_synth_diagonal_unit(capsys, write_json):
    code, report = run_cli(capsys, ["synth", write_json("m.json", DIAG_2_1), "--target", "gl2p"])
    assert code == 0
    assert report["command"] == "synth"
    assert report["outputs"]["word"] == "Mz^1"
    assert report["verification"]["verified"] is True
    assert "error" not in report


def test_synth_identity_in_every_regime(capsys, write_json):
    path = write_json("i.json", {"p": 3, "k": 2, "n": 2, "entries": [[1, 0], [0, 1]]})
    for target in ("gl2p", "glnz"):
        code, report = run_cli(capsys, ["synth", path, "--target", target])
        assert code == 0
        assert report["outputs"]["word"] == ""
        assert report["verification"]["verified"] is True
    code, report = run_cli(capsys, ["synth", path, "--target", "glnp"])
    assert code == 0
    assert report["outputs"]["gates"] == []


def test_synth_rejects_non_invertible(capsys, write_json):
    code, report = run_cli(capsys, ["synth", write_json("m.json", DIAG_5_1)])
    assert code == 3
    assert report["error"]["error_code"] == "NOT_IN_GL"
    assert "not in GL" in report["error"]["message"]


def test_synth_rejects_two(capsys, write_json):
    path = write_json("m.json", {"p": 2, "k": 2, "n": 2, "entries": [[1, 1], [0, 1]]})
    code, report = run_cli(capsys, ["synth", path])
    assert code == 3
    assert report["error"]["error_code"] == "UNSUPPORTED_PRIME"


def test_synth_precision_flags_override_the_file(capsys, write_json):
    path = write_json("m.json", {"n": 2, "entries": [[2, 1], [1, 1]]})
    code, report = run_cli(capsys, ["synth", path, "--p", "7", "--k", "3", "--strategy", "transpose"])
    assert code == 0
    assert (report["outputs"]["p"], report["outputs"]["k"]) == (7, 3)
    assert report["verification"]["verified"] is True


def test_synth_glnp_and_glnz(capsys, write_json):
    glnp = write_json("p.json", {"p": 3, "k": 2, "n": 3, "entries": [[1, 2, 0], [4, 0, 1], [0, 3, 5]]})
    code, report = run_cli(capsys, ["synth", glnp, "--target", "glnp"])
    assert code == 0
    assert report["verification"]["verified"] is True
    assert all(len(g["coords"]) == 2 for g in report["outputs"]["gates"])

    glnz = write_json("z.json", {"n": 3, "entries": [[2, 1, 0], [1, 1, 0], [0, 0, -1]]})
    for argv in (["synth", glnz, "--target", "glnz"], ["glnz", glnz]):
        code, report = run_cli(capsys, argv)
        assert code == 0
        assert report["outputs"]["det"] == -1
        assert report["verification"]["verified"] is True


@pytest.mark.parametrize("payload", [
    "{not json",
    json.dumps({"p": 5, "k": 2, "n": 2, "entries": [[1, 0]]}),
    json.dumps({"p": 5, "k": 2, "n": 2, "entries": [["5^2:x", 0], [0, 1]]}),
])
def test_unreadable_inputs_exit_two(capsys, tmp_path, payload):
    path = tmp_path / "bad.json"
    path.write_text(payload, encoding="utf-8")
    code, report = run_cli(capsys, ["synth", str(path)])
    assert code == 2
    assert report["error"]["exit_code"] == 2


def test_missing_file_exits_two(capsys, tmp_path):
    code, report = run_cli(capsys, ["snf", str(tmp_path / "absent.json")])
    assert code == 2
    assert report["error"]["error_code"] == "PARSE_ERROR"


def test_padic_tokens_in_matrix_files(capsys, write_json):
    path = write_json("m.json", {"p": 5, "k": 2, "n": 2, "entries": [["5^2:2", 0], [0, "5^3:126"]]})
    code, report = run_cli(capsys, ["synth", path])
    assert code == 0
    assert report["outputs"]["word"] == "Mz^1"


def test_snf_report(capsys, write_json):
    code, report = run_cli(capsys, ["snf", write_json("m.json", DIAG_1_5)])
    assert code == 0
    assert report["outputs"]["exponents"] == [0, 1]
    assert report["outputs"]["is_gl"] is False
    assert report["verification"]["elementary_divisor_check"] is True
    assert report["verification"]["verified"] is True


def test_snf_precision_floor(capsys, write_json):
    path = write_json("m.json", {"p": 5, "k": 2, "n": 2, "entries": [[5, 5], [5, 5]]})
    code, report = run_cli(capsys, ["snf", path])
    assert code == 0
    assert report["outputs"]["exponents"] == [1, ">=2"]


def test_oracle(capsys):
    code, report = run_cli(capsys, ["oracle", "--p", "3", "--k", "1"])
    assert code == 0
    assert report["outputs"]["reachable"] == 48
    assert report["outputs"]["group_order"] == 48
    assert report["outputs"]["complete"] is True
    assert report["verification"] == {"formula_order": 48, "verified": True}


def test_oracle_budget_exceeded(capsys):
    code, report = run_cli(capsys, ["oracle", "--p", "3", "--k", "6", "--budget", "1000"])
    assert code == 3
    assert report["error"]["error_code"] == "BUDGET_EXCEEDED"


def test_sim_complex(capsys, write_json):
    circuit = {"regime": "complex", "n": 1, "initial": "0",
               "gates": [{"kind": "H", "targets": [0]}]}
    path = write_json("c.json", circuit)
    code, report = run_cli(capsys, ["sim", path, "--seed", "3", "--samples", "200"])
    assert code == 0
    probs = report["outputs"]["probabilities"]
    assert probs["0"] == pytest.approx(0.5)
    assert probs["1"] == pytest.approx(0.5)
    assert sum(report["outputs"]["samples"].values()) == 200
    assert report["verification"]["replay_matches"] is True

    capsys.readouterr()
    main(["sim", path, "--seed", "3", "--samples", "200"])
    first = capsys.readouterr().out
    main(["sim", path, "--seed", "3", "--samples", "200"])
    assert capsys.readouterr().out == first


def test_sim_complex_bell_pair(capsys, write_json):
    circuit = {"regime": "complex", "n": 2, "initial": "00",
               "gates": [{"kind": "H", "targets": [1]}, {"kind": "CNOT", "targets": [1, 0]}]}
    code, report = run_cli(capsys, ["sim", write_json("c.json", circuit)])
    assert code == 0
    probs = report["outputs"]["probabilities"]
    assert probs["00"] == pytest.approx(0.5)
    assert probs["11"] == pytest.approx(0.5)


def test_sim_rejects_unnormalized_initial_state(capsys, write_json):
    circuit = {"regime": "complex", "n": 1, "initial": [[1, 0], [1, 0]], "gates": []}
    code, report = run_cli(capsys, ["sim", write_json("c.json", circuit)])
    assert code == 3
    assert report["error"]["error_code"] == "NOT_NORMALIZED"


def test_sim_padic(capsys, write_json):
    circuit = {"regime": "padic", "n": 1, "p": 5, "k": 2, "initial": [1, 0],
               "gates": [{"kind": "word", "word": "P-"}]}
    code, report = run_cli(capsys, ["sim", write_json("c.json", circuit)])
    assert code == 0
    assert report["outputs"]["state"] == [1, 1]
    assert report["outputs"]["valuations"] == {"0": 0, "1": 0}
    assert report["verification"]["verified"] is True


def test_sim_padic_needs_precision(capsys, write_json):
    circuit = {"regime": "padic", "n": 1, "initial": [1, 0], "gates": []}
    code, _ = run_cli(capsys, ["sim", write_json("c.json", circuit)])
    assert code == 2


def test_sim_adelic_identity(capsys, write_json):
    circuit = {"regime": "adelic", "n": 1, "initial": "0", "gates": []}
    code, report = run_cli(capsys, ["sim", write_json("c.json", circuit)])
    assert code == 0
    assert report["outputs"]["support"] == []
    assert report["outputs"]["state"] == [
        {"inf": 1.0, "locals": {}, "tail": 1, "tail_integral": True},
        {"inf": 0.0, "locals": {}, "tail": 0, "tail_integral": True},
    ]
    assert report["verification"]["normalized"] is True


def test_sim_adelic_finite_type_gate(capsys, write_json):
    circuit = {"regime": "adelic", "n": 1, "k": 2,
               "initial": [{"inf": 1, "locals": {"3": 1}, "tail": 1},
                           {"inf": 0, "locals": {"3": 0}, "tail": 0}],
               "gates": [{"kind": "adelic", "inf": {"kind": "H", "targets": [0]},
                          "locals": {"5": {"kind": "word", "word": "X"}}}]}
    code, report = run_cli(capsys, ["sim", write_json("c.json", circuit)])
    assert code == 0
    state = report["outputs"]["state"]
    assert [c["locals"]["5"] for c in state] == [0, 1]
    assert [c["locals"]["3"] for c in state] == [1, 0]
    assert report["outputs"]["support"] == [3, 5]
    assert report["verification"]["support_within_gates"] is True
    assert report["verification"]["places_replayed"] == {"inf": True, "5": True}
    assert report["verification"]["untouched_places_identical"] is True


def test_sim_adelic_global_gate(capsys, write_json):
    circuit = {"regime": "adelic", "n": 1, "k": 1, "initial": "1",
               "gates": [{"kind": "global", "matrix": [[1, 1], [0, 1]], "primes": [3, 7]}]}
    code, report = run_cli(capsys, ["sim", write_json("c.json", circuit)])
    assert code == 0
    state = report["outputs"]["state"]
    assert [c["locals"]["7"] for c in state] == [1, 1]
    assert [c["inf"] for c in state] == [0.0, 1.0]


def test_sim_defaults_to_the_all_zero_basis_state(capsys, write_json):
    circuit = {"regime": "complex", "n": 2, "gates": [{"kind": "CNOT", "targets": [1, 0]}]}
    code, report = run_cli(capsys, ["sim", write_json("c.json", circuit)])
    assert code == 0
    assert report["outputs"]["probabilities"]["00"] == pytest.approx(1.0)
    padic = {"regime": "padic", "n": 2, "p": 3, "k": 2,
             "gates": [{"kind": "word", "word": "X", "targets": [1]}]}
    code, report = run_cli(capsys, ["sim", write_json("p.json", padic)])
    assert code == 0
    assert report["outputs"]["state"] == [0, 0, 1, 0]


def test_sim_padic_replays_multi_qubit_circuits(capsys, write_json):
    circuit = {"regime": "padic", "n": 2, "p": 5, "k": 2, "initial": [1, 2, 3, 4],
               "gates": [{"kind": "word", "word": "P-^3", "targets": [0]},
                         {"kind": "matrix", "matrix": [[1, 0, 0, 0], [0, 0, 1, 0],
                                                       [0, 1, 0, 0], [0, 0, 0, 1]]},
                         {"kind": "word", "word": "Mz^1 X", "targets": [1]}]}
    code, report = run_cli(capsys, ["sim", write_json("c.json", circuit)])
    assert code == 0
    assert report["verification"]["replay_matches"] is True


def test_sim_padic_catches_a_wrong_simulation(capsys, monkeypatch, write_json):
    def off_by_one(gate, state):
        out = apply_padic(gate, state)
        return PadicState(out.n, out.p, out.k, tuple(x + 1 for x in out.amplitudes))

    monkeypatch.setattr(cli, "apply_padic", off_by_one)
    circuit = {"regime": "padic", "n": 1, "p": 5, "k": 2, "initial": [1, 0],
               "gates": [{"kind": "word", "word": "P-"}]}
    code, report = run_cli(capsys, ["sim", write_json("c.json", circuit)])
    assert code == 3
    assert report["verification"]["replay_matches"] is False
    assert report["error"]["error_code"] == "VERIFICATION_FAILED"


def test_sim_adelic_catches_changes_outside_the_gate_support(capsys, monkeypatch, write_json):
    def leaky(gate, state):
        out = apply_adelic(gate, state)
        first = out.coefficients[0]
        bumped = AdelicCoefficient(first.archimedean, {**first.locals, 3: first.locals[3] + 1},
                                   first.tail_integral, first.tail_value)
        return AdelicState(out.n, (bumped,) + out.coefficients[1:])

    circuit = {"regime": "adelic", "n": 1, "k": 2,
               "initial": [{"inf": 1, "locals": {"3": 1}, "tail": 1},
                           {"inf": 0, "locals": {"3": 0}, "tail": 0}],
               "gates": [{"kind": "adelic", "locals": {"5": {"kind": "word", "word": "X"}}}]}
    path = write_json("c.json", circuit)
    code, report = run_cli(capsys, ["sim", path])
    assert code == 0
    assert report["verification"]["untouched_places_identical"] is True

    monkeypatch.setattr(cli, "apply_adelic", leaky)
    code, report = run_cli(capsys, ["sim", path])
    assert code == 3
    assert report["verification"]["untouched_places_identical"] is False


def test_sim_adelic_catches_a_wrong_local_result(capsys, monkeypatch, write_json):
    def skip_local(gate, state):
        return apply_adelic(AdelicGate(gate.archimedean), state)

    circuit = {"regime": "adelic", "n": 1, "k": 1, "initial": "1",
               "gates": [{"kind": "global", "matrix": [[1, 1], [0, 1]], "primes": [3]}]}
    monkeypatch.setattr(cli, "apply_adelic", skip_local)
    code, report = run_cli(capsys, ["sim", write_json("c.json", circuit)])
    assert code == 3
    assert report["verification"]["places_replayed"]["inf"] is True


def test_unexpected_errors_win_the_combined_exit_code(capsys, monkeypatch, write_json):
    assert combined_exit_code([0, 3, 1, 2]) == 1
    assert combined_exit_code([0, 2, 3]) == 3
    assert combined_exit_code([0]) == 0

    real_load = cli.load_matrix_file

    def load(path):
        if path.endswith("boom.json"):
            raise KeyError("boom")
        return real_load(path)

    monkeypatch.setattr(cli, "load_matrix_file", load)
    bad = write_json("b.json", DIAG_5_1)
    boom = write_json("boom.json", DIAG_2_1)
    code, reports = run_cli(capsys, ["synth", bad, boom])
    assert code == 1
    assert [r["error"]["error_code"] for r in reports] == ["NOT_IN_GL", "UNEXPECTED"]


def test_verify(capsys, write_json):
    path = write_json("m.json", DIAG_2_1)
    code, report = run_cli(capsys, ["verify", path, "--word", "Mz^1"])
    assert code == 0
    assert report["verification"]["verified"] is True
    code, report = run_cli(capsys, ["verify", path, "--word", "X"])
    assert code == 3
    assert report["error"]["error_code"] == "VERIFICATION_FAILED"
    glnz = write_json("z.json", {"n": 2, "entries": [[1, 0], [1, 1]]})
    code, report = run_cli(capsys, ["verify", glnz, "--target", "glnz", "--word", "X P X"])
    assert code == 0


def test_several_files_give_a_list(capsys, write_json):
    good = write_json("a.json", DIAG_2_1)
    bad = write_json("b.json", DIAG_5_1)
    code, reports = run_cli(capsys, ["synth", good, bad, "--jobs", "2"])
    assert code == 3
    assert [r["outputs"].get("word") for r in reports] == ["Mz^1", None]
    assert reports[1]["error"]["error_code"] == "NOT_IN_GL"


def test_out_file_and_timing(capsys, tmp_path, write_json):
    out = tmp_path / "report.json"
    code = main(["synth", write_json("m.json", DIAG_2_1), "--out", str(out), "--timing"])
    assert code == 0
    assert capsys.readouterr().out == ""
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["wall_time"] >= 0


def test_table_format(capsys, write_json):
    code = main(["snf", write_json("m.json", DIAG_1_5), "--format", "table"])
    assert code == 0
    text = capsys.readouterr().out
    assert "| command" in text
    assert "exponents" in text


def test_reports_are_deterministic(capsys, write_json):
    path = write_json("m.json", {"p": 7, "k": 2, "n": 2, "entries": [[3, 10], [14, 5]]})
    main(["synth", path])
    first = capsys.readouterr().out
    main(["synth", path])
    assert capsys.readouterr().out == first


if __name__ == "__main__":
    logging.basicConfig(level=logging.DEBUG,
                        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    sys.exit(pytest.main([__file__, "-v"]))
