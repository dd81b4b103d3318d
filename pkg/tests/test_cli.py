"""Command-line contract tests: verbs, exit codes, and witness formats."""

from __future__ import annotations

import socket
import sys
import threading

import pytest

from actioncodes.cli import main
from actioncodes.documents import dumps, loads, lts_from_document
from actioncodes.gallery import (
    double_press_concretization,
    double_press_contraction,
    letter_loops_refined,
    octal_choice_det,
    split_press_contraction,
)
from actioncodes.simulation import Relation, find_isomorphism_reachable, is_simulation

from conftest import FIXTURES
from test_adaptor import SQUARE_SUT_SCRIPT


def fixture(name: str) -> str:
    return str(FIXTURES / name)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestOperatorVerbs:
    @pytest.mark.parametrize(
        "verb,code,machine,expected",
        [
            ("contract", "double-press.code.json", "square.mealy.json",
             double_press_contraction),
            ("contract", "split-press.code.json", "square.mealy.json",
             split_press_contraction),
            ("refine", "ascii-fragment.code.json", "letter-loops.lts.json",
             letter_loops_refined),
            ("refine", "octal-letters.code.json", "choice.lts.json",
             octal_choice_det),
        ],
    )
    def test_contract_and_refine_reproduce_goldens(
        self, capsys, verb, code, machine, expected
    ):
        status, out, _ = run(capsys, verb, "--code", fixture(code), fixture(machine))
        assert status == 0
        produced = lts_from_document(loads(out))
        assert find_isomorphism_reachable(produced, expected()) is not None

    def test_concretize_reproduces_golden(self, capsys):
        status, out, _ = run(
            capsys,
            "concretize",
            "--rel",
            "same-input",
            "--code",
            fixture("double-press.code.json"),
            fixture("double-press-contraction.mealy.json"),
        )
        assert status == 0
        produced = lts_from_document(loads(out))
        assert find_isomorphism_reachable(produced, double_press_concretization()) is not None

    def test_stats_go_to_stderr(self, capsys):
        status, out, err = run(
            capsys,
            "contract",
            "--stats",
            "--code",
            fixture("double-press.code.json"),
            fixture("square.mealy.json"),
        )
        assert status == 0
        assert "states 2 transitions 4" in err
        assert loads(out)["schema"] == "actioncodes/lts-v1"

    def test_out_flag_writes_file(self, capsys, tmp_path):
        target = tmp_path / "result.json"
        status, out, _ = run(
            capsys,
            "contract",
            "--code",
            fixture("double-press.code.json"),
            "--out",
            str(target),
            fixture("square.mealy.json"),
        )
        assert status == 0
        assert out == ""
        assert loads(target.read_text(encoding="utf-8"))["kind"] == "mealy"

    def test_malformed_input_exits_2(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{", encoding="utf-8")
        status, _, err = run(
            capsys, "contract", "--code", fixture("double-press.code.json"), str(bad)
        )
        assert status == 2
        assert err.startswith("ERROR ")

    def test_compose_and_tree_round_trip(self, capsys, tmp_path):
        status, out, _ = run(
            capsys,
            "compose",
            fixture("chaos-inner.code.json"),
            fixture("chaos-outer.code.json"),
        )
        assert status == 0
        assert loads(out)["entries"] == []

        status, tree_text, _ = run(
            capsys, "to-tree", fixture("ascii-fragment.code.json")
        )
        assert status == 0
        tree_file = tmp_path / "tree.json"
        tree_file.write_text(tree_text, encoding="utf-8")
        status, map_text, _ = run(capsys, "to-map", str(tree_file))
        assert status == 0
        original = (FIXTURES / "ascii-fragment.code.json").read_text(encoding="utf-8")
        assert map_text == original


class TestCheckVerbs:
    def test_simulation_witness_revalidates(self, capsys):
        status, out, _ = run(
            capsys,
            "check",
            "simulation",
            fixture("octal-choice-nondet.lts.json"),
            fixture("octal-choice-det.lts.json"),
        )
        assert status == 0
        lines = out.splitlines()
        assert lines[0] == "PASS"
        pairs = frozenset(
            tuple(line.split()[1:]) for line in lines[1:] if line.startswith("pair")
        )
        m = lts_from_document(loads((FIXTURES / "octal-choice-nondet.lts.json").read_text()))
        n = lts_from_document(loads((FIXTURES / "octal-choice-det.lts.json").read_text()))
        assert is_simulation(m, n, Relation(pairs))

    def test_simulation_fail_exits_1(self, capsys):
        status, out, _ = run(
            capsys,
            "check",
            "simulation",
            fixture("octal-choice-det.lts.json"),
            fixture("octal-choice-nondet.lts.json"),
        )
        assert status == 1
        assert out.splitlines()[0] == "FAIL"

    def test_isomorphism_self(self, capsys):
        status, out, _ = run(
            capsys,
            "check",
            "isomorphism",
            fixture("square.mealy.json"),
            fixture("square.mealy.json"),
        )
        assert status == 0
        assert "map q0 q0" in out

    def test_icomplete_pass(self, capsys):
        status, out, _ = run(
            capsys,
            "check",
            "icomplete",
            "--code",
            fixture("double-press.code.json"),
            "--rel",
            "same-input",
            fixture("square.mealy.json"),
        )
        assert status == 0 and out.startswith("PASS")

    def test_icomplete_fail_names_witness(self, capsys, tmp_path):
        code_doc = {
            "schema": "actioncodes/code-v1",
            "source_alphabet": ["a/0", "a/1"],
            "target_alphabet": ["X/0"],
            "entries": [["X/0", ["a/0"]]],
        }
        machine_doc = {
            "schema": "actioncodes/lts-v1",
            "kind": "mealy",
            "alphabet": ["a/0", "a/1"],
            "states": ["q0"],
            "initial": "q0",
            "transitions": [["q0", "a/1", "q0"]],
        }
        code_file = tmp_path / "c.json"
        code_file.write_text(dumps(code_doc), encoding="utf-8")
        machine_file = tmp_path / "m.json"
        machine_file.write_text(dumps(machine_doc), encoding="utf-8")
        status, out, _ = run(
            capsys,
            "check",
            "icomplete",
            "--code",
            str(code_file),
            "--rel",
            "same-input",
            str(machine_file),
        )
        assert status == 1
        assert "witness state=q0" in out
        assert "missing=a/1" in out

    def test_winning_table_and_failure(self, capsys):
        status, out, _ = run(
            capsys, "check", "winning", "--code", fixture("coffee.code.json")
        )
        assert status == 0
        assert "winning coffee" in out and "winning espresso" in out

        status, out, _ = run(
            capsys,
            "check",
            "winning",
            "--code",
            fixture("coffee.code.json"),
            "--for",
            "latte",
        )
        assert status == 1
        assert "not-winning latte" in out

    def test_determinate_witness(self, capsys):
        status, out, _ = run(
            capsys, "check", "determinate", "--code", fixture("shared-input.code.json")
        )
        assert status == 1
        assert "witness node=ε input=0 first=a second=b" in out

    def test_galois_checks_pass_on_goldens(self, capsys):
        status, out, _ = run(
            capsys,
            "check",
            "galois1",
            "--code",
            fixture("octal-letters.code.json"),
            fixture("choice.lts.json"),
            fixture("octal-choice-det.lts.json"),
        )
        assert status == 0, out

        status, out, _ = run(
            capsys,
            "check",
            "galois2",
            "--code",
            fixture("double-press.code.json"),
            "--rel",
            "same-input",
            fixture("square.mealy.json"),
            fixture("double-press-contraction.mealy.json"),
        )
        assert status == 0
        assert "icomplete True" in out
        assert "contraction-simulated True" in out

        status, out, _ = run(
            capsys,
            "check",
            "insertion",
            "--code",
            fixture("double-press.code.json"),
            "--rel",
            "same-input",
            fixture("double-press-contraction.mealy.json"),
        )
        assert status == 0

    def test_composition_checks(self, capsys, tmp_path):
        # The contraction commutes even for the everywhere-undefined stack;
        # its machine lives over the innermost (concrete) alphabet.
        concrete = {
            "schema": "actioncodes/lts-v1",
            "kind": "lts",
            "alphabet": ["a"],
            "states": ["q0"],
            "initial": "q0",
            "transitions": [["q0", "a", "q0"]],
        }
        concrete_file = tmp_path / "loop.json"
        concrete_file.write_text(dumps(concrete), encoding="utf-8")
        status, _, _ = run(
            capsys,
            "check",
            "compose-alpha",
            fixture("chaos-inner.code.json"),
            fixture("chaos-outer.code.json"),
            str(concrete_file),
        )
        assert status == 0

        status, out, _ = run(
            capsys,
            "check",
            "gamma-noncompose",
            fixture("chaos-inner.code.json"),
            fixture("chaos-outer.code.json"),
            fixture("chaos-machine.lts.json"),
        )
        assert status == 0
        assert "isomorphic False" in out
        assert "simulated-forward True" in out
        assert "simulated-backward True" in out

    def test_compose_rho_check(self, capsys, tmp_path):
        inner = {
            "schema": "actioncodes/code-v1",
            "source_alphabet": ["1", "2", "4"],
            "target_alphabet": ["a", "b"],
            "entries": [["a", ["1", "4", "1"]], ["b", ["1", "4", "2"]]],
        }
        outer = {
            "schema": "actioncodes/code-v1",
            "source_alphabet": ["a", "b"],
            "target_alphabet": ["W"],
            "entries": [["W", ["a", "b"]]],
        }
        machine = {
            "schema": "actioncodes/lts-v1",
            "kind": "lts",
            "alphabet": ["W"],
            "states": ["n0"],
            "initial": "n0",
            "transitions": [["n0", "W", "n0"]],
        }
        paths = []
        for name, doc in (("inner", inner), ("outer", outer), ("m", machine)):
            p = tmp_path / f"{name}.json"
            p.write_text(dumps(doc), encoding="utf-8")
            paths.append(str(p))
        status, out, _ = run(capsys, "check", "compose-rho", *paths)
        assert status == 0, out

        # Letters outside the inner domain invalidate the stacking law.
        sparse_inner = dict(inner, entries=[["a", ["1", "4", "1"]]])
        sparse_file = tmp_path / "sparse.json"
        sparse_file.write_text(dumps(sparse_inner), encoding="utf-8")
        status, out, _ = run(
            capsys, "check", "compose-rho", str(sparse_file), paths[1], paths[2]
        )
        assert status == 1
        assert "outside the inner code domain" in out

    def test_adaptor_theorem_check(self, capsys):
        status, _, _ = run(
            capsys,
            "check",
            "adaptor-theorem",
            "--code",
            fixture("double-press.code.json"),
            fixture("square.mealy.json"),
        )
        assert status == 0


class TestGen:
    def test_same_seed_same_output(self, capsys):
        first = run(capsys, "gen", "code", "--abstract", "3", "--maxlen", "3", "--seed", "7")
        second = run(capsys, "gen", "code", "--abstract", "3", "--maxlen", "3", "--seed", "7")
        assert first == second
        assert first[0] == 0

    def test_generated_documents_parse(self, capsys):
        status, out, _ = run(
            capsys, "gen", "lts", "--states", "5", "--labels", "2", "--seed", "2"
        )
        assert status == 0
        assert lts_from_document(loads(out)) is not None

    def test_mealy_code_generation(self, capsys):
        status, out, _ = run(
            capsys,
            "gen", "code", "--mealy", "--inputs", "2", "--outputs", "2",
            "--abstract", "2", "--maxlen", "2", "--seed", "11",
        )
        assert status == 0
        doc = loads(out)
        assert all("/" in t for t in doc["source_alphabet"])
        assert all("/" in b for b, _ in doc["entries"])

    def test_input_enabled_generation(self, capsys):
        status, out, _ = run(
            capsys,
            "gen", "mealy", "--states", "4", "--input-enabled", "--seed", "1",
        )
        assert status == 0
        m = lts_from_document(loads(out))
        for q in m.states:
            for i in sorted(m.inputs):
                assert any(a.symbol == i for a, _ in m.out(q))


class TestAdaptorVerb:
    def test_in_process_session(self, capsys, tmp_path):
        inputs = tmp_path / "inputs.txt"
        inputs.write_text("A\nB\nA\n", encoding="utf-8")
        status, out, _ = run(
            capsys,
            "adaptor",
            "--code",
            fixture("double-press.code.json"),
            "--sut-file",
            fixture("square.mealy.json"),
            "--inputs",
            str(inputs),
        )
        assert status == 0
        assert out.splitlines() == [
            "IN A", "SUT a/0", "SUT a/0", "OUT 0",
            "IN B", "SUT b/0", "SUT b/0", "OUT 0",
            "IN A", "SUT a/0", "SUT a/0", "OUT 0",
        ]

    def test_reads_abstract_inputs_from_stdin(self, capsys, monkeypatch):
        import io

        monkeypatch.setattr(sys, "stdin", io.StringIO("B\n"))
        status, out, _ = run(
            capsys,
            "adaptor",
            "--code",
            fixture("double-press.code.json"),
            "--sut-file",
            fixture("square.mealy.json"),
        )
        assert status == 0
        assert out.splitlines() == ["IN B", "SUT b/0", "SUT b/0", "OUT 0"]

    def test_empty_input_stream(self, capsys, tmp_path):
        inputs = tmp_path / "inputs.txt"
        inputs.write_text("", encoding="utf-8")
        status, out, _ = run(
            capsys,
            "adaptor",
            "--code",
            fixture("double-press.code.json"),
            "--sut-file",
            fixture("square.mealy.json"),
            "--inputs",
            str(inputs),
        )
        assert status == 0
        assert out == ""

    def test_not_winning_exits_3(self, capsys, tmp_path):
        full = loads((FIXTURES / "coffee.code.json").read_text(encoding="utf-8"))
        full["entries"] = [e for e in full["entries"] if e[0] != "espresso/2"]
        full["target_alphabet"] = [t for t in full["target_alphabet"] if t != "espresso/2"]
        code_file = tmp_path / "mutilated.json"
        code_file.write_text(dumps(full), encoding="utf-8")
        inputs = tmp_path / "inputs.txt"
        inputs.write_text("espresso\n", encoding="utf-8")
        status, _, err = run(
            capsys,
            "adaptor",
            "--code",
            str(code_file),
            "--sut-file",
            fixture("square.mealy.json"),
            "--inputs",
            str(inputs),
        )
        assert status == 3
        assert "NotWinning espresso" in err

    def test_code_incomplete_exits_4(self, capsys, tmp_path):
        code_doc = {
            "schema": "actioncodes/code-v1",
            "source_alphabet": ["b/0", "b/1"],
            "target_alphabet": ["B/0"],
            "entries": [["B/0", ["b/0"]]],
        }
        machine_doc = {
            "schema": "actioncodes/lts-v1",
            "kind": "mealy",
            "alphabet": ["b/0", "b/1"],
            "states": ["q0"],
            "initial": "q0",
            "transitions": [["q0", "b/0", "q0"], ["q0", "b/1", "q0"]],
        }
        code_file = tmp_path / "code.json"
        code_file.write_text(dumps(code_doc), encoding="utf-8")
        machine_file = tmp_path / "machine.json"
        machine_file.write_text(dumps(machine_doc), encoding="utf-8")
        script = tmp_path / "script.txt"
        script.write_text("1\n", encoding="utf-8")
        inputs = tmp_path / "inputs.txt"
        inputs.write_text("B\n", encoding="utf-8")
        status, _, err = run(
            capsys,
            "adaptor",
            "--code",
            str(code_file),
            "--sut-file",
            str(machine_file),
            "--script",
            str(script),
            "--inputs",
            str(inputs),
        )
        assert status == 4
        assert "CodeIncomplete" in err and "output=1" in err

    def test_exec_backend(self, capsys, tmp_path):
        sut = tmp_path / "sut.py"
        sut.write_text(SQUARE_SUT_SCRIPT, encoding="utf-8")
        inputs = tmp_path / "inputs.txt"
        inputs.write_text("A\nB\nA\n", encoding="utf-8")
        status, out, _ = run(
            capsys,
            "adaptor",
            "--code",
            fixture("double-press.code.json"),
            "--sut-exec",
            f"{sys.executable} {sut}",
            "--inputs",
            str(inputs),
        )
        assert status == 0
        assert out.count("OUT 0") == 3

    def test_tcp_backend(self, capsys, tmp_path):
        server = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        server.bind(("127.0.0.1", 0))
        server.listen(1)
        port = server.getsockname()[1]

        transitions = {
            ("q0", "b"): ("0", "q1"), ("q0", "a"): ("0", "q3"),
            ("q1", "a"): ("0", "q2"), ("q1", "b"): ("0", "q0"),
            ("q2", "b"): ("0", "q1"), ("q2", "a"): ("0", "q3"),
            ("q3", "a"): ("0", "q2"), ("q3", "b"): ("1", "q0"),
        }

        def serve():
            conn, _ = server.accept()
            state = "q0"
            buffer = b""
            while True:
                chunk = conn.recv(1024)
                if not chunk:
                    break
                buffer += chunk
                while b"\n" in buffer:
                    line, _, buffer = buffer.partition(b"\n")
                    symbol = line.decode()
                    if symbol == "RESET":
                        state = "q0"
                        continue
                    out, state = transitions[(state, symbol)]
                    conn.sendall(out.encode() + b"\n")
            conn.close()

        thread = threading.Thread(target=serve, daemon=True)
        thread.start()
        inputs = tmp_path / "inputs.txt"
        inputs.write_text("B\nA\n", encoding="utf-8")
        try:
            status, out, _ = run(
                capsys,
                "adaptor",
                "--code",
                fixture("double-press.code.json"),
                "--sut-tcp",
                f"127.0.0.1:{port}",
                "--inputs",
                str(inputs),
            )
        finally:
            server.close()
        assert status == 0
        assert out.count("OUT 0") == 2
