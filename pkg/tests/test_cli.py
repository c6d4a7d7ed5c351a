"""CLI thin client driven through the in-process API."""

import socket
import threading

import pytest

from covrl.bridge import Done, Hello, Request, Stimulus, decode_message, encode_message
from covrl.cli import main
from covrl.corpus import CORPUS_DIR


def test_designs_listing(capsys):
    assert main(["designs"]) == 0
    out = capsys.readouterr().out
    assert "alu" in out and "tap_fsm" in out


def test_parse_to_xml_and_json(tmp_path, capsys):
    out_xml = tmp_path / "alu.ports.xml"
    assert main(["parse", "--in", str(CORPUS_DIR / "alu.v"),
                 "--out", str(out_xml)]) == 0
    assert out_xml.read_text() == (CORPUS_DIR / "alu.ports.xml").read_text()
    out_json = tmp_path / "alu.ports.json"
    assert main(["parse", "--in", str(CORPUS_DIR / "alu.v"),
                 "--out", str(out_json)]) == 0
    assert out_json.read_text().startswith('{"design":"alu"')


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.v"
    bad.write_text("module m (input wire a;\nendmodule")
    assert main(["parse", "--in", str(bad)]) == 1
    assert "error" in capsys.readouterr().err


def test_tbgen_matches_golden(tmp_path, capsys):
    out = tmp_path / "alu_tb.sv"
    assert main(["tbgen", "--ports", str(CORPUS_DIR / "alu.ports.xml"),
                 "--out", str(out)]) == 0
    assert out.read_text() == (CORPUS_DIR / "alu_tb.sv").read_text()


def test_tbgen_needs_a_source(capsys):
    assert main(["tbgen"]) == 2


def test_maxcov_prints_csv(capsys):
    assert main(["maxcov", "--design", "fir4", "--budget", "512",
                 "--seeds", "1"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "design,coverage_type,max_percent,budget,method"
    assert out[1].startswith("fir4,code,")


def test_run_writes_trajectory_and_dump(tmp_path, capsys):
    config = tmp_path / "run.cfg"
    config.write_text(
        "top_module = fir4\ncoverage_type = code\nlearning_policy = random\n"
        "ports = din\nreward_scheme = optimistic\nmax_steps = 30\nseed = 2\n")
    dump = tmp_path / "dump.csv"
    assert main(["run", "--config", str(config), "--out", str(tmp_path),
                 "--probe-budget", "512", "--coverage-dump", str(dump)]) == 0
    trajectory = tmp_path / "trajectory_fir4_random_optimistic_2.csv"
    assert trajectory.exists()
    assert trajectory.read_text().splitlines()[0] == "step,score"
    assert dump.read_text().splitlines()[0].startswith("1,")


def test_compare_writes_directory(tmp_path, capsys):
    out = tmp_path / "cmp"
    assert main(["compare", "--designs", "fir4", "--seeds", "1",
                 "--out", str(out), "--probe-budget", "512"]) == 0
    assert (out / "summary.csv").exists()
    assert (out / "maxcov.csv").exists()
    stdout = capsys.readouterr().out
    assert "summary.csv" not in stdout or "design," in stdout


def test_serve_hosts_a_session(tmp_path, capsys):
    config = tmp_path / "serve.cfg"
    config.write_text(
        "top_module = alu\ncoverage_type = code\nlearning_policy = random\n"
        "ports = opcode\nreward_scheme = penalty\nmax_steps = 16\nseed = 3\n")

    result = {}

    def host():
        result["code"] = main(["serve", "--port", "0", "--config", str(config),
                               "--sessions", "1"])

    thread = threading.Thread(target=host)
    thread.start()
    import time
    deadline = time.time() + 5
    port = None
    while time.time() < deadline and port is None:
        out = capsys.readouterr().out
        for line in out.splitlines():
            if "listening on" in line:
                port = int(line.rsplit(":", 1)[1])
        time.sleep(0.05)
    assert port is not None, "server never reported its port"

    with socket.create_connection(("127.0.0.1", port), timeout=5) as sock:
        reader = sock.makefile("rb")
        sock.sendall(encode_message(Hello(design="alu", ports=(("opcode", 3),))))
        sock.sendall(encode_message(Request(cycle=1, coverage="0.000000")))
        assert isinstance(decode_message(reader.readline()), Stimulus)
        sock.sendall(encode_message(Request(cycle=2, coverage="100.000000")))
        assert decode_message(reader.readline()) == Done(reason="target-reached")
    thread.join(timeout=10)
    assert result.get("code") == 0
