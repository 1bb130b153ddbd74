# tests/test_app.py
import json

import pytest

from app.app import EXIT_INVALID, EXIT_OK, EXIT_PIPELINE, main
from app.graph.coloured import ColouredGraph
from app.graph.constructions import extremal_colouring
from app.io.decode import format_crg, load_crg, save_crg


@pytest.fixture
def crg(tmp_path):
    def write(g: ColouredGraph, name: str = "g.crg") -> str:
        path = tmp_path / name
        save_crg(g, path)
        return str(path)
    return write


class TestConstructAndVerify:
    def test_extremal_round_trip(self, tmp_path, capsys):
        out = tmp_path / "ext.crg"
        assert main(["construct-extremal", "--s", "3", "--n", "2", "-o", str(out)]) == EXIT_OK
        assert out.read_text() == format_crg(extremal_colouring(3, 2))
        assert main(["verify", "--in", str(out), "--n", "2", "--s", "3"]) == EXIT_OK
        assert capsys.readouterr().out.strip() == "valid"

    def test_stdout(self, capsys):
        assert main(["construct-extremal", "--s", "2", "--n", "1"]) == EXIT_OK
        assert capsys.readouterr().out == "CRG 1\nn 1\n"

    def test_pattern_lower_bound(self, tmp_path, capsys):
        h = tmp_path / "k23.h"
        h.write_text("n 5\n0 2\n0 3\n0 4\n1 2\n1 3\n1 4\n")
        out = tmp_path / "lb.crg"
        assert main(["construct-extremal", "--h-file", str(h), "--n", "3", "-o", str(out)]) == EXIT_OK
        assert load_crg(out).n_vertices == 8
        assert main(["verify", "--in", str(out), "--n", "3", "--h-file", str(h)]) == EXIT_OK

    def test_one_vertex_too_many(self, crg, capsys):
        path = crg(ColouredGraph.all_red(7))
        assert main(["verify", "--in", path, "--n", "2", "--s", "3"]) == EXIT_INVALID
        assert capsys.readouterr().out.startswith("invalid: ")

    def test_verify_needs_one_pattern(self, crg):
        path = crg(ColouredGraph.all_red(3))
        with pytest.raises(SystemExit) as info:
            main(["verify", "--in", path, "--n", "2"])
        assert info.value.code == 2

    def test_clique_and_partition_certificates(self, crg, tmp_path, capsys):
        path = crg(extremal_colouring(3, 2))
        clique = tmp_path / "c.cert"
        clique.write_text("blue-clique\n0 3\n")
        assert main(["verify", "--in", path, "--cert", str(clique), "--s", "2"]) == EXIT_OK
        clique.write_text("blue-clique\n0 1\n")
        assert main(["verify", "--in", path, "--cert", str(clique), "--s", "2"]) == EXIT_INVALID
        part = tmp_path / "p.cert"
        part.write_text("partition\nS0:\nS1: 0 1 2\nS2: 3 4 5\n")
        assert main(["verify", "--in", path, "--cert", str(part), "--s", "3", "--n", "2"]) == EXIT_OK


class TestEmbed:
    def test_full_pipeline_certificate_verifies(self, crg, tmp_path, capsys):
        path = crg(ColouredGraph.all_red(31))
        cert = tmp_path / "e.cert"
        assert main(["embed", "--in", path, "--s", "3", "--n", "4", "-o", str(cert)]) == EXIT_OK
        assert cert.read_text().startswith("embedding\ncube 0000 -> 0\n")
        assert main(["verify", "--in", path, "--cert", str(cert)]) == EXIT_OK

    def test_wrong_size_is_a_pipeline_error(self, crg, capsys):
        path = crg(ColouredGraph.all_red(30))
        assert main(["embed", "--in", path, "--s", "3", "--n", "4"]) == EXIT_PIPELINE
        record = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert record["condition"] == "precondition-violated"
        assert record["stage"] == "pipeline"

    def test_any_size(self, crg, capsys):
        path = crg(ColouredGraph.all_red(30))
        assert main(["embed", "--in", path, "--s", "3", "--n", "4", "--any-size"]) == EXIT_OK
        assert "no certificate required: 30 < 31 vertices" in capsys.readouterr().out

    def test_dense_strategy(self, crg, tmp_path):
        path = crg(ColouredGraph.all_red(24))
        cert = tmp_path / "d.cert"
        assert main(["embed", "--in", path, "--n", "4", "--strategy", "dense", "-o", str(cert)]) == EXIT_OK
        assert main(["verify", "--in", path, "--cert", str(cert)]) == EXIT_OK

    def test_path_strategy_writes_verdicts(self, crg, tmp_path):
        path = crg(ColouredGraph.all_red(64))
        verdicts = tmp_path / "v.txt"
        cert = tmp_path / "p.cert"
        code = main(["embed", "--in", path, "--n", "4", "--strategy", "path",
                     "--verdicts", str(verdicts), "-o", str(cert)])
        assert code == EXIT_OK
        assert verdicts.read_text().startswith("verdicts 1\n")


class TestDecompose:
    def test_family_and_trace(self, crg, tmp_path):
        path = crg(ColouredGraph.all_red(64))
        fam, trace = tmp_path / "f.txt", tmp_path / "t.txt"
        assert main(["decompose", "--in", path, "--s", "3", "-o", str(fam), "--trace", str(trace)]) == EXIT_OK
        lines = fam.read_text().splitlines()
        assert lines[:2] == ["family", "level 0"]
        assert lines[2] == "U1: " + " ".join(str(v) for v in range(64))
        assert len(trace.read_text().splitlines()) == 2


class TestSearchAndProfile:
    def test_counterexample(self, tmp_path, capsys):
        out = tmp_path / "cx.crg"
        assert main(["ramsey-search", "--s", "3", "--target", "c4", "--N", "6", "-o", str(out)]) == EXIT_INVALID
        assert capsys.readouterr().out.strip() == "counterexample"
        assert load_crg(out).n_vertices == 6

    def test_holds(self, capsys):
        assert main(["ramsey-search", "--s", "3", "--target", "c4", "--N", "7"]) == EXIT_OK
        assert capsys.readouterr().out.strip() == "holds"

    def test_budget_from_config(self, tmp_path, capsys):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"oracle_budget": 100, "iso_cutoff": 0}))
        args = ["ramsey-search", "--s", "3", "--target", "c4", "--N", "7", "--config", str(cfg)]
        assert main(args) == EXIT_PIPELINE
        record = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert record["condition"] == "budget-exceeded"

    def test_flag_beats_config(self, tmp_path, capsys):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"oracle_budget": 100}))
        args = ["ramsey-search", "--s", "3", "--target", "c4", "--N", "7", "--config", str(cfg),
                "--budget", "10000000"]
        assert main(args) == EXIT_OK
        assert capsys.readouterr().out.strip() == "holds"

    def test_profile(self, tmp_path, capsys):
        h = tmp_path / "k3.h"
        h.write_text("n 3\n0 1\n1 2\n0 2\n")
        assert main(["profile-h", "--h-file", str(h)]) == EXIT_OK
        assert capsys.readouterr().out == "chi 3\nsigma 1\n"

    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit) as info:
            main(["colour"])
        assert info.value.code == 2
