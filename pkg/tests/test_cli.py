"""Command-line behavior: reports, exit codes, files, determinism."""

import pytest

from treepack import parse_instance, parse_packing, reduce_instance, verify_packing
from treepack.cli import main
from conftest import c4, doubled_triangle
from treepack import serialize_instance


def run_cli(capsys, *argv) -> tuple[int, str]:
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def strip_timings(report: str) -> str:
    return "\n".join(line for line in report.splitlines()
                     if not line.startswith("time_"))


@pytest.fixture
def doubled_triangle_file(tmp_path):
    path = tmp_path / "dt.txt"
    path.write_text(serialize_instance(doubled_triangle(), {0, 1, 2}), encoding="utf-8")
    return str(path)


@pytest.fixture
def c4_file(tmp_path):
    path = tmp_path / "c4.txt"
    path.write_text(serialize_instance(c4(), {0, 1, 2, 3}), encoding="utf-8")
    return str(path)


class TestVerifyCuts:
    def test_doubled_triangle_passes_nwt_k1(self, capsys, doubled_triangle_file):
        code, out = run_cli(capsys, "verify-cuts", doubled_triangle_file,
                            "--k", "1", "--threshold", "nwt")
        assert code == 0
        assert "steiner_connectivity 4" in out
        assert "result pass" in out

    def test_c4_fails_nwt_k2(self, capsys, c4_file):
        code, out = run_cli(capsys, "verify-cuts", c4_file,
                            "--k", "2", "--threshold", "nwt")
        assert code == 1
        assert "result fail" in out

    def test_duplicate_edge_id_exits_2(self, capsys, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("graph 2 2\nt 0\nt 1\ne 0 0 1\ne 0 0 1\n", encoding="utf-8")
        code, _ = run_cli(capsys, "verify-cuts", str(path), "--k", "1")
        assert code == 2

    def test_missing_file_exits_2(self, capsys):
        code, _ = run_cli(capsys, "verify-cuts", "/nonexistent", "--k", "1")
        assert code == 2


class TestPack:
    def test_spanning_success_writes_packing(self, capsys, doubled_triangle_file,
                                             tmp_path):
        out_path = tmp_path / "p.txt"
        code, out = run_cli(capsys, "pack", doubled_triangle_file,
                            "--mode", "spanning", "--k", "2", "--out", str(out_path))
        assert code == 0
        assert "outcome packed" in out and "verified yes" in out
        packing = parse_packing(out_path.read_text(encoding="utf-8"))
        g, _ = parse_instance(open(doubled_triangle_file).read())
        assert verify_packing(g, None, packing).ok

    def test_c4_spanning_certificate(self, capsys, c4_file):
        code, out = run_cli(capsys, "pack", c4_file, "--mode", "spanning", "--k", "2")
        assert code == 1
        assert "outcome certificate" in out
        assert "certificate_kind violating-partition" in out
        assert "certificate_partition 0|1|2|3" in out

    def test_steiner_on_generated_normal_form(self, capsys, tmp_path):
        inst = tmp_path / "fkk.txt"
        code, _ = run_cli(capsys, "gen", "fkk", "--n", "4", "--k", "1",
                          "--seed", "5", "--out", str(inst))
        assert code == 0
        out_path = tmp_path / "p.txt"
        code, out = run_cli(capsys, "pack", str(inst), "--mode", "steiner",
                            "--k", "1", "--threshold", "fkk", "--out", str(out_path))
        assert code == 0
        g, terminals = parse_instance(inst.read_text(encoding="utf-8"))
        packing = parse_packing(out_path.read_text(encoding="utf-8"))
        assert verify_packing(g, terminals, packing).ok

    def test_cut_too_small_certificate(self, capsys, c4_file):
        code, out = run_cli(capsys, "pack", c4_file, "--mode", "steiner", "--k", "2")
        assert code == 1
        assert "certificate_kind cut-too-small" in out

    def test_connector_mode_end_to_end(self, capsys, tmp_path):
        inst = tmp_path / "k.txt"
        run_cli(capsys, "gen", "kriesell", "--n", "3", "--k", "1", "--seed", "2",
                "--out", str(inst))
        out_path = tmp_path / "c.txt"
        code, out = run_cli(capsys, "pack", str(inst), "--mode", "connector",
                            "--k", "1", "--threshold", "paper-g",
                            "--brute-fallback", "--out", str(out_path))
        g, terminals = parse_instance(inst.read_text(encoding="utf-8"))
        if code == 0:
            packing = parse_packing(out_path.read_text(encoding="utf-8"))
            assert packing.mode == "connector"
            assert verify_packing(g, terminals, packing).ok
        else:
            assert "certificate_kind" in out

    def test_packing_printed_when_no_out_file(self, capsys, doubled_triangle_file):
        code, out = run_cli(capsys, "pack", doubled_triangle_file,
                            "--mode", "spanning", "--k", "2")
        assert code == 0
        assert "packing spanning 2" in out


class TestGen:
    def test_determinism_bitwise(self, capsys, tmp_path):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        run_cli(capsys, "gen", "nwt", "--n", "5", "--k", "2", "--seed", "7",
                "--out", str(a))
        run_cli(capsys, "gen", "nwt", "--n", "5", "--k", "2", "--seed", "7",
                "--out", str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_different_seed_changes_instance(self, capsys, tmp_path):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        run_cli(capsys, "gen", "nwt", "--n", "5", "--k", "2", "--seed", "1",
                "--out", str(a))
        run_cli(capsys, "gen", "nwt", "--n", "5", "--k", "2", "--seed", "2",
                "--out", str(b))
        assert a.read_bytes() != b.read_bytes()

    def test_fkk_output_is_already_reduced(self, capsys, tmp_path):
        for seed in (0, 1, 2):
            inst = tmp_path / f"f{seed}.txt"
            run_cli(capsys, "gen", "fkk", "--n", "4", "--k", "1",
                    "--seed", str(seed), "--out", str(inst))
            g, terminals = parse_instance(inst.read_text(encoding="utf-8"))
            rr = reduce_instance(g, terminals, 3)
            assert rr.form == "fkk"
            assert rr.graph == g and len(rr.trace) == 0

    def test_kriesell_header_records_connectivity(self, capsys, tmp_path):
        inst = tmp_path / "k.txt"
        run_cli(capsys, "gen", "kriesell", "--n", "3", "--k", "1",
                "--seed", "4", "--out", str(inst))
        text = inst.read_text(encoding="utf-8")
        header = [l for l in text.splitlines() if l.startswith("#")]
        joined = " ".join(header)
        assert "connectivity=" in joined and "target=8" in joined
        value = int(joined.split("connectivity=")[1].split()[0])
        assert value >= 8

    def test_parse_round_trip_of_generated_instances(self, capsys, tmp_path):
        for model, n in (("nwt", 4), ("fkk", 4), ("kriesell", 3)):
            inst = tmp_path / f"{model}.txt"
            run_cli(capsys, "gen", model, "--n", str(n), "--k", "1",
                    "--seed", "9", "--out", str(inst))
            text = inst.read_text(encoding="utf-8")
            g, terminals = parse_instance(text)
            comments = [l[2:] for l in text.splitlines() if l.startswith("#")]
            assert serialize_instance(g, terminals, comments=comments) == text


class TestSweep:
    def test_nwt_sweep_all_packed(self, capsys):
        code, out = run_cli(capsys, "sweep", "nwt", "--n", "3:4", "--k", "1:2",
                            "--seeds", "0:3", "--threshold", "nwt")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0].startswith("model\tn\tk")
        for row in lines[1:]:
            fields = row.split("\t")
            assert fields[5] == fields[4]  # packed == seeds
            assert fields[9] == fields[8]  # brute agrees wherever checked

    def test_empty_seed_list_prints_header_only(self, capsys):
        code, out = run_cli(capsys, "sweep", "nwt", "--n", "3", "--k", "1")
        assert code == 0
        assert out.strip().splitlines() == [
            "model\tn\tk\tthreshold\tseeds\tpacked\tcertificates\tinfeasible"
            "\tbrute_checked\tbrute_agree"]

    def test_kriesell_sweep_all_packed_at_tree_threshold(self, capsys):
        code, out = run_cli(capsys, "sweep", "kriesell", "--n", "3", "--k", "1",
                            "--seeds", "0:4", "--threshold", "paper-f")
        assert code == 0
        for row in out.strip().splitlines()[1:]:
            fields = row.split("\t")
            assert fields[5] == fields[4]  # every seed packed

    def test_sweep_deterministic(self, capsys):
        _, first = run_cli(capsys, "sweep", "fkk", "--n", "3:4", "--k", "1",
                           "--seeds", "0:2", "--threshold", "fkk")
        _, second = run_cli(capsys, "sweep", "fkk", "--n", "3:4", "--k", "1",
                            "--seeds", "0:2", "--threshold", "fkk")
        assert first == second


class TestReportDeterminism:
    def test_pack_reports_identical_modulo_timings(self, capsys,
                                                   doubled_triangle_file, tmp_path):
        out1 = tmp_path / "p1.txt"
        out2 = tmp_path / "p2.txt"
        _, r1 = run_cli(capsys, "pack", doubled_triangle_file, "--mode", "spanning",
                        "--k", "2", "--out", str(out1))
        _, r2 = run_cli(capsys, "pack", doubled_triangle_file, "--mode", "spanning",
                        "--k", "2", "--out", str(out2))
        assert strip_timings(r1).replace(str(out1), "X") == \
            strip_timings(r2).replace(str(out2), "X")
        assert out1.read_bytes() == out2.read_bytes()
