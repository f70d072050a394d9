import json

import numpy as np
import pytest

from dhom import cli
from dhom.report import RunReport, format_table, read_report
from dhom.witness import read_witness

SPHERE = "vars: x y z;\n(x + 0.5)^2 + y^2 + z^2 - 1;\n"
CYL = "vars: x y z;\nx^2 + y^2 - 1;\n"


@pytest.fixture
def files(tmp_path):
    (tmp_path / "sph.sys").write_text(SPHERE)
    (tmp_path / "cyl.sys").write_text(CYL)
    (tmp_path / "z.sys").write_text("vars: x y z;\nz;\n")
    (tmp_path / "bad.sys").write_text("vars: x y z;\nx^2 + * 1;\n")
    (tmp_path / "plane.sys").write_text("vars: x y z;\nx - 2*y + 1;\n")
    return tmp_path


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


class TestSeed:
    def test_flag_wins(self):
        assert cli.resolve_seed(3, {"DHOM_SEED": "9"}) == 3

    def test_env(self):
        assert cli.resolve_seed(None, {"DHOM_SEED": "9"}) == 9
        assert cli.resolve_seed(None, {}) == 0

    def test_bad_env(self, files, capsys, monkeypatch):
        monkeypatch.setenv("DHOM_SEED", "seven")
        code, _, err = run(["witness", "--hypersurface", files / "sph.sys", "--out", files / "s.json"], capsys)
        assert code == 2 and "DHOM_SEED" in err

    def test_env_used(self, files, capsys, monkeypatch):
        monkeypatch.setenv("DHOM_SEED", "4")
        run(["witness", "--hypersurface", files / "sph.sys", "--out", files / "a.json"], capsys)
        run(["witness", "--hypersurface", files / "sph.sys", "--out", files / "b.json", "--seed", "4"], capsys)
        assert (files / "a.json").read_text() == (files / "b.json").read_text()


class TestWitness:
    def test_sphere(self, files, capsys):
        code, out, _ = run(["witness", "--hypersurface", files / "sph.sys", "--out", files / "s.json"], capsys)
        assert code == 0 and "degree 2" in out
        assert read_witness(files / "s.json").degree == 2

    def test_hyperplane(self, files, capsys):
        code, out, _ = run(["witness", "--hypersurface", files / "plane.sys", "--out", files / "p.json"], capsys)
        assert code == 0 and "degree 1" in out

    def test_linear(self, files, capsys):
        code, out, _ = run(
            ["witness", "--linear", files / "z.sys", "--system", files / "z.sys", "--out", files / "l.json"], capsys
        )
        assert code == 0 and "dim 2" in out

    def test_restricted(self, files, capsys):
        code, out, _ = run(
            ["witness", "--hypersurface", files / "cyl.sys", "--restrict", files / "z.sys", "--out", files / "c.json"],
            capsys,
        )
        assert code == 0 and "degree 2 dim 1" in out

    def test_malformed(self, files, capsys):
        code, _, err = run(["witness", "--hypersurface", files / "bad.sys", "--out", files / "x.json"], capsys)
        assert code == 2 and "line 2, column 7" in err

    def test_missing_file(self, files, capsys):
        code, _, err = run(["witness", "--hypersurface", files / "nope.sys", "--out", files / "x.json"], capsys)
        assert code == 2

    def test_linear_needs_system(self, files, capsys):
        code, _, _ = run(["witness", "--linear", files / "z.sys", "--out", files / "x.json"], capsys)
        assert code == 2

    def test_usage(self, capsys):
        with pytest.raises(SystemExit) as info:
            cli.main(["witness"])
        assert info.value.code == 2


@pytest.fixture
def cyl_witness(files, capsys):
    run(["witness", "--hypersurface", files / "cyl.sys", "--out", files / "cyl.json", "--seed", 1], capsys)
    return files / "cyl.json"


class TestMember:
    def test_on(self, cyl_witness, capsys):
        code, out, _ = run(["member", "--witness", cyl_witness, "--point", "1,0,0"], capsys)
        assert code == 0 and "distance" in out

    def test_off(self, cyl_witness, capsys):
        code, _, _ = run(["member", "--witness", cyl_witness, "--point", "2,0,0"], capsys)
        assert code == 1

    def test_self(self, cyl_witness, capsys):
        ws = read_witness(cyl_witness)
        for p in ws.points:
            text = ",".join(f"{z.real:.17g}{z.imag:+.17g}j" for z in p)
            # --point=... since the text may start with a minus sign
            code, _, _ = run(["member", "--witness", cyl_witness, f"--point={text}"], capsys)
            assert code == 0

    def test_bad_point(self, cyl_witness, capsys):
        code, _, _ = run(["member", "--witness", cyl_witness, "--point", "1,zero,0"], capsys)
        assert code == 2
        code, _, _ = run(["member", "--witness", cyl_witness, "--point", "1,0"], capsys)
        assert code == 2

    def test_missing_witness(self, files, capsys):
        code, _, _ = run(["member", "--witness", files / "none.json", "--point", "1,0,0"], capsys)
        assert code == 2


class TestIntersect:
    def test_example_one_both(self, tmp_path, capsys):
        code, out, _ = run(["intersect", "--example", "1", "--mode", "both", "--out", tmp_path, "--threads", 1], capsys)
        assert code == 0
        rep = read_report(tmp_path / "report.json")
        for mode in ("intrinsic", "extrinsic"):
            r = rep.run(mode)
            assert [s.paths for s in r.stages] == [4, 4]
            assert r.counts[1] == 4
        assert rep.match_distance <= 1e-6
        assert rep.m == 2 and rep.extrinsic_variables == 9
        assert (tmp_path / "intrinsic_W1.json").exists()
        assert read_witness(tmp_path / "intrinsic_W1.json").degree == 4
        assert "endpoint match distance" in out

    def test_example_two(self, tmp_path, capsys):
        code, out, _ = run(["intersect", "--example", "2", "--out", tmp_path], capsys)
        rep = read_report(tmp_path / "report.json")
        assert code == 0 and len(rep.run("intrinsic").stages) == 3
        assert rep.run("intrinsic").counts[0] == 1 and rep.m == 4

    def test_from_files(self, files, cyl_witness, capsys):
        run(["witness", "--hypersurface", files / "sph.sys", "--out", files / "sph.json", "--seed", 2], capsys)
        code, _, _ = run(["intersect", "--wa", cyl_witness, "--wb", files / "sph.json", "--out", files / "o"], capsys)
        assert code == 0
        assert read_report(files / "o" / "report.json").run("intrinsic").counts[1] == 4

    def test_containment(self, files, cyl_witness, capsys):
        run(["witness", "--hypersurface", files / "cyl.sys", "--restrict", files / "z.sys",
             "--out", files / "circ.json"], capsys)
        code, out, _ = run(["intersect", "--wa", cyl_witness, "--wb", files / "circ.json", "--out", files / "o"], capsys)
        assert code == 3 and "A∩B = B" in out
        assert not (files / "o").exists()

    def test_containment_swapped(self, files, cyl_witness, capsys):
        run(["witness", "--hypersurface", files / "cyl.sys", "--restrict", files / "z.sys",
             "--out", files / "circ.json"], capsys)
        code, out, _ = run(["intersect", "--wa", files / "circ.json", "--wb", cyl_witness], capsys)
        assert code == 3 and "A∩B = A" in out

    def test_needs_inputs(self, capsys):
        code, _, err = run(["intersect", "--wa", "x.json"], capsys)
        assert code == 2

    def test_bad_hmax(self, tmp_path, capsys):
        code, _, _ = run(["intersect", "--example", "1", "--hmax", 5, "--out", tmp_path], capsys)
        assert code == 2

    def test_failure_exit(self, tmp_path, capsys, monkeypatch):
        real = cli.run_cascade

        def failing(*a, **kw):
            sup = real(*a, **kw)
            sup.failed = True
            return sup

        monkeypatch.setattr(cli, "run_cascade", failing)
        code, _, err = run(["intersect", "--example", "1", "--out", tmp_path], capsys)
        assert code == 4

    def test_report_reproducible(self, tmp_path, capsys):
        for sub in ("a", "b"):
            run(["intersect", "--example", "1", "--mode", "both", "--seed", 3, "--out", tmp_path / sub], capsys)
        a, b = (read_report(tmp_path / s / "report.json") for s in ("a", "b"))
        assert json.dumps(a.to_dict(times=False)) == json.dumps(b.to_dict(times=False))


class TestReport:
    def test_round_trip(self, tmp_path, capsys):
        run(["intersect", "--example", "disjoint", "--mode", "both", "--out", tmp_path], capsys)
        rep = read_report(tmp_path / "report.json")
        again = RunReport.from_dict(json.loads(json.dumps(rep.to_dict())))
        assert again == rep
        assert rep.run("intrinsic").outcomes == ["Diverged"]

    def test_rejects_other_documents(self):
        with pytest.raises(ValueError):
            RunReport.from_dict({"format": "something"})

    def test_table_alignment(self):
        text = format_table(["a", "bb"], [["x", 1.5], ["long", 12]])
        lines = text.splitlines()
        assert len({len(line) for line in lines}) == 1
        assert lines[1].startswith("----")


class TestBench:
    def test_rows_and_tables(self, capsys):
        rows = cli.bench_rows(0, 1, examples=("1", "2"))
        assert [r["m"] for r in rows] == [2, 4]
        assert [r["extrinsic_vars"] for r in rows] == [9, 12]
        assert len(rows[1]["intrinsic_stages"]) == 3
        text = cli.format_bench(rows)
        assert "34.70/15.84" in text and "stage 3" in text

    def test_error_row(self, capsys, monkeypatch):
        rows = cli.bench_rows(0, 1, examples=("nope",))
        assert "error" in rows[0]
        assert "error" in cli.format_bench(rows)

    def test_bad_repeats(self, capsys):
        code, _, _ = run(["bench", "--repeats", 0], capsys)
        assert code == 2
