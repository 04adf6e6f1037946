import json
import math
from pathlib import Path

import jsonschema
import pytest

from nonauto.cli import main, parse_model, parse_sequence, parse_z
from nonauto.green import Disk, Ellipse, Segment

SCHEMA = json.loads((Path(__file__).parent.parent / "docs" / "check_report.schema.json").read_text())


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestParsers:
    def test_sequence_names(self):
        assert parse_sequence("minimal-chebyshev").kind == "minimal_chebyshev"
        assert parse_sequence("power:3").get(1).degree == 3
        assert parse_sequence("classical-chebyshev:2,3").get(2).degree == 3

    def test_unknown_sequence(self):
        with pytest.raises(ValueError):
            parse_sequence("mystery")

    def test_models(self):
        assert parse_model("disk:0,1") == Disk(0j, 1.0)
        assert parse_model("disk:1,2,0.5") == Disk(1 + 2j, 0.5)
        assert parse_model("segment") == Segment()
        assert parse_model("ellipse:2") == Ellipse(2.0)
        with pytest.raises(ValueError):
            parse_model("square:1")

    def test_points(self):
        assert parse_z("1.25") == 1.25
        assert parse_z("0,0.8") == 0.8j


class TestPointCommands:
    def test_green_segment(self, capsys):
        code, out, _ = run(capsys, "green", "--model", "segment", "--z", "1.25")
        assert code == 0 and out.strip() == "0.693147"

    def test_capacity_ellipse(self, capsys):
        code, out, _ = run(capsys, "capacity", "--model", "ellipse:2")
        assert code == 0 and out.strip() == "1.000000"

    def test_gamma_disks(self, capsys):
        code, out, _ = run(capsys, "gamma", "--a", "disk:0,1", "--b", "disk:0,4")
        assert code == 0 and out.strip() == "1.386294"

    def test_green_sequence_json(self, capsys):
        code, out, _ = run(capsys, "green", "--seq", "power:2", "--z", "3", "--n", "8",
                           "--radius", "3.0", "--json")
        assert code == 0
        doc = json.loads(out)
        assert abs(doc["value"] - math.log(3)) < 1e-9
        assert not doc["truncation_included"]

    def test_determinism(self, capsys):
        _, out1, _ = run(capsys, "gamma", "--a", "disk:0,1", "--b", "segment", "--json")
        _, out2, _ = run(capsys, "gamma", "--a", "disk:0,1", "--b", "segment", "--json")
        assert out1 == out2


class TestCheckCommand:
    def test_guided_pass(self, capsys):
        code, out, _ = run(capsys, "check", "--seq", "power:3", "--which", "guided",
                           "--R", "2", "--n-max", "20")
        assert code == 0
        doc = json.loads(out)
        jsonschema.validate(doc, SCHEMA)
        assert doc["passed"]

    def test_guided_fail(self, capsys):
        code, out, _ = run(capsys, "check", "--seq", "two-pow-neg-n-sq", "--which",
                           "guided", "--R", "2", "--n-max", "10")
        assert code == 3
        doc = json.loads(out)
        jsonschema.validate(doc, SCHEMA)
        assert doc["witness"]["n"] == 2

    def test_p2_fail_schema(self, capsys):
        code, out, _ = run(capsys, "check", "--seq", "minimal-chebyshev", "--which", "p2",
                           "--A", "10", "--n-max", "60")
        assert code == 3
        doc = json.loads(out)
        jsonschema.validate(doc, SCHEMA)
        assert doc["witness"]["value"] >= 41 / 4

    def test_finite_fail(self, capsys):
        code, out, _ = run(capsys, "check", "--seq", "n-pow-n", "--which", "finite",
                           "--n-max", "60")
        assert code == 3
        doc = json.loads(out)
        jsonschema.validate(doc, SCHEMA)

    def test_escape(self, capsys):
        code, out, _ = run(capsys, "check", "--seq", "minimal-chebyshev", "--which",
                           "escape", "--n-max", "40")
        assert code == 0
        assert json.loads(out)["radius"] <= 4.0


class TestTableCommand:
    def test_minimal_chebyshev_caps(self, capsys):
        code, out, _ = run(capsys, "table", "--seq", "minimal-chebyshev",
                           "--n-list", "1,2,3,4,5,6,7,8")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "n,logD,gamma,cap"
        last_cap = float(lines[-1].split(",")[3])
        assert abs(last_cap - 1.0) <= 1e-3

    def test_power_gammas_zero(self, capsys):
        code, out, _ = run(capsys, "table", "--seq", "power:2", "--n-list", "1,2,3")
        assert code == 0
        for line in out.strip().splitlines()[1:]:
            assert float(line.split(",")[2]) < 1e-9

    def test_unbounded_family_withholds_capacity(self, capsys):
        code, out, err = run(capsys, "table", "--seq", "n-pow-n", "--n-list", "1,2,3")
        assert code == 0
        assert "capacity column withheld" in err
        for line in out.strip().splitlines()[1:]:
            assert line.endswith(",")


class TestRenderCommand:
    def test_membership_png(self, capsys, tmp_path):
        out_path = tmp_path / "disk.png"
        code, out, err = run(capsys, "render", "--seq", "power:2", "--n", "30",
                             "--window=-2,2,-2,2", "--size", "40x40",
                             "--mode", "membership", "--out", str(out_path))
        assert code == 0
        assert out_path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
        assert "escape radius" in err

    def test_invalid_custom_sequence_exits_2(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({
            "polynomials": [[[0, 0], [0, 0], [1, 0]], [[0, 0], [1, 0]]],
            "repeat": "none"}))
        code, _, err = run(capsys, "render", "--seq", f"custom:{bad}", "--n", "2",
                           "--out", str(tmp_path / "x.png"))
        assert code == 2
        assert "degree" in err

    def test_threads_identical_output(self, capsys, tmp_path):
        paths = []
        for threads, name in ((1, "a.pgm"), (4, "b.pgm")):
            out_path = tmp_path / name
            code, _, _ = run(capsys, "--threads", str(threads), "render", "--seq",
                             "minimal-chebyshev", "--n", "30", "--size", "64x48",
                             "--mode", "green", "--format", "pgm", "--out", str(out_path))
            assert code == 0
            paths.append(out_path)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_io_failure_exits_1(self, capsys, tmp_path):
        code, _, err = run(capsys, "render", "--seq", "power:2", "--n", "5",
                           "--size", "8x8", "--out", str(tmp_path / "no" / "dir.png"))
        assert code == 1
